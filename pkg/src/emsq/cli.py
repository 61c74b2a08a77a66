"""Command line entry point ``emsq``.

Exit codes: 0 success, 1 usage or parse error, 2 physics/domain error
(unstable device, unphysical matrix), 3 numerical failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from emsq import io
from emsq.config import load_config
from emsq.errors import EmsqError, PhysicsError, UsageError
from emsq.gaussian import entanglement_report, epr_duan
from emsq.lab.chain import RfChain, calibrate_chain, synthetic_sweep
from emsq.lab.estimate import estimate_cm, estimate_duan
from emsq.lab.histogram import difference_histogram
from emsq.lab.sampling import QuadratureBatch, sample_quadratures
from emsq.model.spectrum import filtered_output_cm
from emsq.model.sweep import SWEEP_COLUMNS, power_sweep

EXIT_OK = 0
EXIT_USAGE = 1

REPORT_FIELDS = (
    "phi", "delta_epr", "squeezing_db_x", "squeezing_db_p", "zeta_minus", "e_n",
    "discord", "e_f", "nu_minus", "nu_plus",
)
ANGLE_COLUMNS = ("phi_rad", "x_minus_var", "p_plus_var", "delta_epr", "squeezing_db_x", "squeezing_db_p")
CALIBRATION_RESULT_COLUMNS = ("channel", "gain_db", "n_add", "gain_db_se", "n_add_se", "zeta", "residual_rms")


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the usage code instead of argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class StageError(Exception):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.cause = exc


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _dumps(obj) -> str:
    # repr of a Python float is the shortest exact round-trip form
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=True)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _model_cm(cfg):
    dev = cfg.device
    op = dev.operating_point()
    return op, filtered_output_cm(op, dev.bandwidth_hz, dev.filter_kind)


# -- commands ---------------------------------------------------------------


def cmd_metrics(args) -> int:
    if args.cm:
        cm = io.read_cm(args.cm)
        linewidth_hz = args.linewidth_hz
        source = {"cm_file": str(args.cm)}
    else:
        cfg = load_config(args.config)
        op, cm = _model_cm(cfg)
        linewidth_hz = op.gamma_eff / (2.0 * math.pi)
        source = {"config": cfg.source, "c1": op.c1, "c2": op.c2}
    rep = entanglement_report(cm, args.phi)
    out = rep.to_dict()
    if linewidth_hz:
        out["ebit_rate"] = rep.e_f * linewidth_hz
    if args.format == "csv":
        cols = list(REPORT_FIELDS) + (["ebit_rate"] if "ebit_rate" in out else [])
        _emit(io.table_to_string(cols, [out], "entanglement metrics at the reported detector angle phi (rad)"), args.out)
    else:
        _emit(_dumps({"source": source, "cm": cm.v.tolist(), "report": out}) + "\n", args.out)
    return EXIT_OK


def _grid(args):
    if args.grid:
        try:
            return [float(x) for x in args.grid.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--grid must be comma-separated numbers, got {args.grid!r}")
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    return list(np.linspace(args.p_min, args.p_max, args.points))


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    dev = cfg.device
    if args.pump_noise is not None:
        a1, a2 = args.pump_noise
        dev = replace(dev, pump_noise_a1=a1, pump_noise_a2=a2)
    try:
        rows = power_sweep(dev, _grid(args), workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    dicts = [r.to_dict() for r in rows]
    if args.format == "json":
        _emit(_dumps(dicts) + "\n", args.out)
    else:
        comment = (
            "red pump power (dBm), cooperativities, stable flag, Duan sum, log-negativity (ebits), "
            "discord (bits), per-row error"
        )
        _emit(io.table_to_string(SWEEP_COLUMNS, dicts, comment), args.out)
    failed = [r for r in rows if r.error and r.error != "unstable"]
    return 3 if rows and len(failed) == len(rows) else EXIT_OK


def cmd_angle(args) -> int:
    if args.n_angles < 1:
        raise UsageError("--n-angles must be >= 1")
    if args.cm:
        cm = io.read_cm(args.cm)
    else:
        _, cm = _model_cm(load_config(args.config))
    cm.check_physical()
    rows = []
    for phi in 2.0 * np.pi * np.arange(args.n_angles) / args.n_angles:
        d = epr_duan(cm, float(phi))
        rows.append(
            {
                "phi_rad": float(phi),
                "x_minus_var": d.x_minus_var,
                "p_plus_var": d.p_plus_var,
                "delta_epr": d.delta_epr,
                "squeezing_db_x": d.squeezing_db_x,
                "squeezing_db_p": d.squeezing_db_p,
            }
        )
    if args.format == "json":
        _emit(_dumps(rows) + "\n", args.out)
    else:
        comment = "detector angle of channel 1 (rad), EPR variances, Duan sum, squeezing (dB re vacuum)"
        _emit(io.table_to_string(ANGLE_COLUMNS, rows, comment), args.out)
    return EXIT_OK


def _calibration_temps(lab, n_points=None, t_min=None, t_max=None):
    lo = lab.cal_t_min_k if t_min is None else t_min
    hi = lab.cal_t_max_k if t_max is None else t_max
    n = lab.cal_points if n_points is None else n_points
    if not 0 < lo < hi:
        raise UsageError("calibration temperatures need 0 < t_min < t_max")
    return np.linspace(lo, hi, n)


def _fit_chain(points, chain: RfChain):
    return calibrate_chain(points, chain.omega_c, chain.r_ohm, chain.bandwidth_hz)


def cmd_calibrate(args) -> int:
    cfg = load_config(args.config)
    results = []
    if args.points:
        chain = cfg.chains[args.channel - 1]
        res = _fit_chain(io.read_calibration(args.points), chain)
        results.append({"channel": args.channel, **res._asdict()})
    else:
        temps = _calibration_temps(cfg.lab, args.n_points, args.t_min, args.t_max)
        rel = cfg.lab.cal_rel_noise if args.rel_noise is None else args.rel_noise
        seeds = np.random.SeedSequence(args.seed).spawn(2)
        for j, (chain, ss) in enumerate(zip(cfg.chains, seeds), start=1):
            pts = synthetic_sweep(chain, temps, rel, np.random.default_rng(ss))
            if args.write_points:
                io.write_calibration(Path(args.write_points).with_suffix(f".ch{j}.csv"), pts)
            res = _fit_chain(pts, chain)
            results.append({"channel": j, **res._asdict()})
    if args.format == "json":
        _emit(_dumps(results) + "\n", args.out)
    else:
        comment = "fitted gain (dB) and added noise (quanta) with standard errors, scaling factor (V^2/quantum)"
        _emit(io.table_to_string(CALIBRATION_RESULT_COLUMNS, results, comment), args.out)
    return EXIT_OK


def _child_seeds(seed, n):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def _stage(name, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except EmsqError as exc:
        raise StageError(name, exc) from exc


def _recalibrate(batch: QuadratureBatch, true_chains, fitted) -> QuadratureBatch:
    """Voltages through the true chains, referred back to quanta with the fitted scaling factors."""
    volts = batch.to_voltages(true_chains)
    scale = np.array([math.sqrt(fitted[0].zeta)] * 2 + [math.sqrt(fitted[1].zeta)] * 2)
    return QuadratureBatch(volts / scale, batch.pumps_on, batch.seed)


def cmd_experiment(args) -> int:
    cfg = _stage("config", load_config, args.config)
    out = Path(args.out or "experiment")
    out.mkdir(parents=True, exist_ok=True)
    seed_on, seed_off, seed_cal1, seed_cal2 = _child_seeds(args.seed, 4)
    outputs = {}

    def save(name, writer, *payload):
        path = out / name
        writer(path, *payload)
        outputs[name] = path

    def save_json(name, obj):
        save(name, lambda p, o: p.write_text(_dumps(o) + "\n"), obj)

    # model
    op, true_cm = _stage("model", _model_cm, cfg)
    true_report = _stage("model", entanglement_report, true_cm)
    save("cm_true.json", io.write_cm, true_cm)

    # calibration on a synthetic 50 ohm load sweep
    temps = _stage("calibration", _calibration_temps, cfg.lab)
    fitted, cal_results = [], []
    for j, (chain, s) in enumerate(zip(cfg.chains, (seed_cal1, seed_cal2)), start=1):
        pts = synthetic_sweep(chain, temps, cfg.lab.cal_rel_noise, s)
        save(f"calibration_ch{j}.csv", io.write_calibration, pts)
        res = _stage("calibration", _fit_chain, pts, chain)
        cal_results.append({"channel": j, **res._asdict(), "gain_db_true": chain.gain_db, "n_add_true": chain.n_add})
        fitted.append(RfChain.from_zeta(res.zeta, res.n_add, chain.r_ohm, chain.bandwidth_hz, chain.omega_c))
    save_json("calibration.json", cal_results)

    # sampling
    on = _stage("sampling", sample_quadratures, true_cm, cfg.chains, args.n_on, seed_on, True)
    off = _stage("sampling", sample_quadratures, None, cfg.chains, args.n_off, seed_off, False)
    save("batch_on.bin", io.write_batch, on)
    save("batch_off.bin", io.write_batch, off)
    on_q = _recalibrate(on, cfg.chains, fitted)
    off_q = _recalibrate(off, cfg.chains, fitted)

    # estimation
    temps_in = (cfg.lab.t_input_k, cfg.lab.t_input_k)
    omegas = (cfg.chains[0].omega_c, cfg.chains[1].omega_c)
    est = _stage("estimation", estimate_cm, on_q, off_q, temps_in, omegas)
    duan = _stage("estimation", estimate_duan, on_q, off_q, temps_in, omegas)
    save_json("cm_estimated.json", est.to_dict())

    # metrics
    rep = _stage("metrics", entanglement_report, est.cm)
    metrics = {
        "estimated": rep.to_dict(),
        "duan_phi0": {"delta_epr": duan.delta_epr, "se": duan.se},
        "true": true_report.to_dict(),
        "true_delta_epr_phi0": epr_duan(true_cm).delta_epr,
        "operating_point": op.to_dict(),
    }
    save_json("metrics.json", metrics)

    # histograms
    for name, pair in (("x1x2", (0, 2)), ("p1p2", (1, 3))):
        h = _stage("histogram", difference_histogram, on_q, off_q, pair)
        csv_path, json_path = out / f"hist_{name}.csv", out / f"hist_{name}.json"
        io.write_histogram(csv_path, json_path, h)
        outputs[csv_path.name] = csv_path
        outputs[json_path.name] = json_path

    manifest = {
        "inputs": {
            "config": cfg.source,
            "config_values": cfg.raw,
            "seed": args.seed,
            "n_on": args.n_on,
            "n_off": args.n_off,
            "derived_seeds": {"on": seed_on, "off": seed_off, "cal1": seed_cal1, "cal2": seed_cal2},
        },
        "outputs": {name: _sha256(path) for name, path in sorted(outputs.items())},
    }
    (out / "manifest.json").write_text(_dumps(manifest) + "\n")
    summary = {
        "out": str(out),
        "delta_epr_estimated": duan.delta_epr,
        "delta_epr_se": duan.se,
        "delta_epr_true": metrics["true_delta_epr_phi0"],
    }
    sys.stdout.write(_dumps(summary) + "\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _pair_of_floats(text):
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers")
    return a, b


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults, so a flag
    # given before the subcommand is not overwritten
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=d(None), help="device configuration file (default: bundled reference device)")
    p.add_argument("--seed", type=int, default=d(0), help="base RNG seed (default: 0)")
    p.add_argument("--out", default=d(None), help="output file (directory for 'experiment'); default stdout")
    p.add_argument("--format", choices=("csv", "json"), default=d(None), help="output format")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = _Parser(prog="emsq", description=__doc__.splitlines()[0], parents=[_global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("metrics", parents=[common], help="entanglement metrics of a CM or device")
    p.add_argument("--cm", help="covariance matrix JSON file; otherwise the device model is used")
    p.add_argument("--phi", type=float, default=None, help="detector angle (rad); default optimal")
    p.add_argument("--linewidth-hz", type=float, default=None, help="emission linewidth for the ebit rate (--cm only)")
    p.set_defaults(func=cmd_metrics, default_format="json")

    p = sub.add_parser("sweep", parents=[common], help="metrics versus red pump power")
    p.add_argument("--p-min", type=float, default=-88.0, help="lowest red power (dBm)")
    p.add_argument("--p-max", type=float, default=-78.0, help="highest red power (dBm)")
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--grid", help="explicit comma-separated powers (dBm); overrides the range")
    p.add_argument("--pump-noise", type=_pair_of_floats, default=None, metavar="A1,A2",
                   help="pump-induced occupation per watt for each cavity")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("angle", parents=[common], help="EPR variances versus detector angle")
    p.add_argument("--cm", help="covariance matrix JSON file; otherwise the device model is used")
    p.add_argument("--n-angles", type=int, default=360)
    p.set_defaults(func=cmd_angle, default_format="csv")

    p = sub.add_parser("experiment", parents=[common], help="full synthetic measurement pipeline")
    p.add_argument("--n-on", type=int, default=216000)
    p.add_argument("--n-off", type=int, default=604800)
    p.set_defaults(func=cmd_experiment, default_format="json")

    p = sub.add_parser("calibrate", parents=[common], help="fit chain gain and added noise")
    p.add_argument("--points", help="calibration CSV (temp_k, noise_v2hz, sigma); default: synthetic sweep")
    p.add_argument("--channel", type=int, choices=(1, 2), default=1, help="channel for --points")
    p.add_argument("--n-points", type=int, default=None)
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--rel-noise", type=float, default=None)
    p.add_argument("--write-points", help="also save the synthetic points (one CSV per channel)")
    p.set_defaults(func=cmd_calibrate, default_format="json")
    return parser


def _fail(code, kind, message, stage=None):
    payload = {"error": kind, "message": message}
    if stage:
        payload["stage"] = stage
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except StageError as exc:
        return _fail(exc.cause.exit_code, type(exc.cause).__name__, str(exc.cause), exc.stage)
    except EmsqError as exc:
        return _fail(exc.exit_code, type(exc).__name__, str(exc))
    except ValueError as exc:
        return _fail(PhysicsError.exit_code, "ValueError", str(exc))


if __name__ == "__main__":
    sys.exit(main())
