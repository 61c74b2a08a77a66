"""File formats: quadrature batches, calibration points, histograms and tables.

Text outputs print floats with 17 significant digits so every value
round-trips exactly through float64. CSV files start with one ``#`` comment
line describing the columns, followed by a header row.
"""
from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from emsq.errors import FormatError
from emsq.gaussian import QUADRATURES, CovMat4
from emsq.lab.chain import CalibrationPoint
from emsq.lab.histogram import DiffHistogram
from emsq.lab.sampling import QuadratureBatch

BATCH_MAGIC = b"EMSQ1"
BATCH_HEADER = struct.Struct("<5sQBq")
NO_SEED = -1


def fmt(value) -> str:
    """Text form of one table cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def parse_cell(text: str):
    """Inverse of :func:`fmt` for numeric, boolean and empty cells."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


# -- tables -----------------------------------------------------------------


def table_to_string(columns: Sequence[str], rows: Iterable[Mapping], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_table(path, columns: Sequence[str], rows: Iterable[Mapping], comment: str) -> None:
    Path(path).write_text(table_to_string(columns, rows, comment))


def read_table(path) -> list[dict]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [{k: parse_cell(v) for k, v in row.items()} for row in reader]


# -- covariance matrices ----------------------------------------------------


def read_cm(path) -> CovMat4:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read covariance file {path}: {exc}") from exc
    return CovMat4.from_json(text)


def write_cm(path, cm: CovMat4) -> None:
    Path(path).write_text(cm.to_json(indent=2) + "\n")


# -- quadrature batches -----------------------------------------------------


def write_batch(path, batch: QuadratureBatch) -> None:
    """Binary little-endian: header ``(magic, n, pumps_on, seed)`` then ``n x 4`` float64."""
    seed = NO_SEED if batch.seed is None else int(batch.seed)
    with open(path, "wb") as fh:
        fh.write(BATCH_HEADER.pack(BATCH_MAGIC, batch.n, int(batch.pumps_on), seed))
        fh.write(np.ascontiguousarray(batch.samples, dtype="<f8").tobytes())


def read_batch(path) -> QuadratureBatch:
    data = Path(path).read_bytes()
    if len(data) < BATCH_HEADER.size:
        raise FormatError(f"{path}: truncated batch header")
    magic, n, pumps_on, seed = BATCH_HEADER.unpack_from(data)
    if magic != BATCH_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    body = data[BATCH_HEADER.size :]
    if len(body) != n * 4 * 8:
        raise FormatError(f"{path}: expected {n} samples, found {len(body) / 32:g}")
    samples = np.frombuffer(body, dtype="<f8").reshape(n, 4).astype(float)
    return QuadratureBatch(samples, bool(pumps_on), None if seed == NO_SEED else seed)


def write_batch_csv(path, batch: QuadratureBatch, voltages: Optional[np.ndarray] = None) -> None:
    """CSV export; with ``voltages`` the columns are I1, Q1, I2, Q2 in volts instead."""
    data = batch.samples if voltages is None else voltages
    cols = list(QUADRATURES) if voltages is None else ["I1", "Q1", "I2", "Q2"]
    seed = "none" if batch.seed is None else batch.seed
    comment = f"pumps_on={fmt(batch.pumps_on)} seed={seed} n={batch.n}"
    with open(path, "w", newline="") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(cols)
        for row in data:
            writer.writerow([fmt(x) for x in row])


def read_batch_csv(path) -> QuadratureBatch:
    with open(path) as fh:
        first = fh.readline()
    meta = dict(tok.split("=", 1) for tok in first.lstrip("#").split())
    try:
        pumps_on = meta["pumps_on"] == "true"
        seed = None if meta["seed"] == "none" else int(meta["seed"])
    except KeyError as exc:
        raise FormatError(f"{path}: missing batch metadata {exc}") from exc
    samples = np.loadtxt(path, delimiter=",", comments="#", skiprows=2, ndmin=2)
    return QuadratureBatch(samples, pumps_on, seed)


# -- calibration ------------------------------------------------------------

CALIBRATION_COLUMNS = ("temp_k", "noise_v2hz", "sigma")


def write_calibration(path, points: Sequence[CalibrationPoint]) -> None:
    rows = [
        {"temp_k": p.temp_k, "noise_v2hz": p.noise_density_v2hz, "sigma": p.sigma} for p in points
    ]
    write_table(path, CALIBRATION_COLUMNS, rows, "load temperature (K), noise density (V^2/Hz), std over repeats")


def read_calibration(path) -> list[CalibrationPoint]:
    rows = read_table(path)
    if rows and set(CALIBRATION_COLUMNS) - set(rows[0]):
        raise FormatError(f"{path}: calibration columns must be {CALIBRATION_COLUMNS}")
    try:
        return [
            CalibrationPoint(float(r["temp_k"]), float(r["noise_v2hz"]), float(r["sigma"] or 0.0))
            for r in rows
        ]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: bad calibration row: {exc}") from exc


# -- histograms -------------------------------------------------------------


def write_histogram(csv_path, json_path, hist: DiffHistogram) -> None:
    """Grid as CSV (one row per first-quadrature bin) plus JSON bin-edge metadata."""
    with open(csv_path, "w", newline="") as fh:
        names = [QUADRATURES[i] for i in hist.pair]
        fh.write(f"# on-minus-off counts per sample; rows={names[0]} bins, columns={names[1]} bins\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in hist.values:
            writer.writerow([fmt(x) for x in row])
    Path(json_path).write_text(json.dumps(hist.metadata(), indent=2) + "\n")


def read_histogram(csv_path, json_path) -> DiffHistogram:
    meta = json.loads(Path(json_path).read_text())
    values = np.loadtxt(csv_path, delimiter=",", comments="#", ndmin=2)
    pair = tuple(QUADRATURES.index(p) for p in meta["pair"])
    return DiffHistogram(
        values,
        np.array(meta["x_edges"]),
        np.array(meta["y_edges"]),
        pair,
        int(meta["n_on"]),
        int(meta["n_off"]),
    )
