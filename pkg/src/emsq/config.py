"""Flat ``key = value`` device/run configuration.

Keys ending in ``_hz`` are ordinary frequencies and are converted to rad/s
here; nothing downstream sees Hz except the detection bandwidth, which stays
in Hz where it enters the filter and the chain scaling factor. Blank lines and
``#`` comments are ignored. Unknown keys are rejected so that typos fail loudly.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from emsq.constants import hz_to_angular
from emsq.errors import ConfigError
from emsq.lab.chain import RfChain
from emsq.model.device import DeviceParams
from emsq.model.modes import CavityMode, MechanicalMode
from emsq.model.spectrum import FILTER_KINDS

_SECTION = "device"

DEFAULTS = {
    "t_bath_k": 0.007,
    "n_bar_1_ex": 0.0,
    "n_bar_1_in": 0.0,
    "n_bar_2_ex": 0.0,
    "n_bar_2_in": 0.0,
    "bandwidth_hz": 100.0,
    "filter": "rect",
    "pump_noise_a1": 0.0,
    "pump_noise_a2": 0.0,
    "r_ohm": 50.0,
    "t_input_k": 0.007,
    "cal_t_min_k": 0.007,
    "cal_t_max_k": 1.0,
    "cal_points": 10,
    "cal_rel_noise": 0.002,
}

REQUIRED = (
    "omega_m_hz", "gamma_m_hz",
    "omega_c1_hz", "kappa1_hz", "eta1", "g01_hz",
    "omega_c2_hz", "kappa2_hz", "eta2", "g02_hz",
    "p_blue_dbm", "p_red_dbm",
    "gain1_db", "gain2_db", "n_add1", "n_add2",
)

OPTIONAL = ("n_bar_m",)

KNOWN = set(REQUIRED) | set(OPTIONAL) | set(DEFAULTS)


@dataclass(frozen=True)
class LabSettings:
    """Virtual-lab knobs: input-noise temperature and the synthetic calibration sweep."""

    t_input_k: float = 0.007
    cal_t_min_k: float = 0.007
    cal_t_max_k: float = 1.0
    cal_points: int = 10
    cal_rel_noise: float = 0.002


@dataclass(frozen=True)
class RunConfig:
    device: DeviceParams
    chains: tuple
    lab: LabSettings = field(default_factory=LabSettings)
    source: str = ""
    raw: dict = field(default_factory=dict)


def _number(key, text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#",)
    )
    try:
        parser.read_string(f"[{_SECTION}]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    raw = dict(parser[_SECTION])
    unknown = sorted(set(raw) - KNOWN)
    if unknown:
        raise ConfigError(f"{source}: unknown keys {unknown}")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"{source}: missing keys {missing}")

    values = dict(DEFAULTS)
    for key, text_value in raw.items():
        values[key] = text_value if key == "filter" else _number(key, text_value)
    if values["filter"] not in FILTER_KINDS:
        raise ConfigError(f"{source}: filter must be one of {sorted(FILTER_KINDS)}")
    if values["cal_points"] != int(values["cal_points"]):
        raise ConfigError(f"{source}: cal_points must be an integer")

    try:
        w_m = hz_to_angular(values["omega_m_hz"])
        g_m = hz_to_angular(values["gamma_m_hz"])
        if "n_bar_m" in raw:
            mech = MechanicalMode.from_occupation(w_m, g_m, values["n_bar_m"])
        else:
            mech = MechanicalMode.from_temperature(w_m, g_m, values["t_bath_k"])
        cavs = []
        for j in (1, 2):
            cavs.append(
                CavityMode(
                    hz_to_angular(values[f"omega_c{j}_hz"]),
                    hz_to_angular(values[f"kappa{j}_hz"]),
                    values[f"eta{j}"],
                    hz_to_angular(values[f"g0{j}_hz"]),
                    n_bar_in=values[f"n_bar_{j}_in"],
                    n_bar_ex=values[f"n_bar_{j}_ex"],
                )
            )
        device = DeviceParams(
            mech,
            cavs[0],
            cavs[1],
            p_blue_dbm=values["p_blue_dbm"],
            p_red_dbm=values["p_red_dbm"],
            bandwidth_hz=values["bandwidth_hz"],
            filter_kind=values["filter"],
            pump_noise_a1=values["pump_noise_a1"],
            pump_noise_a2=values["pump_noise_a2"],
        )
        chains = tuple(
            RfChain(
                values[f"gain{j}_db"],
                values[f"n_add{j}"],
                r_ohm=values["r_ohm"],
                bandwidth_hz=values["bandwidth_hz"],
                omega_c=cavs[j - 1].omega_c,
            )
            for j in (1, 2)
        )
        lab = LabSettings(
            values["t_input_k"],
            values["cal_t_min_k"],
            values["cal_t_max_k"],
            int(values["cal_points"]),
            values["cal_rel_noise"],
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if not 0 < lab.cal_t_min_k < lab.cal_t_max_k:
        raise ConfigError(f"{source}: need 0 < cal_t_min_k < cal_t_max_k")
    return RunConfig(device, chains, lab, source, raw)


def load_config(path: Optional[str | Path] = None) -> RunConfig:
    """Read a configuration file; ``None`` loads the bundled reference device."""
    if path is None:
        text = resources.files("emsq").joinpath("data/reference_device.cfg").read_text()
        return parse_config(text, "reference_device.cfg")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
