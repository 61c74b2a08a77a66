"""Amplification chain model and its calibration against thermal loads."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from emsq.constants import HBAR, db_to_linear, linear_to_db
from emsq.errors import DegenerateDesign, InsufficientPoints
from emsq.model.modes import half_coth

MIN_CALIBRATION_POINTS = 3


@dataclass(frozen=True)
class RfChain:
    """One detection channel: gain (dB), added noise quanta, ADC impedance, bandwidth, carrier.

    ``zeta = G * R * B * hbar * w_c`` converts quanta to voltage variance.
    """

    gain_db: float
    n_add: float
    r_ohm: float = 50.0
    bandwidth_hz: float = 100.0
    omega_c: float = 2.0 * math.pi * 10.17e9

    def __post_init__(self):
        if not math.isfinite(self.gain_db):
            raise ValueError("gain must be finite")
        if self.n_add < 0:
            raise ValueError("added noise must be >= 0")
        if min(self.r_ohm, self.bandwidth_hz, self.omega_c) <= 0:
            raise ValueError("impedance, bandwidth and carrier must be positive")

    @property
    def zeta(self) -> float:
        return db_to_linear(self.gain_db) * self.r_ohm * self.bandwidth_hz * HBAR * self.omega_c

    @classmethod
    def from_zeta(cls, zeta, n_add, r_ohm=50.0, bandwidth_hz=100.0, omega_c=2.0 * math.pi * 10.17e9):
        if zeta <= 0:
            raise ValueError("zeta must be positive")
        gain_db = linear_to_db(zeta / (r_ohm * bandwidth_hz * HBAR * omega_c))
        return cls(gain_db, n_add, r_ohm, bandwidth_hz, omega_c)


@dataclass(frozen=True)
class CalibrationPoint:
    temp_k: float
    noise_density_v2hz: float
    sigma: float = 0.0

    def __post_init__(self):
        if self.temp_k <= 0:
            raise ValueError("calibration temperature must be positive")
        if self.noise_density_v2hz <= 0:
            raise ValueError("noise density must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


class CalibrationResult(NamedTuple):
    gain_db: float
    n_add: float
    gain_db_se: float
    n_add_se: float
    zeta: float
    residual_rms: float


def noise_density(temp_k: float, chain: RfChain) -> float:
    """Forward model ``N = zeta (coth(hbar w / 2 k T) / 2 + n_add)``."""
    return chain.zeta * (half_coth(chain.omega_c, temp_k) + chain.n_add)


def synthetic_sweep(chain: RfChain, temps_k: Sequence[float], rel_noise: float = 0.0, rng=None):
    """Calibration points from the forward model with multiplicative Gaussian noise.

    ``sigma`` of each point is set to the injected noise level ``rel_noise * N``.
    """
    if rel_noise < 0:
        raise ValueError("relative noise must be >= 0")
    rng = np.random.default_rng(rng)
    points = []
    for t in temps_k:
        n_true = noise_density(float(t), chain)
        factor = 1.0 + rel_noise * rng.standard_normal() if rel_noise > 0 else 1.0
        points.append(CalibrationPoint(float(t), n_true * factor, rel_noise * n_true))
    return points


def calibrate_chain(
    points: Sequence[CalibrationPoint],
    omega_c: float,
    r_ohm: float = 50.0,
    bandwidth_hz: float = 100.0,
    weighted: bool = True,
) -> CalibrationResult:
    """Fit gain and added noise from noise densities measured at known temperatures.

    The model is linear, ``N = zeta x + zeta n_add`` with ``x = coth(.)/2``,
    so the fit is ordinary (or, when every point carries ``sigma > 0`` and
    ``weighted`` is set, inverse-variance weighted) least squares. Standard
    errors come from the parameter covariance, propagated to dB and to the
    ratio ``n_add = intercept / slope`` to first order.

    Raises:
        InsufficientPoints: with fewer than three points.
        DegenerateDesign: if all ``x`` values coincide within 1e-12.
    """
    if len(points) < MIN_CALIBRATION_POINTS:
        raise InsufficientPoints(
            f"need at least {MIN_CALIBRATION_POINTS} calibration points, got {len(points)}"
        )
    x = np.array([half_coth(omega_c, p.temp_k) for p in points])
    y = np.array([p.noise_density_v2hz for p in points])
    if np.ptp(x) <= 1e-12 * max(1.0, float(np.max(np.abs(x)))):
        raise DegenerateDesign("all calibration temperatures give the same thermal occupation")
    sigma = np.array([p.sigma for p in points])
    use_weights = weighted and np.all(sigma > 0)
    w = 1.0 / sigma if use_weights else np.ones_like(y)

    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    slope, intercept = coef
    resid = y - design @ coef
    dof = len(points) - 2
    xtwx_inv = np.linalg.inv((design * w[:, None] ** 2).T @ design)
    if use_weights:
        cov = xtwx_inv
    else:
        s2 = float(resid @ resid) / dof if dof > 0 else 0.0
        cov = xtwx_inv * s2
    if slope <= 0:
        raise DegenerateDesign("fitted scaling factor is not positive")

    n_add = intercept / slope
    var_slope, var_icpt, cov_si = cov[0, 0], cov[1, 1], cov[0, 1]
    n_add_var = (var_icpt - 2.0 * n_add * cov_si + n_add**2 * var_slope) / slope**2
    gain_db = linear_to_db(slope / (r_ohm * bandwidth_hz * HBAR * omega_c))
    gain_se = 10.0 / math.log(10.0) * math.sqrt(max(var_slope, 0.0)) / slope
    rms = float(np.sqrt(np.mean(resid**2)))
    return CalibrationResult(
        float(gain_db), float(n_add), float(gain_se), math.sqrt(max(n_add_var, 0.0)), float(slope), rms
    )
