"""Covariance-matrix and Duan estimators from pumps-on / pumps-off records."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from emsq.errors import BatchMismatch, InsufficientSamples
from emsq.gaussian import CovMat4
from emsq.lab.sampling import QuadratureBatch
from emsq.model.modes import half_coth

#: smallest batch for which the standard errors are meaningful
MIN_SAMPLES = 100

_CHANNEL = (0, 0, 1, 1)


@dataclass(frozen=True, eq=False)
class CmEstimate:
    cm: CovMat4
    se: np.ndarray
    n_on: int
    n_off: int
    input_noise: tuple

    def within(self, truth: CovMat4, k: float = 3.0) -> np.ndarray:
        """Elementwise ``|estimate - truth| <= k * SE``."""
        return np.abs(self.cm.v - truth.v) <= k * self.se

    def to_dict(self) -> dict:
        return {
            "v": self.cm.v.tolist(),
            "se": self.se.tolist(),
            "n_on": self.n_on,
            "n_off": self.n_off,
            "input_noise": list(self.input_noise),
            "convention": "half",
        }


class DuanEstimate(NamedTuple):
    delta_epr: float
    se: float


def _check_pair(on: QuadratureBatch, off: QuadratureBatch, min_samples: int):
    if not on.pumps_on or off.pumps_on:
        raise BatchMismatch("expected a pumps-on batch followed by a pumps-off batch")
    for label, b in (("pumps-on", on), ("pumps-off", off)):
        if b.n < min_samples:
            raise InsufficientSamples(
                f"{label} batch has {b.n} samples; at least {min_samples} are needed"
            )


def _input_noise(temps_k, omegas):
    t1, t2 = temps_k
    w1, w2 = omegas
    return half_coth(w1, t1), half_coth(w2, t2)


def estimate_cm(
    on: QuadratureBatch,
    off: QuadratureBatch,
    temps_k: Sequence[float],
    omegas: Sequence[float],
    min_samples: int = MIN_SAMPLES,
) -> CmEstimate:
    """Reconstruct the CM at the device from detected quadratures.

    Diagonal: ``<u_i^2>_on - <u_i^2>_off + coth(hbar w_i / 2 k T_i) / 2``.
    Off-diagonal: symmetrized pumps-on moments only.
    Standard errors use the Gaussian-moment formula
    ``Var(<u_i u_j>) = (S_ii S_jj + S_ij^2) / (n - 1)``, which reduces to
    ``var * sqrt(2 / (n - 1))`` on the diagonal; on- and off-batch errors add
    in quadrature.

    Raises:
        BatchMismatch: if the pump flags are not (on, off).
        InsufficientSamples: if either batch has fewer than ``min_samples`` rows.
    """
    _check_pair(on, off, min_samples)
    s_on = on.second_moments()
    s_off = off.second_moments()
    c = _input_noise(temps_k, omegas)

    v = s_on.copy()
    se = np.sqrt((np.outer(np.diag(s_on), np.diag(s_on)) + s_on**2) / (on.n - 1))
    for i in range(4):
        v[i, i] = s_on[i, i] - s_off[i, i] + c[_CHANNEL[i]]
        se[i, i] = math.sqrt(
            2.0 * s_on[i, i] ** 2 / (on.n - 1) + 2.0 * s_off[i, i] ** 2 / (off.n - 1)
        )
    return CmEstimate(CovMat4(v), se, on.n, off.n, c)


def estimate_duan(
    on: QuadratureBatch,
    off: QuadratureBatch,
    temps_k: Sequence[float],
    omegas: Sequence[float],
    min_samples: int = MIN_SAMPLES,
) -> DuanEstimate:
    """``<X_-^2> + <P_+^2>`` at the current detector phase, with its standard error.

    Built from per-sample statistics so that correlations between the CM
    elements are carried into the error bar. The value equals the Duan sum of
    :func:`estimate_cm` exactly.
    """
    _check_pair(on, off, min_samples)
    a = on.samples
    b = off.samples
    stat_on = 0.5 * ((a[:, 0] - a[:, 2]) ** 2 + (a[:, 1] + a[:, 3]) ** 2)
    stat_off = 0.5 * np.sum(b**2, axis=1)
    c1, c2 = _input_noise(temps_k, omegas)
    value = float(np.mean(stat_on) - np.mean(stat_off) + c1 + c2)
    se = math.sqrt(np.var(stat_on, ddof=1) / on.n + np.var(stat_off, ddof=1) / off.n)
    return DuanEstimate(value, se)
