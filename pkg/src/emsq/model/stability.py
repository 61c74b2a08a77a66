"""Stability of the doubly driven system (large-cooperativity Routh-Hurwitz condition)."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    lhs: float
    rhs: float
    c_tilde: float
    gamma_eff: float


def _rate_factor(kappa1, kappa2, gamma_m):
    return max(kappa2 - kappa1, (kappa1**2 - kappa2**2) / (2.0 * gamma_m + kappa1 + kappa2))


def stability_check(c1, c2, kappa1, kappa2, gamma_m) -> StabilityReport:
    """Evaluate ``k2 C2 - k1 C1 > C~ max{k2 - k1, (k1^2 - k2^2)/(2 g + k1 + k2)}``.

    The inequality is only valid for large cooperativities, so a positive
    effective mechanical damping is required as well.
    """
    if min(kappa1, kappa2, gamma_m) <= 0:
        raise ValueError("rates must be positive")
    c_tilde = c2 / (1.0 + kappa1 / kappa2) + c1 / (1.0 + kappa2 / kappa1)
    lhs = kappa2 * c2 - kappa1 * c1
    rhs = c_tilde * _rate_factor(kappa1, kappa2, gamma_m)
    gamma_eff = gamma_m * (1.0 + c2 - c1)
    return StabilityReport(lhs > rhs and gamma_eff > 0, lhs, rhs, c_tilde, gamma_eff)


def critical_c2(c1, kappa1, kappa2, gamma_m) -> float:
    """Red cooperativity above which the system is stable, at fixed blue cooperativity ``c1``.

    Both sides of the inequality are linear in ``c2``, so the threshold is
    solved in closed form and combined with ``gamma_eff > 0``.
    """
    m = _rate_factor(kappa1, kappa2, gamma_m)
    a = 1.0 / (1.0 + kappa1 / kappa2)
    b = 1.0 / (1.0 + kappa2 / kappa1)
    slope = kappa2 - a * m
    if slope <= 0:
        return float("inf")
    return max((kappa1 + b * m) * c1 / slope, c1 - 1.0)
