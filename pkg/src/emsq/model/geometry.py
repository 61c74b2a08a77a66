"""Vacuum coupling from the capacitor geometry and its gap scaling laws."""
from __future__ import annotations

G0_GAP_EXPONENT = -1.5
CMOD_GAP_EXPONENT = -0.6


def coupling_from_geometry(beta, omega_c, c_mod, dc_dx, x_zpf) -> float:
    """Magnitude of ``g0 = -beta (w_c / 2 C_mod) (dC_mod/dx) x_zpf``.

    Args:
        beta: capacitive participation ratio, in (0, 1].
        omega_c: cavity angular frequency (rad/s).
        c_mod: modulated capacitance (F).
        dc_dx: capacitance derivative (F/m); its sign is irrelevant here.
        x_zpf: zero-point displacement (m).
    """
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    if omega_c <= 0 or c_mod <= 0 or x_zpf <= 0:
        raise ValueError("omega_c, c_mod and x_zpf must be positive")
    return abs(beta * omega_c / (2.0 * c_mod) * dc_dx * x_zpf)


def _power_law(value_ref, x0_ref, x0, exponent):
    if x0_ref <= 0 or x0 <= 0:
        raise ValueError("gap sizes must be positive")
    return value_ref * (x0 / x0_ref) ** exponent


def gap_scaling(g0_ref, x0_ref, x0) -> float:
    """Rescale ``g0`` from gap ``x0_ref`` to gap ``x0`` with ``g0 ~ x0^-1.5``."""
    return _power_law(g0_ref, x0_ref, x0, G0_GAP_EXPONENT)


def cmod_scaling(c_mod_ref, x0_ref, x0) -> float:
    """Rescale the modulated capacitance with ``C_mod ~ x0^-0.6``."""
    return _power_law(c_mod_ref, x0_ref, x0, CMOD_GAP_EXPONENT)
