"""Mode definitions and drive bookkeeping.

All frequencies and rates here are angular (rad/s). Conversion from the Hz
values used in configuration files happens in :mod:`emsq.config`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from emsq.constants import HBAR, K_B


def thermal_occupation(omega: float, temp_k: float) -> float:
    """Bose-Einstein occupation of a mode at ``omega`` in a bath at ``temp_k``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if temp_k < 0:
        raise ValueError("temperature must be >= 0")
    if temp_k == 0:
        return 0.0
    x = HBAR * omega / (K_B * temp_k)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def effective_temperature(omega: float, n_bar: float) -> float:
    """Bath temperature whose Bose-Einstein occupation at ``omega`` equals ``n_bar``."""
    if n_bar < 0:
        raise ValueError("occupation must be >= 0")
    if n_bar == 0:
        return 0.0
    return HBAR * omega / (K_B * math.log1p(1.0 / n_bar))


def half_coth(omega: float, temp_k: float) -> float:
    """Symmetrized thermal variance ``coth(hbar w / 2 k T) / 2`` (0.5 at zero temperature)."""
    return thermal_occupation(omega, temp_k) + 0.5


@dataclass(frozen=True)
class MechanicalMode:
    omega_m: float
    gamma_m: float
    t_bath: float
    n_bar_m: float

    def __post_init__(self):
        if self.omega_m <= 0 or self.gamma_m <= 0:
            raise ValueError("mechanical frequency and damping must be positive")
        if self.t_bath > 0:
            expected = thermal_occupation(self.omega_m, self.t_bath)
            if abs(expected - self.n_bar_m) > 1e-12 * max(1.0, expected):
                raise ValueError(
                    f"n_bar_m={self.n_bar_m} inconsistent with t_bath={self.t_bath} K ({expected})"
                )

    @classmethod
    def from_temperature(cls, omega_m, gamma_m, t_bath):
        return cls(omega_m, gamma_m, t_bath, thermal_occupation(omega_m, t_bath))

    @classmethod
    def from_occupation(cls, omega_m, gamma_m, n_bar_m):
        """Set the bath occupation directly; the stored temperature is the effective one."""
        t_eff = effective_temperature(omega_m, n_bar_m)
        return cls(omega_m, gamma_m, t_eff, thermal_occupation(omega_m, t_eff) if t_eff else 0.0)


@dataclass(frozen=True)
class CavityMode:
    omega_c: float
    kappa: float
    eta: float
    g0: float
    n_bar_in: float = 0.0
    n_bar_ex: float = 0.0

    def __post_init__(self):
        if self.omega_c <= 0 or self.kappa <= 0:
            raise ValueError("cavity frequency and linewidth must be positive")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("coupling ratio eta must lie in (0, 1]")
        if self.n_bar_in < 0 or self.n_bar_ex < 0:
            raise ValueError("bath occupations must be >= 0")

    @property
    def kappa_ex(self) -> float:
        return self.eta * self.kappa

    @property
    def kappa_in(self) -> float:
        return (1.0 - self.eta) * self.kappa


@dataclass(frozen=True)
class DriveState:
    power_w: float
    detuning: float
    e_amp: float
    n_photons: float
    g_eff: float
    coop: float


def drive_to_cooperativity(
    power_w: float, cavity: CavityMode, mech: MechanicalMode, drive_freq: float
) -> DriveState:
    """Chain drive power -> drive strength -> photon number -> coupling -> cooperativity.

    The detuning is ``omega_c - drive_freq``; the photon number uses the total
    linewidth squared in the denominator.
    """
    if power_w < 0:
        raise ValueError("drive power must be >= 0")
    detuning = cavity.omega_c - drive_freq
    e_amp = math.sqrt(power_w * cavity.kappa_ex / (HBAR * drive_freq))
    n_photons = e_amp**2 / (cavity.kappa**2 + detuning**2)
    g_eff = cavity.g0 * math.sqrt(n_photons)
    coop = 4.0 * g_eff**2 / (cavity.kappa * mech.gamma_m)
    return DriveState(power_w, detuning, e_amp, n_photons, g_eff, coop)
