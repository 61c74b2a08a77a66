"""Input-output scattering coefficients of the two output fields.

The outputs are written as

    d1(w) = a1 c1ex + a12 c2ex^+ + a1m b^+ + a1in c1in + a12in c2in^+
    d2(w) = a2 c2ex + a21 c1ex^+ + a2m b   + a2in c2in + a21in c1in^+

with ``w~_j = 1 - i w / kappa_j`` and ``w~_b = 1 - i w / gamma_m``. The
mechanical coefficient of mode 1 carries a minus sign,
``a1m = -2i sqrt(eta1 C1) w~_2 / den``; this is the sign that follows from the
linearized Hamiltonian and is required for ``[d1(w), d2(-w)] = 0``. It does
not affect any of the norm identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from emsq.errors import DenominatorSingular

DENOMINATOR_EPS = 1e-12

COEFF_NAMES = ("a1", "a12", "a1m", "a1in", "a12in", "a2", "a21", "a2m", "a2in", "a21in")


@dataclass(frozen=True)
class ScatterCoeffs:
    omega: float
    a1: complex
    a12: complex
    a1m: complex
    a1in: complex
    a12in: complex
    a2: complex
    a21: complex
    a2m: complex
    a2in: complex
    a21in: complex

    def as_tuple(self):
        return tuple(getattr(self, name) for name in COEFF_NAMES)

    def norm1(self) -> float:
        """``[d1, d1^+]``: +1 for annihilators, -1 for creators on the right-hand side."""
        return (
            abs(self.a1) ** 2
            + abs(self.a1in) ** 2
            - abs(self.a12) ** 2
            - abs(self.a12in) ** 2
            - abs(self.a1m) ** 2
        )

    def norm2(self) -> float:
        """``[d2, d2^+]``; here the mechanical input enters as an annihilator."""
        return (
            abs(self.a2) ** 2
            + abs(self.a2in) ** 2
            + abs(self.a2m) ** 2
            - abs(self.a21) ** 2
            - abs(self.a21in) ** 2
        )

    def max_abs_difference(self, other: "ScatterCoeffs") -> float:
        return max(abs(x - y) for x, y in zip(self.as_tuple(), other.as_tuple()))


def _check_params(c1, c2, eta1, eta2, *rates):
    if c1 < 0 or c2 < 0:
        raise ValueError("cooperativities must be >= 0")
    if not (0.0 < eta1 <= 1.0 and 0.0 < eta2 <= 1.0):
        raise ValueError("coupling ratios must lie in (0, 1]")
    if any(r <= 0 for r in rates):
        raise ValueError("rates must be positive")


def _assemble(omega, w1, w2, wb, den, c1, c2, eta1, eta2):
    if abs(den) <= DENOMINATOR_EPS:
        raise DenominatorSingular(f"response denominator vanishes at omega={omega!r}")
    s12 = math.sqrt(c1 * c2)
    num1 = w2 * wb + c2
    num2 = w1 * wb - c1
    return ScatterCoeffs(
        omega,
        -1.0 + 2.0 * eta1 * num1 / den,
        2.0 * math.sqrt(eta1 * eta2) * s12 / den,
        -2j * math.sqrt(eta1 * c1) * w2 / den,
        2.0 * math.sqrt(eta1 * (1.0 - eta1)) * num1 / den,
        2.0 * math.sqrt(eta1 * (1.0 - eta2)) * s12 / den,
        -1.0 + 2.0 * eta2 * num2 / den,
        -2.0 * math.sqrt(eta1 * eta2) * s12 / den,
        -2j * math.sqrt(eta2 * c2) * w1 / den,
        2.0 * math.sqrt(eta2 * (1.0 - eta2)) * num2 / den,
        -2.0 * math.sqrt(eta2 * (1.0 - eta1)) * s12 / den,
    )


def scattering_coefficients(omega, c1, c2, eta1, eta2, kappa1, kappa2, gamma_m) -> ScatterCoeffs:
    """All ten coefficients at angular offset ``omega`` from the cavity resonances.

    Raises:
        DenominatorSingular: if ``|w~1 C2 + w~2 (w~1 w~b - C1)| <= 1e-12``.
    """
    _check_params(c1, c2, eta1, eta2, kappa1, kappa2, gamma_m)
    w1 = 1.0 - 1j * omega / kappa1
    w2 = 1.0 - 1j * omega / kappa2
    wb = 1.0 - 1j * omega / gamma_m
    den = w1 * c2 + w2 * (w1 * wb - c1)
    return _assemble(omega, w1, w2, wb, den, c1, c2, eta1, eta2)


def resonant_coefficients(c1, c2, eta1, eta2, gamma_m=1.0) -> ScatterCoeffs:
    """Line-centre form, with the denominator written as ``gamma_eff / gamma_m``."""
    _check_params(c1, c2, eta1, eta2, gamma_m)
    g = gamma_m
    gamma_eff = g * (1.0 + c2 - c1)
    if abs(gamma_eff) <= DENOMINATOR_EPS * g:
        raise DenominatorSingular("gamma_eff vanishes")
    s12 = math.sqrt(c1 * c2)
    return ScatterCoeffs(
        0.0,
        complex(-1.0 + 2.0 * g * eta1 * (1.0 + c2) / gamma_eff),
        complex(2.0 * g * math.sqrt(eta1 * eta2) * s12 / gamma_eff),
        -2j * g * math.sqrt(eta1 * c1) / gamma_eff,
        complex(2.0 * g * math.sqrt(eta1 * (1.0 - eta1)) * (1.0 + c2) / gamma_eff),
        complex(2.0 * g * math.sqrt(eta1 * (1.0 - eta2)) * s12 / gamma_eff),
        complex(-1.0 + 2.0 * g * eta2 * (1.0 - c1) / gamma_eff),
        complex(-2.0 * g * math.sqrt(eta1 * eta2) * s12 / gamma_eff),
        -2j * g * math.sqrt(eta2 * c2) / gamma_eff,
        complex(2.0 * g * math.sqrt(eta2 * (1.0 - eta2)) * (1.0 - c1) / gamma_eff),
        complex(-2.0 * g * math.sqrt(eta2 * (1.0 - eta1)) * s12 / gamma_eff),
    )


def ideal_coefficients(c1, c2) -> ScatterCoeffs:
    """Lossless (``eta = 1``) line-centre coefficients; the internal-bath terms are zero."""
    if c1 < 0 or c2 < 0:
        raise ValueError("cooperativities must be >= 0")
    d = 1.0 + c2 - c1
    if abs(d) <= DENOMINATOR_EPS:
        raise DenominatorSingular("gamma_eff vanishes")
    a12 = 2.0 * math.sqrt(c1 * c2) / d
    return ScatterCoeffs(
        0.0,
        complex(-1.0 + 2.0 * (1.0 + c2) / d),
        complex(a12),
        -2j * math.sqrt(c1) / d,
        0j,
        0j,
        complex(-1.0 + 2.0 * (1.0 - c1) / d),
        complex(-a12),
        -2j * math.sqrt(c2) / d,
        0j,
        0j,
    )
