"""Output-field covariance matrix, per frequency and after filtering.

Quadrature variances of a filtered output combine ``d(w)`` with ``d^+(-w)``.
The symmetrized correlators are

    V11(w) = sum_k |alpha_1k(w)|^2 (2 n_k + 1) / 2
    M(w)   = sum_k alpha_1k(w) alpha_2k'(-w) (2 n_k + 1)

where ``k`` runs over the baths and ``k'`` is the partner bath that mode 2
sees through the same operator. ``Re M / 2`` is the X1-X2 correlation and
``-Re M / 2`` the P1-P2 correlation. ``Im M`` is odd in ``w`` and drops out
of any even filter, so the density is reported as a normal-form matrix.

The bare correlation ``Re M`` is negative at line centre. Matrices are
reported with the channel-1 detector phase advanced by ``pi``
(:data:`CHANNEL1_PHASE`), which flips the sign of the cross block so that
``V13 > 0`` and ``V24 < 0``. This choice is a pure relabelling of the local
quadratures and leaves every entanglement measure unchanged.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from emsq import kernels
from emsq.errors import DenominatorSingular, IntegrationFailure, UnstableSystem
from emsq.gaussian import CovMat4
from emsq.model.stability import StabilityReport, stability_check

CHANNEL1_PHASE = math.pi

FILTER_KINDS = {"rect": kernels.FILTER_RECT, "gaussian": kernels.FILTER_GAUSSIAN}

# Gaussian |f|^2 is given a full width at half maximum of 2 pi B
_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class OperatingPoint:
    """Everything the output CM depends on; rates in rad/s."""

    c1: float
    c2: float
    eta1: float
    eta2: float
    kappa1: float
    kappa2: float
    gamma_m: float
    n_m: float
    n1_ex: float = 0.0
    n2_ex: float = 0.0
    n1_in: float = 0.0
    n2_in: float = 0.0

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("cooperativities must be >= 0")
        if not (0.0 < self.eta1 <= 1.0 and 0.0 < self.eta2 <= 1.0):
            raise ValueError("coupling ratios must lie in (0, 1]")
        if min(self.kappa1, self.kappa2, self.gamma_m) <= 0:
            raise ValueError("rates must be positive")
        if min(self.n_m, self.n1_ex, self.n2_ex, self.n1_in, self.n2_in) < 0:
            raise ValueError("bath occupations must be >= 0")

    @property
    def gamma_eff(self) -> float:
        return self.gamma_m * (1.0 + self.c2 - self.c1)

    def stability(self) -> StabilityReport:
        return stability_check(self.c1, self.c2, self.kappa1, self.kappa2, self.gamma_m)

    def as_vector(self) -> list[float]:
        """Kernel parameter layout."""
        return [
            self.c1, self.c2, self.eta1, self.eta2, self.kappa1, self.kappa2, self.gamma_m,
            self.n_m, self.n1_ex, self.n2_ex, self.n1_in, self.n2_in,
        ]

    def to_dict(self) -> dict:
        return asdict(self)


def _require_stable(op: OperatingPoint):
    rep = op.stability()
    if not rep.stable:
        raise UnstableSystem(
            f"unstable operating point: lhs={rep.lhs!r} rhs={rep.rhs!r} gamma_eff={rep.gamma_eff!r}"
        )


def _cm_from_moments(v11, v33, m_raw):
    # a pi shift on channel 1 negates the whole cross block
    return CovMat4.normal_form(v11, v33, -m_raw)


def output_spectral_cm(omega: float, op: OperatingPoint, backend=None) -> CovMat4:
    """Symmetrized CM density of the two outputs at offset ``omega`` (rad/s).

    Raises:
        UnstableSystem: if the operating point fails the stability check.
        DenominatorSingular: if the response is singular at ``+omega`` or ``-omega``.
    """
    _require_stable(op)
    impl = backend or kernels
    v11, v33, m, status = impl.spectral_density(float(omega), op.as_vector())
    if status == kernels.STATUS_SINGULAR:
        raise DenominatorSingular(f"response denominator vanishes at omega={omega!r}")
    return _cm_from_moments(v11, v33, m)


def filter_domain(op: OperatingPoint, bandwidth_hz: float, filter_kind: str = "rect"):
    """Kernel filter code, width parameter and half-range of integration (all rad/s).

    The rectangle has full width ``2 pi B`` and is integrated exactly over its
    support. The Gaussian ``|f|^2`` has FWHM ``2 pi B`` and is integrated over
    the larger of 20 effective linewidths and 8 standard deviations.
    """
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be positive")
    try:
        code = FILTER_KINDS[filter_kind]
    except KeyError:
        raise ValueError(f"unknown filter kind {filter_kind!r}; expected one of {sorted(FILTER_KINDS)}")
    full = 2.0 * math.pi * bandwidth_hz
    if code == kernels.FILTER_RECT:
        return code, full, 0.5 * full
    sigma = full / _FWHM_PER_SIGMA
    return code, sigma, max(20.0 * abs(op.gamma_eff), 8.0 * sigma)


def filtered_output_cm(
    op: OperatingPoint,
    bandwidth_hz: float,
    filter_kind: str = "rect",
    rtol: float = 1e-9,
    max_depth: int = 60,
    backend=None,
) -> CovMat4:
    """Integrate the CM density against a unit-norm filter ``|f(w, B)|^2``.

    Raises:
        UnstableSystem: for an unstable operating point.
        DenominatorSingular: if the response is singular inside the domain.
        IntegrationFailure: if adaptive Simpson does not reach ``rtol``.
    """
    _require_stable(op)
    code, width, upper = filter_domain(op, bandwidth_hz, filter_kind)
    impl = backend or kernels
    v11, v33, m, evals, status = impl.spectral_integral(
        op.as_vector(), code, width, upper, rtol, max_depth
    )
    if status == kernels.STATUS_SINGULAR:
        raise DenominatorSingular("response denominator vanishes inside the integration range")
    if status != kernels.STATUS_OK:
        raise IntegrationFailure(
            f"adaptive quadrature did not reach rtol={rtol} after {evals} evaluations"
        )
    return _cm_from_moments(v11, v33, m)
