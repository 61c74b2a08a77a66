"""Two-mode Gaussian states: covariance matrices, squeezing and correlation measures.

Quadratures are ordered ``(X1, P1, X2, P2)`` and the vacuum has variance 1/2 on
every diagonal element. All logarithms in the entanglement and discord
measures are base 2, so results are in bits / ebits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from emsq.constants import VACUUM_VARIANCE
from emsq.errors import (
    DegenerateState,
    FormatError,
    NotNormalForm,
    NumericallyIllConditioned,
    SingularCovariance,
    UnphysicalCovariance,
)

PHYSICAL_TOL = 1e-9
NORMAL_FORM_TOL = 1e-9
CLAMP_TOL = 1e-9
ENTROPY_EPS = 1e-12

QUADRATURES = ("X1", "P1", "X2", "P2")

# symplectic form for the (X1, P1, X2, P2) ordering
OMEGA = np.array(
    [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]]
)


def _scale(*values):
    return max(1.0, *(abs(x) for x in values))


@dataclass(frozen=True, eq=False)
class CovMat4:
    """Symmetric 4x4 covariance matrix of two bosonic modes.

    The stored array is a read-only copy. Inputs that are symmetric only up to
    floating-point noise are symmetrized; anything worse is rejected.
    """

    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        if v.shape != (4, 4):
            raise ValueError(f"covariance matrix must be 4x4, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("covariance matrix contains non-finite entries")
        if np.max(np.abs(v - v.T)) > 1e-12 * _scale(*v.ravel()):
            raise ValueError("covariance matrix is not symmetric")
        v = 0.5 * (v + v.T)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @classmethod
    def vacuum(cls) -> "CovMat4":
        return cls(np.eye(4) * VACUUM_VARIANCE)

    @classmethod
    def normal_form(cls, v11: float, v33: float, v13: float) -> "CovMat4":
        """Build the standard form ``[[a,0,c,0],[0,a,0,-c],[c,0,b,0],[0,-c,0,b]]``."""
        return cls(
            [
                [v11, 0.0, v13, 0.0],
                [0.0, v11, 0.0, -v13],
                [v13, 0.0, v33, 0.0],
                [0.0, -v13, 0.0, v33],
            ]
        )

    def __getitem__(self, idx):
        return self.v[idx]

    def __repr__(self):
        return f"CovMat4({np.array2string(self.v, precision=6, separator=', ')})"

    @property
    def v11(self) -> float:
        return float(self.v[0, 0])

    @property
    def v33(self) -> float:
        return float(self.v[2, 2])

    @property
    def v13(self) -> float:
        return float(self.v[0, 2])

    def blocks(self):
        """Return the local blocks ``A``, ``B`` and the correlation block ``C``."""
        return self.v[:2, :2], self.v[2:, 2:], self.v[:2, 2:]

    def symplectic_eigenvalues(self) -> tuple[float, float]:
        """``(nu_minus, nu_plus)``, the symplectic spectrum of ``v``."""
        return _symplectic_spectrum(self.v)

    def partial_transpose_eigenvalues(self) -> tuple[float, float]:
        """Symplectic eigenvalues of the partially transposed state (P2 -> -P2)."""
        return _symplectic_spectrum(_PT_FLIP @ self.v @ _PT_FLIP)

    def is_physical(self, tol: float = PHYSICAL_TOL) -> bool:
        if np.any(np.linalg.eigvalsh(self.v) <= 0.0):
            return False
        nu_minus, _ = self.symplectic_eigenvalues()
        return nu_minus >= VACUUM_VARIANCE - tol

    def check_physical(self, tol: float = PHYSICAL_TOL) -> "CovMat4":
        if not self.is_physical(tol):
            raise UnphysicalCovariance("unphysical covariance")
        return self

    def normal_form_residual(self) -> float:
        """Largest deviation from the normal-form pattern (zero for an exact normal form)."""
        v = self.v
        return float(
            max(
                abs(v[0, 1]),
                abs(v[0, 3]),
                abs(v[1, 2]),
                abs(v[2, 3]),
                abs(v[0, 0] - v[1, 1]),
                abs(v[2, 2] - v[3, 3]),
                abs(v[0, 2] + v[1, 3]),
            )
        )

    def is_normal_form(self, tol: float = NORMAL_FORM_TOL) -> bool:
        return self.normal_form_residual() <= tol * _scale(*self.v.ravel())

    def to_dict(self) -> dict:
        return {"v": self.v.tolist(), "convention": "half"}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, obj: dict) -> "CovMat4":
        if not isinstance(obj, dict) or "v" not in obj:
            raise FormatError('covariance JSON must be an object with key "v"')
        convention = obj.get("convention")
        if convention != "half":
            raise FormatError(f'unsupported vacuum convention {convention!r}; expected "half"')
        try:
            return cls(np.asarray(obj["v"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad covariance matrix: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "CovMat4":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(obj)


_PT_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])


def _symplectic_spectrum(v):
    """Symplectic eigenvalues of a symmetric 4x4 matrix.

    For positive-definite ``v = L L^T`` they are the moduli of the eigenvalues of
    the Hermitian matrix ``i L^T Omega L``, which stays accurate for strongly
    squeezed states where the invariant formula cancels catastrophically.
    Indefinite input falls back to the invariants.
    """
    try:
        chol = np.linalg.cholesky(v)
    except np.linalg.LinAlgError:
        a, b, c = v[:2, :2], v[2:, 2:], v[:2, 2:]
        delta = np.linalg.det(a) + np.linalg.det(b) + 2.0 * np.linalg.det(c)
        return _invariant_roots(delta, np.linalg.det(v))
    ev = np.abs(np.linalg.eigvalsh(1j * (chol.T @ OMEGA @ chol)))
    ev.sort()
    return float(ev[0]), float(ev[-1])


def _invariant_roots(delta, det_v):
    det_v = max(float(det_v), 0.0)
    disc = delta * delta - 4.0 * det_v
    if disc < 0.0:
        if disc < -CLAMP_TOL * _scale(delta * delta):
            raise NumericallyIllConditioned(f"negative invariant discriminant {disc:.3e}")
        disc = 0.0
    root = math.sqrt(disc)
    lo = max(0.5 * (delta - root), 0.0)
    hi = 0.5 * (delta + root)
    return math.sqrt(lo), math.sqrt(hi)


@dataclass(frozen=True)
class TmstParams:
    """Two-mode squeezed thermal state: squeezing ``r``, angle ``phi``, thermal inputs ``n1``, ``n2``."""

    r: float
    phi: float = 0.0
    n1: float = 0.0
    n2: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeezing parameter r must be >= 0")
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("thermal occupations must be >= 0")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))


@dataclass(frozen=True)
class EntanglementReport:
    phi: float
    delta_epr: float
    squeezing_db_x: float
    squeezing_db_p: float
    zeta_minus: float
    e_n: float
    discord: float | None
    e_f: float
    nu_minus: float
    nu_plus: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


class DuanResult(NamedTuple):
    x_minus_var: float
    p_plus_var: float
    delta_epr: float
    squeezing_db_x: float
    squeezing_db_p: float


# ---------------------------------------------------------------------------
# state construction


def cm_from_tmst(p: TmstParams) -> CovMat4:
    total = 1.0 + p.n1 + p.n2
    ch, sh = math.cosh(2.0 * p.r), math.sinh(2.0 * p.r)
    v11 = (total * ch + (p.n1 - p.n2)) / 2.0
    v33 = (total * ch - (p.n1 - p.n2)) / 2.0
    v13 = total * sh * math.cos(p.phi) / 2.0
    return CovMat4.normal_form(v11, v33, v13)


def tmst_from_cm(v: CovMat4, tol: float = NORMAL_FORM_TOL) -> TmstParams:
    """Invert :func:`cm_from_tmst` for a normal-form matrix.

    ``(r, phi)`` are not jointly identifiable from the normal form, so the
    angle is fixed to 0 (``V13 >= 0``) or pi (``V13 < 0``).
    """
    if not v.is_normal_form(tol):
        raise NotNormalForm(f"normal-form residual {v.normal_form_residual():.3e}")
    s = v.v11 + v.v33
    c2 = 2.0 * abs(v.v13)
    if s * s - c2 * c2 <= 0.0:
        raise UnphysicalCovariance("V11 + V33 must exceed 2|V13|")
    total = math.sqrt(s * s - c2 * c2)
    r = 0.5 * math.atanh(c2 / s)
    diff = v.v11 - v.v33
    n1 = (total - 1.0 + diff) / 2.0
    n2 = (total - 1.0 - diff) / 2.0
    if min(n1, n2) < -tol:
        raise UnphysicalCovariance(f"implied thermal inputs n1={n1:.3g}, n2={n2:.3g} are negative")
    return TmstParams(r=r, phi=0.0 if v.v13 >= 0 else math.pi, n1=max(n1, 0.0), n2=max(n2, 0.0))


def rotate_mode1(v: CovMat4, phi: float) -> CovMat4:
    """Rotate the detector phase of channel 1 by ``phi`` (congruence on the (X1, P1) block)."""
    c, s = math.cos(phi), math.sin(phi)
    rot = np.eye(4)
    rot[:2, :2] = [[c, s], [-s, c]]
    return CovMat4(rot @ v.v @ rot.T)


# ---------------------------------------------------------------------------
# phase-space density


def wigner_density(v: CovMat4, psi: Sequence[float]) -> float:
    """Normalized Gaussian Wigner function ``exp(-psi.V^-1.psi/2) / (4 pi^2 sqrt(det V))``.

    The vacuum gives ``1/pi^2`` at the origin.
    """
    det = float(np.linalg.det(v.v))
    if det < 1e-300:
        raise SingularCovariance(f"det V = {det:.3e}")
    psi = np.asarray(psi, dtype=float)
    quad = float(psi @ np.linalg.solve(v.v, psi))
    return math.exp(-0.5 * quad) / (4.0 * math.pi**2 * math.sqrt(det))


def _axis_rule(half_width, step, rule):
    if rule == "trapezoid":
        n = 2 * int(math.ceil(half_width / step)) + 1
        nodes = np.linspace(-half_width, half_width, n)
        weights = np.full(n, nodes[1] - nodes[0])
        weights[[0, -1]] *= 0.5
        return nodes, weights
    if rule == "gauss-legendre":
        panels = max(1, int(math.ceil(2.0 * half_width / (4.0 * step))))
        x, w = np.polynomial.legendre.leggauss(8)
        edges = np.linspace(-half_width, half_width, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
        half = 0.5 * (edges[1:] - edges[:-1])[:, None]
        return (mid + half * x).ravel(), (half * w).ravel()
    raise ValueError(f"unknown quadrature rule {rule!r}")


def wigner_normalization(
    v: CovMat4, extent: float = 8.0, resolution: float = 1.0, rule: str = "trapezoid"
) -> float:
    """Integrate :func:`wigner_density` over the box ``|psi_i| <= extent * sqrt(V_ii)``.

    A tensor-product grid is built per axis with a step of
    ``sigma_i / resolution``, where ``sigma_i`` is the conditional standard
    deviation of quadrature ``i`` (the narrowest width of the integrand along
    that axis). For a Gaussian integrand the trapezoid rule on such a grid
    converges exponentially; ``"gauss-legendre"`` uses composite 8-point
    panels at twice the node density (16x the work in 4-D).
    """
    from emsq import kernels

    det = float(np.linalg.det(v.v))
    if det < 1e-300:
        raise SingularCovariance(f"det V = {det:.3e}")
    precision = np.linalg.inv(v.v)
    precision = 0.5 * (precision + precision.T)
    nodes, weights = [], []
    for i in range(4):
        cond_sigma = 1.0 / math.sqrt(precision[i, i])
        x, w = _axis_rule(extent * math.sqrt(v.v[i, i]), cond_sigma / resolution, rule)
        nodes.append(x)
        weights.append(w)
    total = kernels.wigner_grid_sum(precision, nodes, weights)
    return total / (4.0 * math.pi**2 * math.sqrt(det))


def marginal_cm(v: CovMat4, keep) -> np.ndarray:
    """Covariance of two quadratures with the other two integrated out.

    ``keep`` is a pair of indices or names from ``("X1", "P1", "X2", "P2")``.
    """
    idx = [QUADRATURES.index(k) if isinstance(k, str) else int(k) for k in keep]
    if len(idx) != 2 or len(set(idx)) != 2 or not all(0 <= i < 4 for i in idx):
        raise ValueError(f"invalid quadrature pair {keep!r}")
    return v.v[np.ix_(idx, idx)].copy()


# ---------------------------------------------------------------------------
# squeezing and separability


def squeezing_vs_angle(p: TmstParams, phi: float) -> float:
    total = 1.0 + p.n1 + p.n2
    return total * (math.cosh(2.0 * p.r) - math.sinh(2.0 * p.r) * math.cos(phi)) / 2.0


def epr_duan(v: CovMat4, phi: float = 0.0) -> DuanResult:
    """Variances of ``X- = (X1(phi) - X2)/sqrt2`` and ``P+ = (P1(phi) + P2)/sqrt2`` and their sum."""
    w = rotate_mode1(v, phi).v if phi else v.v
    x_minus = (w[0, 0] + w[2, 2] - 2.0 * w[0, 2]) / 2.0
    p_plus = (w[1, 1] + w[3, 3] + 2.0 * w[1, 3]) / 2.0
    return DuanResult(
        float(x_minus),
        float(p_plus),
        float(x_minus + p_plus),
        _to_db(x_minus),
        _to_db(p_plus),
    )


def _to_db(var):
    if var <= 0:
        return float("-inf")
    return 10.0 * math.log10(var / VACUUM_VARIANCE)


def optimal_angle(v: CovMat4) -> float:
    """Detector angle of channel 1 that minimizes the Duan sum, in ``[0, 2 pi)``."""
    w = v.v
    return math.atan2(w[1, 2] + w[0, 3], w[0, 2] - w[1, 3]) % (2.0 * math.pi)


def project_normal_form(v: CovMat4) -> CovMat4:
    """Nearest normal-form matrix (pairwise averages), for statistically estimated CMs.

    This is not a symplectic reduction: it assumes ``v`` is already a normal
    form up to estimation noise.
    """
    w = v.v
    return CovMat4.normal_form(
        (w[0, 0] + w[1, 1]) / 2.0, (w[2, 2] + w[3, 3]) / 2.0, (w[0, 2] - w[1, 3]) / 2.0
    )


# ---------------------------------------------------------------------------
# entanglement and discord


def _require_normal_form(v):
    if not v.is_normal_form():
        raise NotNormalForm(f"normal-form residual {v.normal_form_residual():.3e}")


def _clamped_sqrt(x, scale, what):
    if x < 0.0:
        if x < -CLAMP_TOL * _scale(scale):
            raise NumericallyIllConditioned(f"negative radicand in {what}: {x:.3e}")
        return 0.0
    return math.sqrt(x)


def negativity(v: CovMat4) -> tuple[float, float]:
    """Smallest partially-transposed symplectic eigenvalue and log-negativity (base 2)."""
    _require_normal_form(v)
    a, b, c = v.v11, v.v33, v.v13
    outer = a * a + b * b + 2.0 * c * c
    zeta_plus = math.sqrt(0.5 * (outer + math.sqrt((a * a - b * b) ** 2 + 4.0 * c * c * (a + b) ** 2)))
    # zeta_minus * zeta_plus = sqrt(det V) avoids the cancellation in outer - root
    zeta = abs(a * b - c * c) / zeta_plus
    if zeta == 0.0:
        raise NumericallyIllConditioned("zeta_minus vanished; log-negativity diverges")
    return zeta, max(0.0, -math.log2(2.0 * zeta))


def normal_form_symplectic_eigenvalues(v: CovMat4) -> tuple[float, float]:
    _require_normal_form(v)
    a, b, c = v.v11, v.v33, v.v13
    outer = a * a + b * b - 2.0 * c * c
    root = _clamped_sqrt((a * a - b * b) ** 2 - 4.0 * c * c * (a - b) ** 2, outer * outer, "nu")
    nu_plus = math.sqrt(0.5 * (outer + root))
    if nu_plus == 0.0:
        return 0.0, 0.0
    return abs(a * b - c * c) / nu_plus, nu_plus


def entropy_h(x: float) -> float:
    """Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue ``x``."""
    if x <= VACUUM_VARIANCE + ENTROPY_EPS:
        return 0.0
    return (x + 0.5) * math.log2(x + 0.5) - (x - 0.5) * math.log2(x - 0.5)


def quantum_discord(v: CovMat4) -> float:
    """Gaussian discord ``D(2|1)`` of a normal-form two-mode squeezed thermal state (bits)."""
    _require_normal_form(v)
    a, b, c = v.v11, v.v33, v.v13
    if c == 0.0:
        return 0.0
    if b * b <= 1.0 + 1e-12:
        raise DegenerateState(f"V33^2 = {b * b:.6g} is at or below the pole of the discord formula")
    tau = c * c / (b * b - 1.0)
    eta = a - b * c * c / (b * b - 1.0)
    nu_minus, nu_plus = normal_form_symplectic_eigenvalues(v)
    return entropy_h(b) - entropy_h(nu_minus) - entropy_h(nu_plus) + entropy_h(tau + eta)


def entropy_of_formation(e_n: float) -> float:
    if e_n < 0:
        raise ValueError("log-negativity must be >= 0")
    theta = 2.0 ** (-e_n)
    sigma_plus = (1.0 / math.sqrt(theta) + math.sqrt(theta)) ** 2 / 4.0
    sigma_minus = (1.0 / math.sqrt(theta) - math.sqrt(theta)) ** 2 / 4.0
    minus_term = sigma_minus * math.log2(sigma_minus) if sigma_minus > 0 else 0.0
    return max(0.0, sigma_plus * math.log2(sigma_plus) - minus_term)


def ebit_rate(e_f: float, bandwidth_hz: float) -> float:
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return e_f * bandwidth_hz


def entanglement_report(v: CovMat4, phi: float | None = None) -> EntanglementReport:
    """All state metrics at the optimal (or given) detector angle of channel 1.

    Matrices that are a normal form only up to estimation noise are projected
    onto the nearest normal form before the closed-form measures are applied.
    """
    v.check_physical()
    if phi is None:
        phi = optimal_angle(v)
    w = rotate_mode1(v, phi)
    if not w.is_normal_form():
        w = project_normal_form(w)
    duan = epr_duan(w)
    zeta, e_n = negativity(w)
    try:
        discord = quantum_discord(w)
    except DegenerateState:
        discord = None
    nu_minus, nu_plus = v.symplectic_eigenvalues()
    return EntanglementReport(
        phi=phi,
        delta_epr=duan.delta_epr,
        squeezing_db_x=duan.squeezing_db_x,
        squeezing_db_p=duan.squeezing_db_p,
        zeta_minus=zeta,
        e_n=e_n,
        discord=discord,
        e_f=entropy_of_formation(e_n),
        nu_minus=nu_minus,
        nu_plus=nu_plus,
    )
