"""Synthetic quadrature records from the detection chain.

Samples are drawn in unitless ``(X1, P1, X2, P2)`` space. The detected
covariance is the true state plus ``n_add`` of phase-insensitive amplifier
noise on each quadrature of a channel; with the pumps off only the vacuum
(1/2) and the amplifier noise remain.

Reproducibility: the requested count is split into chunks of
:data:`CHUNK_SIZE` rows, and chunk ``k`` draws from
``default_rng(SeedSequence(seed).spawn(n_chunks)[k])``. Chunks can therefore
be generated in any order or in parallel with identical results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from emsq.constants import VACUUM_VARIANCE
from emsq.errors import CholeskyFailure, InsufficientSamples
from emsq.gaussian import CovMat4
from emsq.lab.chain import RfChain

CHUNK_SIZE = 65536


@dataclass(frozen=True, eq=False)
class QuadratureBatch:
    samples: np.ndarray
    pumps_on: bool
    seed: Optional[int] = None

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 4:
            raise ValueError(f"samples must have shape (n, 4), got {s.shape}")
        if s.shape[0] < 2:
            raise InsufficientSamples("a batch needs at least 2 samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples contain non-finite values")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "pumps_on", bool(self.pumps_on))

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    def second_moments(self) -> np.ndarray:
        """Raw (non mean-subtracted) second moments ``<u_i u_j>``; the fields are zero-mean."""
        return self.samples.T @ self.samples / self.n

    def to_voltages(self, chains: Sequence[RfChain]) -> np.ndarray:
        """Scale channel ``i`` quadratures by ``sqrt(zeta_i)`` to get (I1, Q1, I2, Q2) in volts."""
        c1, c2 = chains
        scale = np.array([math.sqrt(c1.zeta)] * 2 + [math.sqrt(c2.zeta)] * 2)
        return self.samples * scale


def detected_covariance(true_cm: Optional[CovMat4], chains: Sequence[RfChain], pumps_on: bool) -> np.ndarray:
    n1, n2 = chains[0].n_add, chains[1].n_add
    noise = np.diag([n1, n1, n2, n2])
    if pumps_on:
        if true_cm is None:
            raise ValueError("a true covariance matrix is required with the pumps on")
        return np.asarray(true_cm.v) + noise
    return noise + VACUUM_VARIANCE * np.eye(4)


def _chunk_sizes(n):
    full, rest = divmod(n, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def sample_quadratures(
    true_cm: Optional[CovMat4],
    chains: Sequence[RfChain],
    n: int,
    seed: Optional[int] = None,
    pumps_on: bool = True,
) -> QuadratureBatch:
    """Draw ``n`` i.i.d. zero-mean samples of the detected quadratures.

    Raises:
        UnphysicalCovariance: if ``true_cm`` violates the uncertainty principle.
        CholeskyFailure: if the detected covariance is not positive definite.
    """
    if n < 2:
        raise InsufficientSamples("a batch needs at least 2 samples")
    if pumps_on and true_cm is not None:
        true_cm.check_physical()
    cov = detected_covariance(true_cm, chains, pumps_on)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise CholeskyFailure(f"detected covariance is not positive definite: {exc}") from exc
    sizes = _chunk_sizes(int(n))
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    out = np.empty((int(n), 4))
    start = 0
    for size, child in zip(sizes, children):
        z = np.random.default_rng(child).standard_normal((size, 4))
        out[start : start + size] = z @ chol.T
        start += size
    return QuadratureBatch(out, pumps_on, seed)


def rotate_detector(batch: QuadratureBatch, phi: float) -> QuadratureBatch:
    """Rotate channel 1 by ``phi``: ``X1' = c X1 + s P1``, ``P1' = -s X1 + c P1``.

    Channel 2 columns are copied unchanged.
    """
    c, s = math.cos(phi), math.sin(phi)
    x1 = batch.samples[:, 0]
    p1 = batch.samples[:, 1]
    out = np.array(batch.samples, copy=True)
    out[:, 0] = c * x1 + s * p1
    out[:, 1] = -s * x1 + c * p1
    return QuadratureBatch(out, batch.pumps_on, batch.seed)
