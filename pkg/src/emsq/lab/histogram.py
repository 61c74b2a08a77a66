"""Two-quadrature difference histograms (pumps on minus pumps off)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from emsq.errors import EmptyRange
from emsq.gaussian import QUADRATURES
from emsq.lab.sampling import QuadratureBatch

DEFAULT_BINS = 64
DEFAULT_RANGE_SIGMA = 6.0


@dataclass(frozen=True, eq=False)
class DiffHistogram:
    """``counts_on / n_on - counts_off / n_off`` on a shared grid; row index follows the first quadrature."""

    values: np.ndarray
    x_edges: np.ndarray
    y_edges: np.ndarray
    pair: tuple
    n_on: int
    n_off: int

    def metadata(self) -> dict:
        return {
            "pair": [QUADRATURES[i] for i in self.pair],
            "x_edges": self.x_edges.tolist(),
            "y_edges": self.y_edges.tolist(),
            "n_on": self.n_on,
            "n_off": self.n_off,
            "shape": list(self.values.shape),
        }

    def diagonal_contrast(self) -> float:
        """Mass on the ``+45`` degree half-plane pair minus the ``-45`` one (bin centres)."""
        xc = 0.5 * (self.x_edges[1:] + self.x_edges[:-1])
        yc = 0.5 * (self.y_edges[1:] + self.y_edges[:-1])
        prod = np.sign(xc[:, None] * yc[None, :])
        return float(np.sum(self.values * prod))


def _resolve(index):
    if isinstance(index, str):
        try:
            return QUADRATURES.index(index)
        except ValueError:
            raise ValueError(f"unknown quadrature {index!r}; expected one of {QUADRATURES}")
    i = int(index)
    if not 0 <= i < 4:
        raise ValueError(f"quadrature index out of range: {index}")
    return i


def difference_histogram(
    on: QuadratureBatch,
    off: QuadratureBatch,
    pair: Sequence = (0, 2),
    bins: int = DEFAULT_BINS,
    limits: Optional[Sequence[Sequence[float]]] = None,
    range_sigma: float = DEFAULT_RANGE_SIGMA,
) -> DiffHistogram:
    """Per-sample normalized difference of 2-D histograms on identical bins.

    By default each axis spans ``+-range_sigma`` standard deviations of the
    pumps-on batch. ``limits`` overrides this with explicit ``[(lo, hi), (lo, hi)]``.

    Raises:
        EmptyRange: if an axis has zero or negative width.
    """
    i, j = (_resolve(p) for p in pair)
    if i == j:
        raise ValueError("histogram pair must name two different quadratures")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if limits is None:
        sd = on.samples[:, [i, j]].std(axis=0)
        limits = [(-range_sigma * s, range_sigma * s) for s in sd]
    (xlo, xhi), (ylo, yhi) = limits
    if not (np.isfinite([xlo, xhi, ylo, yhi]).all() and xhi > xlo and yhi > ylo):
        raise EmptyRange(f"histogram range is empty: {limits}")
    x_edges = np.linspace(xlo, xhi, bins + 1)
    y_edges = np.linspace(ylo, yhi, bins + 1)
    h_on, _, _ = np.histogram2d(on.samples[:, i], on.samples[:, j], bins=[x_edges, y_edges])
    h_off, _, _ = np.histogram2d(off.samples[:, i], off.samples[:, j], bins=[x_edges, y_edges])
    return DiffHistogram(h_on / on.n - h_off / off.n, x_edges, y_edges, (i, j), on.n, off.n)
