"""Red-pump power sweep at fixed blue power."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from emsq.errors import EmsqError
from emsq.gaussian import entanglement_report
from emsq.model.device import DeviceParams
from emsq.model.spectrum import filtered_output_cm

SWEEP_COLUMNS = (
    "p_r_dbm", "c1", "c2", "c2_minus_c1", "stable", "delta_epr", "e_n", "discord", "error",
)


@dataclass(frozen=True)
class SweepRow:
    p_r_dbm: float
    c1: float
    c2: float
    c2_minus_c1: float
    stable: bool
    delta_epr: Optional[float] = None
    e_n: Optional[float] = None
    discord: Optional[float] = None
    error: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def sweep_point(device: DeviceParams, p_r_dbm: float) -> SweepRow:
    """Evaluate one grid point; failures are recorded in the row instead of raised."""
    op = device.with_red_power(p_r_dbm).operating_point()
    base = dict(p_r_dbm=float(p_r_dbm), c1=op.c1, c2=op.c2, c2_minus_c1=op.c2 - op.c1)
    if not op.stability().stable:
        return SweepRow(stable=False, error="unstable", **base)
    try:
        cm = filtered_output_cm(op, device.bandwidth_hz, device.filter_kind)
        rep = entanglement_report(cm)
    except EmsqError as exc:
        return SweepRow(stable=True, error=f"{type(exc).__name__}: {exc}", **base)
    return SweepRow(
        stable=True, delta_epr=rep.delta_epr, e_n=rep.e_n, discord=rep.discord, **base
    )


def _check_monotone(grid):
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("power grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(grid)):
        raise ValueError("power grid must be finite")
    d = np.diff(grid)
    if grid.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("power grid must be strictly monotone")


def power_sweep(
    device: DeviceParams, p_r_grid_dbm: Sequence[float], workers: Optional[int] = None
) -> list[SweepRow]:
    """One :class:`SweepRow` per red-pump power, in grid order.

    Grid points are independent; with ``workers > 1`` they are evaluated in a
    process pool and merged back by index.
    """
    grid = np.asarray(p_r_grid_dbm, dtype=float)
    _check_monotone(grid)
    points = [float(p) for p in grid]
    if workers and workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(sweep_point, [device] * len(points), points))
    return [sweep_point(device, p) for p in points]
