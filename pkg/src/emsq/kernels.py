"""Backend selection for the hot kernels.

The compiled extension ``emsq._ckernels`` is used when it imports; otherwise,
or when the environment variable ``EMSQ_PURE_PYTHON=1`` is set, the
pure-Python module ``emsq._pykernels`` is used. Both expose the same
functions with the same semantics.
"""
import os

from emsq import _pykernels
from emsq._pykernels import (  # noqa: F401  (shared constants)
    FILTER_GAUSSIAN,
    FILTER_RECT,
    STATUS_NOT_CONVERGED,
    STATUS_OK,
    STATUS_SINGULAR,
)

_impl = _pykernels
BACKEND = "python"

if os.environ.get("EMSQ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from emsq import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

wigner_grid_sum = _impl.wigner_grid_sum
spectral_density = _impl.spectral_density
spectral_integral = _impl.spectral_integral


def backends():
    """Mapping of available backend names to kernel modules."""
    found = {"python": _pykernels}
    try:
        from emsq import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
