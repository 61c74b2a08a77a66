"""Time the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``.
"""
import argparse
import timeit

import numpy as np

from emsq import kernels
from emsq.model import filtered_output_cm, reference_operating_point


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    op = reference_operating_point()
    params = op.as_vector()
    omegas = np.linspace(-5e3, 5e3, 2001)
    rng = np.random.default_rng(0)
    m = rng.normal(size=(4, 4))
    precision = m @ m.T + 4 * np.eye(4)
    nodes = [np.linspace(-4, 4, 17)] * 4
    weights = [np.full(17, 0.5)] * 4

    cases = {
        "spectral_density x2001": lambda mod: [mod.spectral_density(w, params) for w in omegas],
        "filtered_output_cm rect": lambda mod: filtered_output_cm(op, 100.0, "rect", backend=mod),
        "filtered_output_cm gaussian": lambda mod: filtered_output_cm(op, 100.0, "gaussian", backend=mod),
        "wigner_grid_sum 17^4": lambda mod: mod.wigner_grid_sum(precision, nodes, weights),
    }
    available = kernels.backends()
    print(f"{'case':30s}" + "".join(f"{name:>12s}" for name in available) + "     speedup")
    for label, fn in cases.items():
        times = {}
        for name, mod in available.items():
            times[name] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        row = f"{label:30s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times.values())
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
