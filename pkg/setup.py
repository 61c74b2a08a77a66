"""Build script for the optional compiled kernels.

The extension is marked optional: if no compiler (or Cython) is available the
package installs without it and ``emsq.kernels`` uses the pure-Python backend.
"""
import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

source = os.path.join("src", "emsq", "_ckernels.pyx")
if cythonize is None:
    source = source.replace(".pyx", ".c")

extensions = [
    Extension(
        "emsq._ckernels",
        [source],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        optional=True,
    )
]

if cythonize is not None and os.path.exists(source):
    extensions = cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False, "cdivision": True},
    )

setup(ext_modules=extensions)
