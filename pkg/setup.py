"""Build script for the optional compiled integrator core.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are tolerated: build with

    pip install -e . --no-build-isolation

and if no C toolchain is available the install still succeeds.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "satsuma._core",
                ["src/satsuma/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=extensions)
