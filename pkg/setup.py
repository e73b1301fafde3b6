"""Build script: compiles the Monte Carlo kernel extension.

The extension is optional at runtime (a numpy fallback ships in
finpop._kernels_py); if compilation is impossible the install still
succeeds and the package selects the fallback at import.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "finpop._kernels_cy",
                ["src/finpop/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
