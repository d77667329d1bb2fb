"""Build hook for the optional compiled series kernel.

The package is fully functional without the extension (a pure-Python kernel
is selected at import time), so a failed compile only costs speed.
"""

import warnings

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "anirabi._kernel_cy",
                sources=["src/anirabi/_kernel_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    warnings.warn("Cython not available; installing with the pure-Python kernel only")

setup(ext_modules=ext_modules)
