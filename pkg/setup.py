"""Build script: compiles the chamber-canonicalization kernel when Cython and
a C++ toolchain are available, and falls back to the pure-Python kernel
otherwise.  The installed package works either way; see heckegamma._kernel.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/heckegamma/_kernel_cy.pyx"],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # noqa: BLE001 - any build-chain failure means pure fallback
    sys.stderr.write(f"warning: compiled kernel skipped ({exc}); using pure-Python kernel\n")

setup(ext_modules=ext_modules)
