"""Build the optional compiled simulation kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so a failed compile only costs speed, never functionality.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/ckptsim/engine/_core.pyx"],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"ckptsim: skipping compiled kernel ({exc}); "
                     "falling back to the pure-Python engine\n")

setup(ext_modules=ext_modules)
