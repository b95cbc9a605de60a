"""Build script: compiles the optional Cython sweep kernel.

The extension is a pure speed-up; if Cython or a C compiler is missing
(or COLGIBBS_SKIP_EXT is set) the package installs without it and the
samplers fall back to the NumPy implementation.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if not os.environ.get("COLGIBBS_SKIP_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/colgibbs/_sweep.pyx",
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(np.get_include())
    except ImportError as exc:
        print(f"colgibbs: building without compiled sweep kernel ({exc})",
              file=sys.stderr)

setup(ext_modules=ext_modules)
