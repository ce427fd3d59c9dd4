"""Build script for the optional compiled grid-scan kernel.

The package works without the extension (a pure NumPy fallback is selected
at import time), so a failed Cython build is downgraded to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "gicsum._ckernels",
                ["src/gicsum/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps the arithmetic bit-identical to the
                # pure NumPy fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"gicsum: compiled kernel disabled ({exc}); using pure-Python fallback",
          file=sys.stderr)

setup(ext_modules=ext_modules)
