"""Build the optional compiled kernels.

If Cython or a C compiler is unavailable the package still installs and
falls back to the NumPy implementation of the same kernels.
"""
import os

import numpy as np
from setuptools import setup

ext_modules = []
if not os.environ.get("MDEPTEST_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "mdeptest._kernels",
                    ["src/mdeptest/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": 3},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"mdeptest: skipping compiled kernels ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules)
