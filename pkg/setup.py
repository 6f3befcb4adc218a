"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so the extension is marked optional and a failed compile
does not abort installation.
"""

import os

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

ext = Extension(
    "pmeans._kernels._core",
    ["src/pmeans/_kernels/_core.pyx"],
    include_dirs=[np.get_include()],
    library_dirs=[os.path.join(os.path.dirname(np.random.__file__), "lib")],
    libraries=["npyrandom"],
    # -ffp-contract=off keeps the kernel arithmetic bit-identical to the
    # numpy fallback (no fused multiply-adds).
    extra_compile_args=["-O2", "-ffp-contract=off"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level=3))
