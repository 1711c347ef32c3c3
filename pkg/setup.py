"""Build script: compiles the optional kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so build failures here degrade to a warning instead of
aborting the install.
"""

import os
import sys
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


def kernel_extensions():
    if os.environ.get("DP_INVARIANCE_PURE_PYTHON"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("numpy/Cython unavailable; building without the compiled kernels")
        return []

    # random_standard_exponential lives in numpy's static distribution lib
    npyrandom_dir = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext = Extension(
        "dp_invariance._kernels._core",
        sources=["src/dp_invariance/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[npyrandom_dir],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"] if sys.platform != "win32" else ["/O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class optional_build_ext(build_ext):
    """Tolerate a missing compiler: the numpy fallback takes over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # CompileError, DistutilsPlatformError, ...
            warnings.warn(f"compiled kernels skipped ({exc}); using the numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped ({exc}); using the numpy fallback")


setup(
    ext_modules=kernel_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
