"""Build script for the optional compiled kernel extension.

The package works without the extension (pure-numpy fallback kernels are
selected at import time), so a failed native build only costs speed.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from setuptools.errors import CCompilerError, ExecError, PlatformError
except ImportError:  # setuptools < 60
    from distutils.errors import (
        CCompilerError,
        DistutilsExecError as ExecError,
        DistutilsPlatformError as PlatformError,
    )

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """Build the extension if possible, fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except PlatformError as exc:
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except (CCompilerError, ExecError, PlatformError, ValueError) as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        warnings.warn(
            f"fracedge: native kernel build failed ({exc}); "
            "the pure-Python kernels will be used instead"
        )


extensions = [
    Extension(
        "fracedge._native",
        ["src/fracedge/_native.pyx"],
        # No -ffast-math / -march=native: the compiled kernels must produce
        # bit-identical results to the numpy fallback (no FMA contraction).
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, language_level=3) if cythonize else [],
    cmdclass={"build_ext": OptionalBuildExt},
)
