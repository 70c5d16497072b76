"""Builds the optional compiled kernels; the package works without them."""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

# no -ffast-math: the series kernels rely on compensated summation
extensions = [
    Extension(
        "abspin._ckernels",
        ["src/abspin/_ckernels.pyx"],
        extra_compile_args=["-O2"],
    )
]


class OptionalBuildExt(build_ext):
    """Fall back to the pure-Python kernels if compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: compiled kernels not built ({exc}); using pure Python")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: {ext.name} not built ({exc}); using pure Python")


ext_modules = []
if not os.environ.get("ABSPIN_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        for ext in extensions:
            ext.include_dirs.append(np.get_include())
        ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
    except ImportError:
        print("warning: Cython/numpy missing at build time; using pure Python")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
