import os
import warnings

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the compiled kernels if possible; the pure-Python backend covers failures."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"compiled kernels not built ({exc}); using the numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"building {ext.name} failed ({exc}); using the numpy fallback")


def extensions():
    if os.environ.get("UCF_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []

    compile_args = ["-O3", "-ffp-contract=off"]
    if os.environ.get("DEBUG"):
        compile_args = ["-O0", "-g3", "-ffp-contract=off"]

    ext = Extension(
        "ucf._kernels._ckernels",
        ["src/ucf/_kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=compile_args,
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
