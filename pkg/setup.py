"""Build script for the optional compiled kernel extension.

The package is pure Python plus one Cython extension holding the pairwise
singular-kernel sums.  The extension is a performance backend only: if the
build fails (no compiler, no Cython, no OpenMP) the install proceeds and the
package falls back to the numpy reference kernels at import time.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            sys.stderr.write(
                "musielak: compiled kernels unavailable (%s); "
                "installing with the numpy reference backend only\n" % exc
            )

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(
                "musielak: failed to compile %s (%s); "
                "the numpy reference backend will be used\n" % (ext.name, exc)
            )


def make_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        sys.stderr.write("musielak: %s; skipping compiled kernels\n" % exc)
        return []

    openmp = os.environ.get("MUSIELAK_NO_OPENMP") is None
    compile_args = ["-O3"]
    link_args = []
    if openmp:
        compile_args.append("-fopenmp")
        link_args.append("-fopenmp")
    return cythonize(
        [
            Extension(
                "musielak._kernels._core",
                ["src/musielak/_kernels/_core.pyx"],
                extra_compile_args=compile_args,
                extra_link_args=link_args,
                language="c",
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
