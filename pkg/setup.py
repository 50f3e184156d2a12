"""Build script: compiles the optional streaming-statistics speedup module.

The package works without the compiled extension (a pure-Python kernel is
selected at import time), so any build failure here downgrades to a warning
instead of aborting the install.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def make_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("nidslab: Cython not available, skipping compiled kernels", file=sys.stderr)
        return []
    return cythonize(
        ["src/nidslab/features/_speedups.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


class OptionalBuildExt(build_ext):
    """Build extensions, but never fail the whole install over them."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"nidslab: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"nidslab: failed to build {ext.name} ({exc})", file=sys.stderr)


setup(ext_modules=make_extensions(), cmdclass={"build_ext": OptionalBuildExt})
