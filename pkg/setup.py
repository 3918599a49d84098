"""Build script: compiles the optional extension kernel.

The package works without the extension (a pure-Python/numpy kernel is
selected at import time), so any failure while building or compiling the
Cython module downgrades to a warning instead of failing the install.
Set HECKELAB_NO_EXT=1 to skip the extension build entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that tolerates compiler failures."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - environment dependent
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - environment dependent
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the compiled kernel failed; "
            "the pure-Python kernel will be used instead.\n"
            f"  reason: {exc}",
            file=sys.stderr,
        )


def extensions():
    if os.environ.get("HECKELAB_NO_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - environment dependent
        print(
            "WARNING: Cython not available; skipping the compiled kernel.",
            file=sys.stderr,
        )
        return []
    return cythonize(
        [
            Extension(
                "heckelab._speedups",
                ["src/heckelab/_speedups.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
