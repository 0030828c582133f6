"""Build script: compiles the grid kernel extension when a toolchain is available.

The compiled module is optional. If Cython or a C compiler is missing (or
TEAMSIM_SKIP_EXT=1 is set), the package installs without it and falls back to
the pure-Python kernels at import time.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Best-effort extension build; failures degrade to the pure-Python path."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"teamsim: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"teamsim: skipping {ext.name} ({exc})")


ext_modules = []
if os.environ.get("TEAMSIM_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "teamsim.grid._kernels_cy",
                    ["src/teamsim/grid/_kernels_cy.pyx"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
            },
        )
    except ImportError:  # pragma: no cover - Cython not installed
        ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
