"""Build the optional compiled kernel; the package falls back to numpy without it."""
import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, no Cython, ...
            self.warn(f"compiled kernel not built ({exc}); using the numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self.warn(f"compiled kernel not built ({exc}); using the numpy fallback")


def extensions():
    if os.environ.get("CONEZETA_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    args = [] if sys.platform == "win32" else ["-O2", "-ffp-contract=off", "-fno-fast-math"]
    ext = Extension("conezeta._ckernel", ["src/conezeta/_ckernel.pyx"], extra_compile_args=args)
    return cythonize([ext], language_level=3, quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
