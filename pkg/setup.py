"""Build the optional Cython kernels.

Set NHARM_NO_EXT=1 to skip compilation; the package then runs on the numpy
fallback in ``nharm._fallback``.
"""
import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("NHARM_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "nharm._kernels",
        ["src/nharm/_kernels.pyx"],
        # error-free transforms break under value-unsafe float optimisations
        extra_compile_args=["-O3", "-fno-fast-math", "-ffp-contract=off"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions())
