"""Kernel selection: compiled extension when importable, numpy otherwise.

``NHARM_PURE=1`` in the environment forces the numpy fallback.
"""
import os

from . import _fallback

fallback = _fallback

if os.environ.get("NHARM_PURE"):
    kernels = _fallback
    NAME = "python"
else:
    try:
        from . import _kernels as kernels
        NAME = "cython"
    except ImportError:  # extension not built
        kernels = _fallback
        NAME = "python"

compiled = None if kernels is _fallback else kernels
