"""Kernel selection: compiled extension if importable, else pure Python.

Set ``PLANARLAB_PURE=1`` to force the fallback.
"""
import os

from . import _pykernels

python_kernels = _pykernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("PLANARLAB_PURE", "") not in ("1", "true", "yes"):
    kernels = compiled_kernels
    NAME = "cython"
else:
    kernels = _pykernels
    NAME = "python"
