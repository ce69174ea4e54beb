"""Kernel backend selection, done once at import.

The compiled extension (``latflow._ckernels``) is used when it imported
successfully; otherwise the numpy fallback takes over transparently.
Set ``LATFLOW_PURE_PYTHON=1`` in the environment to force the fallback,
e.g. to benchmark one against the other.
"""

import os

import numpy as np

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

if _ckernels is None or os.environ.get("LATFLOW_PURE_PYTHON"):
    BACKEND = "python"
else:
    BACKEND = "cython"


def csr_matvec(data, indices, indptr, x):
    """y = A @ x for a CSR matrix given as (data, indices, indptr) arrays."""
    if BACKEND == "cython":
        out = np.empty(len(indptr) - 1, dtype=np.float64)
        _ckernels.csr_matvec(data, indices, indptr, x, out)
        return out
    return _kernels_py.csr_matvec(data, indices, indptr, x)


def csr_matvec_python(data, indices, indptr, x):
    """Always the numpy fallback, regardless of the active backend."""
    return _kernels_py.csr_matvec(data, indices, indptr, x)


def csr_matvec_compiled(data, indices, indptr, x):
    """Always the compiled kernel; raises if the extension is unavailable."""
    if _ckernels is None:
        raise RuntimeError("compiled kernel latflow._ckernels is not built")
    out = np.empty(len(indptr) - 1, dtype=np.float64)
    _ckernels.csr_matvec(data, indices, indptr, x, out)
    return out


def compiled_available():
    return _ckernels is not None
