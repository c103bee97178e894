"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when importable; otherwise the
pure-Python ``_kernels_py`` module.  Setting ``QBATTERY_PURE=1`` forces the
fallback.  ``BACKEND`` names the active choice.

The expectation kernel is a per-sample matrix-vector loop; above
``EXPECT_CROSSOVER`` basis states the NumPy version (one BLAS product per
chunk of samples) is faster, so it is used there unless a backend is named.
"""
import os

from . import _kernels_py
from .errors import ConvergenceError

if os.environ.get("QBATTERY_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

BACKENDS = {"python": _kernels_py}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


EXPECT_CROSSOVER = 64


def tridiagonal_eigh(diag, offdiag, max_iter=50, backend=None):
    """Eigen-decomposition of a symmetric tridiagonal matrix.

    Raises
    ------
    ConvergenceError
        If an eigenvalue needs more than ``max_iter`` QL sweeps.
    """
    impl = BACKENDS[backend] if backend else _impl
    w, z, info, iters = impl.tridiagonal_eigh(diag, offdiag, max_iter)
    if info >= 0:
        raise ConvergenceError(info, iters)
    return w, z


def sector_expectations(w, v, a_re, a_im, times, weights, offdiag, backend=None):
    if backend:
        impl = BACKENDS[backend]
    else:
        impl = _impl if len(w) <= EXPECT_CROSSOVER else _kernels_py
    return impl.sector_expectations(w, v, a_re, a_im, times, weights, offdiag)
