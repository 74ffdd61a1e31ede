"""Hot-kernel backend selection.

The compiled Cython module is preferred; the numpy fallback is used when the
extension is unavailable or RMTLAB_PURE_PYTHON=1 is set.  Both expose the
same functions with identical semantics.
"""
import os

if os.environ.get("RMTLAB_PURE_PYTHON"):
    from rmtlab._kernels import _kernels_py as _impl
else:
    try:
        from rmtlab._kernels import _kernels_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from rmtlab._kernels import _kernels_py as _impl

BACKEND = _impl.BACKEND
householder_tridiag = _impl.householder_tridiag
tridiag_eigenvalues = _impl.tridiag_eigenvalues
pairwise_inverse_sum = _impl.pairwise_inverse_sum

__all__ = [
    "BACKEND",
    "householder_tridiag",
    "tridiag_eigenvalues",
    "pairwise_inverse_sum",
]
