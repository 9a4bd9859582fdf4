"""Kernel lane selection.

The compiled Cython kernels are preferred; a numpy fallback with the same
contract is used when the extension is unavailable or when the environment
variable ``OPBAND_PURE_PYTHON`` is set to a nonempty value.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_impl = None
if not os.environ.get("OPBAND_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled

        _impl = _compiled
    except ImportError:
        _impl = None

_COMPILED = _impl is not None
if _impl is None:
    _impl = _kernels_py


def backend():
    """Name of the active kernel lane: 'cython' or 'python'."""
    return "cython" if _COMPILED else "python"


def block_norms(x, starts):
    return _impl.block_norms(x, starts)


def mixed_norm(x, starts, p):
    return _impl.mixed_norm(x, starts, p)


def duality_scaled(x, starts, p):
    return _impl.duality_scaled(x, starts, p)


def _csr_parts(m):
    # ARPACK-style int32 index arrays; astype is a no-op when already int32
    return (
        np.ascontiguousarray(m.data, dtype=np.complex128),
        m.indices.astype(np.int32, copy=False),
        m.indptr.astype(np.int32, copy=False),
    )


def power_iteration(a_csr, ah_csr, starts, p, x0, max_iter, tol):
    """Run the duality-map iteration on a CSR matrix and its adjoint."""
    x0 = np.ascontiguousarray(x0, dtype=np.complex128)
    if _COMPILED:
        ad, ai, ap = _csr_parts(a_csr)
        hd, hi, hp = _csr_parts(ah_csr)
        return _impl.power_iteration(
            ad, ai, ap, hd, hi, hp, starts, p, x0, max_iter, tol
        )
    return _kernels_py.power_iteration(a_csr, ah_csr, starts, p, x0, max_iter, tol)
