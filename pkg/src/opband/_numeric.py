"""Shared numeric helpers: spectral norms and top singular vectors."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def _arpack_start(n: int) -> np.ndarray:
    # fixed, fully supported start vector keeps ARPACK runs reproducible
    return np.linspace(1.0, 2.0, n)


def spectral_norm_dense(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    if min(a.shape) == 1:
        return float(np.linalg.norm(a))
    return float(np.linalg.svd(a, compute_uv=False)[0])


def spectral_norm_sparse(a) -> float:
    """Largest singular value of a scipy sparse matrix."""
    a = a.tocsr()
    if a.nnz == 0:
        return 0.0
    if min(a.shape) < 16:
        return spectral_norm_dense(a.toarray())
    try:
        s = spla.svds(
            a, k=1, return_singular_vectors=False, v0=_arpack_start(min(a.shape))
        )
        return float(s[0])
    except Exception:
        return spectral_norm_dense(a.toarray())


def spectral_norm_auto(a) -> float:
    if sp.issparse(a):
        return spectral_norm_sparse(a)
    a = np.asarray(a)
    # route genuinely sparse large residuals through ARPACK
    if a.size >= 256 * 256 and np.count_nonzero(a) < 0.05 * a.size:
        return spectral_norm_sparse(sp.csr_matrix(a))
    return spectral_norm_dense(a)


def top_right_singular_vector(a) -> tuple[float, np.ndarray]:
    """(sigma_max, right singular vector) of a dense or sparse matrix."""
    if sp.issparse(a):
        n = min(a.shape)
        if n >= 16:
            try:
                u, s, vt = spla.svds(a.tocsr(), k=1, v0=_arpack_start(n))
                return float(s[0]), vt[0].conj()
            except Exception:
                pass
        a = a.toarray()
    a = np.asarray(a)
    _, s, vt = np.linalg.svd(a)
    return float(s[0]), vt[0].conj()


def corner_norm(a: np.ndarray, row_from: int, col_to: int) -> float:
    """Spectral norm of the lower-left corner a[row_from:, :col_to].

    Crops to the bounding box of the nonzero entries first, which makes the
    banded and finite-rank cases cheap.
    """
    block = a[row_from:, :col_to]
    if block.size == 0:
        return 0.0
    rows = np.flatnonzero(np.any(block, axis=1))
    if rows.size == 0:
        return 0.0
    cols = np.flatnonzero(np.any(block, axis=0))
    sub = block[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
    return spectral_norm_dense(np.ascontiguousarray(sub))
