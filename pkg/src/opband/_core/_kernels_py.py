"""Pure numpy implementations of the hot kernels.

Mirror of the compiled lane in ``_kernels.pyx``; both expose the same
functions so the selector in ``__init__`` can swap them freely.  Vectors are
complex128, ``starts`` is the int64 array of cut points (length nblocks + 1),
and sparse operators arrive as scipy CSR matrices.
"""

from __future__ import annotations

import numpy as np


def block_norms(x, starts):
    """Euclidean norm of each block of x."""
    sq = x.real * x.real + x.imag * x.imag
    return np.sqrt(np.add.reduceat(sq, starts[:-1]))


def _pnorm(values, p):
    # scaled to avoid overflow for large p or extreme block norms
    m = float(values.max(initial=0.0))
    if m == 0.0:
        return 0.0
    return m * float(np.sum((values / m) ** p)) ** (1.0 / p)


def mixed_norm(x, starts, p):
    """The ell^p norm of the block-wise Euclidean norms."""
    return _pnorm(block_norms(x, starts), p)


def duality_scaled(x, starts, p):
    """Norming functional of x: block k is scaled by ||x_k||^(p-2) / ||x||^(p-1).

    The result has unit norm in the dual exponent and pairs with x to ||x||.
    Caller guarantees x != 0.
    """
    bn = block_norms(x, starts)
    total = _pnorm(bn, p)
    ratios = bn / total
    with np.errstate(divide="ignore", invalid="ignore"):
        coeff = np.where(bn > 0.0, ratios ** (p - 2.0), 0.0) / total
    return np.repeat(coeff, np.diff(starts)) * x


def power_iteration(a_csr, ah_csr, starts, p, x0, max_iter, tol):
    """Duality-map power iteration for the mixed-norm operator norm.

    Alternates y = A x, the norming functional of y, g = A* u, and the
    pre-dual norming functional of g (which is automatically a unit vector
    for exponent p).  Returns (witness, best_ratio, iterations, converged);
    the ratio of the returned witness is a certified lower bound since the
    iterate is kept unit-norm throughout.
    """
    q = p / (p - 1.0)
    nx = mixed_norm(x0, starts, p)
    if nx == 0.0:
        raise ValueError("power iteration needs a nonzero start vector")
    x = x0 / nx
    best = -1.0
    xbest = x.copy()
    prev = -1.0
    converged = False
    iters = 0
    for iters in range(1, max_iter + 1):
        y = a_csr.dot(x)
        ny = mixed_norm(y, starts, p)
        if ny > best:
            best = ny
            xbest = x.copy()
        if ny == 0.0:
            break
        if prev >= 0.0 and abs(ny - prev) <= tol * max(ny, 1.0):
            converged = True
            break
        prev = ny
        u = duality_scaled(y, starts, p)
        g = ah_csr.dot(u)
        ng = mixed_norm(g, starts, q)
        if ng == 0.0:
            break
        x = duality_scaled(g, starts, q)
    return xbest, max(best, 0.0), iters, converged
