"""Operator norm estimation on mixed-norm spaces.

estimate_norm returns a certified interval: the lower bound is the Rayleigh
quotient of an explicit unit witness (replayed through the public apply and
norm routines), the upper bound is the smaller of the structural bounds
(2m+1) * sup block norm and the per-diagonal sum.  For p = 2 the norm is a
singular value and is computed exactly.

brute_force_norm is an intentionally independent oracle for tiny dimensions:
quasi-random sphere sampling plus a dense-matrix L-BFGS polish, sharing no
code with the estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.stats
from scipy.stats import qmc

from . import _core
from ._numeric import top_right_singular_vector
from .blockop import BlockBandedOperator, diagonal_sum_bound, norm_sandwich
from .space import MixedVector, mixed_norm


@dataclass(frozen=True)
class NormBudget:
    """Effort knobs for estimate_norm; all runs are deterministic in seed."""

    restarts: int = 8
    max_iter: int = 400
    tol: float = 1e-12
    seed: int = 0
    polish: bool = True
    polish_iters: int = 60

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1:
            raise ValueError("budget needs at least one restart and one iteration")


@dataclass(frozen=True)
class NormEstimate:
    lower: float
    upper: float
    witness: MixedVector
    method: str
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "method": self.method,
            "iterations": self.iterations,
            "converged": self.converged,
            "witness": {
                "re": self.witness.entries.real.tolist(),
                "im": self.witness.entries.imag.tolist(),
            },
        }


def _replay_quotient(op: BlockBandedOperator, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Rayleigh quotient through the public path, with x renormalized."""
    nx = _core.mixed_norm(x, op.space.starts, op.space.p)
    if nx == 0.0:
        return 0.0, x
    x = x / nx
    y = op.csr.dot(x)
    return _core.mixed_norm(y, op.space.starts, op.space.p), x


def _ascent_polish(op: BlockBandedOperator, x0: np.ndarray, iters: int
                   ) -> tuple[np.ndarray, float, int]:
    """Gradient ascent on the Rayleigh quotient over the unit sphere.

    The gradient of ||Tx|| at unit x is T* applied to the norming functional
    of Tx, so each step is two matvecs plus a renormalization.
    """
    starts, p = op.space.starts, op.space.p
    best, x = _replay_quotient(op, x0)
    xbest = x
    eta = 0.5
    steps = 0
    for _ in range(iters):
        y = op.csr.dot(x)
        ny = _core.mixed_norm(y, starts, p)
        if ny == 0.0:
            break
        grad = op.csr_adjoint.dot(_core.duality_scaled(y, starts, p))
        moved = False
        for _ in range(6):
            trial = x + eta * grad
            r, trial = _replay_quotient(op, trial)
            steps += 1
            if r > best:
                best, xbest, x = r, trial, trial
                eta *= 1.4
                moved = True
                break
            eta *= 0.4
        if not moved:
            break
    return xbest, best, steps


def estimate_norm(op: BlockBandedOperator, budget: NormBudget | None = None
                  ) -> NormEstimate:
    """Two-sided norm estimate with a unit witness certifying the lower bound."""
    budget = budget or NormBudget()
    space = op.space
    structural = min(
        (2 * op.band + 1) * op.sup_block_norm, diagonal_sum_bound(op)
    )
    sandwich = norm_sandwich(op)
    if op.sup_block_norm == 0.0:
        return NormEstimate(0.0, 0.0, sandwich.witness, "power-iteration", 0, True)

    if space.p == 2.0:
        sigma, v = top_right_singular_vector(op.csr)
        upper = min(structural, sigma * (1.0 + 1e-12))
        quot, v = _replay_quotient(op, v)
        lower = min(quot, upper)
        return NormEstimate(
            lower, upper, MixedVector(space, v), "svd-exact", 0, True
        )

    rng = np.random.default_rng([budget.seed, 20221])
    seeds = [np.asarray(sandwich.witness.entries, dtype=np.complex128)]
    _, v2 = top_right_singular_vector(op.csr)
    seeds.append(v2.astype(np.complex128))
    while len(seeds) < budget.restarts:
        seeds.append(
            rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        )

    best_ratio = -1.0
    best_x = seeds[0]
    total_iters = 0
    converged = False
    for x0 in seeds:
        wit, ratio, iters, conv = _core.power_iteration(
            op.csr, op.csr_adjoint, space.starts, space.p, x0,
            budget.max_iter, budget.tol,
        )
        total_iters += iters
        converged = converged or conv
        if ratio > best_ratio:
            best_ratio, best_x = ratio, wit

    method = "power-iteration"
    quot, best_x = _replay_quotient(op, best_x)
    if budget.polish:
        xp, rp, steps = _ascent_polish(op, best_x, budget.polish_iters)
        total_iters += steps
        if rp > quot * (1.0 + 1e-12):
            method = "multi-restart-ascent"
            quot, best_x = rp, xp

    lower = min(quot, structural)
    return NormEstimate(
        lower, structural, MixedVector(space, best_x), method,
        total_iters, converged,
    )


# -- independent small-dimension oracle --------------------------------------


def _row_block_norms(m: np.ndarray, starts: np.ndarray) -> np.ndarray:
    sq = m.real * m.real + m.imag * m.imag
    return np.sqrt(np.add.reduceat(sq, starts[:-1], axis=1))


def _row_mixed_norms(m: np.ndarray, starts: np.ndarray, p: float) -> np.ndarray:
    bn = _row_block_norms(m, starts)
    scale = bn.max(axis=1, keepdims=True)
    scale[scale == 0.0] = 1.0
    return (scale[:, 0]) * np.sum((bn / scale) ** p, axis=1) ** (1.0 / p)


def brute_force_norm(op: BlockBandedOperator, samples: int = 4096,
                     seed: int = 0, polish: int = 12) -> float:
    """Quasi-random sphere search for the norm; dimensions up to 12 only."""
    n = op.space.dim
    if n > 12:
        raise ValueError("brute force search is capped at dimension 12")
    a = np.asarray(op.dense)
    ah = a.conj().T
    starts = op.space.starts
    p = op.space.p

    sob = qmc.Sobol(d=2 * n, scramble=True, seed=np.random.default_rng([seed, 77]))
    u = np.clip(sob.random(samples), 1e-12, 1.0 - 1e-12)
    z = scipy.stats.norm.ppf(u)
    xs = z[:, :n] + 1j * z[:, n:]
    denom = _row_mixed_norms(xs, starts, p)
    keep = denom > 0
    xs, denom = xs[keep], denom[keep]
    num = _row_mixed_norms(xs @ a.T, starts, p)
    ratios = num / denom
    best = float(ratios.max())

    def neg_ratio_grad(uvec):
        x = uvec[:n] + 1j * uvec[n:]
        bnx = np.sqrt(np.add.reduceat(x.real**2 + x.imag**2, starts[:-1]))
        nx = float(np.sum(bnx**p)) ** (1.0 / p)
        if nx == 0.0:
            return 0.0, np.zeros(2 * n)
        y = a @ x
        bny = np.sqrt(np.add.reduceat(y.real**2 + y.imag**2, starts[:-1]))
        ny = float(np.sum(bny**p)) ** (1.0 / p)
        sizes = np.diff(starts)
        with np.errstate(divide="ignore", invalid="ignore"):
            wy = np.where(bny > 0, bny ** (p - 2.0), 0.0) * ny ** (1.0 - p)
            wx = np.where(bnx > 0, bnx ** (p - 2.0), 0.0) * nx ** (1.0 - p)
        grad_num = ah @ (np.repeat(wy, sizes) * y)
        grad_den = np.repeat(wx, sizes) * x
        g = (grad_num * nx - ny * grad_den) / (nx * nx)
        return -ny / nx, -np.concatenate([g.real, g.imag])

    order = np.argsort(ratios)[::-1][:polish]
    for idx in order:
        x0 = xs[idx] / denom[idx]
        res = scipy.optimize.minimize(
            neg_ratio_grad,
            np.concatenate([x0.real, x0.imag]),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 300},
        )
        if -res.fun > best:
            best = float(-res.fun)
    return best
