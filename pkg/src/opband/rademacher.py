"""Rademacher embeddings of Euclidean space into plain ell^p.

The n Rademacher functions on 2^n sign choices form an n x 2^n sign matrix
S with S[i, t] = +1 when bit i of t is 0 and -1 otherwise.  The embedding

    (J x)(t) = 2^(-n/p) * sum_i x_i S[i, t]

carries ||J x||_p^p = E |sum_i x_i eps_i|^p over uniform signs, so the
Khintchine inequalities say J is an isomorphism onto its image with
constants depending only on p; the companion projection

    (P y)_i = 2^(n/p - n) * sum_t y(t) S[i, t]

satisfies P o J = identity exactly (the functions are orthogonal), and
J o P is a bounded projection onto the embedded copy.  measure_constants
estimates the extreme ratios and the projection norm numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RademacherSystem:
    """Sign matrix of the first n Rademacher functions, bound to exponent p."""

    n: int
    p: float
    sign_matrix: np.ndarray

    @staticmethod
    def make(n: int, p: float) -> "RademacherSystem":
        if not 1 <= n <= 20:
            raise ValueError("system size n must be in 1..20")
        if p <= 1.0:
            raise ValueError("exponent must exceed 1")
        t = np.arange(1 << n)
        rows = [1.0 - 2.0 * ((t >> i) & 1) for i in range(n)]
        signs = np.asarray(rows, dtype=np.float64)
        signs.setflags(write=False)
        return RademacherSystem(n, float(p), signs)


def embed(system: RademacherSystem, x: np.ndarray) -> np.ndarray:
    """J x as a vector over all 2^n sign patterns."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (system.n,):
        raise ValueError(f"expected a vector of length {system.n}, got {x.shape}")
    scale = 2.0 ** (-system.n / system.p)
    return scale * (x @ system.sign_matrix)


def project(system: RademacherSystem, y: np.ndarray) -> np.ndarray:
    """P y, the coordinates of the embedded copy nearest to y."""
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (1 << system.n,):
        raise ValueError(
            f"expected a vector of length {1 << system.n}, got {y.shape}"
        )
    scale = 2.0 ** (system.n / system.p - system.n)
    return scale * (system.sign_matrix @ y)


def _plain_pnorm(y: np.ndarray, p: float) -> float:
    m = float(np.abs(y).max(initial=0.0))
    if m == 0.0:
        return 0.0
    return m * float(np.sum((np.abs(y) / m) ** p)) ** (1.0 / p)


def _embed_ratio_and_grad(system: RademacherSystem, x: np.ndarray
                          ) -> tuple[float, np.ndarray]:
    """Ratio ||J x||_p / ||x||_2 and its complex gradient."""
    s = system.sign_matrix
    p = system.p
    y = x @ s
    scale = 2.0**-system.n
    ay = np.abs(y)
    m = float((scale * ay**p).sum()) ** (1.0 / p)
    nx = float(np.linalg.norm(x))
    if m == 0.0 or nx == 0.0:
        return 0.0, np.zeros_like(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(ay > 0, ay ** (p - 2.0), 0.0)
    grad_m = m ** (1.0 - p) * scale * (s @ (w * y))
    grad_n = x / nx
    ratio = m / nx
    return ratio, (grad_m * nx - m * grad_n) / (nx * nx)


def _optimize_ratio(system: RademacherSystem, maximize: bool, restarts: int,
                    iters: int, seed: int) -> float:
    n = system.n
    rng = np.random.default_rng([seed, 911 if maximize else 912])
    seeds = [
        np.ones(n, dtype=np.complex128) / np.sqrt(n),
        np.eye(n, dtype=np.complex128)[0],
    ]
    alt = np.array([1.0 if i % 2 == 0 else 1.0j for i in range(n)])
    seeds.append(alt / np.linalg.norm(alt))
    while len(seeds) < restarts:
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        seeds.append(z / np.linalg.norm(z))

    sign = 1.0 if maximize else -1.0
    best = None
    for x in seeds:
        x = x.copy()
        eta = 0.3
        r, g = _embed_ratio_and_grad(system, x)
        for _ in range(iters):
            stepped = False
            for _ in range(6):
                trial = x + sign * eta * g
                tn = np.linalg.norm(trial)
                if tn == 0.0:
                    break
                trial /= tn
                rt, gt = _embed_ratio_and_grad(system, trial)
                if sign * rt > sign * r:
                    x, r, g = trial, rt, gt
                    eta *= 1.4
                    stepped = True
                    break
                eta *= 0.4
            if not stepped:
                break
        if best is None or sign * r > sign * best:
            best = r
    return float(best)


def _projection_norm(system: RademacherSystem, restarts: int, iters: int,
                     seed: int) -> float:
    """Norm of J o P on ell^p(2^n) by a duality-map power iteration.

    The operator is applied in factored form (rank n), never densified.
    """
    s = system.sign_matrix
    p = system.p
    q = p / (p - 1.0)
    m = 1 << system.n
    scale = 2.0**-system.n

    def apply(y):
        return scale * ((s @ y) @ s)

    def duality(y, expo):
        ay = np.abs(y)
        total = _plain_pnorm(y, expo)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(ay > 0, (ay / total) ** (expo - 2.0), 0.0) / total
        return w * y

    rng = np.random.default_rng([seed, 913])
    seeds = [s[0].astype(np.complex128), np.ones(m, dtype=np.complex128)]
    while len(seeds) < restarts:
        seeds.append(rng.standard_normal(m) + 1j * rng.standard_normal(m))

    best = 0.0
    for x in seeds:
        nx = _plain_pnorm(x, p)
        if nx == 0.0:
            continue
        x = x / nx
        prev = -1.0
        for _ in range(iters):
            y = apply(x)
            ny = _plain_pnorm(y, p)
            if ny == 0.0:
                break
            if ny > best:
                best = ny
            if prev >= 0.0 and abs(ny - prev) <= 1e-13 * max(ny, 1.0):
                break
            prev = ny
            g = apply(duality(y, p))  # the factored operator is self-adjoint
            ng = _plain_pnorm(g, q)
            if ng == 0.0:
                break
            x = duality(g, q)
        # replay the final iterate as well
        y = apply(x)
        ny = _plain_pnorm(y, p)
        if ny > best:
            best = ny
    return float(best)


@dataclass(frozen=True)
class EmbeddingConstants:
    """Measured extremes of the embedding and the projection norm."""

    n: int
    p: float
    lower_embed: float
    upper_embed: float
    projection_norm: float


def measure_constants(n: int, p: float, restarts: int = 8, iters: int = 300,
                      seed: int = 0) -> EmbeddingConstants:
    """Numerically measured Khintchine-type constants at size n, exponent p.

    lower_embed and upper_embed bracket ||J x||_p / ||x||_2 over the complex
    unit sphere; projection_norm measures J o P on ell^p(2^n).  Sizes above
    14 are refused (the search space has 2^n atoms).
    """
    if not 1 <= n <= 14:
        raise ValueError("constants measurement is capped at n = 14")
    system = RademacherSystem.make(n, p)
    upper = _optimize_ratio(system, True, restarts, iters, seed)
    lower = _optimize_ratio(system, False, restarts, iters, seed)
    proj = _projection_norm(system, restarts, iters, seed)
    return EmbeddingConstants(n, float(p), lower, upper, proj)
