"""Winding numbers, truncated Fredholm indices, and index-constant paths.

For a symbol f invertible on the unit circle, the Fredholm index of its
Toeplitz operator is minus the winding number of f.  Truncations cannot see
the index directly (square sections always have dim ker = dim coker), so
truncation_index reads it from a rectangular section: dropping the last
`band` block-columns leaves exactly the columns whose kernel vectors survive
any banded extension, and the same window applied to the adjoint counts the
cokernel.  A singular-value gap check guards against reading noise as kernel
dimensions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .blockop import BlockBandedOperator, toeplitz
from .space import SpaceSpec
from .symbols import LaurentPolynomial


def winding(f: LaurentPolynomial, grid: int = 4096, max_grid: int = 1 << 22) -> int:
    """Winding number of f around 0, by summed argument increments.

    The grid is doubled until every increment is safely below pi, which for a
    closed loop makes the sum an exact multiple of 2*pi.  Raises if f is not
    invertible on the circle (min modulus below 1e-9).
    """
    g = int(grid)
    while True:
        vals = f.on_grid(g)
        mods = np.abs(vals)
        mmin = float(mods.min()) if vals.size else 0.0
        if mmin <= 1e-9:
            raise ValueError(
                f"symbol is not invertible on the circle (min modulus {mmin:.3e})"
            )
        steps = np.angle(np.roll(vals, -1) / vals)
        if np.abs(steps).max() < 0.9 * np.pi:
            total = float(steps.sum()) / (2.0 * np.pi)
            w = round(total)
            if abs(total - w) > 1e-6:
                raise ValueError(
                    f"winding sum {total} is not close to an integer"
                )
            return int(w)
        if g >= max_grid:
            raise ValueError("cannot resolve winding number on any refined grid")
        g *= 2


@dataclass(frozen=True)
class TruncationIndexResult:
    """Kernel minus cokernel count of a rectangular section, with gap data."""

    index: int | None
    kernel_dim: int
    cokernel_dim: int
    converged: bool
    gap: float
    near_zero_kernel: tuple[float, ...]
    near_zero_cokernel: tuple[float, ...]


def _window_kernel_count(svals: np.ndarray, threshold: float
                         ) -> tuple[int, float, tuple[float, ...]]:
    zeros = svals[svals < threshold]
    kept = svals[svals >= threshold]
    largest_zero = float(zeros.max()) if zeros.size else 0.0
    smallest_kept = float(kept.min()) if kept.size else np.inf
    gap = smallest_kept / max(largest_zero, threshold)
    return int(zeros.size), gap, tuple(float(s) for s in np.sort(zeros))


def truncation_index(op: BlockBandedOperator, threshold: float = 1e-6
                     ) -> TruncationIndexResult:
    """Index estimate from rectangular sections of op and its adjoint.

    Both sections drop the trailing `band` block-columns.  If either side
    fails the 100x singular-value gap check the result is flagged
    non-converged and index is None.
    """
    space = op.space
    nb = space.nblocks
    if nb - op.band < 1:
        return TruncationIndexResult(None, 0, 0, False, 0.0, (), ())
    q = space.cuts[nb - op.band]
    a = op.dense
    svals_k = np.linalg.svd(a[:, :q], compute_uv=False)
    svals_c = np.linalg.svd(a[:q, :].conj().T, compute_uv=False)
    kdim, gap_k, near_k = _window_kernel_count(svals_k, threshold)
    cdim, gap_c, near_c = _window_kernel_count(svals_c, threshold)
    gap = min(gap_k, gap_c)
    converged = gap >= 100.0
    index = kdim - cdim if converged else None
    return TruncationIndexResult(index, kdim, cdim, converged, gap, near_k, near_c)


@dataclass(frozen=True)
class IndexReport:
    """Side-by-side symbol index and truncated index for one symbol."""

    symbol_tokens: tuple[str, ...]
    winding_index: int
    truncation_index: int | None
    agree: bool
    gap: float
    singular_values_near_zero: dict[str, tuple[float, ...]]

    def to_dict(self) -> dict:
        return {
            "symbol": list(self.symbol_tokens),
            "winding_index": self.winding_index,
            "truncation_index": self.truncation_index,
            "agree": self.agree,
            "gap": self.gap,
            "singular_values_near_zero": {
                side: list(vals)
                for side, vals in self.singular_values_near_zero.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def index_report(f: LaurentPolynomial, n: int = 128, grid: int = 4096,
                 threshold: float = 1e-6,
                 op: BlockBandedOperator | None = None) -> IndexReport:
    """Compare -winding(f) with the truncated index at size n.

    winding_index is the Fredholm index of the Toeplitz operator, i.e.
    minus the winding number of the symbol.  Pass op to score a specific
    realization (for instance a compressed or rebound one) instead of the
    plain unit-cut truncation.
    """
    w = winding(f, grid)
    if op is None:
        op = toeplitz(f, SpaceSpec.unit(2.0, n))
    trunc = truncation_index(op, threshold)
    agree = trunc.converged and trunc.index == -w
    return IndexReport(
        tuple(f.to_tokens()),
        -w,
        trunc.index,
        agree,
        trunc.gap,
        {"kernel": trunc.near_zero_kernel, "cokernel": trunc.near_zero_cokernel},
    )


# -- paths of symbols ---------------------------------------------------------


class PathRejected(ValueError):
    """A symbol path failed invertibility certification at parameter t."""

    def __init__(self, t: float, reason: str):
        super().__init__(f"path rejected at t = {t:.6g}: {reason}")
        self.t = t
        self.reason = reason


@dataclass(frozen=True)
class SymbolPath:
    """Coefficientwise linear interpolation between two symbols."""

    start: LaurentPolynomial
    end: LaurentPolynomial
    steps: int = 17

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError("a path needs at least two steps")

    def at(self, t: float) -> LaurentPolynomial:
        acc = {n: (1.0 - t) * a for n, a in self.start.terms}
        for n, a in self.end.terms:
            acc[n] = acc.get(n, 0.0) + t * a
        return LaurentPolynomial.from_coeffs(acc)

    def parameters(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.steps)


@dataclass(frozen=True)
class PathConstancy:
    constant: bool
    indices: tuple[int, ...]
    parameters: tuple[float, ...]


def path_index_constancy(path: SymbolPath, grid: int = 1024,
                         min_modulus: float = 1e-9,
                         max_depth: int = 48) -> PathConstancy:
    """Certify that the winding number is constant along the path.

    Adjacent parameters are accepted once sup |f_t2 - f_t1| on the circle is
    strictly below both minimum moduli (then the two symbols wind equally);
    otherwise the interval is bisected.  Vanishing or uncertifiable spots
    raise PathRejected with the offending parameter.
    """

    def values(t: float) -> np.ndarray:
        vals = path.at(t).on_grid(grid)
        if vals.size == 0 or float(np.abs(vals).min()) <= min_modulus:
            raise PathRejected(t, "symbol vanishes on the circle")
        return vals

    def certify(t1: float, v1: np.ndarray, t2: float, v2: np.ndarray,
                depth: int) -> None:
        diff = float(np.abs(v2 - v1).max())
        margin = min(float(np.abs(v1).min()), float(np.abs(v2).min()))
        if diff < margin:
            return
        if depth <= 0:
            raise PathRejected(
                0.5 * (t1 + t2), "cannot certify invertibility on the segment"
            )
        tm = 0.5 * (t1 + t2)
        vm = values(tm)
        certify(t1, v1, tm, vm, depth - 1)
        certify(tm, vm, t2, v2, depth - 1)

    ts = path.parameters()
    vals = [values(float(t)) for t in ts]
    for (t1, v1), (t2, v2) in zip(zip(ts, vals), zip(ts[1:], vals[1:])):
        certify(float(t1), v1, float(t2), v2, max_depth)
    indices = tuple(-winding(path.at(float(t)), grid) for t in ts)
    return PathConstancy(len(set(indices)) == 1, indices, tuple(float(t) for t in ts))
