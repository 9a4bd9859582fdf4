"""Reinterpreting block data across exponents, and the experiments built on it.

A banded block operator is stored as raw block matrices; rebind_exponent
reattaches identical blocks to the same cut structure with a different
exponent.  The numbers do not move, only the norm does, and by the
structural sandwich the distortion is at most (2*band + 1) in either
direction.  The experiment drivers chain the full pipeline: choose cuts for
a symbol family, compress to block-tridiagonal form, rebind, and compare
windowed (essential-norm style) estimates and indices across exponents.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .blockop import (
    BlockBandedOperator,
    backward_shift_matrix,
    forward_shift_matrix,
    toeplitz,
)
from .fredholm import truncation_index, winding
from .pnorm import NormBudget, NormEstimate, estimate_norm
from .space import SpaceSpec
from .symbols import LaurentPolynomial
from .tridiag import CutPlan, CutPlanExhausted, choose_cuts, compress


def rebind_exponent(op: BlockBandedOperator, p: float) -> BlockBandedOperator:
    """The same blocks on the same cuts, read in exponent p.

    Block data is shared, not copied: the transfer is exactly multiplicative
    and changes no numeric content.
    """
    return BlockBandedOperator(op.space.with_exponent(p), op.band, op.blocks)


def windowed(op: BlockBandedOperator, window: int) -> BlockBandedOperator:
    """Drop every block row and column up to the window index.

    Keeps only blocks (i, j) with i > window and j > window, which is the
    compression to the tail complement of the first `window` blocks.
    """
    nb = op.space.nblocks
    if not 0 <= window < nb:
        raise ValueError(f"window {window} outside 0..{nb - 1}")
    blocks = {
        (i, j): blk
        for (i, j), blk in op.blocks.items()
        if i > window and j > window
    }
    return BlockBandedOperator(op.space, op.band, blocks)


def essential_norm_proxy(op: BlockBandedOperator, window: int,
                         budget: NormBudget | None = None) -> float:
    """Certified lower bound for the norm of the tail-windowed operator.

    As the window grows this forgets any fixed finite-rank part, so it plays
    the role of an essential-norm reading at finite truncation.
    """
    return estimate_norm(windowed(op, window), budget).lower


def window_blocks(plan_or_space, max_entries: float) -> int:
    """Number of leading blocks wholly inside the first max_entries entries."""
    cuts = plan_or_space.cuts
    wb = bisect_right(cuts, max_entries) - 1
    return max(0, min(wb, len(cuts) - 2))


@dataclass(frozen=True)
class TransferResult:
    """Windowed norm of one compressed symbol before and after rebinding."""

    source_norm: NormEstimate
    target_norm: NormEstimate
    band: int
    ratio_lower: float
    ratio_upper: float


class TransferBoundError(AssertionError):
    """A rebound norm escaped the (2*band+1)-distortion interval."""


def run_transfer_pipeline(family, n: int, p: float,
                          budget: NormBudget | None = None,
                          window_frac: float = 0.25,
                          tol: float = 0.05) -> list[TransferResult]:
    """Compress each symbol against shared cuts and rebind from 2 to p.

    The cut plan is chosen for the shift, its adjoint, and every symbol
    matrix; each compression is windowed to the tail beyond window_frac * n
    entries and measured at exponent 2 and at p.  Ratios outside
    [1/(2m+1) - tol, (2m+1) + tol] raise TransferBoundError; the structural
    sandwich guarantees that interval, so a violation means a broken build.
    """
    family = list(family)
    if not family:
        raise ValueError("need at least one symbol")
    mats = [forward_shift_matrix(n), backward_shift_matrix(n)]
    mats += [toeplitz(f, SpaceSpec.unit(2.0, n)).dense for f in family]
    plan = choose_cuts(mats)
    if plan.exhausted:
        raise CutPlanExhausted(plan)
    wb = window_blocks(plan, window_frac * n)
    out = []
    for pos, f in enumerate(family):
        gamma, _ = compress(mats[2 + pos], plan, p=2.0)
        rebound = rebind_exponent(gamma, p)
        source = estimate_norm(windowed(gamma, wb), budget)
        target = estimate_norm(windowed(rebound, wb), budget)
        width = 2 * gamma.band + 1
        ratio_lower = target.lower / max(source.upper, 1e-300)
        ratio_upper = target.upper / max(source.lower, 1e-300)
        if ratio_upper < 1.0 / width - tol or ratio_lower > width + tol:
            raise TransferBoundError(
                f"symbol {f.to_tokens()} transferred with ratio interval "
                f"[{ratio_lower:.4g}, {ratio_upper:.4g}] outside the "
                f"width-{width} sandwich"
            )
        out.append(
            TransferResult(source, target, gamma.band, ratio_lower, ratio_upper)
        )
    return out


@dataclass(frozen=True)
class CalculusExperiment:
    """Everything the transfer experiment measures for one symbol."""

    f: LaurentPolynomial
    sup_circle: float
    plan: CutPlan
    window: int
    transferred_norm: NormEstimate
    source_norm: NormEstimate
    plain_shift_norm: NormEstimate
    compression_residual: float
    index_expected: int | None
    index_observed: int | None


def run_calculus_experiment(f: LaurentPolynomial, n: int, p: float,
                            budget: NormBudget | None = None,
                            window_frac: float = 0.25,
                            plain_n: int | None = None,
                            grid: int = 4096) -> CalculusExperiment:
    """Full pipeline for one symbol.

    Chooses cuts for (shift, adjoint shift, T_f), compresses T_f against
    them, rebinds to exponent p, and measures: the tail-windowed norm at 2
    and at p, the norm of the plain unit-cut truncation of f at p (size
    plain_n, default n), and the expected versus observed index.  Index
    fields are None when the symbol is not invertible on the circle or the
    truncated index fails its gap check.
    """
    a_f = toeplitz(f, SpaceSpec.unit(2.0, n)).dense
    plan = choose_cuts(
        [forward_shift_matrix(n), backward_shift_matrix(n), a_f]
    )
    if plan.exhausted:
        raise CutPlanExhausted(plan)
    gamma, residual = compress(a_f, plan, p=2.0)
    rebound = rebind_exponent(gamma, p)
    wb = window_blocks(plan, window_frac * n)
    source_norm = estimate_norm(windowed(gamma, wb), budget)
    transferred_norm = estimate_norm(windowed(rebound, wb), budget)

    pn = n if plain_n is None else plain_n
    plain = toeplitz(f, SpaceSpec.unit(p, pn))
    plain_shift_norm = estimate_norm(plain, budget)

    try:
        index_expected = -winding(f, grid)
    except ValueError:
        index_expected = None
    observed = truncation_index(rebound)
    index_observed = observed.index if observed.converged else None

    return CalculusExperiment(
        f=f,
        sup_circle=f.sup_circle(grid),
        plan=plan,
        window=wb,
        transferred_norm=transferred_norm,
        source_norm=source_norm,
        plain_shift_norm=plain_shift_norm,
        compression_residual=residual,
        index_expected=index_expected,
        index_observed=index_observed,
    )
