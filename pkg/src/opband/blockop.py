"""Banded block operators on mixed-norm spaces.

An operator here is a matrix of blocks T_(i,j) mapping block j of the space
to block i, with T_(i,j) = 0 whenever |i - j| > band.  The two structural
norm bounds used throughout:

    sup_(i,j) ||T_(i,j)||_2  <=  ||T||  <=  (2*band + 1) * sup_(i,j) ||T_(i,j)||_2,

and the sharper per-diagonal sum, since each block diagonal acts as a direct
sum: ||T|| <= sum_s sup_j ||T_(j+s,j)||_2 over s = -band..band.  Both hold
for every exponent p, which is what makes the block data reusable across
exponents (see transfer.rebind_exponent).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from ._numeric import spectral_norm_auto, spectral_norm_dense
from .space import MixedVector, SpaceSpec
from .symbols import LaurentPolynomial


@dataclass(frozen=True)
class BlockBandedOperator:
    """Block matrix with 1-based block indices and |i - j| <= band."""

    space: SpaceSpec
    band: int
    blocks: dict[tuple[int, int], np.ndarray] = field(repr=False)

    def __post_init__(self):
        band = int(self.band)
        nb = self.space.nblocks
        if not 0 <= band <= max(0, nb - 1):
            raise ValueError(f"band {band} outside 0..{nb - 1}")
        sizes = self.space.block_sizes
        clean = {}
        for (i, j), blk in self.blocks.items():
            if not (1 <= i <= nb and 1 <= j <= nb):
                raise ValueError(f"block index {(i, j)} outside 1..{nb}")
            if abs(i - j) > band:
                raise ValueError(f"block {(i, j)} violates band {band}")
            if (
                isinstance(blk, np.ndarray)
                and blk.dtype == np.complex128
                and not blk.flags.writeable
            ):
                arr = blk  # already frozen, safe to share (rebinding relies on this)
            else:
                arr = np.array(blk, dtype=np.complex128)
                arr.setflags(write=False)
            if arr.shape != (sizes[i - 1], sizes[j - 1]):
                raise ValueError(
                    f"block {(i, j)} has shape {arr.shape}, "
                    f"expected {(sizes[i - 1], sizes[j - 1])}"
                )
            clean[(int(i), int(j))] = arr
        object.__setattr__(self, "band", band)
        object.__setattr__(self, "blocks", clean)

    # -- assembled forms ---------------------------------------------------

    @cached_property
    def dense(self) -> np.ndarray:
        a = np.zeros((self.space.dim, self.space.dim), dtype=np.complex128)
        for (i, j), blk in self.blocks.items():
            a[self.space.block_slice(i), self.space.block_slice(j)] = blk
        a.setflags(write=False)
        return a

    @cached_property
    def csr(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.dense)

    @cached_property
    def csr_adjoint(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.dense.conj().T)

    # -- block norm bookkeeping --------------------------------------------

    @cached_property
    def block_norm_table(self) -> dict[tuple[int, int], float]:
        return {
            key: spectral_norm_dense(blk) for key, blk in self.blocks.items()
        }

    @cached_property
    def sup_block_norm(self) -> float:
        return max(self.block_norm_table.values(), default=0.0)

    # -- algebra -------------------------------------------------------------

    def apply(self, x: MixedVector) -> MixedVector:
        if x.space != self.space:
            raise ValueError("vector space does not match operator space")
        return MixedVector(self.space, self.csr.dot(x.entries))

    def adjoint(self) -> "BlockBandedOperator":
        """Adjoint operator; it acts on the dual-exponent space."""
        blocks = {
            (j, i): blk.conj().T.copy() for (i, j), blk in self.blocks.items()
        }
        return BlockBandedOperator(self.space.dual(), self.band, blocks)

    def compose(self, other: "BlockBandedOperator") -> "BlockBandedOperator":
        """self o other, bands add (capped at the structural maximum)."""
        if self.space != other.space:
            raise ValueError("cannot compose operators on different spaces")
        nb = self.space.nblocks
        band = min(self.band + other.band, max(0, nb - 1))
        blocks: dict[tuple[int, int], np.ndarray] = {}
        for (i, k), a in self.blocks.items():
            for dj in range(-other.band, other.band + 1):
                j = k + dj
                if not 1 <= j <= nb or abs(i - j) > band:
                    continue
                b = other.blocks.get((k, j))
                if b is None:
                    continue
                prod = a @ b
                if (i, j) in blocks:
                    blocks[(i, j)] = blocks[(i, j)] + prod
                else:
                    blocks[(i, j)] = prod
        return BlockBandedOperator(self.space, band, blocks)

    def __matmul__(self, other: "BlockBandedOperator") -> "BlockBandedOperator":
        return self.compose(other)

    def scaled(self, c: complex) -> "BlockBandedOperator":
        return BlockBandedOperator(
            self.space, self.band, {k: c * b for k, b in self.blocks.items()}
        )

    def __add__(self, other: "BlockBandedOperator") -> "BlockBandedOperator":
        if self.space != other.space:
            raise ValueError("cannot add operators on different spaces")
        blocks = {k: b.copy() for k, b in self.blocks.items()}
        for k, b in other.blocks.items():
            blocks[k] = blocks[k] + b if k in blocks else b
        return BlockBandedOperator(
            self.space, max(self.band, other.band), blocks
        )

    @staticmethod
    def identity(space: SpaceSpec) -> "BlockBandedOperator":
        blocks = {
            (k, k): np.eye(space.block_sizes[k - 1], dtype=np.complex128)
            for k in range(1, space.nblocks + 1)
        }
        return BlockBandedOperator(space, 0, blocks)


class NormSandwich(NamedTuple):
    lower: float
    upper: float
    witness: MixedVector


def norm_sandwich(op: BlockBandedOperator) -> NormSandwich:
    """Structural two-sided norm bound with a certifying witness.

    lower = sup of the block norms, attained up to rounding by embedding the
    top right singular vector of a maximizing block; upper = (2m+1) * lower.
    The witness has unit mixed norm, so its Rayleigh quotient is a genuine
    lower bound independent of the SVD.
    """
    out = np.zeros(op.space.dim, dtype=np.complex128)
    if not op.blocks or op.sup_block_norm == 0.0:
        out[0] = 1.0
        return NormSandwich(0.0, 0.0, MixedVector(op.space, out))
    (i, j) = max(op.block_norm_table, key=op.block_norm_table.get)
    _, _, vt = np.linalg.svd(op.blocks[(i, j)])
    v = vt[0].conj()
    out[op.space.block_slice(j)] = v
    lower = op.sup_block_norm
    return NormSandwich(
        lower, (2 * op.band + 1) * lower, MixedVector(op.space, out)
    )


def diagonal_sum_bound(op: BlockBandedOperator) -> float:
    """Upper bound sum_s sup_j ||T_(j+s,j)|| over the block diagonals."""
    table = op.block_norm_table
    total = 0.0
    for s in range(-op.band, op.band + 1):
        best = 0.0
        for (i, j), v in table.items():
            if i - j == s and v > best:
                best = v
        total += best
    return total


def from_dense(a: np.ndarray, space: SpaceSpec, band: int):
    """Keep the blocks within the band; report what was dropped.

    Returns (operator, discarded) where discarded is the spectral norm of
    the out-of-band residual, so callers can see what the truncation cost.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (space.dim, space.dim):
        raise ValueError(
            f"matrix shape {a.shape} does not match space dim {space.dim}"
        )
    nb = space.nblocks
    blocks = {}
    residual = a.copy()
    for i in range(1, nb + 1):
        for j in range(max(1, i - band), min(nb, i + band) + 1):
            si, sj = space.block_slice(i), space.block_slice(j)
            blocks[(i, j)] = a[si, sj]
            residual[si, sj] = 0.0
    op = BlockBandedOperator(space, band, blocks)
    return op, spectral_norm_auto(residual)


def toeplitz(f: LaurentPolynomial, space: SpaceSpec, max_band: int | None = None
             ) -> BlockBandedOperator:
    """Truncated Toeplitz matrix of the symbol f on the given cut structure.

    Entry (r, c) is the coefficient of w^(r-c); the band is the smallest m
    such that every occupied entry falls in a block pair with |i - j| <= m.
    Raises naming the required band when it exceeds max_band (default: the
    structural maximum nblocks - 1).
    """
    n = space.dim
    nb = space.nblocks
    cap = max(0, nb - 1) if max_band is None else int(max_band)
    d = f.degree
    # block index of each coordinate, then the worst boundary crossing
    blk = np.searchsorted(space.starts, np.arange(n), side="right")
    if d == 0 or n == 1:
        required = 0
    else:
        delta = min(d, n - 1)
        required = int((blk[delta:] - blk[: n - delta]).max())
    if required > cap:
        raise ValueError(
            f"symbol of degree {d} needs band {required} on this cut "
            f"structure, cap is {cap}"
        )
    table = np.zeros(2 * d + 1, dtype=np.complex128)
    for off, a in f.terms:
        table[off + d] = a
    blocks = {}
    idx = np.arange(n)
    for i in range(1, nb + 1):
        rows = idx[space.block_slice(i)]
        for j in range(max(1, i - required), min(nb, i + required) + 1):
            cols = idx[space.block_slice(j)]
            offs = rows[:, None] - cols[None, :]
            inside = np.abs(offs) <= d
            blk_arr = np.where(inside, table[np.where(inside, offs + d, 0)], 0.0)
            blocks[(i, j)] = blk_arr.astype(np.complex128)
    return BlockBandedOperator(space, required, blocks)


def forward_shift_matrix(n: int) -> np.ndarray:
    """Truncation of the shift e_j -> e_(j+1): ones on the subdiagonal."""
    return np.eye(n, k=-1, dtype=np.complex128)


def backward_shift_matrix(n: int) -> np.ndarray:
    """Adjoint shift e_j -> e_(j-1): ones on the superdiagonal."""
    return np.eye(n, k=1, dtype=np.complex128)


# -- serialization ----------------------------------------------------------


def operator_to_dict(op: BlockBandedOperator) -> dict:
    payload = {}
    for (i, j), blk in sorted(op.blocks.items()):
        payload[f"{i},{j}"] = {
            "re": blk.real.tolist(),
            "im": blk.imag.tolist(),
        }
    return {"space": op.space.to_dict(), "band": op.band, "blocks": payload}


def operator_from_dict(d: dict) -> BlockBandedOperator:
    space = SpaceSpec.from_dict(d["space"])
    blocks = {}
    for key, blk in d["blocks"].items():
        i_s, j_s = key.split(",")
        blocks[(int(i_s), int(j_s))] = np.asarray(blk["re"]) + 1j * np.asarray(
            blk["im"]
        )
    return BlockBandedOperator(space, int(d["band"]), blocks)


def save_operator(op: BlockBandedOperator, path) -> None:
    with open(path, "w") as fh:
        json.dump(operator_to_dict(op), fh, indent=1, sort_keys=True)


def load_operator(path) -> BlockBandedOperator:
    with open(path) as fh:
        return operator_from_dict(json.load(fh))


def save_dense_csv(op: BlockBandedOperator, path) -> None:
    """Dense export, one matrix row per line with alternating re, im columns."""
    a = op.dense
    with open(path, "w") as fh:
        for row in a:
            cells = []
            for z in row:
                cells.append(f"{z.real:.17g}")
                cells.append(f"{z.imag:.17g}")
            fh.write(",".join(cells) + "\n")
