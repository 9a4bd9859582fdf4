"""Finite mixed-norm sequence spaces.

A space is an ell^p sum of consecutive Euclidean blocks: coordinates
(x_1, ..., x_N) are split at cut points 0 = r_1 < r_2 < ... < r_L = N and

    ||x|| = ( sum_k ||x^(k)||_2^p )^(1/p),

where x^(k) is the slice between consecutive cuts.  With p = 2 this is the
plain Euclidean norm; with unit cuts it is the plain ell^p norm.  Blocks are
indexed 1..nblocks to keep "block 0" free for the zero projection.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _core


@dataclass(frozen=True)
class SpaceSpec:
    """Exponent plus the cut points delimiting the Euclidean blocks."""

    p: float
    cuts: tuple[int, ...]

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p <= 1.0:
            raise ValueError(f"exponent must be a finite number > 1, got {self.p}")
        cuts = tuple(int(c) for c in self.cuts)
        if len(cuts) < 2:
            raise ValueError("need at least two cut points")
        if cuts[0] != 0:
            raise ValueError(f"first cut must be 0, got {cuts[0]}")
        for a, b in zip(cuts, cuts[1:]):
            if b <= a:
                raise ValueError(f"cuts must be strictly increasing, got {a} -> {b}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "cuts", cuts)

    @property
    def dim(self) -> int:
        return self.cuts[-1]

    @property
    def nblocks(self) -> int:
        return len(self.cuts) - 1

    @cached_property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.cuts, self.cuts[1:]))

    @cached_property
    def starts(self) -> np.ndarray:
        """Cut points as an int64 array, the form the kernels consume."""
        a = np.asarray(self.cuts, dtype=np.int64)
        a.setflags(write=False)
        return a

    @property
    def dual_exponent(self) -> float:
        return self.p / (self.p - 1.0)

    def dual(self) -> "SpaceSpec":
        return SpaceSpec(self.dual_exponent, self.cuts)

    def with_exponent(self, p: float) -> "SpaceSpec":
        return SpaceSpec(p, self.cuts)

    @staticmethod
    def unit(p: float, n: int) -> "SpaceSpec":
        """Unit cuts 0,1,...,n: every coordinate its own block."""
        if n < 1:
            raise ValueError("dimension must be positive")
        return SpaceSpec(p, tuple(range(n + 1)))

    def block_slice(self, k: int) -> slice:
        if not 1 <= k <= self.nblocks:
            raise ValueError(f"block index {k} outside 1..{self.nblocks}")
        return slice(self.cuts[k - 1], self.cuts[k])

    def block_of(self, j: int) -> int:
        """1-based index of the block containing coordinate j (0-based)."""
        if not 0 <= j < self.dim:
            raise ValueError(f"coordinate {j} outside 0..{self.dim - 1}")
        return int(np.searchsorted(self.starts, j, side="right"))

    def to_dict(self) -> dict:
        return {"p": self.p, "cuts": list(self.cuts)}

    @staticmethod
    def from_dict(d: dict) -> "SpaceSpec":
        return SpaceSpec(float(d["p"]), tuple(d["cuts"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def from_json(text: str) -> "SpaceSpec":
        return SpaceSpec.from_dict(json.loads(text))


@dataclass(frozen=True)
class MixedVector:
    """A vector bound to its space."""

    space: SpaceSpec
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError("entries must be one-dimensional")
        if arr.shape[0] != self.space.dim:
            raise ValueError(
                f"vector length {arr.shape[0]} does not match dim {self.space.dim}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def norm(self) -> float:
        return mixed_norm(self)


def mixed_norm(x: MixedVector) -> float:
    """The mixed ell^p(ell^2) norm of x."""
    return _core.mixed_norm(x.entries, x.space.starts, x.space.p)


def block_norms(x: MixedVector) -> np.ndarray:
    """Euclidean norms of the blocks of x, as a float array."""
    return _core.block_norms(x.entries, x.space.starts)


def duality_map(x: MixedVector) -> MixedVector:
    """Norming functional of a nonzero x, living in the dual space.

    Block k of x is scaled by ||x_k||_2^(p-2) / ||x||^(p-1); the result has
    unit dual norm and pairs with x to exactly ||x||.
    """
    if mixed_norm(x) == 0.0:
        raise ValueError("zero vector has no norming functional direction")
    scaled = _core.duality_scaled(x.entries, x.space.starts, x.space.p)
    return MixedVector(x.space.dual(), scaled)


def block_project(x: MixedVector, k: int) -> MixedVector:
    """Projection onto block k; k = 0 gives the zero vector."""
    if k == 0:
        return MixedVector(x.space, np.zeros(x.space.dim, dtype=np.complex128))
    sl = x.space.block_slice(k)
    out = np.zeros(x.space.dim, dtype=np.complex128)
    out[sl] = x.entries[sl]
    return MixedVector(x.space, out)


def prefix_project(x: MixedVector, r: int) -> MixedVector:
    """Projection onto the first r coordinates."""
    if not 0 <= r <= x.space.dim:
        raise ValueError(f"prefix length {r} outside 0..{x.space.dim}")
    out = np.zeros(x.space.dim, dtype=np.complex128)
    out[:r] = x.entries[:r]
    return MixedVector(x.space, out)


def pairing(f: MixedVector, x: MixedVector) -> complex:
    """Sesquilinear pairing <f, x> = sum conj(f_j) x_j."""
    if f.entries.shape != x.entries.shape:
        raise ValueError("pairing needs vectors of equal length")
    return complex(np.vdot(f.entries, x.entries))


def save_vectors_csv(path, vectors) -> None:
    """Write vectors as CSV rows of alternating re, im columns."""
    vectors = list(vectors)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for v in vectors:
            row = []
            for z in v.entries:
                row.append(f"{z.real:.17g}")
                row.append(f"{z.imag:.17g}")
            writer.writerow(row)


def load_vectors_csv(space: SpaceSpec, path) -> list[MixedVector]:
    """Read vectors written by save_vectors_csv, binding them to space."""
    out = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2 * space.dim:
                raise ValueError(
                    f"line {lineno}: expected {2 * space.dim} columns, got {len(row)}"
                )
            vals = np.asarray([float(c) for c in row], dtype=np.float64)
            out.append(MixedVector(space, vals[0::2] + 1j * vals[1::2]))
    return out
