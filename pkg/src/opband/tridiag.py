"""Cut-point selection and block-tridiagonal compression.

choose_cuts runs a greedy schedule: having fixed cuts r_1 < ... < r_(m-1),
the next cut r_m is the smallest r <= N such that for every matrix T_i with
i <= min(m, family size), both corner norms

    ||(I - P_r) T_i P_(r_(m-1))||   and   ||(I - P_r) T_i* P_(r_(m-1))||

fall below the schedule value eps_m (default 2^-(m+1)).  P_r is the
projection onto the first r coordinates.  Against the resulting cut
structure, every family member is within a summable tail of its
block-tridiagonal compression

    Gamma(T) = sum_k (Q_(k-1) + Q_k + Q_(k+1)) T Q_k,

which verify_tridiag_error checks column block by column block.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._numeric import corner_norm, spectral_norm_auto, spectral_norm_dense
from .blockop import BlockBandedOperator
from .space import SpaceSpec


def default_schedule(m: int) -> float:
    """Summable tail schedule 2^-(m+1) for the m-th cut."""
    return 2.0 ** -(m + 1)


class CutPlanExhausted(RuntimeError):
    """No admissible cut was found; carries the partial plan."""

    def __init__(self, plan: "CutPlan"):
        super().__init__(
            f"cut selection exhausted after {len(plan.cuts) - 1} cuts "
            f"(reached {plan.cuts[-1]})"
        )
        self.plan = plan


@dataclass(frozen=True)
class CutPlan:
    """Result of choose_cuts: the cuts plus the recorded tail bounds.

    tail_bounds maps (m, i) to the pair of achieved corner norms
    (for T_i and for T_i*) at the chosen cut r_m; schedule_values records
    the eps_m each step had to meet.  Step indices m start at 2 because
    r_1 = 0 is fixed.
    """

    cuts: tuple[int, ...]
    family_size: int
    tail_bounds: dict[tuple[int, int], tuple[float, float]]
    schedule_values: tuple[float, ...]
    exhausted: bool

    def space(self, p: float) -> SpaceSpec:
        return SpaceSpec(p, self.cuts)

    def to_dict(self) -> dict:
        return {
            "cuts": list(self.cuts),
            "family_size": self.family_size,
            "tail_bounds": {
                f"{m},{i}": [t, ts] for (m, i), (t, ts) in sorted(self.tail_bounds.items())
            },
            "schedule_values": list(self.schedule_values),
            "exhausted": self.exhausted,
        }

    @staticmethod
    def from_dict(d: dict) -> "CutPlan":
        bounds = {}
        for key, (t, ts) in d["tail_bounds"].items():
            m_s, i_s = key.split(",")
            bounds[(int(m_s), int(i_s))] = (float(t), float(ts))
        return CutPlan(
            tuple(d["cuts"]),
            int(d["family_size"]),
            bounds,
            tuple(d["schedule_values"]),
            bool(d["exhausted"]),
        )


def save_plan(plan: CutPlan, path) -> None:
    with open(path, "w") as fh:
        json.dump(plan.to_dict(), fh, indent=1, sort_keys=True)


def load_plan(path) -> CutPlan:
    with open(path) as fh:
        return CutPlan.from_dict(json.load(fh))


def _as_family(family) -> list[np.ndarray]:
    mats = [np.asarray(t, dtype=np.complex128) for t in family]
    if not mats:
        raise ValueError("family must contain at least one matrix")
    n = mats[0].shape[0]
    for t in mats:
        if t.ndim != 2 or t.shape != (n, n):
            raise ValueError("family members must be square matrices of equal size")
    return mats


def choose_cuts(family: Sequence[np.ndarray],
                schedule: Callable[[int], float] | None = None) -> CutPlan:
    """Greedy minimal cut points for a finite family of matrices.

    The m-th step constrains only the first min(m, len(family)) matrices, so
    late family members never stall the early coarse cuts.  Each chosen cut
    is minimal: r_m - 1 violates at least one constraint whenever
    r_m > r_(m-1) + 1.
    """
    mats = _as_family(family)
    adjs = [t.conj().T for t in mats]
    n = mats[0].shape[0]
    sched = schedule or default_schedule

    cuts = [0]
    bounds: dict[tuple[int, int], tuple[float, float]] = {}
    schedule_values: list[float] = []
    exhausted = False
    m = 2
    while cuts[-1] < n:
        r_prev = cuts[-1]
        eps = float(sched(m))
        active = range(1, min(m, len(mats)) + 1)

        def ok(r: int) -> bool:
            for i in active:
                if corner_norm(mats[i - 1], r, r_prev) > eps:
                    return False
                if corner_norm(adjs[i - 1], r, r_prev) > eps:
                    return False
            return True

        lo = r_prev + 1
        if ok(lo):
            r = lo
        elif not ok(n):
            # defensively kept: an empty corner always satisfies eps >= 0
            exhausted = True
            break
        else:
            bad, good = lo, n
            while good - bad > 1:
                mid = (bad + good) // 2
                if ok(mid):
                    good = mid
                else:
                    bad = mid
            r = good
        for i in active:
            bounds[(m, i)] = (
                corner_norm(mats[i - 1], r, r_prev),
                corner_norm(adjs[i - 1], r, r_prev),
            )
        schedule_values.append(eps)
        cuts.append(r)
        m += 1

    return CutPlan(tuple(cuts), len(mats), bounds, tuple(schedule_values), exhausted)


def compress(t: np.ndarray, plan: CutPlan, p: float = 2.0
             ) -> tuple[BlockBandedOperator, float]:
    """Block-tridiagonal part of t against the plan's cuts, plus the residual.

    Returns (gamma, residual_norm) where residual_norm is the spectral norm
    of t - gamma, measuring everything the compression dropped.
    """
    t = np.asarray(t, dtype=np.complex128)
    space = plan.space(p)
    if t.shape != (space.dim, space.dim):
        raise ValueError(
            f"matrix shape {t.shape} does not match plan dimension {space.dim}"
        )
    nb = space.nblocks
    band = min(1, nb - 1)
    blocks = {}
    for k in range(1, nb + 1):
        for i in range(max(1, k - band), min(nb, k + band) + 1):
            blocks[(i, k)] = t[space.block_slice(i), space.block_slice(k)]
    gamma = BlockBandedOperator(space, band, blocks)
    residual = t - gamma.dense
    return gamma, spectral_norm_auto(residual)


class TridiagCheck(NamedTuple):
    k: int
    value: float
    bound: float
    passed: bool


def verify_tridiag_error(t: np.ndarray, i: int, plan: CutPlan
                         ) -> list[TridiagCheck]:
    """Column-block residuals of the compression of the i-th family member.

    For each k with i <= k <= nblocks - 1, computes
    ||(I - (Q_(k-1) + Q_k + Q_(k+1))) T Q_k|| and compares it to 2^-k.
    The greedy schedule guarantees the bound: the residual rows split into
    the part above the (k-1)-th cut and the part below the (k+2)-nd, each
    controlled by a recorded corner norm.
    """
    t = np.asarray(t, dtype=np.complex128)
    cuts = plan.cuts
    n = cuts[-1]
    if t.shape != (n, n):
        raise ValueError(f"matrix shape {t.shape} does not match plan dimension {n}")
    if i < 1:
        raise ValueError("family index i is 1-based")
    nb = len(cuts) - 1
    out = []
    for k in range(max(i, 1), nb):
        col = slice(cuts[k - 1], cuts[k])
        low = cuts[k - 2] if k >= 2 else 0
        high = cuts[k + 1]
        stacked = np.vstack([t[:low, col], t[high:, col]])
        value = spectral_norm_dense(stacked)
        bound = 2.0**-k
        out.append(TridiagCheck(k, value, bound, value <= bound + 1e-12))
    return out


@dataclass(frozen=True)
class TridiagReport:
    """Plan plus compressions and per-column residual profiles for a family."""

    plan: CutPlan
    compressed: tuple[BlockBandedOperator, ...]
    compression_residuals: tuple[float, ...]
    residual_profiles: dict[int, tuple[TridiagCheck, ...]]

    def all_within_bounds(self) -> bool:
        return all(
            c.passed for checks in self.residual_profiles.values() for c in checks
        )


def tridiagonalize_family(family: Sequence[np.ndarray],
                          schedule: Callable[[int], float] | None = None,
                          p: float = 2.0) -> TridiagReport:
    """choose_cuts + compress + verify for every family member."""
    mats = _as_family(family)
    plan = choose_cuts(mats, schedule)
    compressed = []
    residuals = []
    profiles = {}
    for i, t in enumerate(mats, start=1):
        gamma, res = compress(t, plan, p)
        compressed.append(gamma)
        residuals.append(res)
        profiles[i] = tuple(verify_tridiag_error(t, i, plan))
    return TridiagReport(plan, tuple(compressed), tuple(residuals), profiles)
