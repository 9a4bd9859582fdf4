"""Compare the compiled kernel lane against the numpy fallback.

Times the duality-map power iteration (the hot loop behind estimate_norm)
and the three small per-iterate kernels on operators of growing size.  Run
from the repository root:

    python3 benchmarks/bench_kernels.py --sizes 64,256,1024

Exits cleanly with a note when the compiled extension is not importable.
"""

import argparse
import time

import numpy as np

from opband import SpaceSpec, toeplitz
from opband._core import _csr_parts, _kernels_py
from opband.symbols import random_laurent

try:
    from opband._core import _kernels as compiled
except ImportError:
    compiled = None


def make_case(n, seed):
    rng = np.random.default_rng([seed, n])
    space = SpaceSpec(3.0, tuple(range(0, n + 1, 4)))
    op = toeplitz(random_laurent(rng, 3), space)
    x0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return space, op, np.ascontiguousarray(x0, dtype=np.complex128)


def time_call(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_power(space, op, x0, iters, repeats):
    starts = space.starts
    py = time_call(
        lambda: _kernels_py.power_iteration(
            op.csr, op.csr_adjoint, starts, space.p, x0, iters, 0.0
        ),
        repeats,
    )
    if compiled is None:
        return py, None
    ad, ai, ap = _csr_parts(op.csr)
    hd, hi, hp = _csr_parts(op.csr_adjoint)
    cy = time_call(
        lambda: compiled.power_iteration(
            ad, ai, ap, hd, hi, hp, starts, space.p, x0, iters, 0.0
        ),
        repeats,
    )
    return py, cy


def bench_small(space, x0, repeats):
    starts = space.starts
    out = {}
    for name in ("block_norms", "mixed_norm", "duality_scaled"):
        args = (x0, starts) if name == "block_norms" else (x0, starts, space.p)
        py = time_call(lambda: getattr(_kernels_py, name)(*args), repeats)
        cy = (
            time_call(lambda: getattr(compiled, name)(*args), repeats)
            if compiled is not None
            else None
        )
        out[name] = (py, cy)
    return out


def fmt_us(seconds):
    return f"{seconds * 1e6:14.1f}"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="64,256,1024",
                        help="comma separated operator sizes")
    parser.add_argument("--iters", type=int, default=50,
                        help="power iteration steps per timing run")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]

    if compiled is None:
        print("compiled extension not available; timing the numpy lane only")

    print(f"power iteration, {args.iters} steps, best of {args.repeats} runs")
    header = f"{'n':>6} {'python us/it':>14} {'cython us/it':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        space, op, x0 = make_case(n, args.seed)
        py, cy = bench_power(space, op, x0, args.iters, args.repeats)
        py_it = py / args.iters
        if cy is None:
            print(f"{n:>6} {fmt_us(py_it)} {'-':>14} {'-':>8}")
        else:
            cy_it = cy / args.iters
            print(f"{n:>6} {fmt_us(py_it)} {fmt_us(cy_it)} "
                  f"{py_it / cy_it:>7.1f}x")

    n = sizes[-1]
    space, _, x0 = make_case(n, args.seed)
    print(f"\nper-call kernels at n = {n}")
    print(f"{'kernel':>14} {'python us':>14} {'cython us':>14} {'speedup':>8}")
    for name, (py, cy) in bench_small(space, x0, args.repeats).items():
        if cy is None:
            print(f"{name:>14} {fmt_us(py)} {'-':>14} {'-':>8}")
        else:
            print(f"{name:>14} {fmt_us(py)} {fmt_us(cy)} {py / cy:>7.1f}x")


if __name__ == "__main__":
    main()
