"""Command line interface.

Subcommands:

- ``norm``: estimate the mixed-norm operator norm of a stored operator or a
  symbol truncation.
- ``tridiag``: choose cut points for a family of matrix CSVs and emit the
  plan plus a residual profile CSV.
- ``transfer-experiment``: random-symbol pipeline comparing a compressed
  symbol across exponents, with norms, ratios and indices per symbol.
- ``index``: winding number versus truncated index for one symbol.
- ``khintchine``: measured Rademacher embedding constants over a range of n.
- ``suite``: batch runner over a JSON config with a hash manifest; exits
  nonzero when an assertion enabled in the config fails.

Exit codes: 0 on success, 1 when a suite assertion fails, 2 on invalid
input.  All randomness is seeded; reruns with the same config and seed
produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .blockop import load_operator, toeplitz
from .fredholm import index_report
from .pnorm import NormBudget, estimate_norm
from .rademacher import measure_constants
from .space import SpaceSpec
from .symbols import LaurentPolynomial, random_laurent
from .tridiag import save_plan, tridiagonalize_family
from .transfer import rebind_exponent, run_calculus_experiment, windowed


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _budget(args, seed_shift: int = 0) -> NormBudget:
    return NormBudget(max_iter=args.budget, seed=args.seed + seed_shift)


def _print_or_write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _symbol_tokens(raw) -> list[str]:
    # tokens may be space separated or packed into one ;-joined argument,
    # which is the only form argparse accepts when the first offset is
    # negative: --symbol='-1:1,0;1:1,0'
    return [tok for arg in raw for tok in arg.split(";") if tok]


# -- norm ---------------------------------------------------------------------


def cmd_norm(args) -> int:
    if (args.op is None) == (not args.symbol):
        raise ValueError("provide exactly one of --op or --symbol")
    if args.op is not None:
        op = load_operator(args.op)
        if args.p is not None:
            op = rebind_exponent(op, args.p)
    else:
        f = LaurentPolynomial.from_tokens(_symbol_tokens(args.symbol))
        p = 2.0 if args.p is None else args.p
        op = toeplitz(f, SpaceSpec.unit(p, args.n))
    if args.window:
        op = windowed(op, args.window)
    est = estimate_norm(op, _budget(args))
    payload = est.to_dict()
    if not args.witness:
        payload.pop("witness")
    _print_or_write(json.dumps(payload, indent=1, sort_keys=True), args.out)
    return 0


# -- tridiag ------------------------------------------------------------------


def cmd_tridiag(args) -> int:
    family = []
    for path in args.matrices:
        mat = np.loadtxt(path, delimiter=",", ndmin=2)
        family.append(mat.astype(np.complex128))
    base = args.schedule_base

    def schedule(m: int) -> float:
        return base ** (m + 1)

    report = tridiagonalize_family(family, schedule)
    os.makedirs(args.out, exist_ok=True)
    save_plan(report.plan, os.path.join(args.out, "plan.json"))
    rows = []
    for i in sorted(report.residual_profiles):
        for check in report.residual_profiles[i]:
            rows.append([check.k, i, check.value, check.bound, check.passed])
    _write_csv(
        os.path.join(args.out, "residuals.csv"),
        ["k", "i", "residual", "bound", "within_bound"],
        rows,
    )
    print(
        f"cuts: {list(report.plan.cuts)}\n"
        f"compression residuals: {[f'{r:.6g}' for r in report.compression_residuals]}\n"
        f"all residual checks within bounds: {report.all_within_bounds()}"
    )
    return 0


# -- transfer experiment --------------------------------------------------------


_TRANSFER_HEADER = [
    "poly",
    "degree",
    "sup_circle",
    "window_blocks",
    "source_lower",
    "source_upper",
    "transfer_lower",
    "transfer_upper",
    "ratio_lower",
    "ratio_upper",
    "plain_lower",
    "plain_upper",
    "plain_ratio",
    "compression_residual",
    "index_expected",
    "index_observed",
]


def _transfer_rows(p, n, count, deg_lo, deg_hi, seed, budget_iters,
                   window_frac, plain_n):
    rows = []
    for k in range(count):
        rng = np.random.default_rng([seed, 1000 + k])
        degree = int(rng.integers(deg_lo, deg_hi + 1))
        f = random_laurent(rng, degree)
        budget = NormBudget(max_iter=budget_iters, seed=seed + k)
        exp = run_calculus_experiment(
            f, n, p, budget, window_frac=window_frac, plain_n=plain_n
        )
        sup = exp.sup_circle
        ratio_lower = exp.transferred_norm.lower / max(exp.source_norm.upper, 1e-300)
        ratio_upper = exp.transferred_norm.upper / max(exp.source_norm.lower, 1e-300)
        rows.append([
            ";".join(f.to_tokens()),
            degree,
            sup,
            exp.window,
            exp.source_norm.lower,
            exp.source_norm.upper,
            exp.transferred_norm.lower,
            exp.transferred_norm.upper,
            ratio_lower,
            ratio_upper,
            exp.plain_shift_norm.lower,
            exp.plain_shift_norm.upper,
            exp.plain_shift_norm.lower / max(sup, 1e-300),
            exp.compression_residual,
            exp.index_expected,
            exp.index_observed,
        ])
    return rows


def _plot_transfer(rows, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    header = _TRANSFER_HEADER
    deg = [r[header.index("degree")] for r in rows]
    tl = [r[header.index("transfer_lower")] for r in rows]
    tu = [r[header.index("transfer_upper")] for r in rows]
    pr = [r[header.index("plain_ratio")] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(deg, tl, marker="o", label="transferred lower", alpha=0.7)
    ax.scatter(deg, tu, marker="^", label="transferred upper", alpha=0.7)
    ax.scatter(deg, pr, marker="x", label="plain ratio", alpha=0.7)
    ax.set_xlabel("symbol degree")
    ax.set_ylabel("norm / ratio")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_transfer(args) -> int:
    deg_lo, deg_hi = args.degrees
    rows = _transfer_rows(
        args.p, args.n, args.count, deg_lo, deg_hi, args.seed, args.budget,
        args.window, args.plain_n,
    )
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "transfer.csv")
    _write_csv(csv_path, _TRANSFER_HEADER, rows)
    idx = _TRANSFER_HEADER.index("plain_ratio")
    max_ratio = max(r[idx] for r in rows)
    print(f"wrote {csv_path} ({len(rows)} symbols)")
    print(f"max plain-shift ratio (plain lower / sup circle): {max_ratio:.6g}")
    if args.plot:
        svg = os.path.join(args.out, "transfer.svg")
        _plot_transfer(rows, svg)
        print(f"wrote {svg}")
    return 0


# -- index ----------------------------------------------------------------------


def cmd_index(args) -> int:
    f = LaurentPolynomial.from_tokens(_symbol_tokens(args.symbol))
    report = index_report(f, n=args.n, grid=args.grid, threshold=args.threshold)
    _print_or_write(report.to_json(), args.out)
    return 0


# -- khintchine -------------------------------------------------------------------


def cmd_khintchine(args) -> int:
    n_lo, n_hi = args.n_range
    rows = []
    for n in range(n_lo, n_hi + 1):
        for p in args.p_list:
            c = measure_constants(n, p, iters=args.budget, seed=args.seed)
            rows.append(
                [n, p, c.lower_embed, c.upper_embed, c.projection_norm]
            )
    header = ["n", "p", "lower_embed", "upper_embed", "projection_norm"]
    if args.out:
        _write_csv(args.out, header, rows)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return 0


# -- suite -------------------------------------------------------------------------


def _suite_transfer(exp, seed, out_dir):
    name = exp["name"]
    rows = _transfer_rows(
        float(exp.get("p", 4.0)),
        int(exp.get("n", 256)),
        int(exp.get("count", 10)),
        int(exp.get("degree_min", 1)),
        int(exp.get("degree_max", 16)),
        seed,
        int(exp.get("budget", 300)),
        float(exp.get("window_frac", 0.25)),
        int(exp["plain_n"]) if "plain_n" in exp else None,
    )
    path = os.path.join(out_dir, f"{name}.csv")
    _write_csv(path, _TRANSFER_HEADER, rows)
    assertions = []
    idx_rl = _TRANSFER_HEADER.index("transfer_lower")
    idx_ru = _TRANSFER_HEADER.index("transfer_upper")
    idx_pr = _TRANSFER_HEADER.index("plain_ratio")
    max_ratio = max(r[idx_pr] for r in rows)
    summary = {"max_plain_ratio": max_ratio, "count": len(rows)}
    if "assert_transfer_interval" in exp:
        lo, hi = exp["assert_transfer_interval"]
        ok = all(lo <= r[idx_rl] and r[idx_ru] <= hi for r in rows)
        assertions.append({
            "name": f"{name}:transfer-interval",
            "passed": bool(ok),
            "detail": f"window norms within [{lo}, {hi}]",
        })
    if "assert_plain_ratio_min" in exp:
        floor = float(exp["assert_plain_ratio_min"])
        ok = all(r[idx_pr] >= floor for r in rows)
        assertions.append({
            "name": f"{name}:plain-ratio",
            "passed": bool(ok),
            "detail": f"min plain ratio {min(r[idx_pr] for r in rows):.6g} vs floor {floor}",
        })
    return [path], assertions, summary


def _suite_khintchine(exp, seed, out_dir):
    name = exp["name"]
    rows = []
    for n in range(int(exp.get("n_min", 2)), int(exp.get("n_max", 8)) + 1):
        for p in exp.get("p_list", [2.0, 4.0]):
            c = measure_constants(n, float(p), iters=int(exp.get("budget", 300)),
                                  seed=seed)
            rows.append([n, float(p), c.lower_embed, c.upper_embed,
                         c.projection_norm])
    path = os.path.join(out_dir, f"{name}.csv")
    _write_csv(path, ["n", "p", "lower_embed", "upper_embed", "projection_norm"],
               rows)
    assertions = []
    if "assert_p2_isometry_tol" in exp:
        tol = float(exp["assert_p2_isometry_tol"])
        p2 = [r for r in rows if r[1] == 2.0]
        ok = all(
            abs(r[2] - 1.0) <= tol and abs(r[3] - 1.0) <= tol
            and abs(r[4] - 1.0) <= tol
            for r in p2
        )
        assertions.append({
            "name": f"{name}:p2-isometry",
            "passed": bool(ok),
            "detail": f"{len(p2)} rows at p = 2 within {tol}",
        })
    return [path], assertions, {"rows": len(rows)}


def _suite_index(exp, seed, out_dir):
    name = exp["name"]
    n = int(exp.get("n", 128))
    rows = []
    all_agree = True
    for tokens in exp["symbols"]:
        f = LaurentPolynomial.from_tokens(tokens)
        rep = index_report(f, n=n)
        all_agree = all_agree and rep.agree
        rows.append([
            ";".join(tokens),
            rep.winding_index,
            rep.truncation_index,
            rep.agree,
            rep.gap,
        ])
    path = os.path.join(out_dir, f"{name}.csv")
    _write_csv(
        path,
        ["symbol", "winding_index", "truncation_index", "agree", "gap"],
        rows,
    )
    assertions = []
    if exp.get("assert_agree"):
        assertions.append({
            "name": f"{name}:index-agreement",
            "passed": bool(all_agree),
            "detail": f"{len(rows)} symbols",
        })
    return [path], assertions, {"symbols": len(rows)}


_SUITE_KINDS = {
    "transfer": _suite_transfer,
    "khintchine": _suite_khintchine,
    "index": _suite_index,
}


def cmd_suite(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict) or "experiments" not in config:
        raise ValueError("config must be an object with an 'experiments' list")
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    out_dir = args.out or config.get("out", "suite-results")
    os.makedirs(out_dir, exist_ok=True)

    outputs = []
    assertions = []
    summaries = {}
    for exp in config["experiments"]:
        kind = exp.get("kind")
        if kind not in _SUITE_KINDS:
            raise ValueError(f"unknown experiment kind {kind!r}")
        if "name" not in exp:
            raise ValueError("every experiment needs a name")
        paths, asserts, summary = _SUITE_KINDS[kind](exp, seed, out_dir)
        outputs.extend(paths)
        assertions.extend(asserts)
        summaries[exp["name"]] = summary

    summary_path = os.path.join(out_dir, "summary.json")
    with open(summary_path, "w") as fh:
        json.dump({"assertions": assertions, "experiments": summaries}, fh,
                  indent=1, sort_keys=True)
    manifest = {
        "config": {"path": os.path.abspath(args.config),
                   "sha256": _sha256(args.config)},
        "seed": seed,
        "outputs": [
            {"file": os.path.basename(p), "sha256": _sha256(p)}
            for p in sorted(outputs)
        ],
        "summary": {"file": "summary.json", "sha256": _sha256(summary_path)},
        "version": __version__,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)

    failed = [a for a in assertions if not a["passed"]]
    for a in assertions:
        status = "PASS" if a["passed"] else "FAIL"
        print(f"{status} {a['name']}: {a['detail']}")
    print(f"wrote {len(outputs)} experiment files to {out_dir}")
    return 1 if failed else 0


# -- parser ------------------------------------------------------------------------


def _int_pair(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma floats, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opband",
        description="banded block operators on mixed-norm spaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="estimate an operator norm")
    p_norm.add_argument("--op", help="operator JSON file")
    p_norm.add_argument("--symbol", nargs="+", metavar="N:RE,IM",
                        help="Laurent symbol tokens; pack them as "
                             "--symbol='-1:1,0;1:1,0' when the first "
                             "offset is negative")
    p_norm.add_argument("--n", type=int, default=128,
                        help="truncation size for --symbol (default 128)")
    p_norm.add_argument("--p", type=float, default=None,
                        help="exponent (default: operator's own, or 2)")
    p_norm.add_argument("--window", type=int, default=0,
                        help="drop the first WINDOW blocks before estimating")
    p_norm.add_argument("--seed", type=int, default=0)
    p_norm.add_argument("--budget", type=int, default=400,
                        help="power-iteration steps per restart")
    p_norm.add_argument("--witness", action="store_true",
                        help="include the witness vector in the output")
    p_norm.add_argument("--out", help="write JSON here instead of stdout")
    p_norm.set_defaults(func=cmd_norm)

    p_tri = sub.add_parser("tridiag", help="cut points for matrix CSV files")
    p_tri.add_argument("matrices", nargs="+", help="real matrix CSV files")
    p_tri.add_argument("--schedule-base", type=float, default=0.5,
                       help="eps_m = base^(m+1), default 0.5")
    p_tri.add_argument("--out", default="tridiag-out", help="output directory")
    p_tri.set_defaults(func=cmd_tridiag)

    p_tr = sub.add_parser("transfer-experiment",
                          help="random-symbol transfer pipeline")
    p_tr.add_argument("--p", type=float, default=4.0)
    p_tr.add_argument("--n", type=int, default=256)
    p_tr.add_argument("--count", type=int, default=10)
    p_tr.add_argument("--degrees", type=_int_pair, default=(1, 16),
                      metavar="LO:HI")
    p_tr.add_argument("--window", type=float, default=0.25,
                      help="window fraction of n (default 0.25)")
    p_tr.add_argument("--plain-n", type=int, default=None,
                      help="size of the plain unit-cut truncation")
    p_tr.add_argument("--seed", type=int, default=0)
    p_tr.add_argument("--budget", type=int, default=300)
    p_tr.add_argument("--plot", action="store_true",
                      help="also write an SVG scatter (needs matplotlib)")
    p_tr.add_argument("--out", default="transfer-out", help="output directory")
    p_tr.set_defaults(func=cmd_transfer)

    p_idx = sub.add_parser("index", help="winding vs truncated index")
    p_idx.add_argument("--symbol", nargs="+", required=True,
                       metavar="N:RE,IM",
                       help="Laurent symbol tokens; pack them as "
                            "--symbol='-1:1,0;1:1,0' when the first "
                            "offset is negative")
    p_idx.add_argument("--n", type=int, default=128)
    p_idx.add_argument("--grid", type=int, default=4096)
    p_idx.add_argument("--threshold", type=float, default=1e-6)
    p_idx.add_argument("--out", help="write JSON here instead of stdout")
    p_idx.set_defaults(func=cmd_index)

    p_kh = sub.add_parser("khintchine",
                          help="Rademacher embedding constants")
    p_kh.add_argument("--n-range", type=_int_pair, default=(2, 8),
                      metavar="LO:HI")
    p_kh.add_argument("--p-list", type=_float_list, default=[2.0, 4.0],
                      metavar="P1,P2,...")
    p_kh.add_argument("--seed", type=int, default=0)
    p_kh.add_argument("--budget", type=int, default=300)
    p_kh.add_argument("--out", help="CSV output path")
    p_kh.set_defaults(func=cmd_khintchine)

    p_suite = sub.add_parser("suite", help="run a JSON config of experiments")
    p_suite.add_argument("config", help="suite config JSON")
    p_suite.add_argument("--out", default=None, help="output directory")
    p_suite.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
    p_suite.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
