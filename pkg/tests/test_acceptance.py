"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them all)
and asserts the same condition, so the module doubles as a human-readable
scorecard and a hard gate.  Everything is seeded; the whole file targets a
few minutes of runtime.
"""

import json

import numpy as np
import pytest

from opband import (
    NormBudget,
    SpaceSpec,
    PathRejected,
    SymbolPath,
    brute_force_norm,
    diagonal_sum_bound,
    estimate_norm,
    index_report,
    measure_constants,
    path_index_constancy,
    project,
    embed,
    RademacherSystem,
    run_calculus_experiment,
    toeplitz,
    tridiagonalize_family,
)
from opband.cli import main as cli_main
from opband.symbols import LaurentPolynomial, random_laurent

from helpers import random_operator, random_space


def report(num, label, passed, detail=""):
    line = f"{'PASS' if passed else 'FAIL'} {num:2d} {label}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert passed, line


def sym(coeffs):
    return LaurentPolynomial.from_coeffs(coeffs)


# -- 1: structural sandwich on random operators -------------------------------


def test_01_sandwich_certificates():
    rng = np.random.default_rng(101)
    budget = NormBudget(restarts=4, max_iter=120, seed=7)
    exponents = [1.5, 2.0, 3.0, 4.0]
    min_witness_margin = np.inf
    max_upper_excess = -np.inf
    for k in range(200):
        p = exponents[k % 4]
        space = random_space(rng, p, max_dim=64, max_width=6)
        op = random_operator(rng, space, band=int(rng.integers(0, 4)))
        est = estimate_norm(op, budget)
        width = 2 * op.band + 1
        cap = min(width * op.sup_block_norm, diagonal_sum_bound(op))
        min_witness_margin = min(min_witness_margin,
                                 est.lower - op.sup_block_norm)
        max_upper_excess = max(max_upper_excess, est.lower - cap)
    ok = min_witness_margin >= -1e-9 and max_upper_excess <= 1e-9
    report(1, "lower bounds certified within the block-norm sandwich", ok,
           f"200 operators, witness margin >= {min_witness_margin:.2e}, "
           f"excess over caps <= {max_upper_excess:.2e}")


# -- 2: exactness at exponent 2 ------------------------------------------------


def test_02_p2_matches_dense_svd():
    rng = np.random.default_rng(102)
    budget = NormBudget(restarts=4, max_iter=120, seed=11)
    worst = 0.0
    for _ in range(100):
        space = random_space(rng, 2.0, max_dim=48)
        op = random_operator(rng, space, band=int(rng.integers(0, 4)))
        est = estimate_norm(op, budget)
        exact = float(np.linalg.svd(op.dense, compute_uv=False)[0])
        rel = max(abs(est.lower - exact), abs(est.upper - exact))
        worst = max(worst, rel / max(exact, 1e-300))
    ok = worst <= 1e-8
    report(2, "p = 2 estimates match dense SVD", ok,
           f"100 operators, worst relative error {worst:.2e}")


# -- 3: tiny instances against the independent sphere search -------------------


def test_03_tiny_instances_match_brute_force():
    rng = np.random.default_rng(103)
    budget = NormBudget(restarts=6, max_iter=250, seed=13)
    worst = 0.0
    for k in range(50):
        p = 1.5 if k % 2 == 0 else 3.0
        space = random_space(rng, p, max_dim=8, min_dim=4, max_width=3)
        op = random_operator(rng, space, band=int(rng.integers(0, 3)))
        est = estimate_norm(op, budget)
        brute = brute_force_norm(op, seed=17 + k)
        worst = max(worst, abs(est.lower - brute))
    ok = worst <= 1e-3
    report(3, "dim <= 8 estimates match the brute-force search", ok,
           f"50 operators at p in {{1.5, 3}}, worst gap {worst:.2e}")


# -- 4: cut schedule for the reference family -----------------------------------


def test_04_cut_schedule_for_reference_family():
    n = 256
    fwd = np.eye(n, k=-1).astype(complex)
    bwd = np.eye(n, k=1).astype(complex)
    hop = toeplitz(sym({-1: 1.0, 1: 1.0}), SpaceSpec.unit(2.0, n)).dense
    decay = (3.0 ** -np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
             ).astype(complex)
    rep = tridiagonalize_family([fwd, bwd, hop, decay])
    plan = rep.plan
    bounds_ok = all(
        t <= 2.0 ** -(m + 1) + 1e-12 and ts <= 2.0 ** -(m + 1) + 1e-12
        for (m, i), (t, ts) in plan.tail_bounds.items()
    )
    ok = (not plan.exhausted) and bounds_ok and rep.all_within_bounds()
    report(4, "greedy cuts meet the 2^-(m+1) schedule at N = 256", ok,
           f"{plan.space(2.0).nblocks} blocks, exhausted = {plan.exhausted}, "
           f"all residuals within 2^-k = {rep.all_within_bounds()}")


# -- 5 and 8 share one batch of experiments -------------------------------------


@pytest.fixture(scope="module")
def calculus_batch():
    runs = []
    for k in range(50):
        rng = np.random.default_rng([4, 1000 + k])
        degree = int(rng.integers(1, 17))
        f = random_laurent(rng, degree)
        budget = NormBudget(max_iter=300, seed=4 + k)
        runs.append(
            run_calculus_experiment(f, n=512, p=4.0, budget=budget,
                                    plain_n=256)
        )
    return runs


def test_05_transferred_tail_norms_stay_sandwiched(calculus_batch):
    lows = [r.transferred_norm.lower for r in calculus_batch]
    highs = [r.transferred_norm.upper for r in calculus_batch]
    ok = min(lows) >= 1.0 / 3.0 - 0.05 and max(highs) <= 3.0 + 0.05
    report(5, "transferred tail norms within [1/3, 3] at p = 4", ok,
           f"50 symbols, N = 512, observed [{min(lows):.4f}, {max(highs):.4f}]")


def test_08_plain_shift_calculus_reaches_the_sup(calculus_batch):
    ratios = [r.plain_shift_norm.lower / r.sup_circle for r in calculus_batch]
    deficits = [r.plain_shift_norm.lower - (r.sup_circle - 0.02)
                for r in calculus_batch]
    ok = min(deficits) >= 0.0
    report(8, "plain shift calculus certifies >= sup - 0.02 at p = 4", ok,
           f"N = 256, max observed ratio {max(ratios):.6g}, "
           f"min {min(ratios):.6g}")


# -- 6: winding against truncated indices ----------------------------------------


def test_06_index_agreement():
    cases = [
        ({-1: 1.0}, 1),
        ({1: 1.0}, -1),
        ({2: 1.0}, -2),
        ({0: -2.0, 1: 1.0}, 0),
        ({-1: 1.0, 0: 3.0, 1: 1.0}, 0),
    ]
    agree = []
    for coeffs, expected in cases:
        rep = index_report(sym(coeffs), n=128)
        agree.append(rep.agree and rep.winding_index == expected)
    exp = run_calculus_experiment(sym({-1: 1.0}), n=128, p=4.0,
                                  budget=NormBudget(max_iter=150, seed=19))
    transferred_ok = exp.index_observed == 1 == exp.index_expected
    ok = all(agree) and transferred_ok
    report(6, "winding and truncated indices agree", ok,
           f"5 symbols at N = 128, transferred coshift index "
           f"{exp.index_observed}")


# -- 7: homotopy acceptance and rejection ------------------------------------------


def test_07_path_constancy():
    rng = np.random.default_rng(107)
    accepted = 0
    attempts = 0
    all_constant = True
    while accepted < 100:
        attempts += 1
        f = random_laurent(rng, int(rng.integers(1, 6)))
        margin = f.min_circle()
        if margin < 0.05:
            continue
        bump = random_laurent(rng, int(rng.integers(0, 4)))
        res = path_index_constancy(SymbolPath(f, f + bump.scaled(0.4 * margin)))
        all_constant = all_constant and res.constant
        accepted += 1

    try:
        path_index_constancy(SymbolPath(sym({1: 1.0}), sym({-1: 1.0})))
        rejected_at = None
    except PathRejected as exc:
        rejected_at = exc.t
    rejection_ok = rejected_at is not None and abs(rejected_at - 0.5) <= 1e-6
    ok = all_constant and rejection_ok
    report(7, "accepted paths keep a constant index", ok,
           f"100 accepted of {attempts} drawn, shift-to-coshift rejected "
           f"at t = {rejected_at}")


# -- 9: embedding constants ----------------------------------------------------------


def test_09_khintchine_constants():
    p2_ok = True
    for n in range(1, 11):
        c = measure_constants(n, 2.0, restarts=4, iters=150)
        p2_ok = p2_ok and all(
            abs(v - 1.0) <= 1e-9
            for v in (c.lower_embed, c.upper_embed, c.projection_norm)
        )

    c4 = measure_constants(8, 4.0, restarts=6, iters=250)
    predicted = (3.0 - 2.0 / 8.0) ** 0.25  # sphere max of the moment identity
    p4_ok = abs(c4.upper_embed - predicted) <= 0.05 * predicted

    rng = np.random.default_rng(109)
    round_ok = True
    for n, p in [(4, 1.5), (8, 4.0), (10, 3.0)]:
        system = RademacherSystem.make(n, p)
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        back = project(system, embed(system, x))
        round_ok = round_ok and bool(np.abs(back - x).max() <= 1e-12)

    ok = p2_ok and p4_ok and round_ok
    report(9, "embedding constants behave", ok,
           f"p = 2 exact to 1e-9 for n <= 10, p = 4 upper "
           f"{c4.upper_embed:.5f} vs predicted {predicted:.5f}, "
           f"round trip exact")


# -- 10: suite determinism --------------------------------------------------------------


def test_10_suite_reruns_byte_identical(tmp_path, capsys):
    config = {
        "seed": 3,
        "experiments": [
            {"kind": "transfer", "name": "det-transfer", "p": 4.0, "n": 48,
             "count": 3, "degree_min": 1, "degree_max": 3, "budget": 80},
            {"kind": "khintchine", "name": "det-khintchine", "n_min": 2,
             "n_max": 4, "p_list": [2.0, 4.0], "budget": 80},
            {"kind": "index", "name": "det-index", "n": 32,
             "symbols": [["1:1,0"], ["0:-2,0", "1:1,0"]]},
        ],
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    outs = []
    for run_dir in ("one", "two"):
        out = tmp_path / run_dir
        code = cli_main(["suite", str(cfg), "--out", str(out)])
        assert code == 0
        outs.append(out)
    capsys.readouterr()

    names = ["det-transfer.csv", "det-khintchine.csv", "det-index.csv",
             "summary.json"]
    identical = all(
        (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        for name in names
    )
    m1 = json.loads((outs[0] / "manifest.json").read_text())
    m2 = json.loads((outs[1] / "manifest.json").read_text())
    ok = identical and m1["outputs"] == m2["outputs"]
    report(10, "suite reruns are byte-identical", ok,
           f"{len(names)} files compared across two runs")
