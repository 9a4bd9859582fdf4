import json

import numpy as np
import pytest

from opband import SpaceSpec, load_plan, save_operator, toeplitz
from opband.cli import main
from opband.symbols import LaurentPolynomial


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_norm_symbol_prints_json(capsys):
    code, out, err = run(
        capsys, "norm", "--symbol", "1:1,0", "--n", "24", "--budget", "80"
    )
    assert code == 0, err
    payload = json.loads(out)
    assert payload["lower"] <= payload["upper"] + 1e-12
    assert payload["lower"] == pytest.approx(1.0, abs=1e-6)
    assert "witness" not in payload
    assert payload["converged"] is True


def test_norm_requires_exactly_one_source(capsys, tmp_path):
    code, _, err = run(capsys, "norm")
    assert code == 2 and "exactly one" in err
    op_path = tmp_path / "op.json"
    op = toeplitz(LaurentPolynomial.from_coeffs({1: 1.0}), SpaceSpec.unit(2.0, 8))
    save_operator(op, str(op_path))
    code, _, err = run(
        capsys, "norm", "--op", str(op_path), "--symbol", "1:1,0"
    )
    assert code == 2 and "exactly one" in err


def test_norm_loads_operator_with_rebind_window_and_witness(capsys, tmp_path):
    op_path = tmp_path / "op.json"
    f = LaurentPolynomial.from_coeffs({-1: 0.5, 1: 0.5})
    op = toeplitz(f, SpaceSpec(2.0, tuple(range(0, 33, 4))))
    save_operator(op, str(op_path))
    out_path = tmp_path / "norm.json"
    code, out, err = run(
        capsys, "norm", "--op", str(op_path), "--p", "3", "--window", "2",
        "--witness", "--budget", "120", "--out", str(out_path),
    )
    assert code == 0, err
    payload = json.loads(out_path.read_text())
    assert payload["lower"] <= payload["upper"] + 1e-12
    assert len(payload["witness"]["re"]) == op.space.dim
    assert len(payload["witness"]["im"]) == op.space.dim
    assert payload["upper"] <= 3.0 * 1.0 + 1e-9  # width sandwich from p=2 norm 1


def test_norm_rejects_bad_symbol_tokens(capsys):
    code, _, err = run(capsys, "norm", "--symbol", "nonsense")
    assert code == 2
    assert "token" in err


def test_index_agreement_output(capsys):
    code, out, err = run(capsys, "index", "--symbol", "1:1,0", "--n", "32")
    assert code == 0, err
    payload = json.loads(out)
    assert payload["winding_index"] == -1
    assert payload["truncation_index"] == -1
    assert payload["agree"] is True


def test_index_accepts_packed_tokens_with_negative_offsets(capsys):
    code, out, err = run(
        capsys, "index", "--symbol=-1:1,0;0:3,0;1:1,0", "--n", "32"
    )
    assert code == 0, err
    payload = json.loads(out)
    assert payload["winding_index"] == 0
    assert payload["agree"] is True


def test_index_rejects_vanishing_symbol(capsys):
    code, _, err = run(
        capsys, "index", "--symbol", "0:-1,0", "1:1,0", "--n", "16"
    )
    assert code == 2
    assert "invertible" in err


def test_khintchine_csv(capsys, tmp_path):
    out_path = tmp_path / "kh.csv"
    code, out, err = run(
        capsys, "khintchine", "--n-range", "2:3", "--p-list", "2,4",
        "--budget", "60", "--out", str(out_path),
    )
    assert code == 0, err
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "n,p,lower_embed,upper_embed,projection_norm"
    assert len(lines) == 1 + 2 * 2
    first = lines[1].split(",")
    assert first[0] == "2" and float(first[1]) == 2.0
    assert float(first[2]) == pytest.approx(1.0, abs=1e-9)


def test_tridiag_outputs(capsys, tmp_path):
    n = 16
    fwd = np.eye(n, k=-1)
    decay = 3.0 ** -np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    paths = []
    for name, mat in [("fwd.csv", fwd), ("decay.csv", decay)]:
        p = tmp_path / name
        np.savetxt(p, mat, delimiter=",", fmt="%.17g")
        paths.append(str(p))
    out_dir = tmp_path / "out"
    code, out, err = run(capsys, "tridiag", *paths, "--out", str(out_dir))
    assert code == 0, err
    plan = load_plan(str(out_dir / "plan.json"))
    assert plan.cuts[0] == 0 and plan.cuts[-1] == n
    assert not plan.exhausted
    lines = (out_dir / "residuals.csv").read_text().strip().splitlines()
    assert lines[0] == "k,i,residual,bound,within_bound"
    assert len(lines) > 1
    assert all(line.endswith("true") for line in lines[1:])
    assert "all residual checks within bounds: True" in out


def test_transfer_experiment_csv(capsys, tmp_path):
    out_dir = tmp_path / "tr"
    code, out, err = run(
        capsys, "transfer-experiment", "--n", "48", "--count", "2",
        "--degrees", "1:2", "--budget", "60", "--p", "4",
        "--out", str(out_dir),
    )
    assert code == 0, err
    lines = (out_dir / "transfer.csv").read_text().strip().splitlines()
    assert lines[0].startswith("poly,degree,sup_circle,window_blocks")
    assert len(lines) == 3
    assert "max plain-shift ratio" in out


def suite_config(tmp_path, **overrides):
    config = {
        "seed": 5,
        "experiments": [
            {
                "kind": "transfer",
                "name": "tiny-transfer",
                "p": 4.0,
                "n": 48,
                "count": 2,
                "degree_min": 1,
                "degree_max": 2,
                "budget": 60,
                "assert_transfer_interval": [0.0, 100.0],
                "assert_plain_ratio_min": 0.5,
            },
            {
                "kind": "khintchine",
                "name": "tiny-khintchine",
                "n_min": 2,
                "n_max": 3,
                "p_list": [2.0],
                "budget": 60,
                "assert_p2_isometry_tol": 1e-6,
            },
            {
                "kind": "index",
                "name": "tiny-index",
                "n": 32,
                "symbols": [["1:1,0"], ["0:-2,0", "1:1,0"]],
                "assert_agree": True,
            },
        ],
    }
    config.update(overrides)
    path = tmp_path / "suite.json"
    path.write_text(json.dumps(config))
    return path


def test_suite_runs_and_reruns_byte_identical(capsys, tmp_path):
    config = suite_config(tmp_path)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    code, out, err = run(capsys, "suite", str(config), "--out", str(out1))
    assert code == 0, err
    assert out.count("PASS") == 4
    assert "FAIL" not in out

    manifest1 = json.loads((out1 / "manifest.json").read_text())
    assert manifest1["seed"] == 5
    names = [o["file"] for o in manifest1["outputs"]]
    assert names == sorted(names)
    assert set(names) == {
        "tiny-transfer.csv", "tiny-khintchine.csv", "tiny-index.csv",
    }

    code, _, _ = run(capsys, "suite", str(config), "--out", str(out2))
    assert code == 0
    manifest2 = json.loads((out2 / "manifest.json").read_text())
    assert manifest1["outputs"] == manifest2["outputs"]
    assert manifest1["summary"]["sha256"] == manifest2["summary"]["sha256"]
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_suite_seed_override_changes_outputs(capsys, tmp_path):
    config = suite_config(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "suite", str(config), "--out", str(out1))[0] == 0
    assert run(capsys, "suite", str(config), "--out", str(out2),
               "--seed", "99")[0] == 0
    bytes1 = (out1 / "tiny-transfer.csv").read_bytes()
    bytes2 = (out2 / "tiny-transfer.csv").read_bytes()
    assert bytes1 != bytes2


def test_suite_failing_assertion_exits_one(capsys, tmp_path):
    config = suite_config(
        tmp_path,
        experiments=[{
            "kind": "transfer",
            "name": "doomed",
            "p": 4.0,
            "n": 48,
            "count": 2,
            "degree_min": 1,
            "degree_max": 2,
            "budget": 60,
            # plain truncation of a degree <= 2 sup-normalized symbol can
            # never certify twice its own sup
            "assert_plain_ratio_min": 2.0,
        }],
    )
    code, out, err = run(capsys, "suite", str(config), "--out",
                         str(tmp_path / "out"))
    assert code == 1
    assert "FAIL doomed:plain-ratio" in out


def test_suite_rejects_bad_configs(capsys, tmp_path):
    missing = tmp_path / "nope.json"
    assert run(capsys, "suite", str(missing))[0] == 2

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"no_experiments": []}))
    assert run(capsys, "suite", str(bad))[0] == 2

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps(
        {"experiments": [{"kind": "mystery", "name": "x"}]}
    ))
    code, _, err = run(capsys, "suite", str(unknown), "--out",
                       str(tmp_path / "u"))
    assert code == 2 and "mystery" in err

    malformed = tmp_path / "malformed.json"
    malformed.write_text("{")
    assert run(capsys, "suite", str(malformed))[0] == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
