"""Command-line interface: exit codes, artifacts, and determinism."""

import csv
import json

import pytest

from weylbvp.cli import main


BASE = {
    "problem": {"dim": 1, "n": 25, "coeff": {"p": 1.0, "a": 0.0}, "eta": "auto"},
    "tau": {"kind": "rational", "alpha": [0.0, -2.0], "beta": [1.0, 1.0]},
    "lambda": [1.0, 1.0],
    "window": [0.2, 9.0],
    "rhs": {"kind": "seeded"},
    "seed": 11,
}


def write_cfg(tmp_path, overrides=None, **top):
    cfg = json.loads(json.dumps(BASE))
    cfg.update(top)
    for key, val in (overrides or {}).items():
        cfg[key] = val
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def run(tmp_path, cfg_path, action, extra=()):
    out = tmp_path / f"out_{action}"
    code = main(["--config", str(cfg_path), "--action", action,
                 "--out", str(out), *extra])
    return code, out


def test_solve_writes_artifacts(tmp_path):
    code, out = run(tmp_path, write_cfg(tmp_path), "solve")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["in_U"] is True
    assert report["residuals"]["oracle_agreement"] <= 1e-10
    with open(out / "solution.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "re_f", "im_f"]
    assert len(rows) == 1 + 25


def test_solve_at_pole_exits_2(tmp_path):
    cfg = write_cfg(tmp_path, {"lambda": [-2.0, 0.0]})
    code, _ = run(tmp_path, cfg, "solve")
    assert code == 2


def test_solve_outside_solvable_set_exits_2(tmp_path):
    # locate a real point where M(lam) + tau(lam) is singular, then ask the
    # CLI to solve exactly there: it must refuse with the domain exit code
    import numpy as np
    from weylbvp import build_1d, elliptic_triple
    et = elliptic_triple(build_1d(25))
    theta = -float(np.min(np.linalg.eigvalsh(et.weyl(8.5).real)))
    cfg = write_cfg(tmp_path, {"tau": {"kind": "constant", "theta": theta},
                               "lambda": [8.5, 0.0]})
    code, _ = run(tmp_path, cfg, "solve")
    assert code == 2


def test_missing_config_exits_1(tmp_path):
    code = main(["--config", str(tmp_path / "missing.json"),
                 "--action", "solve", "--out", str(tmp_path / "o")])
    assert code == 1


def test_malformed_config_exits_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json")
    code, _ = run(tmp_path, path, "solve")
    assert code == 1


def test_unknown_action_exits_1(tmp_path):
    cfg = write_cfg(tmp_path)
    code = main(["--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 1  # no action given anywhere


def test_seed_required_for_random_rhs(tmp_path):
    cfg = json.loads(json.dumps(BASE))
    del cfg["seed"]
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    code, _ = run(tmp_path, path, "solve")
    assert code == 1


def test_bad_coefficient_expression_exits_1(tmp_path):
    cfg = write_cfg(tmp_path, {"problem": {
        "dim": 1, "n": 10, "coeff": {"p": "__import__('os')"}}})
    code, _ = run(tmp_path, cfg, "solve")
    assert code == 1


def test_report_deterministic(tmp_path):
    cfg = write_cfg(tmp_path)
    _, out1 = run(tmp_path, cfg, "solve")
    out2 = tmp_path / "second"
    main(["--config", str(cfg), "--action", "solve", "--out", str(out2)])
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert (out1 / "solution.csv").read_bytes() == (out2 / "solution.csv").read_bytes()


def test_seed_flag_overrides_config(tmp_path):
    cfg = write_cfg(tmp_path)
    _, out1 = run(tmp_path, cfg, "solve")
    out2 = tmp_path / "reseeded"
    main(["--config", str(cfg), "--action", "solve", "--out", str(out2),
          "--seed", "99"])
    assert (out1 / "solution.csv").read_bytes() != (out2 / "solution.csv").read_bytes()


def test_eigen_writes_tables(tmp_path):
    code, out = run(tmp_path, write_cfg(tmp_path), "eigen")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["correspondence_ok"] is True
    assert report["scan_roots"]
    with open(out / "eigenvalues.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["lambda", "sigma_min", "pde_residual", "bc_residual"]
    assert len(rows) >= 2
    assert (out / "scan.csv").exists()


def test_verify_passes(tmp_path):
    code, out = run(tmp_path, write_cfg(tmp_path), "verify")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["ok"] is True
    assert report["suites"]["negative_squares"] == 0


def test_realize_roundtrip(tmp_path):
    code, out = run(tmp_path, write_cfg(tmp_path), "realize")
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["verification"]["weyl_residual"] <= 1e-9
    assert "triple" in report


def test_demo_runs_all_cases(tmp_path):
    out = tmp_path / "demo"
    code = main(["--action", "demo", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert set(report["cases"]) == {"constant", "linear", "rational"}
    for name in ("constant", "linear", "rational"):
        assert (out / name / "solution.csv").exists()


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_2d_solve(tmp_path):
    cfg = write_cfg(tmp_path, {
        "problem": {"dim": 2, "nx": 6, "ny": 6, "eta": "auto"},
        "tau": {"kind": "constant", "theta": 1.5},
    })
    code, out = run(tmp_path, cfg, "solve")
    assert code == 0
    with open(out / "solution.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y", "re_f", "im_f"]
    assert len(rows) == 1 + 36
