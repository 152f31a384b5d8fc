import json
import math
import os

import numpy as np
import pytest

from ridgekit.pipeline import (CSV_HEADER, ExperimentConfig, RateReport,
                               approximate_by_ridge, fit_polynomial,
                               make_target, rate_sweep, select_degree,
                               thread_count, verify)
from ridgekit.polycore import MultiIndexPolynomial, monomials_up_to
from ridgekit.quadrature import build_ball_rule


def coeff_max(poly):
    return max((abs(c) for c in poly.terms.values()), default=0.0)


def small_cfg(**overrides):
    base = dict(d=3, ell=2, r=3, q=2, n_list=(4, 8, 16), target="gaussian",
                seed=0, budget_factor=4, max_degree=6, record_timing=False,
                sup_grid_size=512)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        small_cfg(ell=3)  # needs ell < d
    with pytest.raises(ValueError):
        small_cfg(n_list=(8, 4))  # must increase
    with pytest.raises(ValueError):
        small_cfg(n_list=())
    with pytest.raises(ValueError):
        small_cfg(q=0.5)
    with pytest.raises(ValueError):
        small_cfg(target="nope")


def test_config_json_round_trip():
    cfg = small_cfg(q=math.inf)
    clone = ExperimentConfig.from_json_dict(json.loads(json.dumps(cfg.to_json_dict())))
    assert clone == cfg


def test_make_target_registry():
    g = make_target("gaussian", 2)
    assert g(np.zeros((1, 2)))[0] == pytest.approx(1.0)
    p = make_target("random_polynomial", 2, {"degree": 2, "seed": 1})
    assert p.degree() == 2
    with pytest.raises(ValueError):
        make_target("unknown", 2)


def test_select_degree_budget():
    # d=3, ell=2: head dimension 2, dim of degree-s homogeneous space is s+1
    assert select_degree(4, 3, 2) == 3
    assert select_degree(4, 3, 2, budget_factor=4) == 1
    assert select_degree(64, 3, 2, budget_factor=4, max_degree=10) == 10
    # d=3, ell=1: head dimension 3
    assert select_degree(64, 3, 1, budget_factor=4) == 4


def test_fit_polynomial_fixed_point(basis_factory):
    basis = basis_factory(2, 4)
    rng = np.random.default_rng(0)
    p = MultiIndexPolynomial(2, {k: rng.standard_normal()
                                 for k in monomials_up_to(2, 3)})
    fitted = fit_polynomial(p, 3, basis)
    assert coeff_max(fitted - p) < 1e-8


def test_fit_polynomial_idempotent(basis_factory):
    basis = basis_factory(2, 4)
    fitted = fit_polynomial(make_target("gaussian", 2), 4, basis)
    again = fit_polynomial(fitted, 4, basis)
    assert coeff_max(again - fitted) < 1e-9


def test_fit_error_decreases_with_degree(basis_factory):
    target = make_target("gaussian", 2)
    rule = build_ball_rule(2, 16)
    from ridgekit.orthobasis import build_basis
    from ridgekit.quadrature import lq_norm
    basis = build_basis(2, 6, rule)
    errors = []
    for s in (2, 4, 6):
        fitted = fit_polynomial(target, s, basis)
        diff = lambda pts: target(pts) - fitted.eval_many(np.atleast_2d(pts))
        errors.append(lq_norm(diff, rule, 2))
    assert errors[0] > errors[1] > errors[2]


def test_approximate_by_ridge_polynomial_target():
    cfg = small_cfg(target="random_polynomial",
                    target_params={"degree": 2, "seed": 3})
    dec, report = approximate_by_ridge(
        make_target("random_polynomial", 3, {"degree": 2, "seed": 3}), 16, cfg)
    assert report["error_lq"] < 1e-7  # fit and decomposition are both exact
    assert report["s"] >= 2


def test_approximate_by_ridge_error_report_fields():
    cfg = small_cfg()
    dec, report = approximate_by_ridge(make_target("gaussian", 3), 8, cfg)
    for key in ("n", "s", "fit_error", "residual", "error_lq", "n_directions"):
        assert key in report
    assert report["error_lq"] <= report["fit_error"] + report["residual"] + 1e-10


def test_approximate_by_ridge_rejects_tiny_budget():
    cfg = small_cfg(ell=1)
    with pytest.raises(ValueError):
        approximate_by_ridge(make_target("gaussian", 3), 1, cfg)


def test_rate_sweep_rows_and_csv(tmp_path):
    csv_path = tmp_path / "rates.csv"
    json_path = tmp_path / "rates.json"
    cfg = small_cfg(csv_path=str(csv_path), json_path=str(json_path))
    report = rate_sweep(cfg)
    assert len(report.rows) == 3
    text = csv_path.read_text()
    assert text.splitlines()[0] == CSV_HEADER
    payload = json.loads(json_path.read_text())
    assert payload["theoretical_slope"] == -3.0
    assert [row["n"] for row in payload["rows"]] == [4, 8, 16]


def test_rate_sweep_deterministic_bytes():
    cfg = small_cfg()
    a = rate_sweep(cfg).to_csv_text()
    b = rate_sweep(cfg).to_csv_text()
    assert a == b


def test_rate_sweep_single_point_slope_null():
    cfg = small_cfg(n_list=(8,))
    report = rate_sweep(cfg)
    assert report.slope is None
    assert report.to_json_dict()["slope"] is None


def test_rate_sweep_respects_thread_env(monkeypatch):
    monkeypatch.setenv("RIDGEKIT_THREADS", "2")
    assert thread_count() == 2
    cfg = small_cfg()
    report = rate_sweep(cfg)
    assert [row["n"] for row in report.rows] == [4, 8, 16]
    monkeypatch.setenv("RIDGEKIT_THREADS", "0")
    with pytest.raises(ValueError):
        thread_count()


def test_verify_suites_pass():
    report = verify("all")
    assert report["passed"]
    assert {r["suite"] for r in report["reports"]} == {
        "projector", "expansion", "trig", "bumps", "counterexample"}
    with pytest.raises(ValueError):
        verify("bogus")


def test_cli_verify_and_counterexample(capsys):
    from ridgekit.cli import main
    assert main(["verify", "--suite", "trig"]) == 0
    assert main(["counterexample", "--n-list", "16,64"]) == 0
    capsys.readouterr()


def test_cli_decompose_and_basis(tmp_path, capsys):
    from ridgekit.cli import main
    out = tmp_path / "dec.json"
    assert main(["decompose", "--dim", "3", "--ell", "2", "--degree", "2",
                 "--output", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["residual"] < 1e-8
    assert main(["basis", "--dim", "2", "--max-degree", "3"]) == 0
    capsys.readouterr()


def test_cli_rate_sweep(tmp_path, capsys):
    from ridgekit.cli import main
    csv_path = tmp_path / "r.csv"
    assert main(["rate-sweep", "--dim", "3", "--ell", "2", "--n-list", "4,8",
                 "--budget-factor", "4", "--max-degree", "4",
                 "--csv", str(csv_path)]) == 0
    assert csv_path.read_text().splitlines()[0] == CSV_HEADER
    capsys.readouterr()
