import json
import math
import pathlib

import pytest

import contractforge as cf

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def quad(**kw):
    return cf.ContractConfig(1.0, cf.CostModel.quadratic(), **kw)


def test_cost_closed_forms():
    p3 = cf.CostModel.power(3.0)
    assert p3.cost(2.0) == pytest.approx(8 / 3)
    assert p3.inv_deriv(4.0) == pytest.approx(2.0)
    assert p3.conjugate(4.0) == pytest.approx(16 / 3)
    assert cf.CostModel.quadratic().bregman(3.0, 1.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        cf.CostModel.quadratic().inv_deriv(-1.0)


def test_validate_report():
    report = cf.validate_cost(cf.CostModel.power(1.5))
    assert report["passed"] is True


def test_best_response():
    cfg = quad()
    assert cf.best_response(cfg, 1.0, 2.0) == pytest.approx(0.5)
    assert cf.best_response_value(cfg, 1.0, 2.0) == pytest.approx(0.25)


def test_truthfulness_checks():
    cfg = quad()
    assert cf.deviation_search(cfg, cf.Incentive.constant(1.0), 2.0)["truthful"] is True
    lin = cf.Incentive.piecewise_linear([1e-3, 10.0], [1e-3, 10.0])
    assert cf.deviation_search(cfg, lin, 1.0)["truthful"] is False
    assert cf.check_bregman(cfg, lin)["verdict"] == "untruthful"


def test_step_design():
    design = cf.design_step(quad(), 1.0, 2.0, 2.0, 1.0)
    assert design["feasible"] is False
    assert design["feasibility"]["boundary_incentive"] == pytest.approx(math.sqrt(2.0))


def test_fee_and_equilibrium():
    cfg = quad(a_min=0.2, a_max=3.0)
    nodes, values = cf.build_fee(cfg, cf.Incentive.piecewise_linear([0.2, 3.0], [0.2, 3.0]), a_ref=1.0)
    for a, f in zip(nodes, values):
        assert f == pytest.approx((a**3 - 1.0) / 3.0, abs=1e-9)
    eq = cf.solve_complete_info(quad(), 1.0, 2.0)
    assert eq["a_e"] == pytest.approx(0.25, abs=1e-6)


def test_run_command(tmp_path):
    code, err = cf.run_command("audit", str(CONFIGS / "audit_step_1.43.json"), str(tmp_path))
    assert code == 0, err
    report = json.loads((tmp_path / "audit.json").read_text())
    assert report["results"]["verdict"] == "untruthful"
    code, err = cf.run_command("validate", str(CONFIGS / "nonconvex_validate.json"), str(tmp_path))
    assert code == 2
