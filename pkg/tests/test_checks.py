import json

import numpy as np
import pytest

from csgerbe import catalog as C
from csgerbe import checks as K
from csgerbe import forms as F
from csgerbe import spaces as S
from csgerbe.errors import InvalidInput, UnknownCheck


@pytest.fixture(scope="module")
def su2_reports():
    return K.run_all(K.CheckConfig())


def test_every_check_passes_on_su2(su2_reports):
    assert [r.name for r in su2_reports] == sorted(K.CHECKS)
    failed = [r.line() for r in su2_reports if not r.passed]
    assert not failed, "\n".join(failed)


def test_pass_flag_matches_tolerance(su2_reports):
    for r in su2_reports:
        assert r.passed == (r.max_rel_err <= r.tolerance)
        assert r.tolerance == K.CHECKS[r.name].tolerance


def test_reports_serialise(su2_reports):
    for r in su2_reports:
        d = json.loads(json.dumps(r.to_dict()))
        assert d["name"] == r.name and d["group"] == "su2"


def test_empty_selection_and_unknown():
    assert K.run_all(K.CheckConfig(), names=[]) == []
    with pytest.raises(UnknownCheck):
        K.run_check("no_such_check")
    with pytest.raises(UnknownCheck):
        K.run_all(K.CheckConfig(), names=["delta_B", "nope"])


def test_config_validation():
    with pytest.raises(InvalidInput):
        K.CheckConfig(h=1.0)
    with pytest.raises(InvalidInput):
        K.CheckConfig(N=4)
    with pytest.raises(InvalidInput):
        K.CheckConfig(points=0)
    with pytest.raises(InvalidInput):
        K.CheckConfig(group="xx7")


def test_determinism():
    cfg = K.CheckConfig(points=2, tangent_sets=1, seed=5)
    a = K.run_check("delta_B", cfg)
    b = K.run_check("delta_B", cfg)
    assert a.max_abs_err == b.max_abs_err and a.observed_order == b.observed_order
    c = K.run_check("delta_B", K.with_overrides(cfg, seed=6))
    assert c.max_abs_err != a.max_abs_err


def test_tolerance_override():
    cfg = K.CheckConfig(points=1, tangent_sets=1, tolerances={"delta_epsilon_eq_nu": 1e-30})
    r = K.run_check("delta_epsilon_eq_nu", cfg)
    assert r.tolerance == 1e-30 and r.passed == (r.max_rel_err <= 1e-30)


def test_threaded_run_matches_serial():
    cfg = K.CheckConfig(points=1, tangent_sets=1)
    names = ["delta_epsilon_eq_nu", "delta_h_alpha_zero", "simplicial_identities"]
    a = K.run_all(cfg, names)
    b = K.run_all(cfg, names, workers=3)
    assert [(r.name, r.max_abs_err) for r in a] == [(r.name, r.max_abs_err) for r in b]


def test_fd_orders_on_so5():
    cfg = K.CheckConfig(group="so5", points=2, tangent_sets=1)
    for name in ("delta_B", "AdR_minus_R_eq_drho", "two_curving", "cs_coboundary"):
        r = K.run_check(name, cfg)
        assert r.passed and r.observed_order is not None and 1.8 <= r.observed_order <= 2.2, r.line()


def test_dB_residual_does_not_depend_on_h():
    # B evaluated on left-invariant extensions is independent of the base point,
    # so the difference quotients in dB vanish identically at every step size.
    cfg = K.CheckConfig(points=1, tangent_sets=1)
    smp = K.Sampler(cfg, "dB_eq_omega")
    x = smp.point(S.PG)
    Vs = [smp.tangent(S.PG) for _ in range(3)]
    B = C.form_B(cfg.spec)
    vals = [F.exterior_derivative(B, h)(x, *Vs) for h in (1e-3, 1e-4, 1e-5)]
    assert vals[0] == vals[1] == vals[2]
    assert K.run_check("dB_eq_omega", cfg).observed_order is None


def test_order_signal_rejects_noise():
    order, _ = K._order_signal(lambda h: 1e-17 * np.sin(1 / h), 1e-4, 1.0)
    assert order is None
    order, _ = K._order_signal(lambda h: 3 * h ** 2, 1e-2, 1.0)
    assert order == pytest.approx(2.0, abs=1e-9)


def test_four_curvature_details():
    r = K.run_check("four_curvature", K.CheckConfig(points=2, tangent_sets=1))
    assert set("abc") <= set(r.details)
    assert all(r.details[k]["passed"] for k in "abc")
    assert r.details["c"]["max_rel_err"] <= 1e-12
