import json

import numpy as np
import pytest

from csgerbe import catalog as C
from csgerbe import forms as F
from csgerbe import lie
from csgerbe import paths as P
from csgerbe import spaces as S
from csgerbe.errors import InvalidInput

from conftest import SU2, SU3, killing_direct, rel


def _phi_hat_direct(p):
    return p.dtheta @ np.linalg.inv(p.values)


def _phi_direct(p):
    return np.linalg.inv(p.values) @ p.dtheta


def _int(spec, X, W):
    return P.quadrature(killing_direct(X, W, spec), P.PATH)


def _loop_tangent(f, df, E, grid):
    th = grid.nodes[:, None, None]
    return P.PathTangent(f(th) * E, df(th) * E, P.LOOP)


# --- R ----------------------------------------------------------------------


def test_R_antisymmetric(grid, rng):
    g = P.random_loop(SU2, grid, rng)
    X = P.random_tangent(SU2, grid, rng, P.LOOP)
    assert C.form_R(SU2)((g,), (X,), (X,)) == 0.0


@pytest.mark.parametrize("N,exact", [(128, True), (512, False)])
def test_R_closed_form(N, exact, rng):
    grid = P.GridSpec(N)
    E1, E2 = lie.random_algebra(SU2, rng), lie.random_algebra(SU2, rng)
    c = lie.killing_form(E1, E2, SU2)
    X = _loop_tangent(np.sin, np.cos, E1, grid)
    Y = _loop_tangent(np.cos, lambda t: -np.sin(t), E2, grid)
    if not exact:  # let the grid differentiate
        X, Y = P.PathTangent(X.values, kind=P.LOOP), P.PathTangent(Y.values, kind=P.LOOP)
    g = P.random_loop(SU2, grid, rng)
    # ½(∫ sin·(-sin) c - ∫ cos·cos c) = -π c
    assert abs(C.form_R(SU2)((g,), (X,), (Y,)) + np.pi * c) < 1e-8


def test_R_naive_equals_symmetrised(grid, rng):
    g = P.random_loop(SU2, grid, rng)
    X, Y = (P.random_tangent(SU2, grid, rng, P.LOOP) for _ in range(2))
    a = C.form_R(SU2)((g,), (X,), (Y,))
    b = C.form_R(SU2, naive=True)((g,), (X,), (Y,))
    assert abs(a - b) < 1e-10


# --- 1-forms ------------------------------------------------------------------


def test_nu_trivial_cases(grid, rng):
    g = P.random_loop(SU2, grid, rng)
    e = P.identity_loop(SU2, grid)
    X, Y = (P.random_tangent(SU2, grid, rng, P.LOOP) for _ in range(2))
    nu = C.form_nu(SU2)
    assert nu((g, e), (X, Y)) == 0.0
    assert nu((g, P.random_loop(SU2, grid, rng)), (X * 0.0, Y)) == 0.0


def test_epsilon_cases(grid, rng):
    eps = C.form_epsilon(SU2)
    p, g = P.random_path(SU2, grid, rng), P.random_loop(SU2, grid, rng)
    X, Y = P.random_tangent(SU2, grid, rng), P.random_tangent(SU2, grid, rng, P.LOOP)
    assert eps((p, P.identity_loop(SU2, grid)), (X, Y)) == 0.0
    assert eps((p, g), (X * 0.0, Y)) == 0.0
    assert abs(eps((p, g), (X, Y)) - 2 * _int(SU2, X.values, _phi_hat_direct(g))) < 1e-12


def test_B_cases(grid, rng):
    B = C.form_B(SU2)
    p = P.random_path(SU2, grid, rng)
    X, Y = P.random_tangent(SU2, grid, rng), P.random_tangent(SU2, grid, rng)
    assert B((p,), (X,), (X,)) == 0.0
    E = lie.random_algebra(SU2, rng)
    th = grid.nodes[:, None, None]
    e = (P.identity_path(SU2, grid),)
    U = P.PathTangent(np.sin(th) * E, np.cos(th) * E)
    # same direction and proportional profiles: antisymmetrisation kills it
    assert abs(B(e, (U,), (U * 2.5,))) < 1e-15
    # same direction, different profiles: ½<E,E> ∫ (f g' - g f') with f = sin, g = θ² gives -4π<E,E>
    W = P.PathTangent(th ** 2 * E, 2 * th * E)
    assert B(e, (U,), (W,)) == pytest.approx(-4 * np.pi * lie.killing_form(E, E, SU2), rel=1e-9)
    direct = 0.5 * (_int(SU2, X.values, Y.dtheta) - _int(SU2, Y.values, X.dtheta))
    assert abs(B((p,), (X,), (Y,)) - direct) < 1e-12


def test_rho_cases(grid, rng):
    rho = C.form_rho(SU2)
    p, g = P.random_path(SU2, grid, rng), P.random_loop(SU2, grid, rng)
    X, Y = P.random_tangent(SU2, grid, rng), P.random_tangent(SU2, grid, rng, P.LOOP)
    e_p, e_l = P.identity_path(SU2, grid), P.identity_loop(SU2, grid)
    assert abs(rho((e_p, g), (X * 0.0, Y))) == 0.0
    assert abs(rho((p, e_l), (X, Y * 0.0))) < 1e-15
    phi, gv = _phi_direct(p), g.values
    W = gv @ phi @ np.linalg.inv(gv) - phi - _phi_hat_direct(g)
    direct = 2 * (_int(SU2, X.values, W) + _int(SU2, Y.values, phi))
    assert abs(rho((p, g), (X, Y)) - direct) < 1e-12


def test_epsilon_MS_cases(grid, rng):
    ems = C.form_epsilon_MS(SU2)
    p = P.random_path(SU2, grid, rng)
    X = P.random_tangent(SU2, grid, rng)
    assert ems((P.identity_path(SU2, grid),), (X,)) == 0.0
    assert ems((p,), (X * 0.0,)) == 0.0
    Z = p.values[-1] @ X.values[-1] @ np.linalg.inv(p.values[-1])
    w = grid.nodes / (2 * np.pi)
    direct = 2 * P.quadrature(w * killing_direct(Z[None], _phi_direct(p), SU2), P.PATH)
    assert abs(ems((p,), (X,)) - direct) < 1e-12


# --- forms on G ---------------------------------------------------------------


def test_omega_cases(rng):
    om = C.form_omega(SU2)
    g = lie.random_group(SU2, rng)
    X, Y, Z = (lie.random_algebra(SU2, rng) for _ in range(3))
    assert abs(om((g,), (X,), (X,), (Y,))) < 1e-16
    E = SU2.basis
    val = om((np.eye(2),), (E[0],), (E[1],), (E[2],))
    assert val == pytest.approx(lie.killing_form(lie.bracket(E[0], E[1]), E[2], SU2) / 6, rel=1e-13)
    assert om((g,), (X,), (Y,), (Z,)) == pytest.approx(C.omega_closed_form(SU2, X, Y, Z), rel=1e-12)


def test_kappa_cases(rng):
    k = C.form_kappa(SU2)
    g, h = lie.random_group(SU2, rng), lie.random_group(SU2, rng)
    X, Y, X2, Y2 = (lie.random_algebra(SU2, rng) for _ in range(4))
    z = np.zeros_like(X)
    assert k((g, h), (X, z), (X2, z)) == 0.0
    assert k((g, h), (z, Y), (z, Y2)) == 0.0
    closed = 0.5 * (lie.killing_form(X, lie.Ad(h, Y2), SU2) - lie.killing_form(X2, lie.Ad(h, Y), SU2))
    assert abs(k((g, h), (X, Y), (X2, Y2)) - closed) < 1e-12


# --- adjoint phase ------------------------------------------------------------


def test_adjoint_phase_trivial_cases(rng):
    grid = P.GridSpec(32)
    p = P.random_path(SU2, grid, rng)
    f = P.random_loop_of_loops(SU2, grid, rng)
    dbl, fib = C.adjoint_phase(SU2, p, P.constant_loop_of_loops(SU2, grid))
    assert dbl == 0.0 and abs(fib) < 1e-14
    dbl, fib = C.adjoint_phase(SU2, P.identity_path(SU2, grid), f)
    assert dbl == 0.0 and abs(fib) < 1e-14


def test_adjoint_phase_routes_agree(rng):
    grid = P.GridSpec(64)
    p = P.random_path(SU2, grid, rng)
    f = P.random_loop_of_loops(SU2, grid, rng)
    dbl, fib = C.adjoint_phase(SU2, p, f, P.GridSpec(64))
    assert abs(dbl - fib) <= 1e-6 * max(abs(dbl), abs(fib))
    assert abs(dbl) > 1e-3


def test_adjoint_phase_rejects_moved_base(rng):
    grid = P.GridSpec(32)
    f = P.random_loop_of_loops(SU2, grid, rng)
    Y = P.random_tangent(SU2, grid, rng, P.LOOP)
    X = P.LoopFamilyTangent(lambda t: Y, lambda t: np.zeros_like(Y.values))  # nonzero at t = 0
    with pytest.raises(InvalidInput):
        C.adjoint_phase(SU2, P.random_path(SU2, grid, rng), f.moved(X, 0.5))


# --- catalogue listing ----------------------------------------------------------


def test_catalog_rows():
    rows = C.catalog()
    assert len(rows) == 16
    names = [r.name for r in rows]
    assert len(set(names)) == len(names)
    status = {r.name: r.status for r in rows}
    assert status["μ"] == "descended-only" and status["∇"] == "descended-only"
    assert len(C.catalog(extras=True)) == 16 + len(C.EXTRAS)


def test_catalog_json_round_trip():
    doc = json.dumps([r.to_dict() for r in C.catalog(extras=True)], ensure_ascii=False)
    back = json.loads(doc)
    assert [d["name"] for d in back] == [r.name for r in C.catalog(extras=True)]
    assert all(set(d) >= {"name", "space", "degree", "location"} for d in back)


def test_catalog_builders_match_space_and_degree():
    for row in C.catalog(extras=True):
        if row.builder is None:
            continue
        form = row.builder(SU3)
        if isinstance(form, F.FormEvaluator):
            assert form.degree == row.degree
            assert form.space.name == row.space
