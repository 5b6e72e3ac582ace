import numpy as np
from hypothesis import given, settings, strategies as st

from csgerbe import bundle as Bm
from csgerbe import catalog as C
from csgerbe import checks as K
from csgerbe import lie
from csgerbe import paths as P

from conftest import ALL_GROUPS, SU2, SU3, rel

seeds = st.integers(0, 2 ** 32 - 1)
groups = st.sampled_from(ALL_GROUPS)
small = settings(max_examples=15, deadline=None)
tiny = settings(max_examples=5, deadline=None)
GRID = P.GridSpec(128)


def _alg(spec, rng, n):
    return [lie.random_algebra(spec, rng) for _ in range(n)]


@small
@given(groups, seeds)
def test_killing_form_ad_invariant(spec, seed):
    X, Y, Z = _alg(spec, np.random.default_rng(seed), 3)
    err = lie.killing_form(lie.bracket(X, Y), Z, spec) + lie.killing_form(Y, lie.bracket(X, Z), spec)
    assert abs(err) <= 1e-12 * max(1.0, abs(lie.killing_form(lie.bracket(X, Y), Z, spec)))


@small
@given(groups, seeds)
def test_killing_form_Ad_invariant(spec, seed):
    rng = np.random.default_rng(seed)
    X, Y = _alg(spec, rng, 2)
    g = lie.random_group(spec, rng)
    a, b = lie.killing_form(lie.Ad(g, X), lie.Ad(g, Y), spec), lie.killing_form(X, Y, spec)
    assert abs(a - b) <= 1e-10 * max(abs(b), 1.0)


@small
@given(groups, seeds)
def test_exp_inverse(spec, seed):
    (X,) = _alg(spec, np.random.default_rng(seed), 1)
    prod = lie.exp(X, spec) @ lie.exp(-X, spec)
    assert np.max(np.abs(prod - np.eye(spec.matrix_size))) <= 1e-10


@small
@given(groups, seeds)
def test_jacobi(spec, seed):
    X, Y, Z = _alg(spec, np.random.default_rng(seed), 3)
    b = lie.bracket
    J = b(X, b(Y, Z)) + b(Y, b(Z, X)) + b(Z, b(X, Y))
    assert np.max(np.abs(J)) <= 1e-12 * max(1.0, np.max(np.abs(X)) ** 3 * 10)


@tiny
@given(st.sampled_from([SU2, SU3]), seeds)
def test_Ad_d_theta_is_d_phi_hat(spec, seed):
    rng = np.random.default_rng(seed)
    g = P.random_loop(spec, GRID, rng)
    X = P.random_tangent(spec, GRID, rng, P.LOOP)
    s = 1e-4
    d = (P.higgs_hat(P.move_path(g, X, s)) - P.higgs_hat(P.move_path(g, X, -s))) / (2 * s)
    assert rel(d, lie.Ad(g.values, X.derivative)) <= 1e-5


@tiny
@given(st.sampled_from([SU2, SU3]), seeds)
def test_d_theta_hat_identity(spec, seed):
    # the grid derivative of Ad_γ X is fourth order in the interior, so the
    # finite-difference side uses a finer grid than the rest of the suite
    grid = P.GridSpec(512)
    rng = np.random.default_rng(seed)
    g = P.random_loop(spec, grid, rng)
    X = P.random_tangent(spec, grid, rng, P.LOOP)
    th_hat = lie.Ad(g.values, X.values)
    rhs = lie.Ad(g.values, X.derivative) - lie.bracket(th_hat, P.higgs_hat(g))
    assert rel(P.theta_derivative(th_hat, P.LOOP), rhs) <= 1e-5
    gi = np.linalg.inv(g.values)
    exact = g.dtheta @ X.values @ gi + g.values @ X.derivative @ gi - th_hat @ g.dtheta @ gi
    assert rel(exact, rhs) <= 1e-12


@small
@given(groups, seeds)
def test_higgs_of_product(spec, seed):
    rng = np.random.default_rng(seed)
    p, q = P.random_path(spec, GRID, rng), P.random_path(spec, GRID, rng)
    lhs = P.higgs(P.path_multiply(p, q))
    rhs = P.higgs(q) + lie.Ad_inv(q.values, P.higgs(p))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))


def _alternating_forms(spec):
    out = [e.builder(spec) for e in C.catalog(extras=True) if e.builder is not None]
    bm = Bm.BundleModel.random(spec, 3, seed=4)
    out += [Bm.form_beta_A(bm), Bm.form_cs(bm), Bm.form_F_A(bm)]
    return [f for f in out if f.degree >= 2]


@tiny
@given(seeds)
def test_catalog_forms_alternate(seed):
    cfg = K.CheckConfig(seed=seed % 2 ** 31, m=3)
    for form in _alternating_forms(SU2):
        smp = K.Sampler(cfg, form.name)
        x = smp.point(form.space)
        V = [smp.tangent(form.space) for _ in range(form.degree)]
        a = form(x, *V)
        swapped = [V[1], V[0]] + V[2:]
        b = form(x, *swapped)
        assert np.max(np.abs(np.asarray(a) + np.asarray(b))) <= 1e-10 * max(1.0, np.max(np.abs(a))), form.name


def _one_forms(spec):
    out = [e.builder(spec) for e in C.catalog(extras=True) if e.builder is not None]
    bm = Bm.BundleModel.random(spec, 3, seed=4)
    out += [Bm.form_alpha(spec), Bm.form_A(bm)]
    return [f for f in out if f.degree == 1]


@tiny
@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_one_forms_linear(seed, a, b):
    cfg = K.CheckConfig(seed=seed % 2 ** 31, m=3)
    for form in _one_forms(SU2):
        smp = K.Sampler(cfg, form.name)
        x = smp.point(form.space)
        U, W = smp.tangent(form.space), smp.tangent(form.space)
        comb = tuple(a * u + b * w for u, w in zip(U, W))
        lhs = np.asarray(form(x, comb))
        rhs = a * np.asarray(form(x, U)) + b * np.asarray(form(x, W))
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs))), form.name
