import numpy as np
import pytest

from csgerbe import lie
from csgerbe.errors import InvalidInput
from csgerbe.lie import GroupSpec

from conftest import ALL_GROUPS, SU2, diag_x, killing_direct


def test_killing_su2_diag():
    X = diag_x()
    assert lie.killing_form(X, X, SU2) == pytest.approx(1 / (2 * np.pi), rel=1e-14)
    assert lie.killing_form(X, X, SU2) == pytest.approx(0.159155, abs=1e-6)


def test_killing_basic_inner_product_coroot():
    X = diag_x()
    assert 4 * np.pi * lie.killing_form(X, X, SU2) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("spec", ALL_GROUPS, ids=lambda s: s.name)
def test_killing_zero_and_direct(spec, rng):
    X = lie.random_algebra(spec, rng)
    Y = lie.random_algebra(spec, rng)
    assert lie.killing_form(X, np.zeros_like(X), spec) == 0.0
    assert lie.killing_form(X, Y, spec) == pytest.approx(killing_direct(X, Y, spec), rel=1e-13)
    assert lie.killing_form(X, Y, spec) == pytest.approx(lie.killing_form(Y, X, spec), rel=1e-13)


@pytest.mark.parametrize("name,coef", [("su2", -1 / (4 * np.pi)), ("su4", -1 / (4 * np.pi)),
                                       ("so3", -1 / (16 * np.pi)), ("so5", -1 / (8 * np.pi)),
                                       ("so7", -1 / (8 * np.pi)), ("sp2", -1 / (4 * np.pi))])
def test_killing_coefficients(name, coef):
    assert GroupSpec.parse(name).killing_coefficient == pytest.approx(coef, rel=1e-15)


def test_killing_dimension_mismatch():
    with pytest.raises(InvalidInput):
        lie.killing_form(np.zeros((2, 2)), np.zeros((3, 3)), SU2)


def test_group_spec_validation():
    assert GroupSpec.parse("SO(5)") == GroupSpec("SO", 5)
    for bad in ("su1", "so4", "xx3", "so2"):
        with pytest.raises(InvalidInput):
            GroupSpec.parse(bad)


@pytest.mark.parametrize("spec", ALL_GROUPS, ids=lambda s: s.name)
def test_basis_dimension_and_membership(spec):
    B = spec.basis
    assert B.shape == (spec.dim, spec.matrix_size, spec.matrix_size)
    assert all(lie.in_algebra(E, spec) for E in B)
    # the basis is real-orthonormal for Re tr(X^† Y)
    gram = np.real(np.einsum("aij,bij->ab", B.conj(), B))
    assert np.allclose(gram, np.eye(spec.dim), atol=1e-12)


def test_bracket_and_ad_trivial(rng):
    X = lie.random_algebra(SU2, rng)
    assert np.max(np.abs(lie.bracket(X, X))) == 0.0
    assert np.allclose(lie.Ad(np.eye(2), X), X, atol=0, rtol=0)


def test_exp_pi_diag_is_minus_identity():
    g = lie.exp(np.pi * diag_x(), SU2)
    assert np.max(np.abs(g + np.eye(2))) < 1e-14


def test_maurer_cartan_forms(rng):
    g = lie.random_group(SU2, rng)
    X = lie.random_algebra(SU2, rng)
    assert np.allclose(lie.maurer_cartan_left(g, X), X, atol=1e-15)
    assert np.allclose(lie.maurer_cartan_right(np.eye(2), X), X, atol=1e-15)


def test_maurer_cartan_right_conjugation_oracle():
    g = np.diag([np.exp(1j * np.pi / 2), np.exp(-1j * np.pi / 2)])  # exp((π/2) diag(i, -i))
    X = np.array([[0, 1], [-1, 0]], dtype=complex)
    expected = g @ X @ np.linalg.inv(g)
    assert np.max(np.abs(lie.maurer_cartan_right(lie.exp((np.pi / 2) * diag_x(), SU2), X) - expected)) < 1e-14


@pytest.mark.parametrize("spec", ALL_GROUPS, ids=lambda s: s.name)
def test_random_elements_lie_in_group_and_algebra(spec, rng):
    X = lie.random_algebra(spec, rng)
    g = lie.random_group(spec, rng)
    assert lie.in_algebra(X, spec)
    assert lie.in_group(g, spec)
    assert not lie.in_group(2.0 * g, spec)


@pytest.mark.parametrize("spec", ALL_GROUPS, ids=lambda s: s.name)
def test_project_group_repairs_drift(spec, rng):
    g = lie.random_group(spec, rng)
    noisy = g + 1e-6 * rng.standard_normal(g.shape)
    assert lie.group_drift(noisy, spec) > 1e-9
    fixed = lie.project_group(noisy, spec)
    assert lie.in_group(fixed, spec)
    assert np.max(np.abs(fixed - g)) < 1e-5


def test_coordinates_round_trip(rng):
    for spec in ALL_GROUPS:
        X = lie.random_algebra(spec, rng)
        assert np.allclose(lie.from_coordinates(lie.coordinates(X, spec), spec), X, atol=1e-13)


def test_expm_jet_matches_finite_difference(rng):
    V = lie.random_algebra(SU2, rng)
    W = lie.random_algebra(SU2, rng)
    E, dE = lie.expm_jet(V, W)
    h = 1e-6
    fd = (lie.exp(V + h * W) - lie.exp(V - h * W)) / (2 * h)
    assert np.allclose(E, lie.exp(V), atol=1e-14)
    assert np.max(np.abs(dE - fd)) < 1e-8
