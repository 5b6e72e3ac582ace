import numpy as np
import pytest

from csgerbe import lie
from csgerbe import paths as P
from csgerbe.lie import GroupSpec

SU2 = GroupSpec("SU", 2)
SU3 = GroupSpec("SU", 3)
SO5 = GroupSpec("SO", 5)
ALL_GROUPS = [GroupSpec.parse(n) for n in ("su2", "su3", "so3", "so5", "sp1")]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid():
    return P.GridSpec(128)


def rel(a, b, scale=None):
    a, b = np.asarray(a), np.asarray(b)
    s = scale if scale is not None else max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
    return float(np.max(np.abs(a - b), initial=0.0) / s)


def diag_x():
    return np.diag([1j, -1j])


def killing_direct(X, Y, spec):
    # independent oracle: c · Re tr(XY) summed over leading grid axes
    return spec.killing_coefficient * np.real(np.einsum("...ij,...ji->...", X, Y))


def random_point_tangent_G(spec, rng, k):
    g = lie.random_group(spec, rng)
    return (g,), [(lie.random_algebra(spec, rng),) for _ in range(k)]
