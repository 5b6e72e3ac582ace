"""Compact matrix Lie groups SU(n), SO(n), Sp(n) and their algebras.

Group elements and algebra elements are plain numpy arrays.  Every function
here broadcasts over leading axes, so an array of shape ``(N + 1, d, d)``
(a sampled path) is handled the same way as a single ``(d, d)`` matrix.

Sp(n) is represented by its image in U(2n) under the embedding
``A + jB -> [[A, -conj(B)], [B, conj(A)]]``; its reduced trace is the ordinary
trace of that complex matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import re

import numpy as np
from scipy.linalg import expm as _expm

from .errors import InvalidInput

FAMILIES = ("SU", "SO", "Sp")

GROUP_DRIFT_TOL = 1e-9


@dataclass(frozen=True)
class GroupSpec:
    """A compact simple matrix group together with its normalised pairing.

    ``killing_coefficient`` is the scalar ``c`` such that
    ``<X, Y> = c * Re tr(X Y)`` (for Sp(n) the trace is the reduced trace).
    """

    family: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInput(f"unknown group family {self.family!r}")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InvalidInput(f"rank parameter must be a positive integer, got {self.n!r}")
        if self.family == "SU" and self.n < 2:
            raise InvalidInput("SU(n) needs n >= 2")
        if self.family == "SO" and not (self.n == 3 or self.n >= 5):
            raise InvalidInput("SO(n) is supported for n = 3 and n >= 5 only")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse names such as ``su2``, ``SO(5)`` or ``sp1``."""
        m = re.fullmatch(r"\s*(su|so|sp)\s*\(?\s*(\d+)\s*\)?\s*", text, re.IGNORECASE)
        if m is None:
            raise InvalidInput(f"cannot parse group name {text!r}")
        family = {"su": "SU", "so": "SO", "sp": "Sp"}[m.group(1).lower()]
        return cls(family, int(m.group(2)))

    @property
    def name(self) -> str:
        return f"{self.family.lower()}{self.n}"

    @property
    def matrix_size(self) -> int:
        return 2 * self.n if self.family == "Sp" else self.n

    @property
    def dtype(self):
        return np.float64 if self.family == "SO" else np.complex128

    @property
    def killing_coefficient(self) -> float:
        if self.family == "SO":
            return -1.0 / (16 * np.pi) if self.n == 3 else -1.0 / (8 * np.pi)
        return -1.0 / (4 * np.pi)

    @property
    def dim(self) -> int:
        n = self.n
        return {"SU": n * n - 1, "SO": n * (n - 1) // 2, "Sp": n * (2 * n + 1)}[self.family]

    def identity(self) -> np.ndarray:
        return np.eye(self.matrix_size, dtype=self.dtype)

    @cached_property
    def basis(self) -> np.ndarray:
        """Real-orthonormal basis of the algebra, shape ``(dim, d, d)``."""
        return _algebra_basis(self)

    @cached_property
    def symplectic_form(self) -> np.ndarray:
        n = self.n
        J = np.zeros((2 * n, 2 * n))
        J[:n, n:] = -np.eye(n)
        J[n:, :n] = np.eye(n)
        return J


def _check_pair(X, Y):
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape[-2:] != Y.shape[-2:] or X.shape[-1] != X.shape[-2]:
        raise InvalidInput(f"dimension mismatch: {X.shape} vs {Y.shape}")
    return X, Y


def dagger(g):
    return np.swapaxes(np.conj(g), -1, -2)


def group_inverse(g):
    """Inverse of a compact-group element (its conjugate transpose)."""
    return dagger(g)


def killing_form(X, Y, spec: GroupSpec):
    """Normalised Cartan-Killing pairing ``c * Re tr(X Y)``.

    >>> spec = GroupSpec("SU", 2)
    >>> X = np.diag([1j, -1j])
    >>> round(killing_form(X, X, spec) * 2 * np.pi, 12)
    1.0
    """
    X, Y = _check_pair(X, Y)
    if X.shape[-1] != spec.matrix_size:
        raise InvalidInput(f"matrices of size {X.shape[-1]} do not belong to {spec.name}")
    tr = np.einsum("...ij,...ji->...", X, Y)
    return spec.killing_coefficient * np.real(tr)


def bracket(X, Y):
    X, Y = _check_pair(X, Y)
    return X @ Y - Y @ X


def Ad(g, X):
    """``g X g^{-1}``."""
    g, X = _check_pair(g, X)
    return g @ X @ group_inverse(g)


def Ad_inv(g, X):
    """``g^{-1} X g``."""
    g, X = _check_pair(g, X)
    return group_inverse(g) @ X @ g


def maurer_cartan_left(g, X):
    # Tangents are stored in left representation: the vector g X.
    return np.asarray(X)


def maurer_cartan_right(g, X):
    return Ad(g, X)


def project_algebra(X, spec: GroupSpec):
    X = np.asarray(X)
    if spec.family == "SO":
        X = np.real(X)
        return 0.5 * (X - np.swapaxes(X, -1, -2))
    A = 0.5 * (X - dagger(X))
    if spec.family == "SU":
        tr = np.trace(A, axis1=-2, axis2=-1) / spec.n
        return A - tr[..., None, None] * np.eye(spec.n)
    J = spec.symplectic_form
    return 0.5 * (A + J @ np.conj(A) @ J.T)


def in_algebra(X, spec: GroupSpec, tol: float = 1e-12) -> bool:
    X = np.asarray(X)
    if X.shape[-1] != spec.matrix_size:
        return False
    err = np.max(np.abs(X - project_algebra(X, spec)), initial=0.0)
    return bool(err <= tol * max(1.0, np.max(np.abs(X), initial=0.0)))


def group_drift(g, spec: GroupSpec) -> float:
    """Largest violation of the group constraints among the given matrices."""
    g = np.asarray(g)
    eye = np.eye(spec.matrix_size)
    drift = np.max(np.abs(dagger(g) @ g - eye), initial=0.0)
    if spec.family == "SO":
        drift = max(drift, np.max(np.abs(np.imag(g)), initial=0.0))
    if spec.family in ("SU", "SO"):
        drift = max(drift, np.max(np.abs(np.linalg.det(g) - 1.0), initial=0.0))
    if spec.family == "Sp":
        J = spec.symplectic_form
        drift = max(drift, np.max(np.abs(g @ J - J @ np.conj(g)), initial=0.0))
    return float(drift)


def in_group(g, spec: GroupSpec, tol: float = 1e-10) -> bool:
    g = np.asarray(g)
    if g.shape[-1] != spec.matrix_size or g.shape[-2] != spec.matrix_size:
        return False
    return group_drift(g, spec) <= tol


def _polar(g):
    U, _, Vh = np.linalg.svd(g)
    return U @ Vh


def project_group(g, spec: GroupSpec):
    """Nearest group element (polar factor, then determinant/quaternionic fix)."""
    g = _polar(np.asarray(g, dtype=spec.dtype))
    if spec.family == "SU":
        phase = np.angle(np.linalg.det(g)) / spec.n
        g = g * np.exp(-1j * phase)[..., None, None]
    elif spec.family == "Sp":
        J = spec.symplectic_form
        for _ in range(2):
            g = _polar(0.5 * (g + J @ np.conj(g) @ J.T))
    return g


def exp(X, spec: GroupSpec | None = None):
    """Matrix exponential; with ``spec`` the result is re-projected on drift."""
    g = _expm(np.asarray(X))
    if spec is not None:
        g = g.astype(spec.dtype, copy=False)
        if group_drift(g, spec) > GROUP_DRIFT_TOL:
            g = project_group(g, spec)
    return g


def expm_jet(V, W):
    """Return ``(exp(V), d/ds exp(V + s W) at s = 0)`` for batched matrices.

    Uses the block identity exp([[V, W], [0, V]]) = [[e^V, D], [0, e^V]].
    """
    V, W = _check_pair(V, W)
    d = V.shape[-1]
    lead = np.broadcast_shapes(V.shape[:-2], W.shape[:-2])
    dtype = np.result_type(V.dtype, W.dtype)
    big = np.zeros(lead + (2 * d, 2 * d), dtype=dtype)
    big[..., :d, :d] = V
    big[..., d:, d:] = V
    big[..., :d, d:] = W
    E = _expm(big)
    return E[..., :d, :d], E[..., :d, d:]


def _algebra_basis(spec: GroupSpec) -> np.ndarray:
    d = spec.matrix_size
    span = []
    for j in range(d):
        for k in range(j + 1, d):
            E = np.zeros((d, d), dtype=spec.dtype)
            E[j, k], E[k, j] = 1.0, -1.0
            span.append(E)
            if spec.family != "SO":
                span.append(1j * np.abs(E))
        if spec.family != "SO":
            E = np.zeros((d, d), dtype=complex)
            E[j, j] = 1j
            span.append(E)
    span = project_algebra(np.array(span), spec)
    flat = span.reshape(len(span), -1)
    real = np.concatenate([flat.real, flat.imag], axis=1) if np.iscomplexobj(flat) else flat
    _, s, Vh = np.linalg.svd(real, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    if rank != spec.dim:
        raise AssertionError(f"basis rank {rank} != dim {spec.dim} for {spec.name}")
    vecs = Vh[:rank]
    if np.iscomplexobj(flat):
        m = d * d
        vecs = vecs[:, :m] + 1j * vecs[:, m:]
    return vecs.reshape(rank, d, d).astype(spec.dtype)


def random_algebra(spec: GroupSpec, rng: np.random.Generator, size=(), scale: float = 1.0):
    """Gaussian entries projected to the algebra."""
    if isinstance(size, int):
        size = (size,)
    shape = tuple(size) + (spec.matrix_size, spec.matrix_size)
    X = rng.standard_normal(shape)
    if spec.family != "SO":
        X = X + 1j * rng.standard_normal(shape)
    return scale * project_algebra(X, spec)


def random_group(spec: GroupSpec, rng: np.random.Generator, size=(), scale: float = 1.5):
    return exp(random_algebra(spec, rng, size=size, scale=scale), spec)


def coordinates(X, spec: GroupSpec):
    """Components of ``X`` in ``spec.basis`` (real inner product Re tr(E^dag X))."""
    B = spec.basis
    return np.real(np.einsum("bij,...ij->...b", np.conj(B), np.asarray(X)))


def from_coordinates(c, spec: GroupSpec):
    return np.einsum("...b,bij->...ij", np.asarray(c), spec.basis)
