"""Discretised based path group PG and loop group ΩG.

A path is sampled at the nodes ``θ_k = 2πk/N``, ``k = 0..N``.  Besides its
samples a path may carry the exact θ-derivative of its matrix entries; every
group operation propagates that derivative by the product rule, so Higgs
fields of products, inverses and conjugates stay exact up to round-off.  Paths
built from raw samples fall back to fourth-order finite differences.

Tangent vectors are stored in left representation: the coefficient ``X`` of
the tangent ``θ ↦ p(θ) X(θ)`` at ``p``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import lie
from .errors import GridTooCoarse, InvalidInput
from .lie import GroupSpec

TWO_PI = 2.0 * np.pi

PATH = "path"
LOOP = "loop"

MIN_FD_N = 8
GREGORY_ORDER = 6


@dataclass(frozen=True)
class GridSpec:
    N: int

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 16 or self.N % 2:
            raise InvalidInput(f"grid size must be an even integer >= 16, got {self.N!r}")

    @property
    def h(self) -> float:
        return TWO_PI / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        return TWO_PI * np.arange(self.N + 1) / self.N


def _check_kind(kind):
    if kind not in (PATH, LOOP):
        raise InvalidInput(f"kind must be 'path' or 'loop', got {kind!r}")


# --- θ-derivative -----------------------------------------------------------

_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
# six-point one-sided stencils (fifth order); the five-point ones carry an
# h^4/5 error constant that dominates the whole grid
_EDGE0 = np.array([-137.0, 300.0, -300.0, 200.0, -75.0, 12.0]) / 60.0
_EDGE1 = np.array([-12.0, -65.0, 120.0, -60.0, 20.0, -3.0]) / 60.0


def theta_derivative(values, kind: str = PATH) -> np.ndarray:
    """Fourth-order finite-difference derivative along axis 0 on [0, 2π].

    Loops use the periodic centred stencil; based paths use the centred
    stencil in the interior and six-point one-sided stencils at k in {0, 1, N-1, N}.
    """
    _check_kind(kind)
    f = np.asarray(values)
    N = f.shape[0] - 1
    if N < MIN_FD_N:
        raise GridTooCoarse(f"need at least {MIN_FD_N} intervals, got {N}")
    h = TWO_PI / N
    out = np.empty_like(f)
    if kind == LOOP:
        g = f[:N]
        d = sum(c * np.roll(g, 2 - j, axis=0) for j, c in enumerate(_CENTRAL) if c)
        out[:N] = d / h
        out[N] = out[0]
        return out
    out[2:N - 1] = sum(c * f[j:N - 3 + j] for j, c in enumerate(_CENTRAL) if c) / h
    out[0] = np.tensordot(_EDGE0, f[:6], axes=1) / h
    out[1] = np.tensordot(_EDGE1, f[:6], axes=1) / h
    out[N] = -np.tensordot(_EDGE0, f[::-1][:6], axes=1) / h
    out[N - 1] = -np.tensordot(_EDGE1, f[::-1][:6], axes=1) / h
    return out


# --- quadrature -------------------------------------------------------------

_GREGORY = (1 / 12, 1 / 24, 19 / 720, 3 / 160, 863 / 60480, 275 / 24192, 33953 / 3628800)


@lru_cache(maxsize=None)
def _path_weights(N: int, order: int) -> np.ndarray:
    from math import comb

    order = min(order, N // 2 - 1)
    w = np.ones(N + 1)
    w[0] = w[N] = 0.5
    for k in range(1, order + 1):
        c = _GREGORY[k - 1]
        for j in range(k + 1):
            # forward differences at θ=0, backward differences at θ=2π
            w[j] += c * (-1) ** (k - j) * comb(k, j) * (1 if k % 2 else -1)
            w[N - j] -= c * (-1) ** j * comb(k, j)
    w.setflags(write=False)
    return w


def quadrature(values, kind: str = PATH) -> np.ndarray:
    """Integrate grid samples over [0, 2π] along axis 0.

    ``loop``: periodic trapezoid (endpoints identified).  ``path``: composite
    trapezoid with Gregory end corrections, exact for polynomials of degree
    <= 7 so that non-periodic integrands keep pace with the derivative
    stencils.
    """
    _check_kind(kind)
    f = np.asarray(values)
    N = f.shape[0] - 1
    h = TWO_PI / N
    if kind == LOOP:
        return h * (0.5 * (f[0] + f[N]) + f[1:N].sum(axis=0))
    return h * np.tensordot(_path_weights(N, GREGORY_ORDER), f, axes=1)


# --- tangents ---------------------------------------------------------------


class PathTangent:
    """Algebra-valued grid ``X_k`` (left representation) with optional exact θ-derivative."""

    __slots__ = ("values", "dtheta", "kind")

    def __init__(self, values, dtheta=None, kind: str = PATH):
        _check_kind(kind)
        self.values = np.asarray(values)
        self.dtheta = None if dtheta is None else np.asarray(dtheta)
        self.kind = kind
        if self.values.ndim != 3:
            raise InvalidInput("tangent samples must have shape (N+1, d, d)")
        if self.dtheta is not None and self.dtheta.shape != self.values.shape:
            raise InvalidInput("derivative samples must match tangent samples")

    @property
    def N(self) -> int:
        return self.values.shape[0] - 1

    @property
    def derivative(self) -> np.ndarray:
        if self.dtheta is not None:
            return self.dtheta
        return theta_derivative(self.values, self.kind)

    @property
    def end(self) -> np.ndarray:
        return self.values[-1]

    def _combine_kind(self, other):
        return LOOP if self.kind == LOOP and other.kind == LOOP else PATH

    def __add__(self, other: "PathTangent") -> "PathTangent":
        d = None if self.dtheta is None or other.dtheta is None else self.dtheta + other.dtheta
        return PathTangent(self.values + other.values, d, self._combine_kind(other))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, c):
        d = None if self.dtheta is None else c * self.dtheta
        return PathTangent(c * self.values, d, self.kind)

    __rmul__ = __mul__

    def __repr__(self):
        return f"PathTangent(kind={self.kind}, N={self.N}, d={self.values.shape[-1]})"


def tangent_bracket(X: PathTangent, Y: PathTangent) -> PathTangent:
    vals = lie.bracket(X.values, Y.values)
    d = None
    if X.dtheta is not None and Y.dtheta is not None:
        d = lie.bracket(X.dtheta, Y.values) + lie.bracket(X.values, Y.dtheta)
    return PathTangent(vals, d, X._combine_kind(Y))


def tangent_pairing(X: PathTangent, Y, spec: GroupSpec) -> np.ndarray:
    """Pointwise ``<X(θ), Y(θ)>`` as a real grid."""
    Yv = Y.values if isinstance(Y, PathTangent) else Y
    return lie.killing_form(X.values, Yv, spec)


def zero_tangent(p: "SampledPath") -> PathTangent:
    z = np.zeros_like(p.values)
    return PathTangent(z, z.copy(), p.kind)


# --- sampled paths ----------------------------------------------------------


class SampledPath:
    """A based path ``p`` with ``p(0) = 1`` sampled on a uniform grid."""

    kind = PATH

    def __init__(self, spec: GroupSpec, values, dtheta=None, check: bool = True):
        self.spec = spec
        self.values = np.asarray(values, dtype=spec.dtype)
        self.dtheta = None if dtheta is None else np.asarray(dtheta, dtype=spec.dtype)
        d = spec.matrix_size
        if self.values.ndim != 3 or self.values.shape[1:] != (d, d):
            raise InvalidInput(f"path samples must have shape (N+1, {d}, {d})")
        if self.dtheta is not None and self.dtheta.shape != self.values.shape:
            raise InvalidInput("derivative samples must match path samples")
        if check:
            self._validate()

    def _validate(self):
        eye = np.eye(self.spec.matrix_size)
        if np.max(np.abs(self.values[0] - eye)) > 1e-10:
            raise InvalidInput("a based path must start at the identity")
        if not lie.in_group(self.values, self.spec, 1e-10):
            raise InvalidInput("path samples leave the group")

    @property
    def N(self) -> int:
        return self.values.shape[0] - 1

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.N)

    @property
    def end(self) -> np.ndarray:
        return self.values[-1]

    @cached_property
    def inverse_values(self) -> np.ndarray:
        return lie.group_inverse(self.values)

    @cached_property
    def matrix_derivative(self) -> np.ndarray:
        if self.dtheta is not None:
            return self.dtheta
        return theta_derivative(self.values, self.kind)

    @cached_property
    def phi(self) -> np.ndarray:
        return lie.project_algebra(self.inverse_values @ self.matrix_derivative, self.spec)

    @cached_property
    def phi_hat(self) -> np.ndarray:
        return lie.project_algebra(self.matrix_derivative @ self.inverse_values, self.spec)

    def __repr__(self):
        return f"{type(self).__name__}({self.spec.name}, N={self.N})"


class SampledLoop(SampledPath):
    """A based loop: additionally ``γ(2π) = 1``; treated as periodic."""

    kind = LOOP

    def _validate(self):
        super()._validate()
        eye = np.eye(self.spec.matrix_size)
        if np.max(np.abs(self.values[-1] - eye)) > 1e-10:
            raise InvalidInput("a loop must return to the identity at 2π")


def _make(spec, values, dtheta, loop: bool, check: bool = False):
    cls = SampledLoop if loop else SampledPath
    return cls(spec, values, dtheta, check=check)


def _same_grid(p, q):
    if p.spec != q.spec or p.values.shape != q.values.shape:
        raise InvalidInput("paths live on different groups or grids")


def higgs(p: SampledPath) -> np.ndarray:
    """Higgs field ``φ_p = p^{-1} ∂p`` on the grid."""
    return p.phi


def higgs_hat(p: SampledPath) -> np.ndarray:
    """``φ̂_p = Ad_p φ_p = ∂p p^{-1}``."""
    return p.phi_hat


def path_multiply(p: SampledPath, q: SampledPath) -> SampledPath:
    _same_grid(p, q)
    vals = p.values @ q.values
    d = None
    if p.dtheta is not None and q.dtheta is not None:
        d = p.dtheta @ q.values + p.values @ q.dtheta
    return _make(p.spec, vals, d, p.kind == LOOP and q.kind == LOOP)


def path_inverse(p: SampledPath) -> SampledPath:
    inv = p.inverse_values
    d = None if p.dtheta is None else -inv @ p.dtheta @ inv
    return _make(p.spec, inv, d, p.kind == LOOP)


def loop_adjoint_action(q: SampledPath, gamma: SampledLoop) -> SampledLoop:
    """Pointwise conjugation ``(q γ q^{-1})(θ)``."""
    if gamma.kind != LOOP:
        raise InvalidInput("the adjoint action acts on loops")
    out = path_multiply(path_multiply(q, gamma), path_inverse(q))
    return _make(q.spec, out.values, out.dtheta, True)


def semidirect_multiply(p, gamma, q, eta):
    """Multiplication of PG ⋉ ΩG: ``(pq, Ad_{q^{-1}}(γ) η)``."""
    return path_multiply(p, q), path_multiply(loop_adjoint_action(path_inverse(q), gamma), eta)


def tangent_Ad(p: SampledPath, X: PathTangent) -> PathTangent:
    """``Ad_p X`` with θ-derivative ``Ad_p(∂X + [φ_p, X])``."""
    vals = p.values @ X.values @ p.inverse_values
    d = None
    if X.dtheta is not None and p.dtheta is not None:
        d = p.values @ (X.dtheta + lie.bracket(p.phi, X.values)) @ p.inverse_values
    return PathTangent(vals, d, X.kind)


def tangent_Ad_inv(p: SampledPath, X: PathTangent) -> PathTangent:
    """``Ad_{p^{-1}} X`` with θ-derivative ``Ad_{p^{-1}}∂X + [Ad_{p^{-1}}X, φ_p]``."""
    vals = p.inverse_values @ X.values @ p.values
    d = None
    if X.dtheta is not None and p.dtheta is not None:
        d = p.inverse_values @ X.dtheta @ p.values + lie.bracket(vals, p.phi)
    return PathTangent(vals, d, X.kind)


def exp_path(spec: GroupSpec, v: PathTangent, loop: bool | None = None) -> SampledPath:
    """Pointwise exponential ``θ ↦ exp(v(θ))`` with exact θ-derivative."""
    if loop is None:
        loop = v.kind == LOOP
    E, dE = lie.expm_jet(v.values, v.derivative)
    E = E.astype(spec.dtype, copy=False)
    if lie.group_drift(E, spec) > lie.GROUP_DRIFT_TOL:
        E = lie.project_group(E, spec)
    return _make(spec, E, dE.astype(spec.dtype, copy=False), loop)


def move_path(p: SampledPath, X: PathTangent, s: float) -> SampledPath:
    """The point ``p · exp(s X)`` of the left-invariant flow."""
    return path_multiply(p, exp_path(p.spec, s * X, loop=p.kind == LOOP))


def identity_path(spec: GroupSpec, grid: GridSpec, loop: bool = False) -> SampledPath:
    vals = np.broadcast_to(spec.identity(), (grid.N + 1,) + spec.identity().shape).copy()
    return _make(spec, vals, np.zeros_like(vals), loop)


def identity_loop(spec: GroupSpec, grid: GridSpec) -> SampledLoop:
    return identity_path(spec, grid, loop=True)


def one_parameter_path(spec: GroupSpec, grid: GridSpec, X) -> SampledPath:
    """``p(θ) = exp(θ X)``, whose Higgs field is constantly ``X``."""
    th = grid.nodes[:, None, None]
    X = np.asarray(X)
    v = PathTangent(th * X, np.broadcast_to(X, (grid.N + 1,) + X.shape).copy())
    return exp_path(spec, v, loop=False)


# --- random smooth data -----------------------------------------------------


def random_series(spec: GroupSpec, grid: GridSpec, rng: np.random.Generator,
                  kind: str = PATH, modes: int = 3, scale: float = 0.5) -> PathTangent:
    """Random algebra-valued ``v(θ)`` vanishing at 0 (and at 2π for loops).

    ``v(θ) = Σ_m [a_m sin(mθ) + b_m (1 - cos(mθ))]`` with Gaussian algebra
    coefficients damped like 1/m; paths get an extra ``c θ/2π`` term so the
    endpoint is generic.
    """
    _check_kind(kind)
    if not 1 <= modes <= 5:
        raise InvalidInput("modes must be between 1 and 5")
    th = grid.nodes[:, None, None]
    vals = np.zeros((grid.N + 1, spec.matrix_size, spec.matrix_size), dtype=spec.dtype)
    ders = np.zeros_like(vals)
    for m in range(1, modes + 1):
        a = lie.random_algebra(spec, rng, scale=scale / m)
        b = lie.random_algebra(spec, rng, scale=scale / m)
        vals += a * np.sin(m * th) + b * (1.0 - np.cos(m * th))
        ders += m * (a * np.cos(m * th) + b * np.sin(m * th))
    if kind == PATH:
        c = lie.random_algebra(spec, rng, scale=scale)
        vals += c * th / TWO_PI
        ders += c / TWO_PI
    return PathTangent(vals, ders, kind)


def random_path(spec, grid, rng, modes: int = 3, scale: float = 0.5) -> SampledPath:
    return exp_path(spec, random_series(spec, grid, rng, PATH, modes, scale), loop=False)


def random_loop(spec, grid, rng, modes: int = 3, scale: float = 0.5) -> SampledLoop:
    return exp_path(spec, random_series(spec, grid, rng, LOOP, modes, scale), loop=True)


def random_tangent(spec, grid, rng, kind: str = PATH, modes: int = 3, scale: float = 1.0) -> PathTangent:
    return random_series(spec, grid, rng, kind, modes, scale)


# --- paths of loops (PΩG) ---------------------------------------------------

_T_FREQS = (0.3, 0.55, 0.8)


def _t_profile(j, t):
    c = _T_FREQS[j]
    return np.sin(c * t), c * np.cos(c * t)


class LoopFamilyTangent:
    """Tangent to PΩG: a t-indexed family of loop tangents vanishing at t = 0.

    ``at(t)`` returns the loop tangent at time t and ``dt(t)`` the t-derivative
    of its samples.
    """

    def __init__(self, at, dt):
        self._at = at
        self._dt = dt

    def at(self, t: float) -> PathTangent:
        return self._at(t)

    def dt(self, t: float) -> np.ndarray:
        return self._dt(t)

    def __add__(self, other):
        return LoopFamilyTangent(lambda t: self.at(t) + other.at(t),
                                 lambda t: self.dt(t) + other.dt(t))

    def __mul__(self, c):
        return LoopFamilyTangent(lambda t: c * self.at(t), lambda t: c * self.dt(t))

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def family_bracket(X: LoopFamilyTangent, Y: LoopFamilyTangent) -> LoopFamilyTangent:
    return LoopFamilyTangent(
        lambda t: tangent_bracket(X.at(t), Y.at(t)),
        lambda t: lie.bracket(X.dt(t), Y.at(t).values) + lie.bracket(X.at(t).values, Y.dt(t)),
    )


def zero_family_tangent(f: "LoopOfLoops") -> LoopFamilyTangent:
    z = np.zeros((f.grid.N + 1,) + f.spec.identity().shape, dtype=f.spec.dtype)
    return LoopFamilyTangent(lambda t: PathTangent(z, z, LOOP), lambda t: z)


def random_family_tangent(spec, grid, rng, modes: int = 3, scale: float = 1.0) -> LoopFamilyTangent:
    parts = [random_series(spec, grid, rng, LOOP, modes, scale) for _ in _T_FREQS]

    def at(t):
        out = None
        for j, w in enumerate(parts):
            s, _ = _t_profile(j, t)
            out = s * w if out is None else out + s * w
        return out

    def dt(t):
        return sum(_t_profile(j, t)[1] * w.values for j, w in enumerate(parts))

    return LoopFamilyTangent(at, dt)


class LoopOfLoops:
    """A point ``f`` of PΩG: a path ``t ↦ f(t)`` in ΩG with ``f(0)`` the constant loop.

    Subclasses provide ``at(t)`` (a SampledLoop with exact θ-derivative) and
    ``dt(t)`` (the t-derivative of the samples of ``f(t)``).
    """

    def __init__(self, spec: GroupSpec, grid: GridSpec):
        self.spec = spec
        self.grid = grid

    def at(self, t: float) -> SampledLoop:
        raise NotImplementedError

    def dt(self, t: float) -> np.ndarray:
        raise NotImplementedError

    def velocity(self, t: float) -> PathTangent:
        """``f(t)^{-1} ∂_t f(t)`` as a loop tangent at ``f(t)``."""
        ft = self.at(t)
        D = self.dt(t)
        inv = ft.inverse_values
        vals = lie.project_algebra(inv @ D, self.spec)
        return PathTangent(vals, None, LOOP)

    def samples(self, grid_t: GridSpec) -> np.ndarray:
        """Array of shape ``(N_t + 1, N_θ + 1, d, d)``."""
        return np.stack([self.at(t).values for t in grid_t.nodes])

    def moved(self, X: LoopFamilyTangent, s: float) -> "LoopOfLoops":
        return _MovedLoopOfLoops(self, X, s)

    def _validate_base(self):
        f0 = self.at(0.0).values
        if np.max(np.abs(f0 - self.spec.identity())) > 1e-10:
            raise InvalidInput("a path of loops must start at the constant identity loop")


class SeriesLoopOfLoops(LoopOfLoops):
    """``f(t)(θ) = exp(Σ_j s_j(t) w_j(θ))`` with smooth profiles ``s_j(0) = 0``."""

    def __init__(self, spec, grid, parts, profiles=None):
        super().__init__(spec, grid)
        self.parts = list(parts)
        self.profiles = profiles or [lambda t, j=j: _t_profile(j, t) for j in range(len(self.parts))]
        self._cache = {}
        self._validate_base()

    def _generator(self, t):
        v = dv_theta = dv_t = 0
        for w, prof in zip(self.parts, self.profiles):
            s, ds = prof(t)
            v = v + s * w.values
            dv_theta = dv_theta + s * w.derivative
            dv_t = dv_t + ds * w.values
        shape = (self.grid.N + 1,) + self.spec.identity().shape
        z = np.zeros(shape, dtype=self.spec.dtype)
        return (np.broadcast_to(v, shape) + z, np.broadcast_to(dv_theta, shape) + z,
                np.broadcast_to(dv_t, shape) + z)

    def _eval(self, t):
        t = float(t)
        hit = self._cache.get(t)
        if hit is None:
            v, dth, dt_ = self._generator(t)
            loop = exp_path(self.spec, PathTangent(v, dth, LOOP), loop=True)
            _, dE = lie.expm_jet(v, dt_)
            if len(self._cache) > 512:
                self._cache.clear()
            hit = self._cache[t] = (loop, dE)
        return hit

    def at(self, t):
        return self._eval(t)[0]

    def dt(self, t):
        return self._eval(t)[1]


class _MovedLoopOfLoops(LoopOfLoops):
    def __init__(self, base: LoopOfLoops, X: LoopFamilyTangent, s: float):
        super().__init__(base.spec, base.grid)
        self.base, self.X, self.s = base, X, s

    def at(self, t):
        return move_path(self.base.at(t), self.X.at(t), self.s)

    def dt(self, t):
        ft = self.base.at(t)
        Xt = self.X.at(t)
        E, dE = lie.expm_jet(self.s * Xt.values, self.s * self.X.dt(t))
        return self.base.dt(t) @ E + ft.values @ dE


def random_loop_of_loops(spec, grid, rng, modes: int = 3, scale: float = 0.5) -> LoopOfLoops:
    parts = [random_series(spec, grid, rng, LOOP, modes, scale) for _ in range(2)]
    return SeriesLoopOfLoops(spec, grid, parts)


def constant_loop_of_loops(spec, grid) -> LoopOfLoops:
    """The constant family ``f(t) = 1``."""
    z = PathTangent(np.zeros((grid.N + 1,) + spec.identity().shape, dtype=spec.dtype), None, LOOP)
    return SeriesLoopOfLoops(spec, grid, [z], [lambda t: (0.0, 0.0)])
