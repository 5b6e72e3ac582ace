"""Product spaces of chart, group, path and loop factors, and smooth maps between them.

A point of a space is a tuple with one entry per factor:

``chart``        1-d coordinate array, tangent: array of the same shape
``group``        (d, d) matrix, tangent: algebra element X (the vector g X)
``path``/``loop`` SampledPath / SampledLoop, tangent: PathTangent
``family``       LoopOfLoops (a point of PΩG), tangent: LoopFamilyTangent

Smooth maps are written once as functions on :class:`Dual` values, which
carry a point together with an optional left-representation tangent.  The
group product and inverse propagate tangents by
``(a, X)(b, Y) = (ab, Ad_{b^{-1}} X + Y)`` and ``(a, X)^{-1} = (a^{-1}, -Ad_a X)``,
so every registered map gets an exact pushforward for free.  A finite-difference
pushforward along ``s ↦ point · exp(s X)`` is kept alongside for cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import lie
from . import paths as P
from .errors import InvalidInput, InvalidSpace, UnknownMap

CHART = "chart"
GROUP = "group"
PATH = "path"
LOOP = "loop"
FAMILY = "family"
KINDS = (CHART, GROUP, PATH, LOOP, FAMILY)

H_PUSH = 1e-5


@dataclass(frozen=True)
class Space:
    """A product of factors; equality compares the factor kinds only."""

    name: str = field(compare=False)
    factors: tuple

    def __post_init__(self):
        for k in self.factors:
            if k not in KINDS:
                raise InvalidInput(f"unknown factor kind {k!r}")

    def __len__(self):
        return len(self.factors)

    def __mul__(self, other: "Space") -> "Space":
        return Space(f"{self.name}×{other.name}", self.factors + other.factors)

    def check_point(self, point):
        if not isinstance(point, tuple) or len(point) != len(self.factors):
            raise InvalidSpace(f"expected a point of {self.name} with {len(self.factors)} factors")
        for kind, x in zip(self.factors, point):
            if not _is_point(kind, x):
                raise InvalidSpace(f"factor of kind {kind!r} got {type(x).__name__} in {self.name}")

    def check_tangent(self, tangent):
        if not isinstance(tangent, tuple) or len(tangent) != len(self.factors):
            raise InvalidSpace(f"expected a tangent of {self.name} with {len(self.factors)} factors")

    def __repr__(self):
        return f"Space({self.name})"


def _is_point(kind, x):
    if kind == CHART:
        return isinstance(x, np.ndarray) and x.ndim == 1
    if kind == GROUP:
        return isinstance(x, np.ndarray) and x.ndim == 2
    if kind == PATH:
        return isinstance(x, P.SampledPath)
    if kind == LOOP:
        return isinstance(x, P.SampledLoop)
    return isinstance(x, P.LoopOfLoops)


def space(name: str, *factors) -> Space:
    return Space(name, tuple(factors))


# Named spaces.  Q is the trivial bundle chart × G.
G = space("G", GROUP)
G2 = space("G²", GROUP, GROUP)
G3 = space("G³", GROUP, GROUP, GROUP)
OMEGA = space("ΩG", LOOP)
OMEGA2 = space("ΩG²", LOOP, LOOP)
OMEGA3 = space("ΩG³", LOOP, LOOP, LOOP)
PG = space("PG", PATH)
PG2 = space("PG²", PATH, PATH)
PG3 = space("PG³", PATH, PATH, PATH)
PG_OMEGA = space("PG×ΩG", PATH, LOOP)
PG_OMEGA2 = space("PG×ΩG²", PATH, LOOP, LOOP)
PG_OMEGA3 = space("PG×ΩG³", PATH, LOOP, LOOP, LOOP)
SEMI2 = space("(PG⋉ΩG)²", PATH, LOOP, PATH, LOOP)
PLOOP = space("PΩG", FAMILY)
PG_PLOOP = space("PG×PΩG", PATH, FAMILY)
CHART_X = space("X", CHART)
Q = space("Q", CHART, GROUP)
QG = space("Q×G", CHART, GROUP, GROUP)
QG2 = space("Q×G²", CHART, GROUP, GROUP, GROUP)
QG3 = space("Q×G³", CHART, GROUP, GROUP, GROUP, GROUP)
QPG = space("Q×PG", CHART, GROUP, PATH)
QPG2 = space("Q×PG²", CHART, GROUP, PATH, PATH)
QPG3 = space("Q×PG³", CHART, GROUP, PATH, PATH, PATH)
QPG_OMEGA = space("Q×PG×ΩG", CHART, GROUP, PATH, LOOP)
QPG_OMEGA2 = space("Q×PG×ΩG²", CHART, GROUP, PATH, LOOP, LOOP)
QSEMI2 = space("Q×(PG⋉ΩG)²", CHART, GROUP, PATH, LOOP, PATH, LOOP)
QSEMI2_2 = space("Q×(PG⋉ΩG²)²", CHART, GROUP, PATH, LOOP, LOOP, PATH, LOOP, LOOP)
QSEMI_2 = space("Q×(PG⋉ΩG²)", CHART, GROUP, PATH, LOOP, LOOP)

NAMED_SPACES = {s.name: s for s in (
    G, G2, G3, OMEGA, OMEGA2, OMEGA3, PG, PG2, PG3, PG_OMEGA, PG_OMEGA2, PG_OMEGA3,
    SEMI2, PLOOP, PG_PLOOP, CHART_X, Q, QG, QG2, QG3, QPG, QPG2, QPG3,
    QPG_OMEGA, QPG_OMEGA2, QSEMI2, QSEMI2_2, QSEMI_2,
)}


def with_interval(base: Space) -> Space:
    """``base × [0, 2π]``, the interval carried as a 1-d chart factor (last)."""
    return Space(f"{base.name}×I", base.factors + (CHART,))


# --- per-factor operations --------------------------------------------------


def _move_factor(kind, x, v, s):
    if kind == CHART:
        return x + s * np.asarray(v)
    if kind == GROUP:
        return x @ expm(s * np.asarray(v))
    if kind in (PATH, LOOP):
        return P.move_path(x, v, s)
    return x.moved(v, s)


def _bracket_factor(kind, u, v):
    if kind == CHART:
        return np.zeros_like(np.asarray(u, dtype=float))
    if kind == GROUP:
        return lie.bracket(u, v)
    if kind in (PATH, LOOP):
        return P.tangent_bracket(u, v)
    return P.family_bracket(u, v)


def _zero_factor(kind, x):
    if kind == CHART:
        return np.zeros_like(x, dtype=float)
    if kind == GROUP:
        return np.zeros_like(x)
    if kind in (PATH, LOOP):
        return P.zero_tangent(x)
    return P.zero_family_tangent(x)


def move(sp: Space, point, tangent, s: float):
    """Flow ``s ↦ point · exp(s X)`` factorwise (translation on charts)."""
    return tuple(_move_factor(k, x, v, s) for k, x, v in zip(sp.factors, point, tangent))


def bracket(sp: Space, u, v):
    """Bracket of left-invariant extensions, factorwise; zero on chart factors."""
    return tuple(_bracket_factor(k, a, b) for k, a, b in zip(sp.factors, u, v))


def zero_tangent(sp: Space, point):
    return tuple(_zero_factor(k, x) for k, x in zip(sp.factors, point))


def combine(coeffs, tangents):
    """Linear combination ``Σ c_i V_i`` of tangents at one point."""
    out = None
    for c, V in zip(coeffs, tangents):
        term = tuple(c * v for v in V)
        out = term if out is None else tuple(a + b for a, b in zip(out, term))
    return out


# --- duals ------------------------------------------------------------------


def _is_path(x):
    return isinstance(x, P.SampledPath)


class Dual:
    """A point of one factor with an optional tangent (left representation)."""

    __slots__ = ("value", "tangent")

    def __init__(self, value, tangent=None):
        self.value = value
        self.tangent = tangent

    def __mul__(self, other: "Dual") -> "Dual":
        a, b = self.value, other.value
        if _is_path(a):
            value = P.path_multiply(a, b)
        else:
            value = a @ b
        tangent = None
        if self.tangent is not None and other.tangent is not None:
            if _is_path(b):
                tangent = P.tangent_Ad_inv(b, self.tangent) + other.tangent
            else:
                tangent = lie.Ad_inv(b, self.tangent) + other.tangent
        return Dual(value, tangent)

    def inv(self) -> "Dual":
        a = self.value
        if _is_path(a):
            value = P.path_inverse(a)
            tangent = None if self.tangent is None else -P.tangent_Ad(a, self.tangent)
        else:
            value = lie.group_inverse(a)
            tangent = None if self.tangent is None else -lie.Ad(a, self.tangent)
        return Dual(value, tangent)

    def end(self) -> "Dual":
        """Evaluation at θ = 2π."""
        t = None if self.tangent is None else self.tangent.end
        return Dual(self.value.end, t)

    def as_loop(self) -> "Dual":
        """Re-tag a path that is known to be a loop (e.g. ``q γ q^{-1}``)."""
        v = self.value
        loop = P.SampledLoop(v.spec, v.values, v.dtheta, check=False)
        t = self.tangent
        if t is not None:
            t = P.PathTangent(t.values, t.dtheta, P.LOOP)
        return Dual(loop, t)


def ad_action(q: Dual, gamma: Dual) -> Dual:
    """Pointwise conjugation ``q γ q^{-1}`` of a loop by a path."""
    return (q * gamma * q.inv()).as_loop()


@dataclass(frozen=True)
class SmoothMap:
    name: str
    domain: Space
    codomain: Space
    fn: Callable = field(repr=False)

    def _run(self, point, tangent=None):
        self.domain.check_point(point)
        if tangent is None:
            duals = tuple(Dual(x) for x in point)
        else:
            self.domain.check_tangent(tangent)
            duals = tuple(Dual(x, v) for x, v in zip(point, tangent))
        out = self.fn(*duals)
        if len(out) != len(self.codomain):
            raise AssertionError(f"map {self.name} returned {len(out)} factors")
        return out

    def __call__(self, point):
        return tuple(d.value for d in self._run(point))

    def push(self, point, tangent):
        """Analytic pushforward of one tangent."""
        return tuple(d.tangent for d in self._run(point, tangent))

    def push_fd(self, point, tangent, h: float = H_PUSH):
        """Central-difference pushforward along ``s ↦ point · exp(s X)``."""
        y0 = self(point)
        yp = self(move(self.domain, point, tangent, h))
        ym = self(move(self.domain, point, tangent, -h))
        return tuple(_fd_factor(k, a, b, c, h) for k, a, b, c in zip(self.codomain.factors, y0, yp, ym))

    def compose(self, inner: "SmoothMap", name: str | None = None) -> "SmoothMap":
        """``self ∘ inner``."""
        if inner.codomain != self.domain:
            raise InvalidInput(f"cannot compose {self.name} after {inner.name}")
        return SmoothMap(name or f"{self.name}∘{inner.name}", inner.domain, self.codomain,
                         lambda *d: self.fn(*inner.fn(*d)))


def _fd_factor(kind, y0, yp, ym, h):
    if kind == CHART:
        return (yp - ym) / (2 * h)
    if kind == GROUP:
        return lie.group_inverse(y0) @ (yp - ym) / (2 * h)
    if kind in (PATH, LOOP):
        inv = y0.inverse_values
        D = (yp.values - ym.values) / (2 * h)
        vals = inv @ D
        d = None
        if y0.dtheta is not None and yp.dtheta is not None and ym.dtheta is not None:
            dD = (yp.dtheta - ym.dtheta) / (2 * h)
            d = -inv @ y0.dtheta @ inv @ D + inv @ dD
        return P.PathTangent(vals, d, P.LOOP if kind == LOOP else P.PATH)
    raise InvalidInput("finite-difference pushforward is not available for path-of-loops factors")


def identity_map(sp: Space) -> SmoothMap:
    return SmoothMap(f"id_{sp.name}", sp, sp, lambda *d: d)


def projection(sp: Space, keep, codomain: Space, name: str) -> SmoothMap:
    keep = tuple(keep)
    return SmoothMap(name, sp, codomain, lambda *d: tuple(d[i] for i in keep))


# --- registry ---------------------------------------------------------------

MAPS: dict[str, SmoothMap] = {}


def register_map(m: SmoothMap) -> SmoothMap:
    MAPS[m.name] = m
    return m


def get_map(name: str) -> SmoothMap:
    try:
        return MAPS[name]
    except KeyError:
        raise UnknownMap(name) from None


def pushforward(map_id: str, base_point, tangents, method: str = "analytic"):
    """Push a list of tangents at ``base_point`` through the registered map."""
    m = get_map(map_id)
    if method == "analytic":
        return [m.push(base_point, v) for v in tangents]
    if method == "fd":
        return [m.push_fd(base_point, v) for v in tangents]
    raise InvalidInput(f"unknown pushforward method {method!r}")


register_map(SmoothMap("mult_G", G2, G, lambda g, h: (g * h,)))
register_map(SmoothMap("inverse_G", G, G, lambda g: (g.inv(),)))
register_map(SmoothMap("mult_PG", PG2, PG, lambda p, q: (p * q,)))
register_map(SmoothMap("inverse_PG", PG, PG, lambda p: (p.inv(),)))
register_map(SmoothMap("mult_OmegaG", OMEGA2, OMEGA, lambda g, e: ((g * e).as_loop(),)))
register_map(SmoothMap("ev_2pi", PG, G, lambda p: (p.end(),)))
register_map(SmoothMap("adjoint_action", PG_OMEGA, OMEGA, lambda q, g: (ad_action(q, g),)))
register_map(SmoothMap("semidirect_mult", SEMI2, PG_OMEGA,
                       lambda p, g, q, e: (p * q, (ad_action(q.inv(), g) * e).as_loop())))
for _sp in (G, PG, OMEGA, Q):
    register_map(identity_map(_sp))
