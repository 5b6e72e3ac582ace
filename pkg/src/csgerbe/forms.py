"""Differential forms as evaluators, and the operations on them.

Evaluation follows the Kobayashi–Nomizu normalisation: a k-form's value on k
vectors is 1/k! times the "determinant" convention.  Concretely

    (α∧β)(X_1..X_{p+q}) = 1/(p+q)! Σ_σ sgn σ α(X_σ1..) β(X_σ(p+1)..)
    dη(X_0..X_k) = 1/(k+1) [Σ_i (-1)^i X_i η(..X̂_i..)
                            + Σ_{i<j} (-1)^{i+j} η([X_i, X_j], ..)]

so for instance ``[Θ, Θ](X, Y) = [X, Y]`` and ``dΘ + ½[Θ, Θ] = 0``.  Vector
fields are the left-invariant extensions on group, path and loop factors and
constant fields on chart factors; the derivative ``X_i η`` is a central
difference along ``s ↦ point · exp(s X_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import factorial
from typing import Callable

import numpy as np

from . import paths as P
from . import spaces as S
from .errors import InvalidDegree, InvalidInput, UnsupportedDegree

SCALAR = "scalar"
ALGEBRA = "algebra"

DEFAULT_STEP = 1e-4
MAX_D_DEGREE = 3
HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class FormEvaluator:
    space: S.Space
    degree: int
    value_kind: str
    fn: Callable = field(repr=False, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.degree < 0:
            raise InvalidDegree("degree must be non-negative")
        if self.value_kind not in (SCALAR, ALGEBRA):
            raise InvalidInput(f"unknown value kind {self.value_kind!r}")

    def __call__(self, point, *tangents):
        self.space.check_point(point)
        if len(tangents) != self.degree:
            raise InvalidInput(f"{self.name or 'form'} takes {self.degree} tangents, got {len(tangents)}")
        for v in tangents:
            self.space.check_tangent(v)
        return self.fn(point, *tangents)

    def __add__(self, other: "FormEvaluator") -> "FormEvaluator":
        _same_shape(self, other)
        return FormEvaluator(self.space, self.degree, self.value_kind,
                             lambda x, *V: self.fn(x, *V) + other.fn(x, *V),
                             f"({self.name} + {other.name})")

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c: float) -> "FormEvaluator":
        return FormEvaluator(self.space, self.degree, self.value_kind,
                             lambda x, *V: c * self.fn(x, *V), f"{c}·{self.name}")

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def _same_shape(a, b):
    if a.space != b.space or a.degree != b.degree or a.value_kind != b.value_kind:
        raise InvalidInput(f"cannot combine {a.name} and {b.name}: different space, degree or kind")


def zero_form(sp: S.Space, degree: int, value_kind: str = SCALAR) -> FormEvaluator:
    return FormEvaluator(sp, degree, value_kind, lambda x, *V: 0.0, "0")


def pullback(form: FormEvaluator, smap: S.SmoothMap) -> FormEvaluator:
    """``(f^*η)_p(v_1..v_k) = η_{f(p)}(f_* v_1, .., f_* v_k)``."""
    if smap.codomain != form.space:
        raise InvalidInput(f"cannot pull {form.name} on {form.space.name} back along "
                           f"{smap.name}: {smap.domain.name} → {smap.codomain.name}")

    def fn(x, *V):
        y = smap(x)
        return form.fn(y, *(smap.push(x, v) for v in V))

    return FormEvaluator(smap.domain, form.degree, form.value_kind, fn, f"{smap.name}*{form.name}")


# --- simplicial structure ---------------------------------------------------


def _factor_distance(kind, a, b):
    if kind in (S.PATH, S.LOOP):
        return float(np.max(np.abs(a.values - b.values)))
    if kind == S.FAMILY:
        raise InvalidInput("cannot compare path-of-loops points")
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def point_distance(sp: S.Space, a, b) -> float:
    return max(_factor_distance(k, x, y) for k, x, y in zip(sp.factors, a, b))


class FaceMapTable:
    """Face maps ``d_0..d_n : X_n → X_{n-1}`` keyed by direction, source and target."""

    def __init__(self, name: str):
        self.name = name
        self._levels: dict = {}

    def add(self, direction: str, faces):
        faces = list(faces)
        if direction not in (HORIZONTAL, VERTICAL):
            raise InvalidInput(f"direction must be horizontal or vertical, got {direction!r}")
        dom, cod = faces[0].domain, faces[0].codomain
        for f in faces:
            if f.domain != dom or f.codomain != cod:
                raise InvalidInput("all faces of one level must share domain and codomain")
            S.register_map(f)
        self._levels[(direction, dom.factors, cod.factors)] = faces
        return self

    def faces(self, direction: str, codomain: S.Space, domain: S.Space | None = None):
        found = [f for (d, dom, cod), f in self._levels.items()
                 if d == direction and cod == codomain.factors
                 and (domain is None or dom == domain.factors)]
        if not found:
            raise InvalidInput(f"no {direction} faces into {codomain.name} in {self.name}")
        if len(found) > 1:
            raise InvalidInput(f"several {direction} levels map into {codomain.name}; pass the domain")
        return found[0]

    def levels(self):
        return [(d, faces) for (d, _, _), faces in self._levels.items()]

    def merged(self, other: "FaceMapTable", name: str | None = None) -> "FaceMapTable":
        out = FaceMapTable(name or f"{self.name}+{other.name}")
        out._levels = {**self._levels, **other._levels}
        return out

    def simplicial_defect(self, direction: str, top: S.Space, point) -> float:
        """``max_{i<j} |d_i d_j − d_{j-1} d_i|`` on a point of ``top`` (two levels up)."""
        upper = self._from(direction, top)
        lower = self._from(direction, upper[0].codomain)
        low = lower[0].codomain
        worst = 0.0
        for j in range(len(upper)):
            for i in range(j):
                a = lower[i](upper[j](point))
                b = lower[j - 1](upper[i](point))
                worst = max(worst, point_distance(low, a, b))
        return worst

    def _from(self, direction, domain):
        for (d, dom, _), f in self._levels.items():
            if d == direction and dom == domain.factors:
                return f
        raise InvalidInput(f"no {direction} faces out of {domain.name} in {self.name}")


def coboundary(form: FormEvaluator, faces: FaceMapTable, direction: str,
               domain: S.Space | None = None) -> FormEvaluator:
    """``δη = Σ_i (-1)^i d_i^* η`` on the next simplicial level."""
    maps = faces.faces(direction, form.space, domain)
    pulled = [pullback(form, d) for d in maps]

    def fn(x, *V):
        return sum((-1) ** i * f.fn(x, *V) for i, f in enumerate(pulled))

    sym = "δ_h" if direction == HORIZONTAL else "δ_v"
    return FormEvaluator(maps[0].domain, form.degree, form.value_kind, fn, f"{sym}{form.name}")


# --- exterior derivative ----------------------------------------------------


def exterior_derivative(form: FormEvaluator, h: float = DEFAULT_STEP) -> FormEvaluator:
    k = form.degree
    if k > MAX_D_DEGREE:
        raise UnsupportedDegree(f"exterior derivative implemented up to degree {MAX_D_DEGREE}")
    sp = form.space

    def fn(x, *X):
        total = 0.0
        for i in range(k + 1):
            rest = X[:i] + X[i + 1:]
            fp = form.fn(S.move(sp, x, X[i], h), *rest)
            fm = form.fn(S.move(sp, x, X[i], -h), *rest)
            total = total + (-1) ** i * (fp - fm) / (2 * h)
        for i, j in combinations(range(k + 1), 2):
            br = S.bracket(sp, X[i], X[j])
            rest = tuple(X[m] for m in range(k + 1) if m not in (i, j))
            total = total + (-1) ** (i + j) * form.fn(x, br, *rest)
        return total / (k + 1)

    return FormEvaluator(sp, k + 1, form.value_kind, fn, f"d{form.name}")


# --- wedge and alternation --------------------------------------------------


def _perm_sign(perm):
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def alternate(fn: Callable, k: int) -> Callable:
    """``Alt(fn)(X_1..X_k) = 1/k! Σ_σ sgn σ fn(X_σ1..X_σk)``."""
    perms = [(p, _perm_sign(p)) for p in permutations(range(k))]

    def alt(*X):
        return sum(s * fn(*(X[i] for i in p)) for p, s in perms) / factorial(k)

    return alt


def wedge(a: FormEvaluator, b: FormEvaluator, product: Callable | None = None,
          value_kind: str | None = None) -> FormEvaluator:
    """Kobayashi–Nomizu wedge; ``product`` combines the two values (default ``*``)."""
    if a.space != b.space:
        raise InvalidInput("wedge of forms on different spaces")
    p, q = a.degree, b.degree
    mult = product or (lambda u, v: u * v)
    kind = value_kind or (SCALAR if product is not None else a.value_kind)
    shuffles = []
    for idx in combinations(range(p + q), p):
        rest = tuple(i for i in range(p + q) if i not in idx)
        shuffles.append((idx, rest, _perm_sign(idx + rest)))
    coef = factorial(p) * factorial(q) / factorial(p + q)

    def fn(x, *X):
        tot = 0.0
        for idx, rest, s in shuffles:
            tot = tot + s * mult(a.fn(x, *(X[i] for i in idx)), b.fn(x, *(X[i] for i in rest)))
        return coef * tot

    return FormEvaluator(a.space, p + q, kind, fn, f"{a.name}∧{b.name}")


# --- fiber integration over [0, 2π] ----------------------------------------


def _split_interval(sp: S.Space) -> S.Space:
    if not sp.factors or sp.factors[-1] != S.CHART:
        raise InvalidInput("fiber integration needs a trailing interval factor")
    name = sp.name[:-2] if sp.name.endswith("×I") else f"{sp.name} base"
    return S.Space(name, sp.factors[:-1])


_T_UNIT = np.array([1.0])
_T_ZERO = np.array([0.0])


def fiber_integrate(form: FormEvaluator, t_grid: P.GridSpec) -> FormEvaluator:
    """Integrate over the trailing interval factor, contracting ``(0, ∂_t)`` in slot one.

    With Kobayashi–Nomizu evaluation a k-form contracted in one slot carries a
    factor k relative to the interior product, restored here so that the
    fibrewise Stokes formula holds without extra constants.
    """
    k = form.degree
    if k == 0:
        raise InvalidDegree("cannot integrate a 0-form over the fiber")
    base = _split_interval(form.space)
    nodes = t_grid.nodes

    def fn(x, *X):
        Z = S.zero_tangent(base, x)
        T = Z + (_T_UNIT,)
        lifted = tuple(v + (_T_ZERO,) for v in X)
        vals = np.array([form.fn(x + (np.array([t]),), T, *lifted) for t in nodes])
        return k * P.quadrature(vals, P.PATH)

    return FormEvaluator(base, k - 1, form.value_kind, fn, f"∫{form.name}")


def restrict_slice(form: FormEvaluator, t: float) -> FormEvaluator:
    """Pull back along ``x ↦ (x, t)``."""
    base = _split_interval(form.space)

    def fn(x, *X):
        return form.fn(x + (np.array([float(t)]),), *(v + (_T_ZERO,) for v in X))

    return FormEvaluator(base, form.degree, form.value_kind, fn, f"{form.name}|t={t:g}")
