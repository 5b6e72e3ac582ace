"""Geometric data of the Chern–Simons 2-gerbe over a trivial bundle Q = X × G.

The base connection is a 𝔤-valued 1-form ``a = Σ_i a_i(x) dx^i`` on an open
chart of ℝ^m with trigonometric coefficients

    a_i(x) = Σ_b E_b (c_ib + Σ_j [s_ijb sin x_j + k_ijb cos x_j])

in the orthonormal basis ``E_b`` of the algebra.  Its pullback to Q is
``A_(x,g)(v, gX) = Ad_{g^{-1}} a_x(v) + X``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import catalog as C
from . import forms as F
from . import lie
from . import paths as P
from . import spaces as S
from .errors import InvalidInput
from .lie import GroupSpec
from .spaces import Dual


@dataclass(frozen=True, eq=False)
class BundleModel:
    spec: GroupSpec
    m: int
    const: np.ndarray
    sin: np.ndarray
    cos: np.ndarray
    seed: int | None = None
    basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 2 <= self.m <= 4:
            raise InvalidInput("chart dimension must be between 2 and 4")
        dim = self.spec.dim
        const = np.asarray(self.const, dtype=float)
        sin = np.asarray(self.sin, dtype=float)
        cos = np.asarray(self.cos, dtype=float)
        if const.shape != (self.m, dim) or sin.shape != (self.m, self.m, dim) or cos.shape != sin.shape:
            raise InvalidInput("coefficient tables do not match (m, dim)")
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "sin", sin)
        object.__setattr__(self, "cos", cos)
        object.__setattr__(self, "basis", self.spec.basis)

    @classmethod
    def random(cls, spec: GroupSpec, m: int = 4, seed: int = 0, scale: float = 0.5):
        rng = np.random.default_rng(seed)
        dim = spec.dim
        return cls(spec, m, scale * rng.standard_normal((m, dim)),
                   scale * rng.standard_normal((m, m, dim)),
                   scale * rng.standard_normal((m, m, dim)), seed)

    @classmethod
    def flat(cls, spec: GroupSpec, m: int = 4):
        dim = spec.dim
        return cls(spec, m, np.zeros((m, dim)), np.zeros((m, m, dim)), np.zeros((m, m, dim)))

    def to_json(self) -> str:
        return json.dumps({
            "family": self.spec.family, "n": self.spec.n, "m": self.m, "seed": self.seed,
            "const": self.const.tolist(), "sin": self.sin.tolist(), "cos": self.cos.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "BundleModel":
        d = json.loads(text)
        return cls(GroupSpec(d["family"], d["n"]), d["m"], np.array(d["const"]),
                   np.array(d["sin"]), np.array(d["cos"]), d.get("seed"))

    # coefficient functions

    def _coeffs(self, x):
        x = np.asarray(x, dtype=float)
        return self.const + np.einsum("ijb,j->ib", self.sin, np.sin(x)) + np.einsum("ijb,j->ib", self.cos, np.cos(x))

    def _dcoeffs(self, x):
        # [i, j, b] = ∂_j of the b-th coefficient of a_i
        x = np.asarray(x, dtype=float)
        return self.sin * np.cos(x)[None, :, None] - self.cos * np.sin(x)[None, :, None]

    def a(self, x) -> np.ndarray:
        """``a_i(x)`` for i = 1..m, shape ``(m, d, d)``."""
        return np.einsum("ib,bkl->ikl", self._coeffs(x), self.basis)

    def da(self, x) -> np.ndarray:
        """``∂_j a_i(x)`` indexed ``[i, j]``."""
        return np.einsum("ijb,bkl->ijkl", self._dcoeffs(x), self.basis)

    def a_of(self, x, v) -> np.ndarray:
        return np.einsum("i,ikl->kl", np.asarray(v, dtype=float), self.a(x))

    def curvature(self, x) -> np.ndarray:
        """``F_ij = ½ (∂_i a_j - ∂_j a_i + [a_i, a_j])``."""
        a = self.a(x)
        da = self.da(x)
        dd = np.swapaxes(da, 0, 1) - da  # [i, j] -> ∂_i a_j - ∂_j a_i
        br = a[:, None] @ a[None, :] - a[None, :] @ a[:, None]
        return 0.5 * (dd + br)

    def F_of(self, x, v, w) -> np.ndarray:
        return np.einsum("i,j,ijkl->kl", np.asarray(v, float), np.asarray(w, float), self.curvature(x))


# --- forms on Q and its products -------------------------------------------


def form_A(bundle: BundleModel) -> F.FormEvaluator:
    def fn(x, V):
        (xc, g), (v, X) = x, V
        return lie.Ad_inv(g, bundle.a_of(xc, v)) + X

    return F.FormEvaluator(S.Q, 1, F.ALGEBRA, fn, "A")


def form_F_A(bundle: BundleModel) -> F.FormEvaluator:
    def fn(x, V, W):
        xc, g = x
        return lie.Ad_inv(g, bundle.F_of(xc, V[0], W[0]))

    return F.FormEvaluator(S.Q, 2, F.ALGEBRA, fn, "F_A")


def form_cs(bundle: BundleModel) -> F.FormEvaluator:
    """``-CS(A) = -<A ∧ F_A> + (1/6) <A ∧ [A, A]>``."""
    spec = bundle.spec
    kf = lambda X, Y: lie.killing_form(X, Y, spec)
    A = form_A(bundle)
    AF = F.wedge(A, form_F_A(bundle), product=kf)
    AA = F.wedge(A, A, product=lie.bracket, value_kind=F.ALGEBRA)
    AAA = F.wedge(A, AA, product=kf)
    return F.FormEvaluator(S.Q, 3, F.SCALAR, lambda x, *V: -AF.fn(x, *V) + AAA.fn(x, *V) / 6.0, "-CS(A)")


def form_A_theta_hat(bundle: BundleModel) -> F.FormEvaluator:
    """``<pr_1^*A ∧ pr_2^*Θ̂>`` on Q × G."""
    spec = bundle.spec
    A = F.pullback(form_A(bundle), S.projection(S.QG, [0, 1], S.Q, "pr1_QG"))
    Th = F.pullback(C.form_theta_hat(spec), S.projection(S.QG, [2], S.G, "pr2_QG"))
    w = F.wedge(A, Th, product=lambda X, Y: lie.killing_form(X, Y, spec))
    return F.FormEvaluator(S.QG, 2, F.SCALAR, w.fn, "<A,Θ̂>")


ID_EV = S.register_map(S.SmoothMap("id_x_ev", S.QPG, S.QG, lambda x, g, p: (x, g, p.end())))
PR2_QPG = S.register_map(S.projection(S.QPG, [2], S.PG, "pr2_QPG"))


def form_B_Q(spec: GroupSpec) -> F.FormEvaluator:
    """``pr_2^*B`` on Q × PG."""
    return F.pullback(C.form_B(spec), PR2_QPG)


def form_beta_A(bundle: BundleModel) -> F.FormEvaluator:
    """``β_A = pr_2^*B - π^*<pr_1^*A, pr_2^*Θ̂>`` with ``π = id × ev_2π``."""
    B = form_B_Q(bundle.spec)
    Ath = F.pullback(form_A_theta_hat(bundle), ID_EV)
    out = B - Ath
    return F.FormEvaluator(S.QPG, 2, F.SCALAR, out.fn, "β_A")


def form_alpha(spec: GroupSpec) -> F.FormEvaluator:
    """On Q × PG²: ``2 ∫ <X_p, φ̂_q>``, independent of the Q point."""

    def fn(x, V):
        p, q = x[2], x[3]
        return 2.0 * P.quadrature(lie.killing_form(V[2].values, q.phi_hat, spec), P.PATH)

    return F.FormEvaluator(S.QPG2, 1, F.SCALAR, fn, "α")


def form_F_wedge_F(bundle: BundleModel) -> F.FormEvaluator:
    """``<F ∧ F>`` on the chart (Kobayashi–Nomizu normalisation)."""
    spec = bundle.spec
    Fx = F.FormEvaluator(S.CHART_X, 2, F.ALGEBRA, lambda x, V, W: bundle.F_of(x[0], V[0], W[0]), "F")
    return F.wedge(Fx, Fx, product=lambda X, Y: lie.killing_form(X, Y, spec))


def four_curvature(bundle: BundleModel) -> F.FormEvaluator:
    """``-<F ∧ F>`` on the chart."""
    w = form_F_wedge_F(bundle)
    return F.FormEvaluator(S.CHART_X, 4, F.SCALAR, lambda x, *V: -w.fn(x, *V), "-<F∧F>")


def form_F_wedge_F_Q(bundle: BundleModel) -> F.FormEvaluator:
    """``<F_A ∧ F_A>`` on Q."""
    spec = bundle.spec
    FA = form_F_A(bundle)
    return F.wedge(FA, FA, product=lambda X, Y: lie.killing_form(X, Y, spec))


def half_pontryagin(bundle: BundleModel, x, vectors) -> float:
    """``tr(F∧F)/16π²`` evaluated by an explicit permutation sum (no pairing object)."""
    Fm = bundle.curvature(x)
    V = [np.asarray(v, float) for v in vectors]
    total = 0.0
    for perm in permutations(range(4)):
        sign = np.linalg.det(np.eye(4)[list(perm)])
        a = np.einsum("i,j,ijkl->kl", V[perm[0]], V[perm[1]], Fm)
        b = np.einsum("i,j,ijkl->kl", V[perm[2]], V[perm[3]], Fm)
        total += sign * np.real(np.trace(a @ b))
    return total / 24.0 / (16 * np.pi ** 2)


def horizontal_lift(bundle: BundleModel, x, g, v):
    """Tangent ``(v, -Ad_{g^{-1}} a_x(v))`` at (x, g), annihilated by A."""
    return (np.asarray(v, float), -lie.Ad_inv(g, bundle.a_of(x, v)))


# --- face maps --------------------------------------------------------------


def _act(x: Dual, g: Dual, h: Dual):
    """Right action on Q = X × G: (x, g)·h = (x, gh)."""
    return x, g * h


def _semi_mult(p, g, q, e):
    return p * q, (S.ad_action(q.inv(), g) * e).as_loop()


def _starred_d1(p1, g1, e1, p2, g2, e2):
    # (p1 p2, Ad_{p2^{-1}}(γ1) γ2, γ2^{-1} Ad_{p2^{-1}}(η1) γ2 η2)
    gam = (S.ad_action(p2.inv(), g1) * g2).as_loop()
    eta = (S.ad_action(g2.inv(), S.ad_action(p2.inv(), e1)) * e2).as_loop()
    return p1 * p2, gam, eta


def _build_cs_faces() -> F.FaceMapTable:
    t = F.FaceMapTable("chern-simons 2-gerbe")
    H, V = F.HORIZONTAL, F.VERTICAL
    sm = S.SmoothMap
    # Q × G^n, the nerve of the action groupoid
    t.add(H, [sm("QG.d0", S.QG, S.Q, lambda x, g, h: _act(x, g, h)),
              sm("QG.d1", S.QG, S.Q, lambda x, g, h: (x, g))])
    t.add(H, [sm("QG2.d0", S.QG2, S.QG, lambda x, g, h, k: _act(x, g, h) + (k,)),
              sm("QG2.d1", S.QG2, S.QG, lambda x, g, h, k: (x, g, h * k)),
              sm("QG2.d2", S.QG2, S.QG, lambda x, g, h, k: (x, g, h))])
    t.add(H, [sm("QG3.d0", S.QG3, S.QG2, lambda x, g, a, b, c: _act(x, g, a) + (b, c)),
              sm("QG3.d1", S.QG3, S.QG2, lambda x, g, a, b, c: (x, g, a * b, c)),
              sm("QG3.d2", S.QG3, S.QG2, lambda x, g, a, b, c: (x, g, a, b * c)),
              sm("QG3.d3", S.QG3, S.QG2, lambda x, g, a, b, c: (x, g, a, b))])
    # Q × PG^n, acting through the endpoint
    t.add(H, [sm("QPG.d0", S.QPG, S.Q, lambda x, g, p: _act(x, g, p.end())),
              sm("QPG.d1", S.QPG, S.Q, lambda x, g, p: (x, g))])
    t.add(H, [sm("QPG2.d0", S.QPG2, S.QPG, lambda x, g, p, q: _act(x, g, p.end()) + (q,)),
              sm("QPG2.d1", S.QPG2, S.QPG, lambda x, g, p, q: (x, g, p * q)),
              sm("QPG2.d2", S.QPG2, S.QPG, lambda x, g, p, q: (x, g, p))])
    t.add(H, [sm("QPG3.d0", S.QPG3, S.QPG2, lambda x, g, p, q, r: _act(x, g, p.end()) + (q, r)),
              sm("QPG3.d1", S.QPG3, S.QPG2, lambda x, g, p, q, r: (x, g, p * q, r)),
              sm("QPG3.d2", S.QPG3, S.QPG2, lambda x, g, p, q, r: (x, g, p, q * r)),
              sm("QPG3.d3", S.QPG3, S.QPG2, lambda x, g, p, q, r: (x, g, p, q))])
    # second row: Q × (PG ⋉ ΩG)^n, horizontal faces Act12, mult, pr12
    t.add(H, [sm("QSEMI2.d0", S.QSEMI2, S.QPG_OMEGA,
                 lambda x, g, p, a, q, b: _act(x, g, p.end()) + (q, b)),
              sm("QSEMI2.d1", S.QSEMI2, S.QPG_OMEGA,
                 lambda x, g, p, a, q, b: (x, g) + _semi_mult(p, a, q, b)),
              sm("QSEMI2.d2", S.QSEMI2, S.QPG_OMEGA, lambda x, g, p, a, q, b: (x, g, p, a))])
    # third row, including the starred multiplication
    t.add(H, [sm("QSEMI2_2.d0", S.QSEMI2_2, S.QSEMI_2,
                 lambda x, g, p1, a1, b1, p2, a2, b2: _act(x, g, p1.end()) + (p2, a2, b2)),
              sm("QSEMI2_2.d1", S.QSEMI2_2, S.QSEMI_2,
                 lambda x, g, p1, a1, b1, p2, a2, b2: (x, g) + _starred_d1(p1, a1, b1, p2, a2, b2)),
              sm("QSEMI2_2.d2", S.QSEMI2_2, S.QSEMI_2,
                 lambda x, g, p1, a1, b1, p2, a2, b2: (x, g, p1, a1, b1))])
    # vertical faces: fibre products of PG → G over the first row
    t.add(V, [sm("QPGv.d0", S.QPG_OMEGA, S.QPG, lambda x, g, p, a: (x, g, p * a)),
              sm("QPGv.d1", S.QPG_OMEGA, S.QPG, lambda x, g, p, a: (x, g, p))])
    t.add(V, [sm("QPGv2.d0", S.QPG_OMEGA2, S.QPG_OMEGA, lambda x, g, p, a, b: (x, g, p * a, b)),
              sm("QPGv2.d1", S.QPG_OMEGA2, S.QPG_OMEGA, lambda x, g, p, a, b: (x, g, p, (a * b).as_loop())),
              sm("QPGv2.d2", S.QPG_OMEGA2, S.QPG_OMEGA, lambda x, g, p, a, b: (x, g, p, a))])
    t.add(V, [sm("QSEMI2v.d0", S.QSEMI2, S.QPG2, lambda x, g, p, a, q, b: (x, g, p * a, q * b)),
              sm("QSEMI2v.d1", S.QSEMI2, S.QPG2, lambda x, g, p, a, q, b: (x, g, p, q))])
    return t


CS_FACES = _build_cs_faces()


def cs_face_maps() -> F.FaceMapTable:
    return CS_FACES


def starred_d1_oracle(p1, g1, e1, p2, g2, e2):
    """The starred face computed from the path primitives directly."""
    gam = P.path_multiply(P.loop_adjoint_action(P.path_inverse(p2), g1), g2)
    eta = P.path_multiply(
        P.loop_adjoint_action(P.path_inverse(g2), P.loop_adjoint_action(P.path_inverse(p2), e1)), e2)
    return P.path_multiply(p1, p2), gam, eta
