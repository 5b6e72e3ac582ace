"""Named forms on G, PG, ΩG and products, as FormEvaluators.

Integrals over θ use the endpoint-corrected path rule, except for R whose
integrand lives purely on loops and uses the periodic trapezoid.  ν uses the
path rule as well: it is compared against combinations of ε, ρ and α that
cancel pointwise in θ, and sharing one rule keeps those cancellations exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import forms as F
from . import lie
from . import paths as P
from . import spaces as S
from .errors import InvalidInput
from .lie import GroupSpec


def _kf(spec):
    return lambda X, Y: lie.killing_form(X, Y, spec)


def _ip(spec, X, W, kind=P.PATH):
    """``∫ <X(θ), W(θ)> dθ`` for a tangent X and an algebra-valued grid W."""
    return P.quadrature(lie.killing_form(X.values, W, spec), kind)


# --- Maurer-Cartan forms and the 3-form on G --------------------------------


def form_theta(spec: GroupSpec) -> F.FormEvaluator:
    return F.FormEvaluator(S.G, 1, F.ALGEBRA, lambda x, V: lie.maurer_cartan_left(x[0], V[0]), "Θ")


def form_theta_hat(spec: GroupSpec) -> F.FormEvaluator:
    return F.FormEvaluator(S.G, 1, F.ALGEBRA, lambda x, V: lie.maurer_cartan_right(x[0], V[0]), "Θ̂")


def form_mc_bracket(spec: GroupSpec) -> F.FormEvaluator:
    """``[Θ, Θ]`` through the wedge; equals ``[X, Y]`` on (X, Y)."""
    th = form_theta(spec)
    return F.wedge(th, th, product=lie.bracket, value_kind=F.ALGEBRA)


def form_omega(spec: GroupSpec) -> F.FormEvaluator:
    """``ω = (1/6) <[Θ, Θ] ∧ Θ>``; on (X, Y, Z) this is ``<[X, Y], Z>/6``."""
    inner = F.wedge(form_mc_bracket(spec), form_theta(spec), product=_kf(spec))
    return F.FormEvaluator(S.G, 3, F.SCALAR, lambda x, *V: inner.fn(x, *V) / 6.0, "ω")


def omega_closed_form(spec, X, Y, Z):
    return lie.killing_form(lie.bracket(X, Y), Z, spec) / 6.0


def form_kappa(spec: GroupSpec) -> F.FormEvaluator:
    """``κ = <pr_1^*Θ ∧ pr_2^*Θ̂>`` on G²."""
    a = F.pullback(form_theta(spec), S.projection(S.G2, [0], S.G, "pr1_G2"))
    b = F.pullback(form_theta_hat(spec), S.projection(S.G2, [1], S.G, "pr2_G2"))
    w = F.wedge(a, b, product=_kf(spec))
    return F.FormEvaluator(S.G2, 2, F.SCALAR, w.fn, "κ")


# --- Higgs fields -----------------------------------------------------------


def form_phi(spec: GroupSpec) -> F.FormEvaluator:
    return F.FormEvaluator(S.PG, 0, F.ALGEBRA, lambda x: P.higgs(x[0]), "φ")


def form_phi_hat(spec: GroupSpec) -> F.FormEvaluator:
    return F.FormEvaluator(S.PG, 0, F.ALGEBRA, lambda x: P.higgs_hat(x[0]), "φ̂")


# --- 2-forms on loops and paths ---------------------------------------------


def _antisym_d(spec, X, Y, kind):
    a = _ip(spec, X, Y.derivative, kind)
    b = _ip(spec, Y, X.derivative, kind)
    return 0.5 * (a - b)


def form_R(spec: GroupSpec, naive: bool = False) -> F.FormEvaluator:
    """Curvature 2-form on ΩG; ``naive`` skips the explicit antisymmetrisation."""
    if naive:
        fn = lambda x, X, Y: _ip(spec, X[0], Y[0].derivative, P.LOOP)
    else:
        fn = lambda x, X, Y: _antisym_d(spec, X[0], Y[0], P.LOOP)
    return F.FormEvaluator(S.OMEGA, 2, F.SCALAR, fn, "R")


def form_B(spec: GroupSpec) -> F.FormEvaluator:
    """Curving on PG: ``½ ∫ (<X, ∂Y> - <Y, ∂X>) dθ``; independent of the base point."""
    return F.FormEvaluator(S.PG, 2, F.SCALAR, lambda x, X, Y: _antisym_d(spec, X[0], Y[0], P.PATH), "B")


# --- 1-forms ----------------------------------------------------------------


def form_nu(spec: GroupSpec) -> F.FormEvaluator:
    """On ΩG²: ``2 ∫ <X, φ̂_η>``; only the first tangent factor enters."""
    return F.FormEvaluator(S.OMEGA2, 1, F.SCALAR,
                           lambda x, V: 2.0 * _ip(spec, V[0], x[1].phi_hat), "ν")


def form_epsilon(spec: GroupSpec) -> F.FormEvaluator:
    """On PG×ΩG: ``2 ∫ <X_p, φ̂_γ>``."""
    return F.FormEvaluator(S.PG_OMEGA, 1, F.SCALAR,
                           lambda x, V: 2.0 * _ip(spec, V[0], x[1].phi_hat), "ε")


def form_rho(spec: GroupSpec) -> F.FormEvaluator:
    """On PG×ΩG: ``2 ∫ <X, Ad_γ φ_p - φ_p - φ̂_γ> + <Y, φ_p>``."""

    def fn(x, V):
        p, g = x
        X, Y = V
        phi = p.phi
        W = lie.Ad(g.values, phi) - phi - g.phi_hat
        return 2.0 * (_ip(spec, X, W) + _ip(spec, Y, phi))

    return F.FormEvaluator(S.PG_OMEGA, 1, F.SCALAR, fn, "ρ")


def form_epsilon_MS(spec: GroupSpec) -> F.FormEvaluator:
    """On PG: ``2 ∫ (θ/2π) <Ad_{p(2π)} X(2π), φ_p(θ)>``."""

    def fn(x, V):
        p = x[0]
        Z = lie.Ad(p.end, V[0].end)
        w = p.grid.nodes / P.TWO_PI
        return 2.0 * P.quadrature(w * lie.killing_form(Z, p.phi, spec), P.PATH)

    return F.FormEvaluator(S.PG, 1, F.SCALAR, fn, "ε_MS")


# --- the lifted adjoint action on PΩG ---------------------------------------


def pullback_id_ev(form: F.FormEvaluator) -> F.FormEvaluator:
    """``(id × ev)^* σ`` on PG × PΩG × [0, 2π] for a 1-form σ on PG × ΩG, ``ev(f, t) = f(t)``."""
    if form.space != S.PG_OMEGA or form.degree != 1:
        raise InvalidInput("expected a 1-form on PG×ΩG")

    def fn(x, V):
        p, f, t = x
        X, Xi, tau = V
        t = float(t[0])
        Y = Xi.at(t) + float(tau[0]) * f.velocity(t)
        return form.fn((p, f.at(t)), (X, Y))

    return F.FormEvaluator(S.with_interval(S.PG_PLOOP), 1, form.value_kind, fn, f"(id×ev)*{form.name}")


def form_ev_rho(spec: GroupSpec) -> F.FormEvaluator:
    """``ξ = (id × ev)^* ρ``."""
    return pullback_id_ev(form_rho(spec))


def adjoint_phase(spec: GroupSpec, p: P.SampledPath, f: P.LoopOfLoops,
                  t_grid: P.GridSpec | None = None, t_derivative: str = "jet") -> tuple[float, float]:
    """The U(1) component of the lifted adjoint action, by two routes.

    Returns ``(double_integral, fiber_integral)``.  The first integrates
    ``2 <f^{-1} ∂_t f, φ_p>`` over the square directly from the samples of f
    and of ``∂_t f`` (``t_derivative="fd"`` differentiates the samples in t
    instead); the second is the fiber integral of ``(id × ev)^* ρ`` at (p, f).
    """
    if np.max(np.abs(f.at(0.0).values - spec.identity())) > 1e-10:
        raise InvalidInput("the family must start at the constant identity loop")
    t_grid = t_grid or f.grid
    samples = f.samples(t_grid)
    if t_derivative == "jet":
        dts = np.stack([f.dt(t) for t in t_grid.nodes])
    elif t_derivative == "fd":
        dts = P.theta_derivative(samples, P.PATH)
    else:
        raise InvalidInput(f"unknown t-derivative mode {t_derivative!r}")
    vel = lie.project_algebra(lie.group_inverse(samples) @ dts, spec)
    inner = P.quadrature(np.moveaxis(lie.killing_form(vel, p.phi[None], spec), 0, 1), P.PATH)
    double = 2.0 * P.quadrature(inner, P.PATH)
    fiber = F.fiber_integrate(form_ev_rho(spec), t_grid)((p, f))
    return float(double), float(fiber)


# --- catalogue listing ------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    space: str
    degree: int
    location: str
    status: str  # "housed", "bundle" (built from bundle data) or "descended-only"
    builder: object = None

    def to_dict(self):
        return {"name": self.name, "space": self.space, "degree": self.degree,
                "location": self.location, "status": self.status}


CATALOG = (
    CatalogEntry("Θ", "G", 1, "left Maurer-Cartan form on G", "housed", form_theta),
    CatalogEntry("Θ̂", "G", 1, "right Maurer-Cartan form on G", "housed", form_theta_hat),
    CatalogEntry("μ", "Ω̂G", 1, "connection on the central extension; represented through ε, ν, ρ", "descended-only"),
    CatalogEntry("R", "ΩG", 2, "curvature of μ, pulled down to ΩG", "housed", form_R),
    CatalogEntry("ν", "ΩG²", 1, "correction 1-form for the multiplicative connection", "housed", form_nu),
    CatalogEntry("φ", "PG", 0, "Higgs field p^{-1}∂p", "housed", form_phi),
    CatalogEntry("φ̂", "PG", 0, "right Higgs field ∂p p^{-1}", "housed", form_phi_hat),
    CatalogEntry("B", "PG", 2, "curving of the basic gerbe", "housed", form_B),
    CatalogEntry("ε", "PG×ΩG", 1, "1-form correcting μ to a bundle gerbe connection", "housed", form_epsilon),
    CatalogEntry("∇", "PG×Ω̂G", 1, "bundle gerbe connection μ - π*ε; represented through ε", "descended-only"),
    CatalogEntry("κ", "G²", 2, "mixed pairing <pr1*Θ, pr2*Θ̂>", "housed", form_kappa),
    CatalogEntry("ρ", "PG×ΩG", 1, "U(1) part of the lifted adjoint action", "housed", form_rho),
    CatalogEntry("A", "Q", 1, "principal connection on Q", "bundle"),
    CatalogEntry("β_A", "Q×PG", 2, "curving of the Chern-Simons 2-gerbe", "bundle"),
    CatalogEntry("α", "Q×PG²", 1, "1-form of the rigid connective structure", "bundle"),
    CatalogEntry("-CS(A)", "Q", 3, "2-curving: minus the Chern-Simons form", "bundle"),
)

EXTRAS = (
    CatalogEntry("ω", "G", 3, "3-curvature of the basic gerbe, (1/6)<[Θ,Θ],Θ>", "housed", form_omega),
    CatalogEntry("ε_MS", "PG", 1, "alternative 1-form on PG built from the endpoint", "housed", form_epsilon_MS),
    CatalogEntry("adjoint phase", "PG×PΩG", 0, "double integral vs fiber integral of (id×ev)*ρ", "housed"),
)


def catalog(extras: bool = False):
    return list(CATALOG + EXTRAS) if extras else list(CATALOG)


# --- face maps of the basic gerbe and the group nerves ----------------------


def _build_basic() -> F.FaceMapTable:
    t = F.FaceMapTable("basic gerbe")
    sm = S.SmoothMap
    H, V = F.HORIZONTAL, F.VERTICAL
    # nerves of G and ΩG: (g, h) ↦ h, gh, g
    t.add(H, [sm("G2.d0", S.G2, S.G, lambda g, h: (h,)),
              sm("G2.d1", S.G2, S.G, lambda g, h: (g * h,)),
              sm("G2.d2", S.G2, S.G, lambda g, h: (g,))])
    t.add(H, [sm("G3.d0", S.G3, S.G2, lambda a, b, c: (b, c)),
              sm("G3.d1", S.G3, S.G2, lambda a, b, c: (a * b, c)),
              sm("G3.d2", S.G3, S.G2, lambda a, b, c: (a, b * c)),
              sm("G3.d3", S.G3, S.G2, lambda a, b, c: (a, b))])
    t.add(H, [sm("OmegaG2.d0", S.OMEGA2, S.OMEGA, lambda g, e: (e,)),
              sm("OmegaG2.d1", S.OMEGA2, S.OMEGA, lambda g, e: ((g * e).as_loop(),)),
              sm("OmegaG2.d2", S.OMEGA2, S.OMEGA, lambda g, e: (g,))])
    t.add(H, [sm("OmegaG3.d0", S.OMEGA3, S.OMEGA2, lambda a, b, c: (b, c)),
              sm("OmegaG3.d1", S.OMEGA3, S.OMEGA2, lambda a, b, c: ((a * b).as_loop(), c)),
              sm("OmegaG3.d2", S.OMEGA3, S.OMEGA2, lambda a, b, c: (a, (b * c).as_loop())),
              sm("OmegaG3.d3", S.OMEGA3, S.OMEGA2, lambda a, b, c: (a, b))])
    # fibre products of PG → G, identified with PG × ΩG^n via (p, pγ, pγη, ..)
    t.add(V, [sm("PGv.d0", S.PG_OMEGA, S.PG, lambda p, a: (p * a,)),
              sm("PGv.d1", S.PG_OMEGA, S.PG, lambda p, a: (p,))])
    t.add(V, [sm("PGv2.d0", S.PG_OMEGA2, S.PG_OMEGA, lambda p, a, b: (p * a, b)),
              sm("PGv2.d1", S.PG_OMEGA2, S.PG_OMEGA, lambda p, a, b: (p, (a * b).as_loop())),
              sm("PGv2.d2", S.PG_OMEGA2, S.PG_OMEGA, lambda p, a, b: (p, a))])
    t.add(V, [sm("PGv3.d0", S.PG_OMEGA3, S.PG_OMEGA2, lambda p, a, b, c: (p * a, b, c)),
              sm("PGv3.d1", S.PG_OMEGA3, S.PG_OMEGA2, lambda p, a, b, c: (p, (a * b).as_loop(), c)),
              sm("PGv3.d2", S.PG_OMEGA3, S.PG_OMEGA2, lambda p, a, b, c: (p, a, (b * c).as_loop())),
              sm("PGv3.d3", S.PG_OMEGA3, S.PG_OMEGA2, lambda p, a, b, c: (p, a, b))])
    return t


BASIC_FACES = _build_basic()
