"""Seeded numerical checks of the gerbe identities.

Each check draws random smooth data, evaluates both sides of an identity on
``points × tangent_sets`` samples and returns a :class:`CheckReport`.  The
relative error is the largest absolute discrepancy divided by the largest
magnitude seen on either side (or of the individual terms, for identities
whose right side is zero).

For checks that use the numerical exterior derivative the observed order is
the self-convergence rate of the residual under ``h → h/2 → h/4``; it is
``None`` when the residual does not change with h, i.e. when the form being
differentiated is translation invariant and no difference quotient enters.
"""
from __future__ import annotations

import time
import zlib
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import bundle as Bm
from . import catalog as C
from . import forms as F
from . import lie
from . import paths as P
from . import spaces as S
from .errors import InvalidInput, UnknownCheck
from .lie import GroupSpec

H, V = F.HORIZONTAL, F.VERTICAL


@dataclass(frozen=True)
class CheckConfig:
    group: str = "su2"
    N: int = 128
    h: float = 1e-4
    seed: int = 0
    points: int = 8
    tangent_sets: int = 4
    fiber_N: int = 64
    m: int = 4
    modes: int = 3
    path_scale: float = 0.5
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        P.GridSpec(self.N)
        P.GridSpec(self.fiber_N)
        if not 1e-7 <= self.h <= 1e-2:
            raise InvalidInput(f"finite-difference step must lie in [1e-7, 1e-2], got {self.h}")
        if self.points < 1 or self.tangent_sets < 1:
            raise InvalidInput("need at least one sample point and one tangent set")
        GroupSpec.parse(self.group)

    @property
    def spec(self) -> GroupSpec:
        return GroupSpec.parse(self.group)


@dataclass
class CheckReport:
    name: str
    group: str
    N: int
    h: float
    samples: int
    max_abs_err: float
    max_rel_err: float
    observed_order: float | None
    tolerance: float
    passed: bool
    seed: int
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        order = "-" if self.observed_order is None else f"{self.observed_order:.2f}"
        return (f"{self.name:32s} {self.group:5s} rel={self.max_rel_err:9.2e} "
                f"tol={self.tolerance:8.1e} order={order:>5s}  {flag}")


# --- sampling ---------------------------------------------------------------


class Sampler:
    """Random smooth data for one check, seeded by (seed, check name)."""

    def __init__(self, cfg: CheckConfig, name: str, spec: GroupSpec | None = None, N: int | None = None):
        self.cfg = cfg
        self.spec = spec or cfg.spec
        self.grid = P.GridSpec(N or cfg.N)
        self.rng = np.random.default_rng([cfg.seed, zlib.crc32(name.encode())])

    def path(self):
        return P.random_path(self.spec, self.grid, self.rng, self.cfg.modes, self.cfg.path_scale)

    def loop(self):
        return P.random_loop(self.spec, self.grid, self.rng, self.cfg.modes, self.cfg.path_scale)

    def ptan(self):
        return P.random_tangent(self.spec, self.grid, self.rng, P.PATH, self.cfg.modes)

    def ltan(self):
        return P.random_tangent(self.spec, self.grid, self.rng, P.LOOP, self.cfg.modes)

    def family(self):
        return P.random_loop_of_loops(self.spec, self.grid, self.rng, self.cfg.modes, self.cfg.path_scale)

    def ftan(self):
        return P.random_family_tangent(self.spec, self.grid, self.rng, self.cfg.modes)

    def alg(self):
        return lie.random_algebra(self.spec, self.rng)

    def grp(self):
        return lie.random_group(self.spec, self.rng)

    def chart(self):
        return self.rng.uniform(-np.pi, np.pi, self.cfg.m)

    def ctan(self):
        return self.rng.standard_normal(self.cfg.m)

    def bundle(self, spec: GroupSpec | None = None):
        return Bm.BundleModel.random(spec or self.spec, self.cfg.m, seed=int(self.rng.integers(2 ** 31)))

    def tangent(self, sp: S.Space):
        out = []
        for k in sp.factors:
            out.append({S.CHART: self.ctan, S.GROUP: self.alg, S.PATH: self.ptan,
                        S.LOOP: self.ltan, S.FAMILY: self.ftan}[k]())
        return tuple(out)

    def point(self, sp: S.Space):
        out = []
        for k in sp.factors:
            out.append({S.CHART: self.chart, S.GROUP: self.grp, S.PATH: self.path,
                        S.LOOP: self.loop, S.FAMILY: self.family}[k]())
        return tuple(out)


# --- generic comparison -----------------------------------------------------


def _mag(v):
    return float(np.max(np.abs(v), initial=0.0))


@dataclass
class _Tally:
    abs_err: float = 0.0
    scale: float = 0.0
    n: int = 0
    probe: float | None = None

    def add(self, lhs, rhs, *terms):
        self.abs_err = max(self.abs_err, _mag(np.asarray(lhs) - np.asarray(rhs)))
        self.scale = max(self.scale, _mag(lhs), _mag(rhs), *(_mag(t) for t in terms))
        if self.probe is None:
            # first sample value used by convergence fits; scale terms win when given
            v = terms[0] if terms else lhs
            self.probe = float(np.real(np.ravel(np.asarray(v, dtype=complex))[0]))
        self.n += 1

    @property
    def rel_err(self):
        if self.scale == 0.0:
            return self.abs_err
        return self.abs_err / self.scale


def _order(residual, h, scale):
    """Self-convergence rate of ``residual(h)`` under two halvings, or None."""
    return _order_signal(residual, h, scale)[0]


def _order_signal(residual, h, scale):
    r0, r1, r2 = (np.asarray(residual(h / 2 ** i)) for i in range(3))
    e1, e2 = _mag(r0 - r1), _mag(r1 - r2)
    noise = 1e-15 * max(scale, 1e-300) / (h / 4)
    # e2 is the smaller difference, so it is the one round-off reaches first
    if e2 <= 10 * noise:
        return None, e2
    return float(np.log2(e1 / e2)), e2


def _report(name, cfg, tally, tol, order=None, details=None, spec=None, N=None, h=None):
    rel = tally.rel_err
    d = dict(details or {})
    if tally.probe is not None:
        d.setdefault("probe", tally.probe)
    return CheckReport(name, (spec or cfg.spec).name, N or cfg.N, cfg.h if h is None else h, tally.n,
                       tally.abs_err, rel, order, tol, bool(rel <= tol), cfg.seed, 0.0, d)


def _run_pairs(sampler, cfg, space, degree, build, points=None, sets=None, terms=None):
    """Evaluate ``build(h) -> (lhs, rhs)`` forms on random samples of ``space``.

    Returns the tally and the candidate (point, tangents) pairs for order
    estimation: the first sample and the one with the largest residual.
    """
    lhs, rhs = build(cfg.h)
    tally = _Tally()
    first, worst_at, worst = None, None, -1.0
    for _ in range(points or cfg.points):
        x = sampler.point(space)
        for _ in range(sets or cfg.tangent_sets):
            Vs = tuple(sampler.tangent(space) for _ in range(degree))
            extra = [t.fn(x, *Vs) for t in (terms or [])]
            a, b = lhs(x, *Vs), rhs(x, *Vs)
            tally.add(a, b, *extra)
            if first is None:
                first = (x, Vs)
            if _mag(np.asarray(a) - np.asarray(b)) > worst:
                worst_at, worst = (x, Vs), _mag(np.asarray(a) - np.asarray(b))
    return tally, [first, worst_at]


def _fd_order(build, candidates, h, scale):
    """Order at whichever candidate sample shows the strongest h-dependence.

    The residual also carries θ-quadrature error that does not move with h,
    so the largest residual is not always where the FD part is observable.
    """
    best = (None, -1.0)
    for x, Vs in candidates:
        def residual(hh):
            lhs, rhs = build(hh)
            return lhs(x, *Vs) - rhs(x, *Vs)

        order, signal = _order_signal(residual, h, scale)
        if signal > best[1]:
            best = (order, signal)
    return best[0]


def _identity(name, cfg, space, degree, build, tol, fd=True, spec=None, points=None, sets=None, terms=None):
    smp = Sampler(cfg, name, spec)
    tally, first = _run_pairs(smp, cfg, space, degree, build, points, sets, terms)
    order = _fd_order(build, first, cfg.h, tally.scale) if fd else None
    return _report(name, cfg, tally, tol, order, spec=spec)


def _proj(sp, keep, cod, name):
    return S.projection(sp, keep, cod, name)


# --- the basic gerbe --------------------------------------------------------


def check_delta_epsilon_eq_nu(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    deps = F.coboundary(C.form_epsilon(spec), C.BASIC_FACES, V)
    nu = F.pullback(C.form_nu(spec), _proj(S.PG_OMEGA2, [1, 2], S.OMEGA2, "pr23_PGOmega2"))
    return _identity("delta_epsilon_eq_nu", cfg, S.PG_OMEGA2, 1, lambda h: (deps, nu), tol, fd=False)


def check_delta_B(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    dB = F.coboundary(C.form_B(spec), C.BASIC_FACES, V)
    R = F.pullback(C.form_R(spec), _proj(S.PG_OMEGA, [1], S.OMEGA, "pr2_PGOmega"))
    eps = C.form_epsilon(spec)
    return _identity("delta_B", cfg, S.PG_OMEGA, 2,
                     lambda h: (dB, R - F.exterior_derivative(eps, h)), tol)


def check_dB_eq_omega(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    B = C.form_B(spec)
    ev_om = F.pullback(C.form_omega(spec), S.get_map("ev_2pi"))
    return _identity("dB_eq_omega", cfg, S.PG, 3, lambda h: (F.exterior_derivative(B, h), ev_om), tol)


def check_AdR_minus_R_eq_drho(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    R = C.form_R(spec)
    lhs = F.pullback(R, S.get_map("adjoint_action")) - F.pullback(R, _proj(S.PG_OMEGA, [1], S.OMEGA, "pr2_PGOmega"))
    rho = C.form_rho(spec)
    return _identity("AdR_minus_R_eq_drho", cfg, S.PG_OMEGA, 2,
                     lambda h: (lhs, F.exterior_derivative(rho, h)), tol)


def check_delta_R_eq_dnu(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    dR = F.coboundary(C.form_R(spec), C.BASIC_FACES, H, S.OMEGA2)
    nu = C.form_nu(spec)
    return _identity("delta_R_eq_dnu", cfg, S.OMEGA2, 2, lambda h: (dR, F.exterior_derivative(nu, h)), tol)


def check_delta_nu_zero(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    nu = C.form_nu(spec)
    faces = C.BASIC_FACES.faces(H, S.OMEGA2)
    terms = [F.pullback(nu, d) for d in faces]
    dnu = F.coboundary(nu, C.BASIC_FACES, H)
    zero = F.zero_form(S.OMEGA3, 1)
    return _identity("delta_nu_zero", cfg, S.OMEGA3, 1, lambda h: (dnu, zero), tol, fd=False, terms=terms)


def check_dR_zero(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    R = C.form_R(spec)
    zero = F.zero_form(S.OMEGA, 3)
    # terms: R on pairs of the sampled tangents sets the scale
    return _identity("dR_zero", cfg, S.OMEGA, 3, lambda h: (F.exterior_derivative(R, h), zero), tol,
                     fd=False, points=2, sets=2,
                     terms=[F.FormEvaluator(S.OMEGA, 3, F.SCALAR, lambda x, a, b, c: R.fn(x, a, b))])


def check_d_kappa_eq_delta_omega(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    dom = F.coboundary(C.form_omega(spec), C.BASIC_FACES, H, S.G2)
    kap = C.form_kappa(spec)
    return _identity("d_kappa_eq_delta_omega", cfg, S.G2, 3,
                     lambda h: (F.exterior_derivative(kap, h), dom), tol)


def check_epsilon_MS_variant(cfg: CheckConfig, tol: float) -> CheckReport:
    """``δ(ε + δε_MS) = ν`` on PG × ΩG², using ``δδε_MS = 0``."""
    spec = cfg.spec
    ems = C.form_epsilon_MS(spec)
    eps2 = C.form_epsilon(spec) + F.coboundary(ems, C.BASIC_FACES, V)
    lhs = F.coboundary(eps2, C.BASIC_FACES, V)
    nu = F.pullback(C.form_nu(spec), _proj(S.PG_OMEGA2, [1, 2], S.OMEGA2, "pr23_PGOmega2"))
    dd = F.coboundary(F.coboundary(ems, C.BASIC_FACES, V), C.BASIC_FACES, V)
    terms = [F.pullback(ems, d.compose(e)) for d in C.BASIC_FACES.faces(V, S.PG)
             for e in C.BASIC_FACES.faces(V, S.PG_OMEGA)]
    smp = Sampler(cfg, "epsilon_MS_variant")
    t1, _ = _run_pairs(smp, cfg, S.PG_OMEGA2, 1, lambda h: (lhs, nu))
    t2, _ = _run_pairs(smp, cfg, S.PG_OMEGA2, 1, lambda h: (dd, F.zero_form(S.PG_OMEGA2, 1)), terms=terms)
    tally = _Tally(max(t1.abs_err, t2.abs_err), max(t1.scale, t2.scale), t1.n + t2.n, t1.probe)
    details = {"variant_minus_nu": t1.rel_err, "delta_delta_eps_MS": t2.rel_err}
    return _report("epsilon_MS_variant", cfg, tally, tol, None, details)


# --- crossed module / 2-gerbe rows ------------------------------------------

_sm = S.SmoothMap
_SURR_MAPS = {
    "rho": _sm("surr.rho", S.SEMI2, S.PG_OMEGA, lambda p, a, q, b: (q.inv(), a)),
    "nu": _sm("surr.nu", S.SEMI2, S.OMEGA2, lambda p, a, q, b: (S.ad_action(q.inv(), a), b)),
    "eps_pq": _sm("surr.eps_pq", S.SEMI2, S.PG_OMEGA,
                  lambda p, a, q, b: (p * q, (S.ad_action(q.inv(), a) * b).as_loop())),
    "eps_q": _sm("surr.eps_q", S.SEMI2, S.PG_OMEGA, lambda p, a, q, b: (q, b)),
    "eps_p": _sm("surr.eps_p", S.SEMI2, S.PG_OMEGA, lambda p, a, q, b: (p, a)),
    "alpha_top": _sm("surr.alpha_top", S.SEMI2, S.PG2, lambda p, a, q, b: (p * a, q * b)),
    "alpha_bot": _sm("surr.alpha_bot", S.SEMI2, S.PG2, lambda p, a, q, b: (p, q)),
}
for _m in _SURR_MAPS.values():
    S.register_map(_m)


def form_alpha_PG2(spec: GroupSpec) -> F.FormEvaluator:
    """α viewed on PG² (it does not depend on the Q point)."""
    return F.FormEvaluator(S.PG2, 1, F.SCALAR,
                           lambda x, V: 2.0 * P.quadrature(lie.killing_form(V[0].values, x[1].phi_hat, spec), P.PATH),
                           "α")


def check_crossed_module_surrogate(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    m = _SURR_MAPS
    rho, nu, eps, al = C.form_rho(spec), C.form_nu(spec), C.form_epsilon(spec), form_alpha_PG2(spec)
    parts = [(-1.0, F.pullback(rho, m["rho"])), (1.0, F.pullback(nu, m["nu"])),
             (1.0, F.pullback(eps, m["eps_pq"])), (-1.0, F.pullback(eps, m["eps_q"])),
             (-1.0, F.pullback(eps, m["eps_p"]))]
    lhs = F.FormEvaluator(S.SEMI2, 1, F.SCALAR, lambda x, V: sum(c * f.fn(x, V) for c, f in parts), "surrogate")
    rhs = F.pullback(al, m["alpha_top"]) - F.pullback(al, m["alpha_bot"])
    terms = [f for _, f in parts]
    return _identity("crossed_module_surrogate", cfg, S.SEMI2, 1, lambda h: (lhs, rhs), tol, fd=False, terms=terms)


def check_delta_A_theta_hat_eq_kappa(cfg: CheckConfig, tol: float) -> CheckReport:
    name = "delta_A_theta_hat_eq_kappa"
    spec = cfg.spec
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    lhs = F.coboundary(Bm.form_A_theta_hat(bm), Bm.CS_FACES, H)
    rhs = F.pullback(C.form_kappa(spec), _proj(S.QG2, [2, 3], S.G2, "pr34_QG2"))
    tally, _ = _run_pairs(smp, cfg, S.QG2, 2, lambda h: (lhs, rhs))
    return _report(name, cfg, tally, tol)


def check_delta_h_alpha_zero(cfg: CheckConfig, tol: float) -> CheckReport:
    spec = cfg.spec
    al = Bm.form_alpha(spec)
    dal = F.coboundary(al, Bm.CS_FACES, H)
    terms = [F.pullback(al, d) for d in Bm.CS_FACES.faces(H, S.QPG2)]
    return _identity("delta_h_alpha_zero", cfg, S.QPG3, 1,
                     lambda h: (dal, F.zero_form(S.QPG3, 1)), tol, fd=False, terms=terms)


_EV2 = S.register_map(_sm("ev2_QPG2", S.QPG2, S.G2, lambda x, g, p, q: (p.end(), q.end())))


def check_delta_h_beta_eq_d_alpha(cfg: CheckConfig, tol: float) -> CheckReport:
    name = "delta_h_beta_eq_d_alpha"
    spec = cfg.spec
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    al = Bm.form_alpha(spec)
    dhB = F.coboundary(Bm.form_B_Q(spec), Bm.CS_FACES, H, S.QPG2)
    pik = F.pullback(C.form_kappa(spec), _EV2)
    dhbeta = F.coboundary(Bm.form_beta_A(bm), Bm.CS_FACES, H, S.QPG2)
    build_a = lambda h: (dhB, F.exterior_derivative(al, h) + pik)
    build_b = lambda h: (dhbeta, F.exterior_derivative(al, h))
    ta, fa = _run_pairs(smp, cfg, S.QPG2, 2, build_a)
    tb, fb = _run_pairs(smp, cfg, S.QPG2, 2, build_b)
    oa = _fd_order(build_a, fa, cfg.h, ta.scale)
    ob = _fd_order(build_b, fb, cfg.h, tb.scale)
    tally = _Tally(max(ta.abs_err, tb.abs_err), max(ta.scale, tb.scale), ta.n + tb.n, ta.probe)
    orders = [o for o in (oa, ob) if o is not None]
    details = {"a_delta_B_eq_d_alpha_plus_kappa": {"max_rel_err": ta.rel_err, "observed_order": oa},
               "b_delta_beta_eq_d_alpha": {"max_rel_err": tb.rel_err, "observed_order": ob}}
    return _report(name, cfg, tally, tol, min(orders) if orders else None, details)


def check_two_curving(cfg: CheckConfig, tol: float) -> CheckReport:
    name = "two_curving"
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    dcs = F.pullback(F.coboundary(Bm.form_cs(bm), Bm.CS_FACES, H, S.QG), Bm.ID_EV)
    beta = Bm.form_beta_A(bm)
    build = lambda h: (dcs, F.exterior_derivative(beta, h))
    tally, first = _run_pairs(smp, cfg, S.QPG, 3, build)
    return _report(name, cfg, tally, tol, _fd_order(build, first, cfg.h, tally.scale))


def check_cs_coboundary(cfg: CheckConfig, tol: float) -> CheckReport:
    """``δ_h(-CS(A)) = pr_3^*ω - d<A, Θ̂>`` on Q × G."""
    name = "cs_coboundary"
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    lhs = F.coboundary(Bm.form_cs(bm), Bm.CS_FACES, H, S.QG)
    om = F.pullback(C.form_omega(cfg.spec), _proj(S.QG, [2], S.G, "pr3_QG"))
    ath = Bm.form_A_theta_hat(bm)
    build = lambda h: (lhs, om - F.exterior_derivative(ath, h))
    tally, first = _run_pairs(smp, cfg, S.QG, 3, build)
    return _report(name, cfg, tally, tol, _fd_order(build, first, cfg.h, tally.scale))


FOUR_CURVATURE_SUBTOL = {"a": 1e-4, "b": 1e-6, "c": 1e-12}


def check_four_curvature(cfg: CheckConfig, tol: float) -> CheckReport:
    """(a) d(-CS) = -<F_A∧F_A>; (b) fibre independence; (c) the p1/2 normalisation on so(5).

    The headline error is each sub-error rescaled to the headline tolerance,
    so the report passes exactly when every sub-check meets its own bound.
    """
    name = "four_curvature"
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    cs = Bm.form_cs(bm)
    FF = Bm.form_F_wedge_F_Q(bm)
    build = lambda h: (F.exterior_derivative(cs, h), -FF)
    ta, first = _run_pairs(smp, cfg, S.Q, 4, build)
    oa = _fd_order(build, first, cfg.h, ta.scale)

    # (b) d(-CS) on horizontal lifts at two points of one fibre
    dcs = F.exterior_derivative(cs, cfg.h)
    tb = _Tally()
    for _ in range(cfg.points):
        x = smp.chart()
        g1, g2 = smp.grp(), smp.grp()
        vs = [smp.ctan() for _ in range(4)]
        v1 = dcs((x, g1), *[Bm.horizontal_lift(bm, x, g1, v) for v in vs])
        v2 = dcs((x, g2), *[Bm.horizontal_lift(bm, x, g2, v) for v in vs])
        tb.add(v1, v2)

    # (c) -<F∧F>/2π against tr(F∧F)/16π² for so(5)
    so5 = GroupSpec("SO", 5)
    b5 = smp.bundle(so5)
    fc = Bm.four_curvature(b5)
    tc = _Tally()
    for _ in range(cfg.points):
        x = smp.chart()
        vs = [smp.ctan() for _ in range(4)]
        tc.add(fc((x,), *[(v,) for v in vs]) / (2 * np.pi), Bm.half_pontryagin(b5, x, vs))

    subs = {"a": ta, "b": tb, "c": tc}
    scaled = max(t.rel_err * tol / FOUR_CURVATURE_SUBTOL[k] for k, t in subs.items())
    details = {k: {"max_abs_err": t.abs_err, "max_rel_err": t.rel_err, "tolerance": FOUR_CURVATURE_SUBTOL[k],
                   "passed": bool(t.rel_err <= FOUR_CURVATURE_SUBTOL[k])} for k, t in subs.items()}
    details["a"]["observed_order"] = oa
    details["c"]["label"] = "-<F,F>/2π vs tr(F∧F)/16π² on so(5)"
    tally = _Tally(ta.abs_err, ta.scale, ta.n + tb.n + tc.n, ta.probe)
    rep = _report(name, cfg, tally, tol, oa, details)
    rep.max_rel_err = float(scaled)
    rep.passed = bool(scaled <= tol)
    return rep


def check_flat_case(cfg: CheckConfig, tol: float) -> CheckReport:
    """With a = 0: -CS(A) = ω on vertical tangents, and the 4-curvature vanishes."""
    name = "flat_case"
    spec = cfg.spec
    smp = Sampler(cfg, name)
    flat = Bm.BundleModel.flat(spec, cfg.m)
    cs = Bm.form_cs(flat)
    om = C.form_omega(spec)
    fc = Bm.four_curvature(flat)
    t1, t2 = _Tally(), _Tally()
    for _ in range(cfg.points):
        x, g = smp.chart(), smp.grp()
        Xs = [smp.alg() for _ in range(3)]
        zero = np.zeros(cfg.m)
        t1.add(cs((x, g), *[(zero, X) for X in Xs]), om((g,), *[(X,) for X in Xs]))
        t2.add(fc((x,), *[(smp.ctan(),) for _ in range(4)]), 0.0)
    # the 4-curvature is compared in absolute terms against zero
    abs_err = max(t1.abs_err, t2.abs_err)
    rel = max(t1.rel_err, t2.abs_err)
    tally = _Tally(abs_err, t1.scale, t1.n + t2.n, t1.probe)
    rep = _report(name, cfg, tally, tol, None, {"cs_vs_omega": t1.rel_err, "four_curvature_abs": t2.abs_err})
    rep.max_rel_err = float(rel)
    rep.passed = bool(rel <= tol)
    return rep


# --- structural checks ------------------------------------------------------


def check_delta_squared(cfg: CheckConfig, tol: float) -> CheckReport:
    """δ_h δ_h β_A on Q × PG³ and δ_v δ_v ε_MS on PG × ΩG² vanish."""
    name = "delta_squared"
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    beta = Bm.form_beta_A(bm)
    d1 = F.coboundary(beta, Bm.CS_FACES, H, S.QPG2)
    dd = F.coboundary(d1, Bm.CS_FACES, H, S.QPG3)
    terms = [F.pullback(beta, a.compose(b)) for b in Bm.CS_FACES.faces(H, S.QPG2, S.QPG3)
             for a in Bm.CS_FACES.faces(H, S.QPG, S.QPG2)]
    t1, _ = _run_pairs(smp, cfg, S.QPG3, 2, lambda h: (dd, F.zero_form(S.QPG3, 2)), points=2, sets=2, terms=terms)
    ems = C.form_epsilon_MS(cfg.spec)
    e2 = F.coboundary(F.coboundary(ems, C.BASIC_FACES, V), C.BASIC_FACES, V)
    terms2 = [F.pullback(ems, a.compose(b)) for b in C.BASIC_FACES.faces(V, S.PG_OMEGA)
              for a in C.BASIC_FACES.faces(V, S.PG)]
    t2, _ = _run_pairs(smp, cfg, S.PG_OMEGA2, 1, lambda h: (e2, F.zero_form(S.PG_OMEGA2, 1)), terms=terms2)
    tally = _Tally(max(t1.abs_err, t2.abs_err), max(t1.scale, t2.scale), t1.n + t2.n, t1.probe)
    return _report(name, cfg, tally, tol, None, {"beta_A": t1.rel_err, "eps_MS": t2.rel_err})


def check_delta_h_delta_v(cfg: CheckConfig, tol: float) -> CheckReport:
    """δ_h δ_v = δ_v δ_h on Q × (PG ⋉ ΩG)², applied to β_A."""
    name = "delta_h_delta_v"
    smp = Sampler(cfg, name)
    bm = smp.bundle()
    beta = Bm.form_beta_A(bm)
    hv = F.coboundary(F.coboundary(beta, Bm.CS_FACES, V, S.QPG_OMEGA), Bm.CS_FACES, H, S.QSEMI2)
    vh = F.coboundary(F.coboundary(beta, Bm.CS_FACES, H, S.QPG2), Bm.CS_FACES, V, S.QSEMI2)
    tally, _ = _run_pairs(smp, cfg, S.QSEMI2, 2, lambda h: (hv, vh), points=2, sets=2)
    return _report(name, cfg, tally, tol)


def check_maurer_cartan(cfg: CheckConfig, tol: float) -> CheckReport:
    """dΘ + ½[Θ, Θ] = 0 on G, with dΘ also cross-checked on a 2-parameter surface."""
    name = "maurer_cartan"
    spec = cfg.spec
    smp = Sampler(cfg, name)
    th = C.form_theta(spec)
    br = C.form_mc_bracket(spec)
    dth = F.exterior_derivative(th, cfg.h)
    t1, t2 = _Tally(), _Tally()
    h = 1e-4
    for _ in range(cfg.points):
        g = smp.grp()
        for _ in range(cfg.tangent_sets):
            X, Y = smp.alg(), smp.alg()
            t1.add(dth((g,), (X,), (Y,)), -0.5 * br((g,), (X,), (Y,)))
            # surface u(s, t) = g exp(sX) exp(tY); dΘ(∂s, ∂t) = ½(∂s Θ(∂t) - ∂t Θ(∂s))
            u = lambda s, t: g @ lie.exp(s * X) @ lie.exp(t * Y)
            def theta(s, t, which):
                if which == "t":
                    d = (u(s, t + h) - u(s, t - h)) / (2 * h)
                else:
                    d = (u(s + h, t) - u(s - h, t)) / (2 * h)
                return lie.group_inverse(u(s, t)) @ d
            ds_tht = (theta(h, 0, "t") - theta(-h, 0, "t")) / (2 * h)
            dt_ths = (theta(0, h, "s") - theta(0, -h, "s")) / (2 * h)
            surf = 0.5 * (ds_tht - dt_ths)
            t2.add(surf, dth((g,), (X,), (Y,)))
    tally = _Tally(max(t1.abs_err, t2.abs_err), max(t1.scale, t2.scale), t1.n + t2.n, None)
    return _report(name, cfg, tally, tol, None, {"mc_equation": t1.rel_err, "surface_oracle": t2.rel_err})


def check_simplicial_identities(cfg: CheckConfig, tol: float) -> CheckReport:
    name = "simplicial_identities"
    smp = Sampler(cfg, name)
    worst = 0.0
    n = 0
    per_level = {}
    for table in (Bm.CS_FACES, C.BASIC_FACES):
        for direction, faces in table.levels():
            top = faces[0].domain
            try:
                table._from(direction, faces[0].codomain)
            except InvalidInput:
                continue
            for _ in range(2):
                err = table.simplicial_defect(direction, top, smp.point(top))
                worst = max(worst, err)
                per_level[f"{direction}:{top.name}"] = max(per_level.get(f"{direction}:{top.name}", 0.0), err)
                n += 1
    # bisimplicial: horizontal and vertical faces commute on Q × (PG ⋉ ΩG)²
    for _ in range(2):
        x = smp.point(S.QSEMI2)
        hv = Bm.CS_FACES.faces(H, S.QPG_OMEGA)
        vv = Bm.CS_FACES.faces(V, S.QPG2)
        vlow = Bm.CS_FACES.faces(V, S.QPG)
        hlow = Bm.CS_FACES.faces(H, S.QPG, S.QPG2)
        for i in range(3):
            for j in range(2):
                a = vlow[j](hv[i](x))
                b = hlow[i](vv[j](x))
                worst = max(worst, F.point_distance(S.QPG, a, b))
        n += 1
    # the starred face against the path primitives
    for _ in range(2):
        x = smp.point(S.QSEMI2_2)
        got = S.get_map("QSEMI2_2.d1")(x)[2:]
        want = Bm.starred_d1_oracle(*x[2:])
        worst = max(worst, max(float(np.max(np.abs(a.values - b.values))) for a, b in zip(got, want)))
        n += 1
    tally = _Tally(worst, 1.0, n, None)
    return _report(name, cfg, tally, tol, None, per_level)


def check_pushforward_consistency(cfg: CheckConfig, tol: float) -> CheckReport:
    """Analytic and finite-difference pushforwards agree on every registered map."""
    name = "pushforward_consistency"
    smp = Sampler(cfg, name)
    tally = _Tally()
    for mname, m in sorted(S.MAPS.items()):
        if S.FAMILY in m.domain.factors:
            continue
        x = smp.point(m.domain)
        v = smp.tangent(m.domain)
        for k, a, b in zip(m.codomain.factors, m.push(x, v), m.push_fd(x, v)):
            if k in (S.PATH, S.LOOP):
                tally.add(a.values, b.values)
            else:
                tally.add(a, b)
    rep = _report(name, cfg, tally, tol)
    rep.max_rel_err = tally.abs_err / max(1.0, tally.scale)
    rep.passed = bool(rep.max_rel_err <= tol)
    return rep


# --- fiber integration ------------------------------------------------------


def random_test_one_form(spec: GroupSpec, grid: P.GridSpec, rng) -> F.FormEvaluator:
    """A smooth 1-form on PG × ΩG: ``∫ <X, Ad_γ W_1 + φ_p> + <Y, Ad_p W_2>`` for fixed grids W."""
    W1 = P.random_tangent(spec, grid, rng, P.PATH).values
    W2 = P.random_tangent(spec, grid, rng, P.PATH).values

    def fn(x, V):
        p, g = x
        X, Y = V
        a = lie.killing_form(X.values, lie.Ad(g.values, W1) + p.phi, spec)
        b = lie.killing_form(Y.values, lie.Ad(p.values, W2), spec)
        return P.quadrature(a + b, P.PATH)

    return F.FormEvaluator(S.PG_OMEGA, 1, F.SCALAR, fn, "σ")


def check_stokes(cfg: CheckConfig, tol: float) -> CheckReport:
    """``d∫ξ + ∫dξ = ξ|_{2π} - ξ|_0`` for ξ = (id×ev)^*ρ and a random test form."""
    name = "stokes"
    spec = cfg.spec
    smp = Sampler(cfg, name, N=cfg.fiber_N)
    tg = P.GridSpec(cfg.fiber_N)
    forms = {"rho": C.form_ev_rho(spec),
             "random": C.pullback_id_ev(random_test_one_form(spec, smp.grid, smp.rng))}
    tally = _Tally()
    details = {}
    for label, xi in forms.items():
        top, bot = F.restrict_slice(xi, 2 * np.pi), F.restrict_slice(xi, 0.0)

        def build(h, xi=xi, top=top, bot=bot):
            lhs = F.exterior_derivative(F.fiber_integrate(xi, tg), h) + F.fiber_integrate(F.exterior_derivative(xi, h), tg)
            return lhs, top - bot

        sub, _ = _run_pairs(smp, cfg, S.PG_PLOOP, 1, build, points=2, sets=1)
        details[label] = sub.rel_err
        tally = _Tally(max(tally.abs_err, sub.abs_err), max(tally.scale, sub.scale), tally.n + sub.n,
                       tally.probe if tally.probe is not None else sub.probe)
    return _report(name, cfg, tally, tol, None, details, N=cfg.fiber_N)


def check_adjoint_phase(cfg: CheckConfig, tol: float) -> CheckReport:
    name = "adjoint_phase"
    spec = cfg.spec
    smp = Sampler(cfg, name, N=cfg.fiber_N)
    tally = _Tally()
    for _ in range(cfg.points):
        p, f = smp.path(), smp.family()
        a, b = C.adjoint_phase(spec, p, f)
        tally.add(a, b)
    return _report(name, cfg, tally, tol, None, N=cfg.fiber_N)


# --- the SU(2) period -------------------------------------------------------


def su2_period(n: int = 48) -> float:
    """``∫_{SU(2)} ω`` by midpoint quadrature in Euler angles on an n³ grid.

    ``g = exp(a e3) exp(b e2) exp(c e3)``, a ∈ [0, 2π), b ∈ [0, π], c ∈ [0, 4π),
    with ``e_k = -iσ_k/2`` so that ``[e1, e2] = e3``.  The chart is oriented
    like the frame (e1, e2, e3); a top form integrates as 3! times its
    Kobayashi–Nomizu value on the coordinate vectors.
    """
    spec = GroupSpec("SU", 2)
    sig = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
    e = [-0.5j * s for s in sig]
    a = (np.arange(n) + 0.5) * (2 * np.pi / n)
    b = (np.arange(n) + 0.5) * (np.pi / n)
    c = (np.arange(n) + 0.5) * (4 * np.pi / n)
    A, Bg, Cg = np.meshgrid(a, b, c, indexing="ij")
    A, Bg, Cg = A.ravel(), Bg.ravel(), Cg.ravel()
    ex = lambda t, E: lie.exp(t[:, None, None] * E)
    Eb, Ec = ex(Bg, e[1]), ex(Cg, e[2])
    # left-representation coordinate vectors g^{-1} ∂g
    Tc = np.broadcast_to(e[2], Eb.shape)
    Tb = lie.Ad_inv(Ec, np.broadcast_to(e[1], Eb.shape))
    Ta = lie.Ad_inv(Eb @ Ec, np.broadcast_to(e[2], Eb.shape))
    om = C.form_omega(spec)
    G = ex(A, e[2]) @ Eb @ Ec
    vals = om.fn((G,), (Ta,), (Tb,), (Tc,))
    frame = np.stack([lie.coordinates(T, spec) for T in (Ta, Tb, Tc)], axis=-2)
    ref = np.stack([lie.coordinates(E, spec) for E in e])
    orient = np.sign(np.linalg.det(frame[n * n * (n // 2) + n * (n // 2) + n // 2]) * np.linalg.det(ref))
    vol = (2 * np.pi / n) * (np.pi / n) * (4 * np.pi / n)
    return float(orient * 6.0 * np.sum(vals) * vol)


def check_su2_period(cfg: CheckConfig, tol: float) -> CheckReport:
    val = su2_period(48)
    err = abs(val - 2 * np.pi)
    tally = _Tally(err, 2 * np.pi, 48 ** 3, val)
    return _report("su2_period", cfg, tally, tol, None, {"integral": val, "expected": 2 * np.pi},
                   spec=GroupSpec("SU", 2), N=48)


# --- registry ---------------------------------------------------------------


@dataclass(frozen=True)
class CheckSpec:
    fn: object
    tolerance: float
    kind: str  # "roundoff", "fd", "structural", "quadrature"


CHECKS: dict[str, CheckSpec] = {
    "delta_epsilon_eq_nu": CheckSpec(check_delta_epsilon_eq_nu, 1e-10, "roundoff"),
    "delta_h_alpha_zero": CheckSpec(check_delta_h_alpha_zero, 1e-10, "roundoff"),
    "crossed_module_surrogate": CheckSpec(check_crossed_module_surrogate, 1e-8, "roundoff"),
    "delta_A_theta_hat_eq_kappa": CheckSpec(check_delta_A_theta_hat_eq_kappa, 1e-10, "roundoff"),
    "epsilon_MS_variant": CheckSpec(check_epsilon_MS_variant, 1e-10, "roundoff"),
    "delta_nu_zero": CheckSpec(check_delta_nu_zero, 1e-10, "roundoff"),
    "delta_B": CheckSpec(check_delta_B, 1e-4, "fd"),
    "dB_eq_omega": CheckSpec(check_dB_eq_omega, 1e-4, "fd"),
    "AdR_minus_R_eq_drho": CheckSpec(check_AdR_minus_R_eq_drho, 1e-4, "fd"),
    "delta_h_beta_eq_d_alpha": CheckSpec(check_delta_h_beta_eq_d_alpha, 1e-4, "fd"),
    "two_curving": CheckSpec(check_two_curving, 1e-4, "fd"),
    "four_curvature": CheckSpec(check_four_curvature, 1e-4, "fd"),
    "cs_coboundary": CheckSpec(check_cs_coboundary, 1e-4, "fd"),
    "d_kappa_eq_delta_omega": CheckSpec(check_d_kappa_eq_delta_omega, 1e-4, "fd"),
    "delta_R_eq_dnu": CheckSpec(check_delta_R_eq_dnu, 1e-5, "fd"),
    "dR_zero": CheckSpec(check_dR_zero, 1e-3, "fd"),
    "stokes": CheckSpec(check_stokes, 1e-4, "quadrature"),
    "adjoint_phase": CheckSpec(check_adjoint_phase, 1e-6, "quadrature"),
    "su2_period": CheckSpec(check_su2_period, 0.02, "quadrature"),
    "delta_squared": CheckSpec(check_delta_squared, 1e-12, "structural"),
    "delta_h_delta_v": CheckSpec(check_delta_h_delta_v, 1e-12, "structural"),
    "maurer_cartan": CheckSpec(check_maurer_cartan, 1e-6, "structural"),
    "simplicial_identities": CheckSpec(check_simplicial_identities, 1e-12, "structural"),
    "flat_case": CheckSpec(check_flat_case, 1e-10, "structural"),
    "pushforward_consistency": CheckSpec(check_pushforward_consistency, 1e-6, "structural"),
}


def run_check(name: str, cfg: CheckConfig | None = None) -> CheckReport:
    cfg = cfg or CheckConfig()
    try:
        spec = CHECKS[name]
    except KeyError:
        raise UnknownCheck(name) from None
    tol = float(cfg.tolerances.get(name, spec.tolerance))
    t0 = time.perf_counter()
    rep = spec.fn(cfg, tol)
    rep.elapsed = time.perf_counter() - t0
    return rep


def run_all(cfg: CheckConfig | None = None, names=None, workers: int = 1) -> list[CheckReport]:
    """Run the selected checks (default: all) and return reports sorted by name."""
    cfg = cfg or CheckConfig()
    if names is None or names == "all":
        names = list(CHECKS)
    names = list(names)
    for n in names:
        if n not in CHECKS:
            raise UnknownCheck(n)
    if workers > 1 and len(names) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            reports = list(ex.map(lambda n: run_check(n, cfg), names))
    else:
        reports = [run_check(n, cfg) for n in names]
    return sorted(reports, key=lambda r: r.name)


def with_overrides(cfg: CheckConfig, **kw) -> CheckConfig:
    return replace(cfg, **kw)
