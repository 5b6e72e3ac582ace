"""Command-line entry point: checks, convergence sweeps, the bundle demo and the form catalogue.

Configuration precedence is flags > ``--config`` JSON file > defaults.  The
default seed may also come from the ``CSGERBE_SEED`` environment variable.
All randomness derives from that seed through numpy's PCG64 generator.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from . import bundle as Bm
from . import catalog as C
from . import checks as K
from . import paths as P
from .errors import GerbeError, InvalidInput, UnknownCheck
from .lie import GroupSpec, random_algebra, random_group

GROUPS = ("su2", "su3", "so5", "sp1", "so3")
SCHEMA_VERSION = 1
CSV_COLUMNS = ["check", "group", "N", "h", "max_abs_err", "max_rel_err", "observed_order", "pass"]
SEED_ENV = "CSGERBE_SEED"

DEFAULTS = {
    "group": "su2", "N": 128, "h": 1e-4, "seed": 0, "checks": "all", "tolerances": {},
    "format": "text", "output": None, "points": 8, "tangent_sets": 4, "workers": 1,
}


class UsageError(Exception):
    pass


def _parse_checks(value):
    if value is None or value == "all" or value == ["all"]:
        return "all"
    if isinstance(value, str):
        value = [v for v in value.split(",") if v]
    return list(value)


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"tolerance override must look like name=value, got {item!r}")
        try:
            out[name] = float(val)
        except ValueError:
            raise UsageError(f"bad tolerance value in {item!r}") from None
    return out


def resolve_config(args, base: dict | None = None) -> dict:
    """Merge defaults, the optional config file and explicit flags."""
    cfg = {**DEFAULTS, **(base or {})}
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            cfg["seed"] = int(env_seed)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "tol", None):
        cfg["tolerances"] = {**cfg["tolerances"], **_parse_tol(args.tol)}
    if getattr(args, "json", None):
        cfg["format"], cfg["output"] = "json", args.json
    cfg["checks"] = _parse_checks(cfg["checks"])
    if cfg["group"] not in GROUPS:
        raise UsageError(f"unknown group {cfg['group']!r}; choose from {', '.join(GROUPS)}")
    if cfg["checks"] != "all":
        for name in cfg["checks"]:
            if name not in K.CHECKS:
                raise UsageError(f"unknown check {name!r}")
    for name in cfg["tolerances"]:
        if name not in K.CHECKS:
            raise UsageError(f"tolerance override for unknown check {name!r}")
    return cfg


def check_config(cfg: dict) -> K.CheckConfig:
    try:
        return K.CheckConfig(group=cfg["group"], N=int(cfg["N"]), h=float(cfg["h"]), seed=int(cfg["seed"]),
                             points=int(cfg["points"]), tangent_sets=int(cfg["tangent_sets"]),
                             tolerances=dict(cfg["tolerances"]))
    except InvalidInput as exc:
        raise UsageError(str(exc)) from None


# --- output -----------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def reports_json(cfg: dict, reports) -> str:
    doc = {"version": SCHEMA_VERSION, "config": cfg, "reports": [r.to_dict() for r in reports]}
    return json.dumps(_clean(doc), indent=2, sort_keys=True)


def reports_csv(reports, extra_cols=None) -> str:
    buf = io.StringIO()
    cols = CSV_COLUMNS + list(extra_cols or [])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in reports:
        row = r if isinstance(r, dict) else _csv_row(r)
        w.writerow([row.get(c, "") for c in cols])
    return buf.getvalue()


def _csv_row(r: K.CheckReport) -> dict:
    return {"check": r.name, "group": r.group, "N": r.N, "h": r.h, "max_abs_err": f"{r.max_abs_err:.6e}",
            "max_rel_err": f"{r.max_rel_err:.6e}",
            "observed_order": "" if r.observed_order is None else f"{r.observed_order:.4f}",
            "pass": "true" if r.passed else "false"}


def reports_text(reports) -> str:
    head = f"{'check':32s} {'group':5s} {'max rel err':>13s} {'tol':>9s} {'order':>6s}  result"
    lines = [head, "-" * len(head)]
    for r in reports:
        order = "-" if r.observed_order is None else f"{r.observed_order:.2f}"
        lines.append(f"{r.name:32s} {r.group:5s} {r.max_rel_err:13.3e} {r.tolerance:9.1e} {order:>6s}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    n_pass = sum(r.passed for r in reports)
    lines.append(f"{n_pass}/{len(reports)} checks passed")
    return "\n".join(lines)


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# --- subcommands ------------------------------------------------------------


def cmd_check(args) -> int:
    cfg = resolve_config(args)
    reports = K.run_all(check_config(cfg), cfg["checks"], workers=int(cfg["workers"]))
    fmt = cfg["format"]
    if fmt == "json":
        _emit(reports_json(cfg, reports), cfg["output"])
        if cfg["output"]:
            print(reports_text(reports))
    elif fmt == "csv":
        _emit(reports_csv(reports), cfg["output"])
    else:
        _emit(reports_text(reports), cfg["output"])
    return 0 if all(r.passed for r in reports) else 1


def _fit(values, noise: float = 1e-13):
    """Self-convergence order from probes at N, 2N, 4N.

    Returns inf when the probe stops moving above the noise floor (relative to
    its size), which is what spectral convergence of periodic integrands looks
    like, and None for a vanishing probe.
    """
    a, b, c = values
    e1, e2 = abs(a - b), abs(b - c)
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        return None
    if e1 <= noise * scale or e2 <= noise * scale:
        return float("inf")
    return float(np.log2(e1 / e2))


def convergence_rows(cfg: dict, Ns, hs):
    names = cfg["checks"]
    if names == "all":
        names = list(K.CHECKS)
    rows = []
    for name in sorted(names):
        by_h = {}
        for h in hs:
            for N in Ns:
                c = dict(cfg, N=N, h=h)
                rep = K.run_check(name, check_config(c))
                by_h.setdefault(h, []).append(rep)
        for h, reps in by_h.items():
            probes = [r.details.get("probe") for r in reps]
            swept = len(reps) == 3 and len({r.N for r in reps}) == 3 and None not in probes
            # finite differences add round-off of order eps/h to every probe
            noise = 1e-13 + (1e-14 / h if K.CHECKS[name].kind == "fd" else 0.0)
            qorder = _fit(probes, noise) if swept else None
            for r in reps:
                row = _csv_row(r)
                row["quadrature_order"] = "" if qorder is None else f"{qorder:.4f}"
                row["probe"] = "" if r.details.get("probe") is None else f"{r.details['probe']:.15e}"
                rows.append((row, r.passed and _order_ok(name, r)))
    return rows


MIN_FD_ORDER = 1.8


def _order_ok(name, rep) -> bool:
    # checks whose residual does not move with h report no order and are not held to one
    if K.CHECKS[name].kind != "fd" or rep.observed_order is None:
        return True
    return rep.observed_order >= MIN_FD_ORDER


CONVERGENCE_DEFAULTS = {"points": 2, "tangent_sets": 1}


def cmd_convergence(args) -> int:
    cfg = resolve_config(args, CONVERGENCE_DEFAULTS)
    try:
        Ns = [int(v) for v in args.Ns.split(",")]
        hs = [float(v) for v in args.hs.split(",")]
        for N in Ns:
            P.GridSpec(N)
    except (ValueError, InvalidInput) as exc:
        raise UsageError(f"bad sweep specification: {exc}") from None
    rows = convergence_rows(cfg, Ns, hs)
    _emit(reports_csv([r for r, _ in rows], ["quadrature_order", "probe"]).rstrip("\n"), cfg["output"])
    return 0 if all(ok for _, ok in rows) else 1


def demo_values(seed: int = 0, flat: bool = False, N: int = 128) -> dict:
    """Pointwise values of β_A, -CS(A) and α, and the 4-curvature vs p1/2, on SO(5) with m = 4."""
    spec = GroupSpec("SO", 5)
    bm = Bm.BundleModel.flat(spec, 4) if flat else Bm.BundleModel.random(spec, 4, seed=seed)
    rng = np.random.default_rng([seed, 17])
    grid = P.GridSpec(N)
    x = rng.uniform(-np.pi, np.pi, 4)
    g = random_group(spec, rng)
    p, q = P.random_path(spec, grid, rng), P.random_path(spec, grid, rng)
    vs = [rng.standard_normal(4) for _ in range(4)]
    Xs = [random_algebra(spec, rng) for _ in range(3)]
    Ys = [P.random_tangent(spec, grid, rng) for _ in range(2)]
    Zs = [P.random_tangent(spec, grid, rng) for _ in range(2)]
    beta = Bm.form_beta_A(bm)((x, g, p), (vs[0], Xs[0], Ys[0]), (vs[1], Xs[1], Ys[1]))
    cs = Bm.form_cs(bm)((x, g), *[(vs[i], Xs[i]) for i in range(3)])
    alpha = Bm.form_alpha(spec)((x, g, p, q), (vs[0], Xs[0], Ys[0], Zs[0]))
    curv = Bm.four_curvature(bm)((x,), *[(v,) for v in vs])
    hp = Bm.half_pontryagin(bm, x, vs)
    return {"group": spec.name, "m": 4, "seed": seed, "flat": flat, "x": x.tolist(),
            "beta_A": float(beta), "minus_CS": float(cs), "alpha": float(alpha),
            "four_curvature_over_2pi": float(curv / (2 * np.pi)) + 0.0, "half_p1": float(hp) + 0.0,
            "p1_difference": float(abs(curv / (2 * np.pi) - hp))}


def cmd_demo(args) -> int:
    cfg = resolve_config(args)
    vals = demo_values(int(cfg["seed"]), args.flat, int(cfg["N"]))
    if cfg["format"] == "json":
        _emit(json.dumps(vals, indent=2, sort_keys=True), cfg["output"])
    else:
        lines = [f"SO(5) bundle on a 4-dimensional chart (seed {vals['seed']}{', flat' if vals['flat'] else ''})",
                 f"  beta_A                 {vals['beta_A']: .12e}",
                 f"  -CS(A)                 {vals['minus_CS']: .12e}",
                 f"  alpha                  {vals['alpha']: .12e}",
                 f"  -<F,F>/2pi             {vals['four_curvature_over_2pi']: .12e}",
                 f"  tr(F^F)/16pi^2         {vals['half_p1']: .12e}",
                 f"  |difference|           {vals['p1_difference']:.3e}"]
        _emit("\n".join(lines), cfg["output"])
    return 0


def cmd_catalog(args) -> int:
    entries = C.catalog(extras=args.extras)
    if args.format == "json":
        _emit(json.dumps([e.to_dict() for e in entries], indent=2, ensure_ascii=False), args.output)
    else:
        lines = [f"{e.name:14s} {e.space:10s} {e.degree:>2d}  {e.status:15s} {e.location}" for e in entries]
        _emit("\n".join(lines), args.output)
    return 0


# --- parser -----------------------------------------------------------------


def _common(p, with_checks=True):
    p.add_argument("--config", help="JSON file with defaults for these options")
    p.add_argument("--group", help=f"one of {', '.join(GROUPS)}")
    p.add_argument("--N", type=int, help="θ-grid size (even, >= 16)")
    p.add_argument("--h", type=float, help="finite-difference step in [1e-7, 1e-2]")
    p.add_argument("--seed", type=int, help=f"random seed (default from ${SEED_ENV} or 0)")
    p.add_argument("--format", choices=("text", "json", "csv"))
    p.add_argument("--output", help="write the report here instead of stdout")
    if with_checks:
        p.add_argument("--checks", help="comma-separated check names or 'all'")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override (repeatable)")
        p.add_argument("--points", type=int, help="random base points per check")
        p.add_argument("--tangent-sets", dest="tangent_sets", type=int, help="tangent tuples per point")
        p.add_argument("--workers", type=int, help="threads used to run checks")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csgerbe", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run identity checks")
    _common(p)
    p.add_argument("--json", help="shortcut for --format json --output PATH")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convergence", help="sweep N and h, emit CSV with fitted orders")
    _common(p)
    p.add_argument("--Ns", default="64,128,256")
    p.add_argument("--hs", default="1e-3,1e-4,1e-5")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("demo", help="pointwise values on the default SO(5) bundle")
    _common(p, with_checks=False)
    p.add_argument("--flat", action="store_true", help="use the flat connection a = 0")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("catalog", help="list the named forms")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output")
    p.add_argument("--extras", action="store_true", help="also list forms outside the main table")
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, UnknownCheck) as exc:
        print(f"csgerbe: error: {exc}", file=sys.stderr)
        return 2
    except GerbeError as exc:
        print(f"csgerbe: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
