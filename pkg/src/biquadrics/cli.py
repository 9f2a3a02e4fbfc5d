"""Command-line front door: reproducible analyses with JSON output.

Every subcommand prints one JSON report (schema "v1") to stdout; numeric
claims carry their residual and tolerance. CSV and SVG side files are
written only when flagged. Exit codes: 0 ok, 2 invalid input, 3
degenerate geometry, 4 numerical failure or exhausted budget.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .curve import BiquadraticCurve, classify, genus_and_singularities
from .elliptic import WeierstrassData
from .errors import (
    BiquadricsError,
    DegenerateGeometry,
    InvalidInput,
    NumericalFailure,
)
from .families import curve_from_family, parameterize
from .johnmap import (
    best_rational,
    orbit,
    orbit_csv,
    orbit_turns,
    periodicity_criterion,
    point_on_curve,
    solve_y,
)
from .nonuniq import build_solution, uniqueness_verdict
from .pellabel import (
    malyshev_gammas,
    pell_abel_report,
    poncelet_pell_bridge_test,
)
from .physics import (
    TodaParams,
    fit_residual,
    symmetry_defect,
    toda_eval,
    toda_phase_portrait,
    toda_verify,
    xy_closure,
    xy_closure_error,
    xy_static,
)
from .poncelet import (
    Conic,
    bicentric_check,
    bicentric_general,
    biquadratic_from_conics,
    cayley_first_closure,
    cayley_test,
    poncelet_period,
    rational_parameterization,
    start_state,
    trajectory,
    trajectory_csv,
)

SCHEMA = "v1"


def _emit(payload) -> None:
    payload = {"schema": SCHEMA, "version": __version__, **payload}
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":"),
                                default=_json_default))
    sys.stdout.write("\n")


def _json_default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def _load_curve(args) -> BiquadraticCurve:
    if args.curve_json:
        with open(args.curve_json) as fh:
            return BiquadraticCurve.from_json(fh.read())
    if args.eb:
        a, b, c = (float(v) for v in args.eb.split(","))
        from .curve import eb_curve
        return eb_curve(a, b, c)
    raise InvalidInput("provide --curve-json or --eb a,b,c")


def _load_conics(args):
    if args.circles:
        r1, r2 = (float(v) for v in args.circles.split(","))
        return Conic.circle(0.0, 0.0, r1), Conic.circle(0.0, 0.0, r2)
    if args.conics:
        path_a, path_b = args.conics
        with open(path_a) as fh:
            A = Conic.from_json(fh.read())
        with open(path_b) as fh:
            B = Conic.from_json(fh.read())
        return A, B
    raise InvalidInput("provide --circles r1,r2 or --conics a.json b.json")


def _verdict_block(v):
    return {
        "value": v.value,
        "m": v.m,
        "n": v.n,
        "residual": v.residual,
        "tol": 1e-8,
        "max_denominator": v.max_denominator,
        "rational": v.is_rational,
    }


# -- subcommands -----------------------------------------------------------------


def cmd_analyze(args):
    curve = _load_curve(args)
    nature = genus_and_singularities(curve)
    out = {"command": "analyze", "nature": nature.kind}
    if nature.point is not None:
        out["singular_point"] = list(nature.point)
    if nature.kind == "elliptic":
        tag = classify(curve)
        out["family"] = tag.family
        out["subcase"] = tag.subcase
        out["params"] = {"a": tag.a, "b": tag.b, "c": tag.c}
        out["param_family"] = tag.param_family
        if tag.param_family not in ("", "empty"):
            param = parameterize(tag, curve)
            out["modulus"] = {"k": param.em.k, "K": param.em.K, "K_prime": param.em.K_prime}
            out["eta"] = param.eta
            out["ratio"] = {"value": param.ratio, "method": param.ratio_note}
            out["residual"] = param.max_residual()
            out["tol"] = 1e-9
            v = periodicity_criterion(tag, args.maxden, args.tol_rational, param=param)
            out["rotation_verdict"] = _verdict_block(v)
        else:
            out["note"] = "empty real curve"
    _emit(out)


def cmd_john_orbit(args):
    curve = _load_curve(args)
    if args.start:
        x, y = (float(v) for v in args.start.split(","))
        p = point_on_curve(curve, x, y)
    else:
        d1, _ = curve.to_float().discriminants()
        xs = [x for x in np.linspace(-4, 4, 401) if d1(float(x)) > 1e-9]
        if not xs:
            raise DegenerateGeometry("no real branch found on the scan range")
        p = solve_y(curve, float(xs[len(xs) // 2]), 0)
    o = orbit(curve, p, max_iter=args.max_iter, tol=args.tol_period)
    out = {
        "command": "john-orbit",
        "start": {"x": p.x.value(), "y": p.y.value()},
        "period": o.period,
        "steps": len(o.points) - 1,
        "tol": args.tol_period,
        "max_residual": max(q.residual for q in o.points),
    }
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(orbit_csv(o))
        out["csv"] = args.csv
    _emit(out)


def cmd_poncelet(args):
    A, B = _load_conics(args)
    period = poncelet_period(A, B, maxN=args.maxN)
    out = {"command": "poncelet", "period": period, "maxN": args.maxN, "tol": 1e-8}
    if args.csv or args.svg:
        steps = period if period else min(args.maxN, 16)
        states = trajectory(A, B, steps=steps)
        if args.csv:
            with open(args.csv, "w") as fh:
                fh.write(trajectory_csv(states))
            out["csv"] = args.csv
        if args.svg:
            _write_svg(args.svg, A, B, states)
            out["svg"] = args.svg
    _emit(out)


def cmd_cayley(args):
    A, B = _load_conics(args)
    out = {"command": "cayley", "results": []}
    ns = [args.N] if args.N else list(range(3, args.maxN + 1))
    for n in ns:
        v = cayley_test(A, B, n)
        out["results"].append({
            "N": n,
            "closes": v.closes,
            "determinant": float(v.determinant) if v.exact else v.determinant,
            "scale": v.scale,
            "tol": 1e-9,
            "exact": v.exact,
            "method": "hankel-determinant of the sqrt-series of det(MA - z MB)",
        })
    geo = poncelet_period(A.to_float(), B.to_float(), maxN=max(ns))
    out["geometric_period"] = geo
    _emit(out)


def cmd_bicentric(args):
    closed = bicentric_check(args.R, args.r, args.d, args.n)
    general = bicentric_general(args.R, args.r, args.d, args.n)
    out = {
        "command": "bicentric",
        "closed_form": {"relation": closed.relation, "lhs": closed.lhs,
                        "rhs": closed.rhs, "closes": closed.closes, "tol": 1e-9},
        "quarter_period_form": {"relation": general.relation, "lhs": general.lhs,
                                "rhs": general.rhs, "closes": general.closes, "tol": 1e-9},
    }
    if args.d == 0:
        A = Conic.circle(0.0, 0.0, args.r)
        B = Conic.circle(0.0, 0.0, args.R)
        out["geometric_period"] = poncelet_period(A, B, maxN=4 * args.n)
    _emit(out)


def _parse_quartic(text: str, exact: bool):
    vals = [v.strip() for v in text.split(",")]
    if len(vals) != 5:
        raise InvalidInput("need five comma-separated coefficients, highest degree first")
    if exact:
        coeffs = [Fraction(v) for v in vals]
    else:
        coeffs = [Fraction(v) if "/" in v or "." not in v else Fraction(float(v)).limit_denominator(10 ** 12)
                  for v in vals]
    from .poly import Poly
    return Poly(list(reversed(coeffs)))


def cmd_pell_abel(args):
    R = _parse_quartic(args.quartic, not args.rationalize)
    if args.rationalize:
        sys.stderr.write("note: float coefficients rationalized at 1e-12; "
                         "the verdict certifies the rationalized quartic only\n")
    rep = pell_abel_report(R, max_deg_Q=args.max_deg_q)
    gammas = malyshev_gammas(R, min(6, args.max_deg_q))
    out = {
        "command": "pell-abel",
        "solvable": rep.solvable,
        "reason": rep.reason,
        "gamma": [float(g) for g in gammas],
        "method": "polynomial continued fraction of sqrt(R), exact arithmetic",
    }
    if rep.solution:
        out["P"] = [str(Fraction(c)) for c in rep.solution.P.coeffs]
        out["Q"] = [str(Fraction(c)) for c in rep.solution.Q.coeffs]
        out["L"] = str(rep.solution.L)
        out["verified"] = rep.solution.verify(R)
    _emit(out)


def cmd_malyshev(args):
    R = _parse_quartic(args.quartic, not args.rationalize)
    gammas = malyshev_gammas(R, args.k_max)
    out = {
        "command": "malyshev",
        "gamma": [{"k": i + 1, "value": float(g), "zero": g == 0 if isinstance(g, Fraction)
                   else abs(g) < 1e-12} for i, g in enumerate(gammas)],
        "method": "hankel determinants of the sqrt-series at infinity",
    }
    _emit(out)


def cmd_dirichlet(args):
    curve = _load_curve(args)
    rep = uniqueness_verdict(curve, args.maxden, args.tol_rational)
    out = {"command": "dirichlet", "status": rep.status, "note": rep.note}
    if rep.verdict:
        out["rotation_verdict"] = _verdict_block(rep.verdict)
    if rep.witness is not None:
        out["witness_residual"] = rep.witness_residual
        out["tol"] = 1e-8
        if args.emit:
            payload = {
                "f": {"num": [str(Fraction(c)) for c in rep.witness.f.num.coeffs],
                      "den": [str(Fraction(c)) for c in rep.witness.f.den.coeffs]},
                "g": {"num": [str(Fraction(c)) for c in rep.witness.g.num.coeffs],
                      "den": [str(Fraction(c)) for c in rep.witness.g.den.coeffs]},
                "residual": rep.witness_residual,
                "probes": _witness_probes(rep.witness),
            }
            with open(args.emit, "w") as fh:
                json.dump(payload, fh, sort_keys=True, indent=1)
            out["emitted"] = args.emit
    _emit(out)


def _witness_probes(witness):
    out = []
    for i in range(1, 9):
        x, y = 0.05 * i, -0.04 * i
        out.append({"x": x, "y": y, "value": float(complex(witness.value(x, y)).real)})
    return out


def cmd_toda(args):
    wd = WeierstrassData.from_invariants(args.g2, args.g3)
    tp = TodaParams(args.omega, args.p, args.r, args.lam, wd)
    ns = range(0, args.steps)
    b, u, us = toda_eval(tp, ns, args.t)
    rb, ru = toda_verify(tp, range(1, args.steps - 1), args.t, h=args.h)
    pts, fitted = toda_phase_portrait(tp, 50)
    out = {
        "command": "toda",
        "eom_residuals": {"b": rb, "u": ru, "tol": 1e-6, "h": args.h},
        "form_agreement": max(abs(u[n] - us[n]) / max(1.0, abs(u[n])) for n in ns),
        "portrait_fit_residual": fit_residual(fitted, pts),
        "portrait_symmetry_defect": symmetry_defect(fitted),
        "tol_fit": 1e-7,
    }
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("n,b_re,b_im,u_re,u_im\n")
            for n in ns:
                fh.write(f"{n},{complex(b[n]).real!r},{complex(b[n]).imag!r},"
                         f"{complex(u[n]).real!r},{complex(u[n]).imag!r}\n")
        out["csv"] = args.csv
    _emit(out)


def cmd_xy(args):
    if args.m1:
        chain = xy_closure(args.j, args.N, args.m1, args.theta)
        closure = xy_closure_error(chain)
    else:
        if args.W is None:
            raise InvalidInput("provide --W or --m1")
        chain = xy_static(args.j, args.W, args.N, args.theta)
        closure = None
    out = {
        "command": "xy",
        "mode": chain.mode,
        "W": chain.W,
        "k": chain.k,
        "q": chain.q,
        "stationarity_residual": chain.max_stationarity_residual(),
        "tol_stationarity": 1e-9,
        "W_spread": chain.w_spread(),
        "tol_W": 1e-10,
    }
    if closure is not None:
        out["closure_error"] = closure
        out["tol_closure"] = 1e-8
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("n,x,y\n")
            for n, (x, y) in enumerate(chain.spins):
                fh.write(f"{n},{x!r},{y!r}\n")
        out["csv"] = args.csv
    _emit(out)


def cmd_crosscheck(args):
    rng = random.Random(args.seed)
    cases = []
    agreements = 0
    produced = 0
    attempts = 0
    while produced < args.cases and attempts < args.cases * 60:
        attempts += 1
        case = _random_conic_case(rng, args.maxN)
        if case is None:
            continue
        produced += 1
        if case["agree"]:
            agreements += 1
        cases.append(case)
    out = {
        "command": "crosscheck",
        "seed": args.seed,
        "cases": cases,
        "agreements": agreements,
        "total": produced,
        "all_agree": agreements == produced,
        "tol_period": 1e-8,
        "tol_hankel": 1e-9,
    }
    _emit(out)


def _random_conic_case(rng, maxN):
    kind = rng.choice(["ellipse", "circle", "hyperbola"])
    A = Conic.circle(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.6, 1.4))
    if kind == "ellipse":
        B = Conic.ellipse(rng.uniform(1.2, 9.0), rng.uniform(0.2, 4.0))
    elif kind == "circle":
        B = Conic.circle(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(1.2, 3.0))
    else:
        B = Conic([[ -1.0, 0.0, 0.0], [0.0, 1.0 / rng.uniform(0.5, 3.0), 0.0],
                   [0.0, 0.0, -1.0 / rng.uniform(0.5, 3.0)]])
    try:
        E = rational_parameterization(A)
        G = rational_parameterization(B)
        curve = biquadratic_from_conics(E, G)
        nature = genus_and_singularities(curve)
        if nature.kind != "elliptic":
            return None
        geo = poncelet_period(A, B, maxN=maxN)
        cay = cayley_first_closure(A, B, maxN=maxN)
        d1, _ = curve.to_float().discriminants()
        xs = [x for x in np.linspace(-3, 3, 241) if d1(float(x)) > 1e-6]
        if not xs:
            return None
        p = solve_y(curve, float(xs[len(xs) // 2]), 0)
        o = orbit(curve, p, max_iter=maxN + 1)
        john = o.period if (o.period and o.period <= maxN) else None
    except BiquadricsError:
        return None
    except Exception:
        return None
    return {
        "geometric_period": geo,
        "hankel_period": cay,
        "john_period": john,
        "agree": geo == cay == john,
    }


def _write_svg(path, A, B, states):
    """Plot-only SVG: the two conics and the polygon chain."""
    pts = []
    for s in states:
        if abs(s.P[0]) > 1e-9:
            pts.append((s.P[1] / s.P[0], s.P[2] / s.P[0]))
    conic_paths = []
    for C in (A, B):
        E = rational_parameterization(C)
        path_pts = []
        for t in np.linspace(-40, 40, 600):
            s0, s1, s2 = (complex(v).real for v in E.point(float(t)))
            if abs(s0) > 1e-6:
                x, y = s1 / s0, s2 / s0
                if abs(x) < 20 and abs(y) < 20:
                    path_pts.append((x, y))
        conic_paths.append(path_pts)
    allx = [p[0] for p in pts] + [p[0] for cp in conic_paths for p in cp]
    ally = [p[1] for p in pts] + [p[1] for cp in conic_paths for p in cp]
    if not allx:
        allx, ally = [0.0, 1.0], [0.0, 1.0]
    lo = min(min(allx), min(ally)) - 0.5
    hi = max(max(allx), max(ally)) + 0.5
    size = 480.0
    scale = size / (hi - lo)

    def sx(x):
        return (x - lo) * scale

    def sy(y):
        return size - (y - lo) * scale

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{size:.0f}">']
    for cp, color in zip(conic_paths, ("#336699", "#993333")):
        chunks = []
        prev = None
        for x, y in cp:
            if prev is not None and math.hypot(x - prev[0], y - prev[1]) > (hi - lo) / 4:
                chunks.append("M")
            chunks.append(f"{'M' if not chunks or chunks[-1] == 'M' else 'L'} {sx(x):.2f} {sy(y):.2f}")
            prev = (x, y)
        d = " ".join(c for c in chunks if c != "M")
        lines.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
    lines.append(f'<polyline points="{poly}" fill="none" stroke="#222" stroke-width="1"/>')
    for x, y in pts:
        lines.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="#222"/>')
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="biquadrics",
                                 description="biquadratic curve analyses")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_curve_opts(p):
        p.add_argument("--curve-json", help="path to a curve JSON file")
        p.add_argument("--eb", help="a,b,c of the symmetric canonical curve")
        p.add_argument("--maxden", type=int, default=64)
        p.add_argument("--tol-rational", type=float, default=1e-8, dest="tol_rational")

    p = sub.add_parser("analyze", help="classify and read the shift ratio")
    add_curve_opts(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("john-orbit", help="iterate the root-swap map")
    add_curve_opts(p)
    p.add_argument("--start", help="x,y on the curve")
    p.add_argument("--max-iter", type=int, default=10000, dest="max_iter")
    p.add_argument("--tol-period", type=float, default=1e-6, dest="tol_period")
    p.add_argument("--csv", help="write the orbit as CSV")
    p.set_defaults(func=cmd_john_orbit)

    def add_conic_opts(p):
        p.add_argument("--circles", help="r1,r2 for concentric circles")
        p.add_argument("--conics", nargs=2, help="two conic JSON files")

    p = sub.add_parser("poncelet", help="geometric polygon-chain iteration")
    add_conic_opts(p)
    p.add_argument("--maxN", type=int, default=64)
    p.add_argument("--csv", help="write the trajectory as CSV")
    p.add_argument("--svg", help="write a plot of conics and polygon")
    p.set_defaults(func=cmd_poncelet)

    p = sub.add_parser("cayley", help="Hankel-determinant closure test")
    add_conic_opts(p)
    p.add_argument("--N", type=int, help="single period to test")
    p.add_argument("--maxN", type=int, default=12)
    p.set_defaults(func=cmd_cayley)

    p = sub.add_parser("bicentric", help="circle-pair closure relations")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bicentric)

    p = sub.add_parser("pell-abel", help="polynomial Pell solver")
    p.add_argument("--quartic", required=True,
                   help="five coefficients, highest degree first, e.g. 1,0,-2,0,2")
    p.add_argument("--max-deg-q", type=int, default=12, dest="max_deg_q")
    p.add_argument("--rationalize", action="store_true",
                   help="rationalize float coefficients at 1e-12 (warned)")
    p.set_defaults(func=cmd_pell_abel)

    p = sub.add_parser("malyshev", help="Hankel criterion values")
    p.add_argument("--quartic", required=True)
    p.add_argument("--k-max", type=int, default=4, dest="k_max")
    p.add_argument("--rationalize", action="store_true")
    p.set_defaults(func=cmd_malyshev)

    p = sub.add_parser("dirichlet", help="separated-solution verdict/witness")
    add_curve_opts(p)
    p.add_argument("--emit", help="write the witness JSON here")
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("toda", help="elliptic lattice-wave verifier")
    p.add_argument("--g2", type=float, required=True)
    p.add_argument("--g3", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.19,
                   help="phase offset (keep away from lattice points)")
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--h", type=float, default=1e-5)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--csv", help="write the state table as CSV")
    p.set_defaults(func=cmd_toda)

    p = sub.add_parser("xy", help="static spin-chain verifier")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--m1", type=int, help="closure winding (coprime to N)")
    p.add_argument("--W", type=float, help="invariant value for an open chain")
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--csv", help="write the spin table as CSV")
    p.set_defaults(func=cmd_xy)

    p = sub.add_parser("crosscheck", help="three-way agreement on random pairs")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--maxN", type=int, default=12)
    p.set_defaults(func=cmd_crosscheck)

    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        args.func(args)
    except (InvalidInput, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return 2
    except DegenerateGeometry as exc:
        sys.stderr.write(f"degenerate geometry: {exc}\n")
        return 3
    except (NumericalFailure, BiquadricsError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 4
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
