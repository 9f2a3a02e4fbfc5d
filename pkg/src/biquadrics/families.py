"""Elliptic parameterizations of the canonical biquadratic families.

Every real canonical curve is parameterized by a single Jacobi function and
a shift: x(t) = f(t), y(t) = f(t + eta), so the root-swap composition on
the curve becomes the rigid translation t -> t - 2 eta. Each family below
records the modulus relation, the shift relation, the real-point charts,
and the period lattice of the coordinate pair. Sign and branch
conventions are pinned by the on-curve residual, which every constructed
parameterization must pass.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .curve import BiquadraticCurve, CanonicalTag, asym_curve, classify, eb_curve
from .elliptic import EllipticModulus, invert_sc_min_positive, is_pole, jacobi_ratio
from .errors import (
    AmbiguousBranch,
    CaseNotCovered,
    EmptyRealCurve,
    ModulusOutOfRange,
    NotOnCurve,
)
from .poly import Mobius

RESIDUAL_TOL = 1e-9


def curve_residual(curve: BiquadraticCurve, x, y) -> float:
    """|F| scaled projectively so unbounded branches score fairly."""
    cf = curve.to_float()
    if x is None or y is None:
        return math.inf
    xc, yc = complex(x), complex(y)
    if cmath.isinf(xc) or cmath.isnan(xc) or cmath.isinf(yc) or cmath.isnan(yc):
        # evaluate bihomogeneously at infinity
        xu, xv = (1.0, 0.0) if cmath.isinf(xc) else (xc, 1.0)
        yu, yv = (1.0, 0.0) if cmath.isinf(yc) else (yc, 1.0)
        sx = max(abs(xu), abs(xv))
        sy = max(abs(yu), abs(yv))
        val = cf.f_hom(xu / sx, xv / sx, yu / sy, yv / sy)
        return abs(val) / cf.norm()
    val = cf.f(xc, yc)
    return abs(val) / (cf.norm() * (1 + abs(xc) ** 2) * (1 + abs(yc) ** 2))


@dataclass(frozen=True)
class RealChart:
    """One real branch: t = t0 + direction * tau, tau in [0, period)."""

    part: str
    t0: complex
    direction: complex
    period: float


class Parameterization:
    """Uniformization of one canonical curve (in its own coordinates)."""

    def __init__(self, family, tag, curve, em, eta, parts, charts, lattice, ratio,
                 ratio_note=""):
        self.family = family
        self.tag = tag
        self.curve = curve
        self.em = em
        self.eta = complex(eta)
        self.parts = parts            # {part: (fx(t), fy(t))} in curve coordinates
        self.charts = charts
        self.lattice = tuple(complex(g) for g in lattice)
        self.ratio = ratio            # shift ratio whose rationality decides periodicity
        self.ratio_note = ratio_note
        self._grids = {}

    # -- evaluation -------------------------------------------------------

    def point(self, t, part: Optional[str] = None):
        part = part or self.charts[0].part
        fx, fy = self.parts[part]
        return fx(t), fy(t)

    def chart_point(self, chart: RealChart, tau: float):
        x, y = self.point(chart.t0 + chart.direction * tau, chart.part)
        return _realize(x), _realize(y)

    def sample_real(self, n_per_chart: int = 64):
        """(chart, tau, x, y) samples over all real charts."""
        out = []
        for chart in self.charts:
            for i in range(n_per_chart):
                tau = (i + 0.31) / n_per_chart * chart.period
                x, y = self.chart_point(chart, tau)
                if x is None or y is None:
                    continue
                out.append((chart, tau, x, y))
        return out

    def max_residual(self, n_per_chart: int = 64) -> float:
        worst = 0.0
        for _, _, x, y in self.sample_real(n_per_chart):
            worst = max(worst, curve_residual(self.curve, x, y))
        return worst

    # -- inverse ------------------------------------------------------------

    def _grid(self, chart, size=512):
        key = (chart.part, chart.t0, size)
        if key not in self._grids:
            self._grids[key] = [self.chart_point(chart, i / size * chart.period)
                                for i in range(size)]
        return self._grids[key]

    def locate(self, x, y, tol: float = 1e-8):
        """(chart, tau) with chart point matching (x, y)."""
        best = None
        for chart in self.charts:
            grid = 512
            pts = self._grid(chart, grid)
            errs = [_pair_dist(px, py, x, y) for px, py in pts]
            order = np.argsort(errs)
            obj = lambda s: _pair_dist(*self.chart_point(chart, s), x, y)
            for idx in order[:4]:
                tau0 = float(idx) / grid * chart.period
                res = minimize_scalar(
                    obj,
                    bounds=(tau0 - 2 * chart.period / grid, tau0 + 2 * chart.period / grid),
                    method="bounded", options={"xatol": 1e-12},
                )
                # polish in a narrow window around the coarse minimum
                w = max(1e-7 * chart.period, 4 * abs(res.x - tau0) * 1e-3)
                res2 = minimize_scalar(obj, bounds=(res.x - w, res.x + w),
                                       method="bounded", options={"xatol": 1e-15})
                cand = res2 if res2.fun < res.fun else res
                if best is None or cand.fun < best[0]:
                    best = (cand.fun, chart, cand.x % chart.period)
        if best is None or best[0] > tol:
            raise NotOnCurve(f"no chart point within {tol} (best {best[0] if best else 'n/a'})")
        return best[1], best[2]

    def reduce_lattice(self, t):
        """Reduce a complex shift modulo the coordinate-pair lattice."""
        g1, g2 = self.lattice
        det = (g1.real * g2.imag - g1.imag * g2.real)
        a = (t.real * g2.imag - t.imag * g2.real) / det
        b = (g1.real * t.imag - g1.imag * t.real) / det
        return t - round(a) * g1 - round(b) * g2


def _realize(v):
    if v is None:
        return None
    v = complex(v)
    if cmath.isinf(v) or cmath.isnan(v):
        return math.inf
    if abs(v.imag) < 1e-9 * max(1.0, abs(v.real)):
        return v.real
    return None


def _pair_dist(px, py, x, y):
    if px is None or py is None:
        return math.inf
    return _chordal(px, x) + _chordal(py, y)


def _chordal(a, b):
    if a == math.inf or a == -math.inf:
        au, av = 1.0, 0.0
    else:
        au, av = a, 1.0
    if b == math.inf or b == -math.inf:
        bu, bv = 1.0, 0.0
    else:
        bu, bv = b, 1.0
    num = abs(au * bv - av * bu)
    return num / math.sqrt((au * au + av * av) * (bu * bu + bv * bv))


def _jr(code, u, k):
    val = jacobi_ratio(code, u, k)
    if is_pole(val):
        return complex(math.inf, 0.0)
    return val


# -- family constructions ----------------------------------------------------------


def parameterize(tag: CanonicalTag, curve: Optional[BiquadraticCurve] = None) -> Parameterization:
    """Build the uniformization for a classified canonical curve.

    The returned object parameterizes the normalized curve scaled back by
    tag.kappa, i.e. the coordinates of the caller's input curve.
    """
    fam = tag.param_family
    if fam == "empty" or tag.family == "degenerate":
        raise EmptyRealCurve("real curve is empty or degenerate")
    builders = {
        "bax": _build_bax,
        "par13": _build_par13,
        "par58": _build_par58,
        "par4": _build_par4,
        "par7": _build_par7,
        "par_asym": _build_par_asym,
        "par_a1": _build_par_a1,
        "par_a2": _build_par_a2,
    }
    if fam not in builders:
        raise CaseNotCovered(f"no parameterization for family {fam!r}")
    if curve is None:
        a, b, c = tag.params
        base = eb_curve(a, b, c) if tag.family in ("EB_i", "EB_ii") else asym_curve(a, b)
        kap = 1.0
        curve = base
    else:
        kap = tag.kappa
    param = builders[fam](tag, curve, kap)
    resid = param.max_residual()
    if resid > RESIDUAL_TOL:
        raise ModulusOutOfRange(f"parameterization residual {resid:.2e} too large for {fam}")
    return param


def _mk(family, tag, curve, em, eta, lam, code_x, code_y, charts, lattice, ratio,
        kappa, ratio_note="", s_y=1.0):
    k = em.k

    def fx(t, _c=code_x, _f=kappa * lam):
        return _f * _jr(_c, complex(t), k)

    def fy(t, _c=code_y, _f=s_y * kappa * lam):
        return _f * _jr(_c, complex(t) + eta, k)

    parts = {"main": (fx, fy)}
    return Parameterization(family, tag, curve, em, eta, parts, charts, lattice,
                            ratio, ratio_note)


def _candidate_pick(curve, builder_variants):
    """Among candidate parameterizations pick one with zero residual,
    preferring the canonical shift orientation (ratio in (0, 1/2])."""
    best = None
    for param in builder_variants:
        resid = param.max_residual(24)
        r = param.ratio % 1.0
        key = (resid > RESIDUAL_TOL, 0 if r <= 0.5 + 1e-12 else 1, resid)
        if best is None or key < best[0]:
            best = (key, param)
    return best[1]


def _build_bax(tag, curve, kappa):
    a, b, c = tag.params
    bt = (b * b - a * a - 1) / a
    if bt <= 2 or a <= 0:
        raise ModulusOutOfRange("needs a > 0 and shape parameter > 2")
    k = (bt - math.sqrt(bt * bt - 4)) / 2
    em = EllipticModulus.from_k(k)
    theta = invert_sc_min_positive(1 / math.sqrt(a * k), em.k_prime)
    lam = math.sqrt(k)
    K, Kp = em.K, em.K_prime
    charts = [RealChart("main", complex(K, 0), 1j, 2 * Kp),
              RealChart("main", complex(-K, 0), 1j, 2 * Kp)]
    lattice = (4 * K, 2j * Kp)
    variants = []
    for sgn in (1, -1):
        for s_y in (1.0, -1.0):
            eta = complex(0, sgn * theta)
            variants.append(_mk("bax", tag, curve, em, eta, lam, "sn", "sn",
                                charts, lattice, theta / Kp, kappa,
                                "theta / K' (imaginary shift over imaginary chart period)",
                                s_y=s_y))
    return _candidate_pick(curve, variants)


def _solve_sym_eta(code_sq, target, em, lo=None, hi=None):
    """eta in (0, K) with jacobi_ratio(code)^2 = target; returns None if out of range."""
    k = em.k

    def f(u):
        v = _jr(code_sq, u, k)
        if not isinstance(v, complex):
            v = complex(v)
        if cmath.isinf(v):
            return math.inf
        return (v.real ** 2) - target

    # stay just outside the pole-guard radius of the Jacobi evaluator
    lo = lo if lo is not None else 3e-8
    hi = hi if hi is not None else em.K - 3e-8
    flo, fhi = f(lo), f(hi)
    if math.isinf(flo) or math.isinf(fhi) or flo * fhi > 0:
        return None
    return brentq(f, lo, hi, xtol=1e-14)


def _build_par13(tag, curve, kappa):
    a, b, c = tag.params
    bh = (b * b - a * a + 1) / a
    r = (bh + math.sqrt(bh * bh + 4)) / 2
    k = math.sqrt(r * r / (1 + r * r))
    em = EllipticModulus.from_k(k)
    eta0 = _solve_sym_eta("ds", a * k * em.k_prime, em)
    if eta0 is None:
        raise ModulusOutOfRange("no shift solves the modulus relation")
    lam = math.sqrt(k / em.k_prime)
    charts = [RealChart("main", 0.0, 1.0, 4 * em.K)]
    lattice = (4 * em.K, 2 * em.K + 2j * em.K_prime)
    variants = [
        _mk("par13", tag, curve, em, eta, lam, "cn", "cn", charts, lattice,
            abs(eta) / (2 * em.K), kappa, "Re eta / 2K")
        for eta in (eta0, 2 * em.K - eta0)
    ]
    return _candidate_pick(curve, variants)


def _build_par58(tag, curve, kappa):
    a, b, c = tag.params
    bh = (b * b - a * a + 1) / a
    # here r = k'/k (complementary to the bounded case)
    r = (bh + math.sqrt(bh * bh + 4)) / 2
    k = math.sqrt(1 / (1 + r * r))
    em = EllipticModulus.from_k(k)
    eta0 = _solve_sym_eta("ds", -a * k * em.k_prime, em)
    if eta0 is None:
        raise ModulusOutOfRange("no shift solves the modulus relation")
    lam = math.sqrt(em.k_prime / k)
    charts = [RealChart("main", 0.0, 1.0, 4 * em.K)]
    lattice = (4 * em.K, 2 * em.K + 2j * em.K_prime)
    variants = [
        _mk("par58", tag, curve, em, eta, lam, "nc", "nc", charts, lattice,
            abs(eta) / (2 * em.K), kappa, "Re eta / 2K")
        for eta in (eta0, 2 * em.K - eta0)
    ]
    return _candidate_pick(curve, variants)


def _build_par4(tag, curve, kappa):
    a, b, c = tag.params
    bt = (b * b - a * a - 1) / a
    if bt >= -2:
        raise ModulusOutOfRange("needs shape parameter < -2")
    kp = (-bt - math.sqrt(bt * bt - 4)) / 2
    k = math.sqrt(1 - kp * kp)
    em = EllipticModulus.from_k(k)
    eta0 = _solve_sym_eta("cs", -a * em.k_prime, em)
    if eta0 is None:
        raise ModulusOutOfRange("no shift solves the modulus relation")
    lam = math.sqrt(1 / em.k_prime)
    charts = [RealChart("main", 0.0, 1.0, 2 * em.K)]
    lattice = (2 * em.K, 4j * em.K_prime)
    variants = [
        _mk("par4", tag, curve, em, eta, lam, "cs", "cs", charts, lattice,
            (abs(eta) / em.K) % 1.0, kappa, "Re eta / K (chart period 2K)")
        for eta in (eta0, 2 * em.K - eta0)
    ]
    return _candidate_pick(curve, variants)


def _build_par7(tag, curve, kappa):
    a, b, c = tag.params
    bt = (b * b - a * a - 1) / a
    if bt <= 2:
        raise ModulusOutOfRange("needs shape parameter > 2")
    k = (bt - math.sqrt(bt * bt - 4)) / 2
    em = EllipticModulus.from_k(k)
    eta0 = _solve_sym_eta("ns", -a * k, em)
    if eta0 is None:
        raise ModulusOutOfRange("no shift solves the modulus relation")
    K, Kp = em.K, em.K_prime
    lattice = (4 * K, 2j * Kp)
    variants = []
    for eta in (eta0, 2 * K - eta0):
        def make(eta=eta):
            lam_b = kappa * math.sqrt(k)
            lam_u = kappa / math.sqrt(k)

            def fxb(t):
                return lam_b * _jr("sn", complex(t), k)

            def fyb(t):
                return lam_b * _jr("sn", complex(t) + eta, k)

            def fxu(t):
                return lam_u * _jr("ns", complex(t), k)

            def fyu(t):
                return lam_u * _jr("ns", complex(t) + eta, k)

            parts = {"oval": (fxb, fyb), "branches": (fxu, fyu)}
            charts = [RealChart("oval", 0.0, 1.0, 4 * K),
                      RealChart("branches", 0.0, 1.0, 4 * K)]
            return Parameterization("par7", tag, curve, em, eta, parts, charts,
                                    lattice, eta / (2 * K), "Re eta / 2K")
        variants.append(make())
    return _candidate_pick(curve, variants)


_ASYM_MOBIUS = Mobius(-1.0, 1.0, 1.0, 1.0)  # s -> (1 - s)/(1 + s), an involution


def _build_par_asym(tag, curve, kappa):
    a, b, c = tag.params
    base = eb_curve(a, b, c)
    mapped = base.transform(_ASYM_MOBIUS)
    inner_tag = classify(mapped)
    if inner_tag.param_family != "par4":
        raise ModulusOutOfRange(f"transformed curve fell into {inner_tag.param_family!r}")
    inner = parameterize(inner_tag, mapped)

    def wrap(f, kap=kappa):
        def g(t):
            v = f(t)
            if v is None:
                return None
            v = complex(v)
            if cmath.isinf(v):
                return -kap
            den = 1 + v
            if abs(den) < 1e-300:
                return complex(math.inf, 0)
            return kap * (1 - v) / den
        return g

    parts = {}
    for label, (fx, fy) in inner.parts.items():
        parts[label] = (wrap(fx), wrap(fy))
    return Parameterization("par_asym", tag, curve, inner.em, inner.eta, parts,
                            inner.charts, inner.lattice, inner.ratio,
                            "Re eta / K of the transformed curve")


def _asym_modulus(bh_abs):
    k = (bh_abs - math.sqrt(bh_abs * bh_abs - 4)) / 2
    return EllipticModulus.from_k(k)


def _build_par_a1(tag, curve, kappa):
    a, b, c = tag.params
    bh = (b * b + a * a + 1) / a
    if not bh > 2 or a <= 0:
        raise ModulusOutOfRange("antisymmetric family needs a > 0")
    em = _asym_modulus(bh)
    k = em.k
    if not k < a < 1 / k:
        raise ModulusOutOfRange("coefficient outside the real-shift window")
    target = math.sqrt(k * a)

    def f(h):
        return jacobi_ratio("dn", h, em.k_prime) - target

    h0 = brentq(f, 1e-12, em.K_prime * (1 - 1e-12), xtol=1e-14)
    K, Kp = em.K, em.K_prime
    lam = kappa * math.sqrt(k)
    charts = [RealChart("main", complex(K, 0), 1j, 2 * Kp),
              RealChart("main", complex(-K, 0), 1j, 2 * Kp)]
    lattice = (4 * K, 2j * Kp)
    variants = []
    for h in (h0, 2 * Kp - h0):
        for s_y in (1, -1):
            eta = complex(K, h)

            def make(eta=eta, s_y=s_y):
                def fx(t):
                    return lam * _jr("sn", complex(t), k)

                def fy(t):
                    return s_y * -1j * lam * _jr("sn", complex(t) + eta, k)

                parts = {"main": (fx, fy)}
                return Parameterization("par_a1", tag, curve, em, eta, parts, charts,
                                        lattice, (eta.imag / Kp) % 1.0,
                                        "Im eta / K' (even periods only)")
            variants.append(make())
    return _candidate_pick(curve, variants)


def _build_par_a2(tag, curve, kappa):
    a, b, c = tag.params
    bh = (b * b + a * a + 1) / a
    if not bh < -2 or a >= 0:
        raise ModulusOutOfRange("antisymmetric family needs a < 0")
    em = _asym_modulus(-bh)
    k = em.k
    if not -1 / k < a < -k:
        raise ModulusOutOfRange("coefficient outside the real-shift window")
    target = math.sqrt(-k * a)

    def f(h):
        return jacobi_ratio("dn", h, em.k_prime) - target

    h0 = brentq(f, 1e-12, em.K_prime * (1 - 1e-12), xtol=1e-14)
    K, Kp = em.K, em.K_prime
    lattice = (4 * K, 2j * Kp)
    variants = []
    for h in (h0, 2 * Kp - h0):
        for s_y in (1, -1):
            eta = complex(K, h)

            def make(eta=eta, s_y=s_y):
                lam = kappa * math.sqrt(k)

                def fx(t):
                    return 1j * lam * _jr("sn", complex(t), k)

                def fy(t):
                    return s_y * lam * _jr("sn", complex(t) + eta, k)

                parts = {"main": (fx, fy)}
                # the two y-bands sit on the imaginary lines Re t = 0 and 2K
                charts = [RealChart("main", 0.0, 1j, 2 * Kp),
                          RealChart("main", complex(2 * K, 0), 1j, 2 * Kp)]
                return Parameterization("par_a2", tag, curve, em, eta, parts, charts,
                                        lattice, (eta.imag / Kp) % 1.0,
                                        "Im eta / K' (even periods only)")
            variants.append(make())
    return _candidate_pick(curve, variants)


# -- forward constructors (used by tests and suites) ---------------------------------


def curve_from_family(family: str, k: float, m: int, n: int):
    """Canonical curve of one family engineered so the root-swap map has
    period n with m turns. Returns (curve, tag)."""
    em = EllipticModulus.from_k(k)
    K, Kp = em.K, em.K_prime
    kp = em.k_prime
    if family == "bax":
        theta = Kp * m / n
        sc = jacobi_ratio("sc", theta, kp)
        a = 1 / (k * sc * sc)
        b = math.sqrt(a * (k + 1 / k) + a * a + 1)
        curve = eb_curve(a, b, 1.0)
    elif family == "par13":
        eta = 2 * K * m / n
        a = jacobi_ratio("ds", eta, k) ** 2 / (k * kp)
        b = -jacobi_ratio("cs", eta, k) * jacobi_ratio("ns", eta, k) / (k * kp)
        curve = eb_curve(a, b, -1.0)
    elif family == "par58":
        eta = 2 * K * m / n
        a = -jacobi_ratio("ds", eta, k) ** 2 / (k * kp)
        b = jacobi_ratio("cs", eta, k) * jacobi_ratio("ns", eta, k) / (k * kp)
        curve = eb_curve(a, b, -1.0)
    elif family == "par4":
        eta = K * m / n
        a = -jacobi_ratio("cs", eta, k) ** 2 / kp
        b = jacobi_ratio("ds", eta, k) * jacobi_ratio("ns", eta, k) / kp
        curve = eb_curve(a, b, 1.0)
    elif family == "par7":
        eta = 2 * K * m / n
        a = -jacobi_ratio("ns", eta, k) ** 2 / k
        b = jacobi_ratio("cs", eta, k) * jacobi_ratio("ds", eta, k) / k
        curve = eb_curve(a, b, 1.0)
    elif family == "par_asym":
        inner, _ = curve_from_family("par4", k, m, n)
        curve = inner.transform(_ASYM_MOBIUS)
        curve = curve.scaled(1 / curve.a[2][2])
    elif family in ("par_a1", "par_a2"):
        if n % 2:
            raise CaseNotCovered("antisymmetric families close only with even periods")
        h = Kp * m / n
        dn = jacobi_ratio("dn", h, kp)
        mag = dn * dn / k
        a = mag if family == "par_a1" else -mag
        b2 = -(abs(a) * -(k + 1 / k) + a * a + 1) if family == "par_a1" else \
            -(a * (k + 1 / k) + a * a + 1)
        b = math.sqrt(b2)
        curve = asym_curve(a, b)
    else:
        raise CaseNotCovered(family)
    tag = classify(curve)
    return curve, tag
