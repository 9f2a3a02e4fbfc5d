"""Verifiers for two lattice models whose solutions live on biquadratic curves.

Static states of the anisotropic planar spin chain are Jacobi-function
profiles whose nearest-neighbor invariant W singles out one curve of the
bounded symmetric family; elliptic traveling waves of the exponential
lattice (Weierstrass form) trace a symmetric biquadratic in the phase
portrait (u_n, u_{n+1}). Everything here is checked by direct residuals:
stationarity equations, equations of motion under finite differences, and
least-squares curve fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .curve import BiquadraticCurve
from .elliptic import (
    EllipticModulus,
    WeierstrassData,
    is_pole,
    jacobi,
    jacobi_ratio,
    w_sigma,
    w_zeta,
    wp,
)
from .errors import (
    InvalidInput,
    LatticePole,
    ModeBoundary,
    NoSolutionInMode,
    RankDeficientFit,
)

POLE_CLEARANCE = 1e-3


# -- planar spin chain -------------------------------------------------------------


@dataclass
class XYChain:
    """Unit spins r_n = (x_n, y_n) with anisotropy j > 1.

    W = x_n x_{n+1} + y_n y_{n+1} / j is constant along the chain; the
    stationarity residual is the component of J(r_{n-1} + r_{n+1})
    tangential to the unit circle at r_n.
    """

    j: float
    W: float
    N: int
    theta: float
    mode: int
    k: float
    q: float
    spins: list

    def recompute_W(self, n: int) -> float:
        x0, y0 = self.spins[n]
        x1, y1 = self.spins[n + 1]
        return x0 * x1 + y0 * y1 / self.j

    def stationarity_residual(self, n: int) -> float:
        """|r_n x J(r_{n-1} + r_{n+1})|: the gradient of the interaction
        energy on the circle |r_n| = 1."""
        xm, ym = self.spins[n - 1]
        xp, yp = self.spins[n + 1]
        x, y = self.spins[n]
        sx = xm + xp
        sy = self.j * (ym + yp)
        return abs(x * sy - y * sx)

    def max_stationarity_residual(self) -> float:
        return max(self.stationarity_residual(n) for n in range(1, self.N))

    def w_spread(self) -> float:
        vals = [self.recompute_W(n) for n in range(self.N)]
        return max(vals) - min(vals)


def _spin(mode: int, u: float, k: float):
    sn, cn, dn = jacobi(u, k)
    if mode == 1:
        return cn, sn
    return dn, k * sn


def xy_static(j: float, W: float, N: int, theta: float = 0.0) -> XYChain:
    """Static chain of length N + 1 (spins r_0..r_N) for anisotropy j > 1
    and invariant W; the mode boundary |W| = 1/j is rejected."""
    if not j > 1:
        raise InvalidInput("need anisotropy j > 1")
    if not abs(W) < 1:
        raise InvalidInput("need |W| < 1")
    if abs(abs(W) - 1 / j) < 1e-12:
        raise ModeBoundary("|W| = 1/j separates the two solution modes")
    if abs(W) < 1 / j:
        mode = 1
        k2 = (1 - 1 / (j * j)) / (1 - W * W)
        k = math.sqrt(k2)
        em = EllipticModulus.from_k(k)
        # dn(q) = 1/j fixes |q|; cn(q) = W fixes the branch
        q0 = brentq(lambda u: jacobi_ratio("dn", u, k) - 1 / j, 1e-12, em.K - 1e-12)
        q = q0 if jacobi_ratio("cn", q0, k) * W >= 0 else 2 * em.K - q0
    else:
        mode = 2
        k2 = (1 - W * W) / (1 - 1 / (j * j))
        k = math.sqrt(k2)
        em = EllipticModulus.from_k(k)
        # cn(q) = 1/j fixes |q|; dn(q) = W >= k' > 0 needs W > 0 spins
        if W < 0:
            raise ModeBoundary("mode 2 profile has W = dn(q) > 0; flip the chain")
        q = brentq(lambda u: jacobi_ratio("cn", u, k) - 1 / j, 1e-12, em.K - 1e-12)
    spins = [_spin(mode, q * (n - theta), k) for n in range(N + 1)]
    return XYChain(j, W, N, theta, mode, k, q, spins)


def xy_closure(j: float, N: int, m1: int = 1, theta: float = 0.0) -> XYChain:
    """Closed chain r_0 = r_N: solves dn(4 K(k) m1 / N; k) = 1/j for the
    modulus by bisection and returns the resulting chain."""
    if not j > 1:
        raise InvalidInput("need anisotropy j > 1")
    if not 1 <= m1 < N or math.gcd(m1, N) != 1:
        raise InvalidInput("need 1 <= m1 < N coprime")

    def gap(k):
        em = EllipticModulus.from_k(k)
        val = jacobi_ratio("dn", 4 * em.K * m1 / N, k)
        return val - 1 / j

    # k' rounds to 1 below ~1e-8, so keep the bracket clear of both ends
    lo, hi = 1e-6, 1 - 1e-6
    if gap(lo) * gap(hi) > 0:
        raise NoSolutionInMode("no modulus closes the chain in the bounded mode")
    k = brentq(gap, lo, hi, xtol=1e-15)
    em = EllipticModulus.from_k(k)
    q = 4 * em.K * m1 / N
    W = jacobi_ratio("cn", q, k)
    chain = xy_static(j, W, N, theta)
    # the construction pins q = 4 K m1 / N exactly
    chain.q = q
    chain.k = k
    chain.spins = [_spin(1, q * (n - theta), k) for n in range(N + 1)]
    return chain


def xy_closure_error(chain: XYChain) -> float:
    x0, y0 = chain.spins[0]
    xN, yN = chain.spins[chain.N]
    return math.hypot(x0 - xN, y0 - yN)


def xy_regularity(chain: XYChain) -> float:
    """min |r_{n-1} + r_{n+1}|: zero marks the excluded irregular states."""
    worst = math.inf
    for n in range(1, chain.N):
        xm, ym = chain.spins[n - 1]
        xp, yp = chain.spins[n + 1]
        worst = min(worst, math.hypot(xm + xp, ym + yp))
    return worst


def xy_invariant_curve(j: float, W: float) -> BiquadraticCurve:
    """Stereographic image of the invariant x0 x1 + y0 y1 / j = W:
    u^2 v^2 - ((1+W)/(1-W))(u^2 + v^2) + (4/(j(1-W))) u v + 1 = 0."""
    if W == 1:
        raise InvalidInput("W = 1 degenerates the stereographic curve")
    a = -(1 + W) / (1 - W)
    b = 2 / (j * (1 - W))
    return BiquadraticCurve([[1.0, 0.0, a], [0.0, 2 * b, 0.0], [a, 0.0, 1.0]])


def xy_godograph_curve(chain: XYChain) -> BiquadraticCurve:
    """Fit of the symmetric biquadratic through the stereographic images
    u_n = y_n / (1 + x_n) of consecutive spins (the antipode x = -1 maps
    to infinity and is skipped)."""
    pts = []
    for n in range(chain.N):
        x0, y0 = chain.spins[n]
        x1, y1 = chain.spins[n + 1]
        if abs(1 + x0) < 1e-9 or abs(1 + x1) < 1e-9:
            continue
        pts.append((y0 / (1 + x0), y1 / (1 + x1)))
    return fit_biquadratic(pts)


# -- exponential lattice waves --------------------------------------------------------


@dataclass(frozen=True)
class TodaParams:
    omega: complex
    p: complex
    r: complex
    lam: complex
    wdata: WeierstrassData

    def arg(self, n: int, t: float) -> complex:
        return self.omega * t - self.p * n + self.r

    def check_clearance(self, n_range, t: float):
        wd = self.wdata
        scale = wd.lattice_scale()
        pts = [self.arg(n, t) for n in n_range]
        pts += [self.arg(n, t) - self.p for n in n_range]
        pts.append(self.p)
        for z in pts:
            zr, _, _ = wd.reduce(z)
            if abs(zr) < POLE_CLEARANCE * scale:
                raise LatticePole(f"evaluation point within {POLE_CLEARANCE} of a pole")


def toda_eval(tp: TodaParams, n_range, t: float):
    """b_n and u_n profiles; u_n comes in two algebraically equal forms
    (difference of wp values and a sigma quotient), both returned."""
    tp.check_clearance(n_range, t)
    wd = tp.wdata
    wp_p = wp(tp.p, wd)
    b, u, u_sigma = {}, {}, {}
    for n in n_range:
        z = tp.arg(n, t)
        b[n] = tp.omega * (w_zeta(z - tp.p, wd) - w_zeta(z, wd)) - tp.lam
        u[n] = tp.omega ** 2 * (wp_p - wp(z, wd))
        num = w_sigma(z - tp.p, wd) * w_sigma(z + tp.p, wd)
        den = w_sigma(tp.p, wd) ** 2 * w_sigma(z, wd) ** 2
        u_sigma[n] = tp.omega ** 2 * num / den
    return b, u, u_sigma


def toda_form_agreement(tp: TodaParams, n_range, t: float) -> float:
    _, u, u_sigma = toda_eval(tp, n_range, t)
    worst = 0.0
    for n in u:
        worst = max(worst, abs(u[n] - u_sigma[n]) / max(1.0, abs(u[n])))
    return worst


def toda_verify(tp: TodaParams, n_range, t: float, h: float = 1e-5):
    """Equations of motion under central differences:
    db_n/dt = u_{n+1} - u_n and du_n/dt = u_n (b_n - b_{n-1})."""
    wide = range(min(n_range) - 1, max(n_range) + 2)
    b0, u0, _ = toda_eval(tp, wide, t)
    bp, up, _ = toda_eval(tp, wide, t + h)
    bm, um, _ = toda_eval(tp, wide, t - h)
    worst_b = worst_u = 0.0
    for n in n_range:
        db = (bp[n] - bm[n]) / (2 * h)
        du = (up[n] - um[n]) / (2 * h)
        res_b = abs(db - (u0[n + 1] - u0[n]))
        res_u = abs(du - u0[n] * (b0[n] - b0[n - 1]))
        scale = max(1.0, abs(u0[n]))
        worst_b = max(worst_b, res_b / scale)
        worst_u = max(worst_u, res_u / scale)
    return worst_b, worst_u


def toda_shift_identity(tp: TodaParams, n: int, t: float) -> float:
    """u_n(t) = u_{n+1}(t + p / omega)."""
    _, u1, _ = toda_eval(tp, [n], t)
    shift = tp.p / tp.omega
    _, u2, _ = toda_eval(tp, [n + 1], t + shift.real) if abs(shift.imag) < 1e-12 \
        else (None, None, None)
    if u2 is None:
        raise InvalidInput("p / omega must be real to compare shifted profiles")
    return abs(u1[n] - u2[n + 1]) / max(1.0, abs(u1[n]))


def fit_biquadratic(points, rel_tol: float = 1e-6) -> BiquadraticCurve:
    """Least-squares biquadratic through >= 9 points, with column scaling."""
    if len(points) < 9:
        raise InvalidInput("need at least 9 points")
    rows = []
    for x, y in points:
        x, y = float(x), float(y)
        rows.append([x * x * y * y, x * x * y, x * y * y, x * x, y * y,
                     x * y, x, y, 1.0])
    A = np.array(rows)
    scales = np.max(np.abs(A), axis=0)
    scales[scales == 0] = 1.0
    B = A / scales
    _, sv, vh = np.linalg.svd(B, full_matrices=False)
    if sv[-2] < 1e-10 * sv[0]:
        raise RankDeficientFit("points do not determine a single biquadratic")
    q = vh[-1] / scales
    a = [[q[8], q[7], q[4]], [q[6], q[5], q[2]], [q[3], q[1], q[0]]]
    return BiquadraticCurve(a)


def fit_residual(curve: BiquadraticCurve, points) -> float:
    worst = 0.0
    cf = curve.to_float()
    for x, y in points:
        x, y = float(x), float(y)
        den = cf.norm() * (1 + x * x) * (1 + y * y)
        worst = max(worst, abs(cf.f(x, y)) / den)
    return worst


def toda_phase_portrait(tp: TodaParams, samples: int = 64):
    """(points, fitted curve): P_n = (u_n, u_{n+1}) fills a symmetric
    biquadratic when the wave is elliptic."""
    pts = []
    t = 0.0
    tried = 0
    n = 0
    while len(pts) < samples and tried < samples * 40:
        tried += 1
        n += 1
        try:
            _, u, _ = toda_eval(tp, [n, n + 1], t + 0.37 * n)
        except LatticePole:
            continue
        a, b = u[n], u[n + 1]
        if abs(complex(a).imag) < 1e-9 * max(1, abs(a)) and \
                abs(complex(b).imag) < 1e-9 * max(1, abs(b)):
            pts.append((complex(a).real, complex(b).real))
    if len(pts) < max(9, samples // 2):
        raise InvalidInput("could not collect enough real phase-portrait points")
    curve = fit_biquadratic(pts)
    return pts, curve


def symmetry_defect(curve: BiquadraticCurve) -> float:
    n = curve.norm()
    worst = 0.0
    for i in range(3):
        for k in range(3):
            worst = max(worst, abs(curve.a[i][k] - curve.a[k][i]) / n)
    return worst
