"""Polynomial Pell equations P^2 - R Q^2 = L for quartic R.

The authoritative solver runs the polynomial continued fraction of sqrt(R)
in exact rational arithmetic: partial quotients are polynomial parts of
the iterated conjugate-surd transforms, and a solution appears exactly
when one of the surd denominators collapses to a constant. Hankel
determinants of the series coefficients of sqrt(R) at infinity are
computed alongside as the algebraic closure criterion, and the conic
bridge connects even-period polygon closure to solvability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.integrate

from .errors import (
    BudgetExhausted,
    IntegrandSingular,
    InvalidInput,
    NoRealRoot,
    NonSquareLeading,
    PerfectSquareR,
)
from .poly import (
    Poly,
    exact_sqrt,
    hankel_det,
    is_exact_scalar,
    poly_gcd,
    sqrt_laurent_inf,
)
from .poncelet import (
    Conic,
    biquadratic_from_conics,
    cayley_polynomial,
    poncelet_period,
    rational_parameterization,
)

F = Fraction


@dataclass(frozen=True)
class PellAbelSolution:
    """P^2 - R Q^2 = L, re-verified by exact polynomial arithmetic."""

    P: Poly
    Q: Poly
    L: Fraction

    def verify(self, R: Poly) -> bool:
        diff = self.P * self.P - R * self.Q * self.Q - Poly([self.L])
        return diff.is_zero


def compose_solution(sol: PellAbelSolution, R: Poly) -> PellAbelSolution:
    """(P^2 + R Q^2, 2 P Q) solves with constant L^2."""
    return PellAbelSolution(sol.P * sol.P + R * sol.Q * sol.Q,
                            sol.P * sol.Q.scaled(2), sol.L * sol.L)


# -- Laurent-at-infinity window used by the continued fraction --------------------


class _InfSeries:
    """sum c[d] t^d over d = top .. top-len+1 (descending powers)."""

    __slots__ = ("top", "c")

    def __init__(self, top, coeffs):
        self.top = top
        self.c = list(coeffs)

    @classmethod
    def from_poly(cls, p: Poly, depth: int):
        top = p.degree
        coeffs = [F(p.coeff(top - i)) for i in range(top + 1)]
        coeffs += [F(0)] * depth
        return cls(top, coeffs)

    def coeff(self, d):
        i = self.top - d
        if i < 0:
            return F(0)
        if i >= len(self.c):
            raise InvalidInput("series window exhausted")
        return self.c[i]

    def add_poly(self, p: Poly) -> "_InfSeries":
        top = max(self.top, p.degree if not p.is_zero else self.top)
        length = top - (self.top - len(self.c) + 1) + 1
        out = [F(0)] * length
        for i in range(length):
            d = top - i
            v = F(0)
            if self.top >= d > self.top - len(self.c):
                v += self.coeff(d)
            if 0 <= d <= p.degree:
                v += F(p.coeff(d))
            out[i] = v
        return _InfSeries(top, out)

    def mul_recip_poly(self, q: Poly, depth: int) -> "_InfSeries":
        """self / q to `depth` terms below the leading power."""
        qd = q.degree
        lead = F(q.lc())
        # reciprocal series of q at infinity: t^(-qd)/lead * 1/(1 + u)
        u = [F(q.coeff(qd - i), 1) / lead for i in range(1, qd + 1)]
        inv = [F(1) / lead]
        for i in range(1, depth + 1):
            acc = F(0)
            for j in range(1, min(i, qd) + 1):
                acc -= u[j - 1] * inv[i - j]
            inv.append(acc)
        top = self.top - qd
        out = [F(0)] * (depth + 1)
        for i in range(depth + 1):
            acc = F(0)
            for j in range(0, i + 1):
                if j < len(self.c) and (i - j) < len(inv):
                    acc += self.c[j] * inv[i - j]
            out[i] = acc
        return _InfSeries(top, out)

    def poly_part(self) -> Poly:
        coeffs = [F(0)] * (max(self.top, 0) + 1)
        for d in range(0, self.top + 1):
            i = self.top - d
            if i < len(self.c):
                coeffs[d] = self.c[i]
        return Poly(coeffs)


def _sqrt_series(R: Poly, depth: int) -> _InfSeries:
    s = sqrt_laurent_inf(R, depth)
    # s.coeff(j) multiplies t^(-j); translate to descending-power window
    top = 2
    coeffs = [F(s.coeff(j)) for j in range(-2, depth + 1)]
    return _InfSeries(top, coeffs)


@dataclass
class PellAbelReport:
    solvable: Optional[bool]
    solution: Optional[PellAbelSolution]
    steps: int
    reason: str


def _require_exact_quartic(R: Poly):
    if R.degree != 4:
        raise InvalidInput(f"need a quartic, got degree {R.degree}")
    if not R.is_exact:
        raise InvalidInput("the certified solver needs exact rational coefficients "
                           "(rationalize floats explicitly if that is intended)")
    if exact_sqrt(R.lc()) is None:
        raise NonSquareLeading("leading coefficient must be a rational square "
                               "for rational solvability")
    half = _poly_sqrt_exact(R)
    if half is not None:
        raise PerfectSquareR("R is a perfect square")


def _poly_sqrt_exact(p: Poly) -> Optional[Poly]:
    """Exact polynomial square root, or None."""
    if p.degree % 2 or p.is_zero:
        return None
    lead = exact_sqrt(p.lc())
    if lead is None:
        return None
    half_deg = p.degree // 2
    c = [F(0)] * (half_deg + 1)
    c[half_deg] = lead
    for i in range(half_deg - 1, -1, -1):
        acc = F(p.coeff(i + half_deg))
        for j in range(i + 1, half_deg):
            if 0 <= i + half_deg - j <= half_deg:
                acc -= c[j] * c[i + half_deg - j]
        c[i] = acc / (2 * lead)
    cand = Poly(c)
    return cand if (cand * cand) == Poly([F(v) for v in p.coeffs]) else None


def pell_abel_solve(R: Poly, max_deg_Q: int = 12, max_steps: int = 400) -> PellAbelSolution:
    """Certified solver: periodic continued fraction of sqrt(R).

    Raises BudgetExhausted when no solution appears within the degree
    budget ("not solvable within bound", never "unsolvable").
    """
    report = pell_abel_report(R, max_deg_Q, max_steps)
    if report.solution is None:
        raise BudgetExhausted(report.reason)
    return report.solution


def pell_abel_report(R: Poly, max_deg_Q: int = 12, max_steps: int = 400) -> PellAbelReport:
    _require_exact_quartic(R)
    R = Poly([F(c) for c in R.coeffs])
    depth = 8 * max_deg_Q + 64
    S = _sqrt_series(R, depth)

    # surd state: alpha_n = (sqrt(R) + P_n) / Q_n
    Pn, Qn = Poly([]), Poly([F(1)])
    p_prev, p_cur = Poly([F(1)]), None
    q_prev, q_cur = Poly([]), None
    seen = {}
    for step in range(max_steps):
        alpha = S.add_poly(Pn).mul_recip_poly(Qn, depth // 2)
        a = alpha.poly_part()
        if step == 0:
            p_cur, q_cur = a, Poly([F(1)])
        else:
            p_cur, p_prev = a * p_cur + p_prev, p_cur
            q_cur, q_prev = a * q_cur + q_prev, q_cur
        if q_cur.degree > max_deg_Q:
            return PellAbelReport(None, None, step,
                                  f"no solution with deg Q <= {max_deg_Q}")
        # next surd
        Pn1 = a * Qn - Pn
        num = R - Pn1 * Pn1
        Qn1, rem = divmod(num, Qn)
        if not rem.is_zero:
            raise InvalidInput("continued-fraction invariant broken (non-exact division)")
        if Qn1.degree == 0 and not Qn1.is_zero:
            combo = p_cur * p_cur - R * q_cur * q_cur
            if combo.degree == 0:
                sol = PellAbelSolution(p_cur, q_cur, F(combo.coeff(0)))
                assert sol.verify(R)
                return PellAbelReport(True, sol, step + 1, "periodic continued fraction")
        key = (Pn1.coeffs, Qn1.coeffs)
        if key in seen:
            return PellAbelReport(None, None, step,
                                  "continued-fraction state cycled without a "
                                  "constant denominator within the budget")
        seen[key] = step
        Pn, Qn = Pn1, Qn1
    return PellAbelReport(None, None, max_steps, "step budget exhausted")


# -- Hankel criterion ---------------------------------------------------------------


def malyshev_gamma(R: Poly, k: int):
    """k x k Hankel determinant over the odd-index window C_1..C_{2k-1} of
    the series of sqrt(R) at infinity; exact for exact R."""
    if R.degree != 4:
        raise InvalidInput(f"need a quartic, got degree {R.degree}")
    if k < 1:
        raise InvalidInput("need k >= 1")
    s = sqrt_laurent_inf(R, 2 * k + 1)
    vals = [s.coeff(j) for j in range(1, 2 * k)]
    return hankel_det(vals)


def malyshev_gammas(R: Poly, kmax: int):
    return [malyshev_gamma(R, k) for k in range(1, kmax + 1)]


# -- cubic <-> quartic bridges --------------------------------------------------------


def bridge_cubic_to_quartic(Fc: Poly) -> Poly:
    """R(t) = t^4 F(1/t) for a cubic F; R(0) = 0 always."""
    if Fc.degree != 3:
        raise InvalidInput(f"need a cubic, got degree {Fc.degree}")
    return Poly([0, Fc.coeff(3), Fc.coeff(2), Fc.coeff(1), Fc.coeff(0)])


def bridge_quartic_to_cubic(R: Poly) -> Poly:
    """F(s) = s^4 R(1/s) for a quartic R with R(0) = 0."""
    if R.degree != 4:
        raise InvalidInput(f"need a quartic, got degree {R.degree}")
    if R.coeff(0) != 0:
        raise InvalidInput("need R(0) = 0 (shift a root to the origin first)")
    return Poly([R.coeff(4), R.coeff(3), R.coeff(2), R.coeff(1)])


def shift_to_root(R: Poly) -> Poly:
    """R(t + lam) for the smallest real root lam of R, so the result
    vanishes at the origin. Exact when the root is rational."""
    if R.is_exact:
        lam = _smallest_rational_root(R)
        if lam is not None:
            return R.shifted(lam)
    roots = [r.real for r in R.to_float().roots() if abs(r.imag) < 1e-9]
    if not roots:
        raise NoRealRoot("no real root to shift to the origin")
    lam = min(roots)
    if R.is_exact:
        # fall back to a float shift when the smallest real root is irrational
        return R.to_float().shifted(lam)
    return R.shifted(lam)


def _smallest_rational_root(R: Poly) -> Optional[Fraction]:
    """Smallest rational root via divisor search on the primitive form."""
    coeffs = [F(c) for c in R.coeffs]
    den = math.lcm(*[c.denominator for c in coeffs]) if coeffs else 1
    ints = [int(c * den) for c in coeffs]
    while ints and ints[0] == 0:
        # zero is a root; it is the smallest nonpositive candidate unless a
        # negative rational root exists, so collect all and compare
        break
    candidates = set()
    a0 = next((abs(v) for v in ints if v != 0), 0)
    an = abs(ints[-1]) if ints else 0
    if an == 0:
        return None
    if ints[0] == 0:
        candidates.add(F(0))
        a0 = abs(next(v for v in ints[1:] if v != 0)) if any(ints[1:]) else 0
    if a0:
        for p in _divisors(a0):
            for q in _divisors(an):
                candidates.add(F(p, q))
                candidates.add(F(-p, q))
    roots = [c for c in candidates if Poly(coeffs)(c) == 0]
    if not roots:
        return None
    return min(roots)


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


# -- Abel integral identity -------------------------------------------------------------


def abel_integral_check(sol: PellAbelSolution, R: Poly, t0: float, t1: float) -> float:
    """| int_{t0}^{t1} (2 P'/Q)/sqrt(R) dt - [ln((P + sqrt(R) Q)/(P - sqrt(R) Q))] |

    Requires L = 1 and R > 0 on the interval.
    """
    if sol.L != 1:
        raise InvalidInput("identity stated for L = 1")
    if t0 == t1:
        return 0.0
    Rf = R.to_float()
    Pf, Qf = sol.P.to_float(), sol.Q.to_float()
    dPf = Pf.derivative()
    lo, hi = min(t0, t1), max(t0, t1)
    for t in np.linspace(lo, hi, 257):
        if Rf(float(t)) <= 0:
            raise IntegrandSingular(f"R({t:.4f}) <= 0 on the interval")
        if abs(Qf(float(t))) < 1e-13:
            raise IntegrandSingular(f"Q({t:.4f}) = 0 on the interval")

    def integrand(t):
        return 2 * dPf(t) / (Qf(t) * math.sqrt(Rf(t)))

    val, _ = scipy.integrate.quad(integrand, t0, t1, epsabs=1e-12, epsrel=1e-12, limit=200)

    def logterm(t):
        rt = math.sqrt(Rf(t))
        return math.log(abs((Pf(t) + rt * Qf(t)) / (Pf(t) - rt * Qf(t))))

    return abs(val - (logterm(t1) - logterm(t0)))


# -- the conic bridge ---------------------------------------------------------------------


@dataclass
class BridgeReport:
    period: Optional[int]
    even_period: Optional[bool]
    R: Poly
    solver: PellAbelReport
    gammas: list
    consistent: Optional[bool]
    note: str = ""


def poncelet_pell_bridge_test(A: Conic, B: Conic, maxN: int = 24,
                              max_deg_Q: int = 12) -> BridgeReport:
    """Even polygon-closure period implies a solvable Pell equation for the
    quartic built from det(M_A - z M_B).

    The tangent conic's matrix is rescaled by its own determinant so the
    quartic keeps a positive perfect-square leading coefficient and exact
    rational solvability is preserved (the rescaling multiplies the cubic
    by a fourth power).
    """
    if not (A.is_exact and B.is_exact):
        raise InvalidInput("the certified bridge needs exact rational conics")
    period = poncelet_period(A.to_float(), B.to_float(), maxN=maxN)
    d = A.det()
    if d == 0:
        raise InvalidInput("degenerate tangent conic")
    Anorm = A.scaled(d)  # det becomes d^4 > 0, a rational square
    Fc = cayley_polynomial(Anorm, B)
    R = bridge_cubic_to_quartic(Fc)
    R = shift_to_root(R)  # R(0) = 0 already; identity shift
    solver = pell_abel_report(R, max_deg_Q=max_deg_Q)
    gammas = malyshev_gammas(R, min(6, max_deg_Q))
    even = (period % 2 == 0) if period is not None else None
    if period is None:
        consistent = None
        note = "no closure within maxN; solver outcome unconstrained"
    elif even:
        consistent = bool(solver.solvable)
        note = "even period: solver success expected"
    else:
        consistent = None
        note = "odd period: criterion silent"
    return BridgeReport(period, even, R, solver, gammas, consistent, note)
