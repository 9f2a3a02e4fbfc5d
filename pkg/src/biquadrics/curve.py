"""The biquadratic curve: forms, discriminants, genus, canonical reduction.

A biquadratic curve is F(x, y) = sum a[i][k] x^i y^k = 0 with i, k <= 2.
Viewed as a quadratic in y it is A2(x) y^2 + A1(x) y + A0(x); the
discriminant D1(x) = A1^2 - 4 A0 A2 (literally, no scalar dropped) carries
the curve's elliptic data: its quartic invariants match those of D2(y)
exactly, and its real roots are the x-coordinates of the curve's
x-extreme points.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    DegenerateDelta,
    DegenerateQuartic,
    InvalidInput,
    NotCanonical,
)
from .poly import (
    Mobius,
    Poly,
    invariants_g2_g3,
    is_exact_scalar,
    join_modes,
    poly_discriminant,
)


class BiquadraticCurve:
    """3x3 coefficient matrix a[i][k], i = x-degree, k = y-degree."""

    __slots__ = ("a",)

    def __init__(self, a):
        rows = [tuple(row) for row in a]
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise InvalidInput("coefficient matrix must be 3x3")
        if all(c == 0 for r in rows for c in r):
            raise InvalidInput("identically zero curve")
        join_modes(*[c for r in rows for c in r])
        self.a = tuple(rows)

    # -- basics -----------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return all(is_exact_scalar(c) for r in self.a for c in r)

    @property
    def is_symmetric(self) -> bool:
        tol = 1e-12 * self.norm()
        return all(abs(self.a[i][k] - self.a[k][i]) <= tol for i in range(3) for k in range(3))

    def norm(self) -> float:
        return max(abs(c) for r in self.a for c in r)

    def coeff(self, i: int, k: int):
        return self.a[i][k]

    def __eq__(self, other):
        if not isinstance(other, BiquadraticCurve):
            return NotImplemented
        return self.a == other.a

    def __repr__(self):
        return f"BiquadraticCurve({[list(r) for r in self.a]!r})"

    def transpose(self) -> "BiquadraticCurve":
        return BiquadraticCurve([[self.a[k][i] for k in range(3)] for i in range(3)])

    def scaled(self, s) -> "BiquadraticCurve":
        return BiquadraticCurve([[c * s for c in row] for row in self.a])

    def to_float(self) -> "BiquadraticCurve":
        return BiquadraticCurve([[float(c) if is_exact_scalar(c) else c for c in row]
                                 for row in self.a])

    # -- evaluation ---------------------------------------------------------

    def f(self, x, y):
        acc = 0
        for i in range(2, -1, -1):
            inner = 0
            for k in range(2, -1, -1):
                inner = inner * y + self.a[i][k]
            acc = acc * x + inner
        return acc

    def f_hom(self, xu, xv, yu, yv):
        """Bihomogeneous value: sum a_ik xu^i xv^(2-i) yu^k yv^(2-k)."""
        acc = 0
        for i in range(3):
            for k in range(3):
                c = self.a[i][k]
                if c == 0:
                    continue
                acc += c * xu ** i * xv ** (2 - i) * yu ** k * yv ** (2 - k)
        return acc

    def fx(self, x, y):
        acc = 0
        for i in (1, 2):
            for k in range(3):
                c = self.a[i][k]
                if c != 0:
                    acc += i * c * x ** (i - 1) * y ** k
        return acc

    def fy(self, x, y):
        acc = 0
        for i in range(3):
            for k in (1, 2):
                c = self.a[i][k]
                if c != 0:
                    acc += k * c * x ** i * y ** (k - 1)
        return acc

    # -- quadratic-in-one-variable forms -------------------------------------

    def a_form(self):
        """(A2, A1, A0) with F = A2(x) y^2 + A1(x) y + A0(x)."""
        return tuple(Poly([self.a[i][k] for i in range(3)]) for k in (2, 1, 0))

    def b_form(self):
        """(B2, B1, B0) with F = B2(y) x^2 + B1(y) x + B0(y)."""
        return tuple(Poly([self.a[i][k] for k in range(3)]) for i in (2, 1, 0))

    def discriminants(self):
        """(D1, D2): D1 = A1^2 - 4 A0 A2 in x, D2 = B1^2 - 4 B0 B2 in y."""
        A2, A1, A0 = self.a_form()
        B2, B1, B0 = self.b_form()
        return A1 * A1 - A0 * A2.scaled(4), B1 * B1 - B0 * B2.scaled(4)

    def invariants(self):
        """Quartic invariants (g2, g3) of D1 (equal to those of D2)."""
        d1, _ = self.discriminants()
        return invariants_g2_g3(d1)

    # -- Moebius action -------------------------------------------------------

    def transform(self, mx: Mobius, my: Optional[Mobius] = None) -> "BiquadraticCurve":
        """Coefficients of (xi x+eta)^2 (xi' y+eta')^2 F(mx(x), my(y))."""
        if my is None:
            my = mx
        tx = _quadratic_action(mx)
        ty = _quadratic_action(my)
        # new_a[p][q] = sum_{i,k} a[i][k] tx[i][p] ty[k][q]
        new = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for k in range(3):
                c = self.a[i][k]
                if c == 0:
                    continue
                for p in range(3):
                    if tx[i][p] == 0:
                        continue
                    for q in range(3):
                        new[p][q] += c * tx[i][p] * ty[k][q]
        return BiquadraticCurve(new)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> str:
        exact = self.is_exact
        rows = []
        for row in self.a:
            out = []
            for c in row:
                if exact:
                    fr = Fraction(c)
                    out.append(f"{fr.numerator}/{fr.denominator}")
                else:
                    out.append(float(c))
            rows.append(out)
        return json.dumps({"a": rows})

    @classmethod
    def from_json(cls, text: str) -> "BiquadraticCurve":
        data = json.loads(text)
        rows = []
        for row in data["a"]:
            out = []
            for c in row:
                if isinstance(c, str):
                    num, _, den = c.partition("/")
                    out.append(Fraction(int(num), int(den) if den else 1))
                else:
                    out.append(c)
            rows.append(out)
        return cls(rows)


def _quadratic_action(m: Mobius):
    """t[i][p]: coefficient of x^p in (mu x + nu)^i (xi x + eta)^(2-i)."""
    num = Poly([m.nu, m.mu])
    den = Poly([m.eta, m.xi])
    table = []
    for i in range(3):
        p = (num ** i) * (den ** (2 - i))
        table.append([p.coeff(j) for j in range(3)])
    return table


# -- construction from a single quartic (symmetric curves) ------------------------


def stieltjes_curve(b0, b1, b2, b3, b4, C) -> BiquadraticCurve:
    """Symmetric biquadratic whose D1 is proportional to
    b0 x^4 + 4 b1 x^3 + 6 b2 x^2 + 4 b3 x + b4, built from the classical
    4x4 bordered determinant with integration constant C."""
    minor = [[b0, b1, b2 - 2 * C], [b1, b2 + C, b3], [b2 - 2 * C, b3, b4]]
    if _det3(minor) == 0:
        raise DegenerateDelta("bordered 3x3 minor vanishes")
    # border row/column entries as bivariate polynomials in (x, y)
    half = Fraction(1, 2) if all(is_exact_scalar(v) for v in (b0, b1, b2, b3, b4, C)) else 0.5
    r = [_bp({}), _bp({(0, 0): 1}), _bp({(1, 0): -half, (0, 1): -half}), _bp({(1, 1): 1})]
    mat = [
        [r[0], r[1], r[2], r[3]],
        [r[1], _bp({(0, 0): b0}), _bp({(0, 0): b1}), _bp({(0, 0): b2 - 2 * C})],
        [r[2], _bp({(0, 0): b1}), _bp({(0, 0): b2 + C}), _bp({(0, 0): b3})],
        [r[3], _bp({(0, 0): b2 - 2 * C}), _bp({(0, 0): b3}), _bp({(0, 0): b4})],
    ]
    det = _bdet4(mat)
    a = [[det.get((i, k), 0) for k in range(3)] for i in range(3)]
    return BiquadraticCurve(a)


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _bp(d):
    return dict(d)


def _bmul(p, q):
    out = {}
    for (i1, k1), c1 in p.items():
        for (i2, k2), c2 in q.items():
            key = (i1 + i2, k1 + k2)
            out[key] = out.get(key, 0) + c1 * c2
    return out


def _badd(p, q, sign=1):
    out = dict(p)
    for key, c in q.items():
        out[key] = out.get(key, 0) + sign * c
    return out


def _bdet4(m):
    total = {}
    for perm in itertools.permutations(range(4)):
        sign = _perm_sign(perm)
        term = {(0, 0): 1}
        for i in range(4):
            term = _bmul(term, m[i][perm[i]])
        total = _badd(total, term, sign)
    return total


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


# -- genus and singular points ------------------------------------------------------


@dataclass(frozen=True)
class CurveNature:
    kind: str  # 'elliptic' | 'singular' | 'reducible'
    point: Optional[tuple] = None


def genus_and_singularities(c: BiquadraticCurve) -> CurveNature:
    """Elliptic iff the discriminant of D1 is nonzero; otherwise locate the
    finite singular point (multiple root of D1) or report reducibility."""
    d1, d2 = c.discriminants()
    if d1.is_zero or d1.degree < 3:
        return CurveNature("reducible")
    disc = poly_discriminant(d1)
    scale = max(abs(complex(cc)) for cc in d1.coeffs) ** (2 * d1.degree - 2)
    if c.is_exact:
        nonzero = disc != 0
    else:
        nonzero = abs(disc) > 1e-10 * max(scale, 1e-300)
    if nonzero:
        return CurveNature("elliptic")
    # multiple roots of D1
    roots = d1.to_float().roots()
    mults = _multiple_roots(roots)
    if len(mults) != 1:
        return CurveNature("reducible")
    x1 = mults[0]
    y1 = _partner_coordinate(c, x1)
    if y1 is None:
        return CurveNature("reducible")
    fx = c.to_float().fx(x1, y1)
    fy = c.to_float().fy(x1, y1)
    fv = c.to_float().f(x1, y1)
    tol = 1e-6 * max(1.0, c.norm())
    if abs(fv) < tol and abs(fx) < tol and abs(fy) < tol:
        if abs(x1.imag) < 1e-8 and abs(y1.imag) < 1e-8:
            return CurveNature("singular", (x1.real, y1.real))
        return CurveNature("singular", (x1, y1))
    return CurveNature("reducible")


def _multiple_roots(roots, tol=1e-5):
    out = []
    used = [False] * len(roots)
    for i, r in enumerate(roots):
        if used[i]:
            continue
        cluster = [r]
        used[i] = True
        for j in range(i + 1, len(roots)):
            if not used[j] and abs(roots[j] - r) < tol * max(1.0, abs(r)):
                cluster.append(roots[j])
                used[j] = True
        if len(cluster) >= 2:
            out.append(sum(cluster) / len(cluster))
    return out


def _partner_coordinate(c: BiquadraticCurve, x1):
    """y with F(x1, y) = 0 at a double root of D1 (vertex/singular point)."""
    cf = c.to_float()
    A2, A1, A0 = cf.a_form()
    a2, a1 = A2(x1), A1(x1)
    if abs(a2) > 1e-10 * max(1.0, cf.norm()):
        return -a1 / (2 * a2)
    if abs(a1) > 1e-10 * max(1.0, cf.norm()):
        return -A0(x1) / a1
    return None


# -- canonical classification ----------------------------------------------------------


@dataclass(frozen=True)
class CanonicalTag:
    """Canonical family of a biquadratic in reduced coordinates.

    family: 'EB_i' (x^2y^2 + a(x^2+y^2) + 2bxy + 1),
            'EB_ii' (same with -1),
            'ASYM_iii' (x^2y^2 + a(x^2-y^2) + 2bxy - 1),
            'degenerate'.
    subcase 0..5 follows the vertex-count classification; param_family names
    the parameterization route; kappa is the coordinate scale that
    normalized |c| to 1 (original = kappa * normalized coordinates).
    """

    family: str
    subcase: int
    params: tuple
    param_family: str = ""
    kappa: float = 1.0
    scale: float = 1.0  # overall factor divided out (a22 of the input)

    @property
    def a(self):
        return self.params[0]

    @property
    def b(self):
        return self.params[1]

    @property
    def c(self):
        return self.params[2]


def classify(curve: BiquadraticCurve) -> CanonicalTag:
    """Classify a curve already in a canonical family (i)/(ii)/(iii)."""
    cf = curve.to_float()
    a = cf.a
    tol = 1e-10 * cf.norm()
    off = [(i, k) for (i, k) in [(0, 1), (1, 0), (1, 2), (2, 1)] if abs(a[i][k]) > tol]
    if off:
        raise NotCanonical(f"odd-degree terms present at {off}")
    a22 = a[2][2]
    if abs(a22) <= tol:
        raise NotCanonical("no x^2 y^2 term")
    a20 = a[2][0] / a22
    a02 = a[0][2] / a22
    b = a[1][1] / (2 * a22)
    c0 = a[0][0] / a22
    if abs(c0) <= tol:
        return CanonicalTag("degenerate", -1, (a20, b, 0.0), "", 1.0, abs(a22))
    kappa = abs(c0) ** 0.25
    av_sym = 0.5 * (a20 + a02)
    av_asym = 0.5 * (a20 - a02)
    aa = av_sym / kappa ** 2 if abs(av_sym) >= abs(av_asym) else av_asym / kappa ** 2
    bb = b / kappa ** 2
    cc = 1.0 if c0 > 0 else -1.0
    if abs(aa) <= 1e-12:
        return CanonicalTag("degenerate", -1, (aa, bb, cc), "", kappa, abs(a22))
    if abs(a20 - a02) <= tol * max(1.0, abs(a20)) + tol:
        # symmetric families (i) / (ii)
        if cc > 0:
            btilde = (bb * bb - aa * aa - 1) / aa
            if abs(btilde - 2) < 1e-9:
                return CanonicalTag("degenerate", -1, (aa, bb, cc), "", kappa, abs(a22))
            if aa > 0:
                if btilde < 2:
                    return CanonicalTag("EB_i", 0, (aa, bb, cc), "empty", kappa, abs(a22))
                return CanonicalTag("EB_i", 2, (aa, bb, cc), "bax", kappa, abs(a22))
            if btilde > 2:
                return CanonicalTag("EB_i", 2, (aa, bb, cc), "par7", kappa, abs(a22))
            if btilde < -2:
                return CanonicalTag("EB_i", 1, (aa, bb, cc), "par4", kappa, abs(a22))
            return CanonicalTag("EB_i", 1, (aa, bb, cc), "par_asym", kappa, abs(a22))
        return CanonicalTag("EB_ii", 3, (aa, bb, cc),
                            "par13" if aa > 0 else "par58", kappa, abs(a22))
    if abs(a20 + a02) <= tol * max(1.0, abs(a20)) + tol:
        # antisymmetric family (iii), canonical constant -1
        if cc > 0:
            raise NotCanonical("antisymmetric form requires constant term of sign "
                               "opposite to the x^2 y^2 term")
        return CanonicalTag("ASYM_iii", 4 if aa > 0 else 5, (aa, bb, cc),
                            "par_a1" if aa > 0 else "par_a2", kappa, abs(a22))
    raise NotCanonical("x^2 and y^2 coefficients neither equal nor opposite")


def eb_curve(a, b, c) -> BiquadraticCurve:
    """x^2 y^2 + a (x^2 + y^2) + 2 b x y + c = 0."""
    return BiquadraticCurve([[c, 0, a], [0, 2 * b, 0], [a, 0, 1]])


def asym_curve(a, b) -> BiquadraticCurve:
    """x^2 y^2 + a (x^2 - y^2) + 2 b x y - 1 = 0."""
    return BiquadraticCurve([[-1, 0, -a], [0, 2 * b, 0], [a, 0, 1]])


# -- reduction of a real symmetric curve to Euler-Baxter form ---------------------------


def reduce_symmetric_to_eb(curve: BiquadraticCurve):
    """Real Moebius x = G(x~), y = G(y~) (same G on both variables) taking a
    real symmetric genus-1 biquadratic to x^2y^2 + a(x^2+y^2) + 2bxy + c,
    |c| = 1. Returns (CanonicalTag, G)."""
    if not curve.is_symmetric:
        raise NotCanonical("curve is not symmetric")
    cf = curve.to_float()
    try:
        tag = classify(cf)
        if tag.family != "degenerate":
            return tag, Mobius.identity()
    except NotCanonical:
        pass

    pre = Mobius.identity()
    work = cf
    diag = _diagonal_quartic(work)
    if diag.degree < 4:
        # move the root at infinity with x -> 1/(x - s)
        for s in (0.0, 1.0, -1.0, 2.0, 0.5):
            m = Mobius(0.0, 1.0, 1.0, -s)  # x -> 1/(x - s)
            moved = work.transform(m)
            if _diagonal_quartic(moved).degree == 4:
                pre = m
                work = moved
                break
        else:
            raise DegenerateQuartic("diagonal quartic degenerate in every chart")

    q = _diagonal_quartic(work)
    roots = q.roots()
    if _has_multiple(roots):
        raise DegenerateQuartic("diagonal quartic has a multiple root")
    best = None
    for pairing in ([(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]):
        m = _pair_swap_involution(roots, pairing)
        if m is None:
            continue
        fps = _real_fixed_points(m)
        if fps is None:
            continue
        f1, f2 = fps
        if math.isinf(f2):
            gamma = Mobius(1.0, f1, 0.0, 1.0)  # x~ -> x~ + f1
        else:
            gamma = Mobius(f2, f1, 1.0, 1.0)  # x~ -> (f2 x~ + f1)/(x~ + 1)
        cand = work.transform(gamma)
        resid = _off_even_residual(cand)
        if best is None or resid < best[0]:
            best = (resid, gamma, cand)
    if best is None or best[0] > 1e-8:
        raise DegenerateQuartic("no real pairing removes the odd terms")
    _, gamma, reduced = best
    # clean tiny off-even entries before classification
    tol = 1e-9 * reduced.norm()
    cleaned = BiquadraticCurve([[0.0 if abs(reduced.a[i][k]) < tol else reduced.a[i][k]
                                 for k in range(3)] for i in range(3)])
    tag = classify(cleaned)
    full = pre.compose(gamma) if pre.mu != 1 or pre.nu != 0 or pre.xi != 0 or pre.eta != 1 else gamma
    return tag, full


def _diagonal_quartic(c: BiquadraticCurve) -> Poly:
    """F(x, x) as a univariate polynomial."""
    coeffs = [0.0] * 5
    for i in range(3):
        for k in range(3):
            coeffs[i + k] += c.a[i][k]
    return Poly(coeffs)


def _has_multiple(roots, tol=1e-7):
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < tol * max(1.0, abs(roots[i])):
                return True
    return False


def _pair_swap_involution(roots, pairing):
    """Real Moebius swapping roots within each pair, None if not real."""
    (i1, j1), (i2, j2) = pairing
    a, b = roots[i1], roots[j1]
    c, d = roots[i2], roots[j2]
    # M(a) = b, M(b) = a, M(c) = d: homogeneous linear system for (p,q,r,s)
    rows = [
        [a, 1, -b * a, -b],
        [b, 1, -a * b, -a],
        [c, 1, -d * c, -d],
    ]
    mat = np.array(rows, dtype=complex)
    _, _, vh = np.linalg.svd(mat)
    p, q, r, s = vh[-1]
    if max(abs(v.imag) for v in (p, q, r, s)) > 1e-7 * max(abs(v) for v in (p, q, r, s)):
        # try making it real via a global phase
        phase = max((p, q, r, s), key=abs)
        p, q, r, s = (v / phase * abs(phase) for v in (p, q, r, s))
        if max(abs(v.imag) for v in (p, q, r, s)) > 1e-7 * max(abs(v) for v in (p, q, r, s)):
            return None
    p, q, r, s = p.real, q.real, r.real, s.real
    if abs(p * s - q * r) < 1e-14:
        return None
    return Mobius(p, q, r, s)


def _real_fixed_points(m: Mobius):
    """Two distinct real fixed points of an involution, or None."""
    # fixed points: r x^2 + (s - p) x - q = 0
    a, b, c = m.xi, m.eta - m.mu, -m.nu
    if abs(a) < 1e-14 * max(abs(b), abs(c), 1.0):
        if abs(b) < 1e-14:
            return None
        return (-c / b, math.inf)
    disc = b * b - 4 * a * c
    if disc <= 0:
        return None
    rt = math.sqrt(disc)
    return ((-b + rt) / (2 * a), (-b - rt) / (2 * a))


def _off_even_residual(c: BiquadraticCurve) -> float:
    scale = c.norm()
    off = [c.a[0][1], c.a[1][0], c.a[1][2], c.a[2][1],
           c.a[2][0] - c.a[0][2]]
    return max(abs(v) for v in off) / scale
