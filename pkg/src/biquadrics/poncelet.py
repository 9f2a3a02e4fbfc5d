"""Conic pairs: the biquadratic bridge, geometric closure, Hankel criterion.

A pair of conics A, B induces the biquadratic F(x, y) = det(E, E', G)
where E and G are degree-<=2 rational parameterizations: F(x, y) = 0 says
that the point G(y) of B lies on the tangent to A at E(x). The geometric
polygon-chain iteration serves as the independent oracle for both the
root-swap dynamics on F and the Hankel-determinant closure criterion built
from sqrt(det(A - z B)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .curve import BiquadraticCurve
from .elliptic import EllipticModulus, jacobi_ratio
from .errors import (
    DegenerateBridge,
    DegenerateGeometry,
    EmptyRealConic,
    InvalidGeometry,
    InvalidInput,
    NegativeMixedProduct,
    NoRealIntersection,
    NonconstantMixedProduct,
    TangencyDegenerate,
)
from .poly import (
    Poly,
    hankel_det,
    is_exact_scalar,
    scalar_sqrt,
    sqrt_taylor,
    sqrt_taylor_normalized,
)


class Conic:
    """3x3 symmetric matrix in projective coordinates (s0, s1, s2),
    affine x = s1/s0, y = s2/s0."""

    __slots__ = ("M",)

    def __init__(self, M):
        rows = [tuple(r) for r in M]
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise InvalidInput("conic matrix must be 3x3")
        for i in range(3):
            for j in range(3):
                if abs(complex(rows[i][j]) - complex(rows[j][i])) > 1e-12:
                    raise InvalidInput("conic matrix must be symmetric")
        self.M = tuple(rows)

    @property
    def is_exact(self) -> bool:
        return all(is_exact_scalar(c) for r in self.M for c in r)

    def det(self):
        m = self.M
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    @property
    def is_irreducible(self) -> bool:
        return self.det() != 0

    def quad(self, p):
        """p^T M p for a projective 3-vector."""
        return sum(self.M[i][j] * p[i] * p[j] for i in range(3) for j in range(3))

    def apply(self, p):
        return tuple(sum(self.M[i][j] * p[j] for j in range(3)) for i in range(3))

    def scaled(self, s) -> "Conic":
        return Conic([[c * s for c in row] for row in self.M])

    def to_float(self) -> "Conic":
        return Conic([[float(c) for c in row] for row in self.M])

    def to_json(self) -> str:
        return json.dumps({"M": [[_num_out(c) for c in row] for row in self.M]})

    @classmethod
    def from_json(cls, text: str) -> "Conic":
        data = json.loads(text)
        return cls([[_num_in(c) for c in row] for row in data["M"]])

    @classmethod
    def circle(cls, cx, cy, r) -> "Conic":
        """(x-cx)^2 + (y-cy)^2 = r^2."""
        return cls([
            [cx * cx + cy * cy - r * r, -cx, -cy],
            [-cx, 1, 0],
            [-cy, 0, 1],
        ])

    @classmethod
    def ellipse(cls, a2, b2) -> "Conic":
        """x^2/a2 + y^2/b2 = 1 (a2, b2 are the squared semi-axes)."""
        return cls([[-1, 0, 0], [0, Fraction(1, 1) / a2 if is_exact_scalar(a2) else 1 / a2, 0],
                    [0, 0, Fraction(1, 1) / b2 if is_exact_scalar(b2) else 1 / b2]])


def _num_out(c):
    if is_exact_scalar(c):
        fr = Fraction(c)
        return f"{fr.numerator}/{fr.denominator}"
    return float(c)


def _num_in(c):
    if isinstance(c, str):
        num, _, den = c.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    return c


@dataclass(frozen=True)
class ConicParam:
    """Projective parameterization by three polynomials of degree <= 2."""

    E0: Poly
    E1: Poly
    E2: Poly

    def __iter__(self):
        return iter((self.E0, self.E1, self.E2))

    def point(self, x):
        return (self.E0(x), self.E1(x), self.E2(x))

    def derivative(self):
        return (self.E0.derivative(), self.E1.derivative(), self.E2.derivative())

    @property
    def is_degenerate(self) -> bool:
        rows = [[p.coeff(j) for j in range(3)] for p in self]
        mat = np.array([[complex(v) for v in r] for r in rows])
        return abs(np.linalg.det(mat)) < 1e-12 * max(1.0, np.abs(mat).max() ** 3)


def rational_parameterization(c: Conic) -> ConicParam:
    """Degree-<=2 polynomial triple sweeping the conic.

    Classical forms for axis-aligned ellipses/circles and the standard
    parabola; a pencil of lines through a real point otherwise.
    """
    M = c.to_float().M
    scale = max(abs(v) for row in M for v in row)
    tol = 1e-12 * scale

    def iszero(v):
        return abs(v) <= tol

    # x^2/a2 + y^2/b2 = 1 pattern (diagonal, negative corner)
    if iszero(M[0][1]) and iszero(M[0][2]) and iszero(M[1][2]) and M[0][0] * M[1][1] < 0 \
            and M[0][0] * M[2][2] < 0:
        a2 = -M[0][0] / M[1][1]
        b2 = -M[0][0] / M[2][2]
        return ConicParam(Poly([1.0, 0.0, 1.0]),
                          Poly([0.0, 2 * math.sqrt(a2)]),
                          Poly([math.sqrt(b2), 0.0, -math.sqrt(b2)]))
    # parabola y = x^2: s1^2 - s0 s2 = 0 pattern
    if iszero(M[0][0]) and iszero(M[2][2]) and iszero(M[0][1]) and iszero(M[1][2]) \
            and not iszero(M[1][1]) and M[0][2] * M[1][1] < 0 and abs(2 * M[0][2] + M[1][1]) <= tol:
        return ConicParam(Poly([1.0]), Poly([0.0, 1.0]), Poly([0.0, 0.0, 1.0]))
    # generic: pencil of lines through a real point
    p0 = _real_point(c)
    mat = np.array([[float(v) for v in row] for row in M])
    # two directions completing p0 to a basis
    basis = []
    for e in np.eye(3):
        cand = e - p0 * np.dot(p0, e) / np.dot(p0, p0)
        if np.linalg.norm(cand) > 1e-8:
            basis.append(cand / np.linalg.norm(cand))
        if len(basis) == 2:
            break
    u, v = basis
    # X(t) = (q^T M q) p0 - 2 (p0^T M q) q with q = u + t v
    pMu, pMv = p0 @ mat @ u, p0 @ mat @ v
    uMu, uMv, vMv = u @ mat @ u, u @ mat @ v, v @ mat @ v
    comp = []
    for i in range(3):
        # coefficients in t of (q M q) p0_i - 2 (p0 M q) q_i
        c0 = uMu * p0[i] - 2 * pMu * u[i]
        c1 = 2 * uMv * p0[i] - 2 * (pMv * u[i] + pMu * v[i])
        c2 = vMv * p0[i] - 2 * pMv * v[i]
        comp.append(Poly([c0, c1, c2]))
    param = ConicParam(*comp)
    if param.is_degenerate:
        raise DegenerateGeometry("parameterization degenerated to a line")
    return param


def _real_point(c: Conic):
    """A real projective point on the conic via eigen-decomposition."""
    mat = np.array([[float(v) for v in row] for row in c.to_float().M])
    w, V = np.linalg.eigh(mat)
    pos = [i for i in range(3) if w[i] > 1e-12]
    neg = [i for i in range(3) if w[i] < -1e-12]
    if not pos or not neg:
        raise EmptyRealConic("definite quadratic form: no real points")
    i, j = pos[0], neg[0]
    p = V[:, i] / math.sqrt(w[i]) + V[:, j] / math.sqrt(-w[j])
    assert abs(p @ mat @ p) < 1e-8 * np.abs(mat).max()
    return p


def m_vector(E: ConicParam):
    """Cross product E x E', three polynomials of degree <= 2.

    Orthogonal to E and E' identically; its mixed product with its own
    derivatives is constant in x.
    """
    E0, E1, E2 = E
    d0, d1, d2 = E.derivative()
    return (E1 * d2 - E2 * d1, E2 * d0 - E0 * d2, E0 * d1 - E1 * d0)


def mixed_product(M):
    """(M, M', M'') for a polynomial 3-vector; constant when deg <= 2."""
    M0, M1, M2 = M
    d = [p.derivative() for p in (M0, M1, M2)]
    dd = [p.derivative() for p in d]
    det = (M0 * (d[1] * dd[2] - d[2] * dd[1])
           - M1 * (d[0] * dd[2] - d[2] * dd[0])
           + M2 * (d[0] * dd[1] - d[1] * dd[0]))
    return det


def conic_from_m(M) -> ConicParam:
    """Solve E x E' = M: E = +(M, M', M'')^(-1/2) M x M'."""
    prod = mixed_product(M)
    if prod.degree > 0:
        scale = max(abs(complex(c)) for c in prod.coeffs)
        if any(abs(complex(prod.coeff(i))) > 1e-9 * scale for i in range(1, prod.degree + 1)):
            raise NonconstantMixedProduct("mixed product depends on the parameter")
    v = complex(prod.coeff(0))
    if abs(v) < 1e-14:
        raise DegenerateGeometry("mixed product vanishes: degenerate data")
    if v.real < 0 and abs(v.imag) < 1e-12 * abs(v):
        raise NegativeMixedProduct(
            "negative mixed product: no smooth solution (flip the sign of M)")
    d = [p.derivative() for p in M]
    cross = (M[1] * d[2] - M[2] * d[1],
             M[2] * d[0] - M[0] * d[2],
             M[0] * d[1] - M[1] * d[0])
    inv = 1 / scalar_sqrt(v.real)
    return ConicParam(*(p.to_float().scaled(inv) for p in cross))


def biquadratic_from_conics(E: ConicParam, G: ConicParam) -> BiquadraticCurve:
    """3x3 coefficient matrix of det(E(x), E'(x), G(y))."""
    if E.is_degenerate or G.is_degenerate:
        raise DegenerateBridge("a parameterization is degenerate (a line)")
    M = m_vector(E)
    a = [[0] * 3 for _ in range(3)]
    for comp in range(3):
        mpoly = M[comp]
        gpoly = list(G)[comp]
        for i in range(3):
            for k in range(3):
                a[i][k] += mpoly.coeff(i) * gpoly.coeff(k)
    curve = BiquadraticCurve(a)
    mat = np.array([[complex(v) for v in row] for row in curve.a])
    if np.linalg.matrix_rank(mat, tol=1e-9 * max(1.0, np.abs(mat).max())) < 3:
        raise DegenerateBridge("bridge matrix rank < 3")
    return curve


def conic_matrix_from_param(E: ConicParam) -> Conic:
    """Least-squares fit of the symmetric matrix annulled by E(x)."""
    xs = np.linspace(-2.1, 2.3, 12)
    rows = []
    for x in xs:
        s = [complex(v).real for v in E.point(x)]
        rows.append([s[0] * s[0], s[1] * s[1], s[2] * s[2],
                     2 * s[0] * s[1], 2 * s[0] * s[2], 2 * s[1] * s[2]])
    _, _, vh = np.linalg.svd(np.array(rows))
    q = vh[-1]
    return Conic([[q[0], q[3], q[4]], [q[3], q[1], q[5]], [q[4], q[5], q[2]]])


# -- geometric iteration --------------------------------------------------------------


@dataclass(frozen=True)
class PonceletState:
    """Q on A, P on B, with P on the tangent line to A at Q."""

    Q: tuple
    P: tuple
    orientation: int = 1

    def tangency_residual(self, A: Conic, B: Conic) -> float:
        line = A.apply(self.Q)
        scale = _norm3(line) * _norm3(self.P)
        return abs(sum(line[i] * self.P[i] for i in range(3))) / scale


def _norm3(p):
    return math.sqrt(sum(abs(v) ** 2 for v in p)) or 1.0


def _normalize3(p):
    s = max(abs(v) for v in p)
    return tuple(v / s for v in p)


def start_state(A: Conic, B: Conic, x: float = 0.37, branch: int = 0) -> PonceletState:
    """Initial (Q, P): Q = E(x) on A, P an intersection of the tangent with B."""
    E = rational_parameterization(A)
    Q = tuple(complex(v).real for v in E.point(x))
    P = _line_conic_second(B, A.to_float().apply(Q), None, branch)
    if P is None:
        raise NoRealIntersection("tangent at the start point misses the second conic")
    return PonceletState(_normalize3(Q), _normalize3(P))


def _line_conic_second(C: Conic, line, current, branch=0):
    """Intersections of a projective line with a conic; with `current` given,
    the other intersection; None if complex, 'tangent' flagged by caller."""
    Cf = C.to_float()
    l = np.array([float(v) for v in line])
    # basis of the line: two points p, q with l . p = l . q = 0
    idx = int(np.argmax(np.abs(l)))
    others = [i for i in range(3) if i != idx]
    p = np.zeros(3)
    p[others[0]] = 1.0
    p[idx] = -l[others[0]] / l[idx]
    q = np.zeros(3)
    q[others[1]] = 1.0
    q[idx] = -l[others[1]] / l[idx]
    mat = np.array([[float(v) for v in row] for row in Cf.M])
    app = p @ mat @ p
    bpq = p @ mat @ q
    cqq = q @ mat @ q
    # solve a s^2 + 2 b s t + c t^2 = 0 projectively for (s, t)
    disc = bpq * bpq - app * cqq
    scale = max(abs(app), abs(bpq), abs(cqq), 1e-300)
    if disc < -1e-12 * scale * scale:
        return None
    disc = max(disc, 0.0)
    rt = math.sqrt(disc)
    sols = []
    for sgn in (1.0, -1.0):
        s, t = (-bpq + sgn * rt), app
        if abs(s) < 1e-14 * scale and abs(t) < 1e-14 * scale:
            s, t = cqq, (-bpq + sgn * rt)
        sols.append(_normalize3(tuple(s * p + t * q)))
    if current is None:
        return sols[branch % 2]
    d = [_proj_dist3(sol, current) for sol in sols]
    far = sols[0] if d[0] >= d[1] else sols[1]
    if _proj_dist3(sols[0], sols[1]) < 1e-9:
        return "tangent"
    return far


def _proj_dist3(p, q):
    pv = np.array(p) / np.linalg.norm(p)
    qv = np.array(q) / np.linalg.norm(q)
    return min(np.linalg.norm(pv - qv), np.linalg.norm(pv + qv))


def geometric_step(A: Conic, B: Conic, s: PonceletState) -> PonceletState:
    """Extend the tangent at Q to its second meeting with B, then take the
    other tangent to A from that point."""
    line = A.to_float().apply(s.Q)
    P2 = _line_conic_second(B, line, s.P)
    if P2 is None:
        raise NoRealIntersection("tangent line misses the second conic")
    if P2 == "tangent":
        raise TangencyDegenerate("double intersection with the second conic")
    polar = A.to_float().apply(P2)
    Q2 = _line_conic_second(A, polar, s.Q)
    if Q2 is None:
        raise NoRealIntersection("no second tangency point from the new vertex")
    if Q2 == "tangent":
        raise TangencyDegenerate("coincident tangency points")
    return PonceletState(Q2, P2, s.orientation)


def poncelet_period(A: Conic, B: Conic, start: Optional[PonceletState] = None,
                    maxN: int = 64, tol: float = 1e-8) -> Optional[int]:
    """Period of the geometric iteration, None if no closure within maxN."""
    s = start or start_state(A, B)
    cur = s
    for n in range(1, maxN + 1):
        cur = geometric_step(A, B, cur)
        if _proj_dist3(cur.Q, s.Q) < tol and _proj_dist3(cur.P, s.P) < tol:
            return n
    return None


def trajectory(A: Conic, B: Conic, start: Optional[PonceletState] = None, steps: int = 16):
    s = start or start_state(A, B)
    out = [s]
    for _ in range(steps):
        s = geometric_step(A, B, s)
        out.append(s)
    return out


def trajectory_csv(states) -> str:
    lines = ["step,Qx,Qy,Px,Py"]
    for i, s in enumerate(states):
        qx = s.Q[1] / s.Q[0] if s.Q[0] != 0 else math.inf
        qy = s.Q[2] / s.Q[0] if s.Q[0] != 0 else math.inf
        px = s.P[1] / s.P[0] if s.P[0] != 0 else math.inf
        py = s.P[2] / s.P[0] if s.P[0] != 0 else math.inf
        lines.append(f"{i},{qx!r},{qy!r},{px!r},{py!r}")
    return "\n".join(lines) + "\n"


# -- closure criteria ------------------------------------------------------------------


def cayley_polynomial(A: Conic, B: Conic) -> Poly:
    """det(M_A - z M_B), a cubic in z."""
    coeffs = []
    exact = A.is_exact and B.is_exact
    zs = (0, 1, -1, 2) if exact else (0.0, 1.0, -1.0, 2.0)
    vals = []
    for z in zs:
        M = [[A.M[i][j] - z * B.M[i][j] for j in range(3)] for i in range(3)]
        vals.append(_det3x3(M))
    # interpolate the cubic through four samples
    if exact:
        mat = [[Fraction(z) ** p for p in range(4)] for z in zs]
        sol = _solve4(mat, [Fraction(v) for v in vals])
    else:
        mat = np.array([[float(z) ** p for p in range(4)] for z in zs])
        sol = np.linalg.solve(mat, np.array([float(v) for v in vals]))
    return Poly(list(sol))


def _det3x3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _solve4(mat, rhs):
    """Gaussian elimination over the rationals."""
    n = 4
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [v / inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(4)]


@dataclass(frozen=True)
class CayleyVerdict:
    N: int
    determinant: object
    scale: float
    closes: bool
    exact: bool


def cayley_test(A: Conic, B: Conic, N: int, tol: float = 1e-9) -> CayleyVerdict:
    """Hankel-determinant closure test for period N >= 3.

    N = 2p uses the (p-1)x(p-1) matrix on c_3..c_{2p-1}; N = 2p+1 uses the
    p x p matrix on c_2..c_{2p}, with c_j the Taylor coefficients of
    sqrt(det(M_A - z M_B)) at z = 0. The verdict is exact for exact conics
    (the global sqrt(F(0)) factor cannot change a zero determinant).
    """
    if N < 3:
        raise InvalidInput("need N >= 3")
    F = cayley_polynomial(A, B)
    if F(0) == 0:
        raise DegenerateGeometry("det(M_A) = 0: pick the irreducible scaling")
    exact = F.is_exact
    if N % 2 == 0:
        p = N // 2
        lo, hi = 3, 2 * p - 1
    else:
        p = (N - 1) // 2
        lo, hi = 2, 2 * p
    if exact:
        _, series = sqrt_taylor_normalized(F, hi + 1)
        vals = [series.coeff(j) for j in range(lo, hi + 1)]
        det = hankel_det(vals)
        size = (hi - lo) // 2 + 1
        scale = 1.0
        for i in range(size):
            row = [abs(v) for v in vals[i:i + size]]
            scale *= float(max(row)) if max(row) != 0 else 1.0
        return CayleyVerdict(N, det, scale, det == 0, True)
    series = sqrt_taylor(F, hi + 1)
    vals = [complex(series.coeff(j)) for j in range(lo, hi + 1)]
    det = hankel_det(vals)
    size = (hi - lo) // 2 + 1
    # the coefficients decay fast and make raw determinant scales
    # meaningless; judge rank drop through the singular values instead
    mat = np.array([[vals[i + j] for j in range(size)] for i in range(size)])
    sv = np.linalg.svd(mat, compute_uv=False)
    scale = float(sv[0]) if sv[0] > 0 else 1.0
    closes = bool(sv[-1] <= tol * max(scale, 1e-300))
    return CayleyVerdict(N, det, scale, closes, False)


def cayley_first_closure(A: Conic, B: Conic, maxN: int = 12, tol: float = 1e-9):
    """Smallest N <= maxN whose Hankel determinant vanishes, else None."""
    for N in range(3, maxN + 1):
        if cayley_test(A, B, N, tol).closes:
            return N
    return None


# -- bicentric formulas ----------------------------------------------------------------


@dataclass(frozen=True)
class BicentricReport:
    n: int
    lhs: float
    rhs: float
    closes: bool
    relation: str


def bicentric_check(R: float, r: float, d: float, n: int, tol: float = 1e-9) -> BicentricReport:
    """Closure relation for circles of radii R (outer) and r (inner) with
    center distance d: the classical closed forms for n = 3, 4, 5 and the
    general quarter-period relation for any n."""
    if not (R > 0 and r > 0 and d >= 0 and R > r + d):
        raise InvalidGeometry("need R > r + d >= r > 0")
    if n < 3:
        raise InvalidGeometry("need n >= 3")
    a = 1 / (R + d)
    b = 1 / (R - d)
    c = 1 / r
    if n == 3:
        lhs, rhs, rel = a + b, c, "a + b = c"
    elif n == 4:
        lhs, rhs, rel = a * a + b * b, c * c, "a^2 + b^2 = c^2"
    elif n == 5:
        lhs, rhs, rel = 4 * (a ** 3 + b ** 3 + c ** 3), (a + b + c) ** 3, \
            "4(a^3 + b^3 + c^3) = (a + b + c)^3"
    else:
        lhs, rhs, rel = _bicentric_general(a, b, c, n)
    return BicentricReport(n, float(lhs), float(rhs), abs(lhs - rhs) <= tol * max(1.0, abs(rhs)), rel)


def bicentric_general(R: float, r: float, d: float, n: int, tol: float = 1e-9) -> BicentricReport:
    """The quarter-period relation for any n (also covers 3, 4, 5)."""
    if not (R > 0 and r > 0 and d >= 0 and R > r + d):
        raise InvalidGeometry("need R > r + d >= r > 0")
    a, b, c = 1 / (R + d), 1 / (R - d), 1 / r
    lhs, rhs, rel = _bicentric_general(a, b, c, n)
    return BicentricReport(n, lhs, rhs, abs(lhs - rhs) <= tol * max(1.0, abs(rhs)), rel)


def _bicentric_general(a, b, c, n):
    rel = "sc(K/n, k) = (c sqrt(b^2-a^2) + b sqrt(c^2-a^2)) / (a(b+c))"
    rhs = (c * math.sqrt(b * b - a * a) + b * math.sqrt(c * c - a * a)) / (a * (b + c))
    if abs(b - a) < 1e-14 * a:
        # concentric circles: the modulus degenerates to 0 and sc to tan
        return math.tan(math.pi / (2 * n)), rhs, rel
    lam = 1 + 2 * c * c * (a * a - b * b) / (a * a * (b * b - c * c))
    om = math.acosh(lam)
    k = math.sqrt(1 - math.exp(-2 * om))
    em = EllipticModulus.from_k(k)
    lhs = jacobi_ratio("sc", em.K / n, k)
    return lhs, rhs, rel
