"""Polynomials, square-root series, rational functions, Moebius maps.

Two scalar backends run through the whole library:

* exact: int / fractions.Fraction coefficients, used for Hankel
  determinants, continued fractions and certified verdicts;
* float: float / complex coefficients, used for elliptic numerics.

ints are neutral and join either backend; mixing a Fraction with a float in
one operation raises MixedBackend instead of silently coercing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateMobius,
    DegreeMismatch,
    DivisionByZeroFn,
    MixedBackend,
    NonSquareLeading,
    ZeroAtOrigin,
)

FLOAT_TRIM = 1e-13

Scalar = object  # int | Fraction | float | complex


def is_exact_scalar(c) -> bool:
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


def _scalar_mode(c) -> str:
    """'x' exact-only, 'f' float-only, 'n' neutral (int)."""
    if isinstance(c, Fraction):
        return "x"
    if isinstance(c, (float, complex)):
        return "f"
    if isinstance(c, (int, np.integer)):
        return "n"
    raise TypeError(f"unsupported scalar type {type(c)!r}")


def join_modes(*scalars) -> str:
    mode = "n"
    for c in scalars:
        m = _scalar_mode(c)
        if m == "n":
            continue
        if mode == "n":
            mode = m
        elif mode != m:
            raise MixedBackend("exact and floating scalars mixed in one operation")
    return mode


def exact_sqrt(q):
    """Square root of a nonnegative rational if it is rational, else None."""
    q = Fraction(q)
    if q < 0:
        return None
    pn = math.isqrt(q.numerator)
    pd = math.isqrt(q.denominator)
    if pn * pn == q.numerator and pd * pd == q.denominator:
        return Fraction(pn, pd)
    return None


def scalar_sqrt(c):
    """Principal square root, staying exact when possible."""
    if is_exact_scalar(c):
        r = exact_sqrt(c)
        if r is not None:
            return r
        c = float(c)
    if isinstance(c, complex) or (isinstance(c, float) and c < 0):
        return cmath.sqrt(c)
    return math.sqrt(c)


class Poly:
    """Dense univariate polynomial, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim=True):
        coeffs = list(coeffs)
        if trim:
            coeffs = self._trim(coeffs)
        self.coeffs = tuple(coeffs)

    @staticmethod
    def _trim(coeffs):
        if not coeffs:
            return []
        mode = join_modes(*coeffs)
        if mode == "f":
            scale = max((abs(c) for c in coeffs), default=0.0)
            tol = FLOAT_TRIM * scale
            n = len(coeffs)
            while n > 0 and abs(coeffs[n - 1]) <= tol:
                n -= 1
            coeffs = [0.0 if abs(c) <= tol else c for c in coeffs[:n]]
        else:
            n = len(coeffs)
            while n > 0 and coeffs[n - 1] == 0:
                n -= 1
            coeffs = coeffs[:n]
        return coeffs

    # -- basics ---------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return all(is_exact_scalar(c) for c in self.coeffs)

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def lc(self):
        if self.is_zero:
            return 0
        return self.coeffs[-1]

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        join_modes(*self.coeffs, *other.coeffs)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], trim=False)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        join_modes(*self.coeffs, *other.coeffs)
        if self.is_zero or other.is_zero:
            return Poly([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scaled(self, s):
        return Poly([c * s for c in self.coeffs])

    def __divmod__(self, other):
        other = _as_poly(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        mode = join_modes(*self.coeffs, *other.coeffs)
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return Poly([]), self
        quot = [0] * (dq + 1)
        lead = other.coeffs[-1]
        if mode != "f":
            lead = Fraction(lead)
        for i in range(dq, -1, -1):
            c = rem[i + len(other.coeffs) - 1]
            if c == 0:
                continue
            q = c / lead
            quot[i] = q
            for j, b in enumerate(other.coeffs):
                rem[i + j] -= q * b
        return Poly(quot), Poly(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    # -- calculus / composition ------------------------------------------

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def compose(self, other: "Poly") -> "Poly":
        acc = Poly([])
        for c in reversed(self.coeffs):
            acc = acc * other + Poly([c])
        return acc

    def shifted(self, lam) -> "Poly":
        """p(t + lam)."""
        return self.compose(Poly([lam, 1]))

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        lead = self.lc()
        if is_exact_scalar(lead):
            lead = Fraction(lead)
        return Poly([c / lead for c in self.coeffs])

    def to_float(self) -> "Poly":
        return Poly([complex(c).real if complex(c).imag == 0 else complex(c)
                     for c in [float(c) if is_exact_scalar(c) else c for c in self.coeffs]])

    def roots(self):
        """Roots via numpy companion matrix (float backend)."""
        cs = [complex(c) for c in self.coeffs]
        return np.roots(list(reversed(cs)))


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly([x])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals (exact backend only)."""
    if not (a.is_exact and b.is_exact):
        raise MixedBackend("gcd requires exact coefficients")
    a = Poly([Fraction(c) for c in a.coeffs])
    b = Poly([Fraction(c) for c in b.coeffs])
    while not b.is_zero:
        a, b = b, a % b
    return a.monic() if not a.is_zero else a


# -- resultants and discriminants ---------------------------------------------


def _sylvester(p: Poly, q: Poly):
    n, m = p.degree, q.degree
    size = n + m
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(m):
        rows.append([0] * i + pc + [0] * (size - n - 1 - i))
    for i in range(n):
        rows.append([0] * i + qc + [0] * (size - m - 1 - i))
    return rows


def _bareiss_det(rows):
    """Fraction-free elimination; exact for int/Fraction entries."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def resultant(p: Poly, q: Poly):
    if p.degree < 1 or q.degree < 1:
        raise DegreeMismatch("resultant needs degrees >= 1")
    rows = _sylvester(p, q)
    if p.is_exact and q.is_exact:
        return _bareiss_det(rows)
    mat = np.array([[complex(x) for x in row] for row in rows])
    det = np.linalg.det(mat)
    if abs(det.imag) <= 1e-9 * max(1.0, abs(det.real)):
        det = det.real
    return det


def poly_discriminant(p: Poly):
    """Zero iff p has a multiple root; via resultant(p, p')."""
    n = p.degree
    if n < 1:
        raise DegreeMismatch("discriminant needs degree >= 1")
    dp = p.derivative()
    if dp.is_zero:
        return 0
    res = resultant(p, dp)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    lead = p.lc()
    if is_exact_scalar(lead) and p.is_exact:
        return sign * Fraction(res) / Fraction(lead)
    return sign * res / lead


# -- quartic invariants --------------------------------------------------------


def invariants_g2_g3(p: Poly):
    """Classical relative invariants of a binary quartic.

    For b0 x^4 + 4 b1 x^3 + 6 b2 x^2 + 4 b3 x + b4:
        g2 = b0 b4 - 4 b1 b3 + 3 b2^2
        g3 = b0 b2 b4 + 2 b1 b2 b3 - b2^3 - b0 b3^2 - b1^2 b4
    Degree-3 input is treated as a quartic with b0 = 0.
    """
    if p.degree not in (3, 4):
        raise DegreeMismatch(f"need degree 3 or 4, got {p.degree}")
    exact = p.is_exact
    div = (lambda c, d: Fraction(c, d)) if exact else (lambda c, d: c / d)
    b0 = p.coeff(4)
    b1 = div(p.coeff(3), 4)
    b2 = div(p.coeff(2), 6)
    b3 = div(p.coeff(1), 4)
    b4 = p.coeff(0)
    g2 = b0 * b4 - 4 * b1 * b3 + 3 * b2 ** 2
    g3 = b0 * b2 * b4 + 2 * b1 * b2 * b3 - b2 ** 3 - b0 * b3 ** 2 - b1 ** 2 * b4
    return g2, g3


# -- Moebius maps --------------------------------------------------------------


@dataclass(frozen=True)
class Mobius:
    """x -> (mu x + nu) / (xi x + eta)."""

    mu: Scalar
    nu: Scalar
    xi: Scalar
    eta: Scalar

    def __post_init__(self):
        if self.det() == 0:
            raise DegenerateMobius("zero determinant")

    def det(self):
        return self.mu * self.eta - self.nu * self.xi

    def __call__(self, x):
        if x == math.inf or x == -math.inf or (isinstance(x, complex) and cmath.isinf(x)):
            if self.xi == 0:
                return math.inf
            return self.mu / self.xi
        den = self.xi * x + self.eta
        if den == 0:
            return math.inf
        return (self.mu * x + self.nu) / den

    def inverse(self) -> "Mobius":
        return Mobius(self.eta, -self.nu, -self.xi, self.mu)

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other: x -> self(other(x))."""
        return Mobius(
            self.mu * other.mu + self.nu * other.xi,
            self.mu * other.nu + self.nu * other.eta,
            self.xi * other.mu + self.eta * other.xi,
            self.xi * other.nu + self.eta * other.eta,
        )

    @staticmethod
    def identity() -> "Mobius":
        return Mobius(1, 0, 0, 1)


def mobius_weighted_transform(p: Poly, m: Mobius) -> Poly:
    """(xi x + eta)^4 * p((mu x + nu)/(xi x + eta)) for a quartic p."""
    if p.degree > 4:
        raise DegreeMismatch("weighted transform defined for degree <= 4")
    num = Poly([m.nu, m.mu])
    den = Poly([m.eta, m.xi])
    out = Poly([])
    for i in range(5):
        c = p.coeff(i)
        if c == 0:
            continue
        out = out + (num ** i) * (den ** (4 - i)).scaled(c)
    return out


# -- square-root series ---------------------------------------------------------


class LaurentSeries:
    """Finite window of a (Laurent) series.

    ``orientation=+1``: sum_j c_j t^j (Taylor at the origin);
    ``orientation=-1``: sum_j c_j t^(-j) (expansion at infinity, so the
    index -2 entry is the coefficient of t^2).
    ``coeff(j)`` indexes by j in either case.
    """

    __slots__ = ("lo", "coeffs", "orientation")

    def __init__(self, lo: int, coeffs, orientation: int = 1):
        self.lo = lo
        self.coeffs = tuple(coeffs)
        self.orientation = orientation

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    def coeff(self, j: int):
        if self.lo <= j <= self.hi:
            return self.coeffs[j - self.lo]
        return 0

    def square_coeff(self, j: int):
        """Index-j coefficient of the square of the stored window."""
        acc = 0
        for i in range(self.lo, self.hi + 1):
            k = j - i
            if self.lo <= k <= self.hi:
                acc += self.coeffs[i - self.lo] * self.coeffs[k - self.lo]
        return acc

    def __repr__(self):
        return f"LaurentSeries(lo={self.lo}, coeffs={list(self.coeffs)!r}, orientation={self.orientation})"


def sqrt_series_one_plus(u, n: int):
    """Coefficients s_0..s_n of sqrt(1 + u1 z + u2 z^2 + ...), s_0 = 1.

    u is a sequence with u[0] the coefficient of z. Exact over Fractions
    when the input is exact.
    """
    exact = all(is_exact_scalar(c) for c in u)
    one = Fraction(1) if exact else 1.0
    s = [one]
    for k in range(1, n + 1):
        acc = u[k - 1] if k - 1 < len(u) else 0
        for i in range(1, k):
            acc = acc - s[i] * s[k - i]
        if exact:
            s.append(Fraction(acc, 2))
        else:
            s.append(acc / 2)
    return s


def sqrt_taylor(p: Poly, n: int) -> LaurentSeries:
    """Taylor series of sqrt(p) at the origin, indices 0..n.

    c_0 is the principal square root of p(0); the square of the returned
    window matches p through degree n.
    """
    p0 = p(0)
    if p0 == 0:
        raise ZeroAtOrigin("p(0) = 0")
    if p.is_exact:
        q = [Fraction(c, p0) for c in p.coeffs[1:]]
    else:
        q = [c / p0 for c in p.coeffs[1:]]
    s = sqrt_series_one_plus(q, n)
    c0 = scalar_sqrt(p0)
    if is_exact_scalar(c0):
        coeffs = [c0 * si for si in s]
    else:
        coeffs = [c0 * complex(si) for si in s]
    return LaurentSeries(0, coeffs, orientation=1)


def sqrt_taylor_normalized(p: Poly, n: int):
    """(p(0), series of sqrt(p / p(0))): rational window for exact p.

    Hankel zero-tests are invariant under the global sqrt(p(0)) factor,
    which is how exact verdicts stay in the rationals even when p(0) < 0.
    """
    p0 = p(0)
    if p0 == 0:
        raise ZeroAtOrigin("p(0) = 0")
    if p.is_exact:
        q = [Fraction(c, p0) for c in p.coeffs[1:]]
    else:
        q = [c / p0 for c in p.coeffs[1:]]
    return p0, LaurentSeries(0, sqrt_series_one_plus(q, n), orientation=1)


def sqrt_laurent_inf(R: Poly, n: int) -> LaurentSeries:
    """Series of sqrt(R) at infinity for a quartic R, window -2..n+2.

    coeff(j) is the coefficient of t^(-j); for monic R, coeff(-2) = 1.
    The extra two guard terms make the square of the stored window match R
    through index n. Exact backend requires the leading coefficient to be a
    perfect square.
    """
    if R.degree != 4:
        raise DegreeMismatch(f"need degree 4, got {R.degree}")
    lead = R.lc()
    if R.is_exact:
        root = exact_sqrt(lead)
        if root is None:
            raise NonSquareLeading("leading coefficient is not a rational square")
        u = [Fraction(R.coeff(3 - i), lead) for i in range(4)]
    else:
        root = scalar_sqrt(complex(lead)) if (isinstance(lead, complex) or lead < 0) else math.sqrt(lead)
        u = [R.coeff(3 - i) / lead for i in range(4)]
    s = sqrt_series_one_plus(u, n + 4)
    coeffs = [root * si for si in s]
    return LaurentSeries(-2, coeffs, orientation=-1)


# -- rational functions ----------------------------------------------------------


class RationalFn:
    """num/den with gcd-reduction and monic denominator in exact mode."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=Poly([1]), normalize=True):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero:
            raise DivisionByZeroFn("zero denominator")
        if normalize and num.is_exact and den.is_exact:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num // g
                den = den // g
            lead = Fraction(den.lc())
            num = Poly([Fraction(c) / lead for c in num.coeffs])
            den = Poly([Fraction(c) / lead for c in den.coeffs])
        self.num = num
        self.den = den

    @property
    def is_exact(self):
        return self.num.is_exact and self.den.is_exact

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            return math.inf
        return self.num(x) / d

    def __add__(self, other):
        other = _as_rational(other)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-_as_rational(other))

    def __rsub__(self, other):
        return _as_rational(other) + (-self)

    def __mul__(self, other):
        other = _as_rational(other)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rational(other)
        if other.num.is_zero:
            raise DivisionByZeroFn("division by the zero function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_rational(other) / self

    def derivative(self) -> "RationalFn":
        return RationalFn(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def compose(self, other: "RationalFn") -> "RationalFn":
        """self(other(x))."""
        other = _as_rational(other)
        n = max(self.num.degree, self.den.degree, 0)
        dpow = [Poly([1])]
        npow = [Poly([1])]
        for _ in range(n):
            dpow.append(dpow[-1] * other.den)
            npow.append(npow[-1] * other.num)
        num = Poly([])
        den = Poly([])
        for i in range(n + 1):
            cn = self.num.coeff(i)
            cd = self.den.coeff(i)
            if cn != 0:
                num = num + (npow[i] * dpow[n - i]).scaled(cn)
            if cd != 0:
                den = den + (npow[i] * dpow[n - i]).scaled(cd)
        return RationalFn(num, den)

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __repr__(self):
        return f"RationalFn({self.num!r}, {self.den!r})"


def _as_rational(x) -> RationalFn:
    if isinstance(x, RationalFn):
        return x
    if isinstance(x, Poly):
        return RationalFn(x)
    return RationalFn(Poly([x]))


# -- small helpers used across modules -------------------------------------------


def hankel_det(values):
    """Determinant of the Hankel matrix H[i][j] = values[i + j].

    values has odd length 2p-1 for a p x p matrix. Exact when entries are
    exact, numpy otherwise.
    """
    m = len(values)
    if m % 2 == 0:
        raise DegreeMismatch("need an odd number of antidiagonal values")
    p = (m + 1) // 2
    rows = [[values[i + j] for j in range(p)] for i in range(p)]
    if all(is_exact_scalar(v) for v in values):
        return _bareiss_det(rows)
    mat = np.array([[complex(v) for v in row] for row in rows])
    det = np.linalg.det(mat)
    if abs(det.imag) <= 1e-9 * max(1.0, abs(det.real)):
        det = det.real
    return det


def chebyshev_T(n: int) -> Poly:
    """Chebyshev polynomial of the first kind, exact integer coefficients."""
    a, b = Poly([1]), Poly([0, 1])
    if n == 0:
        return a
    for _ in range(n - 1):
        a, b = b, Poly([0, 2]) * b - a
    return b
