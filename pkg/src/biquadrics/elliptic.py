"""Numerical elliptic special functions.

Complete integrals via the AGM; Jacobi functions on complex arguments and
Weierstrass wp/zeta/sigma via theta series with argument and lattice-basis
reduction; period <-> invariant conversion.

Points closer than ``POLE_TOL`` (lattice metric) to a pole yield the
explicit ``POLE`` marker; downstream code branches on ``is_pole`` instead of
consuming NaNs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateLattice,
    InvalidInput,
    LatticePole,
    NoSolution,
    SingularModulus,
)

POLE_TOL = 1e-8
_THETA_EPS = 1e-17
_THETA_MAX_TERMS = 80


class _Pole:
    __slots__ = ()

    def __repr__(self):
        return "POLE"


POLE = _Pole()


def is_pole(x) -> bool:
    return x is POLE


# -- arithmetic-geometric mean and complete integrals --------------------------


def agm(a, b):
    """AGM with the standard branch choice for complex arguments."""
    a, b = complex(a), complex(b)
    for _ in range(64):
        if abs(a - b) <= 1e-17 * max(abs(a), 1e-300):
            break
        an = 0.5 * (a + b)
        bn = cmath.sqrt(a * b)
        if abs(an - bn) > abs(an + bn):
            bn = -bn
        a, b = an, bn
    return 0.5 * (a + b)


def ellip_K(k):
    """Complete integral K(k), modulus convention. Real for real 0 <= k < 1."""
    k2 = k * k
    if k2 == 1:
        raise SingularModulus("k^2 = 1")
    kp = cmath.sqrt(1 - k2)
    val = cmath.pi / (2 * agm(1.0, kp))
    if not isinstance(k, complex) and -1 < k2 < 1:
        return val.real
    return val


# -- theta functions ------------------------------------------------------------


def _theta(z, q, which: int):
    """theta_1..theta_4 at argument z, nome q; plain series."""
    z = complex(z)
    if which in (1, 2):
        total = 0j
        for n in range(_THETA_MAX_TERMS):
            amp = q ** ((n + 0.5) ** 2)
            if which == 1:
                term = amp * cmath.sin((2 * n + 1) * z)
                total += term if n % 2 == 0 else -term
            else:
                total += amp * cmath.cos((2 * n + 1) * z)
            if abs(amp) < _THETA_EPS and n > 2:
                break
        return 2 * total
    total = 1 + 0j
    for n in range(1, _THETA_MAX_TERMS):
        amp = q ** (n * n)
        term = 2 * amp * cmath.cos(2 * n * z)
        if which == 4 and n % 2 == 1:
            term = -term
        total += term
        if abs(amp) < _THETA_EPS and n > 2:
            break
    return total


def _theta1_derivs(z, q, order: int):
    """[theta1, theta1', ..., theta1^(order)] with respect to z."""
    z = complex(z)
    out = [0j] * (order + 1)
    for n in range(_THETA_MAX_TERMS):
        m = 2 * n + 1
        amp = q ** ((n + 0.5) ** 2)
        if n % 2 == 1:
            amp = -amp
        s, c = cmath.sin(m * z), cmath.cos(m * z)
        cyc = (s, c, -s, -c)
        for d in range(order + 1):
            out[d] += amp * (m ** d) * cyc[d % 4]
        if abs(amp) < _THETA_EPS and n > 2:
            break
    return [2 * v for v in out]


# -- Jacobi functions ------------------------------------------------------------


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus k with complement and quarter periods."""

    k: float
    k_prime: float
    K: float
    K_prime: float

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        if not 0 < k < 1:
            raise SingularModulus(f"need 0 < k < 1, got {k}")
        kp = math.sqrt(1 - k * k)
        return cls(k, kp, float(ellip_K(k)), float(ellip_K(kp)))

    @property
    def nome(self) -> float:
        return math.exp(-math.pi * self.K_prime / self.K)


@lru_cache(maxsize=256)
def _jacobi_setup(k: float):
    em = EllipticModulus.from_k(k)
    q = em.nome
    t2 = _theta(0.0, q, 2)
    t3 = _theta(0.0, q, 3)
    t4 = _theta(0.0, q, 4)
    return em, q, t2, t3, t4


# code -> (numerator theta, denominator theta)
_RATIO_TABLE = {
    "sn": (1, 4), "cn": (2, 4), "dn": (3, 4),
    "sc": (1, 2), "ns": (4, 1), "cs": (2, 1), "ds": (3, 1),
    "nd": (4, 3), "nc": (4, 2), "sd": (1, 3), "cd": (2, 3),
}

# parity of each theta under z -> z + pi and z -> z + pi tau
# (the exponential quasi-period factor cancels in every ratio)
_PI_PARITY = {1: -1, 2: -1, 3: 1, 4: 1}
_PITAU_PARITY = {1: -1, 2: 1, 3: 1, 4: -1}


def _ratio_constant(code, t2, t3, t4):
    return {
        "sn": t3 / t2, "cn": t4 / t2, "dn": t4 / t3,
        "sc": t3 / t4, "ns": t2 / t3, "cs": t4 / t3,
        "ds": (t2 / t3) * (t4 / t3), "nd": t3 / t4, "nc": t2 / t4,
        "sd": (t3 / t2) * (t3 / t4), "cd": t3 / t2,
    }[code]


def _theta_zero(which: int, tau: complex) -> complex:
    return {1: 0j, 2: cmath.pi / 2, 3: cmath.pi / 2 + cmath.pi * tau / 2,
            4: cmath.pi * tau / 2}[which]


def _jacobi_core(code: str, u, k: float):
    if code not in _RATIO_TABLE:
        raise InvalidInput(f"unknown ratio code {code!r}")
    em, q, t2, t3, t4 = _jacobi_setup(k)
    z = complex(u) * math.pi / (2 * em.K)
    tau = complex(0, em.K_prime / em.K)
    m = round(z.imag / (math.pi * tau.imag))
    z1 = z - m * cmath.pi * tau
    n = round(z1.real / math.pi)
    z2 = z1 - n * math.pi
    num_i, den_i = _RATIO_TABLE[code]
    # distance (in u units) from the nearest pole of the ratio
    dz = z2 - _theta_zero(den_i, tau)
    dz -= round(dz.imag / (math.pi * tau.imag)) * cmath.pi * tau
    dz -= round(dz.real / math.pi) * math.pi
    if abs(dz) * 2 * em.K / math.pi < POLE_TOL:
        return POLE
    sign = (_PI_PARITY[num_i] * _PI_PARITY[den_i]) ** (n % 2)
    sign *= (_PITAU_PARITY[num_i] * _PITAU_PARITY[den_i]) ** (m % 2)
    val = sign * _ratio_constant(code, t2, t3, t4) * _theta(z2, q, num_i) / _theta(z2, q, den_i)
    if not isinstance(u, complex):
        val = complex(val)
        if abs(val.imag) < 1e-12 * max(1.0, abs(val.real)):
            return val.real
    return val


def jacobi(u, k):
    """(sn, cn, dn) for real or complex u, real modulus 0 <= k <= 1."""
    if k == 0:
        if isinstance(u, complex):
            return cmath.sin(u), cmath.cos(u), 1.0 + 0j
        return math.sin(u), math.cos(u), 1.0
    if k == 1:
        if isinstance(u, complex):
            return cmath.tanh(u), 1 / cmath.cosh(u), 1 / cmath.cosh(u)
        return math.tanh(u), 1 / math.cosh(u), 1 / math.cosh(u)
    sn = _jacobi_core("sn", u, k)
    if is_pole(sn):
        return POLE, POLE, POLE
    return sn, _jacobi_core("cn", u, k), _jacobi_core("dn", u, k)


def jacobi_ratio(code: str, u, k):
    """Any of sn, cn, dn, sc, ns, cs, ds, nd, nc, sd, cd; poles propagate."""
    if k == 0:
        table = {
            "sn": lambda v: _c(cmath.sin, math.sin, v),
            "cn": lambda v: _c(cmath.cos, math.cos, v),
            "dn": lambda v: 1.0,
            "sc": lambda v: _c(cmath.tan, math.tan, v),
            "ns": lambda v: 1 / _c(cmath.sin, math.sin, v),
            "cs": lambda v: 1 / _c(cmath.tan, math.tan, v),
            "ds": lambda v: 1 / _c(cmath.sin, math.sin, v),
            "nd": lambda v: 1.0,
            "nc": lambda v: 1 / _c(cmath.cos, math.cos, v),
            "sd": lambda v: _c(cmath.sin, math.sin, v),
            "cd": lambda v: _c(cmath.cos, math.cos, v),
        }
        if code not in table:
            raise InvalidInput(f"unknown ratio code {code!r}")
        return table[code](u)
    return _jacobi_core(code, u, k)


def _c(fc, fr, v):
    return fc(v) if isinstance(v, complex) else fr(v)


def invert_sc_min_positive(v: float, k: float):
    """Minimal positive theta with sc(theta, k) = v; lies in (0, K)."""
    if not v > 0:
        raise NoSolution(f"need v > 0, got {v}")
    if k == 0:
        return math.atan(v)
    em = EllipticModulus.from_k(k)

    def f(th):
        val = _jacobi_core("sc", th, k)
        if is_pole(val):
            return math.inf
        return val - v

    lo, hi = 1e-14, em.K * (1 - 1e-13)
    if f(hi) < 0:
        raise NoSolution("v beyond the sc range on (0, K)")
    return brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)


# -- Weierstrass functions --------------------------------------------------------


def _reduce_basis(w1, w2):
    """Gauss-reduce the lattice basis so tau = w2/w1 is well inside H."""
    w1, w2 = complex(w1), complex(w2)
    if w1 == 0 or w2 == 0:
        raise DegenerateLattice("zero half-period")
    tau = w2 / w1
    if tau.imag == 0:
        raise DegenerateLattice("real period ratio")
    if tau.imag < 0:
        w2 = -w2
    for _ in range(64):
        tau = w2 / w1
        n = round(tau.real)
        if n != 0:
            w2 = w2 - n * w1
            tau = w2 / w1
        if abs(tau) < 1 - 1e-15:
            w1, w2 = w2, -w1
        else:
            break
    return w1, w2


@lru_cache(maxsize=256)
def _lattice_data(w1: complex, w2: complex):
    tau = w2 / w1
    q = cmath.exp(1j * cmath.pi * tau)
    d = _theta1_derivs(0.0, q, 3)
    eta1 = -(cmath.pi ** 2) / (12 * w1) * d[3] / d[1]
    eta2 = (eta1 * w2 - 1j * cmath.pi / 2) / w1
    return q, eta1, eta2, d[1]


@dataclass(frozen=True)
class WeierstrassData:
    """Invariants plus a reduced half-period basis for one lattice."""

    g2: complex
    g3: complex
    omega1: complex
    omega2: complex

    @classmethod
    def from_periods(cls, omega1, omega2) -> "WeierstrassData":
        w1, w2 = _reduce_basis(omega1, omega2)
        g2, g3 = invariants_from_periods(w1, w2)
        return cls(g2, g3, w1, w2)

    @classmethod
    def from_invariants(cls, g2, g3) -> "WeierstrassData":
        w1, w2 = _reduce_basis(*periods_from_invariants(g2, g3))
        return cls(complex(g2), complex(g3), w1, w2)

    @property
    def tau(self) -> complex:
        return self.omega2 / self.omega1

    def _data(self):
        return _lattice_data(complex(self.omega1), complex(self.omega2))

    @property
    def nome(self) -> complex:
        return self._data()[0]

    @property
    def eta1(self) -> complex:
        return self._data()[1]

    @property
    def eta2(self) -> complex:
        return self._data()[2]

    def lattice_coords(self, z):
        """Real (alpha, beta) with z = 2 alpha omega1 + 2 beta omega2."""
        z = complex(z) / self.omega1
        t = self.tau
        b = z.imag / t.imag / 2
        a = (z.real - 2 * b * t.real) / 2
        return a, b

    def reduce(self, z):
        """(z_red, m, n) with z = z_red + 2 m omega1 + 2 n omega2."""
        a, b = self.lattice_coords(z)
        m, n = round(a), round(b)
        return complex(z) - 2 * m * self.omega1 - 2 * n * self.omega2, m, n

    def lattice_scale(self) -> float:
        return min(abs(self.omega1), abs(self.omega2), abs(self.omega1 + self.omega2),
                   abs(self.omega1 - self.omega2))


def _log_theta1_derivs(wd: WeierstrassData, v, order: int):
    d = _theta1_derivs(v, wd.nome, order)
    t = d[0]
    if abs(t) < 1e-290:
        raise LatticePole("argument at a lattice point")
    l1 = d[1] / t
    if order == 1:
        return (l1,)
    l2 = d[2] / t - l1 * l1
    if order == 2:
        return (l1, l2)
    l3 = d[3] / t - 3 * (d[2] / t) * l1 + 2 * l1 ** 3
    return (l1, l2, l3)


def wp(z, wd: WeierstrassData):
    """Weierstrass elliptic function; POLE near lattice points."""
    zr, _, _ = wd.reduce(z)
    if abs(zr) < POLE_TOL * wd.lattice_scale():
        return POLE
    v = cmath.pi * zr / (2 * wd.omega1)
    _, l2 = _log_theta1_derivs(wd, v, 2)
    return -wd.eta1 / wd.omega1 - (cmath.pi / (2 * wd.omega1)) ** 2 * l2


def wp_prime(z, wd: WeierstrassData):
    zr, _, _ = wd.reduce(z)
    if abs(zr) < POLE_TOL * wd.lattice_scale():
        return POLE
    v = cmath.pi * zr / (2 * wd.omega1)
    _, _, l3 = _log_theta1_derivs(wd, v, 3)
    return -((cmath.pi / (2 * wd.omega1)) ** 3) * l3


def w_zeta(z, wd: WeierstrassData):
    zr, m, n = wd.reduce(z)
    if abs(zr) < POLE_TOL * wd.lattice_scale():
        return POLE
    v = cmath.pi * zr / (2 * wd.omega1)
    (l1,) = _log_theta1_derivs(wd, v, 1)
    base = wd.eta1 * zr / wd.omega1 + cmath.pi / (2 * wd.omega1) * l1
    return base + 2 * m * wd.eta1 + 2 * n * wd.eta2


def w_sigma(z, wd: WeierstrassData):
    """Entire; sigma(0) = 0 exactly."""
    zr, m, n = wd.reduce(z)
    q, eta1, eta2, t1p0 = wd._data()
    v = cmath.pi * zr / (2 * wd.omega1)
    t1 = _theta1_derivs(v, q, 0)[0]
    base = (2 * wd.omega1 / cmath.pi) * cmath.exp(eta1 * zr * zr / (2 * wd.omega1)) * t1 / t1p0
    if m == 0 and n == 0:
        return base
    fac = (-1) ** (m + n + m * n)
    expo = (2 * m * eta1 + 2 * n * eta2) * (zr + m * wd.omega1 + n * wd.omega2)
    return fac * base * cmath.exp(expo)


def invariants_from_periods(omega1, omega2):
    """(g2, g3) from half-periods, via wp at the half-periods."""
    w1, w2 = _reduce_basis(omega1, omega2)
    wd = WeierstrassData(0j, 0j, w1, w2)
    e1 = wp(w1, wd)
    e2 = wp(w2, wd)
    e3 = wp(w1 + w2, wd)
    g2 = -4 * (e1 * e2 + e2 * e3 + e3 * e1)
    g3 = 4 * e1 * e2 * e3
    return g2, g3


def periods_from_invariants(g2, g3):
    """Half-periods (omega1, omega2) of the lattice with 4t^3 - g2 t - g3."""
    g2c, g3c = complex(g2), complex(g3)
    disc = g2c ** 3 - 27 * g3c ** 2
    if abs(disc) < 1e-14 * max(1.0, abs(g2c) ** 3, abs(g3c) ** 2):
        raise DegenerateLattice("g2^3 - 27 g3^2 = 0")
    roots = np.roots([4, 0, -g2c, -g3c])
    best = None
    for i in range(3):
        for j in range(3):
            if j == i:
                continue
            e1, e2, e3 = roots[i], roots[j], roots[3 - i - j]
            a1 = agm(cmath.sqrt(e1 - e3), cmath.sqrt(e1 - e2))
            a2 = agm(cmath.sqrt(e1 - e3), cmath.sqrt(e2 - e3))
            if a1 == 0 or a2 == 0:
                continue
            w1 = cmath.pi / (2 * a1)
            w2 = 1j * cmath.pi / (2 * a2)
            if (w2 / w1).imag < 0:
                w2 = -w2
            try:
                G2, G3 = invariants_from_periods(w1, w2)
            except (DegenerateLattice, LatticePole):
                continue
            err = abs(G2 - g2c) / max(1.0, abs(g2c)) + abs(G3 - g3c) / max(1.0, abs(g3c))
            if best is None or err < best[0]:
                best = (err, w1, w2)
    if best is None or best[0] > 1e-8:
        raise DegenerateLattice("no period basis reproduces the invariants")
    return best[1], best[2]
