import cmath
import math
import random

import numpy as np
import pytest
import scipy.integrate
import scipy.special

from biquadrics.elliptic import (
    POLE,
    EllipticModulus,
    WeierstrassData,
    ellip_K,
    invariants_from_periods,
    invert_sc_min_positive,
    is_pole,
    jacobi,
    jacobi_ratio,
    periods_from_invariants,
    w_sigma,
    w_zeta,
    wp,
    wp_prime,
)
from biquadrics.errors import NoSolution, SingularModulus


def quad_K(k):
    """Independent oracle: adaptive quadrature of the defining integral
    (t = sin(phi) removes the endpoint singularity)."""
    f = lambda phi: 1.0 / math.sqrt(1 - (k * math.sin(phi)) ** 2)
    val, _ = scipy.integrate.quad(f, 0, math.pi / 2, epsabs=1e-13, epsrel=1e-13)
    return val


def test_K_at_zero():
    assert abs(ellip_K(0.0) - math.pi / 2) < 1e-14


def test_K_self_complementary():
    k = 1 / math.sqrt(2)
    assert abs(ellip_K(k) - ellip_K(math.sqrt(1 - k * k))) < 1e-13


@pytest.mark.parametrize("k", [0.3, 0.8, 0.95])
def test_K_against_quadrature(k):
    assert abs(ellip_K(k) - quad_K(k)) < 1e-12 * quad_K(k)


def test_K_singular():
    with pytest.raises(SingularModulus):
        ellip_K(1.0)


def test_jacobi_at_zero():
    sn, cn, dn = jacobi(0.0, 0.7)
    assert abs(sn) < 1e-15 and abs(cn - 1) < 1e-13 and abs(dn - 1) < 1e-13


def test_jacobi_degenerate_modulus():
    u = 0.83
    sn, cn, dn = jacobi(u, 0.0)
    assert (sn, cn, dn) == (math.sin(u), math.cos(u), 1.0)


def test_jacobi_at_K():
    for k in (0.2, 0.6, 0.9):
        em = EllipticModulus.from_k(k)
        sn, cn, dn = jacobi(em.K, k)
        assert abs(sn - 1) < 1e-12
        assert abs(cn) < 1e-12
        assert abs(dn - em.k_prime) < 1e-12


def test_jacobi_against_scipy_real_grid():
    for k in (0.15, 0.5, 0.85):
        m = k * k
        for u in np.linspace(-6, 6, 41):
            sn, cn, dn, _ = scipy.special.ellipj(u, m)
            s, c, d = jacobi(float(u), k)
            assert abs(s - sn) < 1e-11
            assert abs(c - cn) < 1e-11
            assert abs(d - dn) < 1e-11


def test_jacobi_identities_complex_grid():
    k = 0.6
    em = EllipticModulus.from_k(k)
    for x in np.linspace(-1.9, 1.9, 9):
        for y in np.linspace(-0.9, 0.9, 9):
            u = complex(x * em.K, y * em.K_prime)
            sn, cn, dn = jacobi(u, k)
            if is_pole(sn):
                continue
            assert abs(sn * sn + cn * cn - 1) < 1e-12
            assert abs(dn * dn + k * k * sn * sn - 1) < 1e-12


def test_jacobi_periodicity():
    k = 0.45
    em = EllipticModulus.from_k(k)
    u = 0.37 + 0.21j
    s1, _, _ = jacobi(u, k)
    s2, _, _ = jacobi(u + 4 * em.K, k)
    s3, _, _ = jacobi(u + 2j * em.K_prime, k)
    assert abs(s1 - s2) < 1e-12
    assert abs(s1 - s3) < 1e-12


def test_jacobi_complex_split_cross_check():
    """Independent oracle: real/imaginary addition split with complementary
    modulus versus the direct complex evaluation."""
    k = 0.7
    kp = math.sqrt(1 - k * k)
    rng = random.Random(11)
    for _ in range(25):
        x = rng.uniform(-3, 3)
        y = rng.uniform(-0.8, 0.8)
        s, c, d = jacobi(x, k)
        s1, c1, d1 = jacobi(y, kp)
        den = c1 * c1 + (k * s * s1) ** 2
        if abs(den) < 1e-6:
            continue
        sn_ref = (s * d1 + 1j * c * d * s1 * c1) / den
        cn_ref = (c * c1 - 1j * s * d * s1 * d1) / den
        dn_ref = (d * c1 * d1 - 1j * k * k * s * c * s1) / den
        sn, cn, dn = jacobi(complex(x, y), k)
        assert abs(sn - sn_ref) < 1e-11
        assert abs(cn - cn_ref) < 1e-11
        assert abs(dn - dn_ref) < 1e-11


def test_jacobi_pole_marker():
    k = 0.5
    em = EllipticModulus.from_k(k)
    sn, cn, dn = jacobi(complex(0, em.K_prime), k)
    assert is_pole(sn) and is_pole(cn) and is_pole(dn)
    # the ratio ns is finite (zero) at that point
    assert abs(jacobi_ratio("ns", complex(0, em.K_prime), k)) < 1e-8


def test_jacobi_ratio_values():
    k = 0.6
    em = EllipticModulus.from_k(k)
    assert abs(jacobi_ratio("sc", 0.0, k)) < 1e-14
    assert abs(jacobi_ratio("ns", em.K, k) - 1) < 1e-12
    assert abs(jacobi_ratio("sc", 0.3, 0.0) - math.tan(0.3)) < 1e-14
    # cross-check every code against sn, cn, dn at a generic point
    u = 0.77
    s, c, d = jacobi(u, k)
    expect = {"sc": s / c, "ns": 1 / s, "cs": c / s, "ds": d / s,
              "nd": 1 / d, "nc": 1 / c, "sd": s / d, "cd": c / d}
    for code, ref in expect.items():
        assert abs(jacobi_ratio(code, u, k) - ref) < 1e-12, code


def test_invert_sc():
    th = invert_sc_min_positive(math.tan(0.3), 0.0)
    assert abs(th - 0.3) < 1e-12
    k = 0.6
    th = invert_sc_min_positive(1.0, k)
    em = EllipticModulus.from_k(k)
    assert 0 < th < em.K
    assert abs(jacobi_ratio("sc", th, k) - 1.0) < 1e-12
    # bisection oracle
    lo, hi = 0.0, em.K * (1 - 1e-12)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if jacobi_ratio("sc", mid, k) < 1.0:
            lo = mid
        else:
            hi = mid
    assert abs(th - 0.5 * (lo + hi)) < 1e-10
    with pytest.raises(NoSolution):
        invert_sc_min_positive(-1.0, 0.5)


# -- Weierstrass ------------------------------------------------------------------


def wd_example():
    return WeierstrassData.from_invariants(5.0, 2.0)


def test_wp_leading_term():
    wd = wd_example()
    z = 1e-3
    assert abs(wp(z, wd) * z * z - 1) < 1e-5


def test_wp_differential_equation():
    wd = wd_example()
    rng = random.Random(5)
    for _ in range(20):
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        p = wp(z, wd)
        if is_pole(p):
            continue
        dp = wp_prime(z, wd)
        lhs = dp * dp
        rhs = 4 * p ** 3 - wd.g2 * p - wd.g3
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_wp_periodicity_and_zeta_oddness():
    wd = wd_example()
    z = 0.31 + 0.17j
    assert abs(wp(z, wd) - wp(z + 2 * wd.omega1, wd)) < 1e-9
    assert abs(wp(z, wd) - wp(z + 2 * wd.omega2, wd)) < 1e-9
    assert abs(w_zeta(-z, wd) + w_zeta(z, wd)) < 1e-10


def test_zeta_derivative_is_minus_wp():
    wd = wd_example()
    h = 1e-5
    for z in (0.4 + 0.2j, -0.3 + 0.6j):
        fd = (w_zeta(z + h, wd) - w_zeta(z - h, wd)) / (2 * h)
        assert abs(fd + wp(z, wd)) < 1e-7


def test_log_sigma_derivative_is_zeta():
    wd = wd_example()
    h = 1e-5
    z = 0.52 + 0.11j
    fd = (cmath.log(w_sigma(z + h, wd)) - cmath.log(w_sigma(z - h, wd))) / (2 * h)
    assert abs(fd - w_zeta(z, wd)) < 1e-7


def test_sigma_quasi_periodicity():
    wd = wd_example()
    z = 0.23 + 0.41j
    lhs = w_sigma(z + 2 * wd.omega1, wd)
    rhs = -w_sigma(z, wd) * cmath.exp(2 * wd.eta1 * (z + wd.omega1))
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_wp_duplication():
    wd = wd_example()
    z = 0.37 + 0.05j
    p = wp(z, wd)
    dp = wp_prime(z, wd)
    ddp = 6 * p * p - wd.g2 / 2
    dup = -2 * p + (ddp / dp) ** 2 / 4
    assert abs(wp(2 * z, wd) - dup) <= 1e-8 * max(1.0, abs(dup))


def test_wp_pole_marker():
    wd = wd_example()
    assert is_pole(wp(0.0, wd))
    assert is_pole(wp(2 * wd.omega1 + 1e-12, wd))


def test_lattice_shapes():
    # lemniscatic: square lattice
    wd = WeierstrassData.from_invariants(1.0, 0.0)
    ratio = wd.omega2 / wd.omega1
    assert abs(abs(ratio) - 1) < 1e-9 and abs(ratio.real) < 1e-9
    # equianharmonic: hexagonal lattice
    wd = WeierstrassData.from_invariants(0.0, 1.0)
    ratio = wd.omega2 / wd.omega1
    assert abs(abs(ratio) - 1) < 1e-9
    assert abs(abs(ratio.real) - 0.5) < 1e-9


def test_period_invariant_roundtrip():
    rng = random.Random(9)
    for _ in range(10):
        g2 = rng.uniform(-4, 4)
        g3 = rng.uniform(-2, 2)
        if abs(g2 ** 3 - 27 * g3 ** 2) < 1e-3:
            continue
        w1, w2 = periods_from_invariants(g2, g3)
        G2, G3 = invariants_from_periods(w1, w2)
        assert abs(G2 - g2) <= 1e-9 * max(1.0, abs(g2))
        assert abs(G3 - g3) <= 1e-9 * max(1.0, abs(g3))
