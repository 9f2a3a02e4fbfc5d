import math
import random
from fractions import Fraction

import numpy as np
import pytest

from biquadrics.curve import classify, eb_curve
from biquadrics.elliptic import EllipticModulus, jacobi, jacobi_ratio
from biquadrics.errors import (
    CaseNotCovered,
    NotCertifiedPeriodic,
    SymbolicOverflow,
)
from biquadrics.families import curve_from_family, parameterize
from biquadrics.johnmap import periodicity_criterion
from biquadrics.nonuniq import (
    SeparatedSolution,
    build_solution,
    duplication_formula,
    ellipse_curve,
    ellipse_samples,
    ellipse_solution,
    ellipse_solution_from_angle,
    jacobi_multiplication,
    uniqueness_verdict,
)
from biquadrics.poly import Poly, chebyshev_T

F = Fraction


def test_chebyshev_difference_factorization():
    """T4(x) - T4(y) = 8 (x^2 - y^2)(x^2 + y^2 - 1) as an exact identity."""
    T4 = chebyshev_T(4)
    for x in (F(1, 3), F(2, 5), F(7, 4)):
        for y in (F(-1, 2), F(3, 7)):
            lhs = T4(x) - T4(y)
            rhs = 8 * (x * x - y * y) * (x * x + y * y - 1)
            assert lhs == rhs


def test_ellipse_solution_right_angle():
    sol = ellipse_solution(1, 2, 1)
    assert sol.f == chebyshev_T(4)
    samples = ellipse_samples(1, 2, 256)
    assert sol.max_on_curve_residual(samples) < 1e-12
    # the ellipse for eps = pi/2 is the unit circle
    c = ellipse_curve(1, 2)
    assert abs(c.f(0.6, 0.8)) < 1e-12


def test_ellipse_solution_third_angle():
    sol = ellipse_solution(1, 3, 1)
    assert sol.f == chebyshev_T(6)
    samples = ellipse_samples(1, 3, 300)
    assert sol.max_on_curve_residual(samples) < 1e-12


def test_ellipse_gate_refuses_irrational():
    with pytest.raises(NotCertifiedPeriodic):
        ellipse_solution_from_angle(1.0, 1)  # 1/pi is not rational
    sol = ellipse_solution_from_angle(math.pi / 3, 1)
    assert sol.N == 3


def test_jacobi_multiplication_base_case():
    R1 = jacobi_multiplication(1, F(9, 25))
    assert R1.num == Poly([F(0), F(1)]) and R1.den == Poly([F(1)])


def test_duplication_recurrence_matches_closed_form():
    for k2 in (F(9, 25), F(1, 2), F(4, 9)):
        rec = jacobi_multiplication(2, k2)
        closed = duplication_formula(k2)
        assert rec.num == closed.num and rec.den == closed.den


def test_multiplication_against_jacobi_oracle():
    k2 = F(9, 25)
    k = math.sqrt(float(k2))
    em = EllipticModulus.from_k(k)
    for n in (2, 3, 4):
        R = jacobi_multiplication(n, k2)
        for i in range(32):
            z = 0.05 + i * (em.K / 18)
            c = jacobi_ratio("cn", z, k)
            want = jacobi_ratio("cn", n * z, k)
            got = R(c)
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want)), (n, z)


def test_symbolic_overflow_guard():
    with pytest.raises(SymbolicOverflow):
        jacobi_multiplication(40, F(1, 2))


def test_build_solution_period3():
    curve, tag = curve_from_family("par13", 0.6, 1, 3)
    param = parameterize(tag, curve)
    verdict = periodicity_criterion(tag, param=param)
    assert (verdict.m, verdict.n) == (1, 3)
    sol = build_solution(tag, verdict, 1, param=param)
    samples = [(x, y) for _, _, x, y in param.sample_real(256)]
    assert sol.max_on_curve_residual(samples) <= 1e-9
    # nonzero away from the curve (interior probes)
    probes = [(0.05 * i, -0.04 * i) for i in range(1, 9)]
    scale = max(abs(complex(sol.f(x))) for x, _ in samples)
    assert all(abs(complex(sol.value(px, py))) / scale > 1e-3 for px, py in probes)


def test_build_solution_levels_independent():
    curve, tag = curve_from_family("par13", 0.6, 1, 3)
    param = parameterize(tag, curve)
    verdict = periodicity_criterion(tag, param=param)
    s1 = build_solution(tag, verdict, 1, param=param)
    s2 = build_solution(tag, verdict, 2, param=param)
    xs = np.linspace(-0.8, 0.8, 64)
    v1 = np.array([complex(s1.f(float(x))).real for x in xs])
    v2 = np.array([complex(s2.f(float(x))).real for x in xs])
    ratio = v2[np.abs(v1) > 1e-6] / v1[np.abs(v1) > 1e-6]
    assert ratio.std() > 1e-3  # not proportional
    # Gram matrix of {f1, f2} has full rank
    G = np.array([[np.dot(a, b) for b in (v1, v2)] for a in (v1, v2)])
    assert np.linalg.matrix_rank(G, tol=1e-8) == 2


def test_build_solution_gates():
    curve, tag = curve_from_family("par13", 0.6, 1, 3)
    param = parameterize(tag, curve)
    bad = periodicity_criterion(tag, param=param)
    from biquadrics.johnmap import RationalVerdict
    with pytest.raises(NotCertifiedPeriodic):
        build_solution(tag, RationalVerdict(0.3333, None, None, 1.0, 64), 1, param=param)
    curve2, tag2 = curve_from_family("bax", 0.6, 1, 3)
    v2 = periodicity_criterion(tag2)
    with pytest.raises(CaseNotCovered):
        build_solution(tag2, v2, 1)


def test_uniqueness_verdict_periodic():
    curve, tag = curve_from_family("par13", 0.6, 1, 3)
    rep = uniqueness_verdict(curve)
    assert rep.status == "nonunique"
    assert (rep.verdict.m, rep.verdict.n) == (1, 3)
    assert rep.witness is not None and rep.witness_residual <= 1e-9


def test_uniqueness_verdict_golden():
    phi = (math.sqrt(5) - 1) / 2
    k = 0.6
    em = EllipticModulus.from_k(k)
    eta = 2 * em.K * phi
    a = jacobi_ratio("ds", eta, k) ** 2 / (k * em.k_prime)
    b = -jacobi_ratio("cs", eta, k) * jacobi_ratio("ns", eta, k) / (k * em.k_prime)
    curve = eb_curve(a, b, -1.0)
    rep = uniqueness_verdict(curve)
    assert rep.status == "no-period-within-bound"
    assert not rep.verdict.is_rational


def test_uniqueness_verdict_empty():
    rep = uniqueness_verdict(eb_curve(1.0, 0.5, 1.0))
    assert rep.status == "empty-curve"
