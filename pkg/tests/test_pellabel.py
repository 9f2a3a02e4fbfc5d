import math
import random
from fractions import Fraction

import pytest

from biquadrics.errors import (
    BudgetExhausted,
    IntegrandSingular,
    InvalidInput,
    NonSquareLeading,
    PerfectSquareR,
)
from biquadrics.pellabel import (
    PellAbelSolution,
    abel_integral_check,
    bridge_cubic_to_quartic,
    bridge_quartic_to_cubic,
    compose_solution,
    malyshev_gamma,
    malyshev_gammas,
    pell_abel_report,
    pell_abel_solve,
    poncelet_pell_bridge_test,
    shift_to_root,
)
from biquadrics.poly import Poly
from biquadrics.poncelet import Conic

F = Fraction


def test_solver_reference_cases():
    R = Poly([F(2), 0, F(-2), 0, F(1)])
    sol = pell_abel_solve(R)
    assert sol.P == Poly([F(-1), 0, F(1)])
    assert sol.Q == Poly([F(1)])
    assert sol.L == -1
    assert sol.verify(R)

    R = Poly([F(-1), 0, 0, 0, F(1)])
    sol = pell_abel_solve(R)
    assert sol.P == Poly([0, 0, F(1)])
    assert sol.L == 1


def test_solution_composition():
    R = Poly([F(-1), 0, 0, 0, F(1)])
    sol = pell_abel_solve(R)
    comp = compose_solution(sol, R)
    assert comp.verify(R)
    assert comp.P == Poly([F(-1), 0, 0, 0, F(2)])
    assert comp.Q == Poly([0, 0, F(2)])
    assert comp.L == 1


def test_budget_exhausted():
    R = Poly([F(1), 0, 0, F(1), F(1)])
    with pytest.raises(BudgetExhausted):
        pell_abel_solve(R, max_deg_Q=8)
    rep = pell_abel_report(R, max_deg_Q=8)
    assert rep.solvable is None
    assert "deg Q <= 8" in rep.reason or "cycle" in rep.reason


def test_solver_input_validation():
    with pytest.raises(PerfectSquareR):
        pell_abel_solve(Poly([F(1), 0, F(2), 0, F(1)]))  # (t^2+1)^2
    with pytest.raises(NonSquareLeading):
        pell_abel_solve(Poly([F(1), 0, 0, 0, F(2)]))
    with pytest.raises(InvalidInput):
        pell_abel_solve(Poly([1.0, 0, 0, 0, 1.0]))
    with pytest.raises(InvalidInput):
        pell_abel_solve(Poly([F(1), F(1)]))


def test_shift_invariance_of_solvability():
    R = Poly([F(2), 0, F(-2), 0, F(1)])
    shifted = R.shifted(F(3, 2))
    s1 = pell_abel_solve(R)
    s2 = pell_abel_solve(shifted)
    assert s1.verify(R) and s2.verify(shifted)
    unsolvable = Poly([F(1), 0, 0, F(1), F(1)])
    rep1 = pell_abel_report(unsolvable, max_deg_Q=6)
    rep2 = pell_abel_report(unsolvable.shifted(F(2)), max_deg_Q=6)
    assert rep1.solution is None and rep2.solution is None


def test_malyshev_gamma_even_quartic():
    rng = random.Random(11)
    for _ in range(5):
        R = Poly([F(rng.randint(-5, 5)), 0, F(rng.randint(-5, 5)), 0, F(1)])
        if R.degree != 4:
            continue
        assert malyshev_gamma(R, 1) == 0


def test_malyshev_gamma_reference():
    R = Poly([F(0), F(4), F(6), F(4), F(1)])  # (t+1)^4 - 1
    gs = malyshev_gammas(R, 2)
    assert gs[0] == 0
    assert gs[1] == F(-1, 4)


def test_malyshev_float_vs_exact():
    rng = random.Random(13)
    for _ in range(5):
        R = Poly([F(rng.randint(-4, 4)) for _ in range(4)] + [F(1)])
        if R.degree != 4:
            continue
        for k in (1, 2, 3):
            ge = malyshev_gamma(R, k)
            gf = malyshev_gamma(R.to_float(), k)
            assert abs(float(ge) - complex(gf).real) <= 1e-9 * max(1.0, abs(float(ge)))


def test_bridge_roundtrip():
    Fc = Poly([F(-1), F(3), F(-3), F(2)])
    R = bridge_cubic_to_quartic(Fc)
    assert R.coeff(0) == 0
    assert bridge_quartic_to_cubic(R) == Fc
    # roots of R are the reciprocals of the cubic roots plus 0
    fr = [complex(r) for r in Fc.to_float().roots()]
    rr = sorted(abs(r) for r in R.to_float().roots())
    expect = sorted([0.0] + [1 / abs(r) for r in fr])
    for a, b in zip(rr, expect):
        assert abs(a - b) < 1e-8
    with pytest.raises(InvalidInput):
        bridge_cubic_to_quartic(Poly([F(1), 0, 0, F(1), F(1)]))


def test_shift_to_root():
    R = Poly([F(-1), 0, 0, 0, F(1)])
    sh = shift_to_root(R)
    assert sh(0) == 0
    assert sh == R.shifted(F(-1))  # smallest real root -1
    R0 = Poly([F(0), F(1), 0, 0, F(1)])
    assert shift_to_root(R0)(0) == 0
    from biquadrics.errors import NoRealRoot
    with pytest.raises(NoRealRoot):
        shift_to_root(Poly([1.0, 0.0, 1.0, 0.0, 1.0]))


def test_abel_integral_identity():
    R = Poly([F(-1), 0, 0, 0, F(1)])
    sol = pell_abel_solve(R)
    assert abel_integral_check(sol, R, 1.5, 2.5) <= 1e-8
    assert abel_integral_check(sol, R, 2.0, 2.0) == 0.0
    with pytest.raises(IntegrandSingular):
        abel_integral_check(sol, R, 0.5, 2.5)  # crosses the zero of R at t = 1
    with pytest.raises(InvalidInput):
        bad = PellAbelSolution(sol.P, sol.Q, F(-1))
        abel_integral_check(bad, R, 1.5, 2.5)


def unit_circle_pair(R2):
    A = Conic([[F(-1), 0, 0], [0, F(1), 0], [0, 0, F(1)]])
    B = Conic([[-R2, 0, 0], [0, F(1), 0], [0, 0, F(1)]])
    return A, B


def test_bridge_even_period_solver_succeeds():
    A, B = unit_circle_pair(F(2))  # square trajectory
    rep = poncelet_pell_bridge_test(A, B)
    assert rep.period == 4 and rep.even_period
    assert rep.solver.solvable and rep.consistent
    assert rep.solver.solution.verify(rep.R)


def test_bridge_odd_period_criterion_silent():
    A, B = unit_circle_pair(F(4))  # triangle trajectory
    rep = poncelet_pell_bridge_test(A, B)
    assert rep.period == 3 and rep.even_period is False
    assert rep.consistent is None


def test_bridge_aperiodic():
    A, B = unit_circle_pair(F(9))
    rep = poncelet_pell_bridge_test(A, B, maxN=24, max_deg_Q=6)
    assert rep.period is None
    assert rep.solver.solution is None


def fuss_quadrilateral_circles(p, q):
    """Rational bicentric-quadrilateral pair from a Pythagorean triple
    (a, b, c) ~ (p^2-q^2, 2pq, p^2+q^2): 1/(R+d), 1/(R-d), 1/r."""
    a, b, c = p * p - q * q, 2 * p * q, p * p + q * q
    Rd = F(1, a)  # R + d
    Rm = F(1, b)  # R - d
    r = F(1, c)
    R = (Rd + Rm) / 2
    d = (Rd - Rm) / 2
    A = Conic([[d * d - r * r, -d, 0], [-d, F(1), 0], [0, 0, F(1)]])
    B = Conic([[-R * R, 0, 0], [0, F(1), 0], [0, 0, F(1)]])
    return A, B


def test_bridge_eccentric_period4_suite():
    for (p, q) in [(2, 1), (3, 2), (4, 1)]:
        A, B = fuss_quadrilateral_circles(p, q)
        rep = poncelet_pell_bridge_test(A, B)
        assert rep.period == 4, (p, q)
        assert rep.solver.solvable and rep.consistent
