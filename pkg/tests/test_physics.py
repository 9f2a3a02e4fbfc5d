import math
import random

import numpy as np
import pytest

from biquadrics.curve import classify
from biquadrics.elliptic import WeierstrassData, wp
from biquadrics.errors import (
    InvalidInput,
    LatticePole,
    ModeBoundary,
    RankDeficientFit,
)
from biquadrics.physics import (
    TodaParams,
    fit_biquadratic,
    fit_residual,
    symmetry_defect,
    toda_eval,
    toda_form_agreement,
    toda_phase_portrait,
    toda_shift_identity,
    toda_verify,
    xy_closure,
    xy_closure_error,
    xy_godograph_curve,
    xy_regularity,
    xy_static,
)


def test_xy_mode_selection_and_residuals():
    ch = xy_static(2.0, 0.3, 16)
    assert ch.mode == 1
    assert ch.max_stationarity_residual() <= 1e-9
    assert ch.w_spread() <= 1e-10
    ch2 = xy_static(2.0, 0.8, 16)
    assert ch2.mode == 2
    assert ch2.max_stationarity_residual() <= 1e-9
    assert ch2.w_spread() <= 1e-10


def test_xy_unit_spins_and_W_definition():
    ch = xy_static(3.0, 0.25, 12)
    for x, y in ch.spins:
        assert abs(x * x + y * y - 1) <= 1e-12
    assert abs(ch.recompute_W(0) - ch.W) < 1e-9


def test_xy_mode_boundary_rejected():
    with pytest.raises(ModeBoundary):
        xy_static(2.0, 0.5, 8)
    with pytest.raises(InvalidInput):
        xy_static(0.9, 0.3, 8)


def test_xy_regularity_positive():
    ch = xy_static(2.0, 0.3, 20)
    assert xy_regularity(ch) > 1e-6


def test_xy_closure_reference():
    ch = xy_closure(2.0, 6, 1)
    assert xy_closure_error(ch) <= 1e-8
    assert ch.max_stationarity_residual() <= 1e-9
    # q / 4K = m1 / N by construction
    from biquadrics.elliptic import EllipticModulus
    em = EllipticModulus.from_k(ch.k)
    assert abs(ch.q / (4 * em.K) - 1 / 6) < 1e-12


def test_xy_closure_degenerate_ratio_rejected():
    with pytest.raises(InvalidInput):
        xy_closure(2.0, 6, 0)
    with pytest.raises(InvalidInput):
        xy_closure(2.0, 6, 2)  # not coprime


def test_xy_godograph_on_symmetric_biquadratic():
    ch = xy_static(2.0, 0.3, 40)
    curve = xy_godograph_curve(ch)
    pts = []
    for n in range(ch.N):
        x0, y0 = ch.spins[n]
        x1, y1 = ch.spins[n + 1]
        pts.append((y0 / (1 + x0), y1 / (1 + x1)))
    assert fit_residual(curve, pts) <= 1e-8
    assert symmetry_defect(curve) <= 1e-6
    tag = classify(curve.scaled(1 / curve.a[2][2]))
    assert tag.family in ("EB_i", "EB_ii")


def test_xy_closure_matches_curve_periodicity():
    """Chain closure is root-swap periodicity on the stereographic curve."""
    from biquadrics.johnmap import involution_I1, involution_I2, orbit, point_on_curve
    from biquadrics.physics import xy_invariant_curve
    ch = xy_closure(2.0, 6, 1, theta=0.123)
    curve = xy_invariant_curve(ch.j, ch.W)
    u = [y / (1 + x) for x, y in ch.spins]
    # every consecutive pair of stereographic spins sits on the curve
    for n in range(ch.N):
        assert abs(curve.f(u[n], u[n + 1])) < 1e-9
    # one chain site is one root swap; the composed map advances two sites,
    # so the closed chain of even length N has map period N/2
    p = point_on_curve(curve, u[2], u[3])
    swap = involution_I2(curve, involution_I1(curve, p))
    assert abs(swap.x.value() - u[0]) < 1e-8
    assert abs(swap.y.value() - u[1]) < 1e-8
    o = orbit(curve, p, max_iter=20)
    assert o.period == 3
    # the fitted godograph curve of a generic chain matches the analytic one
    gen = xy_static(2.0, 0.3, 40, theta=0.05)
    fitted = xy_godograph_curve(gen)
    analytic = xy_invariant_curve(2.0, 0.3)
    fn = np.array([[float(v) for v in r] for r in fitted.a])
    an = np.array([[float(v) for v in r] for r in analytic.a])
    fn /= fn[2][2]
    an /= an[2][2]
    assert np.allclose(fn, an, atol=1e-7)


def toda_example():
    wd = WeierstrassData.from_invariants(5.0, 2.0)
    return TodaParams(1.0, 0.4, 0.21, 0.1, wd)


def test_toda_two_forms_agree():
    tp = toda_example()
    assert toda_form_agreement(tp, range(0, 8), 0.3) <= 1e-8


def test_toda_lambda_shifts_b_only():
    wd = WeierstrassData.from_invariants(5.0, 2.0)
    t1 = TodaParams(1.0, 0.4, 0.21, 0.0, wd)
    t2 = TodaParams(1.0, 0.4, 0.21, 0.7, wd)
    b1, u1, _ = toda_eval(t1, range(0, 4), 0.2)
    b2, u2, _ = toda_eval(t2, range(0, 4), 0.2)
    for n in range(0, 4):
        assert abs(u1[n] - u2[n]) < 1e-12
        assert abs((b1[n] - b2[n]) - 0.7) < 1e-12


def test_toda_equations_of_motion():
    tp = toda_example()
    rb, ru = toda_verify(tp, range(0, 5), 0.3, h=1e-5)
    assert rb <= 1e-6 and ru <= 1e-6
    rb2, ru2 = toda_verify(tp, range(0, 5), 0.3, h=5e-6)
    # second-order convergence: halving h quarters the residual
    assert 2.5 < rb / rb2 < 6.0
    assert 2.5 < ru / ru2 < 6.0


def test_toda_shift_identity():
    tp = toda_example()
    assert toda_shift_identity(tp, 2, 0.3) <= 1e-8


def test_toda_pole_clearance():
    wd = WeierstrassData.from_invariants(5.0, 2.0)
    tp = TodaParams(1.0, complex(wd.omega1 * 2), 0.0, 0.0, wd)
    with pytest.raises(LatticePole):
        toda_eval(tp, [0], 0.0)


def test_toda_phase_portrait_fit():
    tp = toda_example()
    pts, curve = toda_phase_portrait(tp, 64)
    assert fit_residual(curve, pts) <= 1e-7
    assert symmetry_defect(curve) <= 1e-6


def test_toda_phase_portrait_matches_canonical_form():
    """After the affine normalization u -> wp(p) - u/omega^2, the portrait
    satisfies (xy + (x+y) w + g2/4)^2 - (x + y + w)(4xyw - g3) with w = wp(p)."""
    tp = toda_example()
    pts, _ = toda_phase_portrait(tp, 48)
    wd = tp.wdata
    w = complex(wp(tp.p, wd)).real
    g2, g3 = complex(wd.g2).real, complex(wd.g3).real
    worst = 0.0
    for u0, u1 in pts:
        x = w - u0 / complex(tp.omega ** 2).real
        y = w - u1 / complex(tp.omega ** 2).real
        val = (x * y + (x + y) * w + g2 / 4) ** 2 - (x + y + w) * (4 * x * y * w - g3)
        worst = max(worst, abs(val) / (1 + abs(x * y) ** 2))
    assert worst <= 1e-7


def test_toda_periodicity_construction():
    wd = WeierstrassData.from_invariants(5.0, 2.0)
    N, m1, m2 = 5, 1, 0
    p = (2 * m1 * wd.omega1 + 2 * m2 * wd.omega2) / N
    tp = TodaParams(1.0, p, 0.17, 0.0, wd)
    _, u, _ = toda_eval(tp, range(0, N + 1), 0.4)
    assert abs(u[N] - u[0]) <= 1e-8 * max(1.0, abs(u[0]))


def test_fit_negative_control():
    rng = random.Random(2)
    pts = [(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(40)]
    try:
        curve = fit_biquadratic(pts)
        assert fit_residual(curve, pts) > 1e-5
    except RankDeficientFit:
        pass


def test_fit_rank_deficient():
    pts = [(0.1 * i, 0.2) for i in range(12)]  # collinear
    with pytest.raises(RankDeficientFit):
        fit_biquadratic(pts)
