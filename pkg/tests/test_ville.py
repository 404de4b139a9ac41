import math

import numpy as np
import pytest

from anytime_ville import (
    BoundQuery,
    CalibrationError,
    Constant,
    ExtrapolationError,
    FatTailDampener,
    InvalidQuery,
    LilThreshold,
    LogFloor,
    PolynomialDampener,
    QuadraticThreshold,
    Tabulated,
    UnsupportedError,
    calibrate_expconcave,
    calibrate_quadratic,
    calibrated_expconcave_threshold,
    calibrated_quadratic_threshold,
    continuous_bound,
    crossing_bound,
    exponent_integral,
    lil_floor,
    s_tail,
)
from oracles import brute_product_log

# -ln(0.95), evaluated once; the calibrated quadratic b for delta=0.05, a=1
B_CAL_005 = 19.495725746223689


# --- query validation --------------------------------------------------------

def test_query_rejects_floor_above_threshold():
    # the process floor is -f, so f = -5 puts the floor at +5, above g
    with pytest.raises(InvalidQuery):
        BoundQuery(Constant(-5.0), Constant(4.0), 4.0)


def test_query_rejects_m0_outside_range():
    with pytest.raises(InvalidQuery):
        BoundQuery(Constant(0.0), Constant(20.0), 21.0)
    with pytest.raises(InvalidQuery):
        BoundQuery(Constant(0.0), Constant(20.0), -0.5)


def test_query_default_m0_is_floor_start():
    q = BoundQuery(LogFloor(2.0), Constant(10.0))
    assert q.m0 == 0.0


# --- s_tail ------------------------------------------------------------------

def test_s_tail_constant_floor_is_one():
    b = s_tail(Constant(0.0), Constant(20.0), 0, 1000)
    assert b.lower == b.upper == 1.0


def test_s_tail_tabulated_identity_floor():
    # f(n) = n tabulated, g = C: factor at t is 1 - 1/(C+t+1)
    pts = tuple((float(i), float(i)) for i in range(0, 61))
    f = Tabulated(pts)
    c = 20.0
    b = s_tail(f, Constant(c), 0, 30)
    expected = np.prod([1.0 - 1.0 / (c + t + 1.0) for t in range(0, 31)])
    assert b.upper == pytest.approx(expected, rel=1e-12)
    assert b.lower == 0.0


def test_s_tail_tabulated_constant_extension_closes_bracket():
    pts = tuple((float(i), math.log1p(i)) for i in range(0, 51))
    f = Tabulated(pts, extend=True)
    b = s_tail(f, Constant(50.0), 0, 80)
    assert b.lower == b.upper  # no floor growth past the table: tail product is 1


def test_s_tail_lil_pair_matches_extended_precision_product():
    f = lil_floor()
    g = LilThreshold(0.5)
    horizon = 10 ** 6
    b = s_tail(f, g, 0, horizon)
    # brute-force product, term by term in 80-bit precision
    oracle_log = brute_product_log(f, g, 0, horizon)
    assert b.upper == pytest.approx(math.exp(oracle_log), rel=1e-11)
    assert b.upper == pytest.approx(0.7750158064213655, rel=1e-12)
    # tail completion: the threshold family's closed-form tail from horizon+1
    tail = 0.5 / math.log(math.e + f.value(horizon + 1.0))
    oracle_lower = math.exp(oracle_log) * math.exp(-tail)
    assert b.lower <= oracle_lower * (1.0 + 1e-12)
    assert b.lower == pytest.approx(oracle_lower, rel=1e-10)
    assert b.lower == pytest.approx(0.6113477642006696, rel=1e-10)


def test_s_tail_threshold_with_tabulated_base_gets_trivial_lower():
    # closed-form floor, threshold built over a table: the product is exact
    # at knots but no tail can be certified
    pts = tuple((float(i), math.log1p(i)) for i in range(0, 41))
    g = QuadraticThreshold(1.0, 19.5, Tabulated(pts))
    b = s_tail(LogFloor(1.0), g, 0, 30)
    assert 0.0 < b.upper < 1.0
    assert b.lower == 0.0


def test_s_tail_rejects_bad_horizon():
    with pytest.raises(InvalidQuery):
        s_tail(Constant(0.0), Constant(5.0), 10, 10)


def test_s_tail_tabulated_horizon_beyond_table():
    pts = tuple((float(i), float(i)) for i in range(0, 11))
    with pytest.raises(ExtrapolationError):
        s_tail(Tabulated(pts), Constant(20.0), 0, 50)


# --- crossing_bound ----------------------------------------------------------

def test_classic_recovery_exact():
    b = crossing_bound(BoundQuery(Constant(0.0), Constant(20.0), 1.0))
    assert abs(b.lower - 0.05) < 1e-15
    assert abs(b.upper - 0.05) < 1e-15


def test_bound_is_one_when_m0_at_threshold():
    b = crossing_bound(BoundQuery(Constant(0.0), Constant(20.0), 20.0))
    assert b.lower == b.upper == 1.0
    f = LogFloor(1.0)
    g = QuadraticThreshold(1.0, B_CAL_005, f)
    b = crossing_bound(BoundQuery(f, g, g.value(0.0), 100))
    assert b.lower == b.upper == 1.0


def test_quadratic_bound_horizon_1e8_matches_extended_precision():
    f = LogFloor(1.0)
    g = QuadraticThreshold(1.0, B_CAL_005, f)
    b = crossing_bound(BoundQuery(f, g, 0.0, 10 ** 8))
    # frozen from the 80-bit term-by-term oracle (log-product -0.0248092791105531)
    assert b.lower == pytest.approx(0.024504058258446593, rel=1e-9)
    assert b.upper == pytest.approx(0.04989529668886783, rel=1e-9)
    # the continuous value for this calibrated family is exactly 0.05; the
    # certified upper endpoint sits 1.05e-4 below it at this horizon
    assert abs(b.upper - 0.05) < 1.1e-4


def test_crossing_product_equals_shifted_s_tail():
    f = lil_floor()
    g = LilThreshold(0.3)
    h = 5000
    b = crossing_bound(BoundQuery(f, g, None, h))
    st = s_tail(f, g, 0, h - 1)
    lead = 1.0  # m0 = -f(0), f(0) = 0
    assert b.lower == pytest.approx(1.0 - lead * st.upper, abs=1e-14)


def test_default_truncation_horizon():
    f = lil_floor()
    b = crossing_bound(BoundQuery(f, LilThreshold(0.5)))
    assert b.truncation_horizon == 10 ** 6


def test_bracket_nests_as_horizon_grows():
    f = LogFloor(1.0)
    g = QuadraticThreshold(1.0, B_CAL_005, f)
    brackets = [crossing_bound(BoundQuery(f, g, 0.0, h))
                for h in (10 ** 3, 10 ** 4, 10 ** 5)]
    for small, big in zip(brackets, brackets[1:]):
        assert big.lower >= small.lower - 1e-15
        assert big.upper <= small.upper + 1e-15


# --- continuous bound --------------------------------------------------------

def test_continuous_classic_is_inverse_threshold():
    res = continuous_bound(Constant(0.0), Constant(20.0), 1.0)
    assert not res.divergent
    assert res.value == pytest.approx(0.05, abs=1e-15)


def test_continuous_quadratic_hits_delta():
    f = LogFloor(1.0)
    g = QuadraticThreshold(1.0, B_CAL_005, f)
    res = continuous_bound(f, g, 0.0)
    assert not res.divergent
    assert res.value == pytest.approx(0.05, abs=1e-8)


def test_continuous_divergence_for_proportional_threshold():
    res = continuous_bound(LogFloor(1.0), LogFloor(2.0), 0.0)
    assert res.divergent
    assert res.value == 1.0


def test_continuous_divergence_for_constant_threshold_over_diverging_floor():
    res = continuous_bound(LogFloor(1.0), Constant(50.0), 0.0)
    assert res.divergent
    assert res.value == 1.0


def test_continuous_rejects_tabulated():
    t = Tabulated(((0.0, 0.0), (1.0, 1.0)))
    with pytest.raises(UnsupportedError):
        continuous_bound(t, Constant(5.0), 0.0)


def test_continuous_dominates_discrete_upper():
    f = LogFloor(1.0)
    fl = lil_floor()
    pairs = [
        (f, QuadraticThreshold(1.0, B_CAL_005, f)),
        (f, QuadraticThreshold(0.5, 8.0, f)),
        (fl, LilThreshold(0.5)),
        (fl, LilThreshold(0.1)),
        (f, calibrated_expconcave_threshold(PolynomialDampener(1.0, 1.0, 3.0), 0.2, f)),
        (f, calibrated_expconcave_threshold(FatTailDampener(1.0, math.e, 2.0), 0.2, f)),
    ]
    for f_c, g_c in pairs:
        cont = continuous_bound(f_c, g_c)
        disc = crossing_bound(BoundQuery(f_c, g_c, None, 10 ** 5))
        assert cont.value >= disc.upper - 1e-12


# --- exponent integral -------------------------------------------------------

def test_quadratic_exponent_equals_inverse_ab():
    for delta in (0.01, 0.05, 0.1, 0.5):
        a = 1.3
        b = calibrate_quadratic(delta, a)
        f = LogFloor(1.0)
        g = QuadraticThreshold(a, b, f)
        res = exponent_integral(f, g)
        assert not res.divergent
        assert res.value == pytest.approx(1.0 / (a * b), abs=1e-10)


def test_expconcave_probe_truncated_identity():
    # quadrature over [0, probe] in the base variable vs h(0) - h(probe)
    f = LogFloor(1.0)
    probe = 1e12
    for h in (PolynomialDampener(1.0, 1.0, 1.5),
              PolynomialDampener(1.0, 1.0, 2.0),
              PolynomialDampener(1.0, 1.0, 3.0),
              FatTailDampener(1.0, math.e, 1.5),
              FatTailDampener(1.0, math.e, 2.0)):
        from anytime_ville import ExpConcaveThreshold

        g = ExpConcaveThreshold(h, f)
        res = exponent_integral(f, g, probe=probe)
        target = float(h.h(0.0)) - float(h.h(probe))
        assert res.value == pytest.approx(target, abs=1e-8)


def test_lil_exponent_equals_d():
    f = lil_floor()
    for d in (0.05, 0.3, 0.6, 1.0):
        res = exponent_integral(f, LilThreshold(d))
        assert res.value == pytest.approx(d, abs=1e-8)


# --- calibration -------------------------------------------------------------

def test_calibrate_quadratic_values():
    assert calibrate_quadratic(0.05, 1.0) == pytest.approx(B_CAL_005, rel=1e-14)
    assert calibrate_quadratic(1.0 - math.exp(-1.0), 1.0) == pytest.approx(1.0, rel=1e-12)
    # boundary 2ab = 1 accepted
    assert calibrate_quadratic(1.0 - math.exp(-2.0), 1.0) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(CalibrationError):
        calibrate_quadratic(0.95, 1.0)


def test_calibration_closure_on_random_levels():
    rng = np.random.default_rng(99)
    f = LogFloor(1.0)
    for delta in rng.uniform(0.005, 0.6, size=50):
        g = calibrated_quadratic_threshold(float(delta), 1.0, f)
        res = continuous_bound(f, g)
        assert res.value == pytest.approx(float(delta), abs=1e-8)


def test_calibrate_expconcave_polynomial():
    h = calibrate_expconcave(PolynomialDampener(1.0, 1.0, 2.0), 0.05)
    # c=2: h(0) = 1/(ab), so ab must equal 1/(-ln 0.95)
    assert h.a * h.b == pytest.approx(B_CAL_005, rel=1e-12)
    assert float(h.h(0.0)) == pytest.approx(-math.log1p(-0.05), rel=1e-12)


def test_calibrate_expconcave_fattail_initial_value():
    base = FatTailDampener(1.0, math.e, 2.0)
    assert float(base.h(0.0)) == pytest.approx(1.0, rel=1e-12)
    delta = 1.0 - math.exp(-1.0)
    h = calibrate_expconcave(base, delta)
    assert float(h.h(0.0)) == pytest.approx(1.0, rel=1e-12)
    assert h.b == pytest.approx(math.e, rel=1e-12)


def test_calibrated_fattail_bound_matches_delta():
    f = LogFloor(1.0)
    for delta in (0.05, 0.3):
        g = calibrated_expconcave_threshold(FatTailDampener(1.0, math.e, 2.0), delta, f)
        res = continuous_bound(f, g)
        assert res.value == pytest.approx(delta, abs=1e-6)


def test_calibrate_expconcave_infeasible_level():
    with pytest.raises(CalibrationError):
        # needs h(0) > 1, unreachable for the fat-tail family (b >= e)
        calibrate_expconcave(FatTailDampener(1.0, math.e, 2.0), 0.9)
