"""Scalar power-tower function: values, derivative factor, guards."""

from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptsmc import (
    DEFAULT_GUARDS,
    EvalGuards,
    PowerTowerParams,
    SingularityError,
    pt_derivative_factor,
    pt_value,
    sign_surrogate,
)
from ptsmc.power_tower import pt_derivative_factor_ex, pt_value_ex

mpmath.mp.dps = 50

ALPHAS = (1.5, 2.0, 3.0)


def mp_pt(a: float, alpha: float) -> float:
    """|a|^(|a|^alpha) * sgn(a) at 50 significant digits."""
    if a == 0.0:
        return 0.0
    aa = abs(mpmath.mpf(a))
    return float(mpmath.sign(a) * mpmath.exp(aa**alpha * mpmath.log(aa)))


def mp_ptd(a: float, alpha: float) -> float:
    """|a|^(|a|^alpha + alpha - 1) * (1 + alpha*ln|a|) at 50 digits."""
    aa = abs(mpmath.mpf(a))
    la = mpmath.log(aa)
    return float(mpmath.exp((aa**alpha + alpha - 1) * la) * (1 + alpha * la))


# ---------------------------------------------------------------------------
# values


def test_frozen_value_oracles():
    # 0.5^(0.5^2) = 2^(-1/4); the mpmath recomputation below guards these.
    assert pt_value(0.5, PowerTowerParams(2.0)) == 0.8408964152537145
    # exp(fl(2^1.5 * ln 2)) lands one ulp above the correctly rounded
    # 7.102993301316015; the freeze pins the implementation's output.
    assert pt_value(2.0, PowerTowerParams(1.5)) == 7.102993301316016
    assert pt_value(-2.0, PowerTowerParams(1.5)) == -7.102993301316016


def test_trivial_values_exact():
    for alpha in ALPHAS:
        p = PowerTowerParams(alpha)
        assert pt_value(0.0, p) == 0.0
        assert pt_value(1.0, p) == 1.0
        assert pt_value(-1.0, p) == -1.0


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize(
    "a", [-2.0, -1.3, -0.9, -0.5, -0.3, -0.1, -0.05, 0.05, 0.1, 0.3, 0.5, 0.9, 1.3, 2.0]
)
def test_values_match_mpmath(a, alpha):
    got = pt_value(a, PowerTowerParams(alpha))
    assert got == pytest.approx(mp_pt(a, alpha), rel=1e-14)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_derivative_factor_matches_mpmath(alpha):
    # Grid stays >= 0.1 away from the sign change at exp(-1/alpha), where
    # the (1 + alpha*ln|a|) cancellation would dominate a relative check.
    for a in (-2.0, -1.3, -1.0, -0.3, -0.1, 0.05, 0.1, 0.3, 1.0, 1.3, 2.0):
        got = pt_derivative_factor(a, PowerTowerParams(alpha))
        assert got == pytest.approx(mp_ptd(a, alpha), rel=5e-14)


def test_frozen_derivative_oracles():
    # Central finite differences of pt_value converge to these (h sweep);
    # each freeze sits within 2 ulps of the correctly rounded value and
    # pins the implementation's exact output.
    assert pt_derivative_factor(0.5, PowerTowerParams(2.0)) == -0.16241677174921992
    assert pt_derivative_factor(0.25, PowerTowerParams(1.5)) == -0.45384926143725846
    assert pt_derivative_factor(1.5, PowerTowerParams(3.0)) == 19.59466047758499


def test_derivative_factor_even_in_a():
    for alpha in ALPHAS:
        p = PowerTowerParams(alpha)
        for a in (0.05, 0.3, 0.6065, 1.0, 1.7):
            assert pt_derivative_factor(-a, p) == pt_derivative_factor(a, p)


# ---------------------------------------------------------------------------
# sign surrogates


def test_sign_surrogate_exact():
    p = PowerTowerParams(2.0)
    assert sign_surrogate(3.7, p) == 1.0
    assert sign_surrogate(-0.2, p) == -1.0
    assert sign_surrogate(0.0, p) == 0.0


def test_sign_surrogate_tanh():
    p = PowerTowerParams(2.0, surrogate="tanh", tanh_gain=50.0)
    assert sign_surrogate(0.1, p) == 0.9999092042625951  # tanh(5)
    assert sign_surrogate(-0.1, p) == -0.9999092042625951
    assert sign_surrogate(1.0, p) == 1.0  # saturates in double precision
    assert sign_surrogate(0.0, p) == 0.0


def test_tanh_surrogate_scales_value_near_zero():
    exact = PowerTowerParams(2.0)
    smooth = PowerTowerParams(2.0, surrogate="tanh", tanh_gain=50.0)
    a = 1e-3  # inside the magnitude~1 region, far outside the zero band
    assert pt_value(a, smooth) == pytest.approx(
        pt_value(a, exact) * math.tanh(50.0 * a), rel=1e-15
    )


# ---------------------------------------------------------------------------
# symmetry and limits


@given(
    a=st.floats(min_value=1e-15, max_value=1e6),
    alpha=st.floats(min_value=1.01, max_value=4.0),
)
def test_odd_symmetry_bitwise(a, alpha):
    p = PowerTowerParams(alpha)
    pos, sat_pos = pt_value_ex(a, p)
    neg, sat_neg = pt_value_ex(-a, p)
    assert neg == -pos and sat_neg == sat_pos
    dpos = pt_derivative_factor(a, p)
    assert pt_derivative_factor(-a, p) == dpos


@given(a=st.floats(min_value=1e-11, max_value=1e-2))
def test_sign_limit_bounds(a):
    # For |a| < 1 the magnitude is exp(-|a|^alpha * |ln a|) in (0, 1]; as
    # a -> 0 it rises to 1, so pt behaves like the sign function there.
    p = PowerTowerParams(2.0)
    val = pt_value(a, p)
    x = a**2 * abs(math.log(a))
    assert 1.0 >= val >= 1.0 - x  # e^-x >= 1 - x


def test_zero_band_returns_sign_exactly():
    p = PowerTowerParams(2.0)
    for a in (1e-13, 1e-15, 5e-200):
        assert pt_value(a, p) == 1.0
        assert pt_value(-a, p) == -1.0
        assert pt_derivative_factor(a, p) == 0.0
        assert pt_derivative_factor(-a, p) == 0.0


def test_zero_band_boundary():
    g = DEFAULT_GUARDS
    p = PowerTowerParams(2.0)
    inside = math.nextafter(g.zero_band, 0.0)
    assert pt_value(inside, p) == 1.0
    assert pt_derivative_factor(inside, p) == 0.0
    # At the boundary the smooth branch applies and is itself ~1 and ~0.
    assert pt_value(g.zero_band, p) == pytest.approx(1.0, abs=1e-10)
    assert abs(pt_derivative_factor(g.zero_band, p)) < 1e-9


def test_zero_limit_boundedness():
    # The derivative factor vanishes as a -> 0 for alpha > 1; on a
    # log-spaced grid down to 1e-10 its magnitude shrinks monotonically
    # enough to stay below the first sample's envelope.
    p = PowerTowerParams(2.0)
    mags = [10.0 ** (-k / 2.0) for k in range(6, 21)]  # 1e-3 .. 1e-10
    vals = [abs(pt_derivative_factor(a, p)) for a in mags]
    assert vals[0] < 2e-2
    assert all(v <= vals[0] for v in vals)
    assert vals[-1] < 1e-8


# ---------------------------------------------------------------------------
# interior minimum and sign change of the derivative factor


@pytest.mark.parametrize("alpha", ALPHAS)
def test_interior_minimum_location_and_value(alpha):
    p = PowerTowerParams(alpha)
    a_star = math.exp(-1.0 / alpha)
    # Dense grid search over (0, 1] brackets the analytic minimum.
    n = 20000
    grid = [(k + 1) / n for k in range(n)]
    best = min(grid, key=lambda a: pt_value(a, p))
    assert abs(best - a_star) < 1e-4
    assert pt_value(a_star, p) == pytest.approx(math.exp(-1.0 / (alpha * math.e)), rel=1e-15)
    if alpha == 2.0:
        assert pt_value(a_star, p) == pytest.approx(0.831986, abs=5e-7)
        assert a_star == pytest.approx(0.6065306597126334, rel=1e-16)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_derivative_factor_changes_sign_at_minimum(alpha):
    p = PowerTowerParams(alpha)
    a_star = math.exp(-1.0 / alpha)
    assert pt_derivative_factor(a_star * 0.999, p) < 0.0
    assert pt_derivative_factor(a_star * 1.001, p) > 0.0
    assert abs(pt_derivative_factor(a_star, p)) < 1e-13


# ---------------------------------------------------------------------------
# chain rule (finite differences)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("a", [-1.7, -0.8, -0.3, 0.05, 0.5, 1.0, 1.9])
def test_chain_rule_against_central_difference(a, alpha):
    p = PowerTowerParams(alpha)
    h = 1e-6 * max(1.0, abs(a))
    numeric = (pt_value(a + h, p) - pt_value(a - h, p)) / (2.0 * h)
    analytic = pt_derivative_factor(a, p)
    assert numeric == pytest.approx(analytic, rel=1e-5, abs=1e-9)


def test_frozen_finite_difference_value():
    # 0.5^1.25 * (1 + 2*ln 0.5) ~ -0.162417
    assert pt_derivative_factor(0.5, PowerTowerParams(2.0)) == pytest.approx(
        -0.162417, abs=5e-7
    )


# ---------------------------------------------------------------------------
# guards: saturation and singularity


def test_exponent_saturation_flag():
    p = PowerTowerParams(2.0)
    val, sat = pt_value_ex(1e200, p)
    assert sat and val == math.exp(700.0)
    val, sat = pt_value_ex(-1e200, p)
    assert sat and val == -math.exp(700.0)
    val, sat = pt_value_ex(2.0, p)
    assert not sat and math.isfinite(val)
    dval, dsat = pt_derivative_factor_ex(1e200, p)
    assert dsat and math.isfinite(dval) and dval > 0.0


def test_custom_exp_cap():
    g = EvalGuards(exp_cap=5.0)
    p = PowerTowerParams(2.0)
    val, sat = pt_value_ex(3.0, p, g)  # arg = 9*ln3 ~ 9.9 > 5
    assert sat and val == math.exp(5.0)


def test_singularity_error_for_alpha_at_most_one():
    for alpha in (0.5, 1.0):
        p = PowerTowerParams(alpha)
        with pytest.raises(SingularityError):
            pt_derivative_factor(1e-13, p)
        with pytest.raises(SingularityError):
            pt_derivative_factor(0.0, p)
        # Outside the band the factor exists even for small alpha.
        assert math.isfinite(pt_derivative_factor(0.5, p))


def test_singularity_error_is_a_value_error():
    assert issubclass(SingularityError, ValueError)


# ---------------------------------------------------------------------------
# parameter validation


def test_params_validation():
    with pytest.raises(ValueError):
        PowerTowerParams(0.0)
    with pytest.raises(ValueError):
        PowerTowerParams(-1.0)
    with pytest.raises(ValueError):
        PowerTowerParams(math.inf)
    with pytest.raises(ValueError):
        PowerTowerParams(2.0, surrogate="sgn")
    with pytest.raises(ValueError):
        PowerTowerParams(2.0, surrogate="tanh", tanh_gain=0.0)
    # alpha <= 1 is a valid parameterization of the value map itself.
    assert pt_value(0.5, PowerTowerParams(1.0)) > 0.0


def test_guards_validation():
    with pytest.raises(ValueError):
        EvalGuards(zero_band=0.0)
    with pytest.raises(ValueError):
        EvalGuards(zero_band=1.0)
    with pytest.raises(ValueError):
        EvalGuards(exp_cap=0.0)
    assert DEFAULT_GUARDS.zero_band == 1e-12
    assert DEFAULT_GUARDS.exp_cap == 700.0
