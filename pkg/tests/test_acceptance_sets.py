import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskcap.acceptance import (
    CappedLinear,
    Expectation,
    Exponential,
    Linear,
    Scenario,
    Shortfall,
    SpecError,
    TVaR,
    VaR,
    expected_utility,
    interior_membership,
    is_acceptable,
    spec_from_dict,
    spec_from_json,
    tvar_value,
    var_value,
)
from riskcap.oracle import perturbation_interior_oracle, tvar_integral_oracle
from riskcap.scenario import ScenarioSpace


def test_var_value_toy(space4, x_star):
    assert var_value(space4, x_star, 0.3) == 1.0
    assert var_value(space4, x_star, 0.6) == -1.0


def test_tvar_value_toy(space4, x_star):
    assert tvar_value(space4, x_star, 0.25) == pytest.approx(2.0, abs=1e-12)
    assert tvar_value(space4, x_star, 0.5) == pytest.approx(1.5, abs=1e-12)


def test_expected_utility_toy(space4, x_star):
    assert expected_utility(space4, x_star, Exponential(1.0)) == pytest.approx(-1.631251, abs=1e-5)


def test_membership_examples(space4, x_star):
    assert is_acceptable(VaR(0.3), space4, x_star + 1)
    assert not is_acceptable(TVaR(0.5), space4, x_star)
    assert not is_acceptable(Scenario.on(4, [0, 1]), space4, x_star)


def test_interior_examples(space4):
    assert interior_membership(TVaR(0.5), space4, np.ones(4))
    # two outcomes sit at or below zero, which the finite-space interior forbids at 0.3
    assert not interior_membership(VaR(0.3), space4, np.array([-1.0, 0.0, 2.0, 4.0]))
    assert interior_membership(Scenario.on(4, [0, 1]), space4, np.array([1.0, 1.0, -5.0, 0.0]))


@pytest.mark.parametrize("x", [[-1.0, 0.0, 2.0, 4.0], [1.0, 1.0, 1.0, 1.0], [-2.0, -1.0, 1.0, 3.0]])
@pytest.mark.parametrize("spec", [VaR(0.3), TVaR(0.5), Scenario.on(4, [0, 1]), Expectation(0.0),
                                  Shortfall(Exponential(1.0), -1.0)])
def test_interior_matches_perturbation_oracle(space4, spec, x):
    x = np.array(x)
    assert interior_membership(spec, space4, x) == perturbation_interior_oracle(spec, space4, x, 1e-6)


def test_flags():
    assert not VaR(0.1).is_convex and VaR(0.1).is_conic
    assert TVaR(0.1).is_coherent
    assert Shortfall(Exponential(1.0), 0.5).is_convex and not Shortfall(Exponential(1.0), 0.5).is_conic
    assert Expectation(0.0).is_coherent and not Expectation(0.3).is_coherent
    assert Scenario.on(3, [0]).is_coherent


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5, math.nan])
def test_level_domain(alpha):
    with pytest.raises(SpecError):
        VaR(alpha)
    with pytest.raises(SpecError):
        TVaR(alpha)


def test_shortfall_level_must_be_attained():
    with pytest.raises(SpecError):
        Shortfall(Exponential(1.0), 1.0)
    Shortfall(CappedLinear(2.0), 2.0)
    with pytest.raises(SpecError):
        Shortfall(CappedLinear(2.0), 2.5)


def test_empty_event_rejected():
    with pytest.raises(Exception):
        Scenario.on(3, [])


def test_exponential_overflow_is_minus_inf(space4):
    assert expected_utility(space4, np.array([-1e6, 0, 0, 0]), Exponential(1.0)) == -math.inf


def test_json_round_trip():
    for spec in [VaR(0.3), TVaR(0.5), Expectation(0.1), Scenario.on(4, [0, 2]),
                 Shortfall(Exponential(2.0), 0.2), Shortfall(Linear(), -1.0), Shortfall(CappedLinear(1.5), 0.5)]:
        assert spec_from_json(spec.to_json(), 4) == spec


def test_json_errors():
    with pytest.raises(SpecError):
        spec_from_json('{"type": "var"', 4)
    with pytest.raises(SpecError, match="unused|unexpected|not allowed|key"):
        spec_from_dict({"type": "var", "alpha": 0.3, "event": [1]}, 4)
    with pytest.raises(SpecError):
        spec_from_dict({"type": "nope"}, 4)
    with pytest.raises(SpecError):
        spec_from_dict({"type": "scenario", "event": [7]}, 4)


positions = st.lists(st.floats(-50, 50, allow_nan=False).map(lambda v: round(v, 2)), min_size=2, max_size=10)
levels = st.floats(0.01, 0.99)


@settings(max_examples=200, deadline=None)
@given(positions, levels)
def test_tvar_matches_integral_oracle(xs, alpha):
    sp = ScenarioSpace.uniform(len(xs))
    x = np.array(xs)
    assert abs(tvar_value(sp, x, alpha) - tvar_integral_oracle(sp, x, alpha)) <= 1e-9 * (1 + np.abs(x).max())


@settings(max_examples=200, deadline=None)
@given(positions, levels)
def test_var_below_tvar(xs, alpha):
    sp = ScenarioSpace.uniform(len(xs))
    x = np.array(xs)
    assert var_value(sp, x, alpha) <= tvar_value(sp, x, alpha) + 1e-9


@settings(max_examples=200, deadline=None)
@given(positions, levels, st.floats(-20, 20))
def test_cash_additivity_of_quantities(xs, alpha, m):
    sp = ScenarioSpace.uniform(len(xs))
    x = np.array(xs)
    assert tvar_value(sp, x + m, alpha) == pytest.approx(tvar_value(sp, x, alpha) - m, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(positions, st.sampled_from(["var", "tvar", "expectation", "shortfall"]), levels)
def test_membership_is_monotone(xs, family, alpha):
    sp = ScenarioSpace.uniform(len(xs))
    x = np.array(xs)
    spec = {"var": VaR(alpha), "tvar": TVaR(alpha), "expectation": Expectation(alpha),
            "shortfall": Shortfall(Exponential(1.0), alpha - 1)}[family]
    if is_acceptable(spec, sp, x):
        assert is_acceptable(spec, sp, x + 0.5)
    if interior_membership(spec, sp, x):
        assert is_acceptable(spec, sp, x)
