import math

import numpy as np
import pytest

from riskcap.acceptance import Expectation, Scenario, Shortfall, Exponential, TVaR, VaR
from riskcap.engine import EngineError, rho_value
from riskcap.illiquid import (
    Jump,
    PricingError,
    PricingFunctional,
    Segment,
    check_quasiconvexity,
    falsify_cashsub_jump,
    rho_illiquid,
)
from riskcap.scenario import EligibleAsset, ScenarioSpace

TWO_SLOPE = PricingFunctional((Segment(1.0, 0.9), Segment(math.inf, 1.8)))
JUMPY = PricingFunctional((Segment(math.inf, 0.9),), (Jump(2.0, 0.5),))


def test_eval_and_limits():
    assert TWO_SLOPE.eval(1.5) == pytest.approx(1.8)
    assert TWO_SLOPE.eval(-1.0) == pytest.approx(-0.9)
    assert JUMPY.eval(2.0) == pytest.approx(2.3)
    assert JUMPY.left_limit(2.0) == pytest.approx(1.8)
    assert JUMPY.eval(0.0) == 0.0
    assert JUMPY.limits() == (-math.inf, math.inf)


def test_negative_jump_right_continuous():
    pi = PricingFunctional((Segment(math.inf, 1.0),), (Jump(-1.0, 0.5),))
    assert pi.eval(-1.0) == pytest.approx(-1.0)
    assert pi.left_limit(-1.0) == pytest.approx(-1.5)
    assert pi.eval(-0.999) > pi.eval(-1.0)


def test_validation():
    with pytest.raises(PricingError):
        PricingFunctional((Segment(1.0, 0.9),))
    with pytest.raises(PricingError):
        PricingFunctional((Segment(math.inf, -1.0),))
    with pytest.raises(PricingError):
        PricingFunctional((Segment(math.inf, 1.0),), (Jump(1.0, 0.1), Jump(1.0, 0.2)))
    with pytest.raises(PricingError):
        TWO_SLOPE.validate_for(EligibleAsset(1.0, [1, 1]))
    TWO_SLOPE.validate_for(EligibleAsset(0.9, [1, 1]))


def test_json_round_trip():
    for pi in (TWO_SLOPE, JUMPY):
        assert PricingFunctional.from_dict(pi.to_dict()) == pi
    with pytest.raises(PricingError):
        PricingFunctional.from_json('{"segments": [{"upto": "inf"}]}')


def test_composition_toy(space4, x_star, s_star):
    assert rho_illiquid(TVaR(0.5), space4, x_star, s_star, TWO_SLOPE) == pytest.approx(1.8, abs=1e-8)


def test_composition_infinite(space4, s_star):
    assert rho_illiquid(VaR(0.2), space4, [1, 1, 1, -1], s_star, TWO_SLOPE) == math.inf
    assert rho_illiquid(VaR(0.8), space4, [1, 1, 1, 1], s_star, TWO_SLOPE) == -math.inf


def test_linear_pi_is_identity(space4, x_star, s_star):
    pi = PricingFunctional.linear(0.9)
    assert rho_illiquid(TVaR(0.5), space4, x_star, s_star, pi) == pytest.approx(
        rho_value(TVaR(0.5), space4, x_star, s_star), abs=1e-12)


@pytest.mark.parametrize("spec", [TVaR(0.5), Scenario.on(4, [0, 1]), Expectation(0.0),
                                  Shortfall(Exponential(1.0), -1.0)])
def test_quasiconvex_for_convex_sets(space4, s_star, spec):
    rep = check_quasiconvexity(spec, space4, s_star, TWO_SLOPE, samples=300)
    assert rep.claimed and rep.passed


def test_var_quasiconvexity_witness():
    sp = ScenarioSpace.uniform(4)
    cash = EligibleAsset.risk_free(4)
    rep = check_quasiconvexity(VaR(0.25), sp, cash, PricingFunctional.linear(1.0))
    assert not rep.claimed and not rep.passed
    w = rep.witness
    x, y, t = np.array(w["x"]), np.array(w["y"]), w["t"]
    mid = rho_value(VaR(0.25), sp, t * x + (1 - t) * y, cash)
    assert mid > max(rho_value(VaR(0.25), sp, x, cash), rho_value(VaR(0.25), sp, y, cash))


def test_jump_falsifier_toy(space4, s_star):
    w = falsify_cashsub_jump(TVaR(0.5), space4, s_star, JUMPY, lam=0.2)
    np.testing.assert_allclose(w.x, [-2, -2, -2, 0], atol=1e-9)
    assert w.rho_pi_x == pytest.approx(2.3, abs=1e-9)
    assert w.rho_pi_shifted == pytest.approx(1.62, abs=1e-9)
    assert w.gap == pytest.approx(0.68, abs=1e-9) and w.gap > 0.2


def test_jump_falsifier_expectation(space4, s_star):
    w = falsify_cashsub_jump(Expectation(0.0), space4, s_star, JUMPY)
    assert w.gap > w.lam


def test_jump_falsifier_guards(space4, s_star):
    with pytest.raises(ValueError):
        falsify_cashsub_jump(VaR(0.3), space4, s_star, JUMPY)
    with pytest.raises(ValueError):
        falsify_cashsub_jump(TVaR(0.5), space4, s_star, TWO_SLOPE)
    with pytest.raises(ValueError):
        falsify_cashsub_jump(TVaR(0.5), space4, s_star, JUMPY, lam=0.6)
