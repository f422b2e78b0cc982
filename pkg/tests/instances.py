"""Seeded generators of random test instances."""

import math

import numpy as np

from riskcap import (
    CappedLinear,
    EligibleAsset,
    Expectation,
    Exponential,
    Linear,
    Scenario,
    ScenarioSpace,
    Shortfall,
    TVaR,
    VaR,
)
from riskcap.illiquid import Jump, PricingFunctional, Segment

FAMILIES = ("var", "tvar", "shortfall", "scenario", "expectation")


def random_space(rng, n, uniform=None):
    if uniform is None:
        uniform = rng.random() < 0.5
    if uniform:
        return ScenarioSpace.uniform(n)
    w = rng.uniform(0.2, 1.0, n)
    return ScenarioSpace(w / w.sum())


def random_position(rng, n, scale=3.0, decimals=2):
    return np.round(rng.normal(0.0, scale, n), decimals)


def random_asset(rng, n, zero_prob=0.2, positive=False):
    s = np.round(rng.uniform(0.2, 2.5, n), 2)
    if not positive:
        s[rng.random(n) < zero_prob] = 0.0
    if not np.any(s > 0):
        s[0] = 1.0
    return EligibleAsset(float(np.round(rng.uniform(0.5, 1.5), 2)), s)


def random_alpha(rng):
    # stay away from mass sums so the level is never on a knife edge by accident
    return float(np.round(rng.uniform(0.05, 0.95), 3)) + 1e-4


def random_spec(rng, family, n):
    if family == "var":
        return VaR(random_alpha(rng))
    if family == "tvar":
        return TVaR(random_alpha(rng))
    if family == "expectation":
        return Expectation(float(np.round(rng.uniform(-1, 1), 2)))
    if family == "scenario":
        k = int(rng.integers(1, n + 1))
        return Scenario.on(n, sorted(rng.choice(n, size=k, replace=False).tolist()))
    kind = rng.integers(3)
    if kind == 0:
        return Shortfall(Exponential(float(rng.choice([0.5, 1.0, 2.0]))), float(rng.uniform(-3, 0.9)))
    if kind == 1:
        return Shortfall(Linear(), float(rng.uniform(-2, 2)))
    cap = float(rng.uniform(0.5, 3))
    return Shortfall(CappedLinear(cap), float(rng.uniform(-2, cap)))


def random_pi(rng, price, jumps=True):
    """Piecewise-linear pi with pi(1) = price: random slopes and jumps, then rescaled."""
    k = int(rng.integers(1, 4))
    ends = sorted(set(np.round(rng.uniform(-2, 3, k - 1), 2).tolist()))
    segs = [Segment(e, float(rng.uniform(0.3, 2.0))) for e in ends] + [Segment(math.inf, float(rng.uniform(0.3, 2.0)))]
    js = []
    if jumps:
        # unrounded locations, so a closed-form rho / S_0 never lands exactly on a jump
        ats = sorted(set(rng.uniform(-2, 3, int(rng.integers(1, 3))).tolist()))
        js = [Jump(a, float(rng.uniform(0.1, 1.0))) for a in ats]
    raw = PricingFunctional(tuple(segs), tuple(js))
    c = price / raw.eval(1.0)
    return PricingFunctional(tuple(Segment(s.upto, s.slope * c) for s in segs),
                             tuple(Jump(j.at, j.size * c) for j in js))
