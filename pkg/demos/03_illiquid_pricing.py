"""Illiquid eligible assets: the price of lambda units is pi(lambda), not lambda * S_0.

The requirement becomes rho_pi(X) = pi(rho(X) / S_0). Diversification
(quasiconvexity) survives for convex acceptance sets, but a jump in pi
destroys cash subadditivity even for TVaR.
"""

import math

import numpy as np

from riskcap import (
    EligibleAsset,
    Jump,
    PricingFunctional,
    ScenarioSpace,
    Segment,
    TVaR,
    VaR,
    check_quasiconvexity,
    falsify_cashsub_jump,
    rho_illiquid,
)

space = ScenarioSpace.uniform(4)
x = np.array([-2.0, -1.0, 1.0, 3.0])
bond = EligibleAsset(0.9, np.array([1.0, 1.0, 1.0, 0.0]))

# the first unit costs 0.9, further units twice as much
kinked = PricingFunctional((Segment(1.0, 0.9), Segment(math.inf, 1.8)))
print(f"TVaR(0.5) with linear pricing:  {rho_illiquid(TVaR(0.5), space, x, bond, PricingFunctional.linear(0.9)):.6f}")
print(f"TVaR(0.5) with kinked pricing:  {rho_illiquid(TVaR(0.5), space, x, bond, kinked):.6f}")

rep = check_quasiconvexity(TVaR(0.5), space, bond, kinked, samples=500)
print(f"quasiconvexity of TVaR under kinked pricing: {'holds' if rep.passed else 'fails'} on {rep.trials} triples")
rep = check_quasiconvexity(VaR(0.25), space, EligibleAsset.risk_free(4), PricingFunctional.linear(1.0))
print(f"quasiconvexity of VaR(0.25): fails, e.g. {rep.witness['x']} and {rep.witness['y']}")

# a block-size premium: buying the second unit costs an extra 0.5
jumpy = PricingFunctional((Segment(math.inf, 0.9),), (Jump(2.0, 0.5),))
w = falsify_cashsub_jump(TVaR(0.5), space, bond, jumpy, lam=0.2)
print(f"\njump at 2 units: X = {w.x.tolist()}")
print(f"  rho_pi(X) = {w.rho_pi_x:.4f}, rho_pi(X + 0.2) = {w.rho_pi_shifted:.4f}")
print(f"  adding 0.2 in cash lowers the requirement by {w.gap:.4f} > 0.2")
