"""Capital requirements when the eligible asset can default.

A four-state toy market: the position X loses money in two states, and the
bond used to raise capital pays nothing in the last one. Compare each
acceptance family against the same family with a risk-free asset.
"""

import numpy as np

from riskcap import (
    EligibleAsset,
    Expectation,
    Exponential,
    Scenario,
    ScenarioSpace,
    Shortfall,
    TVaR,
    VaR,
    rho,
)

space = ScenarioSpace.uniform(4)
x = np.array([-2.0, -1.0, 1.0, 3.0])
bond = EligibleAsset(0.9, np.array([1.0, 1.0, 1.0, 0.0]))
cash = EligibleAsset.risk_free(4)

specs = [VaR(0.3), TVaR(0.5), Shortfall(Exponential(1.0), -1.0), Scenario.on(4, [0, 1]), Expectation(0.0)]

print(f"{'acceptance':<52}{'risk-free':>14}{'defaultable':>14}")
for spec in specs:
    a = rho(spec, space, x, cash)
    b = rho(spec, space, x, bond)
    print(f"{spec!r:<52}{a.value.render()!s:>14.10}{b.value.render()!s:>14.10}")

# A loss sitting in the default state cannot be repaired by buying more bonds.
stuck = np.array([1.0, 1.0, 1.0, -1.0])
r = rho(VaR(0.2), space, stuck, bond)
print(f"\nVaR(0.2) of {stuck.tolist()}: {r.value.render()} ({r.reason.value})")

# With a 30% loss budget the same position is fine: the stuck state carries only 25%.
print(f"VaR(0.3) of {stuck.tolist()}: {rho(VaR(0.3), space, stuck, bond).value.render()}")
