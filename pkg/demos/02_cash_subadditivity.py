"""When does adding cash reduce the requirement by at least as much?

Cash subadditivity, rho(X + lambda) >= rho(X) - lambda, can fail once the
eligible asset is a defaultable bond. For TVaR the answer is a threshold on
the bond price; for VaR it fails as soon as capital is at risk, and the
search below produces an explicit counterexample.
"""

import numpy as np

from riskcap import EligibleAsset, ScenarioSpace, TVaR, VaR, cash_subadditivity_report, tvar_value

space = ScenarioSpace.uniform(4)
payoff = np.array([1.0, 1.0, 1.0, 0.5])
threshold = -tvar_value(space, payoff, 0.5)
print(f"TVaR(0.5): cash subadditive iff S_0 <= {threshold}")
for price in np.round(np.linspace(0.70, 0.80, 11), 12):
    v = cash_subadditivity_report(TVaR(0.5), space, EligibleAsset(float(price), payoff))
    print(f"  S_0 = {price:.2f}: {v.verdict.value:<4} ({v.criterion.value})")

bond = EligibleAsset(0.9, np.array([1.0, 1.0, 1.0, 0.0]))
v = cash_subadditivity_report(VaR(0.3), space, bond)
w = v.witness
print(f"\nVaR(0.3) with a defaultable bond: {v.verdict.value} ({v.criterion.value})")
print(f"  X = {w.x.tolist()}, lambda = {w.lam}")
print(f"  rho(X + lambda)              = {w.rho_cash:.6f}")
print(f"  rho(X + lambda / S_0 * S_T)  = {w.rho_asset:.6f}")
print(f"  cash buys {w.gap:.6f} more relief than the bond")

safe = EligibleAsset(1.0, np.array([1.0, 1.2, 1.5, 1.0]))
print(f"\nbond that never loses value: {cash_subadditivity_report(VaR(0.3), space, safe).verdict.value}")
