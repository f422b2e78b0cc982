"""Dual certificates: pricing functionals that witness the capital requirement.

For TVaR the dual set is generated by densities bounded by p / alpha. Each
vertex, rescaled so that it prices the eligible asset at S_0, gives a lower
bound psi(-X); the best one equals rho exactly.
"""

import numpy as np

from riskcap import EligibleAsset, Scenario, ScenarioSpace, TVaR, dual_rho, dual_vertices, rho_value

space = ScenarioSpace.uniform(4)
x = np.array([-2.0, -1.0, 1.0, 3.0])
bond = EligibleAsset(0.9, np.array([1.0, 1.0, 1.0, 0.0]))

for spec in (TVaR(0.5), Scenario.on(4, [0, 1])):
    vs = dual_vertices(spec, space, bond, x)
    print(f"{spec!r}: {len(vs.certificates)} certificates")
    for c in sorted(vs.certificates, key=lambda c: -c.value):
        print(f"  psi = {np.round(c.psi, 4).tolist()}  psi(-X) = {c.value:.4f}")
    print(f"  dual value {dual_rho(spec, space, x, bond).render():.6f} vs primal {rho_value(spec, space, x, bond):.6f}\n")

# at a 20% level the tail can hide entirely in the default state
vs = dual_vertices(TVaR(0.2), space, bond)
print(f"TVaR(0.2): unbounded directions {[q.tolist() for q in vs.unbounded]}")
print(f"  rho of a loss in the default state: {dual_rho(TVaR(0.2), space, [0, 0, 0, -10], bond).render()}")
