"""Dual representation of coherent capital requirements on small scenario spaces.

For a closed coherent acceptance set the conjugate term vanishes on the dual
set and

    rho(X) = sup{psi(-X) : psi >= 0, psi(S_T) = S_0, psi in the dual cone of A}.

For TVaR the dual cone is generated by densities q with 0 <= q_i <= p_i / alpha,
so the supremum is a linear-fractional program S_0 E_q[-X] / E_q[S_T] over a
polytope. It is solved by enumerating the polytope's vertices, which keeps the
check free of any optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .acceptance import AcceptanceSpec, Scenario, TVaR, as_vector
from .engine import ExtendedValue, Reason
from .illiquid import PricingFunctional
from .scenario import EligibleAsset, ScenarioSpace, check_compatible

MAX_DUAL_N = 12
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DualCertificate:
    psi: np.ndarray
    value: float = 0.0  # psi(-X) for the position it was evaluated at
    density: np.ndarray | None = field(default=None, repr=False)

    def evaluate(self, x) -> float:
        return math.fsum(self.psi * -as_vector(x))

    def at(self, x) -> "DualCertificate":
        return DualCertificate(self.psi, self.evaluate(x), self.density)

    def is_feasible(self, spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset) -> bool:
        psi = self.psi
        if np.any(psi < 0):
            return False
        if abs(math.fsum(psi * asset.payoff) - asset.price) > FEASIBILITY_TOL:
            return False
        if isinstance(spec, TVaR):
            q = self.density
            return (q is not None and bool(np.all(q <= space.p / spec.alpha + FEASIBILITY_TOL))
                    and abs(math.fsum(q) - 1.0) <= FEASIBILITY_TOL)
        if isinstance(spec, Scenario):
            return not np.any(psi[~spec.event.mask] != 0)
        return False

    def to_dict(self, feasible: bool = True) -> dict:
        return {"psi": self.psi.tolist(), "value": self.value, "feasible": bool(feasible)}


@dataclass(frozen=True, eq=False)
class DualVertexSet:
    certificates: list[DualCertificate]
    # densities with E_q[S_T] = 0; each is a direction along which rho can blow up
    unbounded: list[np.ndarray]


def _check(spec, space, asset):
    if not isinstance(spec, (TVaR, Scenario)):
        raise ValueError("dual check supports TVaR and scenario acceptance only")
    if space.n > MAX_DUAL_N:
        raise ValueError(f"dual vertex enumeration limited to n <= {MAX_DUAL_N}")
    spec.validate(space)
    check_compatible(space, ("asset payoff", asset.payoff))


def tvar_density_vertices(space: ScenarioSpace, alpha: float) -> list[np.ndarray]:
    """Vertices of {q : 0 <= q_i <= p_i / alpha, sum q = 1}.

    At a vertex every coordinate sits at a bound except at most one: a set J
    saturated at p_i / alpha with P(J) <= alpha, and one further coordinate
    absorbing the remainder.
    """
    p, n = space.p, space.n
    cap = p / alpha
    seen: dict[tuple, np.ndarray] = {}
    for bits in range(1 << n):
        J = np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
        pj = math.fsum(p[J])
        if pj > alpha:
            continue
        rest = 1.0 - pj / alpha
        if rest <= 1e-15:
            candidates = [np.where(J, cap, 0.0)]
        else:
            candidates = []
            for k in np.flatnonzero(~J):
                if cap[k] >= rest:
                    q = np.where(J, cap, 0.0)
                    q[k] = rest
                    candidates.append(q)
        for q in candidates:
            seen.setdefault(tuple(np.round(q, 12)), q)
    return list(seen.values())


def dual_vertices(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset,
                  x=None) -> DualVertexSet:
    """Extreme points of the dual set, each normalized so that psi(S_T) = S_0."""
    _check(spec, space, asset)
    s, price = asset.payoff, asset.price
    x = np.zeros(space.n) if x is None else space.check(as_vector(x), "position")
    certs, unbounded = [], []
    if isinstance(spec, TVaR):
        for q in tvar_density_vertices(space, spec.alpha):
            eqs = math.fsum(q * s)
            if eqs == 0:
                unbounded.append(q)
            else:
                certs.append(DualCertificate((price / eqs) * q, density=q).at(x))
    else:
        for i in spec.event.indices:
            e = np.zeros(space.n)
            e[i] = 1.0
            if s[i] > 0:
                certs.append(DualCertificate((price / s[i]) * e).at(x))
            else:
                unbounded.append(e)
    return DualVertexSet(certs, unbounded)


def best_certificate(spec, space, x, asset) -> DualCertificate | None:
    """Maximizing certificate (lowest index on ties), or None when the dual is unbounded or empty."""
    vs = dual_vertices(spec, space, asset, x)
    xv = as_vector(x)
    if any(math.fsum(q * -xv) > 0 for q in vs.unbounded) or not vs.certificates:
        return None
    best = vs.certificates[0]
    for c in vs.certificates[1:]:
        if c.value > best.value:
            best = c
    return best


def _stuck_reason(spec) -> Reason:
    return Reason.TVAR_STUCK_TAIL if isinstance(spec, TVaR) else Reason.SCENARIO_STUCK_LOSS


def dual_rho(spec: AcceptanceSpec, space: ScenarioSpace, x, asset: EligibleAsset) -> ExtendedValue:
    vs = dual_vertices(spec, space, asset, x)
    xv = as_vector(x)
    if any(math.fsum(q * -xv) > 0 for q in vs.unbounded):
        return ExtendedValue.plus_inf(_stuck_reason(spec))
    if not vs.certificates:
        return ExtendedValue.minus_inf(Reason.SCENARIO_UNCONSTRAINED)
    return ExtendedValue.finite(max(c.value for c in vs.certificates))


def dual_rho_illiquid(spec: AcceptanceSpec, space: ScenarioSpace, x, asset: EligibleAsset,
                      pi: PricingFunctional) -> float:
    vs = dual_vertices(spec, space, asset, x)
    xv = as_vector(x)
    if any(math.fsum(q * -xv) > 0 for q in vs.unbounded):
        return math.inf
    if not vs.certificates:
        return pi.limits()[0]
    return max(pi.eval(c.value / asset.price) for c in vs.certificates)
