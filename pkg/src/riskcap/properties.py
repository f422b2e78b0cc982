"""Executable checks of structural properties of rho_{A,S}.

The main entry point is :func:`cash_subadditivity_report`, which decides
whether rho(X + lambda) >= rho(X) - lambda holds for all X and lambda > 0.
Exact criteria are used wherever one is available. Otherwise a seeded
counterexample search runs, and a failed search is reported as Inconclusive
rather than Yes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import numpy as np

from .acceptance import (
    AcceptanceSpec,
    Expectation,
    Scenario,
    Shortfall,
    TVaR,
    VaR,
    as_vector,
    interior_membership,
    is_acceptable,
    tvar_value,
)
from .engine import DEFAULT_TOL, lipschitz_bound, rho, rho_value
from .scenario import EligibleAsset, ScenarioSpace, check_compatible

DEFAULT_SEED = 42
DEFAULT_BUDGET = 10_000
MAX_FULL_MASK_N = 12

C_GRID = (0.0, 0.5, 1.0, 2.0)
EPS_GRID = (1e-3, 1e-1)
LAMBDA_FACTORS = (0.25, 0.5, 1.0, 2.0)


class Verdict(str, Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


class Criterion(str, Enum):
    SUFFICIENT_NO_CAPITAL_AT_RISK = "SufficientNoCapitalAtRisk"
    COHERENT_MEMBERSHIP = "CoherentMembership"
    TVAR_THRESHOLD = "TVaRThreshold"
    SCENARIO_OVERLAP = "ScenarioOverlap"
    EXPECTATION_PRICE = "ExpectationPrice"
    EMPIRICAL_COUNTEREXAMPLE = "EmpiricalCounterexample"
    SEARCH_EXHAUSTED = "SearchExhausted"


EXACT_CRITERIA = {
    Criterion.SUFFICIENT_NO_CAPITAL_AT_RISK,
    Criterion.COHERENT_MEMBERSHIP,
    Criterion.TVAR_THRESHOLD,
    Criterion.SCENARIO_OVERLAP,
    Criterion.EXPECTATION_PRICE,
}


def _render(v: float):
    if v == math.inf:
        return "+inf"
    if v == -math.inf:
        return "-inf"
    return v


@dataclass(frozen=True, eq=False)
class CashSubWitness:
    """X and lambda with rho(X + lambda) < rho(X + (lambda / S_0) S_T)."""

    x: np.ndarray
    lam: float
    rho_cash: float
    rho_asset: float

    @property
    def gap(self) -> float:
        return self.rho_asset - self.rho_cash

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "lambda": self.lam, "gap": _render(self.gap)}


@dataclass(frozen=True)
class CashSubVerdict:
    verdict: Verdict
    criterion: Criterion
    witness: CashSubWitness | None = None

    def __post_init__(self):
        if self.verdict is Verdict.YES and self.criterion not in EXACT_CRITERIA:
            raise ValueError("a Yes verdict needs an exact criterion")
        if self.verdict is Verdict.NO and self.witness is None and self.criterion not in EXACT_CRITERIA:
            raise ValueError("an empirical No verdict needs a witness")

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value, "criterion": self.criterion.value}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def _gap(a: float, b: float) -> float:
    """a - b on the extended line, with equal infinities counted as no gap."""
    return 0.0 if a == b else a - b


def capital_at_risk_mass(space: ScenarioSpace, asset: EligibleAsset) -> float:
    """P(S_T < S_0): probability that the capital invested in the eligible asset is at risk."""
    return space.mass(asset.payoff < asset.price)


def shifted_payoff_acceptable(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset) -> bool:
    """Membership of S_T - S_0 in A; for closed coherent A this decides cash subadditivity."""
    return is_acceptable(spec, space, asset.payoff - asset.price)


def verify_cash_witness(spec, space, asset, x, lam, tol=DEFAULT_TOL) -> CashSubWitness | None:
    """Recompute both sides through the engine; keep the pair only if it violates."""
    x = as_vector(x)
    r_cash = rho_value(spec, space, x + lam, asset, tol)
    r_asset = rho_value(spec, space, x + (lam / asset.price) * asset.payoff, asset, tol)
    if _gap(r_asset, r_cash) > 3 * tol:
        return CashSubWitness(x.copy(), float(lam), r_cash, r_asset)
    return None


def _masks(n: int, rng: np.random.Generator, count: int) -> Iterator[np.ndarray]:
    if n <= MAX_FULL_MASK_N:
        for bits in range(1, 1 << n):
            yield np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
    else:
        for _ in range(count):
            m = rng.random(n) < 0.5
            if m.any():
                yield m


def _structured_candidates(space, asset, rng) -> Iterator[tuple[np.ndarray, float]]:
    # X = -(c S_T + eps) 1_B: with c = lambda / S_0 the cash top-up rescues the
    # states of B where S_T < S_0 while the asset top-up rescues none of B
    s, price = asset.payoff, asset.price
    masks = list(_masks(space.n, rng, 4096))
    for c in C_GRID:
        for f in LAMBDA_FACTORS:
            for eps in EPS_GRID:
                for b in masks:
                    yield np.where(b, -(c * s + eps), 0.0), f * price


def _random_candidates(space, asset, rng) -> Iterator[tuple[np.ndarray, float]]:
    scale = 1.0 + float(np.max(asset.payoff))
    while True:
        x = np.round(rng.normal(0.0, scale, space.n), 4)
        lam = float(rng.choice(LAMBDA_FACTORS)) * asset.price if rng.random() < 0.5 \
            else float(rng.uniform(0.01, 2.0)) * asset.price
        yield x, lam


def _is_violation_candidate(spec, space, asset, x, lam, tol) -> bool:
    # Cheap screen: with m1 = rho(X + lam), the pair cannot violate when
    # X + (lam / S_0) S_T + ((m1 + 3 tol) / S_0) S_T is already acceptable.
    m1 = rho_value(spec, space, x + lam, asset, tol)
    if m1 == math.inf:
        return False
    if m1 == -math.inf:
        return True
    probe = x + ((lam + m1 + 3 * tol) / asset.price) * asset.payoff
    return not is_acceptable(spec, space, probe)


def falsify_cash_subadditivity(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset,
                               budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
                               tol: float = DEFAULT_TOL) -> CashSubWitness | None:
    """Search for a cash-subadditivity violation; deterministic in (seed, budget).

    Structured candidates come first, then seeded random positions. Each
    trial counts against ``budget`` and the first engine-verified violation
    is returned.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    spec.validate(space)
    check_compatible(space, ("asset payoff", asset.payoff))
    rng = np.random.default_rng(seed)
    trials = itertools.chain(_structured_candidates(space, asset, rng),
                             _random_candidates(space, asset, rng))
    for x, lam in itertools.islice(trials, budget):
        if _is_violation_candidate(spec, space, asset, x, lam, tol):
            w = verify_cash_witness(spec, space, asset, x, lam, tol)
            if w is not None:
                return w
    return None


def _exact_no_witness(spec, space, asset, tol) -> CashSubWitness | None:
    # X = -S_0, lambda = S_0 compares rho(0) with rho(S_T - S_0)
    if isinstance(spec, Expectation):
        return verify_cash_witness(spec, space, asset, np.zeros(space.n), asset.price, tol)
    return verify_cash_witness(spec, space, asset, np.full(space.n, -asset.price), asset.price, tol)


def cash_subadditivity_report(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset,
                              budget: int = DEFAULT_BUDGET, seed: int = DEFAULT_SEED,
                              tol: float = DEFAULT_TOL) -> CashSubVerdict:
    spec.validate(space)
    check_compatible(space, ("asset payoff", asset.payoff))
    s, price = asset.payoff, asset.price
    if capital_at_risk_mass(space, asset) == 0:
        return CashSubVerdict(Verdict.YES, Criterion.SUFFICIENT_NO_CAPITAL_AT_RISK)

    if isinstance(spec, (TVaR, Scenario, Expectation)):
        if isinstance(spec, TVaR):
            ok, crit = tvar_value(space, s, spec.alpha) <= -price, Criterion.TVAR_THRESHOLD
        elif isinstance(spec, Scenario):
            ok, crit = space.mass(spec.event.mask & (s < price)) == 0, Criterion.SCENARIO_OVERLAP
        else:
            ok, crit = space.expectation(s) >= price, Criterion.EXPECTATION_PRICE
        if ok:
            return CashSubVerdict(Verdict.YES, crit)
        return CashSubVerdict(Verdict.NO, crit, _exact_no_witness(spec, space, asset, tol))

    if isinstance(spec, (VaR, Shortfall)):
        w = falsify_cash_subadditivity(spec, space, asset, budget, seed, tol)
        if w is not None:
            return CashSubVerdict(Verdict.NO, Criterion.EMPIRICAL_COUNTEREXAMPLE, w)
        return CashSubVerdict(Verdict.INCONCLUSIVE, Criterion.SEARCH_EXHAUSTED)
    raise TypeError(f"unsupported spec {spec!r}")


# --------------------------------------------------------------------------
# change of numeraire


@dataclass(frozen=True)
class NumeraireCheck:
    passed: bool
    direct: float
    discounted: float


def check_numeraire_identity(spec: AcceptanceSpec, space: ScenarioSpace, x, asset: EligibleAsset,
                             tol: float = DEFAULT_TOL) -> NumeraireCheck:
    """Compare rho_{A,S}(X) with S_0 * rho_A(X / S_T) computed with the risk-free asset.

    Only VaR and scenario sets are supported: their membership depends on
    coordinate signs alone, so dividing by S_T maps the set onto itself.
    """
    if not isinstance(spec, (VaR, Scenario)):
        raise ValueError("numeraire identity is only checked for VaR and scenario acceptance")
    if asset.min_payoff <= 0:
        raise ValueError("discounting fails: the payoff vanishes in some state")
    x = space.check(as_vector(x), "position")
    direct = rho_value(spec, space, x, asset, tol)
    unit = EligibleAsset.risk_free(space.n)
    discounted = asset.price * rho_value(spec, space, x / asset.payoff, unit, tol)
    passed = _gap(direct, discounted) == 0 or abs(direct - discounted) <= tol
    return NumeraireCheck(bool(passed), direct, discounted)


# --------------------------------------------------------------------------
# axiom battery


@dataclass
class AxiomResult:
    name: str
    claimed: bool
    trials: int = 0
    failures: int = 0
    worst_violation: float = -math.inf
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, violation: float, allowance: float, witness: dict) -> None:
        self.trials += 1
        if violation > self.worst_violation:
            self.worst_violation = violation
        if violation > allowance:
            self.failures += 1
            if self.witness is None:
                self.witness = {**witness, "violation": _render(violation)}

    def to_dict(self) -> dict:
        return {"claimed": self.claimed, "trials": self.trials, "failures": self.failures,
                "worst_violation": _render(self.worst_violation) if self.trials else None,
                "witness": self.witness}


@dataclass
class AxiomReport:
    results: dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def claimed_pass(self) -> bool:
        return all(r.passed for r in self.results.values() if r.claimed)

    def __getitem__(self, name: str) -> AxiomResult:
        return self.results[name]

    def to_dict(self) -> dict:
        return {name: r.to_dict() for name, r in self.results.items()}


def _rand_x(rng, n):
    return np.round(rng.normal(0.0, 3.0, n), 3)


def axiom_suite(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset,
                samples: int = 1000, seed: int = DEFAULT_SEED, tol: float = DEFAULT_TOL) -> AxiomReport:
    """Randomized battery: S-additivity, monotonicity, the membership sandwich,
    convexity and positive homogeneity where the set has them, and the
    Lipschitz bound when S_T is bounded away from zero.

    Violations are raw excesses; each axiom has its own allowance (2 tol for
    S-additivity, monotonicity and Lipschitz, 3 tol for convexity, (1 + lambda)
    tol for homogeneity, tol for the sandwich). Convexity of a nonconvex set
    is run as a search and its violations are reported, not counted as failures.
    """
    spec.validate(space)
    check_compatible(space, ("asset payoff", asset.payoff))
    rng = np.random.default_rng(seed)
    n, s, price = space.n, asset.payoff, asset.price

    def r(x):
        return rho_value(spec, space, x, asset, tol)

    lip = lipschitz_bound(space, asset)
    report = AxiomReport()
    add = report.results.setdefault
    s_add = add("s_additivity", AxiomResult("s_additivity", True))
    mono = add("monotonicity", AxiomResult("monotonicity", True))
    sand = add("sandwich", AxiomResult("sandwich", True))
    conv = add("convexity", AxiomResult("convexity", spec.is_convex))
    homo = add("positive_homogeneity", AxiomResult("positive_homogeneity", spec.is_conic))
    lipr = add("lipschitz", AxiomResult("lipschitz", True)) if lip is not None else None

    for _ in range(samples):
        x = _rand_x(rng, n)
        rx = r(x)

        lam = float(rng.uniform(-2.0, 2.0))
        shifted = r(x + lam * s)
        if math.isfinite(rx) and math.isfinite(shifted):
            v = abs(shifted - (rx - lam * price))
        else:
            v = 0.0 if shifted == rx else math.inf
        s_add.record(v, 2 * tol, {"x": x.tolist(), "lambda": lam})

        bump = np.where(rng.random(n) < 0.3, 0.0, rng.exponential(1.0, n))
        mono.record(_gap(r(x + bump), rx), 2 * tol, {"x": x.tolist(), "bump": bump.tolist()})

        if math.isfinite(rx):
            # probe around the acceptance boundary along S_T
            delta = float(rng.choice([0.0, rng.uniform(-1, 1), rng.uniform(-1e-6, 1e-6)]))
            xb = x + ((rx + delta) / price) * s
            if is_acceptable(spec, space, xb):
                v = r(xb)
                sand.record(v, tol, {"x": xb.tolist(), "case": "acceptable"})
            if interior_membership(spec, space, xb):
                v = r(xb)
                # interior points need rho < 0; only a positive value counts
                sand.record(v, tol, {"x": xb.tolist(), "case": "interior"})

        y = _rand_x(rng, n)
        t = float(rng.uniform(0.05, 0.95))
        ry = r(y)
        rhs = t * rx + (1 - t) * ry
        if not math.isnan(rhs):
            conv.record(_gap(r(t * x + (1 - t) * y), rhs), 3 * tol,
                        {"x": x.tolist(), "y": y.tolist(), "t": t})

        k = float(rng.uniform(0.05, 2.0))
        scaled = r(k * x)
        if math.isfinite(rx) and math.isfinite(scaled):
            v = abs(scaled - k * rx)
        else:
            v = 0.0 if scaled == rx else math.inf
        homo.record(v, (1 + k) * tol, {"x": x.tolist(), "lambda": k})

        if lipr is not None:
            dist = float(np.max(np.abs(x - y)))
            lipr.record(abs(rx - ry) - lip * dist, 2 * tol, {"x": x.tolist(), "y": y.tolist()})

    if not spec.is_convex:
        _search_convexity_violation(spec, space, asset, conv, rng, tol)
    return report


def _search_convexity_violation(spec, space, asset, result: AxiomResult, rng, tol, tries: int = 2000):
    if result.witness is not None:
        return
    n = space.n
    s = asset.payoff

    def r(x):
        return rho_value(spec, space, x, asset, tol)

    def pairs():
        # two positions failing in different single states
        for i in range(n):
            for j in range(n):
                if i != j and s[i] > 0 and s[j] > 0:
                    x, y = np.ones(n), np.ones(n)
                    x[i] = y[j] = -2.0
                    yield x, y, 0.5
        for _ in range(tries):
            yield _rand_x(rng, n), _rand_x(rng, n), float(rng.uniform(0.05, 0.95))

    for x, y, t in pairs():
        rx, ry = r(x), r(y)
        rhs = t * rx + (1 - t) * ry
        if math.isnan(rhs):
            continue
        v = _gap(r(t * x + (1 - t) * y), rhs)
        if v > result.worst_violation:
            result.worst_violation = v
        if v > 3 * tol:
            result.failures += 1
            result.witness = {"x": x.tolist(), "y": y.tolist(), "t": t, "violation": _render(v)}
            return


# --------------------------------------------------------------------------
# VaR discontinuity


@dataclass(frozen=True, eq=False)
class DiscontinuityProbe:
    x: np.ndarray
    event: np.ndarray
    rho_x: float
    rho_perturbed: float

    @property
    def jump(self) -> float:
        return _gap(self.rho_perturbed, self.rho_x)


def achievable_event(space: ScenarioSpace, alpha: float, allowed: np.ndarray) -> np.ndarray | None:
    """A subset of ``allowed`` whose mass equals alpha exactly, or None."""
    idx = np.flatnonzero(allowed)
    if idx.size > 20:
        raise ValueError("event search limited to 20 candidate states")
    for k in range(1, idx.size + 1):
        for combo in itertools.combinations(idx, k):
            mask = np.zeros(space.n, dtype=bool)
            mask[list(combo)] = True
            if space.mass(mask) == alpha:
                return mask
    return None


def var_discontinuity_probe(space: ScenarioSpace, asset: EligibleAsset, alpha: float,
                            eps: float = 1e-3, delta: float = 1e-9,
                            tol: float = DEFAULT_TOL) -> DiscontinuityProbe:
    """Compare rho(X) and rho(X - delta) for X = -(S_T + eps) 1_A with P(A) = alpha.

    X fails exactly on A, so rho(X) <= 0. Lowering X by delta makes every
    default state (S_T = 0) outside A fail for good, so A has to be rescued,
    which costs more than S_0. Without default states outside A the finite-space
    profile is continuous and the measured jump is of order delta.
    """
    spec = VaR(alpha)
    spec.validate(space)
    event = achievable_event(space, alpha, asset.payoff > 0)
    if event is None:
        raise ValueError(f"alpha = {alpha!r} is not the mass of any event inside {{S_T > 0}}")
    x = np.where(event, -(asset.payoff + eps), 0.0)
    return DiscontinuityProbe(x, event, rho_value(spec, space, x, asset, tol),
                              rho_value(spec, space, x - delta, asset, tol))
