"""Capital requirements rho_{A,S}(X) = inf{m : X + (m / S_0) S_T in A}.

Every computation first classifies the instance from the limits of the
membership profile m -> [X + (m / S_0) S_T in A]. Finite instances are then
solved in closed form (VaR, scenario, expectation) or by bisection on the
monotone membership predicate (TVaR, shortfall).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .acceptance import (
    AcceptanceSpec,
    Expectation,
    Scenario,
    Shortfall,
    TVaR,
    VaR,
    _tail_average,
    as_vector,
    expected_utility,
)
from .scenario import EligibleAsset, ScenarioSpace, check_compatible

DEFAULT_TOL = 1e-9
_MAX_DOUBLINGS = 64


class EngineError(RuntimeError):
    """Classification and membership profile disagree (a bug, never an input error)."""


class Tag(str, Enum):
    FINITE = "finite"
    PLUS_INF = "+inf"
    MINUS_INF = "-inf"


class Reason(str, Enum):
    VAR_STUCK_MASS = "VarStuckMass"
    VAR_BOTTOMLESS = "VarBottomless"
    TVAR_STUCK_TAIL = "TvarStuckTail"
    SHORTFALL_CEILING = "ShortfallCeiling"
    SCENARIO_STUCK_LOSS = "ScenarioStuckLoss"
    SCENARIO_UNCONSTRAINED = "ScenarioUnconstrained"


REASON_TEXT = {
    Reason.VAR_STUCK_MASS: "P(X<0, S_T=0) exceeds alpha",
    Reason.VAR_BOTTOMLESS: "P(S_T>0) + P(X<0, S_T=0) <= alpha",
    Reason.TVAR_STUCK_TAIL: "the alpha-tail cannot leave {S_T=0} and its average loss is positive",
    Reason.SHORTFALL_CEILING: "sup_m E[u(X + m S_T / S_0)] does not reach alpha",
    Reason.SCENARIO_STUCK_LOSS: "a loss on the event falls where S_T = 0",
    Reason.SCENARIO_UNCONSTRAINED: "S_T vanishes on the event and X >= 0 there",
}


class Method(str, Enum):
    CLOSED_FORM = "ClosedForm"
    BISECTION = "Bisection"


@dataclass(frozen=True)
class ExtendedValue:
    """A value in [-inf, +inf]; infinite values carry the reason they are infinite."""

    value: float
    reason: Reason | None = None

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtendedValue cannot be NaN")
        if math.isinf(v) != (self.reason is not None):
            raise ValueError("reason must be given exactly for infinite values")
        object.__setattr__(self, "value", v + 0.0)

    @classmethod
    def finite(cls, v: float) -> "ExtendedValue":
        if not math.isfinite(v):
            raise ValueError(f"not a finite value: {v}")
        return cls(v)

    @classmethod
    def plus_inf(cls, reason: Reason) -> "ExtendedValue":
        return cls(math.inf, reason)

    @classmethod
    def minus_inf(cls, reason: Reason) -> "ExtendedValue":
        return cls(-math.inf, reason)

    @property
    def tag(self) -> Tag:
        if self.value == math.inf:
            return Tag.PLUS_INF
        if self.value == -math.inf:
            return Tag.MINUS_INF
        return Tag.FINITE

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self):
        return self.value

    def render(self):
        """JSON-friendly form: a float, or the strings "+inf" / "-inf"."""
        return self.value if self.is_finite else self.tag.value


class Finiteness(NamedTuple):
    tag: Tag
    reason: Reason | None = None

    @property
    def is_finite(self) -> bool:
        return self.tag is Tag.FINITE


@dataclass(frozen=True)
class RhoResult:
    value: ExtendedValue
    method: Method
    iterations: int = 0
    residual: float = 0.0

    def __float__(self):
        return self.value.value

    @property
    def tag(self) -> Tag:
        return self.value.tag

    @property
    def reason(self) -> Reason | None:
        return self.value.reason


def _inputs(spec, space, x, asset) -> tuple[np.ndarray, np.ndarray]:
    spec.validate(space)
    x = as_vector(x)
    check_compatible(space, ("position", x), ("asset payoff", asset.payoff))
    return x, asset.payoff


# --------------------------------------------------------------------------
# classification


def classify_finiteness(spec: AcceptanceSpec, space: ScenarioSpace, x,
                        asset: EligibleAsset) -> Finiteness:
    x, s = _inputs(spec, space, x, asset)
    p = space.p
    zero = s == 0
    if isinstance(spec, VaR):
        stuck = (x < 0) & zero
        if space.mass(stuck) > spec.alpha:
            return Finiteness(Tag.PLUS_INF, Reason.VAR_STUCK_MASS)
        if space.mass(stuck | ~zero) <= spec.alpha:
            return Finiteness(Tag.MINUS_INF, Reason.VAR_BOTTOMLESS)
        return Finiteness(Tag.FINITE)
    if isinstance(spec, TVaR):
        # As m -> inf the states with s > 0 leave the tail, unless {s = 0}
        # alone can carry mass alpha; the limit is then the tail average there.
        if space.mass(zero) >= spec.alpha and _tail_average(p[zero], x[zero], spec.alpha) > 0:
            return Finiteness(Tag.PLUS_INF, Reason.TVAR_STUCK_TAIL)
        return Finiteness(Tag.FINITE)
    if isinstance(spec, Shortfall):
        u = spec.utility
        if not u.bounded_above:
            return Finiteness(Tag.FINITE)
        stuck_u = u.evaluate(x[zero])
        if np.any(np.isneginf(stuck_u)):
            ceiling = -math.inf
        else:
            ceiling = math.fsum(np.concatenate([p[~zero] * u.sup_value, p[zero] * stuck_u]))
        if ceiling < spec.alpha or (ceiling == spec.alpha and not u.attains_sup):
            return Finiteness(Tag.PLUS_INF, Reason.SHORTFALL_CEILING)
        return Finiteness(Tag.FINITE)
    if isinstance(spec, Scenario):
        ev = spec.event.mask
        if np.any(ev & zero & (x < 0)):
            return Finiteness(Tag.PLUS_INF, Reason.SCENARIO_STUCK_LOSS)
        if not np.any(ev & ~zero):
            return Finiteness(Tag.MINUS_INF, Reason.SCENARIO_UNCONSTRAINED)
        return Finiteness(Tag.FINITE)
    if isinstance(spec, Expectation):
        return Finiteness(Tag.FINITE)
    raise TypeError(f"unsupported acceptance spec {spec!r}")


# --------------------------------------------------------------------------
# closed forms


def _var_closed_form(spec: VaR, space, x, asset) -> float:
    s = asset.payoff
    live = s > 0
    stuck = (x < 0) & ~live
    breakpoints = np.full(s.shape, math.nan)
    breakpoints[live] = -asset.price * x[live] / s[live]
    for b in np.unique(breakpoints[live]):
        # failure mass at m = b: stuck states plus those whose breakpoint lies above b
        failing = stuck | (live & (breakpoints > b))
        if space.mass(failing) <= spec.alpha:
            return float(b)
    raise EngineError("classification/profile inconsistency: VaR never accepts")


def _scenario_closed_form(spec: Scenario, x, asset) -> float:
    sel = spec.event.mask & (asset.payoff > 0)
    return asset.price * float(np.max(-x[sel] / asset.payoff[sel]))


def _expectation_closed_form(spec: Expectation, space, x, asset) -> float:
    return asset.price * (spec.alpha - space.expectation(x)) / space.expectation(asset.payoff)


# --------------------------------------------------------------------------
# bisection


def bracket_seed(x: np.ndarray, asset: EligibleAsset) -> float:
    s = asset.payoff
    return asset.price * (1.0 + float(np.max(np.abs(x))) / float(s[s > 0].min()))


def _bisect(spec, space, x, asset, tol) -> tuple[float, int, float]:
    s, price = asset.payoff, asset.price

    def ok(m: float) -> bool:
        return spec.accepts(space, x + (m / price) * s)

    seed = bracket_seed(x, asset)
    limit = seed * 2.0 ** _MAX_DOUBLINGS
    lo, hi = -seed, seed
    steps = 0
    while not ok(hi):
        lo, hi = hi, 2.0 * hi
        steps += 1
        if hi > limit:
            raise EngineError("classification/profile inconsistency: no accepting capital found")
    while ok(lo):
        lo, hi = 2.0 * lo, lo
        steps += 1
        if lo < -limit:
            raise EngineError("classification/profile inconsistency: every capital accepted")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break  # float resolution reached
        if ok(mid):
            hi = mid
        else:
            lo = mid
        steps += 1
    # hi is an accepting amount within tol of the infimum
    return hi, steps, hi - lo


def rho(spec: AcceptanceSpec, space: ScenarioSpace, x, asset: EligibleAsset,
        tol: float = DEFAULT_TOL) -> RhoResult:
    """Capital requirement of ``x`` for acceptance set ``spec`` and eligible asset ``asset``.

    Bisection results lie in [rho, rho + tol] and the returned amount itself
    makes the position acceptable.
    """
    if not (tol > 0 and math.isfinite(tol)):
        raise ValueError(f"tol must be positive, got {tol!r}")
    x, _ = _inputs(spec, space, x, asset)
    cls = classify_finiteness(spec, space, x, asset)
    if cls.tag is Tag.PLUS_INF:
        return RhoResult(ExtendedValue.plus_inf(cls.reason), Method.CLOSED_FORM)
    if cls.tag is Tag.MINUS_INF:
        return RhoResult(ExtendedValue.minus_inf(cls.reason), Method.CLOSED_FORM)

    if isinstance(spec, VaR):
        return RhoResult(ExtendedValue.finite(_var_closed_form(spec, space, x, asset)), Method.CLOSED_FORM)
    if isinstance(spec, Scenario):
        return RhoResult(ExtendedValue.finite(_scenario_closed_form(spec, x, asset)), Method.CLOSED_FORM)
    if isinstance(spec, Expectation):
        return RhoResult(ExtendedValue.finite(_expectation_closed_form(spec, space, x, asset)),
                         Method.CLOSED_FORM)
    value, steps, residual = _bisect(spec, space, x, asset, tol)
    return RhoResult(ExtendedValue.finite(value), Method.BISECTION, steps, residual)


def rho_value(spec, space, x, asset, tol: float = DEFAULT_TOL) -> float:
    """``rho`` as a plain float (possibly infinite)."""
    return rho(spec, space, x, asset, tol).value.value


def rho_batch(spec, space, xs: Sequence, asset, tol: float = DEFAULT_TOL) -> list[RhoResult]:
    return [rho(spec, space, x, asset, tol) for x in xs]


def lipschitz_bound(space: ScenarioSpace, asset: EligibleAsset) -> float | None:
    """Sup-norm Lipschitz constant S_0 / min S_T, valid for every family; None if S_T touches 0."""
    check_compatible(space, ("asset payoff", asset.payoff))
    m = asset.min_payoff
    if m <= 0:
        return None
    return asset.price / m
