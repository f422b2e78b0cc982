"""Acceptance sets on a finite scenario space.

Five families are supported: Value-at-Risk, Tail Value-at-Risk, shortfall
(expected utility), scenario-based and expectation-based acceptability.
Membership and interior tests are exact on finite spaces; comparisons use the
same non-strict inequalities as the definitions of the sets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np

from .scenario import EventMask, Position, ScenarioError, ScenarioSpace


class SpecError(ValueError):
    """Invalid acceptance-set or utility specification."""


def as_vector(x) -> np.ndarray:
    if isinstance(x, Position):
        return x.x
    return np.asarray(x, dtype=float).reshape(-1)


def _level(alpha) -> float:
    a = float(alpha)
    if not (0.0 < a < 1.0):
        raise SpecError(f"level alpha must lie in (0, 1), got {alpha!r}")
    return a


# --------------------------------------------------------------------------
# utilities


@dataclass(frozen=True)
class Utility:
    kind: ClassVar[str] = ""
    bounded_above: ClassVar[bool] = False
    attains_sup: ClassVar[bool] = False
    strictly_increasing: ClassVar[bool] = True

    @property
    def sup_value(self) -> float:
        raise NotImplementedError

    @property
    def value_at_0(self) -> float:
        return float(self.evaluate(np.zeros(1))[0])

    def evaluate(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Exponential(Utility):
    """u(x) = 1 - exp(-a x)."""

    a: float = 1.0
    kind: ClassVar[str] = "exp"
    bounded_above: ClassVar[bool] = True

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise SpecError(f"exponential utility needs a > 0, got {self.a!r}")

    @property
    def sup_value(self) -> float:
        return 1.0

    def evaluate(self, x):
        # exp overflows to +inf for a*x < -709; u is then -inf, which is what
        # the expected-utility sum should see
        with np.errstate(over="ignore"):
            return 1.0 - np.exp(-self.a * np.asarray(x, dtype=float))

    def to_dict(self) -> dict:
        return {"kind": "exp", "a": self.a}


@dataclass(frozen=True)
class Linear(Utility):
    kind: ClassVar[str] = "linear"

    @property
    def sup_value(self) -> float:
        return math.inf

    def evaluate(self, x):
        return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class CappedLinear(Utility):
    """u(x) = min(x, cap)."""

    cap: float = 1.0
    kind: ClassVar[str] = "capped"
    bounded_above: ClassVar[bool] = True
    attains_sup: ClassVar[bool] = True
    strictly_increasing: ClassVar[bool] = False

    def __post_init__(self):
        if not math.isfinite(self.cap):
            raise SpecError("cap must be finite")

    @property
    def sup_value(self) -> float:
        return float(self.cap)

    def evaluate(self, x):
        return np.minimum(np.asarray(x, dtype=float), self.cap)

    def to_dict(self) -> dict:
        return {"kind": "capped", "cap": self.cap}


# --------------------------------------------------------------------------
# exact evaluators


def var_value(space: ScenarioSpace, x, alpha: float) -> float:
    """VaR_alpha(X) = inf{m : P(X + m < 0) <= alpha}.

    Equal outcomes are merged into one mass block first, so the result does
    not depend on the order of the scenarios.
    """
    alpha = _level(alpha)
    x = space.check(as_vector(x), "position")
    values = np.unique(x)
    # largest distinct value whose strictly-lower mass stays within alpha
    best = 0
    for k in range(1, values.size):
        if math.fsum(space.p[x < values[k]]) <= alpha:
            best = k
        else:
            break
    return float(-values[best]) + 0.0


def _tail_average(p: np.ndarray, x: np.ndarray, alpha: float) -> float:
    order = np.argsort(x, kind="stable")
    acc = []
    used = []
    for i in order:
        room = alpha - math.fsum(used)
        if room <= 0:
            break
        w = min(p[i], room)
        used.append(w)
        acc.append(w * x[i])
    return -math.fsum(acc) / alpha


def tvar_value(space: ScenarioSpace, x, alpha: float) -> float:
    """TVaR_alpha(X), the average of VaR_beta(X) over beta in (0, alpha)."""
    alpha = _level(alpha)
    x = space.check(as_vector(x), "position")
    return _tail_average(space.p, x, alpha) + 0.0


def expected_utility(space: ScenarioSpace, x, u: Utility) -> float:
    x = space.check(as_vector(x), "position")
    vals = u.evaluate(x)
    if np.any(np.isneginf(vals)):
        return -math.inf
    return math.fsum(space.p * vals)


# --------------------------------------------------------------------------
# acceptance sets


@dataclass(frozen=True)
class AcceptanceSpec:
    family: ClassVar[str] = ""
    is_convex: ClassVar[bool] = False
    is_conic: ClassVar[bool] = False
    is_closed: ClassVar[bool] = True

    @property
    def is_coherent(self) -> bool:
        return self.is_convex and self.is_conic

    def validate(self, space: ScenarioSpace) -> None:
        """Raise if the spec cannot be used on ``space``."""

    def accepts(self, space: ScenarioSpace, x: np.ndarray) -> bool:
        raise NotImplementedError

    def interior(self, space: ScenarioSpace, x: np.ndarray) -> bool:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class VaR(AcceptanceSpec):
    """{X : P(X < 0) <= alpha}: conic, closed, not convex."""

    alpha: float
    family: ClassVar[str] = "var"
    is_conic: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", _level(self.alpha))

    def accepts(self, space, x):
        return space.mass(x < 0) <= self.alpha

    def interior(self, space, x):
        # finite space: perturbations can only push zero coordinates below 0
        return space.mass(x <= 0) <= self.alpha

    def to_dict(self):
        return {"type": "var", "alpha": self.alpha}


@dataclass(frozen=True)
class TVaR(AcceptanceSpec):
    """{X : TVaR_alpha(X) <= 0}: closed and coherent."""

    alpha: float
    family: ClassVar[str] = "tvar"
    is_convex: ClassVar[bool] = True
    is_conic: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", _level(self.alpha))

    def accepts(self, space, x):
        return _tail_average(space.p, x, self.alpha) <= 0

    def interior(self, space, x):
        return _tail_average(space.p, x, self.alpha) < 0

    def to_dict(self):
        return {"type": "tvar", "alpha": self.alpha}


@dataclass(frozen=True)
class Shortfall(AcceptanceSpec):
    """{X : E[u(X)] >= alpha}: convex and closed, generally not conic."""

    utility: Utility
    alpha: float
    family: ClassVar[str] = "shortfall"
    is_convex: ClassVar[bool] = True

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a):
            raise SpecError("shortfall level must be finite")
        sup = self.utility.sup_value
        if a > sup or (a == sup and not self.utility.attains_sup):
            raise SpecError(f"shortfall level {a} is not attained by the utility "
                            f"(sup u = {sup}); the acceptance set would be empty")
        object.__setattr__(self, "alpha", a)

    def accepts(self, space, x):
        return expected_utility(space, x, self.utility) >= self.alpha

    def interior(self, space, x):
        # exact for strictly increasing utilities, only sufficient for capped ones
        return expected_utility(space, x, self.utility) > self.alpha

    @property
    def interior_exact(self) -> bool:
        return self.utility.strictly_increasing

    def to_dict(self):
        return {"type": "shortfall", "alpha": self.alpha, "utility": self.utility.to_dict()}


@dataclass(frozen=True)
class Scenario(AcceptanceSpec):
    """{X : X >= 0 on the event}: closed and coherent."""

    event: EventMask
    family: ClassVar[str] = "scenario"
    is_convex: ClassVar[bool] = True
    is_conic: ClassVar[bool] = True

    def __post_init__(self):
        ev = self.event if isinstance(self.event, EventMask) else EventMask(self.event)
        if not ev.mask.any():
            raise SpecError("scenario event must be nonempty (an empty event accepts everything)")
        object.__setattr__(self, "event", ev)

    @classmethod
    def on(cls, n: int, indices) -> "Scenario":
        return cls(EventMask.from_indices(n, indices))

    def validate(self, space):
        if len(self.event) != space.n:
            raise ScenarioError(f"event has length {len(self.event)}, "
                                f"scenario space has {space.n} outcomes")

    def accepts(self, space, x):
        return bool(np.all(x[self.event.mask] >= 0))

    def interior(self, space, x):
        return bool(np.all(x[self.event.mask] > 0))

    def to_dict(self):
        return {"type": "scenario", "event": self.event.indices}


@dataclass(frozen=True)
class Expectation(AcceptanceSpec):
    """{X : E[X] >= alpha}: convex and closed; coherent only for alpha = 0."""

    alpha: float = 0.0
    family: ClassVar[str] = "expectation"
    is_convex: ClassVar[bool] = True

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a):
            raise SpecError("expectation level must be finite")
        object.__setattr__(self, "alpha", a)

    @property
    def is_conic(self) -> bool:  # type: ignore[override]
        return self.alpha == 0

    def accepts(self, space, x):
        return space.expectation(x) >= self.alpha

    def interior(self, space, x):
        return space.expectation(x) > self.alpha

    def to_dict(self):
        return {"type": "expectation", "alpha": self.alpha}


def _prepare(spec: AcceptanceSpec, space: ScenarioSpace, x) -> np.ndarray:
    spec.validate(space)
    return space.check(as_vector(x), "position")


def is_acceptable(spec: AcceptanceSpec, space: ScenarioSpace, x) -> bool:
    return bool(spec.accepts(space, _prepare(spec, space, x)))


def interior_membership(spec: AcceptanceSpec, space: ScenarioSpace, x) -> bool:
    return bool(spec.interior(space, _prepare(spec, space, x)))


# --------------------------------------------------------------------------
# JSON


_UTILITY_KEYS = {"exp": {"kind", "a"}, "linear": {"kind"}, "capped": {"kind", "cap"}}
_SPEC_KEYS = {
    "var": {"type", "alpha"},
    "tvar": {"type", "alpha"},
    "shortfall": {"type", "alpha", "utility"},
    "scenario": {"type", "event"},
    "expectation": {"type", "alpha"},
}


def _check_keys(obj: dict, allowed: set, required: set, what: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise SpecError(f"{what}: unexpected keys {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise SpecError(f"{what}: missing keys {sorted(missing)}")


def _number(obj: dict, key: str) -> float:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{key!r} must be a number, got {v!r}")
    return float(v)


def utility_from_dict(obj: Any) -> Utility:
    if not isinstance(obj, dict) or obj.get("kind") not in _UTILITY_KEYS:
        raise SpecError(f"utility must be an object with kind in {sorted(_UTILITY_KEYS)}")
    kind = obj["kind"]
    keys = _UTILITY_KEYS[kind]
    _check_keys(obj, keys, keys if kind != "exp" else {"kind"}, f"utility {kind!r}")
    if kind == "exp":
        return Exponential(_number(obj, "a") if "a" in obj else 1.0)
    if kind == "capped":
        return CappedLinear(_number(obj, "cap"))
    return Linear()


def spec_from_dict(obj: Any, n: int | None = None) -> AcceptanceSpec:
    """Build a spec from its JSON object; ``n`` is needed for scenario events."""
    if not isinstance(obj, dict) or obj.get("type") not in _SPEC_KEYS:
        raise SpecError(f"acceptance spec must be an object with type in {sorted(_SPEC_KEYS)}")
    kind = obj["type"]
    keys = _SPEC_KEYS[kind]
    _check_keys(obj, keys, keys, f"acceptance {kind!r}")
    if kind == "var":
        return VaR(_number(obj, "alpha"))
    if kind == "tvar":
        return TVaR(_number(obj, "alpha"))
    if kind == "expectation":
        return Expectation(_number(obj, "alpha"))
    if kind == "shortfall":
        return Shortfall(utility_from_dict(obj["utility"]), _number(obj, "alpha"))
    event = obj["event"]
    if not isinstance(event, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in event):
        raise SpecError("scenario event must be a list of integer indices")
    if n is None:
        n = max(event) + 1 if event else 0
    try:
        return Scenario(EventMask.from_indices(n, event))
    except ScenarioError as exc:
        raise SpecError(str(exc)) from None


def spec_from_json(text: str, n: int | None = None) -> AcceptanceSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed acceptance JSON: {exc}") from None
    return spec_from_dict(obj, n)
