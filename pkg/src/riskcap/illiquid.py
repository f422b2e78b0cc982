"""Illiquid eligible assets: nonlinear pricing rules and the risk measures they induce.

When lambda units of the eligible asset cost pi(lambda) instead of
lambda * S_0, the capital requirement becomes

    rho_pi(X) = inf{pi(lambda) : X + lambda S_T in A} = pi(rho(X) / S_0)

for closed A (all implemented families are closed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .acceptance import AcceptanceSpec, Expectation, TVaR
from .engine import DEFAULT_TOL, EngineError, ExtendedValue, rho
from .scenario import EligibleAsset, ScenarioSpace


class PricingError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    upto: float  # right end of the segment; math.inf for the last one
    slope: float


@dataclass(frozen=True)
class Jump:
    at: float
    size: float


@dataclass(frozen=True)
class PricingFunctional:
    """Strictly increasing piecewise-linear price of lambda units, with upward jumps.

    Anchored at pi(0) = 0. Segment k covers (upto_{k-1}, upto_k]; the first
    segment extends to -inf and the last one must end at +inf. The function is
    right-continuous: at a jump point it takes the upper value.
    """

    segments: tuple[Segment, ...]
    jumps: tuple[Jump, ...] = field(default=())

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        jumps = tuple(sorted((j if isinstance(j, Jump) else Jump(*j) for j in self.jumps),
                             key=lambda j: j.at))
        if not segs:
            raise PricingError("at least one segment is required")
        ends = [float(s.upto) for s in segs]
        if ends[-1] != math.inf:
            raise PricingError("last segment must extend to +inf")
        if any(not math.isfinite(e) for e in ends[:-1]) or any(a >= b for a, b in zip(ends, ends[1:])):
            raise PricingError("segment ends must be finite and strictly increasing")
        for s in segs:
            if not (math.isfinite(s.slope) and s.slope > 0):
                raise PricingError(f"slopes must be positive, got {s.slope!r}")
        ats = [float(j.at) for j in jumps]
        if any(a >= b for a, b in zip(ats, ats[1:])):
            raise PricingError("duplicate jump locations")
        for j in jumps:
            if not (math.isfinite(j.at) and math.isfinite(j.size) and j.size >= 0):
                raise PricingError(f"invalid jump {j!r}")
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "jumps", jumps)

    @classmethod
    def linear(cls, price: float) -> "PricingFunctional":
        return cls((Segment(math.inf, price),))

    def _slope_integral(self, a: float, b: float) -> float:
        """Integral of the slope density over [a, b] (a <= b)."""
        total = []
        left = -math.inf
        for seg in self.segments:
            lo, hi = max(a, left), min(b, seg.upto)
            if hi > lo:
                total.append(seg.slope * (hi - lo))
            left = seg.upto
        return math.fsum(total)

    def _jumps_in(self, a: float, b: float) -> float:
        """Sum of jump sizes located in (a, b]."""
        return math.fsum(j.size for j in self.jumps if a < j.at <= b)

    def __call__(self, lam: float) -> float:
        return self.eval(lam)

    def eval(self, lam: float) -> float:
        lam = float(lam)
        if lam == math.inf or lam == -math.inf:
            return self.limits()[0 if lam < 0 else 1]
        if lam >= 0:
            return self._slope_integral(0.0, lam) + self._jumps_in(0.0, lam)
        return 0.0 - (self._slope_integral(lam, 0.0) + self._jumps_in(lam, 0.0))

    def left_limit(self, lam: float) -> float:
        lam = float(lam)
        if not math.isfinite(lam):
            return self.eval(lam)
        if lam > 0:
            return self._slope_integral(0.0, lam) + math.fsum(j.size for j in self.jumps if 0 < j.at < lam)
        return 0.0 - (self._slope_integral(lam, 0.0) + math.fsum(j.size for j in self.jumps if lam <= j.at <= 0))

    def limits(self) -> tuple[float, float]:
        # terminal slopes are positive, so both tails are unbounded
        return (-math.inf, math.inf)

    @property
    def max_slope(self) -> float:
        return max(s.slope for s in self.segments)

    @property
    def is_continuous(self) -> bool:
        return not any(j.size > 0 for j in self.jumps)

    def first_jump(self) -> Jump | None:
        return next((j for j in self.jumps if j.size > 0), None)

    def validate_for(self, asset: EligibleAsset, tol: float = 1e-12) -> None:
        if abs(self.eval(1.0) - asset.price) > tol * max(1.0, asset.price):
            raise PricingError(f"pi(1) = {self.eval(1.0)!r} does not match the asset price {asset.price!r}")

    def to_dict(self) -> dict:
        return {
            "segments": [{"upto": "inf" if s.upto == math.inf else s.upto, "slope": s.slope}
                         for s in self.segments],
            "jumps": [{"at": j.at, "size": j.size} for j in self.jumps],
        }

    @classmethod
    def from_dict(cls, obj) -> "PricingFunctional":
        if not isinstance(obj, dict) or set(obj) - {"segments", "jumps"} or "segments" not in obj:
            raise PricingError('pricing JSON must be {"segments": [...], "jumps": [...]}')
        segs = []
        for item in obj["segments"]:
            if not isinstance(item, dict) or set(item) != {"upto", "slope"}:
                raise PricingError(f"bad segment {item!r}")
            upto = item["upto"]
            if upto == "inf":
                upto = math.inf
            elif isinstance(upto, bool) or not isinstance(upto, (int, float)):
                raise PricingError(f"bad segment end {upto!r}")
            segs.append(Segment(float(upto), float(item["slope"])))
        jumps = []
        for item in obj.get("jumps", []):
            if not isinstance(item, dict) or set(item) != {"at", "size"}:
                raise PricingError(f"bad jump {item!r}")
            jumps.append(Jump(float(item["at"]), float(item["size"])))
        return cls(tuple(segs), tuple(jumps))

    @classmethod
    def from_json(cls, text: str) -> "PricingFunctional":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise PricingError(f"malformed pricing JSON: {exc}") from None


def pi_eval(pi: PricingFunctional, lam: float) -> float:
    return pi.eval(lam)


def pi_left_limit(pi: PricingFunctional, lam: float) -> float:
    return pi.left_limit(lam)


def pi_limits(pi: PricingFunctional) -> tuple[float, float]:
    return pi.limits()


# --------------------------------------------------------------------------


def compose(value: ExtendedValue, asset: EligibleAsset, pi: PricingFunctional) -> float:
    """pi(rho / S_0) for an already computed rho, as a float in [-inf, inf]."""
    if value.value == math.inf:
        return math.inf  # empty infimum, whatever sup pi is
    if value.value == -math.inf:
        return pi.limits()[0]
    return pi.eval(value.value / asset.price)


def rho_illiquid(spec: AcceptanceSpec, space: ScenarioSpace, x, asset: EligibleAsset,
                 pi: PricingFunctional, tol: float = DEFAULT_TOL) -> float:
    if not spec.is_closed:
        raise ValueError("composition formula needs a closed acceptance set")
    return compose(rho(spec, space, x, asset, tol).value, asset, pi)


@dataclass
class QuasiconvexityReport:
    passed: bool
    claimed: bool
    trials: int
    worst_violation: float
    witness: dict | None = None


def _random_position(rng: np.random.Generator, n: int, scale: float = 3.0) -> np.ndarray:
    return np.round(rng.normal(0.0, scale, n), 3)


def _single_state_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    base = np.ones(n)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            x, y = base.copy(), base.copy()
            x[i] = y[j] = -2.0
            pairs.append((x, y))
    return pairs


def check_quasiconvexity(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset,
                         pi: PricingFunctional, samples: int = 1000, seed: int = 42,
                         tol: float = DEFAULT_TOL) -> QuasiconvexityReport:
    """Test rho_pi(tX + (1-t)Y) <= max(rho_pi(X), rho_pi(Y)) on sampled triples.

    For convex sets the inequality is a theorem and every trial must pass; for
    VaR it is not, and the run reports the first violation it finds
    (structured single-state pairs first, then random ones).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n = space.n
    claimed = spec.is_convex
    worst = -math.inf
    witness = None

    candidates = [] if claimed else [(x, y, 0.5) for x, y in _single_state_pairs(n)]
    trials = 0
    while trials < samples:
        if candidates:
            x, y, t = candidates.pop(0)
        else:
            x, y = _random_position(rng, n), _random_position(rng, n)
            t = float(rng.uniform(0.05, 0.95))
        trials += 1
        fx = rho_illiquid(spec, space, x, asset, pi, tol)
        fy = rho_illiquid(spec, space, y, asset, pi, tol)
        fm = rho_illiquid(spec, space, t * x + (1 - t) * y, asset, pi, tol)
        top = max(fx, fy)
        gap = 0.0 if fm == top else fm - top
        if gap > worst:
            worst = gap
        if gap > 3 * tol and witness is None:
            witness = {"x": x.tolist(), "y": y.tolist(), "t": t, "rho_pi_x": fx, "rho_pi_y": fy,
                       "rho_pi_mid": fm, "gap": gap}
            if not claimed:
                break
    passed = witness is None
    return QuasiconvexityReport(passed, claimed, trials, worst, witness)


@dataclass(frozen=True)
class JumpWitness:
    x: np.ndarray
    lam: float
    rho_pi_x: float
    rho_pi_shifted: float

    @property
    def gap(self) -> float:
        return self.rho_pi_x - self.rho_pi_shifted

    def to_dict(self) -> dict:
        return {"x": self.x.tolist(), "lambda": self.lam, "gap": self.gap,
                "rho_pi_x": self.rho_pi_x, "rho_pi_shifted": self.rho_pi_shifted}


def falsify_cashsub_jump(spec: AcceptanceSpec, space: ScenarioSpace, asset: EligibleAsset,
                         pi: PricingFunctional, lam: float | None = None,
                         tol: float = DEFAULT_TOL) -> JumpWitness:
    """Break cash subadditivity of rho_pi using a jump of the pricing rule.

    Places X = xi * S_T so that rho(X) / S_0 sits exactly at the jump point
    x0; adding lam < gamma in cash then drops the price by at least the jump
    size gamma > lam. The result is re-checked through the engine.
    """
    if not isinstance(spec, (TVaR, Expectation)):
        raise ValueError("jump falsifier supports TVaR and expectation acceptance")
    jump = pi.first_jump()
    if jump is None:
        raise ValueError("pricing functional is continuous: nothing to falsify")
    pi.validate_for(asset)
    base = rho(spec, space, np.zeros(space.n), asset, tol)
    if not base.value.is_finite:
        raise ValueError("rho(0) must be finite")
    gamma = pi.eval(jump.at) - pi.left_limit(jump.at)
    if lam is None:
        lam = gamma / 2
    if not 0 < lam < gamma:
        raise ValueError(f"lambda must lie in (0, {gamma})")
    # Rounding (or a bisected rho(0) overshooting by up to tol) can leave
    # rho(X) / S_0 just left of the jump, so aim slightly to its right too.
    r0 = base.value.value
    seeds = [r0, r0 - base.residual]
    nudges = [0.0, 1e-12 * max(1.0, abs(jump.at)), 4 * tol / asset.price]
    w = None
    for eta in nudges:
        for seed in dict.fromkeys(seeds):
            x = (seed / asset.price - jump.at - eta) * asset.payoff + 0.0
            rx = rho_illiquid(spec, space, x, asset, pi, tol)
            rs = rho_illiquid(spec, space, x + lam, asset, pi, tol)
            w = JumpWitness(x, float(lam), rx, rs)
            if w.gap > lam:
                return w
    raise EngineError(f"jump construction failed verification (gap {w.gap} <= lambda {lam})")
