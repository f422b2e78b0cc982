"""Brute-force reference computations for tests.

Nothing here imports the engine. Memberships are re-derived from the set
definitions and evaluated row-wise on whole batches of positions, which is
what makes a 10^6-point grid scan affordable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .acceptance import (
    AcceptanceSpec,
    Expectation,
    Scenario,
    Shortfall,
    TVaR,
    VaR,
    as_vector,
    is_acceptable,
    var_value,
)
from .scenario import EligibleAsset, ScenarioSpace

MAX_GRID = 10**7
MAX_PERTURB_N = 16
_CHUNK = 200_000


def accepts_rows(spec: AcceptanceSpec, space: ScenarioSpace, rows: np.ndarray) -> np.ndarray:
    """Membership of every row of ``rows`` (shape (k, n)) straight from the definitions."""
    p = space.p
    rows = np.atleast_2d(rows)
    if isinstance(spec, VaR):
        return (rows < 0).astype(float) @ p <= spec.alpha
    if isinstance(spec, TVaR):
        order = np.argsort(rows, axis=1, kind="stable")
        xs = np.take_along_axis(rows, order, axis=1)
        ps = p[order]
        before = np.cumsum(ps, axis=1) - ps
        w = np.clip(spec.alpha - before, 0.0, ps)
        return -(w * xs).sum(axis=1) / spec.alpha <= 0
    if isinstance(spec, Shortfall):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = spec.utility.evaluate(rows)
            eu = vals @ p
        eu = np.where(np.isnan(eu), -np.inf, eu)
        return eu >= spec.alpha
    if isinstance(spec, Scenario):
        return np.all(rows[:, spec.event.mask] >= 0, axis=1)
    if isinstance(spec, Expectation):
        return rows @ p >= spec.alpha
    raise TypeError(f"unsupported spec {spec!r}")


@dataclass(frozen=True)
class GridResult:
    """Outcome of a grid scan: the smallest accepting grid point, or a sentinel."""

    value: float | None
    all_reject: bool = False
    all_accept: bool = False
    step: float = 0.0


def rho_grid_oracle(spec: AcceptanceSpec, space: ScenarioSpace, x, asset: EligibleAsset,
                    m_lo: float, m_hi: float, steps: int) -> GridResult:
    """Scan m over ``steps`` uniform points of [m_lo, m_hi] and return the first accepted one."""
    if not m_lo < m_hi:
        raise ValueError("need m_lo < m_hi")
    if not 2 <= steps <= MAX_GRID:
        raise ValueError(f"steps must lie in [2, {MAX_GRID}]")
    x = as_vector(x)
    s = asset.payoff
    step = (m_hi - m_lo) / (steps - 1)
    for start in range(0, steps, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, steps))
        grid = m_lo + idx * step
        ok = accepts_rows(spec, space, x[None, :] + (grid / asset.price)[:, None] * s[None, :])
        if ok.any():
            first = int(np.argmax(ok))
            # the profile is monotone, so accepting at m_lo means accepting everywhere
            return GridResult(float(grid[first]), all_accept=start == 0 and first == 0, step=step)
    return GridResult(None, all_reject=True, step=step)


def classify_by_sentinels(spec, space, x, asset, window: float = 1e6, steps: int = 2001) -> str:
    """'+inf', '-inf' or 'finite' from a wide scan: nothing accepts, or everything does."""
    res = rho_grid_oracle(spec, space, x, asset, -window, window, steps)
    if res.all_reject:
        return "+inf"
    if res.all_accept:
        return "-inf"
    return "finite"


def tvar_integral_oracle(space: ScenarioSpace, x, alpha: float, panels: int = 10) -> float:
    """(1/alpha) * integral of beta -> VaR_beta(X) over (0, alpha) by the midpoint rule.

    Panels are laid out between consecutive cumulative-probability breakpoints,
    where the integrand is constant, so the rule is exact.
    """
    if panels < 10:
        raise ValueError("panels must be at least 10")
    x = as_vector(x)
    order = np.argsort(x, kind="stable")
    cum = np.cumsum(space.p[order])
    cuts = sorted({0.0, alpha, *[float(c) for c in cum if 0 < c < alpha]})
    per = max(1, panels // (len(cuts) - 1))
    total = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        h = (b - a) / per
        for k in range(per):
            total.append(h * var_value(space, x, a + (k + 0.5) * h))
    return math.fsum(total) / alpha


def perturbation_interior_oracle(spec: AcceptanceSpec, space: ScenarioSpace, x, eps: float) -> bool:
    """True iff every corner X +/- eps (all 2^n sign patterns) is acceptable."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = as_vector(x)
    if x.size > MAX_PERTURB_N:
        raise ValueError(f"perturbation oracle limited to n <= {MAX_PERTURB_N}")
    for signs in itertools.product((-1.0, 1.0), repeat=x.size):
        if not is_acceptable(spec, space, x + eps * np.array(signs)):
            return False
    return True
