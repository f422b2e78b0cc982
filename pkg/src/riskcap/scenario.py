"""Finite probability spaces, positions and eligible assets.

Everything here is immutable: arrays are copied on construction and marked
read-only, so instances can be shared freely.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

PROB_SUM_TOL = 1e-12
RENORMALIZE_BAND = 1e-6


class ScenarioError(ValueError):
    """Invalid scenario data (bad probabilities, payoffs, lengths)."""


class ScenarioParseError(ScenarioError):
    """Malformed scenario file."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


def _frozen(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def mass(p: np.ndarray, mask) -> float:
    """Probability of the event selected by ``mask``, accumulated exactly."""
    return math.fsum(p[np.asarray(mask, dtype=bool)])


@dataclass(frozen=True, eq=False)
class ScenarioSpace:
    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p, "probabilities")
        if p.size < 1:
            raise ScenarioError("scenario space needs at least one outcome")
        if np.any(p <= 0):
            i = int(np.argmax(p <= 0))
            raise ScenarioError(f"zero-probability outcome at index {i}" if p[i] == 0
                                else f"negative probability at index {i}")
        total = math.fsum(p)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ScenarioError(f"probabilities sum to {total:.12g}")
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return int(self.p.size)

    @classmethod
    def uniform(cls, n: int) -> "ScenarioSpace":
        return cls(np.full(n, 1.0 / n))

    def mass(self, mask) -> float:
        return mass(self.p, mask)

    def expectation(self, x) -> float:
        return math.fsum(self.p * np.asarray(x, dtype=float))

    def check(self, x, name: str = "vector") -> np.ndarray:
        """Return ``x`` as a float array, failing on length mismatch."""
        arr = np.asarray(x, dtype=float).reshape(-1)
        if arr.size != self.n:
            raise ScenarioError(f"{name} has length {arr.size}, scenario space has {self.n} outcomes")
        return arr

    def __eq__(self, other):
        return isinstance(other, ScenarioSpace) and np.array_equal(self.p, other.p)

    def __hash__(self):
        return hash(self.p.tobytes())

    def __repr__(self):
        return f"ScenarioSpace(p={self.p.tolist()})"


@dataclass(frozen=True, eq=False)
class Position:
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, "position"))

    def __len__(self):
        return self.x.size

    def __repr__(self):
        return f"Position({self.x.tolist()})"


@dataclass(frozen=True, eq=False)
class EligibleAsset:
    """Traded asset with unit price ``price`` and terminal payoff ``payoff``."""

    price: float
    payoff: np.ndarray

    def __post_init__(self):
        price = float(self.price)
        if not (math.isfinite(price) and price > 0):
            raise ScenarioError(f"asset price must be positive, got {self.price!r}")
        s = _frozen(self.payoff, "payoff")
        if np.any(s < 0):
            raise ScenarioError(f"negative payoff at index {int(np.argmax(s < 0))}")
        if not np.any(s > 0):
            raise ScenarioError("payoff must be nonzero")
        object.__setattr__(self, "price", price)
        object.__setattr__(self, "payoff", s)

    @classmethod
    def risk_free(cls, n: int, price: float = 1.0) -> "EligibleAsset":
        return cls(price, np.ones(n))

    @property
    def n(self) -> int:
        return int(self.payoff.size)

    @property
    def zero_states(self) -> np.ndarray:
        return self.payoff == 0

    @property
    def min_payoff(self) -> float:
        return float(self.payoff.min())

    def __eq__(self, other):
        return (isinstance(other, EligibleAsset) and self.price == other.price
                and np.array_equal(self.payoff, other.payoff))

    def __hash__(self):
        return hash((self.price, self.payoff.tobytes()))

    def __repr__(self):
        return f"EligibleAsset(price={self.price!r}, payoff={self.payoff.tolist()})"


@dataclass(frozen=True, eq=False)
class EventMask:
    mask: np.ndarray

    def __post_init__(self):
        m = np.array(self.mask, dtype=bool).reshape(-1)
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    @classmethod
    def from_indices(cls, n: int, indices: Sequence[int]) -> "EventMask":
        m = np.zeros(n, dtype=bool)
        for i in indices:
            if not 0 <= int(i) < n:
                raise ScenarioError(f"event index {i} out of range for {n} outcomes")
            m[int(i)] = True
        return cls(m)

    @property
    def indices(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.mask)]

    def __len__(self):
        return self.mask.size

    def __eq__(self, other):
        return isinstance(other, EventMask) and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __repr__(self):
        return f"EventMask({self.indices})"


def check_compatible(space: ScenarioSpace, *vectors: tuple[str, np.ndarray]) -> None:
    for name, v in vectors:
        if np.asarray(v).size != space.n:
            raise ScenarioError(f"{name} has length {np.asarray(v).size}, "
                                f"scenario space has {space.n} outcomes")


def renormalize(space_or_p) -> ScenarioSpace:
    """Rescale probabilities that sum to 1 within 1e-6; refuse anything further off."""
    p = np.asarray(space_or_p.p if isinstance(space_or_p, ScenarioSpace) else space_or_p, dtype=float)
    if np.any(p <= 0):
        raise ScenarioError("zero-probability outcome")
    total = math.fsum(p)
    if abs(total - 1.0) > RENORMALIZE_BAND:
        raise ScenarioError(f"probabilities sum to {total:.12g}; refusing to renormalize")
    q = p / total
    # a second pass mops up the last ulp of drift
    q = q / math.fsum(q)
    return ScenarioSpace(q)


@dataclass(frozen=True)
class ScenarioFile:
    space: ScenarioSpace
    positions: list[Position]
    payoff: np.ndarray
    columns: list[str]


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ScenarioParseError(f"column {column!r}: cannot parse {text!r} as a number", row) from None
    if not math.isfinite(value):
        raise ScenarioParseError(f"column {column!r}: non-finite value {text!r}", row)
    return value


def parse_scenarios(text: str) -> ScenarioFile:
    """Parse scenario CSV text (header ``prob,x,s`` plus optional ``x2,x3,...``)."""
    reader = csv.reader(io.StringIO(text.replace("\r\n", "\n")))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ScenarioParseError("empty file", 1) from None
    if header[:3] != ["prob", "x", "s"]:
        raise ScenarioParseError(f"header must start with prob,x,s; got {','.join(header)}", 1)
    extra = header[3:]
    for k, name in enumerate(extra, start=2):
        if name != f"x{k}":
            raise ScenarioParseError(f"unexpected column {name!r} (expected 'x{k}')", 1)

    probs, xs, ss = [], [], []
    for rownum, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ScenarioParseError(f"expected {len(header)} fields, got {len(row)}", rownum)
        vals = [_parse_float(c.strip(), rownum, col) for c, col in zip(row, header)]
        if vals[0] == 0:
            raise ScenarioError(f"zero-probability outcome (row {rownum})")
        if vals[0] < 0:
            raise ScenarioError(f"negative probability (row {rownum})")
        if vals[2] < 0:
            raise ScenarioError(f"negative payoff s (row {rownum})")
        probs.append(vals[0])
        ss.append(vals[2])
        xs.append([vals[1]] + vals[3:])
    if not probs:
        raise ScenarioParseError("no data rows", 2)

    space = ScenarioSpace(probs)
    xmat = np.array(xs, dtype=float)
    positions = [Position(xmat[:, j]) for j in range(xmat.shape[1])]
    payoff = _frozen(ss, "payoff")
    return ScenarioFile(space, positions, payoff, ["x"] + extra)


def load_scenarios(path) -> ScenarioFile:
    return parse_scenarios(Path(path).read_text(encoding="utf-8"))


def format_scenarios(space: ScenarioSpace, positions: Sequence, payoff) -> str:
    """CSV text that ``parse_scenarios`` reads back bit-for-bit (17 significant digits)."""
    cols = [np.asarray(getattr(x, "x", x), dtype=float) for x in positions]
    if not cols:
        raise ScenarioError("at least one position column is required")
    check_compatible(space, ("payoff", payoff), *[(f"position {i}", c) for i, c in enumerate(cols)])
    names = ["prob", "x", "s"] + [f"x{k}" for k in range(2, len(cols) + 1)]
    lines = [",".join(names)]
    s = np.asarray(payoff, dtype=float)
    for i in range(space.n):
        vals = [space.p[i], cols[0][i], s[i]] + [c[i] for c in cols[1:]]
        lines.append(",".join(f"{v:.17g}" for v in vals))
    return "\n".join(lines) + "\n"


def save_scenarios(path, space: ScenarioSpace, positions: Sequence, payoff) -> None:
    Path(path).write_text(format_scenarios(space, positions, payoff), encoding="utf-8")
