"""Combinatorial valuations over m items and their structural classes.

A valuation maps item subsets (bitmasks) to money. All valuations here are
normalized (empty set worth 0), nonnegative, and monotone non-decreasing;
`check_valid` verifies this by exhaustive scan. Structured subclasses
(additive, single-minded, AND, OR, XOS) evaluate without materializing the
dense 2^m table.

The XOS machinery (`xos_supporting_clause`, `beta_of`) computes, for a
target set T, an additive vector dominated by the valuation everywhere and
as large as possible on T. The ratio v(T) / (best such sum) over all T is
the valuation's XOS approximation factor beta (1 for fractionally
subadditive valuations, infinity when no nonzero dominated additive vector
exists, as for AND or single-minded bidders with bundles of size >= 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lp import solve_max
from .sets import MAX_ITEMS, from_items, full_set, is_subset, members, subsets

MONEY_TOL = 1e-9


def bit_matrix(m: int) -> np.ndarray:
    """(2^m, m) 0/1 membership matrix; row s column j is item j's bit of s."""
    s = np.arange(1 << m, dtype=np.uint32)
    return ((s[:, None] >> np.arange(m, dtype=np.uint32)[None, :]) & 1).astype(np.float64)


class Valuation:
    """Base class; subclasses are frozen dataclasses and hence hashable/immutable."""

    m: int

    def value(self, s: int) -> float:
        raise NotImplementedError

    def value_max(self) -> float:
        return self.value(full_set(self.m))

    def as_table(self) -> np.ndarray:
        """Dense value table indexed by bitmask (read-only, cached).
        Capped at m <= MAX_ITEMS."""
        if self.m > MAX_ITEMS:
            raise ValueError(f"dense table needs m <= {MAX_ITEMS}, got {self.m}")
        return _cached_table(self)

    def _table(self) -> np.ndarray:
        return np.array([self.value(s) for s in range(1 << self.m)])

    def to_json(self) -> dict:
        raise NotImplementedError


@lru_cache(maxsize=4096)
def _cached_table(v: Valuation) -> np.ndarray:
    table = v._table()
    table.setflags(write=False)
    return table


def _check_m(m: int) -> None:
    if m < 1:
        raise ValueError(f"need at least one item, got m={m}")


@dataclass(frozen=True)
class TableValuation(Valuation):
    m: int
    table: tuple

    def __post_init__(self):
        _check_m(self.m)
        if self.m > MAX_ITEMS:
            raise ValueError(f"table form capped at m <= {MAX_ITEMS}")
        if len(self.table) != 1 << self.m:
            raise ValueError(f"table needs 2^{self.m} entries, got {len(self.table)}")
        object.__setattr__(self, "table", tuple(float(x) for x in self.table))

    def value(self, s: int) -> float:
        return self.table[s]

    def _table(self) -> np.ndarray:
        return np.array(self.table)

    def to_json(self) -> dict:
        return {"kind": "table", "m": self.m, "values": list(self.table)}


@dataclass(frozen=True)
class AdditiveValuation(Valuation):
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        _check_m(self.m)

    @property
    def m(self) -> int:
        return len(self.weights)

    def value(self, s: int) -> float:
        return sum(self.weights[j] for j in members(s))

    def _table(self) -> np.ndarray:
        return bit_matrix(self.m) @ np.array(self.weights)

    def to_json(self) -> dict:
        return {"kind": "additive", "m": self.m, "weights": list(self.weights)}


@dataclass(frozen=True)
class SingleMindedValuation(Valuation):
    """Worth `amount` for any superset of `bundle`, 0 otherwise."""

    m: int
    bundle: int
    amount: float

    def __post_init__(self):
        _check_m(self.m)
        if not is_subset(self.bundle, full_set(self.m)) or self.bundle == 0:
            raise ValueError("bundle must be a nonempty subset of the universe")
        object.__setattr__(self, "amount", float(self.amount))

    def value(self, s: int) -> float:
        return self.amount if is_subset(self.bundle, s) else 0.0

    def _table(self) -> np.ndarray:
        s = np.arange(1 << self.m)
        return np.where((s & self.bundle) == self.bundle, self.amount, 0.0)

    def to_json(self) -> dict:
        return {"kind": "single_minded", "m": self.m, "items": members(self.bundle),
                "value": self.amount}


@dataclass(frozen=True)
class AndValuation(Valuation):
    """Worth `amount` for the full set only."""

    m: int
    amount: float

    def __post_init__(self):
        _check_m(self.m)
        object.__setattr__(self, "amount", float(self.amount))

    def value(self, s: int) -> float:
        return self.amount if s == full_set(self.m) else 0.0

    def to_json(self) -> dict:
        return {"kind": "and", "m": self.m, "value": self.amount}


@dataclass(frozen=True)
class OrValuation(Valuation):
    """Worth `amount` for any set meeting the designated items (default: all)."""

    m: int
    amount: float
    items: int = -1

    def __post_init__(self):
        _check_m(self.m)
        if self.items == -1:
            object.__setattr__(self, "items", full_set(self.m))
        if not is_subset(self.items, full_set(self.m)) or self.items == 0:
            raise ValueError("designated items must be a nonempty subset")
        object.__setattr__(self, "amount", float(self.amount))

    def value(self, s: int) -> float:
        return self.amount if s & self.items else 0.0

    def to_json(self) -> dict:
        out = {"kind": "or", "m": self.m, "value": self.amount}
        if self.items != full_set(self.m):
            out["items"] = members(self.items)
        return out


@dataclass(frozen=True)
class XosValuation(Valuation):
    """Maximum over additive clauses: v(S) = max_k sum_{j in S} clauses[k][j]."""

    clauses: tuple

    def __post_init__(self):
        cl = tuple(tuple(float(w) for w in c) for c in self.clauses)
        if not cl:
            raise ValueError("need at least one clause")
        if len({len(c) for c in cl}) != 1:
            raise ValueError("clauses must share a length")
        if any(w < 0 for c in cl for w in c):
            raise ValueError("clause weights must be nonnegative")
        object.__setattr__(self, "clauses", cl)
        _check_m(self.m)

    @property
    def m(self) -> int:
        return len(self.clauses[0])

    def value(self, s: int) -> float:
        idx = members(s)
        if not idx:
            return 0.0
        return max(sum(c[j] for j in idx) for c in self.clauses)

    def _table(self) -> np.ndarray:
        return (bit_matrix(self.m) @ np.array(self.clauses).T).max(axis=1)

    def to_json(self) -> dict:
        return {"kind": "xos", "m": self.m, "clauses": [list(c) for c in self.clauses]}


def valuation_from_json(d: dict) -> Valuation:
    kind = d["kind"]
    if kind == "table":
        return TableValuation(d["m"], tuple(d["values"]))
    if kind == "additive":
        return AdditiveValuation(tuple(d["weights"]))
    if kind == "single_minded":
        return SingleMindedValuation(d["m"], from_items(d["items"]), d["value"])
    if kind == "and":
        return AndValuation(d["m"], d["value"])
    if kind == "or":
        items = from_items(d["items"]) if "items" in d else -1
        return OrValuation(d["m"], d["value"], items)
    if kind == "xos":
        return XosValuation(tuple(tuple(c) for c in d["clauses"]))
    raise ValueError(f"unknown valuation kind {kind!r}")


@dataclass(frozen=True)
class Violation:
    """First witness of a failed normalization/monotonicity scan."""

    kind: str  # "empty_nonzero" | "negative" | "monotonicity"
    set_small: int
    set_large: int
    value_small: float
    value_large: float


def check_valid(v: Valuation, tol: float = MONEY_TOL) -> Violation | None:
    """Verify v(empty)=0, nonnegativity, and monotonicity on adjacent pairs.

    Scans all (S, S+{j}) pairs on the dense table; returns the first
    violating pair, or None if the valuation is valid.
    """
    t = v.as_table()
    if abs(t[0]) > tol:
        return Violation("empty_nonzero", 0, 0, float(t[0]), float(t[0]))
    neg = np.flatnonzero(t < -tol)
    if neg.size:
        s = int(neg[0])
        return Violation("negative", s, s, float(t[s]), float(t[s]))
    s = np.arange(1 << v.m)
    for j in range(v.m):
        without = np.flatnonzero((s & (1 << j)) == 0)
        bad = np.flatnonzero(t[without | (1 << j)] < t[without] - tol)
        if bad.size:
            lo = int(without[bad[0]])
            hi = lo | (1 << j)
            return Violation("monotonicity", lo, hi, float(t[lo]), float(t[hi]))
    return None


def xos_supporting_clause(v: Valuation, target: int, tol: float = MONEY_TOL) -> np.ndarray:
    """Additive vector a, zero off `target`, with a(S) <= v(S) for every S
    and a(target) maximal.

    For an explicit XOS valuation this is the maximizing clause restricted
    to `target`; otherwise it is the optimum of the LP
    max sum_{j in target} a_j s.t. a(S) <= v(S) for all S, a >= 0.
    Constraints are only enumerated for S inside `target`: for monotone v
    and a supported on `target`, a(S) = a(S & target) <= v(S & target) <= v(S).
    """
    if not is_subset(target, full_set(v.m)):
        raise ValueError("target must be a subset of the universe")
    a = np.zeros(v.m)
    if target == 0:
        return a
    idx = members(target)
    if isinstance(v, AdditiveValuation):
        a[idx] = [v.weights[j] for j in idx]
        return a
    if isinstance(v, XosValuation):
        best = max(v.clauses, key=lambda c: sum(c[j] for j in idx))
        a[idx] = [best[j] for j in idx]
        return a
    k = len(idx)
    pos = {j: i for i, j in enumerate(idx)}
    rows, rhs = [], []
    for s in subsets(target):
        if s == 0:
            continue
        row = np.zeros(k)
        row[[pos[j] for j in members(s)]] = 1.0
        rows.append(row)
        rhs.append(v.value(s))
    x = solve_max(np.ones(k), np.array(rows), np.array(rhs))
    a[idx] = np.maximum(x, 0.0)  # clip solver dust below 0
    # feasibility can be off by solver tolerance only; verify on target's subsets
    for s in subsets(target):
        if a[members(s)].sum() > v.value(s) + tol:
            raise RuntimeError(f"LP clause infeasible at set {s:b}")
    return a


@dataclass(frozen=True)
class BetaCertificate:
    """Per-set supporting clauses and the resulting XOS approximation factor.

    beta = max over nonempty T of v(T) / clause_sum(T), with the conventions
    beta = 1 for v identically 0 and beta = inf when some T has positive
    value but only the zero clause.
    """

    beta: float
    clauses: dict = field(repr=False)  # target bitmask -> weight array

    def clause_for(self, target: int) -> np.ndarray:
        return self.clauses[target]


def beta_of(v: Valuation, tol: float = MONEY_TOL) -> BetaCertificate:
    """XOS approximation factor via one supporting-clause LP per subset (m <= 12)."""
    if v.m > 12:
        raise ValueError("beta_of enumerates one LP per subset; capped at m <= 12")
    beta = 1.0
    clauses: dict[int, np.ndarray] = {}
    for target in range(1, 1 << v.m):
        a = xos_supporting_clause(v, target)
        clauses[target] = a
        vt = v.value(target)
        if vt <= tol:
            continue
        got = a[members(target)].sum()
        beta = max(beta, math.inf if got <= tol else vt / got)
    return BetaCertificate(beta, clauses)


def verify_beta_certificate(v: Valuation, cert: BetaCertificate, tol: float = MONEY_TOL) -> bool:
    """Check both certificate inequalities exhaustively (test oracle)."""
    table = v.as_table()
    bits = bit_matrix(v.m)
    for target, a in cert.clauses.items():
        if (bits @ a > table + tol).any():
            return False
        want = 0.0 if math.isinf(cert.beta) else v.value(target) / cert.beta
        if a[members(target)].sum() < want - tol:
            return False
    return True
