"""One-shot simultaneous first-price auctions.

Bids are an (n, m) nonnegative matrix. Each item goes to a highest bidder
on it (ties within TIE_TOL resolved by the tie-breaking rule) at a price
equal to the winning bid. Utilities are quasi-linear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sets import members
from .valuations import Valuation

TIE_TOL = 1e-12  # bids this close count as tied


class CapExceeded(ValueError):
    """Raised when a brute-force enumeration would exceed its size cap."""


@dataclass(frozen=True)
class PriorityRule:
    """Deterministic tie-breaking by a per-item priority permutation.

    order[j] lists player indices from most to least favored on item j.
    order=None favors the lowest player index on every item.
    """

    order: tuple | None = None

    def validate(self, n: int, m: int) -> None:
        if self.order is None:
            return
        if len(self.order) != m:
            raise ValueError(f"need one priority list per item ({m}), got {len(self.order)}")
        for perm in self.order:
            if sorted(perm) != list(range(n)):
                raise ValueError(f"item priority {perm} is not a permutation of 0..{n - 1}")

    def pick(self, item: int, tied: np.ndarray) -> int:
        if self.order is None:
            return int(tied.min())
        rank = self.order[item]
        return int(min(tied, key=lambda i: rank.index(i)))

    def to_json(self) -> dict:
        if self.order is None:
            return {"kind": "index"}
        return {"kind": "priority", "order": [list(p) for p in self.order]}


@dataclass(frozen=True)
class RandomizedRule:
    """Mixture over deterministic rules; probabilities sum to 1 within 1e-12."""

    mixture: tuple  # of (probability, PriorityRule)

    def __post_init__(self):
        total = sum(p for p, _ in self.mixture)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture probabilities sum to {total}, need 1")
        if any(p < 0 for p, _ in self.mixture):
            raise ValueError("mixture probabilities must be nonnegative")

    def validate(self, n: int, m: int) -> None:
        for _, rule in self.mixture:
            rule.validate(n, m)

    def to_json(self) -> dict:
        return {"kind": "randomized",
                "mixture": [{"prob": p, "rule": r.to_json()} for p, r in self.mixture]}


def rule_from_json(d: dict):
    kind = d.get("kind", "index")
    if kind == "index":
        return PriorityRule()
    if kind == "priority":
        return PriorityRule(tuple(tuple(p) for p in d["order"]))
    if kind == "randomized":
        return RandomizedRule(tuple((b["prob"], rule_from_json(b["rule"])) for b in d["mixture"]))
    raise ValueError(f"unknown tie rule kind {kind!r}")


@dataclass(frozen=True)
class Allocation:
    """Partition of the items: winners[j] is the player receiving item j."""

    winners: tuple

    def bundle(self, player: int) -> int:
        s = 0
        for j, w in enumerate(self.winners):
            if w == player:
                s |= 1 << j
        return s

    def bundles(self, n: int) -> list[int]:
        return [self.bundle(i) for i in range(n)]

    def to_json(self, n: int) -> list:
        return [members(b) for b in self.bundles(n)]


def check_bids(bids) -> np.ndarray:
    b = np.asarray(bids, dtype=np.float64)
    if b.ndim != 2:
        raise ValueError("bids must be an (n, m) matrix")
    if not np.isfinite(b).all() or (b < 0).any():
        raise ValueError("bids must be finite and nonnegative")
    return b


def allocate(bids, rule=PriorityRule()):
    """Allocation under the rule; a randomized rule yields [(prob, Allocation)]."""
    b = check_bids(bids)
    n, m = b.shape
    rule.validate(n, m)
    if isinstance(rule, RandomizedRule):
        return [(p, allocate(b, det)) for p, det in rule.mixture]
    winners = []
    for j in range(m):
        col = b[:, j]
        tied = np.flatnonzero(col >= col.max() - TIE_TOL)
        winners.append(rule.pick(j, tied))
    return Allocation(tuple(winners))


@dataclass(frozen=True)
class Outcome:
    """Utilities u_i = v_i(S_i) - sum of i's winning bids; welfare = sum v_i(S_i).

    For a randomized rule, `allocation` is None and the top-level numbers are
    probability-weighted expectations over `branches`.
    """

    allocation: Allocation | None
    utilities: tuple
    item_prices: tuple
    welfare: float
    revenue: float
    branches: tuple = ()

    def to_json(self, n: int) -> dict:
        out = {"utilities": list(self.utilities), "item_prices": list(self.item_prices),
               "welfare": self.welfare, "revenue": self.revenue}
        if self.allocation is not None:
            out["allocation"] = self.allocation.to_json(n)
        if self.branches:
            out["branches"] = [{"prob": p, "outcome": o.to_json(n)} for p, o in self.branches]
        return out


def outcome(vals: list[Valuation], bids, rule=PriorityRule()) -> Outcome:
    b = check_bids(bids)
    n, m = b.shape
    if len(vals) != n:
        raise ValueError(f"{len(vals)} valuations for {n} bid rows")
    if any(v.m != m for v in vals):
        raise ValueError("all valuations must cover the same m items")
    if isinstance(rule, RandomizedRule):
        rule.validate(n, m)
        branches = tuple((p, outcome(vals, b, det)) for p, det in rule.mixture)
        probs = np.array([p for p, _ in branches])
        utils = probs @ np.array([o.utilities for _, o in branches])
        prices = probs @ np.array([o.item_prices for _, o in branches])
        welfare = float(probs @ [o.welfare for _, o in branches])
        revenue = float(probs @ [o.revenue for _, o in branches])
        return Outcome(None, tuple(map(float, utils)), tuple(map(float, prices)),
                       welfare, revenue, branches)
    alloc = allocate(b, rule)
    utilities, prices, welfare = [], [0.0] * m, 0.0
    for i, v in enumerate(vals):
        s = alloc.bundle(i)
        paid = float(sum(b[i, j] for j in members(s)))
        for j in members(s):
            prices[j] = float(b[i, j])
        utilities.append(float(v.value(s)) - paid)
        welfare += float(v.value(s))
    return Outcome(alloc, tuple(utilities), tuple(prices), welfare, float(sum(prices)))


def _assignment_digits(idx: np.ndarray, n: int, m: int) -> list[np.ndarray]:
    """Item -> player digits; item 0 most significant so ascending idx is
    ascending lexicographic order of assignment tuples."""
    return [(idx // n ** (m - 1 - j)) % n for j in range(m)]


def _welfare_of_assignments(idx: np.ndarray, tables: list[np.ndarray], n: int, m: int) -> np.ndarray:
    digits = _assignment_digits(idx, n, m)
    welfare = np.zeros(idx.shape, dtype=np.float64)
    for i, table in enumerate(tables):
        mask = np.zeros(idx.shape, dtype=np.int64)
        for j, d in enumerate(digits):
            mask |= (d == i).astype(np.int64) << j
        welfare += table[mask]
    return welfare


def optimal_welfare(vals: list[Valuation], cap: int = 10_000_000) -> tuple[float, Allocation]:
    """Exact welfare maximum by enumerating every item->player assignment.

    Deterministic: among ties, the lexicographically first assignment wins.
    """
    n, m = len(vals), vals[0].m
    total = n ** m
    if total > cap:
        raise CapExceeded(f"n^m = {total} exceeds cap {cap}")
    tables = [v.as_table() for v in vals]
    best, best_idx = -np.inf, 0
    for start in range(0, total, 1 << 19):
        idx = np.arange(start, min(start + (1 << 19), total), dtype=np.int64)
        welfare = _welfare_of_assignments(idx, tables, n, m)
        k = int(np.argmax(welfare))
        if welfare[k] > best:
            best, best_idx = float(welfare[k]), int(idx[k])
    digits = _assignment_digits(np.array([best_idx]), n, m)
    return best, Allocation(tuple(int(d[0]) for d in digits))


def optimal_allocations(vals: list[Valuation], cap: int = 10_000_000,
                        tol: float = 1e-9, limit: int = 65536) -> tuple[float, list[Allocation]]:
    """All welfare maximizers (within tol), in lexicographic order."""
    n, m = len(vals), vals[0].m
    total = n ** m
    if total > cap:
        raise CapExceeded(f"n^m = {total} exceeds cap {cap}")
    tables = [v.as_table() for v in vals]
    best, _ = optimal_welfare(vals, cap)
    out = []
    for start in range(0, total, 1 << 19):
        idx = np.arange(start, min(start + (1 << 19), total), dtype=np.int64)
        welfare = _welfare_of_assignments(idx, tables, n, m)
        for k in np.flatnonzero(welfare >= best - tol):
            digits = _assignment_digits(np.array([idx[k]]), n, m)
            out.append(Allocation(tuple(int(d[0]) for d in digits)))
            if len(out) > limit:
                raise CapExceeded(f"more than {limit} optimal allocations")
    return best, out


def optimal_welfare_dp(vals: list[Valuation]) -> float:
    """Independent welfare maximum via subset DP (n * 3^m); oracle cross-check."""
    m = vals[0].m
    size = 1 << m
    best = vals[0].as_table().copy()
    for v in vals[1:]:
        table = v.as_table()
        nxt = np.full(size, -np.inf)
        for s in range(size):
            sub = s
            while True:
                cand = best[s ^ sub] + table[sub]
                if cand > nxt[s]:
                    nxt[s] = cand
                if sub == 0:
                    break
                sub = (sub - 1) & s
        best = nxt
    return float(best[size - 1])
