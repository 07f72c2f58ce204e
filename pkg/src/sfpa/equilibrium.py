"""Walrasian equilibria, discretized pure Nash equilibria, and gap checks.

Walrasian search exploits the First Welfare Theorem: only welfare-optimal
allocations can carry supporting prices, so it enumerates those and solves
a price-feasibility LP per allocation (canonical prices minimize the
maximum price, then the price sum).

Grid Nash search enumerates bid profiles over finite per-player action
families and keeps those where no player can gain more than epsilon by a
grid deviation. The common-price scan is a structured profile family
(everyone bids one shared price vector, per-item priority to the assigned
winner) matching the bid profiles through which the Walrasian/pure-Nash
correspondence is proved; it is how the correspondence is exercised at
desk scale, since full product grids blow past any enumeration cap.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import closedform as cf
from .auction import (Allocation, CapExceeded, PriorityRule, TIE_TOL,
                      optimal_allocations)
from .lp import feasible_point
from .rng import rng_for
from .sets import full_set, members
from .valuations import MONEY_TOL, Valuation


@dataclass(frozen=True)
class WalrasianEquilibrium:
    allocation: Allocation
    prices: tuple

    def to_json(self, n: int) -> dict:
        return {"prices": list(self.prices), "allocation": self.allocation.to_json(n)}


def _demand_profile(v: Valuation, prices: np.ndarray) -> np.ndarray:
    """Utility of every bundle at the given prices (2^m scan)."""
    table = v.as_table()
    cost = np.zeros(table.size)
    for j in range(v.m):
        cost[np.arange(table.size) & (1 << j) > 0] += prices[j]
    return table - cost


def walrasian_check(vals: list[Valuation], we: WalrasianEquilibrium,
                    tol: float = MONEY_TOL):
    """None if every player's bundle is demand-optimal, else a witness
    (player, strictly better bundle)."""
    prices = np.asarray(we.prices, dtype=np.float64)
    if (prices < -tol).any() or not np.isfinite(prices).all():
        raise ValueError("prices must be finite and nonnegative")
    for i, v in enumerate(vals):
        util = _demand_profile(v, prices)
        mine = we.allocation.bundle(i)
        best = int(np.argmax(util))
        if util[best] > util[mine] + tol:
            return i, best
    return None


def _support_prices(vals: list[Valuation], alloc: Allocation):
    """Price vector making every bundle demand-optimal, or None.

    Canonicalized by minimizing max price, then total price, so e.g. the
    single-item two-bidder market returns the low end of its price range.
    """
    n, m = len(vals), vals[0].m
    rows, rhs = [], []
    for i, v in enumerate(vals):
        mine = alloc.bundle(i)
        v_mine = v.value(mine)
        for t in range(1 << m):
            if t == mine:
                continue
            row = np.zeros(m + 1)
            for j in members(mine):
                row[j] += 1.0
            for j in members(t):
                row[j] -= 1.0
            rows.append(row)
            rhs.append(v_mine - v.value(t))
    for j in range(m):  # p_j <= t
        row = np.zeros(m + 1)
        row[j], row[m] = 1.0, -1.0
        rows.append(row)
        rhs.append(0.0)
    a_ub, b_ub = np.array(rows), np.array(rhs)
    obj = np.zeros(m + 1)
    obj[m] = 1.0
    x = feasible_point(a_ub, b_ub, m + 1, minimize=obj)
    if x is None:
        return None
    cap = x[m] + 1e-10  # headroom at solver accuracy, well below MONEY_TOL
    rows2 = np.zeros((m, m + 1))
    rows2[np.arange(m), np.arange(m)] = 1.0
    x = feasible_point(np.vstack([a_ub, rows2]), np.concatenate([b_ub, np.full(m, cap)]),
                       m + 1, minimize=np.concatenate([np.ones(m), [0.0]]))
    return None if x is None else x[:m]


def walrasian_search(vals: list[Valuation], cap: int = 10_000_000,
                     tol: float = MONEY_TOL) -> WalrasianEquilibrium | None:
    """First Walrasian equilibrium over welfare-optimal allocations, or None."""
    _, allocs = optimal_allocations(vals, cap=cap)
    for alloc in allocs:
        prices = _support_prices(vals, alloc)
        if prices is None:
            continue
        we = WalrasianEquilibrium(alloc, tuple(float(p) for p in prices))
        witness = walrasian_check(vals, we, tol)
        if witness is not None:
            raise RuntimeError(f"LP prices fail the demand check: {witness}")
        return we
    return None


@dataclass(frozen=True)
class BidGrid:
    """Finite bid lattice {0, step, 2 step, ...} up to `upper`, with a family
    shaping per-player bid vectors:

    - "full": every combination of grid levels (K = L^m);
    - "uniform_on_bundle": one level on the player's bundle, 0 elsewhere;
    - "single_item": one level on one item, 0 elsewhere.
    """

    step: float
    upper: float
    family: str = "full"

    def __post_init__(self):
        if self.step <= 0 or self.upper < 0:
            raise ValueError("need step > 0 and upper >= 0")
        if self.family not in ("full", "uniform_on_bundle", "single_item"):
            raise ValueError(f"unknown grid family {self.family!r}")

    def points(self) -> np.ndarray:
        count = int(math.floor(self.upper / self.step + 1e-9)) + 1
        return self.step * np.arange(count)

    def actions_for(self, m: int, bundle: int | None = None) -> np.ndarray:
        """(K, m) matrix of allowed bid vectors for one player."""
        pts = self.points()
        if self.family == "uniform_on_bundle":
            if bundle is None:
                bundle = full_set(m)
            out = np.zeros((pts.size, m))
            out[:, members(bundle)] = pts[:, None]
            return out
        if self.family == "single_item":
            out = np.zeros((m * pts.size, m))
            for j in range(m):
                out[j * pts.size:(j + 1) * pts.size, j] = pts
            return out
        if pts.size ** m > 2_000_000:
            raise CapExceeded(f"full product grid {pts.size}^{m} is too large")
        grids = np.meshgrid(*([pts] * m), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def to_json(self) -> dict:
        return {"step": self.step, "max": self.upper, "family": self.family}


def _tie_favored(rule: PriorityRule, player: int, item: int, rivals: np.ndarray) -> bool:
    """Does `player` win item `item` when tied with every rival in `rivals`?"""
    return rule.pick(item, np.append(rivals, player)) == player


def deviation_payoffs(v: Valuation, actions: np.ndarray, player: int,
                      opp_bids: np.ndarray, opp_index: np.ndarray,
                      rule: PriorityRule) -> np.ndarray:
    """Utility of each candidate action against fixed opponent bids."""
    k, m = actions.shape
    if opp_bids.shape[0] == 0:  # no rivals: every item is won at the own bid
        beat = np.full(m, -np.inf)
        favored = np.ones(m, dtype=bool)
    else:
        beat = opp_bids.max(axis=0)
        favored = np.empty(m, dtype=bool)
        for j in range(m):
            rivals = opp_index[opp_bids[:, j] >= beat[j] - TIE_TOL]
            favored[j] = _tie_favored(rule, player, j, rivals)
    win = (actions > beat + TIE_TOL) | ((np.abs(actions - beat) <= TIE_TOL) & favored)
    masks = (win.astype(np.int64) * (1 << np.arange(m))).sum(axis=1)
    return v.as_table()[masks] - (actions * win).sum(axis=1)


@dataclass(frozen=True)
class GridEquilibrium:
    bids: tuple  # (n, m) nested tuples
    gap: float


def pure_nash_search(vals: list[Valuation], grid: BidGrid, rule=PriorityRule(),
                     eps: float = 0.0, cap: int = 10_000_000,
                     bundles: list[int] | None = None) -> list[GridEquilibrium]:
    """All grid profiles where no player improves by more than eps with a
    grid deviation of its own family."""
    n, m = len(vals), vals[0].m
    actions = [grid.actions_for(m, bundles[i] if bundles else None) for i in range(n)]
    total = math.prod(a.shape[0] for a in actions)
    if total > cap:
        raise CapExceeded(f"{total} grid profiles exceed cap {cap}")
    rules = [(1.0, rule)] if isinstance(rule, PriorityRule) else list(rule.mixture)
    tables = [v.as_table() for v in vals]
    found = []
    opp_index = [np.array([k for k in range(n) if k != i]) for i in range(n)]
    for combo in itertools.product(*(range(a.shape[0]) for a in actions)):
        bids = np.stack([actions[i][combo[i]] for i in range(n)])
        worst = 0.0
        for i in range(n):
            dev = np.zeros(actions[i].shape[0])
            cur = 0.0
            for prob, det in rules:
                dev += prob * deviation_payoffs(vals[i], actions[i], i,
                                                bids[opp_index[i]], opp_index[i], det)
                cur += prob * dev_current(tables[i], bids, i, det)
            worst = max(worst, float(dev.max()) - cur)
            if worst > eps + TIE_TOL:
                break
        if worst <= eps + TIE_TOL:
            found.append(GridEquilibrium(tuple(tuple(float(x) for x in row) for row in bids),
                                         worst))
    return found


def dev_current(table: np.ndarray, bids: np.ndarray, player: int,
                rule: PriorityRule) -> float:
    """Player's realized utility in the profile under a deterministic rule."""
    n, m = bids.shape
    mask, paid = 0, 0.0
    for j in range(m):
        col = bids[:, j]
        tied = np.flatnonzero(col >= col.max() - TIE_TOL)
        if rule.pick(j, tied) == player:
            mask |= 1 << j
            paid += bids[player, j]
    return float(table[mask]) - paid


def sup_deviation_utility(v: Valuation, opp_bids: np.ndarray) -> float:
    """Supremum over all real bid vectors of the player's deviation utility.

    Winning item j costs at least the opponents' max bid there and that
    cost is approachable (or attained under a favoring tie), so the sup is
    max over bundles T of v(T) - beat(T). A profile is an eps-equilibrium
    in the continuum iff every player's sup gain is <= eps.
    """
    beat = opp_bids.max(axis=0)
    table = v.as_table()
    cost = np.zeros(table.size)
    for j in range(v.m):
        cost[np.arange(table.size) & (1 << j) > 0] += beat[j]
    return float((table - cost).max())


@dataclass(frozen=True)
class LimitCheckResult:
    eps: float
    status: str  # "ok" | "failure" | "inconclusive"
    witness: tuple | None = None


def limit_equilibrium_check(vals: list[Valuation], candidate, rule=PriorityRule(),
                            eps_list=(0.1, 0.01), cap: int = 200_000) -> list[LimitCheckResult]:
    """Is the candidate a limit of eps-equilibria?

    For each eps, scans the grid ball of radius eps (step eps/m) around the
    candidate for a profile no player can improve by more than eps against
    (deviations range over the whole continuum via sup_deviation_utility).
    "inconclusive" reports a ball too large to enumerate, as distinct from
    an exhaustive search that found nothing.
    """
    cand = np.asarray(candidate, dtype=np.float64)
    n, m = cand.shape
    if any(e <= 0 for e in eps_list):
        raise ValueError("eps values must be positive")
    results = []
    for eps in eps_list:
        step = eps / m
        offsets = step * np.arange(-m, m + 1)
        total = (2 * m + 1) ** (n * m)
        if total > cap:
            results.append(LimitCheckResult(eps, "inconclusive"))
            continue
        rules = [(1.0, rule)] if isinstance(rule, PriorityRule) else list(rule.mixture)
        hit = None
        for combo in itertools.product(range(2 * m + 1), repeat=n * m):
            bids = np.maximum(cand + offsets[list(combo)].reshape(n, m), 0.0)
            ok = True
            for i in range(n):
                opp = np.delete(bids, i, axis=0)
                cur = sum(prob * dev_current(vals[i].as_table(), bids, i, det)
                          for prob, det in rules)
                if sup_deviation_utility(vals[i], opp) > cur + eps + TIE_TOL:
                    ok = False
                    break
            if ok:
                hit = bids
                break
        if hit is None:
            results.append(LimitCheckResult(eps, "failure"))
        else:
            results.append(LimitCheckResult(eps, "ok",
                                            tuple(tuple(float(x) for x in r) for r in hit)))
    return results


# ---------------------------------------------------------------------------
# Mixed strategies and best-response gaps


@dataclass(frozen=True)
class FiniteSupportStrategy:
    """Finitely many bid vectors with probabilities summing to 1."""

    atoms: tuple  # of (probability, bid tuple)

    def __post_init__(self):
        total = sum(p for p, _ in self.atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}")
        if any(p < 0 for p, _ in self.atoms):
            raise ValueError("probabilities must be nonnegative")

    def support_vectors(self) -> np.ndarray:
        return np.array([b for _, b in self.atoms], dtype=np.float64)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        probs = np.array([p for p, _ in self.atoms])
        idx = rng.choice(len(self.atoms), size=size, p=probs / probs.sum())
        return self.support_vectors()[idx]


@dataclass(frozen=True)
class AndOrRole:
    """One side of the closed-form AND-OR equilibrium."""

    pair: cf.AndOrStrategyPair
    role: str  # "and" | "or"

    def __post_init__(self):
        if self.role not in ("and", "or"):
            raise ValueError("role must be 'and' or 'or'")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        m = self.pair.m
        if self.role == "and":
            return np.repeat(self.pair.sample_and_bids(rng, size)[:, None], m, axis=1)
        items, x = self.pair.sample_or_bids(rng, size)
        out = np.zeros((size, m))
        out[np.arange(size), items] = x
        return out


@dataclass(frozen=True)
class SingleMindedRole:
    """Uniform bundle bid drawn from the symmetric single-minded CDF."""

    strategy: cf.SingleMindedSymmetric
    bundle: int
    m: int

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.zeros((size, self.m))
        out[:, members(self.bundle)] = self.strategy.cdf.sample(rng, size)[:, None]
        return out


@dataclass(frozen=True)
class BestResponseGap:
    gap: float
    ci99: float
    method: str  # "analytic" | "exact" | "monte_carlo"
    baseline: float
    best_deviation: tuple = ()

    def to_json(self) -> dict:
        return {"gap": self.gap, "ci99": self.ci99, "method": self.method,
                "baseline": self.baseline, "best_deviation": list(self.best_deviation)}


def _andor_gap_analytic(pair: cf.AndOrStrategyPair, role: str, grid: BidGrid) -> BestResponseGap:
    axis = grid.points()
    if role == "and":
        # The AND utility is a sum of per-item terms, so the maximum over the
        # full product grid is the sum of per-axis maxima.
        g_lt = pair.G.prob_lt(axis)
        phi = g_lt / pair.m * (1.0 - axis) - axis * (pair.m - 1.0) / pair.m
        best = int(np.argmax(phi))
        gap = pair.m * float(phi[best])
        dev = tuple(np.full(pair.m, axis[best]))
        return BestResponseGap(max(gap, 0.0), 0.0, "analytic", 0.0, dev)
    # A multi-item OR bid is dominated by keeping only its maximal entry,
    # so scanning single-item bids covers the whole grid.
    base = pair.v - pair.top
    f_lt = pair.F.prob_lt(axis)
    util = (pair.v - axis) * f_lt
    best = int(np.argmax(util))
    dev = [0.0] * pair.m
    dev[0] = float(axis[best])
    return BestResponseGap(max(float(util[best]) - base, 0.0), 0.0, "analytic",
                           base, tuple(dev))


def _singleminded_gap_analytic(role: SingleMindedRole, grid: BidGrid) -> BestResponseGap:
    # Deviations scan the player's own bundle only: off-bundle bids win only
    # worthless items at positive cost, and bids above the support top always
    # win but pay more than the top would.
    sm = role.strategy
    axis = grid.points()
    axis = axis[axis <= sm.top + TIE_TOL]
    util = cf.singleminded_utility_grid(sm, axis)
    flat = int(np.argmax(util))
    best = np.unravel_index(flat, util.shape)
    dev = np.zeros(role.m)
    dev[members(role.bundle)] = axis[list(best)]
    return BestResponseGap(max(float(util[best]), 0.0), 0.0, "analytic", 0.0,
                           tuple(dev))


def _exact_gap(vals, strategies, player, grid: BidGrid, rule: PriorityRule,
               bundle) -> BestResponseGap:
    n, m = len(vals), vals[0].m
    opp_index = np.array([k for k in range(n) if k != player])
    combos = list(itertools.product(*(range(len(strategies[k].atoms)) for k in opp_index)))
    actions = grid.actions_for(m, bundle)
    dev = np.zeros(actions.shape[0])
    base = 0.0
    own = strategies[player]
    for combo in combos:
        prob = math.prod(strategies[opp_index[t]].atoms[c][0] for t, c in enumerate(combo))
        opp = np.array([strategies[opp_index[t]].atoms[c][1] for t, c in enumerate(combo)])
        dev += prob * deviation_payoffs(vals[player], actions, player, opp, opp_index, rule)
        own_vecs = own.support_vectors()
        payoff = deviation_payoffs(vals[player], own_vecs, player, opp, opp_index, rule)
        base += prob * float(np.dot([p for p, _ in own.atoms], payoff))
    k = int(np.argmax(dev))
    return BestResponseGap(float(dev[k]) - base, 0.0, "exact", base, tuple(actions[k]))


def _rule_ranks(rule: PriorityRule, n: int, m: int) -> np.ndarray:
    """(m, n) priority ranks; lower rank wins a tie."""
    ranks = np.empty((m, n), dtype=np.int64)
    for j in range(m):
        order = range(n) if rule.order is None else rule.order[j]
        for r, i in enumerate(order):
            ranks[j, i] = r
    return ranks


def _favored_matrix(rule: PriorityRule, player: int, n: int, opp_bids: np.ndarray,
                    opp_index: np.ndarray, beat: np.ndarray) -> np.ndarray:
    """(trials, m) flags: does `player` win a tie at the opponents' max bid?"""
    m = opp_bids.shape[2]
    ranks = _rule_ranks(rule, n, m)
    opp_rank = ranks[:, opp_index].T  # (n-1, m)
    at_max = opp_bids >= beat[:, None, :] - TIE_TOL  # (trials, n-1, m)
    rival_rank = np.where(at_max, opp_rank[None, :, :], np.iinfo(np.int64).max)
    return ranks[:, player][None, :] < rival_rank.min(axis=1)


def _mc_gap(vals, strategies, player, grid: BidGrid, rule: PriorityRule,
            bundle, trials: int, seed: int) -> BestResponseGap:
    n, m = len(vals), vals[0].m
    opp_index = np.array([k for k in range(n) if k != player])
    rng = rng_for(seed, "brgap", player)
    opp = np.stack([strategies[k].sample(rng, trials) for k in opp_index], axis=1)
    own = strategies[player].sample(rng, trials)
    actions = grid.actions_for(m, bundle)
    table = vals[player].as_table()
    beat = opp.max(axis=1)  # (trials, m)
    favored = _favored_matrix(rule, player, n, opp, opp_index, beat)
    dev_mean = np.empty(actions.shape[0])
    dev_var = np.empty(actions.shape[0])
    for a in range(actions.shape[0]):
        u = _utilities_vs(table, actions[a][None, :], beat, favored)
        dev_mean[a] = u.mean()
        dev_var[a] = u.var(ddof=1)
    base_u = _utilities_vs(table, own, beat, favored)
    base = float(base_u.mean())
    k = int(np.argmax(dev_mean))
    var = dev_var[k] / trials + base_u.var(ddof=1) / trials
    return BestResponseGap(float(dev_mean[k]) - base, cf.Z99 * math.sqrt(var),
                           "monte_carlo", base, tuple(actions[k]))


def _utilities_vs(table, rows, beat, favored):
    """Utilities of bid rows (broadcast against (trials, m) beat prices)."""
    win = (rows > beat + TIE_TOL) | ((np.abs(rows - beat) <= TIE_TOL) & favored)
    masks = (win.astype(np.int64) * (1 << np.arange(beat.shape[1]))).sum(axis=1)
    return table[masks] - (win * rows).sum(axis=1)


def best_response_gap(vals: list[Valuation], strategies: list, player: int,
                      grid: BidGrid, rule=PriorityRule(), trials: int = 100_000,
                      seed: int = 0, bundle: int | None = None) -> BestResponseGap:
    """Largest improvement available to `player` over its strategy by any
    grid deviation, against the others' mixed strategies.

    Analytic for the closed-form profiles, exact enumeration when all
    opponents have finite support, Monte Carlo (with a 99% CI on the gap)
    otherwise.
    """
    opp = [s for k, s in enumerate(strategies) if k != player]
    own = strategies[player]
    if (isinstance(own, AndOrRole) and len(opp) == 1
            and isinstance(opp[0], AndOrRole) and opp[0].pair == own.pair
            and opp[0].role != own.role):
        return _andor_gap_analytic(own.pair, own.role, grid)
    if (isinstance(own, SingleMindedRole)
            and all(isinstance(s, SingleMindedRole) and s.strategy == own.strategy
                    for s in opp)):
        return _singleminded_gap_analytic(own, grid)
    if all(isinstance(s, FiniteSupportStrategy) for s in strategies):
        return _exact_gap(vals, strategies, player, grid, rule, bundle)
    return _mc_gap(vals, strategies, player, grid, rule, bundle, trials, seed)


# ---------------------------------------------------------------------------
# Common-price correspondence scan


@dataclass(frozen=True)
class CommonPriceEquilibrium:
    prices: tuple
    allocation: Allocation
    gap: float


def common_price_scan(vals: list[Valuation], grid: BidGrid, eps: float,
                      stop_at_first: bool = True) -> list[CommonPriceEquilibrium]:
    """Grid equilibria in the common-price family.

    A profile is one shared price vector p (all players bid p on every
    item) plus an assignment of each item to a winner, ties favoring the
    assigned winner. Deviations are unrestricted grid bids: beating item j
    costs p_j for its winner and p_j + step for everyone else. Returns
    profiles whose best deviation gain is <= eps.
    """
    n, m = len(vals), vals[0].m
    pts = grid.points()
    if pts.size ** m > 500_000:
        raise CapExceeded(f"common-price mesh {pts.size}^{m} is too large")
    mesh = np.meshgrid(*([pts] * m), indexing="ij")
    flat = [g.ravel() for g in mesh]  # per item price arrays, length L^m
    subset_sum = {}
    for t in range(1 << m):
        s = np.zeros(flat[0].size)
        for j in members(t):
            s = s + flat[j]
        subset_sum[t] = s
    tables = [v.as_table() for v in vals]
    found = []
    for assign in itertools.product(range(n), repeat=m):
        alloc = Allocation(assign)
        worst = np.zeros(flat[0].size)
        for i in range(n):
            mine = alloc.bundle(i)
            current = tables[i][mine] - subset_sum[mine]
            best_dev = np.full(flat[0].size, -np.inf)
            for t in range(1 << m):
                extra = grid.step * len(members(t & ~mine))
                np.maximum(best_dev, tables[i][t] - subset_sum[t] - extra, out=best_dev)
            worst = np.maximum(worst, best_dev - current)
        for k in np.flatnonzero(worst <= eps + TIE_TOL):
            prices = tuple(float(f[k]) for f in flat)
            found.append(CommonPriceEquilibrium(prices, alloc, float(worst[k])))
            if stop_at_first:
                return found
    return found


def common_price_gap(vals: list[Valuation], prices, alloc: Allocation,
                     step: float) -> float:
    """Best deviation gain in the common-price profile (everyone bids
    `prices`, ties to the allocated winner, deviations on the step grid)."""
    m = vals[0].m
    p = np.asarray(prices, dtype=np.float64)
    worst = -math.inf
    for i, v in enumerate(vals):
        mine = alloc.bundle(i)
        table = v.as_table()
        cur = float(table[mine]) - float(p[members(mine)].sum())
        for t in range(1 << m):
            cost = float(p[members(t)].sum()) + step * len(members(t & ~mine))
            worst = max(worst, float(table[t]) - cost - cur)
    return worst


def walrasian_near(vals: list[Valuation], alloc: Allocation, prices,
                   slack: float) -> bool:
    """Is some Walrasian equilibrium with this allocation within `slack`
    (per item, sup-norm) of the given prices? LP feasibility check."""
    m = vals[0].m
    p0 = np.asarray(prices, dtype=np.float64)
    rows, rhs = [], []
    for i, v in enumerate(vals):
        mine = alloc.bundle(i)
        for t in range(1 << m):
            if t == mine:
                continue
            row = np.zeros(m)
            for j in members(mine):
                row[j] += 1.0
            for j in members(t):
                row[j] -= 1.0
            rows.append(row)
            rhs.append(v.value(mine) - v.value(t))
    eye = np.eye(m)
    rows.extend(eye)
    rhs.extend(p0 + slack)
    rows.extend(-eye)
    rhs.extend(-(p0 - slack))
    return feasible_point(np.array(rows), np.array(rhs), m) is not None
