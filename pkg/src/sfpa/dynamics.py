"""No-regret dynamics on discretized auction games.

Each player runs multiplicative weights over a finite action family with
the anytime step size eta_t = sqrt(ln K / t) / range (payoffs normalized by
the largest full-bundle value). Every round, every action of every player
is scored against the opponents' realized bids (full-information
counterfactuals), which makes external regret exact and the empirical play
distribution a measurable approximate coarse correlated equilibrium.

Action families:

- `ExplicitActions`: an explicit (K, m) list of bid vectors; weights live
  on the K actions.
- `SeparableGrid`: per-item bid levels, valid only for additive valuations,
  whose utility splits across items. Joint multiplicative weights over the
  level product then factorize exactly into independent per-item updates,
  so K = prod(levels) costs nothing to learn over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .auction import PriorityRule, TIE_TOL, optimal_welfare
from .closedform import AtomicCDF
from .rng import rng_for
from .valuations import AdditiveValuation, Valuation


class ExplicitActions:
    def __init__(self, vectors):
        self.vectors = np.asarray(vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValueError("actions must be a (K, m) matrix")

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    def max_spend(self) -> float:
        return float(self.vectors.sum(axis=1).max())


class SeparableGrid:
    """Per-item levels (ragged), padded to a rectangle with a validity mask."""

    def __init__(self, levels: list):
        arrs = [np.asarray(l, dtype=np.float64) for l in levels]
        if any(a.ndim != 1 or a.size == 0 for a in arrs):
            raise ValueError("each item needs a nonempty 1-d level array")
        width = max(a.size for a in arrs)
        self.levels = np.zeros((len(arrs), width))
        self.valid = np.zeros((len(arrs), width), dtype=bool)
        for j, a in enumerate(arrs):
            self.levels[j, :a.size] = a
            self.valid[j, :a.size] = True

    @property
    def count(self) -> int:
        return int(np.prod(self.valid.sum(axis=1)))

    def max_spend(self) -> float:
        return float(np.where(self.valid, self.levels, 0.0).max(axis=1).sum())


@dataclass
class FiniteGame:
    """Finite bid game: per-player action family, valuations, deterministic ties."""

    vals: list
    spaces: list
    rule: PriorityRule = field(default_factory=PriorityRule)
    grid_step: float = 0.0  # action spacing, reported into slack accounting

    def __post_init__(self):
        n, m = len(self.vals), self.vals[0].m
        if len(self.spaces) != n:
            raise ValueError("one action space per player")
        self.rule.validate(n, m)
        for i, sp in enumerate(self.spaces):
            if isinstance(sp, SeparableGrid) and not isinstance(self.vals[i], AdditiveValuation):
                raise ValueError("separable grids factorize only for additive valuations")


@dataclass
class LearningTrace:
    """Round-by-round record of a multiplicative-weights run."""

    game: FiniteGame
    seed: int
    rounds: int
    bids: np.ndarray        # (T, n, m) realized bids
    action_index: np.ndarray  # (T, n) sampled action (mixed-radix for separable)
    utilities: np.ndarray   # (T, n) realized money utilities
    welfare: np.ndarray     # (T,)
    regret: np.ndarray      # (T, n) running external regret, money units
    cum_counterfactual: list  # per player, money units
    snapshots: dict         # round -> list of per-player probability arrays
    ln_k: np.ndarray        # (n,)
    payoff_range: np.ndarray  # (n,) money units

    def final_regret(self) -> np.ndarray:
        return self.regret[-1]

    def regret_envelope(self) -> np.ndarray:
        """2 sqrt(T ln K_i) * payoff range, the checked MW guarantee."""
        return 2.0 * np.sqrt(self.rounds * self.ln_k) * self.payoff_range

    def empirical_welfare(self) -> float:
        return float(self.welfare.mean())

    def to_csv_rows(self):
        """Long-format rows (round, player, action_index, utility, regret)."""
        t_col = np.repeat(np.arange(self.rounds), len(self.game.vals))
        p_col = np.tile(np.arange(len(self.game.vals)), self.rounds)
        return np.column_stack([t_col, p_col, self.action_index.ravel(),
                                self.utilities.ravel(), self.regret.ravel()])


def _rank_matrix(rule: PriorityRule, n: int, m: int) -> np.ndarray:
    ranks = np.empty((m, n), dtype=np.int64)
    for j in range(m):
        order = range(n) if rule.order is None else rule.order[j]
        for r, i in enumerate(order):
            ranks[j, i] = r
    return ranks


def _sample_level_indices(rng, probs: np.ndarray) -> np.ndarray:
    """Categorical draw along the last axis of a (m, L) probability array."""
    cum = probs.cumsum(axis=-1)
    u = rng.random(probs.shape[0])
    return (u[:, None] > cum).sum(axis=-1)


def run_no_regret(game: FiniteGame, rounds: int, seed: int,
                  snapshot_every: int | None = None) -> LearningTrace:
    """Run multiplicative weights for `rounds` rounds; T = 0 is rejected."""
    if rounds < 1:
        raise ValueError("need at least one round")
    if len(game.vals) > 1 and all(isinstance(sp, SeparableGrid) for sp in game.spaces):
        return _run_separable(game, rounds, seed, snapshot_every)
    n, m = len(game.vals), game.vals[0].m
    rng = rng_for(seed, "no-regret")
    ranks = _rank_matrix(game.rule, n, m)
    tables = [v.as_table() for v in game.vals]
    vmax = max(v.value_max() for v in game.vals)
    if vmax <= 0:
        raise ValueError("normalization needs a player with positive full-bundle value")
    lo = np.array([-sp.max_spend() for sp in game.spaces])
    hi = np.array([v.value_max() for v in game.vals])
    payoff_range = hi - lo
    span = payoff_range / vmax  # eta scale, 1 for value-capped additive grids

    cum, ln_k = [], np.empty(n)
    for i, sp in enumerate(game.spaces):
        ln_k[i] = math.log(sp.count)
        if isinstance(sp, SeparableGrid):
            c = np.zeros(sp.levels.shape)
            c[~sp.valid] = -np.inf
            cum.append(c)
        else:
            cum.append(np.zeros(sp.count))

    weights_item = 1 << np.arange(m)
    bids_out = np.empty((rounds, n, m))
    index_out = np.empty((rounds, n), dtype=np.int64)
    util_out = np.empty((rounds, n))
    welfare_out = np.empty(rounds)
    regret_out = np.empty((rounds, n))
    realized_cum = np.zeros(n)
    snapshots = {}
    if snapshot_every is None:
        snapshot_every = max(1, rounds // 16)

    for t in range(1, rounds + 1):
        bids = np.empty((n, m))
        probs_now = []
        for i, sp in enumerate(game.spaces):
            eta = math.sqrt(ln_k[i] / t) / span[i]
            shifted = cum[i] - (cum[i].max(axis=-1, keepdims=True)
                                if isinstance(sp, SeparableGrid) else cum[i].max())
            w = np.exp(eta * shifted / vmax)
            if isinstance(sp, SeparableGrid):
                w[~sp.valid] = 0.0
                probs = w / w.sum(axis=-1, keepdims=True)
                levels = _sample_level_indices(rng, probs)
                bids[i] = sp.levels[np.arange(m), levels]
                index_out[t - 1, i] = int(np.dot(levels, sp.levels.shape[1] ** np.arange(m)))
            else:
                probs = w / w.sum()
                a = int(rng.choice(sp.count, p=probs))
                bids[i] = sp.vectors[a]
                index_out[t - 1, i] = a
            probs_now.append(probs)
        if t == 1 or t % snapshot_every == 0 or t == rounds:
            snapshots[t] = [p.copy() for p in probs_now]

        # allocation: per item, best-ranked player among those at the max bid
        at_max = bids >= bids.max(axis=0) - TIE_TOL  # (n, m)
        rank_masked = np.where(at_max.T, ranks, np.iinfo(np.int64).max)
        winner = np.argmin(rank_masked, axis=1)  # (m,)
        won_mask = ((winner[None, :] == np.arange(n)[:, None]) * weights_item).sum(axis=1)
        paid = np.where(winner[None, :] == np.arange(n)[:, None], bids, 0.0).sum(axis=1)
        values = np.array([tables[i][won_mask[i]] for i in range(n)])
        util_out[t - 1] = values - paid
        welfare_out[t - 1] = values.sum()
        bids_out[t - 1] = bids

        # counterfactual payoffs and regret
        top = bids.max(axis=0)
        second = np.sort(bids, axis=0)[-2] if n > 1 else np.full(m, -np.inf)
        unique_top = at_max.sum(axis=0) == 1
        for i in range(n):
            beat = np.where(at_max[i] & unique_top, second, top) if n > 1 else np.full(m, -np.inf)
            rival = np.where((bids >= beat - TIE_TOL).T & (np.arange(n) != i), ranks,
                             np.iinfo(np.int64).max).min(axis=1)
            favored = ranks[:, i] < rival
            sp = game.spaces[i]
            if isinstance(sp, SeparableGrid):
                win = (sp.levels > beat[:, None] + TIE_TOL) | (
                    (np.abs(sp.levels - beat[:, None]) <= TIE_TOL) & favored[:, None])
                gain = win * (np.array(game.vals[i].weights)[:, None] - sp.levels)
                cum[i] += np.where(sp.valid, gain, 0.0)
                best_total = cum[i].max(axis=-1).sum()
            else:
                win = (sp.vectors > beat[None, :] + TIE_TOL) | (
                    (np.abs(sp.vectors - beat[None, :]) <= TIE_TOL) & favored[None, :])
                masks = (win * weights_item[None, :]).sum(axis=1)
                cum[i] += tables[i][masks] - (win * sp.vectors).sum(axis=1)
                best_total = cum[i].max()
            realized_cum[i] += util_out[t - 1, i]
            regret_out[t - 1, i] = best_total - realized_cum[i]

    return LearningTrace(game, seed, rounds, bids_out, index_out, util_out,
                         welfare_out, regret_out, cum, snapshots, ln_k, payoff_range)


def _run_separable(game: FiniteGame, rounds: int, seed: int,
                   snapshot_every: int | None) -> LearningTrace:
    """run_no_regret specialized to all-separable grids: every per-round
    quantity is one fused array op over (n, m, L)."""
    n, m = len(game.vals), game.vals[0].m
    rng = rng_for(seed, "no-regret")
    ranks = _rank_matrix(game.rule, n, m)  # (m, n)
    rank_self = ranks.T  # (n, m)
    width = max(sp.levels.shape[1] for sp in game.spaces)
    levels = np.zeros((n, m, width))
    valid = np.zeros((n, m, width), dtype=bool)
    for i, sp in enumerate(game.spaces):
        levels[i, :, :sp.levels.shape[1]] = sp.levels
        valid[i, :, :sp.levels.shape[1]] = sp.valid
    weights_vec = np.array([v.weights for v in game.vals])  # (n, m)
    vmax = max(v.value_max() for v in game.vals)
    if vmax <= 0:
        raise ValueError("normalization needs a player with positive full-bundle value")
    payoff_range = np.array([v.value_max() + sp.max_spend()
                             for v, sp in zip(game.vals, game.spaces)])
    span = payoff_range / vmax
    ln_k = np.log([sp.count for sp in game.spaces])
    eta_base = (np.sqrt(ln_k) / span)[:, None, None]

    cum = np.where(valid, 0.0, -np.inf)
    bids_out = np.empty((rounds, n, m))
    index_out = np.empty((rounds, n), dtype=np.int64)
    util_out = np.empty((rounds, n))
    welfare_out = np.empty(rounds)
    regret_out = np.empty((rounds, n))
    realized_cum = np.zeros(n)
    snapshots = {}
    if snapshot_every is None:
        snapshot_every = max(1, rounds // 16)
    intmax = np.iinfo(np.int64).max
    players = np.arange(n)

    for t in range(1, rounds + 1):
        w = np.exp((eta_base / math.sqrt(t)) * (cum - cum.max(axis=2, keepdims=True)) / vmax)
        probs = w / w.sum(axis=2, keepdims=True)
        idx = (rng.random((n, m))[:, :, None] > probs.cumsum(axis=2)).sum(axis=2)
        bids = np.take_along_axis(levels, idx[:, :, None], axis=2)[:, :, 0]
        index_out[t - 1] = idx @ (width ** np.arange(m))
        if t == 1 or t % snapshot_every == 0 or t == rounds:
            snapshots[t] = [probs[i].copy() for i in range(n)]

        top = bids.max(axis=0)
        at_max = bids >= top - TIE_TOL
        winner = np.argmin(np.where(at_max.T, ranks, intmax), axis=1)  # (m,)
        is_winner = winner[None, :] == players[:, None]  # (n, m)
        util_out[t - 1] = (is_winner * (weights_vec - bids)).sum(axis=1)
        welfare_out[t - 1] = weights_vec[winner, np.arange(m)].sum()
        bids_out[t - 1] = bids

        second = np.sort(bids, axis=0)[-2]
        unique_top = at_max.sum(axis=0) == 1
        beat = np.where(at_max & unique_top[None, :], second[None, :], top[None, :])
        attain = bids[None, :, :] >= beat[:, None, :] - TIE_TOL  # (i, k, j)
        attain &= players[None, :, None] != players[:, None, None]
        rival = np.where(attain, rank_self[None, :, :], intmax).min(axis=1)
        favored = rank_self < rival  # (n, m)
        win = (levels > beat[:, :, None] + TIE_TOL) | (
            (np.abs(levels - beat[:, :, None]) <= TIE_TOL) & favored[:, :, None])
        cum += np.where(valid, win * (weights_vec[:, :, None] - levels), 0.0)
        realized_cum += util_out[t - 1]
        regret_out[t - 1] = cum.max(axis=2).sum(axis=1) - realized_cum

    cum_list = [np.where(sp.valid, cum[i, :, :sp.levels.shape[1]], -np.inf)
                for i, sp in enumerate(game.spaces)]
    return LearningTrace(game, seed, rounds, bids_out, index_out, util_out,
                         welfare_out, regret_out, cum_list, snapshots, ln_k, payoff_range)


def verify_cce(trace: LearningTrace, tol: float = 1e-7) -> float:
    """Recompute counterfactual sums from the stored bids and confirm the
    empirical play distribution is a (max_i regret_i / T)-approximate CCE.

    Returns the largest recomputation discrepancy (should be float dust).
    """
    game, bids = trace.game, trace.bids
    n, m = len(game.vals), game.vals[0].m
    ranks = _rank_matrix(game.rule, n, m)
    worst = 0.0
    for i in range(n):
        sp = game.spaces[i]
        others = np.delete(bids, i, axis=1)  # (T, n-1, m)
        beat = others.max(axis=1) if n > 1 else np.full((trace.rounds, m), -np.inf)
        opp_idx = np.array([k for k in range(n) if k != i])
        if n > 1:
            at = others >= beat[:, None, :] - TIE_TOL
            rival = np.where(at, ranks[:, opp_idx].T[None], np.iinfo(np.int64).max).min(axis=1)
            favored = ranks[:, i][None, :] < rival
        else:
            favored = np.ones((trace.rounds, m), dtype=bool)
        if isinstance(sp, SeparableGrid):
            recomputed = np.zeros(sp.levels.shape)
            for j in range(m):
                lv = sp.levels[j]
                win = (lv[None, :] > beat[:, [j]] + TIE_TOL) | (
                    (np.abs(lv[None, :] - beat[:, [j]]) <= TIE_TOL) & favored[:, [j]])
                recomputed[j] = (win * (game.vals[i].weights[j] - lv[None, :])).sum(axis=0)
            stored = np.where(sp.valid, trace.cum_counterfactual[i], 0.0)
            recomputed[~sp.valid] = 0.0
        else:
            table = game.vals[i].as_table()
            recomputed = np.zeros(sp.count)
            for a in range(sp.count):
                vec = sp.vectors[a]
                win = (vec[None, :] > beat + TIE_TOL) | (
                    (np.abs(vec[None, :] - beat) <= TIE_TOL) & favored)
                masks = (win * (1 << np.arange(m))[None, :]).sum(axis=1)
                recomputed[a] = (table[masks] - (win * vec[None, :]).sum(axis=1)).sum()
            stored = trace.cum_counterfactual[i]
        gap = float(np.abs(recomputed - stored).max())
        worst = max(worst, gap)
        if gap > tol * max(1.0, trace.rounds):
            raise RuntimeError(f"counterfactual recomputation drifted by {gap}")
    return worst


def trace_decomposition(trace: LearningTrace) -> dict:
    """Per-player welfare accounting over a trace: optimal-share value o_i,
    expected equilibrium value e_i and utility u_i, expected payments r_i
    over the items the optimum hands to i, and expected item prices f_j."""
    game = trace.game
    n, m = len(game.vals), game.vals[0].m
    ranks = _rank_matrix(game.rule, n, m)
    bids = trace.bids
    at_max = bids >= bids.max(axis=1, keepdims=True) - TIE_TOL  # (T, n, m)
    rank_masked = np.where(at_max.transpose(0, 2, 1), ranks[None], np.iinfo(np.int64).max)
    winner = rank_masked.argmin(axis=2)  # (T, m)
    prices = np.take_along_axis(bids, winner[:, None, :], axis=1)[:, 0, :]
    f_item = prices.mean(axis=0)
    u_exp = trace.utilities.mean(axis=0)
    pay = np.where(winner[:, None, :] == np.arange(n)[None, :, None], bids, 0.0)
    e_exp = u_exp + pay.sum(axis=2).mean(axis=0)
    _, opt_alloc = optimal_welfare(game.vals)
    o = [game.vals[i].value(opt_alloc.bundle(i)) for i in range(n)]
    r = [float(sum(f_item[j] for j in range(m) if opt_alloc.bundle(i) >> j & 1))
         for i in range(n)]
    return {"o": [float(x) for x in o], "e": [float(x) for x in e_exp],
            "u": [float(x) for x in u_exp], "r": r,
            "item_prices": [float(x) for x in f_item]}


@dataclass(frozen=True)
class CceWelfareReport:
    """Price-of-anarchy accounting for one trace against the two welfare bounds."""

    opt: float
    empirical_welfare: float
    ratio: float
    regret_per_round: tuple
    slack: float
    beta: float | None
    bound_beta: float | None
    bound_beta_ok: bool | None
    bound_general: float
    bound_general_ok: bool
    decomposition: dict

    def to_json(self) -> dict:
        return {"opt": self.opt, "welfare": self.empirical_welfare, "ratio": self.ratio,
                "regret_per_round": list(self.regret_per_round), "slack": self.slack,
                "beta": self.beta, "bound_beta": self.bound_beta,
                "bound_beta_ok": self.bound_beta_ok, "bound_general": self.bound_general,
                "bound_general_ok": self.bound_general_ok,
                "decomposition": self.decomposition}


def ccqe_welfare_ratio(trace: LearningTrace, beta: float | None = None) -> CceWelfareReport:
    """OPT / empirical welfare, checked against OPT <= 2 beta E[SW] + slack
    (finite beta) and the general OPT <= 4m E[SW] + slack bound.

    slack = 2 beta sum_i regret_i/T + n m grid_step for the beta bound and
    2 sum_i regret_i/T + 2 n m grid_step for the general one: finite T and
    the bid grid make the literal inequalities false without these terms.
    """
    game = trace.game
    n, m = len(game.vals), game.vals[0].m
    opt, _ = optimal_welfare(game.vals)
    emp = trace.empirical_welfare()
    reg = tuple(float(max(r, 0.0)) / trace.rounds for r in trace.final_regret())
    general_slack = 2.0 * sum(reg) + 2.0 * n * m * game.grid_step
    bound_general = 4.0 * m * emp + general_slack
    if beta is not None and math.isfinite(beta):
        slack = 2.0 * beta * sum(reg) + m * game.grid_step * n
        bound_beta = 2.0 * beta * emp + slack
        beta_ok = opt <= bound_beta + 1e-12
    else:
        slack, bound_beta, beta_ok = 2.0 * sum(reg) + m * game.grid_step * n, None, None
    return CceWelfareReport(opt, emp, opt / emp if emp > 0 else math.inf, reg, slack,
                            beta, bound_beta, beta_ok, bound_general,
                            opt <= bound_general + 1e-12, trace_decomposition(trace))


def ks_distance(samples: np.ndarray, cdf: AtomicCDF) -> float:
    """One-sample Kolmogorov-Smirnov statistic against an AtomicCDF."""
    x = np.sort(np.asarray(samples, dtype=np.float64))
    k = x.size
    theo = np.asarray(cdf.cdf(x))
    upper = np.abs(np.arange(1, k + 1) / k - theo).max()
    lower = np.abs(np.arange(k) / k - np.asarray(cdf.prob_lt(x))).max()
    return float(max(upper, lower))
