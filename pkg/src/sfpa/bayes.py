"""Finite-type Bayesian verification harness.

Players have finitely many types (one valuation each), a joint prior over
type profiles, and per-type mixed strategies over finite action lists.
Everything here is exact enumeration over type profiles and action
combinations, hence deterministic given inputs: the harness verifies
supplied strategies, it does not compute equilibria.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .auction import PriorityRule, optimal_welfare
from .equilibrium import deviation_payoffs
from .valuations import Valuation, valuation_from_json

PROB_TOL = 1e-12


@dataclass
class FiniteBayesianGame:
    """Per-player type lists (a valuation per type), a prior over type
    profiles, and per-player finite action lists."""

    type_vals: list          # type_vals[i][t] is a Valuation
    prior: np.ndarray        # shape (T_1, ..., T_n), sums to 1
    actions: list            # actions[i] is a (K_i, m) bid matrix
    rule: PriorityRule = PriorityRule()

    def __post_init__(self):
        self.prior = np.asarray(self.prior, dtype=np.float64)
        shape = tuple(len(ts) for ts in self.type_vals)
        if self.prior.shape != shape:
            raise ValueError(f"prior shape {self.prior.shape} != type counts {shape}")
        if abs(self.prior.sum() - 1.0) > PROB_TOL or (self.prior < -PROB_TOL).any():
            raise ValueError("prior must be a probability table")
        self.actions = [np.asarray(a, dtype=np.float64) for a in self.actions]
        m = self.m
        for vs in self.type_vals:
            if any(v.m != m for v in vs):
                raise ValueError("all type valuations must share m")

    @property
    def n(self) -> int:
        return len(self.type_vals)

    @property
    def m(self) -> int:
        return self.type_vals[0][0].m

    def type_marginal(self, player: int) -> np.ndarray:
        axes = tuple(k for k in range(self.n) if k != player)
        return self.prior.sum(axis=axes)

    def is_product(self, tol: float = PROB_TOL) -> bool:
        """Does the prior factor into its per-player marginals?"""
        outer = np.ones(())
        for i in range(self.n):
            outer = np.multiply.outer(outer, self.type_marginal(i))
        return bool(np.abs(outer - self.prior).max() <= tol)

    def grid_step(self) -> float:
        """Largest spacing between adjacent per-item bid levels on offer."""
        step = 0.0
        for acts in self.actions:
            for j in range(self.m):
                pts = np.unique(acts[:, j])
                if pts.size > 1:
                    step = max(step, float(np.diff(pts).max()))
        return step


def check_strategies(bg: FiniteBayesianGame, strategies: list) -> list:
    """Normalize/validate strategies[i] as a (T_i, K_i) row-stochastic matrix."""
    out = []
    for i, s in enumerate(strategies):
        s = np.asarray(s, dtype=np.float64)
        want = (len(bg.type_vals[i]), bg.actions[i].shape[0])
        if s.shape != want:
            raise ValueError(f"strategy {i} has shape {s.shape}, want {want}")
        if (s < -PROB_TOL).any() or np.abs(s.sum(axis=1) - 1.0).max() > PROB_TOL:
            raise ValueError(f"strategy {i} rows must be distributions")
        out.append(s)
    return out


def _opponent_play(bg: FiniteBayesianGame, strategies: list, player: int,
                   opp_types: tuple):
    """Joint opponent action distribution given their types: iterator of
    (probability, (n-1, m) bid matrix)."""
    opp = [k for k in range(bg.n) if k != player]
    supports = []
    for slot, k in enumerate(opp):
        probs = strategies[k][opp_types[slot]]
        supports.append([(p, bg.actions[k][a]) for a, p in enumerate(probs) if p > 0])
    for combo in itertools.product(*supports):
        prob = math.prod(p for p, _ in combo)
        yield prob, np.array([b for _, b in combo])


def bayes_deviation_gap(bg: FiniteBayesianGame, strategies: list) -> list:
    """Exact per-(player, type) best-deviation gaps.

    gap[i][t] = max_a E[u_i(a) | type t] - E[u_i(strategy) | type t], the
    expectation running over the conditional prior on opponents' types and
    everyone's mixed actions. All gaps <= eps certifies a Bayesian
    eps-equilibrium.
    """
    strategies = check_strategies(bg, strategies)
    gaps = []
    for i in range(bg.n):
        opp = [k for k in range(bg.n) if k != i]
        opp_index = np.array(opp)
        marg = bg.type_marginal(i)
        player_gaps = np.zeros(len(bg.type_vals[i]))
        for t in range(len(bg.type_vals[i])):
            if marg[t] <= PROB_TOL:
                continue
            cond = np.moveaxis(bg.prior, i, 0)[t] / marg[t]
            eu = np.zeros(bg.actions[i].shape[0])
            for opp_types in itertools.product(*(range(len(bg.type_vals[k])) for k in opp)):
                q = float(cond[opp_types] if opp_types else cond)
                if q <= PROB_TOL:
                    continue
                for prob, opp_bids in _opponent_play(bg, strategies, i, opp_types):
                    eu += q * prob * deviation_payoffs(bg.type_vals[i][t], bg.actions[i],
                                                       i, opp_bids, opp_index, bg.rule)
            player_gaps[t] = float(eu.max() - eu @ strategies[i][t])
        gaps.append(player_gaps)
    return gaps


@dataclass(frozen=True)
class BayesWelfareReport:
    """Expected-welfare ratio against the two Bayesian price-of-anarchy bounds.

    The bounds hold for Bayesian eps-equilibria up to explicit slack from
    the measured gaps and the bid grid spacing: general
    E[OPT] <= (4mn+2) E[SW] + 2(sum_i avg_gap_i + n m step), and for a
    product prior over beta-XOS valuations
    E[OPT] <= 4 beta E[SW] + 2 beta (sum_i avg_gap_i + n m step).
    `gap_precondition_ok` flags strategies whose measured deviation gaps
    exceed the claimed eps: the bounds then say nothing beyond their slack.
    """

    expected_opt: float
    expected_welfare: float
    ratio: float
    avg_gaps: tuple
    max_gap: float
    eps: float
    gap_precondition_ok: bool
    grid_step: float
    bound_general: float
    bound_general_ok: bool
    beta: float | None
    product_prior: bool
    bound_beta: float | None
    bound_beta_ok: bool | None
    beta_check_skipped: str | None

    def to_json(self) -> dict:
        return {"expected_opt": self.expected_opt, "expected_welfare": self.expected_welfare,
                "ratio": self.ratio, "avg_gaps": list(self.avg_gaps), "max_gap": self.max_gap,
                "eps": self.eps, "gap_precondition_ok": self.gap_precondition_ok,
                "grid_step": self.grid_step, "bound_general": self.bound_general,
                "bound_general_ok": self.bound_general_ok, "beta": self.beta,
                "product_prior": self.product_prior, "bound_beta": self.bound_beta,
                "bound_beta_ok": self.bound_beta_ok,
                "beta_check_skipped": self.beta_check_skipped}


def expected_welfare(bg: FiniteBayesianGame, strategies: list) -> float:
    """E over types and mixed actions of the realized social welfare."""
    strategies = check_strategies(bg, strategies)
    total = 0.0
    for types in itertools.product(*(range(len(ts)) for ts in bg.type_vals)):
        q = float(bg.prior[types])
        if q <= PROB_TOL:
            continue
        vals = [bg.type_vals[i][types[i]] for i in range(bg.n)]
        supports = [[(p, bg.actions[i][a]) for a, p in enumerate(strategies[i][types[i]])
                     if p > 0] for i in range(bg.n)]
        for combo in itertools.product(*supports):
            prob = math.prod(p for p, _ in combo)
            bids = np.array([b for _, b in combo])
            total += q * prob * _welfare_of(vals, bids, bg.rule)
    return total


def _welfare_of(vals, bids, rule) -> float:
    from .auction import allocate
    alloc = allocate(bids, rule)
    return sum(v.value(alloc.bundle(i)) for i, v in enumerate(vals))


def bayes_welfare_bounds(bg: FiniteBayesianGame, strategies: list,
                         beta: float | None = None,
                         eps: float = PROB_TOL) -> BayesWelfareReport:
    """Expected optimal vs equilibrium welfare with slack-aware bound checks.

    `eps` is the claimed equilibrium quality; measured gaps above it flag
    the report's gap precondition."""
    strategies = check_strategies(bg, strategies)
    e_opt = 0.0
    for types in itertools.product(*(range(len(ts)) for ts in bg.type_vals)):
        q = float(bg.prior[types])
        if q <= PROB_TOL:
            continue
        vals = [bg.type_vals[i][types[i]] for i in range(bg.n)]
        e_opt += q * optimal_welfare(vals)[0]
    e_sw = expected_welfare(bg, strategies)
    gaps = bayes_deviation_gap(bg, strategies)
    avg_gaps = tuple(float(np.dot(bg.type_marginal(i), np.maximum(gaps[i], 0.0)))
                     for i in range(bg.n))
    max_gap = max(float(g.max()) for g in gaps)
    step = bg.grid_step()
    n, m = bg.n, bg.m
    slack = 2.0 * (sum(avg_gaps) + n * m * step)
    bound_general = (4 * m * n + 2) * e_sw + slack
    general_ok = e_opt <= bound_general + 1e-12
    product = bg.is_product()
    skipped = None
    bound_beta = beta_ok = None
    if beta is None:
        skipped = "no beta supplied"
    elif not math.isfinite(beta):
        skipped = "valuations are not beta-XOS for finite beta"
    elif not product:
        skipped = "prior is not a product distribution"
    else:
        bound_beta = 4.0 * beta * e_sw + 2.0 * beta * (sum(avg_gaps) + n * m * step)
        beta_ok = e_opt <= bound_beta + 1e-12
    return BayesWelfareReport(e_opt, e_sw, e_opt / e_sw if e_sw > 0 else math.inf,
                              avg_gaps, max_gap, eps, max_gap <= eps + PROB_TOL,
                              step, bound_general, general_ok,
                              beta, product, bound_beta, beta_ok, skipped)


def bayesian_game_from_json(d: dict) -> tuple[FiniteBayesianGame, list]:
    """Parse {types, prior, actions, strategies} into a game and strategies.

    Schema: types = per-player list of valuation objects; prior = nested
    list matching the type counts (or {"kind": "product", "marginals":
    [...]}); actions = per-player list of bid vectors; strategies =
    per-player list (one row per type) of action probabilities.
    """
    type_vals = [[valuation_from_json(v) for v in ts] for ts in d["types"]]
    prior = d["prior"]
    if isinstance(prior, dict) and prior.get("kind") == "product":
        table = np.ones(())
        for marg in prior["marginals"]:
            table = np.multiply.outer(table, np.asarray(marg, dtype=np.float64))
    else:
        table = np.asarray(prior, dtype=np.float64)
    rule = PriorityRule(tuple(tuple(p) for p in d["tie_rule"]["order"])) \
        if "tie_rule" in d and d["tie_rule"].get("kind") == "priority" else PriorityRule()
    bg = FiniteBayesianGame(type_vals, table, [np.asarray(a) for a in d["actions"]], rule)
    strategies = [np.asarray(s, dtype=np.float64) for s in d["strategies"]]
    return bg, strategies


def best_response_strategies(bg: FiniteBayesianGame, strategies: list,
                             sweeps: int = 50, players=None) -> tuple[list, bool]:
    """Iterated exact best response over pure per-type actions.

    Test scaffolding for building gap-0 inputs to the harness: returns the
    final strategy profile and whether it is a fixed point (a pure Bayesian
    Nash equilibrium of the finite game when every player participates).
    Not an equilibrium solver; it simply stops if the dynamics cycle.
    `players` restricts which players get updated (default: all).
    """
    strategies = [s.copy() for s in check_strategies(bg, strategies)]
    updating = range(bg.n) if players is None else players
    for _ in range(sweeps):
        changed = False
        for i in updating:
            opp = [k for k in range(bg.n) if k != i]
            opp_index = np.array(opp)
            marg = bg.type_marginal(i)
            for t in range(len(bg.type_vals[i])):
                if marg[t] <= PROB_TOL:
                    continue
                cond = np.moveaxis(bg.prior, i, 0)[t] / marg[t]
                eu = np.zeros(bg.actions[i].shape[0])
                for opp_types in itertools.product(
                        *(range(len(bg.type_vals[k])) for k in opp)):
                    q = float(cond[opp_types] if opp_types else cond)
                    if q <= PROB_TOL:
                        continue
                    for prob, opp_bids in _opponent_play(bg, strategies, i, opp_types):
                        eu += q * prob * deviation_payoffs(bg.type_vals[i][t], bg.actions[i],
                                                           i, opp_bids, opp_index, bg.rule)
                best = int(np.argmax(eu))
                row = np.zeros(bg.actions[i].shape[0])
                row[best] = 1.0
                if eu[best] > eu @ strategies[i][t] + 1e-12:
                    strategies[i][t] = row
                    changed = True
        if not changed:
            return strategies, True
    return strategies, False
