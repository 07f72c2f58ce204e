"""Named experiments: game builders, verification payloads, report assembly.

Every function here returns a plain-JSON payload (dicts, lists, floats)
that is byte-identical across runs for the same parameters and seed. The
CLI wraps these; the acceptance suite calls them directly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import closedform as cf
from .auction import PriorityRule, optimal_welfare, rule_from_json
from .bayes import (FiniteBayesianGame, bayes_deviation_gap, bayes_welfare_bounds,
                    check_strategies)
from .dynamics import (ExplicitActions, FiniteGame, SeparableGrid, ccqe_welfare_ratio,
                       ks_distance, run_no_regret, verify_cce)
from .equilibrium import (AndOrRole, BidGrid, FiniteSupportStrategy,
                          best_response_gap, common_price_gap, common_price_scan,
                          walrasian_near, walrasian_search)
from .rng import rng_for
from .sets import full_set, members
from .valuations import (AdditiveValuation, AndValuation, OrValuation,
                         SingleMindedValuation, TableValuation, Valuation,
                         valuation_from_json)

VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# Game builders

def andor_game(m: int, v: float) -> list[Valuation]:
    return [AndValuation(m, 1.0), OrValuation(m, v)]


def triangle_bundles() -> list[int]:
    return [0b011, 0b110, 0b101]


def triangle_game() -> tuple[list[Valuation], list[int]]:
    bundles = triangle_bundles()
    return [SingleMindedValuation(3, b, 1.0) for b in bundles], bundles


def grid_bundles(side: int) -> list[int]:
    rows = [sum(1 << (i * side + j) for j in range(side)) for i in range(side)]
    cols = [sum(1 << (i * side + j) for i in range(side)) for j in range(side)]
    return rows + cols


def grid_game(side: int) -> tuple[list[Valuation], list[int]]:
    """side^2 items, `side` row bidders and `side` column bidders, value
    `side` each for their full line."""
    bundles = grid_bundles(side)
    m = side * side
    return [SingleMindedValuation(m, b, float(side)) for b in bundles], bundles


def game_from_json(d: dict) -> tuple[list[Valuation], PriorityRule]:
    vals = [valuation_from_json(v) for v in d["valuations"]]
    rule = rule_from_json(d.get("tie_rule", {"kind": "index"}))
    return vals, rule


def build_game(name: str, m: int = 2, v: float = 1.0, k: int = 2, d: int = 2,
               side: int = 3):
    """Named builtin games: returns (valuations, bundles-or-None)."""
    if name == "andor":
        return andor_game(m, v), None
    if name == "triangle":
        return triangle_game()
    if name == "grid":
        return grid_game(side)
    if name == "single_minded":
        if (k, d) == (2, 2):
            return triangle_game()
        if d == 2:
            return grid_game(k)
        raise ValueError(f"no builtin single-minded instance for k={k}, d={d}; "
                         "supply a game file")
    raise ValueError(f"unknown builtin game {name!r}")


# ---------------------------------------------------------------------------
# Closed-form verification

def verify_andor(m: int, v: float, grid_step: float = 1e-3, upper: float = 1.0,
                 trials: int = 0, seed: int = 0, mc_points: int = 2) -> dict:
    """Best-response gaps for both AND-OR players; optional Monte Carlo
    cross-check of the analytic utilities at sampled deviation bids."""
    pair = cf.AndOrStrategyPair(m, v)
    vals = andor_game(m, v)
    strategies = [AndOrRole(pair, "and"), AndOrRole(pair, "or")]
    grid = BidGrid(grid_step, upper)
    g_and = best_response_gap(vals, strategies, 0, grid)
    g_or = best_response_gap(vals, strategies, 1, grid)
    out = {"m": m, "v": v, "grid_step": grid_step,
           "and_gap": g_and.gap, "or_gap": g_or.gap,
           "equilibrium_utilities": list(cf.andor_equilibrium_utilities(pair)),
           "mc_checks": []}
    if trials:
        rng = rng_for(seed, "verify-andor", m)
        for p in range(mc_points):
            y = float(rng.uniform(0, pair.top))
            bids_and = np.full(m, y)
            analytic = cf.andor_utility_and(pair, bids_and).value
            est, half = cf.andor_utility_mc(pair, "and", bids_and, trials,
                                            seed + 101 * p)
            out["mc_checks"].append({"player": "and", "bid": y, "analytic": analytic,
                                     "estimate": est, "ci99": half,
                                     "ok": abs(est - analytic) <= half})
            x = float(rng.uniform(0, pair.top))
            bids_or = np.zeros(m)
            bids_or[p % m] = x
            analytic = cf.andor_utility_or(pair, bids_or)
            est, half = cf.andor_utility_mc(pair, "or", bids_or, trials,
                                            seed + 211 * p)
            out["mc_checks"].append({"player": "or", "bid": x, "analytic": analytic,
                                     "estimate": est, "ci99": half,
                                     "ok": abs(est - analytic) <= half})
    return out


def verify_triangle(points: int = 500) -> dict:
    """Deviation utility on a points x points grid over [0, 1/2]^2 compared
    against the closed form -2(y-z)^2."""
    sm = cf.SingleMindedSymmetric(2, 2)
    axis = np.linspace(0.0, 0.5, points)
    net = cf.singleminded_utility_grid(sm, axis)
    closed = -2.0 * (axis[:, None] - axis[None, :]) ** 2
    return {"points": points,
            "max_formula_error": float(np.abs(net - closed).max()),
            "max_utility": float(net.max()),
            "max_abs_on_diagonal": float(np.abs(np.diagonal(net)).max())}


def verify_single_minded(k: int, d: int, points: int = 97) -> dict:
    """Sign and diagonal-equality structure of the symmetric single-minded
    deviation utility on a points^k grid."""
    sm = cf.SingleMindedSymmetric(k, d)
    axis = np.linspace(0.0, sm.top, points)
    util = cf.singleminded_utility_grid(sm, axis)
    diag = util[tuple(np.arange(points) for _ in range(k))]
    off = util.copy()
    off[tuple(np.arange(points) for _ in range(k))] = -np.inf
    return {"k": k, "d": d, "points": points,
            "max_utility": float(util.max()),
            "max_abs_on_diagonal": float(np.abs(diag).max()),
            "max_off_diagonal": float(off.max())}


# ---------------------------------------------------------------------------
# Inefficiency experiments

def poa_report(m: int, v: float, trials: int, seed: int) -> dict:
    """Welfare of the AND-OR closed-form equilibrium vs the optimum, with
    the construction-specific bounds evaluated alongside."""
    pair = cf.AndOrStrategyPair(m, v)
    est = cf.andor_equilibrium_welfare(pair, trials, seed)
    vals = andor_game(m, v)
    opt, _ = optimal_welfare(vals)
    support_witness = cf.and_support_sum_check(pair, vals[0].value(full_set(m)))
    welfare_bound_poa = 2.0 / math.sqrt(m)
    welfare_bound_pos = 3.0 * math.sqrt(math.log2(m) / m)
    return {"m": m, "v": v, "trials": trials, "seed": seed,
            "welfare": est.estimate, "ci99": est.ci99, "opt": opt,
            "poa_ratio": opt / est.estimate if est.estimate > 0 else math.inf,
            "and_zero_bid_freq": est.atom_freq, "and_zero_bid_prob": est.atom_prob,
            "welfare_bound_poa": welfare_bound_poa,
            "welfare_bound_pos": welfare_bound_pos,
            "support_check_ok": support_witness is None,
            "series": [_cdf_series("and_cdf", pair.F), _cdf_series("or_cdf", pair.G)]}


def _cdf_series(name: str, cdf: cf.AtomicCDF, points: int = 200) -> dict:
    xs = np.linspace(cdf.lo, cdf.hi, points)
    return {"name": name, "points": [[float(x), float(cdf.cdf(x))] for x in xs]}


def andor_welfare_sweep(ms, trials: int, seed: int) -> dict:
    """Equilibrium welfare of the bad construction (v = 1/sqrt(m)) across
    item counts, against the 2/sqrt(m) envelope."""
    rows, bound = [], []
    for m in ms:
        pair = cf.AndOrStrategyPair(m, 1.0 / math.sqrt(m))
        est = cf.andor_equilibrium_welfare(pair, trials, seed)
        rows.append([m, est.estimate])
        bound.append([m, 2.0 / math.sqrt(m)])
    return {"ms": list(ms), "trials": trials, "seed": seed,
            "series": [{"name": "welfare_vs_m", "points": rows},
                       {"name": "bound_2_over_sqrt_m", "points": bound}]}


def grid_game_report(side: int, trials: int, seed: int) -> dict:
    """Walrasian equilibrium of the side x side grid game plus Monte Carlo
    satisfied-player count under the symmetric mixed equilibrium."""
    vals, bundles = grid_game(side)
    m = side * side
    we = walrasian_search(vals, cap=11_000_000)
    opt, _ = optimal_welfare(vals, cap=11_000_000)
    sm = cf.SingleMindedSymmetric(side, 2, value=float(side))
    rng = rng_for(seed, "grid-game", side)
    draws = sm.cdf.sample(rng, (2 * side) * trials).reshape(trials, 2 * side)
    rows, cols = draws[:, :side], draws[:, side:]
    sat_rows = (rows > cols.max(axis=1, keepdims=True)).sum(axis=1)
    sat_cols = (cols > rows.max(axis=1, keepdims=True)).sum(axis=1)
    satisfied = sat_rows + sat_cols
    mean = float(satisfied.mean())
    ci = cf.Z99 * float(satisfied.std(ddof=1)) / math.sqrt(trials)
    welfare = side * mean
    return {"side": side, "m": m, "trials": trials, "seed": seed,
            "walrasian_exists": we is not None,
            "walrasian_prices": list(we.prices) if we else None,
            "opt": opt, "expected_satisfied": mean, "satisfied_ci99": ci,
            "mixed_welfare": welfare,
            "empirical_poa": opt / welfare if welfare > 0 else math.inf}


# ---------------------------------------------------------------------------
# Walrasian / pure Nash correspondence suite

_LATTICE = tuple(0.25 * k for k in range(9))  # {0, 0.25, ..., 2}


def _random_lattice_valuation(rng: np.random.Generator, m: int) -> Valuation:
    kind = rng.choice(["closure", "closure", "additive", "single_minded", "and", "or"])
    if kind == "additive":
        return AdditiveValuation(tuple(float(rng.choice(_LATTICE)) for _ in range(m)))
    if kind == "single_minded":
        bundle = int(rng.integers(1, 1 << m))
        return SingleMindedValuation(m, bundle, float(rng.choice(_LATTICE)))
    if kind == "and":
        return AndValuation(m, float(rng.choice(_LATTICE)))
    if kind == "or":
        items = int(rng.integers(1, 1 << m))
        return OrValuation(m, float(rng.choice(_LATTICE)), items)
    raw = rng.choice(_LATTICE, size=1 << m)
    raw[0] = 0.0
    table = np.zeros(1 << m)
    for s in range(1, 1 << m):
        best = raw[s]
        for j in members(s):
            best = max(best, table[s & ~(1 << j)])
        table[s] = best  # monotone closure keeps values on the lattice
    return TableValuation(m, tuple(float(x) for x in table))


def _grid_roundup(x: np.ndarray, step: float) -> np.ndarray:
    return step * np.ceil(np.asarray(x) / step - 1e-9)


def correspondence_case(vals: list[Valuation], grid_step: float = 0.05) -> dict:
    """One instance of the Walrasian <-> grid pure-Nash correspondence.

    If a Walrasian equilibrium exists, its prices rounded up to the grid
    with its allocation must be a common-price (2 m grid_step)-equilibrium
    (prices then agree within one grid step by construction). If none
    exists, the exhaustive common-price scan must find no exact grid
    equilibrium: the epsilon slack only absorbs discretization in the
    first direction, and at epsilon of even one grid step spurious
    equilibria appear in games with no Walrasian equilibrium.
    """
    m = vals[0].m
    grid = BidGrid(grid_step, 2.0)
    we = walrasian_search(vals)
    slack = 2.0 * m * grid_step
    if we is not None:
        prices = _grid_roundup(np.array(we.prices), grid_step)
        gap = common_price_gap(vals, prices, we.allocation, grid_step)
        found = gap <= slack + 1e-12
        near = found and walrasian_near(vals, we.allocation, prices, grid_step + 1e-9)
        return {"walrasian": True, "grid_equilibrium": found, "grid_gap": float(gap),
                "prices_agree": bool(near), "agree": bool(found and near)}
    scan = common_price_scan(vals, grid, eps=0.0, stop_at_first=True)
    return {"walrasian": False, "grid_equilibrium": bool(scan),
            "prices_agree": None, "agree": not scan}


def correspondence_suite(instances: int = 200, seed: int = 0,
                         grid_step: float = 0.05) -> dict:
    """Random small instances (n <= 3, m <= 3, lattice values): Walrasian
    existence must agree with grid pure-Nash existence on every one, and
    every found Walrasian equilibrium is welfare-optimal."""
    agree = 0
    details = []
    welfare_optimal = True
    for i in range(instances):
        rng = rng_for(seed, "correspondence", i)
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        vals = [_random_lattice_valuation(rng, m) for _ in range(n)]
        case = correspondence_case(vals, grid_step)
        we = walrasian_search(vals)
        if we is not None:
            opt, _ = optimal_welfare(vals)
            got = sum(v.value(we.allocation.bundle(j)) for j, v in enumerate(vals))
            if got != opt:
                welfare_optimal = False
        agree += case["agree"]
        details.append({"n": n, "m": m, **case})
    return {"instances": instances, "seed": seed, "grid_step": grid_step,
            "agreements": agree, "all_agree": agree == instances,
            "walrasian_welfare_optimal": welfare_optimal, "details": details}


# ---------------------------------------------------------------------------
# Dynamics experiments

def additive_dynamics_report(n: int, m: int, rounds: int, seed: int,
                             grid_step: float = 0.05) -> dict:
    """Multiplicative weights on a random additive-valuation game; regret
    envelope and the beta = 1 welfare bound with explicit slack."""
    rng = rng_for(seed, "dynamics-weights")
    weights = 0.05 * rng.integers(4, 21, size=(n, m))  # in [0.2, 1.0]
    vals = [AdditiveValuation(tuple(map(float, w))) for w in weights]
    spaces = [SeparableGrid([np.arange(0.0, wij + 1e-12, grid_step) for wij in w])
              for w in weights]
    game = FiniteGame(vals, spaces, grid_step=grid_step)
    trace = run_no_regret(game, rounds, seed)
    drift = verify_cce(trace)
    rep = ccqe_welfare_ratio(trace, beta=1.0)
    regret = [float(r) for r in trace.final_regret()]
    envelope = [float(e) for e in trace.regret_envelope()]
    return {"n": n, "m": m, "rounds": rounds, "seed": seed, "grid_step": grid_step,
            "weights": weights.tolist(), "regret": regret, "regret_envelope": envelope,
            "regret_within_envelope": all(r <= e for r, e in zip(regret, envelope)),
            "cce_recompute_drift": drift, "welfare": rep.to_json(),
            "series": [{"name": f"regret_p{i}",
                        "points": _thin([[t + 1, float(trace.regret[t, i])]
                                         for t in range(rounds)])}
                       for i in range(n)]}


def _thin(points: list, keep: int = 200) -> list:
    if len(points) <= keep:
        return points
    idx = np.linspace(0, len(points) - 1, keep).astype(int)
    return [points[i] for i in idx]


def andor_dynamics_report(m: int, v: float, rounds: int, seed: int,
                          levels: int = 41) -> dict:
    """Learning in the AND-OR game over the structured families (uniform
    bundle bids for AND, single-item bids for OR); reports KS distances of
    the empirical marginals against the closed-form CDFs."""
    pair = cf.AndOrStrategyPair(m, v)
    vals = andor_game(m, v)
    step = pair.top / (levels - 1)
    grid = BidGrid(step, pair.top)
    spaces = [ExplicitActions(grid.actions_for(m, full_set(m))),
              ExplicitActions(BidGrid(step, pair.top, "single_item").actions_for(m))]
    game = FiniteGame(vals, spaces, grid_step=step)
    trace = run_no_regret(game, rounds, seed)
    drift = verify_cce(trace)
    rep = ccqe_welfare_ratio(trace, beta=None)
    and_bids = trace.bids[:, 0, 0]
    or_bids = trace.bids[:, 1, :].max(axis=1)
    return {"m": m, "v": v, "rounds": rounds, "seed": seed,
            "ks_and_vs_F": ks_distance(and_bids, pair.F),
            "ks_or_vs_G": ks_distance(or_bids, pair.G),
            "regret": [float(r) for r in trace.final_regret()],
            "regret_envelope": [float(e) for e in trace.regret_envelope()],
            "cce_recompute_drift": drift,
            "welfare": rep.to_json(),
            "and_support_ok": cf.and_support_sum_check(
                trace.bids[:, 0, :], vals[0].value(full_set(m))) is None}


def single_item_dynamics_report(values: tuple, rounds: int, seed: int,
                                grid_step: float = 0.1) -> dict:
    """One-item sanity game: play concentrates near the Walrasian price."""
    vals = [AdditiveValuation((float(x),)) for x in values]
    grid = BidGrid(grid_step, float(max(values)))
    spaces = [ExplicitActions(grid.actions_for(1)) for _ in values]
    game = FiniteGame(vals, spaces, grid_step=grid_step)
    trace = run_no_regret(game, rounds, seed)
    tail = trace.bids[-max(1, rounds // 10):]
    rep = ccqe_welfare_ratio(trace, beta=1.0)
    return {"values": list(map(float, values)), "rounds": rounds, "seed": seed,
            "tail_mean_price": float(tail.max(axis=1).mean()),
            "welfare": rep.to_json(),
            "regret": [float(r) for r in trace.final_regret()],
            "regret_envelope": [float(e) for e in trace.regret_envelope()]}


# ---------------------------------------------------------------------------
# Bayesian experiments

def two_type_bne_game(grid_step: float = 0.05):
    """Product prior, two additive types per player, supports separated so
    the discretized game has a pure Bayesian Nash equilibrium."""
    grid = BidGrid(grid_step, 1.0)
    acts = grid.actions_for(1)
    types = [[AdditiveValuation((0.8,)), AdditiveValuation((1.0,))],
             [AdditiveValuation((0.2,)), AdditiveValuation((0.4,))]]
    bg = FiniteBayesianGame(types, np.full((2, 2), 0.25), [acts, acts])
    return bg, acts


def exact_two_type_bne(bg: FiniteBayesianGame, acts: np.ndarray):
    """Lexicographically first pure Bayesian Nash equilibrium, by exhaustive
    scan over per-type pure strategies (the harness only verifies; this is
    the deliberate reference construction for it)."""
    pts = acts[:, 0]
    k = pts.size
    v0 = np.array([v.value(1) for v in bg.type_vals[0]])
    v1 = np.array([v.value(1) for v in bg.type_vals[1]])
    win0 = pts[:, None] >= pts[None, :]  # player 0 wins ties
    win1 = pts[:, None] > pts[None, :]
    u0 = win0[None] * (v0[:, None, None] - pts[None, :, None])
    u1 = win1[None] * (v1[:, None, None] - pts[None, :, None])
    for low1 in range(k):
        for high1 in range(k):
            eu0 = 0.5 * (u0[:, :, low1] + u0[:, :, high1])
            best0 = eu0.max(axis=1)
            for low0 in np.flatnonzero(eu0[0] >= best0[0] - 1e-12):
                for high0 in np.flatnonzero(eu0[1] >= best0[1] - 1e-12):
                    eu1 = 0.5 * (u1[:, :, low0] + u1[:, :, high0])
                    if (eu1[0, low1] >= eu1[0].max() - 1e-12
                            and eu1[1, high1] >= eu1[1].max() - 1e-12):
                        s0 = np.zeros((2, k))
                        s1 = np.zeros((2, k))
                        s0[0, low0] = s0[1, high0] = 1.0
                        s1[0, low1] = s1[1, high1] = 1.0
                        return [s0, s1]
    return None


def bayes_report(grid_step: float = 0.05) -> dict:
    """Degenerate one-type reduction plus the two-type product-prior game
    with an exact pure Bayesian equilibrium."""
    # degenerate single-type prior: gaps equal the full-information ones
    grid = BidGrid(0.1, 1.0)
    acts = grid.actions_for(1)
    vals = [AdditiveValuation((1.0,)), AdditiveValuation((1.0,))]
    bg0 = FiniteBayesianGame([[vals[0]], [vals[1]]], np.array([[1.0]]), [acts, acts])
    zero = np.zeros((1, acts.shape[0]))
    zero[0, 0] = 1.0
    bayes_gaps = bayes_deviation_gap(bg0, [zero, zero])
    fs = FiniteSupportStrategy(((1.0, (0.0,)),))
    full_gaps = [best_response_gap(vals, [fs, fs], i, grid).gap for i in range(2)]
    degenerate = {"bayes_gaps": [float(g[0]) for g in bayes_gaps],
                  "full_information_gaps": [float(g) for g in full_gaps],
                  "exactly_equal": all(float(b[0]) == g
                                       for b, g in zip(bayes_gaps, full_gaps))}
    bg, acts2 = two_type_bne_game(grid_step)
    strategies = exact_two_type_bne(bg, acts2)
    if strategies is None:
        return {"degenerate": degenerate, "two_type": {"bne_found": False}}
    gaps = bayes_deviation_gap(bg, strategies)
    rep = bayes_welfare_bounds(bg, strategies, beta=1.0)
    bids = [[float(acts2[int(np.argmax(strategies[i][t])), 0]) for t in range(2)]
            for i in range(2)]
    return {"degenerate": degenerate,
            "two_type": {"bne_found": True, "grid_step": grid_step, "bids": bids,
                         "max_gap": float(max(g.max() for g in gaps)),
                         "welfare": rep.to_json()}}


# ---------------------------------------------------------------------------
# Sampling / verification front doors

def strategy_samples(name: str, m: int, v: float, k: int, d: int, count: int,
                     seed: int) -> dict:
    rng = rng_for(seed, "samples", name)
    if name == "andor":
        pair = cf.AndOrStrategyPair(m, v)
        y = pair.sample_and_bids(rng, count)
        items, x = pair.sample_or_bids(rng, count)
        return {"strategy": name, "m": m, "v": v, "count": count, "seed": seed,
                "and_bids": [float(t) for t in y],
                "or_items": [int(t) for t in items],
                "or_bids": [float(t) for t in x],
                "series": [_cdf_series("and_cdf", pair.F),
                           _cdf_series("or_cdf", pair.G)]}
    if name == "triangle":
        sm = cf.SingleMindedSymmetric(2, 2)
        draws = sm.cdf.sample(rng, count)
        return {"strategy": name, "count": count, "seed": seed,
                "bids": [float(t) for t in draws],
                "series": [_cdf_series("cdf", sm.cdf)]}
    if name == "single_minded":
        sm = cf.SingleMindedSymmetric(k, d)
        draws = sm.cdf.sample(rng, count)
        return {"strategy": name, "k": k, "d": d, "count": count, "seed": seed,
                "bids": [float(t) for t in draws],
                "series": [_cdf_series("cdf", sm.cdf)]}
    raise ValueError(f"unknown strategy {name!r}")


def verify_report(game: str, m: int, v: float, k: int, d: int, grid_step: float,
                  trials: int, seed: int) -> dict:
    """Equilibrium verification for a named closed-form strategy profile."""
    if game == "andor":
        return {"game": "andor", **verify_andor(m, v, grid_step, trials=trials,
                                                seed=seed)}
    if game == "triangle":
        tri = verify_triangle()
        sm = verify_single_minded(2, 2)
        return {"game": "triangle", **tri, "single_minded_form": sm}
    if game == "single_minded":
        return {"game": "single_minded", **verify_single_minded(k, d)}
    raise ValueError(f"no closed-form strategy for game {game!r}")


def emit_plot_data(report: dict) -> str:
    """Long-format CSV (series, x, y) of every series in a report payload."""
    lines = ["series,x,y"]
    for series in report.get("series", []):
        for x, y in series["points"]:
            lines.append(f"{series['name']},{x!r},{y!r}")
    return "\n".join(lines) + "\n"


def report_body(command: str, spec: dict, result: dict, seed=None) -> dict:
    """Self-describing deterministic payload; wall-clock is added by the CLI
    outside this body so identical runs stay byte-identical."""
    body = {"version": VERSION, "command": command, "spec": spec, "result": result}
    if seed is not None:
        body["seed"] = seed
    return body


def pyify(x):
    """Recursively replace numpy scalars/arrays with plain Python values."""
    if isinstance(x, dict):
        return {k: pyify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [pyify(v) for v in x]
    if isinstance(x, np.ndarray):
        return [pyify(v) for v in x.tolist()]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def dumps_canonical(payload: dict) -> str:
    return json.dumps(pyify(payload), sort_keys=True, indent=2, allow_nan=False)
