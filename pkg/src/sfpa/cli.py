"""Batch command-line front end.

Subcommand style: verify | walrasian | pure-nash | poa | dynamics | bayes
| sample. Settings are layered config-file > flags > defaults. Reports are
deterministic given seed: the JSON body excludes wall-clock, so identical
specs reproduce byte-identical bodies.

Exit codes: 0 ok, 1 usage, 2 cap/precondition violation, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import experiments as xp
from .auction import CapExceeded, PriorityRule, rule_from_json
from .bayes import bayes_deviation_gap, bayes_welfare_bounds, bayesian_game_from_json
from .equilibrium import BidGrid, pure_nash_search, walrasian_search
from .valuations import Valuation

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage to 1
        raise UsageError(message)


def _add_common(p: _Parser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--tie-rule", default="index",
                   help="'index' or a JSON file with a tie rule object")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", default=None,
                   help="JSON settings file; overrides flags, which override defaults")


def build_parser() -> _Parser:
    top = _Parser(prog="sfpa", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="best-response gaps of a closed-form profile")
    p.add_argument("--game", required=True,
                   choices=("andor", "triangle", "single_minded"))
    p.add_argument("--strategy", default=None,
                   help="defaults to the game's closed form")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--trials", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("walrasian", help="search for a Walrasian equilibrium")
    p.add_argument("--game", required=True, help="builtin name or game JSON file")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--l", type=int, default=3, dest="side")
    p.add_argument("--cap", type=int, default=11_000_000)
    _add_common(p)

    p = sub.add_parser("pure-nash", help="grid search for epsilon-equilibria")
    p.add_argument("--game", required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--l", type=int, default=3, dest="side")
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--max", type=float, default=2.0, dest="upper")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--family", default="full",
                   choices=("full", "uniform_on_bundle", "single_item"))
    p.add_argument("--limit", type=int, default=50, help="max equilibria reported")
    _add_common(p)

    p = sub.add_parser("poa", help="closed-form equilibrium welfare vs optimum")
    p.add_argument("--game", default="andor", choices=("andor",))
    p.add_argument("--m", type=int, default=16)
    p.add_argument("--v", type=float, default=0.25)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--sweep", default=None,
                   help="comma-separated item counts; overrides --m/--v with "
                        "the v = 1/sqrt(m) welfare sweep")
    _add_common(p)

    p = sub.add_parser("dynamics", help="multiplicative-weights learning run")
    p.add_argument("--mode", default="additive",
                   choices=("additive", "andor", "single-item"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--values", default="1,2",
                   help="single-item mode: comma-separated player values")
    p.add_argument("--rounds", type=int, default=100_000)
    p.add_argument("--grid-step", type=float, default=0.05)
    _add_common(p)

    p = sub.add_parser("bayes", help="finite-type Bayesian verification")
    p.add_argument("--file", default=None,
                   help="JSON {types, prior, actions, strategies}; default builtin demo")
    p.add_argument("--grid-step", type=float, default=0.05)
    _add_common(p)

    p = sub.add_parser("sample", help="draw bids from a closed-form strategy")
    p.add_argument("--strategy", required=True,
                   choices=("andor", "triangle", "single_minded"))
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--count", type=int, default=1000)
    _add_common(p)
    return top


def _load_game(args) -> tuple[list[Valuation], PriorityRule, list | None]:
    rule = PriorityRule()
    if args.tie_rule != "index":
        with open(args.tie_rule) as fh:
            rule = rule_from_json(json.load(fh))
    name = args.game
    if name.endswith(".json"):
        with open(name) as fh:
            vals, file_rule = xp.game_from_json(json.load(fh))
        if args.tie_rule == "index":
            rule = file_rule
        return vals, rule, None
    vals, bundles = xp.build_game(name, m=args.m, v=args.v, k=args.k, d=args.d,
                                  side=getattr(args, "side", 3))
    return vals, rule, bundles


def _spec_echo(args) -> dict:
    skip = {"out", "format", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _run_command(args) -> dict:
    cmd = args.command
    if cmd == "verify":
        return xp.verify_report(args.game, args.m, args.v, args.k, args.d,
                                args.grid_step, args.trials, args.seed)
    if cmd == "walrasian":
        vals, _, _ = _load_game(args)
        we = walrasian_search(vals, cap=args.cap, tol=args.tolerance)
        out = {"exists": we is not None}
        if we is not None:
            out.update(we.to_json(len(vals)))
        return out
    if cmd == "pure-nash":
        vals, rule, bundles = _load_game(args)
        grid = BidGrid(args.grid_step, args.upper, args.family)
        eqs = pure_nash_search(vals, grid, rule, args.epsilon, bundles=bundles)
        return {"count": len(eqs),
                "equilibria": [{"bids": [list(r) for r in e.bids], "gap": e.gap}
                               for e in eqs[:args.limit]]}
    if cmd == "poa":
        if args.sweep:
            ms = tuple(int(x) for x in args.sweep.split(","))
            return xp.andor_welfare_sweep(ms, args.trials, args.seed)
        return xp.poa_report(args.m, args.v, args.trials, args.seed)
    if cmd == "dynamics":
        if args.mode == "additive":
            return xp.additive_dynamics_report(args.n, args.m, args.rounds,
                                               args.seed, args.grid_step)
        if args.mode == "andor":
            return xp.andor_dynamics_report(args.m, args.v, args.rounds, args.seed)
        values = tuple(float(x) for x in args.values.split(","))
        return xp.single_item_dynamics_report(values, args.rounds, args.seed,
                                              args.grid_step)
    if cmd == "bayes":
        if args.file is None:
            return xp.bayes_report(args.grid_step)
        with open(args.file) as fh:
            bg, strategies = bayesian_game_from_json(json.load(fh))
        gaps = bayes_deviation_gap(bg, strategies)
        rep = bayes_welfare_bounds(bg, strategies)
        return {"gaps": [[float(g) for g in gs] for gs in gaps],
                "welfare": rep.to_json()}
    if cmd == "sample":
        return xp.strategy_samples(args.strategy, args.m, args.v, args.k, args.d,
                                   args.count, args.seed)
    raise UsageError(f"unknown command {cmd!r}")


def _emit(args, body: dict, wall_clock: float) -> str:
    if args.format == "csv":
        return xp.emit_plot_data(body["result"])
    payload = dict(body)
    payload["wall_clock_s"] = wall_clock
    return xp.dumps_canonical(payload) + "\n"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        if args.config:
            with open(args.config) as fh:
                for key, value in json.load(fh).items():
                    setattr(args, key.replace("-", "_"), value)
        started = time.perf_counter()
        result = _run_command(args)
        body = xp.report_body(args.command, _spec_echo(args), result,
                              seed=getattr(args, "seed", None))
        text = _emit(args, body, time.perf_counter() - started)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except UsageError as exc:
        _fail("usage", exc)
        return EXIT_USAGE
    except (CapExceeded, ValueError, FileNotFoundError) as exc:
        _fail("precondition", exc)
        return EXIT_CAP
    except Exception as exc:  # noqa: BLE001 - surfaced as a machine-readable object
        _fail("internal", exc)
        return EXIT_INTERNAL


def _fail(kind: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps(
        {"error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}},
        sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
