"""Command line interface: generate scenarios, solve instances, run sweeps.

Units everywhere: distances in meters, demands in GFLOPS, rates and
capacities in GFLOPS/s, latency bounds in milliseconds.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .config import ConfigError, default_model, default_services, load_instance, save_instance
from .heuristics import b_first, fixed_service, fixed_split
from .ilp import build_ilp, emit_lp_text
from .model import Instance, validate_instance
from .rates import RateTable, Solution
from .scenario import ScenarioConfig, build_instance, run_sweep, export_csv
from .solver import BruteForceCapError, SearchBudget, brute_force, solve_optimal

_SOLVE_METHODS = ("optimal", "brute", "b_first", "fixed_split", "fixed_service")


def _canon_method(token: str) -> str:
    name = token.strip().lower().replace("-", "_")
    return "b_first" if name == "bfirst" else name


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vnfplan",
        description="Plan processing-chain deployments over a central cloud "
                    "plus edge clouds, minimizing total allocated rate "
                    "(GFLOPS/s) under per-function latency bounds (ms) and "
                    "cloud capacities. Distances are meters.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a scenario instance file")
    gen.add_argument("--out", required=True, help="output YAML path")
    gen.add_argument("--rings", type=int, default=1,
                     help="hexagonal rings of macro sites (default 1)")
    gen.add_argument("--isd", type=float, default=500.0,
                     help="inter-site distance in meters (default 500)")
    gen.add_argument("--central-dist", type=float, default=30000.0,
                     help="central cloud distance in meters (default 30000)")
    gen.add_argument("--mix", type=int, default=7,
                     help="number of chains in the service mix (default 7)")
    gen.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    gen.add_argument("--edge-capacity", type=float, default=4480.0,
                     help="edge cloud capacity in GFLOPS/s (default 4480)")
    gen.add_argument("--central-capacity", type=float, default=8960.0,
                     help="central cloud capacity in GFLOPS/s (default 8960)")
    gen.add_argument("--mix-profile", default="standard",
                     help="'standard' for the balanced mix, or a service name "
                          "to make every chain that service (default standard)")
    gen.add_argument("--edge-sites", choices=("all", "center"), default="all",
                     help="put an edge cloud on every site or only the "
                          "central one (default all)")

    solve = sub.add_parser("solve", help="place the chains of one instance")
    solve.add_argument("instance", help="instance YAML file")
    solve.add_argument("--method", default="optimal",
                       help="optimal | brute | b-first | fixed-split | "
                            "fixed-service (default optimal)")
    solve.add_argument("--time-limit", type=float, default=600.0,
                       help="search time limit in seconds (default 600)")
    solve.add_argument("--max-nodes", type=int, default=10_000_000,
                       help="search node limit (default 10000000)")
    solve.add_argument("--emit-lp", metavar="PATH",
                       help="also write the placement model in LP format")

    sweep = sub.add_parser("sweep", help="run a method/axis sweep to CSV")
    sweep.add_argument("--methods", required=True,
                       help="comma separated: optimal, brute, b-first, "
                            "fixed-split, fixed-service, cran-only")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--axis-s", help="comma separated chain counts")
    sweep.add_argument("--axis-d0", help="comma separated central distances (m)")
    sweep.add_argument("--axis-ce", help="comma separated edge capacities")
    sweep.add_argument("--reps", type=int, default=10,
                       help="repetitions per point (default 10)")
    sweep.add_argument("--seed", type=int, default=0, help="base RNG seed")
    sweep.add_argument("--rings", type=int, default=1)
    sweep.add_argument("--isd", type=float, default=500.0)
    sweep.add_argument("--central-capacity", type=float, default=8960.0)
    sweep.add_argument("--edge-capacity", type=float, default=4480.0)
    sweep.add_argument("--mix-profile", default="standard")
    sweep.add_argument("--edge-sites", choices=("all", "center"), default="all")
    sweep.add_argument("--time-limit", type=float, default=600.0,
                       help="per-solve time limit in seconds (default 600)")
    sweep.add_argument("--measure-runtime", action="store_true",
                       help="record wall-clock runtimes instead of 0.0 "
                            "(makes the CSV non-reproducible)")
    sweep.add_argument("--jobs", type=int, default=1,
                       help="parallel worker processes (default 1)")
    return parser


def _cmd_gen(args) -> int:
    cfg = ScenarioConfig(rings=args.rings, isd=args.isd,
                         central_dist=(args.central_dist,),
                         central_capacity=args.central_capacity,
                         edge_capacity=args.edge_capacity,
                         mix_size=args.mix, seed=args.seed,
                         mix_profile=args.mix_profile,
                         edge_sites=args.edge_sites)
    try:
        inst = build_instance(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return 2
    save_instance(args.out, inst, model=default_model(),
                  services=default_services())
    print(f"wrote {args.out}: {len(inst.chains)} chains, "
          f"{len(inst.infra.clouds)} clouds")
    return 0


def _print_solution(inst: Instance, sol: Solution) -> None:
    print(f"objective: {sol.objective!r}")
    for k in inst.infra.cloud_ids():
        print(f"load cloud {k}: {sol.loads.get(k, 0.0)!r}")
    for chain in inst.chains:
        if (chain.id, 1) not in sol.assignment.x:
            continue
        clouds = " ".join(str(sol.assignment.cloud_of(chain.id, n))
                          for n in range(1, len(chain) + 1))
        print(f"chain {chain.id}: {clouds}")


def _cmd_solve(args) -> int:
    try:
        inst = load_instance(args.instance)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    method = _canon_method(args.method)
    if method not in _SOLVE_METHODS:
        print(f"error: unknown method {args.method!r}", file=sys.stderr)
        return 2
    table = RateTable(inst)
    if args.emit_lp:
        with open(args.emit_lp, "w", encoding="utf-8") as fh:
            fh.write(emit_lp_text(build_ilp(inst, table)))
        print(f"wrote LP model to {args.emit_lp}")

    if method == "optimal":
        budget = SearchBudget(max_nodes=args.max_nodes,
                              time_limit=args.time_limit)
        res = solve_optimal(inst, budget=budget, table=table)
        print(f"status: {res.status}")
        if res.solution is not None:
            print(f"accepted: {len(inst.chains)}/{len(inst.chains)}")
            _print_solution(inst, res.solution)
        if res.status in ("optimal", "feasible-incumbent"):
            return 0
        if res.status == "infeasible":
            print(f"infeasible: {res.infeasible_reason}")
            return 3
        return 4
    if method == "brute":
        try:
            res = brute_force(inst, table=table)
        except BruteForceCapError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"status: {res.status}")
        if res.solution is not None:
            print(f"accepted: {len(inst.chains)}/{len(inst.chains)}")
            _print_solution(inst, res.solution)
            return 0
        print(f"infeasible: {res.infeasible_reason}")
        return 3
    if method == "b_first":
        hres = b_first(inst, table=table)
        for event in hres.events:
            print(event.as_line())
        accepted = len(hres.accepted_ids)
        print(f"status: {'feasible' if accepted == len(inst.chains) else 'partial'}")
        print(f"accepted: {accepted}/{len(inst.chains)}")
        print(f"evaluations: {hres.evaluations}")
        _print_solution(inst, hres.solution)
        return 0 if accepted == len(inst.chains) else 3
    sol = fixed_split(inst) if method == "fixed_split" else fixed_service(inst)
    print(f"status: {'feasible' if sol.feasible else 'infeasible'}")
    print(f"accepted: {len(inst.chains) if sol.feasible else 0}/{len(inst.chains)}")
    _print_solution(inst, sol)
    if not sol.feasible:
        for v in sol.violations:
            print(f"violation: {v}")
        return 3
    return 0


def _parse_axis(text: Optional[str], cast) -> Optional[list]:
    if text is None:
        return None
    values = [cast(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise ValueError("empty axis")
    return values


def _cmd_sweep(args, parser: argparse.ArgumentParser) -> int:
    methods = [tok for tok in args.methods.split(",") if tok.strip()]
    if not methods:
        parser.error("--methods must name at least one method")
    cfg = ScenarioConfig(rings=args.rings, isd=args.isd,
                         central_capacity=args.central_capacity,
                         edge_capacity=args.edge_capacity,
                         seed=args.seed, mix_profile=args.mix_profile,
                         edge_sites=args.edge_sites)
    axes = {}
    try:
        s_axis = _parse_axis(args.axis_s, int)
        d_axis = _parse_axis(args.axis_d0, float)
        c_axis = _parse_axis(args.axis_ce, float)
    except ValueError as exc:
        parser.error(str(exc))
    if s_axis:
        axes["S"] = s_axis
    if d_axis:
        axes["d0"] = d_axis
    if c_axis:
        axes["Ce"] = c_axis
    budget = SearchBudget(time_limit=args.time_limit)
    try:
        records = run_sweep(cfg, methods, axes=axes, reps=args.reps,
                            budget=budget,
                            measure_runtime=args.measure_runtime,
                            jobs=args.jobs)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    export_csv(records, args.out)
    print(f"wrote {args.out}: {len(records)} records")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen":
        return _cmd_gen(args)
    if args.command == "solve":
        return _cmd_solve(args)
    return _cmd_sweep(args, parser)


if __name__ == "__main__":
    sys.exit(main())
