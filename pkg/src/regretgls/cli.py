"""Command-line interface.

Subcommands:

  gen      write random instances to a native instance file
  regret   compute oracle regret files for every instance in a file
  dataset  export a training dataset (line-graph features + targets)
  solve    solve one instance with a chosen guide and budget
  bench    run a solver over an instance set and emit report CSVs
  tsplib   convert between TSPLIB documents and native instance files

Every subcommand is reproducible from its flags and seeds alone.  On
failure the process prints a one-line diagnostic to stderr and exits
nonzero.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from . import bench as B
from . import data as D
from .gls import SolveParams, guided_local_search, save_trace
from .instance import (
    TsplibParseError,
    generate_random,
    load_instances,
    parse_tsplib,
    render_tsplib,
    save_instances,
)
from .regret import load_regret, regret_matrix, save_regret
from .tour import save_tour, tour_cost


def _cmd_gen(args) -> int:
    instances = [
        generate_random(args.n, args.seed + i) for i in range(args.count)
    ]
    save_instances(instances, args.out)
    print(f"wrote {len(instances)} instances to {args.out}")
    return 0


def _cmd_regret(args) -> int:
    instances = load_instances(args.instances)
    os.makedirs(args.out_dir, exist_ok=True)
    for inst in instances:
        rm = regret_matrix(inst)
        save_regret(rm, os.path.join(args.out_dir, f"{inst.name}.regret.csv"))
    print(f"wrote {len(instances)} regret files to {args.out_dir}")
    return 0


def _cmd_dataset(args) -> int:
    instances = load_instances(args.instances)
    channels = args.channels.split(",") if args.channels else None
    count = D.export_dataset(instances, args.out, channels)
    print(f"wrote {count} records to {args.out}")
    return 0


def _load_solve_instance(args):
    given = [args.n is not None, args.instances is not None, args.tsplib is not None]
    if sum(given) != 1:
        raise ValueError("pick exactly one input: --n/--seed, --instances/--index, or --tsplib")
    if args.n is not None:
        if args.seed is None:
            raise ValueError("--n needs --seed to define the instance")
        return generate_random(args.n, args.seed)
    if args.instances is not None:
        instances = load_instances(args.instances)
        if not (0 <= args.index < len(instances)):
            raise ValueError(
                f"--index {args.index} out of range; {args.instances} has {len(instances)} instances"
            )
        return instances[args.index]
    with open(args.tsplib, "r", encoding="utf-8") as f:
        return parse_tsplib(f.read())


def _cmd_solve(args) -> int:
    inst = _load_solve_instance(args)
    if args.guide == "weight":
        guide, kind = None, "weight"
    elif args.guide == "oracle":
        guide, kind = regret_matrix(inst), "regret"
    elif args.guide.startswith("regret:"):
        guide, kind = load_regret(args.guide.split(":", 1)[1], expect_n=inst.n), "regret"
    else:
        raise ValueError(
            f"--guide must be 'weight', 'oracle', or 'regret:<file>', got {args.guide!r}"
        )
    params = SolveParams(
        k_moves=args.k,
        lambda_alpha=args.alpha,
        time_budget_s=args.budget,
        guide=kind,
    )
    tour, trace = guided_local_search(inst, guide, params, start=args.start)
    cost = tour_cost(inst, tour)
    if args.out:
        save_tour(tour, cost, args.out)
    if args.trace:
        save_trace(trace, args.trace)
    print(f"{inst.name}: cost {cost!r} ({len(trace.samples)} trace samples)")
    return 0


def _cmd_bench(args) -> int:
    instances = load_instances(args.instances)
    config = B.SolverConfig(
        kind=args.solver,
        guide=args.guide,
        params=SolveParams(
            k_moves=args.k,
            lambda_alpha=args.alpha,
            time_budget_s=args.budget,
        ),
        safety_budget_s=args.safety_budget,
    )
    if args.references == "oracle":
        references = B.oracle_references(instances)
    else:
        references = B.best_known_references(instances)
    if args.mode == "fixed":
        report, traces = B.run_fixed_time(
            instances, config, args.budget, references, workers=args.workers
        )
    else:
        report = B.run_unfixed(instances, config, references, workers=args.workers)
        traces = {}
    B.save_report_csv(report, args.report)
    if args.summary:
        B.save_summary_csv(report, args.summary)
    if args.traces_dir and traces:
        os.makedirs(args.traces_dir, exist_ok=True)
        for name, trace in traces.items():
            save_trace(trace, os.path.join(args.traces_dir, f"{name}.trace.csv"))
    if args.profile:
        if not traces:
            raise ValueError("--profile requires --mode fixed (profiles come from traces)")
        grid = [float(tok) for tok in args.grid.split(",")]
        B.save_profile_csv(B.profile_table(traces, references, grid), args.profile)
    print(
        f"{len(report.rows)} instances: mean gap {report.mean_gap:.4f}%, "
        f"{report.pct_optimal:.1f}% optimal"
    )
    return 0


def _cmd_tsplib(args) -> int:
    if args.to_native:
        with open(args.input, "r", encoding="utf-8") as f:
            inst = parse_tsplib(f.read())
        save_instances([inst], args.out)
        print(f"converted {inst.name} (n={inst.n}) to {args.out}")
    else:
        instances = load_instances(args.input)
        if not (0 <= args.index < len(instances)):
            raise ValueError(
                f"--index {args.index} out of range; {args.input} has {len(instances)} instances"
            )
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(render_tsplib(instances[args.index]))
        print(f"rendered {instances[args.index].name} to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regretgls", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--n", type=int, required=True, help="nodes per instance (>= 3)")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0, help="seed of the first instance")
    g.add_argument("--out", required=True, help="native instance file to write")
    g.set_defaults(func=_cmd_gen)

    r = sub.add_parser("regret", help="compute oracle regret files")
    r.add_argument("--instances", required=True)
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=_cmd_regret)

    d = sub.add_parser("dataset", help="export a training dataset")
    d.add_argument("--instances", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--channels", default=None, help="comma-separated channel names (default: all)")
    d.set_defaults(func=_cmd_dataset)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--n", type=int, default=None, help="random instance size")
    s.add_argument("--seed", type=int, default=None, help="random instance seed")
    s.add_argument("--instances", default=None, help="native instance file")
    s.add_argument("--index", type=int, default=0, help="instance index within --instances")
    s.add_argument("--tsplib", default=None, help="TSPLIB document to solve")
    s.add_argument("--guide", default="weight", help="weight | oracle | regret:<file>")
    s.add_argument("--budget", type=float, default=10.0, help="seconds")
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("--k", type=int, default=20)
    s.add_argument("--start", type=int, default=0)
    s.add_argument("--out", default=None, help="tour file to write")
    s.add_argument("--trace", default=None, help="trace CSV to write")
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", help="benchmark a solver over an instance set")
    b.add_argument("--instances", required=True)
    b.add_argument("--solver", default="gls", choices=B.SOLVER_KINDS)
    b.add_argument("--guide", default="weight")
    b.add_argument("--mode", default="fixed", choices=("fixed", "unfixed"))
    b.add_argument("--budget", type=float, default=10.0)
    b.add_argument("--alpha", type=float, default=0.1)
    b.add_argument("--k", type=int, default=20)
    b.add_argument("--safety-budget", type=float, default=60.0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--references", default="oracle", choices=("oracle", "best-known"))
    b.add_argument("--report", required=True)
    b.add_argument("--summary", default=None)
    b.add_argument("--traces-dir", default=None)
    b.add_argument("--profile", default=None)
    b.add_argument("--grid", default="0.0,0.1,0.5,1.0,2.0,5.0,10.0")
    b.set_defaults(func=_cmd_bench)

    t = sub.add_parser("tsplib", help="convert TSPLIB <-> native instance files")
    t.add_argument("input")
    t.add_argument("--out", required=True)
    t.add_argument(
        "--to-native", action="store_true",
        help="input is a TSPLIB document; write a native file (default renders native -> TSPLIB)",
    )
    t.add_argument("--index", type=int, default=0, help="instance index when rendering")
    t.set_defaults(func=_cmd_tsplib)

    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TsplibParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
