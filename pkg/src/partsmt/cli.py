"""Command-line interface.

    partsmt partition [options] FILE
    partsmt run [options] FILE_OR_DIR

Exit codes: 0 success, 1 input could not be parsed, 2 no partitions could
be made (``partition`` only), 64 invalid command-line usage.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import portfolio as pf
from .frontend import SMTLibError, parse_file, write_partitions
from .harness import (EmbeddedExecutor, ExternalExecutor, HarnessError, IntegrityError,
                      par2_score, run_plan, write_results_csv)
from .partitioner import (CHECK, CL, CUBE, DECISION, HEAP, RAND, SCATTER, SPEC, TIME,
                          StrategyConfig, partition)
from .solver import PARTITIONED, SAT, UNSAT

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NO_PARTITIONS = 2
EXIT_USAGE = 64

PLANS = ("single", "portfolio", "graduated", "hybrid", "multijob", "scramble")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pow2(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 2 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"partition count must be a power of two >= 2, got {n}")
    return n


def _strategy_flags(p):
    g = p.add_argument_group("strategy")
    g.add_argument("--strategy", default="decision-cube", choices=pf.FAMILIES,
                   help="strategy family (default: decision-cube)")
    g.add_argument("-n", type=_pow2, default=None,
                   help="partition count, a power of two (default 4; plan budget for run)")
    g.add_argument("--source", choices=(HEAP, DECISION, CL), type=str.upper,
                   help="atom source; overrides the family")
    g.add_argument("--heur", choices=(RAND, SPEC), type=str.upper, default=SPEC,
                   help="atom selection heuristic (default: SPEC)")
    g.add_argument("--ptype", choices=(CUBE, SCATTER), type=str.upper,
                   help="partition type; overrides the family")
    g.add_argument("--theur", choices=("time", "check"), default="time",
                   help="timing heuristic (default: time)")
    g.add_argument("--t1", type=float, default=None,
                   help="wait before the first partition: seconds for time, calls for check "
                        "(default 3 / 1)")
    g.add_argument("--t2", type=float, default=None,
                   help="wait between partitions (default 0.1 / 1)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--timeout", type=float, default=60.0,
                   help="seconds per run, including partitioning (default: 60)")


def _family(args) -> str:
    source, ptype = args.strategy.upper().split("-")
    source = args.source or source
    ptype = args.ptype or ptype
    return f"{source}-{ptype}".lower()


def _timing(args) -> dict:
    check = args.theur == "check"
    return {"timing": CHECK if check else TIME,
            "t1": args.t1 if args.t1 is not None else (1 if check else 3.0),
            "t2": args.t2 if args.t2 is not None else (1 if check else 0.1),
            "seed": args.seed}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="partsmt", description="Partitioning toolkit for QF_UF / QF_IDL SMT problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("partition", help="partition one problem into subproblem files")
    p.add_argument("file")
    _strategy_flags(p)
    p.add_argument("--out", default=None,
                   help="output directory (default: next to the input file)")

    r = sub.add_parser("run", help="run a plan on a file or a directory of .smt2 files")
    r.add_argument("input")
    _strategy_flags(r)
    r.add_argument("--plan", choices=PLANS, default="single")
    r.add_argument("--families", default=None,
                   help="comma-separated ranked families for portfolio plans")
    r.add_argument("--cores", type=int, default=1)
    r.add_argument("--solver", default=None, help="external solver binary (default: embedded)")
    r.add_argument("--memory-mb", type=int, default=None,
                   help="address-space limit for external solver runs")
    r.add_argument("--out", default=None, help="directory for results.csv, plan.json, partitions")
    return parser


# ---------------------------------------------------------------- commands

def cmd_partition(args) -> int:
    try:
        script = parse_file(args.file)
    except (OSError, SMTLibError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    source, ptype = _family(args).upper().split("-")
    cfg = StrategyConfig(args.n or 4, source=source, heur=args.heur, ptype=ptype, **_timing(args))
    res = partition(script, cfg, budget=args.timeout)
    if res.status in (SAT, UNSAT):
        print(res.status)
        return EXIT_OK
    if res.status != PARTITIONED or not res.partitions:
        print("no partitions could be made", file=sys.stderr)
        return EXIT_NO_PARTITIONS
    out = Path(args.out) if args.out else Path(args.file).parent
    paths = write_partitions(script, res.partitions, out / Path(args.file).stem)
    note = f" (requested {cfg.n})" if len(paths) < cfg.n else ""
    print(f"partitions: {len(paths)}{note}")
    print(f"partition-time: {res.elapsed:.3f}")
    if res.residual:
        print(f"residual: {res.residual}")
    for p in paths:
        print(p)
    return EXIT_OK


def build_plan(args) -> pf.PortfolioPlan:
    families = tuple(args.families.split(",")) if args.families else None
    kind = args.plan
    if kind == "single":
        return pf.single_plan(pf.StrategyId(_family(args), args.n or 4, args.heur))
    if kind == "graduated":
        return pf.graduated_plan(args.n or args.cores, families or pf.DEFAULT_RANK)
    if kind == "portfolio":
        return pf.portfolio_plan(args.n or args.cores, families or ("decision-cube", "cl-cube"))
    if kind == "hybrid":
        return pf.hybrid_plan(args.cores, families or pf.RECOMMENDED)
    if kind == "scramble":
        return pf.scramble_plan(args.cores)
    return pf.multijob_plan(families or pf.RECOMMENDED)


def _corpus(path: Path) -> list[Path]:
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix == ".smt2")
    return [path]


def cmd_run(args) -> int:
    if args.cores < 1:
        raise UsageError("--cores must be at least 1")
    try:
        plan = build_plan(args)
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        executor = ExternalExecutor(args.solver, args.memory_mb) if args.solver \
            else EmbeddedExecutor(args.seed)
    except HarnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    files = _corpus(Path(args.input))
    if not files:
        raise UsageError(f"no .smt2 files in {args.input}")
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / "plan.json").write_text(pf.plan_to_json(plan))
    records, summary, status = [], [], EXIT_OK
    for f in files:
        try:
            script = parse_file(f)
        except (OSError, SMTLibError) as exc:
            print(f"{f.name}: error: {exc}", file=sys.stderr)
            status = EXIT_PARSE
            continue
        try:
            res = run_plan(plan, script, benchmark=f.name, timeout=args.timeout,
                           executor=executor, cores=args.cores,
                           scratch=out / "work" if out else None,
                           strategy_overrides=_timing(args))
        except IntegrityError as exc:
            print(f"{f.name}: integrity error: {exc}", file=sys.stderr)
            raise
        records += res.records
        summary.append((res.verdict, res.time))
        ineligible = [j.job for j in res.jobs if not j.eligible]
        line = f"{f.name}: {res.verdict} {res.time:.3f}s"
        if ineligible:
            line += f" (no partitions: {', '.join(ineligible)})"
        print(line)
        if res.schedule is not None:
            s = res.schedule
            print(f"  schedule: {args.cores} cores, makespan {s.makespan:.3f}s, "
                  f"{sum(len(c) for c in s.tasks)} tasks, {len(s.dropped)} dropped")
            for t in s.dropped:
                job, idx = t.ident
                print(f"  dropped: {res.jobs[job].job} partition {idx} ({t.duration:.3f}s)")
    text = write_results_csv(records, out / "results.csv" if out else None)
    if not out:
        sys.stdout.write(text)
    print(f"PAR-2: {par2_score(summary, args.timeout):.3f} over {len(summary)} benchmarks")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "partition":
            return cmd_partition(args)
        return cmd_run(args)
    except UsageError as exc:
        print(f"partsmt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
