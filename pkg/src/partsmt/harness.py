"""Running plans: partition, solve subproblems, aggregate, score.

Timing follows the simulated-parallel model: every partition (or scramble)
is assumed to run on its own core, so a partitioning job finishes at its
partitioning time plus the slowest partition (unsat) or the fastest
satisfiable partition (sat).  A portfolio finishes with its earliest
decisive job.  Multijob plans instead list-schedule all partitions onto a
fixed number of cores under a per-core time budget.
"""
from __future__ import annotations

import csv
import io
import os
import shutil
import subprocess
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .frontend import parse_file, scramble, subproblem_path, write_partitions
from .partitioner import partition as run_partitioner
from .portfolio import PARTITION, SCRAMBLE, PortfolioPlan
from .smtlib import print_script
from .solver import PARTITIONED, SAT, UNKNOWN, UNSAT, solve

TIMEOUT = "timeout"
ERROR = "error"
VERDICTS = (SAT, UNSAT, TIMEOUT, ERROR)
SCRATCH_ENV = "PARTSMT_SCRATCH"
CSV_COLUMNS = ("benchmark", "job", "partition", "verdict", "wallTime", "partitionTime")


class HarnessError(RuntimeError):
    pass


class IntegrityError(HarnessError):
    """Decisive results disagree: some solver or partitioner is unsound."""


@dataclass
class RunRecord:
    benchmark: str
    job: str
    partition: int | None  # partition index, scramble seed, or 0 for the partitioning run
    verdict: str
    wall_time: float
    partition_time: float = 0.0
    diagnostic: str = ""


@dataclass
class JobResult:
    benchmark: str
    job: str
    verdict: str
    time: float
    partition_time: float = 0.0
    partitions: int = 0
    eligible: bool = True  # False when the partitioning solver produced no partitions
    residual: str | None = None
    records: list = field(default_factory=list)
    order: tuple = ()


@dataclass
class PlanResult:
    benchmark: str
    verdict: str
    time: float
    jobs: list
    records: list
    schedule: "CoreSchedule | None" = None


# -------------------------------------------------------------- executors

def run_embedded(path: str, timeout: float, seed: int = 0):
    """Solve an .smt2 file in this process: (verdict, seconds, diagnostic)."""
    start = time.monotonic()
    try:
        res = solve(parse_file(path), budget=max(timeout, 0.0), seed=seed)
    except Exception as exc:  # reported per run, never fatal
        return ERROR, time.monotonic() - start, f"{type(exc).__name__}: {exc}"
    wall = time.monotonic() - start
    if res.status in (SAT, UNSAT):
        return res.status, wall, ""
    return TIMEOUT, wall, ""


def run_external(binary: str, path: str, timeout: float, memory_mb: int | None = None):
    """``binary path`` with a timeout; the first stdout line is the verdict."""
    preexec = None
    if memory_mb:
        def preexec():
            import resource
            limit = memory_mb * 1024 * 1024
            resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    start = time.monotonic()
    try:
        proc = subprocess.run([binary, path], capture_output=True, text=True,
                              timeout=max(timeout, 0.0), preexec_fn=preexec)
    except subprocess.TimeoutExpired:
        return TIMEOUT, time.monotonic() - start, ""
    except OSError as exc:
        return ERROR, time.monotonic() - start, str(exc)
    wall = time.monotonic() - start
    if proc.returncode != 0:
        return ERROR, wall, f"exit {proc.returncode}: {proc.stderr.strip()[:200]}"
    first = proc.stdout.strip().splitlines()[0].strip() if proc.stdout.strip() else ""
    if first in (SAT, UNSAT):
        return first, wall, ""
    if first == UNKNOWN:
        return TIMEOUT, wall, "unknown"
    return ERROR, wall, f"unexpected output {first!r}"


class EmbeddedExecutor:
    name = "embedded"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def call(self, path, timeout):
        return run_embedded, (str(path), timeout, self.seed)


class ExternalExecutor:
    name = "external"

    def __init__(self, binary: str, memory_mb: int | None = None):
        resolved = shutil.which(binary)
        if resolved is None:
            raise HarnessError(f"solver binary not found or not executable: {binary}")
        self.binary = resolved
        self.memory_mb = memory_mb

    def call(self, path, timeout):
        return run_external, (self.binary, str(path), timeout, self.memory_mb)


def _execute(calls, cores: int):
    """Run (fn, args) pairs on up to ``cores`` worker processes."""
    if cores <= 1 or len(calls) <= 1:
        return [fn(*args) for fn, args in calls]
    with ProcessPoolExecutor(max_workers=min(cores, len(calls))) as pool:
        futures = [pool.submit(fn, *args) for fn, args in calls]
        out = []
        for f in futures:
            try:
                out.append(f.result())
            except Exception as exc:  # worker died
                out.append((ERROR, 0.0, f"worker failure: {exc}"))
        return out


# ------------------------------------------------------------ aggregation

def aggregate_job(records, partition_time: float, timeout: float | None = None):
    """Verdict and time of one partitioning job from its partition runs.

    Any sat partition makes the job sat at its fastest sat partition; all
    unsat makes it unsat at its slowest; otherwise it timed out.  Mixed sat
    and unsat partitions are normal (different regions of the space)."""
    records = list(records)
    sat = [r.wall_time for r in records if r.verdict == SAT]
    if sat:
        verdict, total = SAT, partition_time + min(sat)
    elif records and all(r.verdict == UNSAT for r in records):
        verdict, total = UNSAT, partition_time + max(r.wall_time for r in records)
    else:
        return TIMEOUT, timeout
    if timeout is not None and total > timeout:
        return TIMEOUT, timeout
    return verdict, total


def aggregate_portfolio(results, timeout: float | None = None):
    """Earliest decisive (verdict, time) among jobs; raises IntegrityError
    when decisive verdicts disagree."""
    results = list(results)
    if not results:
        raise ValueError("a portfolio needs at least one job")
    decisive = [(t, v) for v, t in results if v in (SAT, UNSAT)]
    if len({v for _, v in decisive}) > 1:
        detail = ", ".join(f"{v}@{t:.3f}" for t, v in decisive)
        raise IntegrityError(f"conflicting verdicts in one portfolio: {detail}")
    if not decisive:
        return TIMEOUT, timeout
    t, v = min(decisive)
    return v, t


def par2_score(results, timeout: float) -> float:
    """Sum of solved times plus twice the timeout per unsolved result."""
    score = 0.0
    for verdict, t in results:
        if verdict in (SAT, UNSAT) and t is not None and t <= timeout:
            score += t
        else:
            score += 2 * timeout
    return score


# ------------------------------------------------------------- scheduling

@dataclass(frozen=True)
class Task:
    key: tuple
    duration: float
    ident: object = None


@dataclass
class CoreSchedule:
    cores: int
    budget: float
    tasks: list  # per core: list of (task, start, end)
    loads: list
    dropped: list

    @property
    def makespan(self) -> float:
        return max(self.loads, default=0.0)

    def end_times(self) -> dict:
        return {task.ident: end for core in self.tasks for task, _, end in core}


def multijob_schedule(tasks, cores: int, budget: float = float("inf")) -> CoreSchedule:
    """List scheduling in key order onto the least-loaded core.  A task that
    would take its core past ``budget`` is dropped; since the chosen core is
    the least loaded one, no other core could take it either."""
    if cores < 1:
        raise ValueError("core count must be at least 1")
    loads = [0.0] * cores
    placed: list = [[] for _ in range(cores)]
    dropped = []
    for task in sorted(tasks, key=lambda t: t.key):
        c = min(range(cores), key=lambda i: (loads[i], i))
        end = loads[c] + task.duration
        if end > budget:
            dropped.append(task)
            continue
        placed[c].append((task, loads[c], end))
        loads[c] = end
    return CoreSchedule(cores, budget, placed, loads, dropped)


def simulate_multijob(jobs, cores: int, timeout: float):
    """Finish time of each partitioning job when its partitions share
    ``cores`` under a per-core budget of ``timeout``.

    Returns (portfolio verdict, time, schedule)."""
    tasks = []
    for j, job in enumerate(jobs):
        for r in job.records:
            if job.partitions and r.partition:
                d = r.wall_time if r.verdict in (SAT, UNSAT) else timeout
                tasks.append(Task(job.order + (r.partition,), d, (j, r.partition)))
    sched = multijob_schedule(tasks, cores, timeout)
    ends = sched.end_times()
    results = []
    for j, job in enumerate(jobs):
        if not job.partitions:
            results.append((job.verdict, job.time))
            continue
        runs = [(r, ends.get((j, r.partition))) for r in job.records if r.partition]
        sat = [e for r, e in runs if e is not None and r.verdict == SAT]
        if sat:
            results.append((SAT, job.partition_time + min(sat)))
        elif runs and all(e is not None and r.verdict == UNSAT for r, e in runs):
            results.append((UNSAT, job.partition_time + max(e for _, e in runs)))
        else:
            results.append((TIMEOUT, timeout))
    results = [(v, t) if v != TIMEOUT and t <= timeout else (TIMEOUT, timeout)
               for v, t in results]
    verdict, t = aggregate_portfolio(results, timeout)
    return verdict, t, sched


# ---------------------------------------------------------------- running

def scratch_dir(scratch=None, benchmark: str = "benchmark") -> Path:
    """An explicit ``scratch`` directory is used as given (files are kept
    there); otherwise a fresh directory under $PARTSMT_SCRATCH or the
    system temp directory."""
    if scratch is not None:
        path = Path(scratch) / (Path(benchmark).stem or "benchmark")
        path.mkdir(parents=True, exist_ok=True)
        return path
    root = os.environ.get(SCRATCH_ENV)
    if root:
        Path(root).mkdir(parents=True, exist_ok=True)
    return Path(tempfile.mkdtemp(prefix="partsmt-", dir=root or None))


def run_plan(plan: PortfolioPlan, script, benchmark: str = "benchmark", timeout: float = 60.0,
             executor=None, cores: int = 1, scratch=None, strategy_overrides=None,
             keep_files: bool = False) -> PlanResult:
    """Run every job of ``plan`` on ``script`` and aggregate."""
    executor = executor or EmbeddedExecutor()
    overrides = dict(strategy_overrides or {})
    workdir = scratch_dir(scratch, benchmark)
    try:
        jobs, pending = [], []
        for job in plan.jobs:
            jr = JobResult(benchmark, job.name, TIMEOUT, timeout, order=job.order)
            jobs.append(jr)
            base = workdir / job.name / (Path(benchmark).stem or "benchmark")
            if job.kind == PARTITION:
                cfg = job.strategy.config(**overrides)
                res = run_partitioner(script, cfg, budget=timeout)
                jr.partition_time = res.elapsed
                if res.status != PARTITIONED:
                    verdict = res.status if res.status in (SAT, UNSAT) else TIMEOUT
                    jr.verdict, jr.time, jr.eligible = verdict, res.elapsed, False
                    if verdict == TIMEOUT:
                        jr.time = timeout
                    jr.records.append(RunRecord(benchmark, job.name, 0, verdict, res.elapsed,
                                                res.elapsed))
                    continue
                jr.partitions = len(res.partitions)
                jr.residual = res.residual
                paths = write_partitions(script, res.partitions, base)
                remaining = timeout - res.elapsed
                for p, path in zip(res.partitions, paths):
                    pending.append((jr, p.index, executor.call(path, remaining)))
            else:
                target = scramble(script, job.seed) if job.kind == SCRAMBLE else script
                path = base.with_name(base.name + ".smt2")
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(print_script(target))
                pending.append((jr, job.seed if job.kind == SCRAMBLE else None,
                                executor.call(path, timeout)))
        outcomes = _execute([call for _, _, call in pending], cores)
        for (jr, idx, _), (verdict, wall, diag) in zip(pending, outcomes):
            jr.records.append(RunRecord(benchmark, jr.job, idx, verdict, wall,
                                        jr.partition_time, diag))
        for jr in jobs:
            if jr.partitions:
                jr.verdict, jr.time = aggregate_job(jr.records, jr.partition_time, timeout)
            elif jr.eligible:  # scramble or sequential run
                r = jr.records[0]
                jr.verdict = r.verdict if r.verdict in (SAT, UNSAT) else TIMEOUT
                jr.time = r.wall_time if jr.verdict != TIMEOUT else timeout
        records = [r for jr in jobs for r in jr.records]
        if plan.multijob:
            verdict, t, sched = simulate_multijob(jobs, cores, timeout)
            return PlanResult(benchmark, verdict, t, jobs, records, sched)
        verdict, t = aggregate_portfolio([(j.verdict, j.time) for j in jobs], timeout)
        return PlanResult(benchmark, verdict, t, jobs, records)
    finally:
        if not keep_files and scratch is None:
            shutil.rmtree(workdir, ignore_errors=True)


# ----------------------------------------------------------------- output

def write_results_csv(records, out) -> str:
    """Write records as CSV to a path or file object; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([r.benchmark, r.job, "" if r.partition is None else r.partition,
                    r.verdict, f"{r.wall_time:.6f}", f"{r.partition_time:.6f}"])
    text = buf.getvalue()
    if isinstance(out, (str, os.PathLike)):
        Path(out).write_text(text)
    elif out is not None:
        out.write(text)
    return text


__all__ = ["RunRecord", "JobResult", "PlanResult", "Task", "CoreSchedule", "HarnessError",
           "IntegrityError", "EmbeddedExecutor", "ExternalExecutor", "run_embedded",
           "run_external", "aggregate_job", "aggregate_portfolio", "par2_score",
           "multijob_schedule", "simulate_multijob", "run_plan", "write_results_csv",
           "subproblem_path", "SCRATCH_ENV", "CSV_COLUMNS", "TIMEOUT", "ERROR"]
