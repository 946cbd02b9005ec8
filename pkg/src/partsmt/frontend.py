"""Script-level operations: subproblem emission, manifests, scrambling.

Parsing and printing live in :mod:`partsmt.smtlib`; they are re-exported
here so callers have one import for everything file-facing.
"""
from __future__ import annotations

import random
from pathlib import Path

from . import terms as T
from .smtlib import (Decl, NonDifferenceError, ParseError, Script, SMTLibError, SortError,
                     UnsupportedLogicError, format_term, parse_file, parse_script,
                     parse_term, print_script)
from .terms import Sort, Term


class UndeclaredSymbolError(ValueError):
    pass


# ----------------------------------------------------------- subproblems

def subproblem(script: Script, formula: Term) -> Script:
    """``script`` with ``formula`` appended as a final assertion."""
    missing = T.free_symbols(formula) - script.declared_names()
    if missing:
        raise UndeclaredSymbolError(
            f"partitioning formula uses undeclared symbols: {', '.join(sorted(missing))}")
    return script.with_assertions(script.assertions + (formula,))


def emit_subproblem(script: Script, partition) -> str:
    """SMT-LIB text of script AND the partition's formula."""
    formula = partition.formula if hasattr(partition, "formula") else partition
    return print_script(subproblem(script, formula))


def subproblem_path(base, index: int) -> Path:
    base = Path(base)
    return base.with_name(f"{base.name}.partition-{index}.smt2")


def manifest_text(partitions) -> str:
    return "".join(format_term(p.formula) + "\n" for p in partitions)


def write_partitions(script: Script, partitions, base) -> list[Path]:
    """Write one subproblem file per partition plus ``<base>.manifest``.

    ``base`` is a path prefix such as ``out/problem``; files are named
    ``out/problem.partition-<i>.smt2``."""
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    paths = []
    for p in partitions:
        path = subproblem_path(base, p.index)
        path.write_text(emit_subproblem(script, p))
        paths.append(path)
    base.with_name(base.name + ".manifest").write_text(manifest_text(partitions))
    return paths


def read_manifest(path, script: Script) -> list[Term]:
    return [parse_term(line, script) for line in Path(path).read_text().splitlines() if line.strip()]


# ------------------------------------------------------------- scrambling

COMMUTATIVE = (T.AND, T.OR, T.EQ, T.PLUS)


def scramble_renaming(script: Script, seed: int) -> dict[str, str]:
    """Injective map from declared names to fresh names (identity for seed 0)."""
    names = [d.name for d in script.declarations]
    if seed == 0:
        return {n: n for n in names}
    rng = random.Random(seed)
    sorts = [d.name for d in script.declarations if d.kind == "sort"]
    funs = [d.name for d in script.declarations if d.kind == "fun"]
    out = {}
    for prefix, group in (("S", sorts), ("v", funs)):
        ids = list(range(len(group)))
        rng.shuffle(ids)
        out.update({name: f"{prefix}{i}" for name, i in zip(group, ids)})
    return out


def scramble(script: Script, seed: int) -> Script:
    """Equisatisfiable perturbation: renamed symbols, shuffled assertions and
    declarations, permuted arguments of commutative operators."""
    if seed == 0:
        return script
    ren = scramble_renaming(script, seed)
    rng = random.Random(f"scramble-{seed}")

    def sort(s: Sort) -> Sort:
        return T.usort(ren[s.name]) if s.is_uninterpreted else s

    cache: dict = {}

    def term(t: Term) -> Term:
        out = cache.get(t)
        if out is not None:
            return out
        args = [term(a) for a in t.args]
        if t.op in COMMUTATIVE:
            rng.shuffle(args)
        if t.op in (T.VAR, T.APP):
            out = Term(t.op, tuple(args), sort(t.sort), name=ren[t.name])
        else:
            out = Term(t.op, tuple(args), sort(t.sort), value=t.value)
        cache[t] = out
        return out

    sorts = [Decl("sort", ren[d.name]) for d in script.declarations if d.kind == "sort"]
    funs = [Decl("fun", ren[d.name], tuple(sort(a) for a in d.arg_sorts), sort(d.sort))
            for d in script.declarations if d.kind == "fun"]
    rng.shuffle(sorts)
    rng.shuffle(funs)
    assertions = [term(a) for a in script.assertions]
    rng.shuffle(assertions)
    return Script(script.logic, tuple(sorts + funs), tuple(assertions), script.filename)


__all__ = ["Script", "Decl", "parse_script", "parse_file", "parse_term", "print_script",
           "format_term", "SMTLibError", "ParseError", "SortError", "UnsupportedLogicError",
           "NonDifferenceError", "UndeclaredSymbolError", "subproblem", "emit_subproblem",
           "subproblem_path", "manifest_text", "write_partitions", "read_manifest",
           "scramble", "scramble_renaming"]
