"""CDCL(T) solver for QF_UF and QF_IDL with partitioning hooks."""
from .cdcl import (CL, DECISION, HEAP, PARTITIONED, RAND, SAT, SPEC, UNKNOWN, UNSAT,
                   SolveResult, Solver, TheoryLemmaLog, luby, solve)
from .heap import ActivityHeap
from .idl import MAX_CONSTANT, IDLRangeError

__all__ = ["Solver", "SolveResult", "solve", "TheoryLemmaLog", "ActivityHeap", "luby",
           "SAT", "UNSAT", "UNKNOWN", "PARTITIONED", "HEAP", "DECISION", "CL", "RAND", "SPEC",
           "MAX_CONSTANT", "IDLRangeError"]
