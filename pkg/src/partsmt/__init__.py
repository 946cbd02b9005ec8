"""Divide-and-conquer partitioning for QF_UF and QF_IDL SMT problems."""
from .frontend import parse_file, parse_script, print_script, scramble
from .partitioner import Partition, Partitioner, StrategyConfig, partition
from .solver import Solver, solve

__version__ = "0.1.0"

__all__ = ["parse_script", "parse_file", "print_script", "scramble", "Solver", "solve",
           "StrategyConfig", "Partitioner", "Partition", "partition"]
