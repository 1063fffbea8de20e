"""Worst-case optimal join engine for triple data.

Loads triple files into vertically partitioned, dictionary-encoded
relations, compiles conjunctive queries into GHD plans, and executes them
with the generic multiway join over adaptive-layout tries. A deliberately
simple pairwise hash-join engine rides along as the correctness oracle.
"""

from .dictionary import Dictionary
from .engine import RunConfig, explain, format_tsv, run_query
from .ingest import PartitionedDatabase, load_triple_file, parse_triples, vertical_partition
from .sparql import parse_query
from .synth import generate_synthetic

__all__ = [
    "Dictionary",
    "PartitionedDatabase",
    "RunConfig",
    "explain",
    "format_tsv",
    "generate_synthetic",
    "load_triple_file",
    "parse_query",
    "parse_triples",
    "run_query",
    "vertical_partition",
]
