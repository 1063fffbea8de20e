import functools
from pathlib import Path

import pytest

from wcoj.engine import RunConfig, format_tsv, run_query
from wcoj.ingest import parse_triples, vertical_partition
from wcoj.synth import generate_synthetic

QUERY_DIR = Path(__file__).resolve().parent.parent / "queries"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

CORPUS = [f"q{i}" for i in (1, 2, 3, 4, 5, 7, 8, 9, 11, 12, 13, 14)]


def corpus_query(name: str) -> str:
    return (QUERY_DIR / f"{name}.sparql").read_text(encoding="utf-8")


@functools.lru_cache(maxsize=32)
def make_db(kind: str, n: int, seed: int):
    text = generate_synthetic(kind, n, seed)
    return vertical_partition(parse_triples(text.splitlines()))


def run_tsv(db, query_text: str, **cfg) -> str:
    run = run_query(db, query_text, RunConfig(**cfg))
    return format_tsv(db, run.result)


@pytest.fixture(scope="session")
def lubm_small():
    return make_db("lubm_like", 1000, 1)


@pytest.fixture(scope="session")
def lubm_medium():
    return make_db("lubm_like", 10000, 1)
