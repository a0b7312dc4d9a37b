"""Randomized equivalence of the engine against the oracle-based reference."""

from __future__ import annotations

from collections import Counter

from cnicloud.query import execute_sql

from .fuzzgen import Vocab, generate_queries
from .reference import OracleData, evaluate_sql


def run_fuzz(store, data: OracleData, seed: int, n: int) -> None:
    vocab = Vocab(data)
    for sql in generate_queries(seed, vocab, n):
        columns, expected = evaluate_sql(sql, data)
        rs = execute_sql(sql, store)
        assert rs.columns == columns, sql
        assert Counter(rs.rows) == Counter(expected), sql
        assert rs.rows == expected, f"row order diverged: {sql}"


def test_fuzz_engine_vs_reference(mid_corpus, mid_store):
    outdir, _ = mid_corpus
    run_fuzz(mid_store, OracleData(outdir), seed=2024, n=80)


def test_fuzz_small_corpus(small_corpus):
    from .conftest import build_store

    outdir, _ = small_corpus
    store = build_store(outdir)
    run_fuzz(store, OracleData(outdir), seed=7, n=40)
