from __future__ import annotations

import pytest

from cnicloud.corpus import CorpusSpec, generate_corpus
from cnicloud.ingest import ingest_dir
from cnicloud.metastore import Metastore


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """The 2-file, 10-message corpus used by the worked examples."""
    outdir = tmp_path_factory.mktemp("corpus-small")
    manifest = generate_corpus(CorpusSpec(seed=1, n_files=2, msgs_per_file=(5, 5)), outdir)
    return outdir, manifest


@pytest.fixture(scope="session")
def mid_corpus(tmp_path_factory):
    """A few-hundred-message corpus for behavioral tests."""
    outdir = tmp_path_factory.mktemp("corpus-mid")
    manifest = generate_corpus(
        CorpusSpec(seed=7, n_files=40, msgs_per_file=(10, 25)), outdir
    )
    return outdir, manifest


@pytest.fixture(scope="session")
def mid_store(mid_corpus):
    """Shared read-only store over mid_corpus; counter deltas only."""
    outdir, _ = mid_corpus
    store = Metastore()
    summary = ingest_dir(outdir, store)
    assert not summary.skipped
    return store


def build_store(dirpath) -> Metastore:
    store = Metastore()
    summary = ingest_dir(dirpath, store)
    assert not summary.skipped, summary.skipped
    return store
