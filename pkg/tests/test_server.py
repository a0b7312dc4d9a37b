from __future__ import annotations

import concurrent.futures
import hashlib
import os
from types import SimpleNamespace

import pytest
from fastapi.testclient import TestClient

from cnicloud.corpus import CorpusSpec, generate_corpus
from cnicloud.errors import QueryError
from cnicloud.ingest import ingest_dir
from cnicloud.metastore import Metastore
from cnicloud.query import execute_sql, parse, validate
from cnicloud.server import ServerConfig, create_app

from .fixtures import BLANK_QUERIES, MALFORMED_QUERIES, QUERY_1
from .reference import OracleData, evaluate_sql


@pytest.fixture(scope="module")
def env(tmp_path_factory):
    data = tmp_path_factory.mktemp("server-data")
    manifest = generate_corpus(CorpusSpec(seed=11, n_files=6, msgs_per_file=(4, 8)), data)
    store = Metastore()
    summary = ingest_dir(data, store)
    assert not summary.skipped
    config = ServerConfig(data_dir=data, max_result_rows=25)
    app = create_app(store, config)
    upload_src = tmp_path_factory.mktemp("server-uploads")
    upload_manifest = generate_corpus(
        CorpusSpec(seed=12, n_files=3, msgs_per_file=(3, 5)), upload_src
    )
    return SimpleNamespace(
        data=data,
        store=store,
        manifest=manifest,
        client=TestClient(app),
        app=app,
        upload_src=upload_src,
        upload_manifest=upload_manifest,
    )


def test_query_endpoint_matches_oracle(env):
    resp = env.client.post("/query", json={"sql": QUERY_1})
    assert resp.status_code == 200
    payload = resp.json()
    _, expected = evaluate_sql(QUERY_1, OracleData(env.data))
    assert [tuple(r) for r in payload["rows"]] == expected
    assert payload["truncated"] is False
    assert payload["stats"]["body_resolutions"] == 0


def test_query_truncation(env):
    resp = env.client.post("/query", json={"sql": "SELECT Filepath FROM tMsg"})
    payload = resp.json()
    assert payload["truncated"] is True
    assert len(payload["rows"]) == 25
    assert payload["stats"]["row_count"] == env.store.tmsg_count


@pytest.mark.parametrize("sql", BLANK_QUERIES)
def test_query_blank(env, sql):
    resp = env.client.post("/query", json={"sql": sql})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "BlankQuery"


def test_query_error_passthrough_bytes(env):
    for sql, _ in MALFORMED_QUERIES:
        with pytest.raises(QueryError) as engine_err:
            validate(parse(sql))
        resp = env.client.post("/query", json={"sql": sql})
        assert resp.status_code == 400
        body = resp.json()
        assert body["message"].encode() == engine_err.value.message.encode()
        assert body["kind"] == engine_err.value.kind
        assert body["position"] == engine_err.value.position


def test_query_selekt_payload(env):
    resp = env.client.post("/query", json={"sql": "SELEKT x"})
    assert resp.status_code == 400
    body = resp.json()
    assert body["kind"] == "SyntaxError" and body["position"] == 1


def test_query_workers_param(env):
    one = env.client.post("/query", json={"sql": QUERY_1, "workers": 1}).json()
    three = env.client.post("/query", json={"sql": QUERY_1, "workers": 3}).json()
    assert one["rows"] == three["rows"]


def test_download_ingested_file(env):
    filepath = next(env.store.scan_tfile()).filepath
    resp = env.client.get("/download", params={"path": filepath})
    assert resp.status_code == 200
    disk = open(filepath, "rb").read()
    assert resp.content == disk
    assert resp.headers["content-length"] == str(len(disk))
    assert resp.headers["content-type"].startswith("text/plain")
    assert "attachment" in resp.headers["content-disposition"]


def test_download_relative_name(env):
    name = env.manifest.files[0][0]
    resp = env.client.get("/download", params={"path": name})
    assert resp.status_code == 200
    assert resp.content == (env.data / name).read_bytes()


def test_download_absent(env):
    resp = env.client.get("/download", params={"path": "nope.log"})
    assert resp.status_code == 404


def test_download_traversal_payloads(env):
    outside = env.data.parent / "outside-secret.txt"
    outside.write_text("secret")
    link = env.data / "sneaky.log"
    if not link.exists():
        os.symlink(outside, link)
    payloads = [
        "../outside-secret.txt",
        "../../etc/hosts",
        "../../../../../../etc/passwd",
        "/etc/passwd",
        "/etc/hosts",
        str(outside),
        "..",
        "sub/../../outside-secret.txt",
        "a/../../b.log",
        "sneaky.log",  # symlink escaping the data dir
    ]
    for payload in payloads:
        resp = env.client.get("/download", params={"path": payload})
        assert resp.status_code == 403, payload


def test_download_nonlog_media_type(env):
    blob = env.data / "report.bin"
    blob.write_bytes(b"\x00\x01\x02")
    resp = env.client.get("/download", params={"path": "report.bin"})
    assert resp.status_code == 200
    assert resp.headers["content-type"] == "application/octet-stream"


def test_upload_roundtrip(env):
    name, expected_count = env.upload_manifest.files[0]
    content = (env.upload_src / name).read_bytes()
    resp = env.client.post(
        "/upload", files={"file": (name, content, "text/plain")}
    )
    assert resp.status_code == 201, resp.text
    payload = resp.json()
    assert payload["n_messages"] == expected_count
    assert payload["filerecord"]["Filepath"] == str(env.data / name)
    assert env.store.has_file(str(env.data / name))
    # The stored copy is byte-identical and now downloadable.
    resp = env.client.get("/download", params={"path": name})
    assert resp.content == content
    # Same file again: conflict.
    resp = env.client.post("/upload", files={"file": (name, content, "text/plain")})
    assert resp.status_code == 409


def test_upload_misnamed(env):
    resp = env.client.post("/upload", files={"file": ("notes.log", b"x", "text/plain")})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "MalformedName"


def test_upload_malformed_block_deletes_file(env):
    name = "cniCloud_20250101T000000Z_1.0000,1.0000_M_O.log"
    content = b"# MSG 1 LTE_PHY\n   bad indent\n"
    resp = env.client.post("/upload", files={"file": (name, content, "text/plain")})
    assert resp.status_code == 400
    assert resp.json()["kind"] == "MalformedBlock"
    assert not (env.data / name).exists()
    assert not env.store.has_file(str(env.data / name))


def test_upload_oversize(tmp_path):
    data = tmp_path / "tiny-data"
    data.mkdir()
    store = Metastore()
    app = create_app(store, ServerConfig(data_dir=data, max_upload_bytes=100))
    client = TestClient(app)
    name = "cniCloud_20250101T000000Z_1.0000,1.0000_M_O.log"
    resp = client.post("/upload", files={"file": (name, b"x" * 200, "text/plain")})
    assert resp.status_code == 413
    assert list(data.iterdir()) == []


def test_tables_endpoint(env):
    resp = env.client.get("/tables")
    tables = {t["name"]: t for t in resp.json()["tables"]}
    assert tables["tMsg"]["columns"] == [
        "Filepath",
        "Time",
        "MsgType",
        "MsgHash",
        "MsgPath",
        "LineNo",
    ]
    assert tables["tFile"]["columns"] == ["Filepath", "Phone", "Carrier", "Time"]
    assert tables["tMsg"]["row_count"] == env.store.tmsg_count
    assert tables["tFile"]["row_count"] == env.store.tfile_count


def test_tables_fresh_store(tmp_path):
    data = tmp_path / "empty-data"
    data.mkdir()
    app = create_app(Metastore(), ServerConfig(data_dir=data))
    resp = TestClient(app).get("/tables")
    assert [t["row_count"] for t in resp.json()["tables"]] == [0, 0]


def test_stale_index_returns_500(tmp_path):
    data = tmp_path / "stale-data"
    generate_corpus(CorpusSpec(seed=13, n_files=1, msgs_per_file=(2, 2)), data)
    store = Metastore()
    ingest_dir(data, store)
    victim = next(data.iterdir())
    victim.write_text("")  # invalidate bodies after ingest
    app = create_app(store, ServerConfig(data_dir=data))
    resp = TestClient(app).post("/query", json={"sql": "SELECT * FROM tMsg"})
    assert resp.status_code == 500
    assert resp.json()["kind"] == "StaleIndex"
    assert str(victim) in resp.json()["message"]


def test_concurrent_queries_consistent(env):
    expected = execute_sql(QUERY_1, env.store).rows

    def one_query(_):
        resp = env.client.post("/query", json={"sql": QUERY_1})
        assert resp.status_code == 200
        return [tuple(r) for r in resp.json()["rows"]]

    with concurrent.futures.ThreadPoolExecutor(max_workers=32) as pool:
        results = list(pool.map(one_query, range(32)))
    assert all(rows == expected for rows in results)


def test_concurrent_parallel_queries(env):
    # Threaded handlers forking worker pools must not corrupt each other.
    expected = execute_sql(QUERY_1, env.store).rows

    def one_query(_):
        resp = env.client.post("/query", json={"sql": QUERY_1, "workers": 2})
        assert resp.status_code == 200
        return [tuple(r) for r in resp.json()["rows"]]

    with concurrent.futures.ThreadPoolExecutor(max_workers=6) as pool:
        results = list(pool.map(one_query, range(6)))
    assert all(rows == expected for rows in results)


def test_download_empty_file(env):
    empty = env.data / "empty.bin"
    empty.write_bytes(b"")
    resp = env.client.get("/download", params={"path": "empty.bin"})
    assert resp.status_code == 200
    assert resp.content == b""
    assert resp.headers["content-length"] == "0"


def test_download_hash_integrity(env):
    blob = env.data / "big.bin"
    payload = os.urandom(1024 * 512)
    blob.write_bytes(payload)
    with env.client.stream("GET", "/download", params={"path": "big.bin"}) as resp:
        assert resp.status_code == 200
        h = hashlib.sha256()
        for chunk in resp.iter_bytes():
            h.update(chunk)
    assert h.hexdigest() == hashlib.sha256(payload).hexdigest()
