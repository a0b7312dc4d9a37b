from __future__ import annotations

import functools
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnicloud.errors import InvalidToken, MalformedBlock, MalformedName
from cnicloud.logmodel import (
    LogFileKey,
    MessageBody,
    body_from_dict,
    canonicalize_body,
    encode_filename,
    iter_blocks,
    msg_hash,
    parse_filename,
    render_block,
)


def _utc(*args) -> datetime:
    return datetime(*args, tzinfo=timezone.utc)


def reference_fnv1a64(data: bytes) -> str:
    """Independent FNV-1a oracle (reduce-based, distinct from the library)."""
    h = functools.reduce(
        lambda acc, b: ((acc ^ b) * 0x100000001B3) % 2**64, data, 0xCBF29CE484222325
    )
    return format(h, "016x")


# -- filename codec ----------------------------------------------------------


def test_encode_example():
    key = LogFileKey(_utc(2016, 8, 1, 12, 0, 0), 34.07, -118.44, "Nexus-6P", "T-Mobile")
    assert (
        encode_filename(key)
        == "cniCloud_20160801T120000Z_34.0700,-118.4400_Nexus-6P_T-Mobile.log"
    )


def test_encode_epoch_zero():
    key = LogFileKey(_utc(1970, 1, 1), 0.0, 0.0, "X", "Y")
    assert encode_filename(key) == "cniCloud_19700101T000000Z_0.0000,0.0000_X_Y.log"


def test_underscore_token_rejected():
    with pytest.raises(InvalidToken):
        LogFileKey(_utc(2016, 8, 1), 0.0, 0.0, "Galaxy_S5", "ATT")


def test_parse_round_trip_example():
    name = "cniCloud_20160801T120000Z_34.0700,-118.4400_Nexus-6P_T-Mobile.log"
    key = parse_filename(name)
    assert key.model == "Nexus-6P"
    assert key.operator == "T-Mobile"
    assert key.lat == pytest.approx(34.07)
    assert key.lon == pytest.approx(-118.44)
    assert key.time == _utc(2016, 8, 1, 12, 0, 0)
    assert encode_filename(key) == name


def test_parse_trims_directory_prefix():
    name = "/data/logs/cniCloud_20160801T120000Z_0.0000,0.0000_X_Y.log"
    assert parse_filename(name).model == "X"


@pytest.mark.parametrize(
    "bad",
    [
        "random.log",
        "cniCloud_20160801T120000Z_91.0000,0.0000_A_B.log",  # lat out of range
        "cniCloud_20160801T120000Z_0.0000,181.0000_A_B.log",  # lon out of range
        "cniCloud_20160801T120000Z_0.0000_A_B.log",  # loc missing lon
        "cniCloud_20160801T120000Z_0.0,0.0_A_B.log",  # non-canonical coords
        "cniCloud_20160801T120000Z_-0.0000,0.0000_A_B.log",  # negative zero
        "cniCloud_20161301T120000Z_0.0000,0.0000_A_B.log",  # month 13
        "cniCloud_2016-08-01T120000Z_0.0000,0.0000_A_B.log",
        "cniCloud_20160801T120000Z_0.0000,0.0000_A.log",  # missing field
        "cniCloud_20160801T120000Z_0.0000,0.0000_A_B_C.log",  # extra field
        "cniCloud_20160801T120000Z_0.0000,0.0000_A_B.txt",  # suffix
        "cniCloud_20160801T120000Z_0.0000,0.0000__B.log",  # empty model
    ],
)
def test_parse_malformed(bad):
    with pytest.raises(MalformedName):
        parse_filename(bad)


_token = st.text(alphabet="ABCxyz019.,+-", min_size=1, max_size=10)
_coord = st.integers(min_value=-900000, max_value=900000).map(lambda v: v / 10000)
_lon = st.integers(min_value=-1800000, max_value=1800000).map(lambda v: v / 10000)
_time = st.integers(min_value=0, max_value=4102444799).map(
    lambda s: datetime.fromtimestamp(s, tz=timezone.utc)
)


@given(time=_time, lat=_coord, lon=_lon, model=_token, operator=_token)
def test_filename_round_trip_property(time, lat, lon, model, operator):
    key = LogFileKey(time, lat, lon, model, operator)
    assert parse_filename(encode_filename(key)) == key


# -- bodies, canonical form, hashing ----------------------------------------


def test_canonicalize_empty():
    assert canonicalize_body(MessageBody()) == b""


def test_canonicalize_flat():
    assert canonicalize_body(body_from_dict({"a": "1"})) == b"a: 1\n"


def test_canonicalize_nested():
    assert canonicalize_body(body_from_dict({"a": {"b": "2"}})) == b"a:\n  b: 2\n"


def test_msg_hash_empty_is_offset_basis():
    assert msg_hash(MessageBody()) == "cbf29ce484222325"
    assert reference_fnv1a64(b"") == "cbf29ce484222325"


def test_msg_hash_matches_reference_oracle():
    body = body_from_dict({"a": "1"})
    assert msg_hash(body) == reference_fnv1a64(b"a: 1\n")
    nested = body_from_dict({"rrc": {"drx": {"shortDRX-Timer": "40"}}})
    assert msg_hash(nested) == reference_fnv1a64(canonicalize_body(nested))


def test_msg_hash_deterministic_for_equal_bodies():
    a = body_from_dict({"k": {"x": "1", "y": "2"}})
    b = body_from_dict({"k": {"x": "1", "y": "2"}})
    assert a == b
    assert msg_hash(a) == msg_hash(b)


def test_body_invariants():
    with pytest.raises(ValueError):
        MessageBody((("a", "1"), ("a", "2")))  # duplicate sibling
    with pytest.raises(ValueError):
        MessageBody((("bad key", "1"),))  # space in key
    with pytest.raises(ValueError):
        MessageBody((("a", "line\nbreak"),))


def test_body_get_and_leaves():
    body = body_from_dict({"rrc": {"drx": {"shortDRX-Timer": "40"}, "state": "IDLE"}})
    assert body.get("rrc.drx.shortDRX-Timer") == "40"
    assert body.get("rrc.missing") is None
    assert body.get("rrc.drx.shortDRX-Timer.deeper") is None
    assert list(body.leaves()) == [
        ("rrc.drx.shortDRX-Timer", "40"),
        ("rrc.state", "IDLE"),
    ]


_body_keys = st.from_regex(r"[A-Za-z0-9_+-]{1,6}", fullmatch=True)
_scalars = st.text(
    alphabet=st.characters(blacklist_characters="\n", min_codepoint=32, max_codepoint=126),
    max_size=6,
)
_bodies = st.recursive(
    st.dictionaries(_body_keys, _scalars, max_size=4),
    lambda children: st.dictionaries(_body_keys, st.one_of(_scalars, children), max_size=4),
    max_leaves=12,
).map(body_from_dict)


@given(a=_bodies, b=_bodies)
@settings(max_examples=200)
def test_canonicalization_injective(a, b):
    if a != b:
        assert canonicalize_body(a) != canonicalize_body(b)
    else:
        assert canonicalize_body(a) == canonicalize_body(b)


@given(body=_bodies)
def test_block_round_trip_property(body):
    text = render_block(1469102400000, "4G_LTE_RRC", body)
    blocks = list(iter_blocks(text.splitlines(keepends=True)))
    assert len(blocks) == 1
    lineno, time_ms, msgtype, parsed = blocks[0]
    assert (lineno, time_ms, msgtype) == (1, 1469102400000, "4G_LTE_RRC")
    assert parsed == body


# -- block format ------------------------------------------------------------

RRC_EXAMPLE = "# MSG 1469102400000 4G_LTE_RRC\nrrc:\n  drx:\n    shortDRX-Timer: 40\n"


def test_iter_blocks_example():
    blocks = list(iter_blocks(RRC_EXAMPLE.splitlines(keepends=True)))
    assert len(blocks) == 1
    lineno, time_ms, msgtype, body = blocks[0]
    assert lineno == 1
    assert msgtype == "4G_LTE_RRC"
    assert body.get("rrc.drx.shortDRX-Timer") == "40"


def test_iter_blocks_empty():
    assert list(iter_blocks([])) == []


@pytest.mark.parametrize(
    "text,lineno,fragment",
    [
        ("rrc:\n", 1, "before any header"),
        ("# MSG 1 T\n   a: 1\n", 2, "multiple of 2"),
        ("# MSG 1 T\n    a: 1\n", 2, "jumps"),
        ("# MSG 1 T\na: 1\na: 2\n", 3, "duplicate sibling"),
        ("# MSG notanumber T\n", 1, "bad header"),
        ("# MSG 1\n", 1, "bad header"),
        ("# MSG 1 T\n???\n", 2, "bad body"),
    ],
)
def test_iter_blocks_malformed(text, lineno, fragment):
    with pytest.raises(MalformedBlock) as err:
        list(iter_blocks(text.splitlines(keepends=True)))
    assert err.value.lineno == lineno
    assert fragment in str(err.value)


def test_iter_blocks_depth_limit():
    lines = ["# MSG 1 T\n"]
    for level in range(17):
        lines.append("  " * level + f"k{level}:\n")
    with pytest.raises(MalformedBlock) as err:
        list(iter_blocks(lines))
    assert "depth" in str(err.value)


def test_body_depth_enforced_at_construction():
    body = MessageBody((("leaf", "1"),))
    for _ in range(15):  # 16 levels total is the cap
        body = MessageBody((("nest", body),))
    assert body.depth() == 16
    with pytest.raises(ValueError):
        MessageBody((("nest", body),))


def test_string_level_round_trip(small_corpus):
    outdir, _ = small_corpus
    for path in outdir.iterdir():
        if path.name.endswith(".log"):
            assert encode_filename(parse_filename(path.name)) == path.name
