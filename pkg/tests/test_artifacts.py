import os

import pytest
from hypothesis import given, strategies as st

from mclsearch import artifacts as art

keys = st.text("abcdefghij_", min_size=1, max_size=8)
vals = st.one_of(st.integers(), st.text("xyz0123456789.", max_size=10))


@given(st.dictionaries(keys, vals))
def test_kv_roundtrip(d):
    back = art.parse_kv(art.format_kv(d))
    assert back == {k: str(v).strip() for k, v in d.items()}


def test_kv_lists():
    assert art.format_kv({"points": (1, 2, 3)}) == "points=1,2,3\n"


def test_table_layout():
    text = art.format_table(["a", "bb"], [(1, 22), (333, 4)])
    lines = text.splitlines()
    assert lines[0].startswith("# ")
    assert len({len(ln) for ln in lines}) == 1


def test_atomic_write_replaces(tmp_path):
    p = tmp_path / "sub" / "f.txt"
    art.atomic_write(p, "one")
    art.atomic_write(p, "two")
    assert p.read_text() == "two"
    assert os.listdir(p.parent) == ["f.txt"]


def test_atomic_write_leaves_old_file_on_failure(tmp_path):
    p = tmp_path / "f.txt"
    art.atomic_write(p, "keep")

    class Boom:
        def __str__(self):
            raise RuntimeError

    with pytest.raises(TypeError):
        art.atomic_write(p, Boom())
    assert p.read_text() == "keep"
    assert os.listdir(tmp_path) == ["f.txt"]


def test_checksum_helpers():
    text = art.with_checksum("body\n", "abc")
    assert art.read_checksum(text) == "abc"
    art.require_checksum(text, "abc")
    art.require_checksum("no header\n", "abc")
    with pytest.raises(art.ChecksumMismatch):
        art.require_checksum(text, "def")


def test_seed_roundtrip():
    b1, b2 = tuple(range(28)), tuple(range(100, 128))
    text = art.format_seed(1, 8, b1, b2, "abc")
    assert art.parse_seed(text) == (1, 8, b1, b2)
    with pytest.raises(ValueError):
        art.parse_seed("1 8\n1 2 3\n")
