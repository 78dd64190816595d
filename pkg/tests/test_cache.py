import json
import os

import mpmath
import pytest

from periods.cache import CacheLockError, CacheStore, open_cache
from periods.mzv import zeta
from periods.words import parse_index


def test_round_trip(tmp_path):
    path = tmp_path / "cache.jsonl"
    store = CacheStore(path)
    with mpmath.workdps(40):
        value = zeta(parse_index("2"), 30)
    store.store_zeta((2,), 30, value)
    again = CacheStore(path)
    got = again.lookup_zeta((2,), 30)
    assert got is not None
    assert abs(got - value) < mpmath.mpf(10) ** -29


def test_lookup_respects_precision(tmp_path):
    store = CacheStore(tmp_path / "c.jsonl")
    with mpmath.workdps(40):
        store.store_zeta((3,), 30, zeta(parse_index("3"), 30))
    assert store.lookup_zeta((3,), 20) is not None
    # stored digits below the request: must miss, never degrade silently
    assert store.lookup_zeta((3,), 50) is None
    assert store.lookup_zeta((5,), 10) is None


def test_higher_precision_replaces(tmp_path):
    store = CacheStore(tmp_path / "c.jsonl")
    with mpmath.workdps(70):
        store.store_zeta((2,), 20, zeta(parse_index("2"), 20))
        store.store_zeta((2,), 60, zeta(parse_index("2"), 60))
        # lower-precision store after a better one is a no-op
        store.store_zeta((2,), 10, mpmath.mpf("1.6"))
    assert store.lookup_zeta((2,), 60) is not None
    fresh = CacheStore(store.path)
    assert fresh.lookup_zeta((2,), 60) is not None


def test_corrupted_lines_are_quarantined(tmp_path):
    path = tmp_path / "c.jsonl"
    store = CacheStore(path)
    with mpmath.workdps(40):
        store.store_zeta((2,), 25, zeta(parse_index("2"), 25))
        store.store_zeta((3,), 25, zeta(parse_index("3"), 25))
    with open(path, "a") as fh:
        fh.write("{not json at all\n")
    # tamper with one good line so its checksum fails
    lines = open(path).read().splitlines()
    lines[0] = lines[0].replace('"kind": "zeta"', '"kind": "zeta" ').replace(
        '"digits": 25', '"digits": 26')
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

    recovered = CacheStore(path)
    assert recovered.quarantined == 2
    assert os.path.exists(str(path) + ".quarantine")
    # the untouched entry survives and the file was rewritten clean
    assert recovered.lookup_zeta((3,), 25) is not None
    assert recovered.lookup_zeta((2,), 25) is None
    clean = CacheStore(path)
    assert clean.quarantined == 0


def test_relations_round_trip(tmp_path):
    store = CacheStore(tmp_path / "c.jsonl")
    store.store_relation(4, ["zeta(4)", "zeta(2,2)"], [3, -4], "1e-70", 80)
    fresh = CacheStore(store.path)
    rels = fresh.relations()
    assert len(rels) == 1
    assert rels[0]["coefficients"] == [3, -4]
    assert rels[0]["weight"] == 4


def test_writer_lock_blocks(tmp_path):
    store = CacheStore(tmp_path / "c.jsonl")
    lock = store.path + ".lock"
    fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    try:
        with pytest.raises(CacheLockError):
            store.store_zeta((2,), 10, mpmath.mpf("1.64"))
    finally:
        os.close(fd)
        os.unlink(lock)
    # lock released: store succeeds now
    store.store_zeta((2,), 10, mpmath.mpf("1.6449340668"))
    assert store.lookup_zeta((2,), 10) is not None


def test_open_cache_env(tmp_path, monkeypatch):
    monkeypatch.delenv("PERIODS_CACHE", raising=False)
    assert open_cache() is None
    target = tmp_path / "envcache.jsonl"
    monkeypatch.setenv("PERIODS_CACHE", str(target))
    store = open_cache()
    assert store is not None
    assert store.path == str(target)
    explicit = open_cache(tmp_path / "other.jsonl")
    assert explicit.path.endswith("other.jsonl")


def test_zeta_uses_store(tmp_path):
    store = CacheStore(tmp_path / "c.jsonl")
    v1 = zeta(parse_index("1,3"), 30, cache=store)
    assert store.lookup_zeta((1, 3), 30) is not None
    v2 = zeta(parse_index("1,3"), 30, cache=store)
    assert abs(v1 - v2) < mpmath.mpf(10) ** -29


def test_lines_carry_checksums(tmp_path):
    store = CacheStore(tmp_path / "c.jsonl")
    store.store_zeta((2,), 15, mpmath.mpf("1.644934066848226"))
    line = open(store.path).read().strip()
    obj = json.loads(line)
    assert "sha" in obj and len(obj["sha"]) == 12
