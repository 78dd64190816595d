"""Append-only persistent store for evaluated zeta values and discovered
relations.

Each line is a JSON object with a truncated SHA-256 checksum of its payload;
entries are never mutated.  Lines that fail to parse or to checksum are
moved to a quarantine file next to the cache and skipped, so an interrupted
run never poisons later ones.  A lock file serializes writers; readers are
unrestricted.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from contextlib import contextmanager

import mpmath

from .mzv import working_digits


class CacheLockError(RuntimeError):
    pass


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


class CacheStore:
    def __init__(self, path):
        self.path = os.fspath(path)
        self._zeta = {}       # parts tuple -> (digits, value string)
        self._relations = []
        self.quarantined = 0
        self._load()

    # -- persistence ---------------------------------------------------

    def _load(self):
        if not os.path.exists(self.path):
            return
        bad = []
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    sha = obj.pop("sha")
                    if sha != _checksum(obj):
                        raise ValueError("checksum mismatch")
                except (ValueError, KeyError, TypeError):
                    bad.append(line)
                    continue
                self._absorb(obj)
        if bad:
            self.quarantined = len(bad)
            with open(self.path + ".quarantine", "a", encoding="utf-8") as q:
                for line in bad:
                    q.write(line + "\n")
            survivors = []
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    s = line.strip()
                    if s and s not in bad:
                        survivors.append(s)
            with open(self.path, "w", encoding="utf-8") as fh:
                for s in survivors:
                    fh.write(s + "\n")

    def _absorb(self, obj):
        if obj.get("kind") == "zeta":
            parts = tuple(obj["index"])
            digits = int(obj["digits"])
            old = self._zeta.get(parts)
            if old is None or old[0] < digits:
                self._zeta[parts] = (digits, obj["value"])
        elif obj.get("kind") == "relation":
            self._relations.append(obj)

    @contextmanager
    def _writer_lock(self):
        lock = self.path + ".lock"
        fd = None
        for _ in range(100):
            try:
                fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                break
            except FileExistsError:
                time.sleep(0.05)
        if fd is None:
            raise CacheLockError(f"cache {self.path} is locked by another writer")
        try:
            yield
        finally:
            os.close(fd)
            os.unlink(lock)

    def _append(self, obj):
        obj = dict(obj)
        obj["sha"] = _checksum({k: v for k, v in obj.items() if k != "sha"})
        with self._writer_lock():
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(obj, sort_keys=True) + "\n")

    # -- zeta values ---------------------------------------------------

    def lookup_zeta(self, parts, digits):
        """Cached value re-rounded to the requested digits, or None.

        Only entries stored at >= the requested digits are served, so a
        lookup never silently loses precision.
        """
        hit = self._zeta.get(tuple(parts))
        if hit is None or hit[0] < digits:
            return None
        with mpmath.workdps(working_digits(digits)):
            return mpmath.mpf(hit[1])

    def store_zeta(self, parts, digits, value):
        parts = tuple(int(p) for p in parts)
        old = self._zeta.get(parts)
        if old is not None and old[0] >= digits:
            return
        text = mpmath.nstr(value, digits + 5)
        self._append(
            {"kind": "zeta", "index": list(parts), "digits": digits, "value": text}
        )
        self._zeta[parts] = (digits, text)

    # -- relations -----------------------------------------------------

    def store_relation(self, weight, labels, coefficients, residual, digits):
        obj = {
            "kind": "relation",
            "weight": int(weight),
            "labels": list(labels),
            "coefficients": [int(c) for c in coefficients],
            "residual": str(residual),
            "digits": int(digits),
        }
        self._append(obj)
        self._relations.append(obj)

    def relations(self):
        return list(self._relations)


def open_cache(path=None):
    """CacheStore at the explicit path, $PERIODS_CACHE, or None."""
    path = path or os.environ.get("PERIODS_CACHE")
    return CacheStore(path) if path else None
