"""Index and word combinatorics for multiple zeta values.

A composition index (n_1, ..., n_r) names the nested sum over
0 < k_1 < ... < k_r of 1/(k_1^{n_1} ... k_r^{n_r}); the index is admissible
(the sum converges) exactly when n_r > 1.  Its binary word is
1 0^{n_1 - 1} 1 0^{n_2 - 1} ... 1 0^{n_r - 1}, letter 0 standing for the
form dz/z and letter 1 for dz/(1-z), listed in integration order from the
0 end of the path.

The convention that the LAST part n_r sits on the largest summation
variable (so admissibility reads n_r > 1) is fixed throughout; no
compatibility mode for the reversed convention is provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb


@dataclass(frozen=True)
class CompositionIndex:
    """MZV index (n_1, ..., n_r); all parts >= 1."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(n) for n in self.parts))
        if any(n < 1 for n in self.parts):
            raise ValueError(f"all parts must be >= 1, got {self.parts}")

    @property
    def weight(self):
        return sum(self.parts)

    @property
    def depth(self):
        return len(self.parts)

    @property
    def admissible(self):
        return bool(self.parts) and self.parts[-1] > 1

    def __str__(self):
        return "zeta(" + ",".join(str(n) for n in self.parts) + ")"


def parse_index(text) -> CompositionIndex:
    """Parse "1,2" or "zeta(1,2)" into an index."""
    text = text.strip()
    if text.startswith("zeta(") and text.endswith(")"):
        text = text[5:-1]
    return CompositionIndex(tuple(int(p) for p in text.split(",") if p.strip()))


def word_of_index(index: CompositionIndex) -> str:
    """Binary word 1 0^{n_1-1} ... 1 0^{n_r-1} of an index."""
    return "".join("1" + "0" * (n - 1) for n in index.parts)


def index_of_word(word: str) -> CompositionIndex:
    """Inverse of word_of_index; requires the word to start with letter 1."""
    if not word:
        return CompositionIndex(())
    if word[0] != "1":
        raise ValueError(f"word {word!r} starts with 0 and has no index form")
    parts = []
    for letter in word:
        if letter == "1":
            parts.append(1)
        else:
            parts[-1] += 1
    return CompositionIndex(tuple(parts))


def is_convergent_word(word: str) -> bool:
    """True when the word is convergent at both endpoints of [0, 1]."""
    return bool(word) and word[0] == "1" and word[-1] == "0"


def dual_word(word: str) -> str:
    """Reverse the word and flip every letter (the z -> 1-z symmetry)."""
    return "".join("1" if c == "0" else "0" for c in reversed(word))


class WordSum(dict):
    """Finite integer-multiplicity combination of words or indices."""

    def __init__(self, items=()):
        super().__init__()
        for key, mult in dict(items).items():
            self.add(key, mult)

    def add(self, key, mult=1):
        new = self.get(key, 0) + mult
        if new:
            self[key] = new
        else:
            self.pop(key, None)

    def total_multiplicity(self):
        return sum(self.values())


def shuffle(u: str, v: str) -> WordSum:
    """Sum over all interleavings of u and v preserving internal orders."""
    out = WordSum()

    def rec(i, j, prefix):
        if i == len(u) and j == len(v):
            out.add(prefix)
            return
        if i < len(u):
            rec(i + 1, j, prefix + u[i])
        if j < len(v):
            rec(i, j + 1, prefix + v[j])

    rec(0, 0, "")
    assert out.total_multiplicity() == comb(len(u) + len(v), len(u))
    return out


def stuffle(a: CompositionIndex, b: CompositionIndex) -> WordSum:
    """Quasi-shuffle of indices: interleavings with part merging.

    Recursion peels parts off the right end, where the largest summation
    variable lives, so depth-1 inputs give (n)*(m) = (n,m)+(m,n)+(n+m).
    """
    out = WordSum()

    def rec(pa, pb, suffix):
        if not pa and not pb:
            out.add(CompositionIndex(suffix))
            return
        if pa:
            rec(pa[:-1], pb, (pa[-1],) + suffix)
        if pb:
            rec(pa, pb[:-1], (pb[-1],) + suffix)
        if pa and pb:
            rec(pa[:-1], pb[:-1], (pa[-1] + pb[-1],) + suffix)

    rec(a.parts, b.parts, ())
    return out


def enumerate_admissible(weight: int):
    """All admissible indices of the given weight (2^{weight-2} of them)."""
    if weight < 2:
        return []
    out = []

    def rec(remaining, parts):
        if remaining == 0:
            out.append(CompositionIndex(tuple(parts)))
            return
        # last part must exceed 1; earlier parts are free
        for n in range(1, remaining + 1):
            if remaining - n == 0 and n < 2:
                continue
            rec(remaining - n, parts + [n])

    rec(weight, [])
    return sorted(out, key=lambda i: (i.depth, i.parts))
