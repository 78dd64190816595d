"""High-precision evaluation of multiple zeta values.

A value zeta(n_1,...,n_r) is the iterated integral of its binary word over
[0, 1].  Evaluation splits the path at 1/2: the coefficient over [0, 1] is
the sum over all splittings w = u v of (integral of u over [0, 1/2]) times
(integral of v over [1/2, 1]), and the second factor equals the integral of
the reversed-and-flipped word of v over [0, 1/2].  Every factor is a nested
power sum at x = 1/2, so each series converges geometrically at rate 2^-k
for every admissible word.
"""

from __future__ import annotations

import math

import mpmath

from .words import (
    CompositionIndex,
    dual_word,
    index_of_word,
    word_of_index,
)

GUARD_DIGITS = 10
PRECISION_FACTOR = 1.2


class DivergenceError(ValueError):
    """Requested sum diverges (non-admissible index at x = 1)."""


def working_digits(digits: int) -> int:
    return int(math.ceil(PRECISION_FACTOR * digits)) + GUARD_DIGITS


def _nested_sum(parts, x, K):
    """Sum over 0 < k_1 < ... < k_r <= K of x^{k_r} / prod k_i^{n_i}.

    Dynamic programming over the largest variable: inner[j] after step k is
    the depth-j sum with k_j <= k and no x power; the answer accumulates
    x^k * inner[r-1](k-1) / k^{n_r}.
    """
    r = len(parts)
    if r == 0:
        return mpmath.mpf(1)
    inner = [mpmath.mpf(1)] + [mpmath.mpf(0)] * (r - 1)
    total = mpmath.mpf(0)
    xk = mpmath.mpf(1)
    for k in range(1, K + 1):
        xk *= x
        kf = mpmath.mpf(k)
        total += xk * inner[r - 1] / kf ** parts[r - 1]
        # update depth sums from deep to shallow so k enters each once
        for j in range(r - 1, 0, -1):
            inner[j] += inner[j - 1] / kf ** parts[j - 1]
    return total


def _tail_bound(parts, x, K):
    """Rigorous bound on the discarded tail k_r > K.

    Inner sums are majorized by (1 + ln k_r)^{r-1}; for x < 1 the tail is
    geometric, for x = 1 it is of order K^{1 - n_r}.
    """
    r = len(parts)
    n_r = parts[-1]
    lnK = mpmath.log(K + 1)
    poly = (1 + lnK) ** (r - 1)
    if x < 1:
        sqrtx = mpmath.sqrt(x)
        # need (1+ln k)^{r-1} x^{k/2} decreasing beyond K
        if r > 1 and (r - 1) / ((1 + lnK) * (K + 1)) > -mpmath.log(sqrtx):
            raise ValueError("K too small for a valid geometric tail bound")
        return poly * x ** (K + 1) / (1 - sqrtx)
    if n_r < 2:
        raise DivergenceError("tail of a non-admissible index diverges at x = 1")
    # (1+ln u)^{r-1} <= (1+ln K)^{r-1} (u/K)^{1/2} for u >= K >= e^{2(r-1)}
    if K < math.exp(2 * (r - 1)):
        raise ValueError("K too small for a valid power-law tail bound")
    return poly * mpmath.mpf(K) ** (1 - n_r) / (n_r - mpmath.mpf(3) / 2)


def partial_sum(index: CompositionIndex, x, K: int, digits: int = 30):
    """Truncated nested power sum at argument x, with a rigorous tail bound.

    Returns (value, tail_bound).  Requires 0 < x < 1, or x = 1 with an
    admissible index.
    """
    if not index.parts:
        raise ValueError("empty index")
    with mpmath.workdps(working_digits(digits)):
        x = mpmath.mpf(x)
        if not 0 < x <= 1:
            raise ValueError("x must lie in (0, 1]")
        if x == 1 and not index.admissible:
            raise DivergenceError(f"{index} diverges at x = 1 (last part must exceed 1)")
        value = _nested_sum(index.parts, x, K)
        bound = _tail_bound(index.parts, x, K)
        return value, bound


def _terms_for(x, dps):
    """Smallest K with x^K below the working resolution (plus slack)."""
    K = int(mpmath.ceil(dps * mpmath.log(10) / -mpmath.log(x))) + 8
    return max(K, 60)


def _word_at_half(word, dps):
    """Iterated integral of an arbitrary word over [0, 1/2].

    Any word starting with 1 is a nested power sum at 1/2; the empty word
    integrates to 1.
    """
    if not word:
        return mpmath.mpf(1)
    assert word[0] == "1"
    half = mpmath.mpf(1) / 2
    parts = index_of_word(word).parts
    return _nested_sum(parts, half, _terms_for(half, dps))


def zeta_word(word: str, digits: int = 30):
    """Iterated integral of an admissible word over [0, 1]."""
    if not word or word[0] != "1" or word[-1] != "0":
        raise DivergenceError(
            f"word {word!r} is not convergent at both ends of [0, 1]"
        )
    dps = working_digits(digits)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for cut in range(len(word) + 1):
            u, v = word[:cut], word[cut:]
            total += _word_at_half(u, dps) * _word_at_half(dual_word(v), dps)
        return +total


def zeta(index: CompositionIndex, digits: int = 30, cache=None):
    """Multiple zeta value of an admissible index, correct to ``digits``."""
    if not index.admissible:
        raise DivergenceError(f"{index} diverges (last part must exceed 1)")
    if cache is not None:
        hit = cache.lookup_zeta(index.parts, digits)
        if hit is not None:
            return hit
    value = zeta_word(word_of_index(index), digits)
    if cache is not None:
        cache.store_zeta(index.parts, digits, value)
    return value
