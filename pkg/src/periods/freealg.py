"""Truncated noncommutative power series in two generators.

Series live in the free algebra on two letters, written as words over the
alphabet {0, 1}.  A word carries weight -2*len and Hodge level -len, which
gives the algebra its weight and Hodge gradings.  Coefficients are either
exact rationals or arbitrary-precision complex numbers with a stated working
precision in decimal digits.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import factorial

import mpmath

RATIONAL = "rational"
COMPLEX = "complex"

_WORD_LETTERS = frozenset("01")


def _check_word(word: str) -> str:
    if not set(word) <= _WORD_LETTERS:
        raise ValueError(f"word must consist of letters 0/1, got {word!r}")
    return word


class TruncatedSeries:
    """Element of the free algebra on X0, X1 truncated at a weight cutoff.

    Immutable.  ``coefficients`` maps words (strings over "01") to scalars;
    zero coefficients are never stored and no stored word is longer than
    ``cutoff``.  ``kind`` is "rational" (Fraction scalars) or "complex"
    (mpmath.mpc scalars, with ``dps`` giving the working precision).
    """

    __slots__ = ("cutoff", "kind", "dps", "_coeffs")

    def __init__(self, cutoff, coefficients, kind=RATIONAL, dps=None):
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        if kind not in (RATIONAL, COMPLEX):
            raise ValueError(f"unknown scalar kind {kind!r}")
        if kind == COMPLEX and dps is None:
            dps = mpmath.mp.dps
        if kind == RATIONAL and dps is not None:
            raise ValueError("rational series carry no working precision")
        self.cutoff = int(cutoff)
        self.kind = kind
        self.dps = dps
        coeffs = {}
        for word, value in coefficients.items():
            _check_word(word)
            if len(word) > self.cutoff:
                continue
            value = self._coerce(value)
            if value != 0:
                coeffs[word] = value
        self._coeffs = coeffs

    def _coerce(self, value):
        if self.kind == RATIONAL:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            raise TypeError(f"rational series cannot hold {type(value).__name__}")
        return mpmath.mpc(value)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, cutoff, kind=RATIONAL, dps=None):
        return cls(cutoff, {}, kind=kind, dps=dps)

    @classmethod
    def one(cls, cutoff, kind=RATIONAL, dps=None):
        unit = 1 if kind == RATIONAL else mpmath.mpc(1)
        return cls(cutoff, {"": unit}, kind=kind, dps=dps)

    @classmethod
    def generator(cls, letter, cutoff, kind=RATIONAL, dps=None):
        if letter not in (0, 1):
            raise ValueError("letter must be 0 or 1")
        unit = 1 if kind == RATIONAL else mpmath.mpc(1)
        return cls(cutoff, {str(letter): unit}, kind=kind, dps=dps)

    # -- basic access -------------------------------------------------

    def coefficient(self, word):
        _check_word(word)
        if self.kind == RATIONAL:
            return self._coeffs.get(word, Fraction(0))
        return self._coeffs.get(word, mpmath.mpc(0))

    def words(self):
        return sorted(self._coeffs, key=lambda w: (len(w), w))

    def items(self):
        return self._coeffs.items()

    @property
    def constant_term(self):
        return self.coefficient("")

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (
            self.cutoff == other.cutoff
            and self.kind == other.kind
            and self._coeffs == other._coeffs
        )

    def __repr__(self):
        terms = ", ".join(f"{w or '1'}: {c}" for w, c in sorted(self._coeffs.items()))
        return f"TruncatedSeries(cutoff={self.cutoff}, {{{terms}}})"

    def max_abs(self):
        """Largest coefficient magnitude; used for residual reporting."""
        if not self._coeffs:
            return mpmath.mpf(0) if self.kind == COMPLEX else Fraction(0)
        return max(abs(c) for c in self._coeffs.values())

    # -- compatibility ------------------------------------------------

    def _require_compatible(self, other):
        if self.cutoff != other.cutoff:
            raise ValueError(
                f"cutoff mismatch: {self.cutoff} vs {other.cutoff}"
            )
        if self.kind != other.kind:
            raise ValueError(f"scalar kind mismatch: {self.kind} vs {other.kind}")

    def _joint_dps(self, other):
        if self.kind == RATIONAL:
            return None
        return min(self.dps, other.dps)

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) or (
            self.kind == COMPLEX and isinstance(other, (float, complex, mpmath.mpc, mpmath.mpf))
        ):
            other = TruncatedSeries(
                self.cutoff, {"": other}, kind=self.kind, dps=self.dps
            )
        self._require_compatible(other)
        coeffs = dict(self._coeffs)
        for word, value in other._coeffs.items():
            coeffs[word] = coeffs.get(word, 0) + value
        return TruncatedSeries(self.cutoff, coeffs, kind=self.kind, dps=self._joint_dps(other))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return self + other.scale(-1)
        return self + (-other)

    def scale(self, scalar):
        coeffs = {w: c * scalar for w, c in self._coeffs.items()}
        return TruncatedSeries(self.cutoff, coeffs, kind=self.kind, dps=self.dps)

    def __mul__(self, other):
        return multiply(self, other)


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Concatenation product, truncated at the common cutoff."""
    a._require_compatible(b)
    coeffs = {}
    cutoff = a.cutoff
    for u, cu in a._coeffs.items():
        for v, cv in b._coeffs.items():
            if len(u) + len(v) > cutoff:
                continue
            w = u + v
            coeffs[w] = coeffs.get(w, 0) + cu * cv
    return TruncatedSeries(cutoff, coeffs, kind=a.kind, dps=a._joint_dps(b))


def exp(u: TruncatedSeries) -> TruncatedSeries:
    """Exponential of a series with zero constant term."""
    if u.constant_term != 0:
        raise ValueError("exp requires zero constant term")
    result = TruncatedSeries.one(u.cutoff, kind=u.kind, dps=u.dps)
    power = result
    for n in range(1, u.cutoff + 1):
        power = multiply(power, u)
        if u.kind == RATIONAL:
            result = result + power.scale(Fraction(1, factorial(n)))
        else:
            result = result + power.scale(mpmath.mpf(1) / factorial(n))
    return result


def log(g: TruncatedSeries) -> TruncatedSeries:
    """Logarithm of a series with constant term 1."""
    if g.constant_term != 1:
        raise ValueError("log requires constant term 1")
    u = g - TruncatedSeries.one(g.cutoff, kind=g.kind, dps=g.dps)
    result = TruncatedSeries.zero(g.cutoff, kind=g.kind, dps=g.dps)
    power = TruncatedSeries.one(g.cutoff, kind=g.kind, dps=g.dps)
    for n in range(1, g.cutoff + 1):
        power = multiply(power, u)
        sign = 1 if n % 2 else -1
        if g.kind == RATIONAL:
            result = result + power.scale(Fraction(sign, n))
        else:
            result = result + power.scale(mpmath.mpf(sign) / n)
    return result


def inverse(g: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a series with invertible constant term."""
    c = g.constant_term
    if c == 0:
        raise ValueError("series with zero constant term is not invertible")
    if g.kind == RATIONAL:
        cinv = Fraction(1) / c
    else:
        cinv = 1 / c
    # g = c(1 - n) with n nilpotent mod cutoff; g^-1 = c^-1 sum n^k.
    n = (TruncatedSeries.one(g.cutoff, kind=g.kind, dps=g.dps) - g.scale(cinv))
    result = TruncatedSeries.one(g.cutoff, kind=g.kind, dps=g.dps)
    power = result
    for _ in range(1, g.cutoff + 1):
        power = multiply(power, n)
        result = result + power
    return result.scale(cinv)


def scalar_power(t, x: TruncatedSeries, log_branch=None) -> TruncatedSeries:
    """t**x = exp(x * log t) for t != 0 and x with zero constant term.

    ``log_branch`` overrides the principal branch of log t.
    """
    if x.constant_term != 0:
        raise ValueError("scalar_power requires zero constant term")
    if x.kind == RATIONAL:
        raise ValueError("scalar_power needs complex scalars (log t is transcendental)")
    if log_branch is None:
        t = mpmath.mpc(t)
        if t == 0:
            raise ValueError("t must be nonzero")
        log_branch = mpmath.log(t)
    return exp(x.scale(log_branch))


def weight_slice(a: TruncatedSeries, m: int) -> TruncatedSeries:
    """Sub-series of weight filtration level m (words with -2*len <= m)."""
    coeffs = {w: c for w, c in a.items() if -2 * len(w) <= m}
    return TruncatedSeries(a.cutoff, coeffs, kind=a.kind, dps=a.dps)


def hodge_slice(a: TruncatedSeries, p: int) -> TruncatedSeries:
    """Sub-series of Hodge filtration level p (words with -len >= p)."""
    coeffs = {w: c for w, c in a.items() if -len(w) >= p}
    return TruncatedSeries(a.cutoff, coeffs, kind=a.kind, dps=a.dps)


def grading_slice(a: TruncatedSeries, *, weight=None, hodge_level=None) -> TruncatedSeries:
    """Slice by the weight and/or Hodge gradings (intersection if both given)."""
    result = a
    if weight is not None:
        result = weight_slice(result, weight)
    if hodge_level is not None:
        result = hodge_slice(result, hodge_level)
    return result


# -- serialization ----------------------------------------------------


def _scalar_to_json(value, kind, dps):
    if kind == RATIONAL:
        return {"re": str(value), "im": "0"}
    with mpmath.workdps(dps):
        return {"re": mpmath.nstr(value.real, dps), "im": mpmath.nstr(value.imag, dps)}


def to_json(series: TruncatedSeries) -> dict:
    terms = []
    for word in series.words():
        entry = {"word": word}
        entry.update(_scalar_to_json(series.coefficient(word), series.kind, series.dps))
        terms.append(entry)
    obj = {"cutoff": series.cutoff, "kind": series.kind, "terms": terms}
    if series.dps is not None:
        obj["dps"] = series.dps
    return obj


def from_json(obj) -> TruncatedSeries:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind", COMPLEX)
    dps = obj.get("dps")
    coeffs = {}
    for term in obj["terms"]:
        if kind == RATIONAL:
            coeffs[term["word"]] = Fraction(term["re"])
        else:
            with mpmath.workdps(dps or mpmath.mp.dps):
                coeffs[term["word"]] = mpmath.mpc(
                    mpmath.mpf(term["re"]), mpmath.mpf(term["im"])
                )
    return TruncatedSeries(obj["cutoff"], coeffs, kind=kind, dps=dps)
