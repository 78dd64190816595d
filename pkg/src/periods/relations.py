"""Integer-relation detection among high-precision reals, and the dimension
count for the weight-graded pieces of Q[Z2] (x) Q<Z3, Z5, Z7, ...>.

Relation detection embeds the values into an integer lattice with the
standard scaling 10^precision and reduces it with an exact LLL over
rationals.  Detected relations are numerics, not proofs: every reported
"dimension" is an upper-bound estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .mzv import zeta
from .words import enumerate_admissible


class PrecisionError(ValueError):
    """Stated precision violates the guard rule for the requested bound."""


def required_precision(n_values: int, bound: int) -> int:
    return int(math.ceil(10 * n_values * math.log10(max(bound, 2))))


@dataclass
class RelationProblem:
    values: list                # mpmath reals, all at ``precision`` digits
    precision: int
    bound: int = 10 ** 6
    labels: list = None

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("coefficient bound must be >= 1")
        self.values = list(self.values)
        if self.labels is None:
            self.labels = [f"v{i}" for i in range(len(self.values))]


# -- exact LLL ---------------------------------------------------------


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _gso(B):
    n = len(B)
    Bstar = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = []
    for i in range(n):
        v = list(B[i])
        for j in range(i):
            if norms[j]:
                mu[i][j] = Fraction(_dot(B[i], Bstar[j]), 1) / norms[j]
                v = [a - mu[i][j] * b for a, b in zip(v, Bstar[j])]
        Bstar.append(v)
        norms.append(_dot(v, v))
    return Bstar, mu, norms


def _nearest_int(f: Fraction) -> int:
    return (2 * f.numerator + f.denominator) // (2 * f.denominator)


def lll_reduce(basis, delta=Fraction(3, 4)):
    """Lenstra–Lenstra–Lovász reduction of integer basis rows (exact).

    Recomputes the Gram–Schmidt data after every change; fine for the small
    dimensions relation problems produce.
    """
    B = [[Fraction(x) for x in row] for row in basis]
    n = len(B)
    if n <= 1:
        return [[int(x) for x in row] for row in B]
    _, mu, norms = _gso(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = _nearest_int(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                _, mu, norms = _gso(B)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            _, mu, norms = _gso(B)
            k = max(k - 1, 1)
    return [[int(x) for x in row] for row in B]


# -- relation finding --------------------------------------------------


def _normalize_sign(coeffs):
    for c in coeffs:
        if c:
            return coeffs if c > 0 else [-x for x in coeffs]
    return coeffs


def find_relation(problem: RelationProblem, evaluator=None):
    """Nonzero integer vector c with |sum c_i v_i| < 10^(-precision/2) and
    max |c_i| <= bound, or None.

    The guard rule precision >= 10 n log10(bound) must hold.  When an
    ``evaluator`` callback (digits -> list of values) is given, any found
    relation is re-verified at doubled precision and must reach a residual
    below 10^(-precision); failing that the relation is discarded.
    """
    n = len(problem.values)
    if n < 2:
        return None
    need = required_precision(n, problem.bound)
    if problem.precision < need:
        raise PrecisionError(
            f"precision {problem.precision} below required {need} for "
            f"{n} values at bound {problem.bound}"
        )
    prec = problem.precision
    with mpmath.workdps(prec + 10):
        scale = mpmath.mpf(10) ** prec
        ints = [int(mpmath.nint(mpmath.mpf(v) * scale)) for v in problem.values]
        rows = [
            [1 if i == j else 0 for j in range(n)] + [ints[i]]
            for i in range(n)
        ]
        reduced = lll_reduce(rows)
        threshold = mpmath.mpf(10) ** (-mpmath.mpf(prec) / 2)
        for row in reduced:
            coeffs = row[:n]
            if not any(coeffs) or max(abs(c) for c in coeffs) > problem.bound:
                continue
            residual = abs(mpmath.fsum(c * mpmath.mpf(v) for c, v in zip(coeffs, problem.values)))
            if residual < threshold:
                coeffs = _normalize_sign(coeffs)
                if evaluator is not None:
                    if not _reverify(coeffs, evaluator, prec):
                        continue
                return coeffs
    return None


def _reverify(coeffs, evaluator, precision):
    fresh = evaluator(2 * precision)
    with mpmath.workdps(2 * precision + 10):
        residual = abs(mpmath.fsum(c * mpmath.mpf(v) for c, v in zip(coeffs, fresh)))
        return residual < mpmath.mpf(10) ** (-precision)


# -- Zagier dimensions -------------------------------------------------


def zagier_dimensions(m_max: int):
    """d_m = d_{m-2} + d_{m-3} with d_0 = 1, d_1 = 0, d_2 = 1: the weight-m
    dimension of the polynomial algebra on Z2 tensored with the free
    associative algebra on Z3, Z5, Z7, ..."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    d = [1, 0, 1]
    while len(d) <= m_max:
        d.append(d[-2] + d[-3])
    return d[: m_max + 1]


def zagier_monomial_count(m: int) -> int:
    """Direct graded enumeration: powers of Z2 times noncommutative words in
    the odd letters Z3, Z5, ... with total weight m."""
    words = [0] * (m + 1)
    words[0] = 1
    for w in range(1, m + 1):
        words[w] = sum(words[w - j] for j in range(3, w + 1, 2))
    return sum(words[m - 2 * a] for a in range(m // 2 + 1))


# -- MZV span experiments ----------------------------------------------


@dataclass
class Relation:
    weight: int
    labels: list
    coefficients: list
    residual: str
    digits: int


@dataclass
class SpanExperiment:
    weight: int
    digits: int
    labels: list
    dimension: int              # numerically independent values (upper bound)
    independent: list           # labels of a spanning subset
    relations: list = field(default_factory=list)


def mzn_span_experiment(weight: int, digits: int = 80, bound: int = 100,
                        cache=None) -> SpanExperiment:
    """Evaluate all admissible MZVs of the given weight and search for
    integer relations incrementally, keeping each relation problem small so
    the precision guard stays satisfiable.

    The detected dimension is compared (by the caller) against the d_m
    bound; no inequality is assumed here.
    """
    indices = enumerate_admissible(weight)
    labels = [str(idx) for idx in indices]
    values = [zeta(idx, digits, cache=cache) for idx in indices]
    independent = []  # (label, value, index)
    relations = []
    for label, value, idx in zip(labels, values, indices):
        trial_vals = [v for _, v, _ in independent] + [value]
        trial_labels = [l for l, _, _ in independent] + [label]
        trial_idx = [i for _, _, i in independent] + [idx]
        # shrink the coefficient bound when needed so the precision guard
        # stays satisfied as the independent set grows
        b_eff = min(bound, int(10 ** (digits / (10 * max(len(trial_vals), 1)))))
        if len(trial_vals) >= 2 and b_eff >= 2:
            problem = RelationProblem(trial_vals, digits, b_eff, trial_labels)

            def evaluator(d, _idx=tuple(trial_idx)):
                return [zeta(i, d, cache=cache) for i in _idx]

            coeffs = find_relation(problem, evaluator=evaluator)
        else:
            coeffs = None
        if coeffs is not None:
            with mpmath.workdps(digits + 10):
                residual = abs(
                    mpmath.fsum(c * v for c, v in zip(coeffs, trial_vals))
                )
                relations.append(
                    Relation(weight, trial_labels, list(coeffs),
                             mpmath.nstr(residual, 3), digits)
                )
        else:
            independent.append((label, value, idx))
    return SpanExperiment(
        weight, digits, labels, len(independent),
        [l for l, _, _ in independent], relations,
    )
