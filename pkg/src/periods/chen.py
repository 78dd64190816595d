"""Parallel transport of the generating series of iterated integrals on the
thrice-punctured line, and the regularized associator.

The series T(path) = 1 + sum over words of (iterated integral of the word's
forms) X_word is computed by subdividing the path into short straight pieces
and solving the coefficient recursion with a local power-series step on each
piece: on a piece the two integrand forms have geometric Taylor expansions
around the midpoint, and the coefficient of each word is the antiderivative
of (prefix coefficient) * (form of the last letter).

Composition order is "first alpha, then beta" with T(alpha beta) =
T(alpha) T(beta); letter 0 stands for dz/z and letter 1 for dz/(1-z),
listed in integration order from the start of the path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from . import freealg
from .freealg import COMPLEX, TruncatedSeries

SPLIT_FACTOR = 4       # accept a piece when |h| <= dist/SPLIT_FACTOR (ratio 1/8)
SINGULARITIES = (0.0, 1.0)


class PathError(ValueError):
    """Path touches or comes indistinguishably close to 0 or 1."""


# -- path specifications ----------------------------------------------


@dataclass(frozen=True)
class LineArc:
    start: complex
    end: complex

    def endpoints(self):
        return complex(self.start), complex(self.end)

    def to_chords(self):
        return [(complex(self.start), complex(self.end))]


@dataclass(frozen=True)
class CircleArc:
    center: complex
    radius: float
    angle_start: float
    angle_end: float

    def point(self, angle):
        return complex(self.center) + self.radius * complex(
            math.cos(angle), math.sin(angle)
        )

    def endpoints(self):
        return self.point(self.angle_start), self.point(self.angle_end)

    def to_chords(self):
        span = self.angle_end - self.angle_start
        n = max(2, int(math.ceil(abs(span) / (2 * math.atan(1.0 / 8)))))
        angles = [self.angle_start + span * i / n for i in range(n + 1)]
        points = [self.point(a) for a in angles]
        if abs(abs(span) - 2 * math.pi) < 1e-12:
            # full turn: close the polygon exactly despite rounding in cos/sin
            points[-1] = points[0]
        chords = []
        for i, (a0, a1) in enumerate(zip(angles, angles[1:])):
            self._check_chord_safe(a0, a1)
            chords.append((points[i], points[i + 1]))
        return chords

    def _check_chord_safe(self, a0, a1):
        """The lens between the arc and its chord must avoid 0 and 1, so the
        chord stays homotopic to the arc."""
        z0, z1 = self.point(a0), self.point(a1)
        za = self.point((a0 + a1) / 2)
        for p in SINGULARITIES:
            if abs(p - self.center) > self.radius + 1e-15:
                continue
            side = lambda z: ((z1 - z0).conjugate() * (z - z0)).imag
            if side(p) * side(za) > 0:
                raise PathError(
                    f"singular point {p} lies between a circular arc and its chord"
                )


@dataclass(frozen=True)
class PathSpec:
    """Piecewise path: a list of LineArc / CircleArc with matching endpoints."""

    arcs: tuple

    def __post_init__(self):
        arcs = tuple(self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if not arcs:
            raise PathError("empty path")
        for prev, nxt in zip(arcs, arcs[1:]):
            if abs(prev.endpoints()[1] - nxt.endpoints()[0]) > 1e-12:
                raise PathError("consecutive arcs do not share endpoints")
        for arc in arcs:
            for z in arc.endpoints():
                if min(abs(z - p) for p in SINGULARITIES) < 1e-300:
                    raise PathError("path endpoint hits a singular point")

    @classmethod
    def segment(cls, a, b):
        return cls((LineArc(a, b),))

    @classmethod
    def circle(cls, center, radius, base_angle=0.0, orientation=1):
        span = 2 * math.pi * (1 if orientation >= 0 else -1)
        return cls((CircleArc(center, radius, base_angle, base_angle + span),))

    def chords(self):
        out = []
        for arc in self.arcs:
            out.extend(arc.to_chords())
        return out


def path_from_json(obj) -> PathSpec:
    arcs = []
    for piece in obj["path"]:
        if piece["type"] == "line":
            arcs.append(
                LineArc(complex(*piece["from"]), complex(*piece["to"]))
            )
        elif piece["type"] == "arc":
            arcs.append(
                CircleArc(
                    complex(*piece["center"]),
                    float(piece["radius"]),
                    float(piece["from_angle"]),
                    float(piece["to_angle"]),
                )
            )
        else:
            raise ValueError(f"unknown path piece type {piece['type']!r}")
    return PathSpec(tuple(arcs))


# -- transport --------------------------------------------------------


def _subdivide(a, b, out, depth=0):
    """Split (a, b) until each piece is short against its distance to 0, 1."""
    if depth > 64:
        raise PathError("path passes too close to a singular point")
    m = (a + b) / 2
    d = min(abs(m), abs(1 - m))
    if d == 0:
        raise PathError("path passes through a singular point")
    h = abs(b - a)
    if h <= d / SPLIT_FACTOR or h < 1e-300:
        out.append((a, b))
        return
    _subdivide(a, m, out, depth + 1)
    _subdivide(m, b, out, depth + 1)


def _all_words(cutoff):
    words = [""]
    frontier = [""]
    for _ in range(cutoff):
        frontier = [w + c for w in frontier for c in "01"]
        words.extend(frontier)
    return words


def _segment_coefficients(a, b, words, nterms):
    """Iterated integrals of all words along the straight piece a -> b.

    Works at the ambient mpmath precision.  The form of letter 0 pulls back
    to (h/m) sum (-h/m s)^n and letter 1 to (h/(1-m)) sum (h/(1-m) s)^n with
    s in [-1/2, 1/2]; multiplying a polynomial by a geometric series is a
    first-order recursion, so each word costs O(nterms).
    """
    a, b = mpmath.mpc(a), mpmath.mpc(b)
    m = (a + b) / 2
    h = b - a
    geom = {
        "0": (h / m, -h / m),
        "1": (h / (1 - m), h / (1 - m)),
    }
    half = mpmath.mpf(1) / 2
    zero = mpmath.mpc(0)
    polys = {"": [mpmath.mpc(1)] + [zero] * (nterms - 1)}
    coeffs = {}
    for w in words:
        if not w:
            continue
        p = polys[w[:-1]]
        A, B = geom[w[-1]]
        # r = p * geometric(A, B), truncated
        r = [zero] * nterms
        acc = zero
        for n in range(nterms):
            acc = B * acc + A * p[n]
            r[n] = acc
        # antiderivative q with q(-1/2) = 0
        q = [zero] * nterms
        for n in range(nterms - 1):
            q[n + 1] = r[n] / (n + 1)
        sneg = -half
        val = zero
        power = mpmath.mpc(1)
        for n in range(nterms):
            if n:
                power *= sneg
            val += q[n] * power
        q[0] = -val
        polys[w] = q
        # value at s = +1/2
        val = zero
        power = mpmath.mpc(1)
        for n in range(nterms):
            if n:
                power *= half
            val += q[n] * power
        coeffs[w] = val
    return coeffs


def transport(path, cutoff: int, digits: int = 15) -> TruncatedSeries:
    """Generating series of iterated integrals along the path.

    ``path`` is a PathSpec, a pair (a, b) for a straight segment, or a list
    of polyline vertices.  The result is group-like with constant term 1.
    """
    if isinstance(path, PathSpec):
        chords = path.chords()
    elif isinstance(path, (tuple, list)) and len(path) == 2 and not isinstance(path[0], (tuple, list)):
        chords = [(complex(path[0]), complex(path[1]))]
    else:
        vertices = [complex(z) for z in path]
        chords = list(zip(vertices, vertices[1:]))
    dps = digits + 8
    with mpmath.workdps(dps):
        pieces = []
        for a, b in chords:
            _subdivide(mpmath.mpc(a), mpmath.mpc(b), pieces)
        nterms = int(math.ceil((digits + 8) * math.log(10) / math.log(8))) + 4
        words = _all_words(cutoff)
        total = TruncatedSeries.one(cutoff, kind=COMPLEX, dps=dps)
        for a, b in pieces:
            seg = _segment_coefficients(a, b, words, nterms)
            seg[""] = mpmath.mpc(1)
            total = freealg.multiply(
                total, TruncatedSeries(cutoff, seg, kind=COMPLEX, dps=dps)
            )
    return total


def check_grouplike(series: TruncatedSeries, max_total=None):
    """Largest violation of the shuffle identity on coefficients."""
    from .words import shuffle

    cutoff = series.cutoff if max_total is None else min(series.cutoff, max_total)
    worst = mpmath.mpf(0)
    words = [w for w in _all_words(cutoff) if w]
    for u in words:
        for v in words:
            if len(u) + len(v) > cutoff:
                continue
            lhs = series.coefficient(u) * series.coefficient(v)
            rhs = mpmath.mpc(0)
            for w, mult in shuffle(u, v).items():
                rhs += mult * series.coefficient(w)
            worst = max(worst, abs(lhs - rhs))
    return worst


# -- regularized limits at the cusps ----------------------------------


def _power_series(t, letter, cutoff, dps, inverse=False):
    gen = TruncatedSeries.generator(letter, cutoff, kind=COMPLEX, dps=dps)
    logt = mpmath.log(mpmath.mpf(t))
    if inverse:
        logt = -logt
    return freealg.scalar_power(None, gen, log_branch=logt)


def _extrapolate(values, stages_pow1, ratio_log=2, ratio_sq=4):
    """Sequence transformation for f(j) = limit + 2^-j poly(j) + 4^-j poly(j).

    Each first-stage step 2 f(j+1) - f(j) lowers the polynomial degree of
    the 2^-j block and kills it after deg+1 steps; remaining steps
    (4 f(j+1) - f(j)) / 3 attack the 4^-j block.  Constants are preserved.
    """
    seq = list(values)
    for _ in range(min(stages_pow1, len(seq) - 1)):
        seq = [b.scale(ratio_log) - a for a, b in zip(seq, seq[1:])]
    while len(seq) > 1:
        seq = [
            (b.scale(ratio_sq) - a).scale(mpmath.mpf(1) / (ratio_sq - 1))
            for a, b in zip(seq, seq[1:])
        ]
    return seq[-1]


@dataclass
class RegularizedLimit:
    series: TruncatedSeries       # extrapolated limit
    js: list                      # exponents: t_j = 2^-j
    raw: list                     # un-extrapolated series at each t_j
    residuals: list               # max coefficient deviation from the limit
    shape_ratios: list            # residual / (t log^cutoff(1/t))

    @property
    def converged(self):
        tail = self.residuals[-3:]
        return all(y <= x * 1.5 + 1e-30 for x, y in zip(tail, tail[1:]))


def _limit_with_diagnostics(series_at, cutoff, digits, js):
    dps = digits + 8
    with mpmath.workdps(dps):
        raw = [series_at(mpmath.mpf(2) ** -j, dps) for j in js]
        stages = cutoff + 1
        limit = _extrapolate(raw, stages)
        residuals = []
        ratios = []
        for j, series in zip(js, raw):
            diff = series - limit
            res = diff.max_abs()
            residuals.append(res)
            t = mpmath.mpf(2) ** -j
            L = mpmath.log(1 / t)
            ratios.append(res / (t * L ** cutoff))
        return RegularizedLimit(limit, list(js), raw, residuals, ratios)


def associator(cutoff: int, digits: int = 15, j_max: int = 20,
               extra_samples: int = 3) -> RegularizedLimit:
    """Regularized limit of t^{X0} T([t, 1-t]) t^{X1} as t -> 0.

    Samples t = 2^-j for a window of j ending at ``j_max`` and applies the
    sequence transformation that annihilates the t * poly(log t) defect; the
    residual of the raw samples follows the t log^k(1/t) bound shape.
    """
    n = cutoff + 1 + extra_samples
    js = list(range(max(1, j_max - n + 1), j_max + 1))

    def phi_at(t, dps):
        T = transport((t, 1 - t), cutoff, digits)
        left = _power_series(t, 0, cutoff, dps)
        right = _power_series(t, 1, cutoff, dps)
        return freealg.multiply(freealg.multiply(left, T), right)

    return _limit_with_diagnostics(phi_at, cutoff, digits, js)


def local_monodromy(cusp: int, cutoff: int, digits: int = 15, j_max: int = 16,
                    extra_samples: int = 3, orientation: int = 1):
    """Regularized transport around a small positively oriented circle at a
    cusp, with the exact exponential it converges to.

    Returns (limit: RegularizedLimit, exact: TruncatedSeries).  With the
    counterclockwise orientation the loop at 0 gives exp(2 pi i X0) and the
    loop at 1 gives exp(-2 pi i X1); this orientation pairing is a recorded
    convention, verified in tests against the conjugation identity.
    """
    if cusp not in (0, 1):
        raise ValueError("cusp must be 0 or 1")
    n = cutoff + 1 + extra_samples
    js = list(range(max(2, j_max - n + 1), j_max + 1))

    def loop_at(t, dps):
        if cusp == 0:
            path = PathSpec.circle(0.0, float(t), base_angle=0.0,
                                   orientation=orientation)
            C = transport(path, cutoff, digits)
            left = _power_series(t, 0, cutoff, dps)
            right = _power_series(t, 0, cutoff, dps, inverse=True)
        else:
            path = PathSpec.circle(1.0, float(t), base_angle=math.pi,
                                   orientation=orientation)
            C = transport(path, cutoff, digits)
            left = _power_series(t, 1, cutoff, dps, inverse=True)
            right = _power_series(t, 1, cutoff, dps)
        return freealg.multiply(freealg.multiply(left, C), right)

    limit = _limit_with_diagnostics(loop_at, cutoff, digits, js)
    dps = digits + 8
    with mpmath.workdps(dps):
        sign = 1 if cusp == 0 else -1
        gen = TruncatedSeries.generator(cusp, cutoff, kind=COMPLEX, dps=dps)
        exact = freealg.exp(
            gen.scale(sign * orientation * 2j * mpmath.pi)
        )
    return limit, exact


def conjugated_monodromy(cutoff: int, digits: int = 15, j_max: int = 20,
                         extra_samples: int = 3, orientation: int = 1) -> RegularizedLimit:
    """Regularized transport of the loop [0,1] * (circle at 1) * [0,1]^{-1},
    based at the 0-cusp.

    With the counterclockwise circle this converges to
    Phi exp(-2 pi i X1) Phi^{-1}; with orientation = -1 (clockwise) the
    exponent flips sign.
    """
    n = cutoff + 1 + extra_samples
    js = list(range(max(2, j_max - n + 1), j_max + 1))

    def loop_at(t, dps):
        T = transport((t, 1 - t), cutoff, digits)
        circle = PathSpec.circle(1.0, float(t), base_angle=math.pi,
                                 orientation=orientation)
        inner = freealg.multiply(
            freealg.multiply(T, transport(circle, cutoff, digits)),
            freealg.inverse(T),
        )
        left = _power_series(t, 0, cutoff, dps)
        right = _power_series(t, 0, cutoff, dps, inverse=True)
        return freealg.multiply(freealg.multiply(left, inner), right)

    return _limit_with_diagnostics(loop_at, cutoff, digits, js)
