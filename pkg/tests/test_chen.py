import math
import random

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from periods import chen, freealg, mzv
from periods.chen import (
    CircleArc,
    LineArc,
    PathError,
    PathSpec,
    associator,
    check_grouplike,
    local_monodromy,
    path_from_json,
    transport,
)
from periods.words import parse_index


# -- oracle: direct numerical iterated integrals -----------------------


def _form(letter, z):
    return 1 / z if letter == "0" else 1 / (1 - z)


def _iterated_integral(word, a, b):
    """Recursive quadrature oracle for the coefficient of ``word`` on the
    straight segment [a, b]: the leftmost letter is integrated at the
    smallest time.  Only practical for short words."""
    if not word:
        return 1.0 + 0.0j
    head, rest = word[0], word[1:]

    def integrand(s, part):
        z = a + (b - a) * s
        inner = _iterated_integral(rest, z, b)
        val = _form(head, z) * (b - a) * inner
        return val.real if part == "re" else val.imag

    re, _ = quad(lambda s: integrand(s, "re"), 0, 1, limit=200)
    im, _ = quad(lambda s: integrand(s, "im"), 0, 1, limit=200)
    return complex(re, im)


@pytest.mark.parametrize("a,b", [(0.2, 0.7), (0.3 + 0.2j, 0.6 - 0.1j)])
def test_segment_coefficients_match_quadrature(a, b):
    series = transport((a, b), 2, digits=15)
    for word in ["0", "1", "00", "01", "10", "11"]:
        oracle = _iterated_integral(word, complex(a), complex(b))
        got = complex(series.coefficient(word))
        assert abs(got - oracle) < 1e-9, word


def test_depth_one_is_logarithm():
    a, b = 0.25, 0.75
    series = transport((a, b), 1, digits=20)
    assert abs(complex(series.coefficient("0")) - math.log(b / a)) < 1e-18
    assert abs(
        complex(series.coefficient("1")) - math.log((1 - a) / (1 - b))
    ) < 1e-18


def test_path_composition_under_random_subdivision():
    """T(alpha * beta) = T(alpha) T(beta): splitting the path anywhere and
    multiplying the pieces reproduces the one-shot series."""
    rng = random.Random(7)
    a, b = 0.1, 0.9
    with mpmath.workdps(40):
        whole = transport((a, b), 5, digits=30)
        tol = mpmath.mpf(10) ** -25
        for _ in range(10):
            mid = a + (b - a) * rng.uniform(0.1, 0.9)
            prod = freealg.multiply(
                transport((a, mid), 5, digits=30),
                transport((mid, b), 5, digits=30),
            )
            assert (whole - prod).max_abs() < tol


def test_transport_is_grouplike():
    with mpmath.workdps(30):
        series = transport((0.2, 0.8), 4, digits=20)
        assert check_grouplike(series) < mpmath.mpf(10) ** -18


def test_constant_term_and_inverse():
    with mpmath.workdps(30):
        fwd = transport((0.3, 0.6), 3, digits=20)
        back = transport((0.6, 0.3), 3, digits=20)
        assert abs(fwd.coefficient("") - 1) < mpmath.mpf(10) ** -18
        one = freealg.multiply(fwd, back)
        ident = freealg.TruncatedSeries.one(3, kind=freealg.COMPLEX,
                                            dps=one.dps)
        assert (one - ident).max_abs() < mpmath.mpf(10) ** -18


def test_polyline_detour_agrees_with_segment():
    with mpmath.workdps(30):
        direct = transport((0.2, 0.8), 3, digits=20)
        detour = transport([0.2, 0.5 + 0.3j, 0.8], 3, digits=20)
        # both paths are homotopic in C - {0, 1}
        assert (direct - detour).max_abs() < mpmath.mpf(10) ** -18


def test_straight_integral_gives_zeta2():
    # coefficient of "10" on [t, 1-t] tends to zeta(2)
    lim = associator(2, digits=15, j_max=18)
    target = mzv.zeta(parse_index("2"), 20)
    assert abs(lim.series.coefficient("10") - target) < 1e-10


# -- paths -------------------------------------------------------------


def test_pathspec_validates_continuity():
    with pytest.raises(PathError):
        PathSpec((LineArc(0.2, 0.5), LineArc(0.6, 0.8)))


def test_pathspec_rejects_singular_endpoint():
    with pytest.raises(PathError):
        PathSpec.segment(0.0, 0.5)
    with pytest.raises(PathError):
        transport((0.2, 1.0), 2)


def test_path_through_singularity_rejected():
    with pytest.raises(PathError):
        transport((-0.5, 0.5), 2)


def test_circle_chords_avoid_enclosed_singularity():
    path = PathSpec.circle(0.0, 0.25)
    start = path.arcs[0].endpoints()[0]
    chords = path.chords()
    # closed chain of chords returning to the start
    assert abs(chords[0][0] - start) < 1e-12
    assert abs(chords[-1][1] - start) < 1e-12
    for a, b in chords:
        # the chord must stay on the far side of the center
        assert min(abs(a), abs(b)) > 0.2


def test_circle_winding_number():
    # integral of dz/z over a ccw circle at 0 is 2 pi i
    with mpmath.workdps(30):
        series = transport(PathSpec.circle(0.0, 0.3), 2, digits=20)
        assert abs(series.coefficient("0") - 2j * mpmath.pi) < mpmath.mpf(10) ** -18
        cw = transport(PathSpec.circle(0.0, 0.3, orientation=-1), 2, digits=20)
        assert abs(cw.coefficient("0") + 2j * mpmath.pi) < mpmath.mpf(10) ** -18


def test_path_json_roundtrip():
    with pytest.raises(ValueError):
        path_from_json({"path": [{"type": "bezier"}]})
    simple = path_from_json({"path": [
        {"type": "line", "from": [0.2, 0.0], "to": [0.8, 0.0]}]})
    assert isinstance(simple, PathSpec)
    series = transport(simple, 2, digits=15)
    assert abs(series.coefficient("0") - math.log(4)) < 1e-12


# -- regularized limits ------------------------------------------------


def test_associator_low_coefficients():
    lim = associator(3, digits=15, j_max=18)
    phi = lim.series
    # group-like with no linear part and zeta(2) in degree 2
    assert abs(phi.coefficient("")) - 1 < 1e-12
    assert abs(phi.coefficient("0")) < 1e-10
    assert abs(phi.coefficient("1")) < 1e-10
    z2 = mzv.zeta(parse_index("2"), 20)
    assert abs(phi.coefficient("10") - z2) < 1e-10
    assert abs(phi.coefficient("01") + z2) < 1e-10


def test_associator_degree_three_values():
    lim = associator(3, digits=15, j_max=18)
    z3 = mzv.zeta(parse_index("3"), 20)
    assert abs(lim.series.coefficient("100") - z3) < 1e-9
    # duality: the double value at "110" equals zeta(3) as well
    assert abs(lim.series.coefficient("110") - z3) < 1e-9


def test_associator_residual_shape():
    """Raw samples approach the limit like t log^k(1/t): the ratio
    residual / (t log^k(1/t)) stays bounded as t -> 0."""
    lim = associator(3, digits=15, j_max=18, extra_samples=5)
    ratios = [float(r) for r in lim.shape_ratios]
    assert max(ratios) < 10 * min(r for r in ratios if r > 0)
    assert lim.converged


def test_monodromy_at_zero():
    lim, exact = local_monodromy(0, 3, digits=15)
    assert (lim.series - exact).max_abs() < mpmath.mpf(10) ** -8
    # exact series really is exp(2 pi i X0)
    assert abs(exact.coefficient("0") - 2j * mpmath.pi) < 1e-15
    assert abs(exact.coefficient("00") - (2j * mpmath.pi) ** 2 / 2) < 1e-13
    assert abs(exact.coefficient("1")) == 0


def test_monodromy_at_one():
    lim, exact = local_monodromy(1, 3, digits=15)
    assert (lim.series - exact).max_abs() < mpmath.mpf(10) ** -8
    assert abs(exact.coefficient("1") + 2j * mpmath.pi) < 1e-15


def test_monodromy_orientation_flip():
    _, ccw = local_monodromy(0, 2, digits=15, j_max=10, extra_samples=0)
    _, cw = local_monodromy(0, 2, digits=15, j_max=10, extra_samples=0,
                            orientation=-1)
    assert abs(ccw.coefficient("0") + cw.coefficient("0")) < 1e-15


def test_conjugation_identity():
    """The loop around 1 based at 0 equals Phi exp(-2 pi i X1) Phi^{-1}."""
    cutoff, digits = 3, 15
    conj = chen.conjugated_monodromy(cutoff, digits=digits, j_max=16)
    phi = associator(cutoff, digits=digits, j_max=18).series
    dps = phi.dps
    with mpmath.workdps(dps):
        gen = freealg.TruncatedSeries.generator(
            1, cutoff, kind=freealg.COMPLEX, dps=dps)
        expected = freealg.multiply(
            freealg.multiply(phi, freealg.exp(gen.scale(-2j * mpmath.pi))),
            freealg.inverse(phi),
        )
        assert (conj.series - expected).max_abs() < mpmath.mpf(10) ** -8


def test_invalid_cusp():
    with pytest.raises(ValueError):
        local_monodromy(2, 2)
