"""Regularization of tv'(t) = v(t) A(t) at a regular singular point with
nilpotent leading coefficient.

Solutions are row vectors acted on from the right: every local solution has
the form v(t) = v0 t^{A0} P(t) with P holomorphic and P(0) = I.  The
conjugated monodromy logarithm is N(t) = P(t)^{-1} A0 P(t), and the frame
v(t) t^{-N(t)} = v0 P(t) extends over the puncture; the residue of the
extended connection is -A0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .linfilt import (
    NotNilpotentError,
    mat_add,
    mat_identity,
    mat_is_zero,
    mat_mul,
    mat_scale,
    nilpotency_index,
)


@dataclass
class MatrixSeries:
    """Matrix-valued polynomial-truncated power series sum A_n t^n.

    Coefficients are square matrices over Fraction (exact) or floats; the
    constant term must be nilpotent.
    """

    coefficients: list

    def __post_init__(self):
        coeffs = []
        for matrix in self.coefficients:
            coeffs.append([[Fraction(x) if not isinstance(x, Fraction) else x for x in row] for row in matrix])
        self.coefficients = coeffs
        self.dim = len(coeffs[0])
        nilpotency_index(self.leading)  # raises NotNilpotentError

    @property
    def leading(self):
        return self.coefficients[0]

    @property
    def order(self):
        return len(self.coefficients) - 1

    def truncated(self, order):
        coeffs = self.coefficients[: order + 1]
        while len(coeffs) <= order:
            coeffs = coeffs + [
                [[Fraction(0)] * self.dim for _ in range(self.dim)]
            ]
        return MatrixSeries(coeffs)

    def numeric(self):
        return [np.array(c, dtype=float) for c in self.coefficients]

    def eval(self, t):
        t = complex(t)
        total = np.zeros((self.dim, self.dim), dtype=complex)
        tn = 1.0
        for c in self.coefficients:
            total += tn * np.array(c, dtype=float)
            tn *= t
        return total


def _ad(A0, X):
    return mat_add(mat_mul(A0, X), mat_scale(mat_mul(X, A0), Fraction(-1)))


def _invert_shifted_ad(A0, n, rhs, ad_nilpotency):
    """(n + ad_{A0})^{-1} rhs via the finite Neumann series."""
    n = Fraction(n)
    result = [[Fraction(0)] * len(rhs) for _ in rhs]
    term = mat_scale(rhs, Fraction(1) / n)
    for _ in range(ad_nilpotency):
        result = mat_add(result, term)
        term = mat_scale(_ad(A0, term), Fraction(-1) / n)
        if mat_is_zero(term):
            break
    return result


def regularize(A: MatrixSeries, order=None) -> MatrixSeries:
    """The unique holomorphic P with P(0) = I and v0 t^{A0} P(t) solving the
    equation through the truncation order.

    P_n solves (n + ad_{A0}) P_n = sum_{j=1..n} P_{n-j} A_j; the operator is
    invertible because ad_{A0} is nilpotent.
    """
    if order is None:
        order = A.order
    A = A.truncated(order)
    A0 = A.leading
    d = A.dim
    ad_nilpotency = 2 * nilpotency_index(A0)  # ad index <= 2k-1
    P = [mat_identity(d)]
    for n in range(1, order + 1):
        rhs = [[Fraction(0)] * d for _ in range(d)]
        for j in range(1, n + 1):
            rhs = mat_add(rhs, mat_mul(P[n - j], A.coefficients[j]))
        P.append(_invert_shifted_ad(A0, n, rhs, ad_nilpotency))
    series = MatrixSeries.__new__(MatrixSeries)
    series.coefficients = P
    series.dim = d
    return series


def ode_defect(A: MatrixSeries, P: MatrixSeries):
    """Coefficients of A0 P + t P' - P A through the truncation order.

    Exactly zero (as Fractions) when P = regularize(A).
    """
    order = min(A.order, P.order)
    A0 = A.leading
    defects = []
    for n in range(order + 1):
        term = mat_add(mat_mul(A0, P.coefficients[n]), mat_scale(P.coefficients[n], Fraction(n)))
        for j in range(n + 1):
            term = mat_add(term, mat_scale(mat_mul(P.coefficients[n - j], A.coefficients[j]), Fraction(-1)))
        defects.append(term)
    return defects


def _nilpotent_power(A0_num, log_t):
    """exp(A0 log t) as a finite sum for nilpotent A0."""
    d = len(A0_num)
    total = np.eye(d, dtype=complex)
    term = np.eye(d, dtype=complex)
    for j in range(1, d + 1):
        term = term @ A0_num * (log_t / j)
        if not np.any(term):
            break
        total = total + term
    return total


def scalar_matrix_power(t, A0, log_branch=None):
    """t^{A0} = exp(A0 log t) for nilpotent A0 (principal branch default)."""
    t = complex(t)
    if t == 0:
        raise ValueError("t must be nonzero")
    log_t = np.log(t) if log_branch is None else log_branch
    return _nilpotent_power(np.array(A0, dtype=float), log_t)


def eval_series(P: MatrixSeries, t):
    t = complex(t)
    total = np.zeros((P.dim, P.dim), dtype=complex)
    tn = 1.0 + 0j
    for c in P.coefficients:
        total = total + tn * np.array(c, dtype=float)
        tn *= t
    return total


def truncation_remainder(P: MatrixSeries, t):
    """Crude remainder estimate: max-row-sum norm of the last kept term."""
    last = np.array(P.coefficients[-1], dtype=float)
    return _row_sum_norm(last) * abs(t) ** P.order


def _row_sum_norm(M):
    return float(np.max(np.sum(np.abs(M), axis=1))) if M.size else 0.0


def monodromy_log(A: MatrixSeries, t, P: MatrixSeries = None, tolerance=1e-6):
    """N(t) = P(t)^{-1} A0 P(t); nilpotent of the same index as A0.

    Returns (N_t, warning) where warning is a remainder bound message when
    |t| is too large for the truncation.
    """
    if P is None:
        P = regularize(A)
    Pt = eval_series(P, t)
    A0 = np.array(A.leading, dtype=float)
    Nt = np.linalg.solve(Pt, A0 @ Pt)
    warning = None
    remainder = truncation_remainder(P, t)
    if remainder > tolerance:
        warning = (
            f"truncation remainder estimate {remainder:.3g} exceeds "
            f"{tolerance:.3g} at |t| = {abs(t):.3g}"
        )
    return Nt, warning


def solution_at(v0, A: MatrixSeries, t, P: MatrixSeries = None):
    """v(t) = v0 t^{A0} P(t) (row vector)."""
    if P is None:
        P = regularize(A)
    v0 = np.array(v0, dtype=complex)
    tA0 = scalar_matrix_power(t, A.leading)
    return v0 @ tA0 @ eval_series(P, t)


@dataclass
class LimitReport:
    limit: np.ndarray
    samples: list       # t values
    residuals: list     # ||v(t) t^{-A0} - v0||_inf
    bound_ratios: list  # residual / (|t| log^k(1/|t|))
    converged: bool

    @property
    def fitted_constant(self):
        return max(self.bound_ratios) if self.bound_ratios else 0.0


def regularized_limit(v0, A: MatrixSeries, ray_angle=0.0, samples=None,
                      P: MatrixSeries = None) -> LimitReport:
    """Evaluate v(t) t^{-A0} along an angular ray and confirm convergence to
    v0 at the |t| log^k(1/|t|) rate."""
    if P is None:
        P = regularize(A)
    if samples is None:
        samples = [2.0 ** -j for j in range(4, 14)]
    radii = sorted((abs(complex(s)) for s in samples), reverse=True)
    v0 = np.array(v0, dtype=complex)
    k = nilpotency_index(A.leading) - 1
    residuals = []
    ratios = []
    ts = []
    phase = np.exp(1j * ray_angle)
    for r in radii:
        t = r * phase
        vt = solution_at(v0, A, t, P=P)
        approx = vt @ _nilpotent_power(
            np.array(A.leading, dtype=float), -(np.log(r) + 1j * ray_angle)
        )
        res = float(np.max(np.abs(approx - v0)))
        residuals.append(res)
        L = np.log(1.0 / r)
        ratios.append(res / (r * max(L, 1.0) ** k) if r < 1 else res)
        ts.append(t)
    converged = all(
        residuals[i + 1] <= residuals[i] + 1e-15 for i in range(len(residuals) - 1)
    )
    return LimitReport(v0, ts, residuals, ratios, converged)


def connection_residue(A: MatrixSeries):
    """Residue of the connection in the regularized frame: -A0."""
    return mat_scale(A.leading, Fraction(-1))
