"""Validators and constructors for Hodge structures, polarizations, mixed
Hodge structures, period matrices, nilpotent-orbit limits, extension classes,
and Hodge-norm growth fits.

Subspaces of the complexified lattice are row matrices of basis vectors in
lattice coordinates.  Operators act on column vectors (matching the exact
linear algebra in linfilt), so the image of a row-basis B under an operator
M is B @ M.T.  Float data is compared at relative tolerance 1e-8; the weight
filtration side stays exact over the rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linfilt
from .linfilt import (
    IndexedFiltration,
    PropertyReport,
    RationalSubspace,
    weight_filtration,
)

TOL = 1e-8


# -- numeric subspace helpers -----------------------------------------


def _rows(M):
    A = np.array(M, dtype=complex)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.size == 0:
        A = A.reshape(0, A.shape[-1] if A.ndim == 2 else 0)
    return A


def _scale_of(*mats):
    return max([1.0] + [float(np.max(np.abs(M))) for M in mats if M.size])


def _orth(B):
    """Orthonormal row basis of the row space."""
    B = _rows(B)
    if B.shape[0] == 0 or not np.any(B):
        return np.zeros((0, B.shape[1]), dtype=complex)
    u, s, vh = np.linalg.svd(B, full_matrices=False)
    rank = int(np.sum(s > TOL * max(1.0, s[0])))
    return vh[:rank]

def _rank(B):
    return _orth(B).shape[0]


def _contains_rows(B, V):
    """Max relative residual of rows of V against the row space of B."""
    Q = _orth(B)
    V = _rows(V)
    if V.shape[0] == 0:
        return 0.0
    resid = V - (V @ Q.conj().T) @ Q
    scale = _scale_of(V)
    return float(np.max(np.abs(resid))) / scale


def _subspace_leq(A, B):
    return _contains_rows(B, A) < TOL


def _subspaces_equal(A, B):
    return _subspace_leq(A, B) and _subspace_leq(B, A)


def _intersect_rows(A, B):
    """Row basis of rowspace(A) ∩ rowspace(B)."""
    A, B = _orth(A), _orth(B)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, max(A.shape[1], B.shape[1])), dtype=complex)
    M = np.vstack([A, -B])
    # rows c with c @ M = 0; split c = (cA, cB) gives cA @ A = cB @ B
    u, s, vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > TOL * max(1.0, s[0] if s.size else 1.0)))
    left_null = u[:, rank:].T.conj()
    a = A.shape[0]
    return _orth(left_null[:, :a] @ A)


# -- pure Hodge structures --------------------------------------------


@dataclass
class HodgeData:
    """Weight-k bigrading: map (p, q) with p+q=k to row bases of V^{p,q}
    inside the complexified lattice (identity lattice by convention)."""

    weight: int
    pieces: dict
    rank: int = None

    def __post_init__(self):
        self.pieces = {
            tuple(k): _rows(v) for k, v in self.pieces.items()
        }
        if self.rank is None:
            self.rank = next(iter(self.pieces.values())).shape[1]

    def filtration(self):
        """F^p = sum of V^{s, k-s} over s >= p, as a dict p -> row basis."""
        ps = sorted({p for p, _ in self.pieces}, reverse=True)
        out = {}
        acc = np.zeros((0, self.rank), dtype=complex)
        for p in ps:
            blocks = [b for (s, _), b in self.pieces.items() if s == p]
            acc = np.vstack([acc] + blocks)
            out[p] = acc
        return out


def validate_hodge(h: HodgeData) -> PropertyReport:
    checks = []
    k = h.weight
    bad = [key for key in h.pieces if key[0] + key[1] != k]
    checks.append(
        ("types sum to the weight", not bad,
         None if not bad else f"piece {bad[0]} has p+q != {k}")
    )
    stacked = np.vstack([b for b in h.pieces.values()]) if h.pieces else _rows([])
    span_rank = _rank(stacked)
    checks.append(
        ("pieces span the whole space", span_rank == h.rank,
         None if span_rank == h.rank else f"span has rank {span_rank} < {h.rank}")
    )
    dim_sum = sum(_rank(b) for b in h.pieces.values())
    checks.append(
        ("sum is direct", dim_sum == span_rank,
         None if dim_sum == span_rank
         else f"piece dimensions add to {dim_sum}, joint span has rank {span_rank}")
    )
    for (p, q), b in sorted(h.pieces.items()):
        partner = h.pieces.get((q, p))
        ok = partner is not None and _subspaces_equal(np.conj(b), partner)
        checks.append(
            (f"conjugate of V^({p},{q}) is V^({q},{p})", ok,
             None if ok else f"conj V^({p},{q}) != V^({q},{p})")
        )
    F = h.filtration()
    for (p, q), b in sorted(h.pieces.items()):
        Fp = F.get(p, np.zeros((0, h.rank)))
        Fqc = np.conj(F.get(q, np.zeros((0, h.rank))))
        rec = _intersect_rows(Fp, Fqc)
        ok = _subspaces_equal(rec, b)
        checks.append(
            (f"V^({p},{q}) = F^{p} ∩ conj F^{q}", ok,
             None if ok else "filtration does not recover the bigrading")
        )
    return PropertyReport(checks)


@dataclass
class PolarizedHodgeData:
    hodge: HodgeData
    form: np.ndarray  # integral/rational (-1)^k-symmetric bilinear form

    def __post_init__(self):
        self.form = np.array(
            [[float(x) for x in row] for row in self.form], dtype=float
        )


def _pair(S, x, y):
    return x @ S @ y.T


def validate_polarized(ph: PolarizedHodgeData) -> PropertyReport:
    h, S = ph.hodge, ph.form
    checks = list(validate_hodge(h).checks)
    k = h.weight
    sym = S - (-1) ** k * S.T
    ok = float(np.max(np.abs(sym))) < TOL * _scale_of(S)
    checks.append(
        (f"form is {'symmetric' if k % 2 == 0 else 'antisymmetric'}", ok,
         None if ok else f"S - (-1)^{k} S^T has magnitude {np.max(np.abs(sym)):.2e}")
    )
    items = sorted(h.pieces.items())
    for (p, q), b1 in items:
        for (r, s), b2 in items:
            if (r, s) == (q, p):
                continue
            off = _pair(S, b1, b2)
            good = float(np.max(np.abs(off))) < TOL * _scale_of(b1, b2, S) if off.size else True
            checks.append(
                (f"S(V^({p},{q}), V^({r},{s})) = 0", good,
                 None if good else f"pairing magnitude {np.max(np.abs(off)):.2e}")
            )
    for (p, q), b in items:
        if b.shape[0] == 0:
            continue
        H = (1j) ** (p - q) * (b @ S @ np.conj(b).T)
        herm = float(np.max(np.abs(H - H.conj().T)))
        eigs = np.linalg.eigvalsh((H + H.conj().T) / 2)
        good = herm < TOL * _scale_of(b, S) and float(eigs.min()) > TOL * _scale_of(b)
        checks.append(
            (f"i^(p-q) S(v, conj v) > 0 on V^({p},{q})", good,
             None if good else f"smallest eigenvalue {eigs.min():.3e}")
        )
    return PropertyReport(checks)


def validate_period_matrix(omega) -> PropertyReport:
    """Riemann relations for a g x g period matrix: symmetry and positive
    definite imaginary part (leading principal minors)."""
    omega = np.array(omega, dtype=complex)
    checks = []
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise ValueError("period matrix must be square")
    asym = float(np.max(np.abs(omega - omega.T)))
    ok = asym < TOL * _scale_of(omega)
    checks.append(("Ω symmetric", ok, None if ok else f"|Ω - Ω^T| = {asym:.2e}"))
    Y = omega.imag
    g = Y.shape[0]
    for j in range(1, g + 1):
        minor = float(np.linalg.det(Y[:j, :j]))
        ok = minor > TOL ** 2
        checks.append(
            (f"Im Ω leading minor {j} > 0", ok,
             None if ok else f"minor value {minor:.3e}")
        )
    return PropertyReport(checks)


def direct_sum(h1: HodgeData, h2: HodgeData) -> HodgeData:
    if h1.weight != h2.weight:
        raise ValueError("direct sum needs equal weights")
    n1, n2 = h1.rank, h2.rank
    pieces = {}
    for key in set(h1.pieces) | set(h2.pieces):
        b1 = h1.pieces.get(key, np.zeros((0, n1)))
        b2 = h2.pieces.get(key, np.zeros((0, n2)))
        top = np.hstack([b1, np.zeros((b1.shape[0], n2))])
        bot = np.hstack([np.zeros((b2.shape[0], n1)), b2])
        pieces[key] = np.vstack([top, bot])
    return HodgeData(h1.weight, pieces, rank=n1 + n2)


# -- mixed Hodge structures -------------------------------------------


@dataclass
class MixedHodgeData:
    """Rational weight filtration and complex Hodge filtration on a lattice.

    ``weights`` maps m to a row basis of W_m and ``hodge`` maps p to a row
    basis of F^p, both in ambient coordinates; ``lattice`` rows are a basis
    of the integral lattice in the same coordinates (identity by default).
    """

    rank: int
    weights: dict
    hodge: dict
    lattice: np.ndarray = None

    def __post_init__(self):
        self.weights = {int(m): _rows(B) for m, B in self.weights.items()}
        self.hodge = {int(p): _rows(B) for p, B in self.hodge.items()}
        if self.lattice is None:
            self.lattice = np.eye(self.rank, dtype=complex)
        else:
            self.lattice = np.array(self.lattice, dtype=complex)

    def in_lattice_coordinates(self):
        """W and F expressed in coordinates on the lattice basis."""
        Linv = np.linalg.inv(self.lattice)
        W = {m: B @ Linv for m, B in self.weights.items()}
        F = {p: B @ Linv for p, B in self.hodge.items()}
        return W, F


def _real_basis(B):
    """Real row basis of the span, or None when the span is not defined
    over the reals."""
    B = _rows(B)
    real = _orth(np.vstack([B.real, B.imag]))
    if real.shape[0] != _rank(B):
        return None
    # the SVD of a real-valued matrix has real singular vectors
    return np.ascontiguousarray(real.real)


def _quotient_map(Wprev_real, Wm_real):
    """Complement rows and a map sending v in W_m to its class coordinates."""
    comp = []
    current = Wprev_real
    for row in Wm_real:
        cand = np.vstack([current, row.reshape(1, -1)])
        if _rank(cand) > _rank(current):
            comp.append(row)
            current = cand
    comp = np.array(comp) if comp else np.zeros((0, Wm_real.shape[1]))
    basis = np.vstack([Wprev_real, comp]).astype(complex)
    nprev = Wprev_real.shape[0]

    def project(V):
        V = _rows(V)
        if V.shape[0] == 0:
            return np.zeros((0, comp.shape[0]), dtype=complex)
        coords, *_ = np.linalg.lstsq(basis.T, V.T, rcond=None)
        return coords.T[:, nprev:]

    return comp, project


def validate_mhs(m: MixedHodgeData) -> PropertyReport:
    checks = []
    W, F = m.in_lattice_coordinates()
    realW = {}
    for idx in sorted(W):
        rb = _real_basis(W[idx])
        ok = rb is not None
        checks.append(
            (f"W_{idx} rational over the lattice", ok,
             None if ok else f"W_{idx} is not defined over the real span of the lattice")
        )
        realW[idx] = rb if ok else _orth(W[idx])
    widx = sorted(W)
    for a, b in zip(widx, widx[1:]):
        ok = _subspace_leq(realW[a], realW[b])
        checks.append(
            (f"W_{a} inside W_{b}", ok, None if ok else "weight filtration not nested")
        )
    pidx = sorted(F, reverse=True)
    for a, b in zip(pidx, pidx[1:]):
        ok = _subspace_leq(F[a], F[b])
        checks.append(
            (f"F^{a} inside F^{b}", ok, None if ok else "Hodge filtration not nested")
        )
    top = widx[-1] if widx else None
    if top is None or _rank(realW[top]) != m.rank:
        checks.append(("W exhausts the space", False, "highest W is a proper subspace"))
        return PropertyReport(checks)

    prev_basis = np.zeros((0, m.rank))
    prev_idx = None
    for idx in widx:
        Wm_real = realW[idx]
        gr_dim = _rank(Wm_real) - _rank(prev_basis)
        if gr_dim == 0:
            prev_basis, prev_idx = Wm_real, idx
            continue
        comp, project = _quotient_map(prev_basis, Wm_real)
        grF = {}
        for p in pidx:
            cut = _intersect_rows(F[p], Wm_real.astype(complex))
            grF[p] = _orth(project(cut))

        def gr_level(p):
            """Induced F^p on the graded piece (decreasing interpolation)."""
            above = [pp for pp in pidx if pp >= p]
            if above:
                return grF[min(above)]
            return np.zeros((0, gr_dim), dtype=complex)

        # n-opposedness: F^p and conj F^{m+1-p} are complementary on Gr_m
        opposed = True
        witness = None
        for p in range(min(pidx), max(pidx) + 2):
            q = idx + 1 - p
            Fp, Fq = gr_level(p), gr_level(q)
            meets = _intersect_rows(Fp, np.conj(Fq)).shape[0]
            if Fp.shape[0] + Fq.shape[0] != gr_dim or meets:
                opposed = False
                witness = (
                    f"on Gr_{idx}: dim F^{p} = {Fp.shape[0]}, "
                    f"dim conj F^{q} = {Fq.shape[0]}, intersection {meets}, "
                    f"graded dimension {gr_dim}"
                )
                break
        checks.append(
            (f"Gr_{idx}: filtration {idx}-opposed to its conjugate", opposed, witness)
        )
        pieces = {}
        for p in sorted(grF):
            q = idx - p
            piece = _intersect_rows(gr_level(p), np.conj(gr_level(q)))
            if piece.shape[0]:
                pieces[(p, q)] = piece
        if not pieces:
            checks.append(
                (f"Gr_{idx} carries a weight-{idx} Hodge structure", False,
                 "induced filtration produces no (p,q) pieces")
            )
        else:
            sub = validate_hodge(HodgeData(idx, pieces, rank=gr_dim))
            for name, ok, wtn in sub.checks:
                checks.append((f"Gr_{idx}: {name}", ok, wtn))
        prev_basis, prev_idx = Wm_real, idx
    return PropertyReport(checks)


def graded_mhs(parts: dict) -> MixedHodgeData:
    """Split MHS with the direct-sum weight and Hodge filtrations.

    ``parts`` maps a weight m to a HodgeData of that weight; blocks are laid
    out in increasing weight order.
    """
    order = sorted(parts)
    sizes = [parts[m].rank for m in order]
    total = sum(sizes)
    offs = {}
    off = 0
    for m, s in zip(order, sizes):
        offs[m] = off
        off += s
    weights = {}
    run = 0
    for m in order:
        run += parts[m].rank
        weights[m] = np.eye(total)[:run]
    filts = {m: parts[m].filtration() for m in order}

    def level(m, p):
        # decreasing filtration: value at the smallest recorded jump >= p,
        # zero above the top jump
        above = [pp for pp in filts[m] if pp >= p]
        if above:
            return filts[m][min(above)]
        return np.zeros((0, parts[m].rank), dtype=complex)

    hodge = {}
    all_ps = sorted({p for m in order for p in filts[m]}, reverse=True)
    for p in all_ps:
        blocks = []
        for m in order:
            Fm = level(m, p)
            if Fm.shape[0] == 0:
                continue
            blk = np.zeros((Fm.shape[0], total), dtype=complex)
            blk[:, offs[m]:offs[m] + parts[m].rank] = Fm
            blocks.append(blk)
        hodge[p] = np.vstack(blocks) if blocks else np.zeros((0, total))
    return MixedHodgeData(total, weights, hodge)


def mhs_from_twist(split: MixedHodgeData, g) -> MixedHodgeData:
    """Twist the lattice by a unipotent g preserving W and trivial on Gr."""
    g = np.array(g, dtype=complex)
    widx = sorted(split.weights)
    for i, m in enumerate(widx):
        B = split.weights[m]
        img = B @ g.T
        if not _subspace_leq(img, B):
            raise ValueError(f"twist does not preserve W_{m}")
        prev = split.weights[widx[i - 1]] if i else np.zeros((0, split.rank))
        moved = B @ (g - np.eye(split.rank)).T
        if _rank(moved) and not _subspace_leq(moved, prev):
            raise ValueError(f"twist acts nontrivially on Gr_{m}")
    lattice = split.lattice @ g.T
    return MixedHodgeData(split.rank, dict(split.weights), dict(split.hodge), lattice)


# -- integer lattice plumbing for extension classes -------------------


def _column_hnf(A):
    """Column echelon form over Z: returns (H, U) with A @ U = H, U unimodular."""
    A = [[int(x) for x in row] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        for row in U:
            row[j], row[k] = row[k], row[j]

    def addmul(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in U:
            row[dst] += c * row[src]

    def negate(j):
        for row in A:
            row[j] = -row[j]
        for row in U:
            row[j] = -row[j]

    col = 0
    for r in range(m):
        if col == n:
            break
        if all(A[r][j] == 0 for j in range(col, n)):
            continue
        for j in range(col + 1, n):
            # Euclid on columns col and j until entry j vanishes
            while A[r][j]:
                if A[r][col]:
                    q = A[r][col] // A[r][j]
                    addmul(col, j, -q)
                swap(col, j)
        if A[r][col] == 0:
            # the surviving nonzero column ended up at position col after swaps
            for j in range(col + 1, n):
                if A[r][j]:
                    swap(col, j)
                    break
        if A[r][col] < 0:
            negate(col)
        col += 1
    return A, U


def _integer_kernel(A):
    """Z-basis (rows) of {x in Z^n : A x = 0} for an integer matrix A."""
    H, U = _column_hnf([list(r) for r in A])
    m = len(H)
    n = len(U)
    zero_cols = []
    for j in range(n):
        if all(H[i][j] == 0 for i in range(m)):
            zero_cols.append(j)
    return [[U[i][j] for i in range(n)] for j in zero_cols]


def _rationalize(B, max_den=10 ** 9):
    """Fraction matrix close to the float rows B; raises if not rational."""
    out = []
    for row in np.atleast_2d(B):
        frow = []
        for x in row:
            f = Fraction(float(np.real(x))).limit_denominator(max_den)
            if abs(float(f) - float(np.real(x))) > 1e-6 or abs(np.imag(x)) > 1e-6:
                raise ValueError("subspace basis is not rational")
            frow.append(f)
        out.append(frow)
    return out


def _saturated_integer_basis(B):
    """Primitive Z-basis of rowspace(B) ∩ Z^n for a rational row basis B."""
    frac = _rationalize(B)
    n = len(frac[0])
    null = linfilt.nullspace_of_rows([list(r) for r in frac], n)
    if not null:
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    K = []
    for v in null:
        den = math.lcm(*(f.denominator for f in v))
        K.append([int(f * den) for f in v])
    return _integer_kernel(K)


@dataclass
class ExtClass:
    """Carlson class of a two-step MHS, as a matrix Hom(A, B) in the
    integral bases, with its reduction modulo F^0 Hom + Hom(A_Z, B_Z)."""

    matrix: np.ndarray        # dA x dB, integral quotient/sub bases
    normal: np.ndarray        # real vector after both reductions
    reducer: "_ExtReducer" = field(repr=False, default=None)


class _ExtReducer:
    """Reduction of Hom(A_C, B_C) vectors modulo F^0 Hom and the integral
    lattice; shared between classes of the same two-step shape."""

    def __init__(self, f0_basis, dim):
        self.dim = dim
        self.f0 = _orth(f0_basis) if len(f0_basis) else np.zeros((0, dim), dtype=complex)
        # projection of the standard integer basis to the F0-orthocomplement
        eye = np.eye(dim, dtype=complex)
        proj = eye - (eye @ self.f0.conj().T) @ self.f0
        self.gens = proj  # rows: images of the integral generators

    def _perp(self, vec):
        return vec - (vec @ self.f0.conj().T) @ self.f0

    def reduce(self, vec):
        x = self._perp(np.asarray(vec, dtype=complex))
        G = np.hstack([self.gens.real, self.gens.imag])
        target = np.hstack([x.real, x.imag])
        if G.size:
            coeffs, *_ = np.linalg.lstsq(G.T, target, rcond=None)
            target = target - np.round(coeffs) @ G
        return target


def ext_class(m: MixedHodgeData) -> ExtClass:
    """Extension class of a two-step MHS 0 -> B -> H -> A -> 0 (B the lower
    weight step) in Hom(A_C, B_C)/(Hom(A_Z, B_Z) + F^0 Hom)."""
    W, F = m.in_lattice_coordinates()
    jumps = []
    prev = -1
    for idx in sorted(W):
        r = _rank(W[idx])
        if r > prev:
            jumps.append((idx, W[idx]))
            prev = r
    if len(jumps) != 2:
        raise ValueError(f"two-step MHS required, found {len(jumps)} weight jumps")
    (wb, Wb), (wa, _) = jumps
    n = m.rank
    BZ = _saturated_integer_basis(_real_basis(Wb))
    d = len(BZ)
    H, U = _column_hnf(BZ)
    Hm = np.array([[H[i][j] for j in range(d)] for i in range(d)], dtype=float)
    Umat = np.array(U, dtype=float)
    Uinv = np.linalg.inv(Umat)
    Hinv = np.linalg.inv(Hm)
    dA = n - d

    def b_coords(V):
        return (_rows(V) @ Umat)[:, :d] @ Hinv

    def a_coords(V):
        return (_rows(V) @ Umat)[:, d:]

    # F-compatible splitting sigma: A_C -> H_C, built on an adapted basis
    pidx = sorted(F, reverse=True)
    chosen = np.zeros((0, dA), dtype=complex)
    lifts = np.zeros((0, n), dtype=complex)
    for p in pidx:
        Fp = _orth(F[p])
        if Fp.shape[0] == 0:
            continue
        imgA = a_coords(Fp)
        for q in _orth(imgA):
            if _rank(np.vstack([chosen, q.reshape(1, -1)])) > chosen.shape[0]:
                x, *_ = np.linalg.lstsq(imgA.T, q, rcond=None)
                chosen = np.vstack([chosen, q.reshape(1, -1)])
                lifts = np.vstack([lifts, (x @ Fp).reshape(1, -1)])
        if chosen.shape[0] == dA:
            break
    if chosen.shape[0] != dA:
        raise ValueError("Hodge filtration does not exhaust the quotient")
    sigma = np.linalg.inv(chosen) @ lifts  # rows: sigma of the A_Z basis
    psi = b_coords(sigma)  # dA x dB class matrix

    # F^0 Hom: f with f(F^p A) inside F^p B for every p.  Build the matrix
    # of the residual map on the standard Hom basis; its null space is F^0.
    grFA = {p: _orth(a_coords(F[p])) for p in pidx}
    grFB = {p: _orth(b_coords(_intersect_rows(F[p], _orth(Wb)))) for p in pidx}
    dim = dA * d
    basis_mats = [np.zeros((dA, d)) for _ in range(dim)]
    for i in range(dim):
        basis_mats[i].flat[i] = 1.0
    blocks = []
    for p in pidx:
        QA, QB = grFA[p], grFB[p]
        if QA.shape[0] == 0:
            continue
        cols = []
        for E in basis_mats:
            img = QA @ E
            resid = img - (img @ QB.conj().T) @ QB if QB.shape[0] else img
            cols.append(resid.flatten())
        blocks.append(np.array(cols))
    if blocks:
        M = np.hstack(blocks)  # rows: Hom basis, columns: residual components
        u, s, vh = np.linalg.svd(M, full_matrices=True)
        r = int(np.sum(s > TOL * max(1.0, s[0] if s.size else 1.0)))
        # c @ M = 0  <=>  c is the conjugate of a left singular vector past r
        f0_basis = u[:, r:].T.conj()
    else:
        f0_basis = np.zeros((0, dim), dtype=complex)
    reducer = _ExtReducer(f0_basis, dim)
    normal = reducer.reduce(psi.flatten())
    return ExtClass(psi, normal, reducer)


def ext_classes_equal(c1: ExtClass, c2: ExtClass, tol=1e-6) -> bool:
    """Equality in the quotient: the difference reduces to (almost) zero."""
    diff = (c1.matrix - c2.matrix).flatten()
    red = c1.reducer.reduce(diff)
    return float(np.max(np.abs(red))) < tol if red.size else True


# -- nilpotent orbits -------------------------------------------------


@dataclass
class NilpotentOrbitData:
    weight: int
    nilpotent: list            # rational square matrix N
    limit_hodge: dict          # p -> row basis of F0^p
    form: list                 # rational bilinear form S
    lattice: np.ndarray = None

    def __post_init__(self):
        self.nilpotent = [[Fraction(x) for x in row] for row in self.nilpotent]
        self.form = [[Fraction(x) for x in row] for row in self.form]
        self.limit_hodge = {int(p): _rows(B) for p, B in self.limit_hodge.items()}
        self.rank = len(self.nilpotent)
        if self.lattice is None:
            self.lattice = np.eye(self.rank)


def _expm_nilpotent(N, z):
    """exp(z N) for nilpotent N, as an exact polynomial in z."""
    N = np.array(N, dtype=float)
    n = N.shape[0]
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for j in range(1, n + 1):
        term = term @ N * (z / j)
        if not np.any(term):
            break
        out = out + term
    return out


def shifted_weight_filtration(N, k) -> IndexedFiltration:
    return weight_filtration(N).shift(k)


def nilpotent_orbit_check(d: NilpotentOrbitData, t) -> PropertyReport:
    """Limit MHS check for the orbit (t^N lattice, F0, W(N)[k]) at a sample t."""
    checks = []
    N, S, k = d.nilpotent, d.form, d.weight
    NtS = linfilt.mat_mul([[x for x in row] for row in _transpose(N)], S)
    SN = linfilt.mat_mul(S, N)
    inf_sym = linfilt.mat_add(NtS, SN)
    ok = linfilt.mat_is_zero(inf_sym)
    checks.append(("S(Nx,y) + S(x,Ny) = 0", ok,
                   None if ok else "form not infinitesimally preserved"))
    W = shifted_weight_filtration(N, k)
    for name, okc, witness in linfilt.verify_weight_properties(N, W, shift=k).checks:
        checks.append((name, okc, witness))
    Nf = np.array(N, dtype=float)
    ps = sorted(d.limit_hodge, reverse=True)

    def f0_level(p):
        # decreasing filtration recorded at its jumps; full below the lowest
        above = [pp for pp in ps if pp >= p]
        if above:
            return d.limit_hodge[min(above)]
        return np.eye(d.rank, dtype=complex)

    for p in ps:
        img = d.limit_hodge[p] @ Nf.T
        if not np.any(np.abs(img) > TOL):
            continue
        ok = _subspace_leq(img, f0_level(p - 1))
        checks.append(
            (f"N F0^{p} inside F0^{p - 1}", ok,
             None if ok else f"N image of F0^{p} leaves F0^{p - 1}")
        )
    logt = complex(np.log(complex(t)))
    lattice = np.array(d.lattice, dtype=complex) @ _expm_nilpotent(N, logt).T
    weights = {
        idx: np.array([[float(x) for x in v] for v in space.basis], dtype=complex)
        for idx, space in W.steps
        if space.dim
    }
    mhs = MixedHodgeData(d.rank, weights, dict(d.limit_hodge), lattice)
    for name, okc, witness in validate_mhs(mhs).checks:
        checks.append((f"limit MHS: {name}", okc, witness))
    return PropertyReport(checks)


def _transpose(M):
    return [list(row) for row in zip(*M)]


@dataclass
class GrowthFit:
    slope: float
    expected: int           # m - k for the minimal weight index m of v
    log_scales: list        # log log(1/|t|) per sample
    log_norms: list


def hodge_norm_growth(d: NilpotentOrbitData, v, y_values) -> GrowthFit:
    """Growth exponent of the Hodge norm of a flat rational vector along the
    ray t = exp(2 pi i (i y)): the slope of log ||v||^2 against
    log log(1/|t|) approaches m - k for v in W_m minus W_{m-1}."""
    y_values = sorted(float(y) for y in y_values)
    if len(y_values) < 3:
        raise ValueError("need at least 3 samples for the regression")
    N, S, k = d.nilpotent, d.form, d.weight
    W = shifted_weight_filtration(N, k)
    vfrac = [Fraction(x) for x in v]
    m_idx = None
    for idx in range(W.lowest, W.highest + 1):
        if W.at(idx).contains(vfrac):
            m_idx = idx
            break
    if m_idx is None:
        raise ValueError("vector outside the top weight step")
    Sf = np.array(S, dtype=float)
    vnum = np.array([float(x) for x in vfrac], dtype=complex)
    logs, norms = [], []
    ps = sorted(d.limit_hodge, reverse=True)
    for y in y_values:
        # disk coordinate t = exp(2 pi i z) on the ray z = iy; the orbit
        # filtration at z is exp(z N) F0 and log(1/|t|) = 2 pi y
        E = _expm_nilpotent(N, 1j * y).T
        F = {p: d.limit_hodge[p] @ E for p in ps}
        pieces = {}
        for p in ps:
            q = k - p
            Fq = F.get(q)
            if Fq is None:
                continue
            piece = _intersect_rows(F[p], np.conj(Fq))
            if piece.shape[0]:
                pieces[(p, q)] = piece
        stacked = np.vstack([pieces[key] for key in sorted(pieces)])
        coords, *_ = np.linalg.lstsq(stacked.T, vnum, rcond=None)
        norm2 = 0.0
        off = 0
        for key in sorted(pieces):
            p, q = key
            rows = pieces[key].shape[0]
            part = coords[off:off + rows] @ pieces[key]
            off += rows
            norm2 += float(np.real((1j) ** (p - q) * (part @ Sf @ np.conj(part))))
        logs.append(math.log(2 * math.pi * y))
        norms.append(math.log(abs(norm2)))
    slope = float(np.polyfit(logs, norms, 1)[0])
    return GrowthFit(slope, m_idx - k, logs, norms)


# -- fixture (de)serialization ----------------------------------------


def _parse_scalar(x):
    if isinstance(x, str):
        return float(Fraction(x))
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    if isinstance(x, dict):
        return complex(x.get("re", 0), x.get("im", 0))
    return complex(x)


def _parse_matrix(rows):
    return [[_parse_scalar(x) for x in row] for row in rows]


def _parse_rational_matrix(rows):
    return [[Fraction(x) if isinstance(x, str) else Fraction(x) for x in row] for row in rows]


def hodge_from_json(obj) -> HodgeData:
    if isinstance(obj, str):
        obj = json.loads(obj)
    pieces = {
        tuple(int(s) for s in key.split(",")): _parse_matrix(rows)
        for key, rows in obj["pieces"].items()
    }
    return HodgeData(int(obj["weight"]), pieces, rank=obj.get("rank"))


def polarized_from_json(obj) -> PolarizedHodgeData:
    if isinstance(obj, str):
        obj = json.loads(obj)
    h = hodge_from_json(obj)
    return PolarizedHodgeData(h, [[float(Fraction(x)) for x in row] for row in obj["form"]])


def mhs_from_json(obj) -> MixedHodgeData:
    if isinstance(obj, str):
        obj = json.loads(obj)
    weights = {int(mkey): _parse_matrix(rows) for mkey, rows in obj["weights"].items()}
    hodge = {int(p): _parse_matrix(rows) for p, rows in obj["hodge"].items()}
    lattice = _parse_matrix(obj["lattice"]) if "lattice" in obj else None
    return MixedHodgeData(int(obj["rank"]), weights, hodge,
                          np.array(lattice) if lattice is not None else None)


def orbit_from_json(obj) -> NilpotentOrbitData:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return NilpotentOrbitData(
        int(obj["weight"]),
        _parse_rational_matrix(obj["nilpotent"]),
        {int(p): _parse_matrix(rows) for p, rows in obj["limit_hodge"].items()},
        _parse_rational_matrix(obj["form"]),
    )


def elliptic_orbit(period=1j) -> NilpotentOrbitData:
    """Weight-1 rank-2 degenerating orbit of an elliptic curve: the orbit
    line exp(zN) F0 = span (z0 + z, 1) is the classical period, N is the
    logarithm of the Dehn-twist monodromy, S the symplectic polarization."""
    return NilpotentOrbitData(
        weight=1,
        nilpotent=[[0, 1], [0, 0]],
        limit_hodge={1: [[period, 1.0]], 0: [[1, 0], [0, 1]]},
        form=[[0, -1], [1, 0]],
    )
