"""Exact rational linear algebra: subspaces, nilpotent operators and the
monodromy weight filtration.

All arithmetic is over Fraction, and subspaces are kept in reduced row
echelon form, so subspace equality is decidable by matrix equality and the
uniqueness statements below are exact rather than numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def _as_fraction_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                row = out[i]
                for j in range(m):
                    row[j] += c * bt[j]
    return out


def mat_vec(a, v):
    return [sum(c * x for c, x in zip(row, v)) for row in a]


def mat_identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[c * x for x in row] for row in a]


def mat_power(a, k):
    n = len(a)
    out = mat_identity(n)
    for _ in range(k):
        out = mat_mul(out, a)
    return out


def mat_is_zero(a):
    return all(x == 0 for row in a for x in row)


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return [row for row in rows[:r]], pivots


@dataclass(frozen=True)
class RationalSubspace:
    """Subspace of Q^n given by a reduced-echelon basis (rows)."""

    ambient: int
    basis: tuple = field(default=())

    @classmethod
    def from_vectors(cls, ambient, vectors):
        rows, _ = rref(_as_fraction_matrix(vectors))
        return cls(ambient, tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, ambient):
        return cls(ambient, ())

    @classmethod
    def full(cls, ambient):
        return cls.from_vectors(ambient, mat_identity(ambient))

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, vector):
        vector = [Fraction(x) for x in vector]
        rows, _ = rref(list(self.basis) + [vector])
        return len(rows) == self.dim

    def contains_subspace(self, other):
        return all(self.contains(v) for v in other.basis)

    def __le__(self, other):
        return other.contains_subspace(self)

    def sum(self, other):
        return RationalSubspace.from_vectors(
            self.ambient, list(self.basis) + list(other.basis)
        )

    def intersect(self, other):
        """Intersection via the kernel of the stacked coefficient system."""
        if self.dim == 0 or other.dim == 0:
            return RationalSubspace.zero(self.ambient)
        # x in both: x = a^T s = b^T t; solve [S^T | -T^T] null space
        cols = self.dim + other.dim
        rows = []
        for j in range(self.ambient):
            rows.append(
                [self.basis[i][j] for i in range(self.dim)]
                + [-other.basis[i][j] for i in range(other.dim)]
            )
        vectors = []
        for coeffs in nullspace_of_rows(rows, cols):
            v = [Fraction(0)] * self.ambient
            for i in range(self.dim):
                for j in range(self.ambient):
                    v[j] += coeffs[i] * self.basis[i][j]
            vectors.append(v)
        return RationalSubspace.from_vectors(self.ambient, vectors)

    def image_under(self, matrix):
        vectors = [mat_vec(matrix, list(v)) for v in self.basis]
        return RationalSubspace.from_vectors(self.ambient, vectors)

    def coordinates(self, vector):
        """Coefficients of ``vector`` in the echelon basis, or None."""
        if not self.contains(vector):
            return None
        _, pivots = rref(list(self.basis))
        vector = [Fraction(x) for x in vector]
        return [vector[c] for c in pivots]


def nullspace_of_rows(rows, ncols):
    """Basis of the null space of the matrix with the given rows."""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -reduced[r][fc]
        basis.append(v)
    return basis


def kernel(matrix):
    n = len(matrix[0]) if matrix else 0
    return RationalSubspace.from_vectors(n, nullspace_of_rows([list(r) for r in matrix], n))


def image(matrix):
    n = len(matrix)
    cols = [[row[j] for row in matrix] for j in range(len(matrix[0]))] if matrix else []
    return RationalSubspace.from_vectors(n, cols)


def extend_basis(inner: RationalSubspace, outer: RationalSubspace):
    """Vectors of ``outer`` extending a basis of ``inner`` to one of ``outer``."""
    current = list(inner.basis)
    extension = []
    rank = inner.dim
    for v in outer.basis:
        rows, _ = rref(current + [list(v)])
        if len(rows) > rank:
            current.append(list(v))
            extension.append(list(v))
            rank += 1
    return extension


class NotNilpotentError(ValueError):
    def __init__(self, power):
        super().__init__(f"matrix is not nilpotent: N^{power} != 0")
        self.power = power


def nilpotency_index(matrix):
    """Smallest k with N^k = 0; raises NotNilpotentError otherwise."""
    n = len(matrix)
    power = mat_identity(n)
    for k in range(n + 1):
        if mat_is_zero(power):
            return k
        power = mat_mul(power, matrix)
    raise NotNilpotentError(n)


@dataclass(frozen=True)
class IndexedFiltration:
    """Increasing filtration n -> subspace, stored at its jump indices."""

    ambient: int
    steps: tuple  # sorted tuple of (index, RationalSubspace)

    @classmethod
    def from_dict(cls, ambient, mapping):
        items = sorted(mapping.items())
        steps = []
        prev = None
        for idx, space in items:
            if prev is not None and not space.contains_subspace(prev):
                raise ValueError(f"filtration not increasing at index {idx}")
            if prev is None or space != prev:
                steps.append((idx, space))
                prev = space
        return cls(ambient, tuple(steps))

    def at(self, n):
        result = RationalSubspace.zero(self.ambient)
        for idx, space in self.steps:
            if idx <= n:
                result = space
            else:
                break
        return result

    @property
    def jumps(self):
        return [idx for idx, _ in self.steps]

    @property
    def lowest(self):
        return self.steps[0][0] if self.steps else 0

    @property
    def highest(self):
        return self.steps[-1][0] if self.steps else 0

    def graded_dim(self, n):
        return self.at(n).dim - self.at(n - 1).dim

    def shift(self, k, convention="standard"):
        """Reindex by the weight k.

        "standard": W_n -> old W_{n-k} (jumps move up by k).
        "printed": W_n -> old W_{k-n} (the decreasing variant as printed in
        some sources); the result is re-sorted to stay increasing.
        """
        if convention == "standard":
            return IndexedFiltration(
                self.ambient, tuple((idx + k, space) for idx, space in self.steps)
            )
        if convention == "printed":
            # W_n = W(N)_{k-n}: decreasing in n, so return a plain dict
            lo, hi = self.lowest - 1, self.highest + 1
            return {n: self.at(k - n) for n in range(k - hi, k - lo + 1)}
        raise ValueError(f"unknown shift convention {convention!r}")

    def conjugate(self, g):
        return IndexedFiltration(
            self.ambient,
            tuple((idx, space.image_under(g)) for idx, space in self.steps),
        )


def weight_filtration(N) -> IndexedFiltration:
    """The unique filtration W(N) with N W_n <= W_{n-2} and
    N^k : Gr_k -> Gr_{-k} an isomorphism, for nilpotent N.

    Built by the inductive kernel/image construction: with k the largest
    power with N^k != 0, set W_k = V, W_{k-1} = ker N^k, W_{-k} = im N^k,
    and fill the middle from the induced operator on ker N^k / im N^k.
    """
    N = _as_fraction_matrix(N)
    n = len(N)
    nilpotency_index(N)  # raises if not nilpotent
    mapping = _weight_filtration_rec(N, n)
    return IndexedFiltration.from_dict(n, mapping)


def _weight_filtration_rec(N, n):
    k = nilpotency_index(N) - 1  # largest power with N^k != 0
    V = RationalSubspace.full(n)
    if k <= 0:
        return {-1: RationalSubspace.zero(n), 0: V}
    Nk = mat_power(N, k)
    top = kernel(Nk)
    bottom = image(Nk)
    mapping = {
        k: V,
        k - 1: top,
        -k: bottom,
        -k - 1: RationalSubspace.zero(n),
    }
    # induced operator on Q := top / bottom in a complement basis
    complement = extend_basis(bottom, top)
    q = len(complement)
    if q:
        quotient_basis = [list(v) for v in bottom.basis] + complement
        induced = []
        for v in complement:
            w = mat_vec(N, v)
            coords = _solve_in_span(quotient_basis, w)
            induced.append(coords[bottom.dim:])
        induced_matrix = [
            [induced[j][i] for j in range(q)] for i in range(q)
        ]
        sub = _weight_filtration_rec(induced_matrix, q)
        for idx in range(-k + 1, k - 1):
            space = _lift_space(sub, idx, complement, bottom, n)
            mapping[idx] = space
    else:
        for idx in range(-k + 1, k - 1):
            mapping[idx] = bottom
    return mapping


def _lift_space(sub_mapping, idx, complement, bottom, n):
    """Preimage in V of a quotient filtration step under top -> top/bottom."""
    space = None
    for j in sorted(sub_mapping):
        if j <= idx:
            space = sub_mapping[j]
    vectors = [list(v) for v in bottom.basis]
    if space is not None:
        for coeffs in space.basis:
            v = [Fraction(0)] * n
            for c, comp in zip(coeffs, complement):
                for t in range(n):
                    v[t] += c * comp[t]
            vectors.append(v)
    return RationalSubspace.from_vectors(n, vectors)


def _solve_in_span(basis_vectors, target):
    """Coefficients expressing ``target`` in the given independent vectors."""
    m = len(basis_vectors)
    n = len(target)
    rows = [[basis_vectors[j][i] for j in range(m)] + [target[i]] for i in range(n)]
    reduced, pivots = rref(rows)
    coeffs = [Fraction(0)] * m
    for r, pc in enumerate(pivots):
        if pc == m:
            raise ValueError("target not in span")
        coeffs[pc] = reduced[r][m]
    return coeffs


def jordan_chains(N):
    """Jordan chains of a nilpotent matrix: list of [v, Nv, ..., N^{s-1}v]."""
    N = _as_fraction_matrix(N)
    n = len(N)
    k = nilpotency_index(N)
    kernels = [RationalSubspace.zero(n)]
    power = mat_identity(n)
    for _ in range(k):
        power = mat_mul(power, N)
        kernels.append(kernel(power))
    chains = []
    for s in range(k, 0, -1):
        # tops of size-s blocks extend K_{s-1} + N * (larger-chain vectors in K_s)
        blocked = [list(v) for v in kernels[s - 1].basis]
        for chain in chains:
            size = len(chain)
            if size > s:
                blocked.append(chain[size - s])
        obstruction = RationalSubspace.from_vectors(n, blocked)
        for top in extend_basis(obstruction, kernels[s]):
            chain = [top]
            for _ in range(s - 1):
                chain.append(mat_vec(N, chain[-1]))
            chains.append(chain)
    return chains


def weight_filtration_jordan(N) -> IndexedFiltration:
    """W(N) assembled from a Jordan basis: in a chain of length s the vector
    N^j v has weight s - 1 - 2j, and W_m is spanned by the chain vectors of
    weight <= m.  Test oracle for the inductive construction."""
    N = _as_fraction_matrix(N)
    n = len(N)
    weighted = []
    for chain in jordan_chains(N):
        s = len(chain)
        for j, v in enumerate(chain):
            weighted.append((s - 1 - 2 * j, v))
    if not weighted:
        return IndexedFiltration.from_dict(
            n, {-1: RationalSubspace.zero(n), 0: RationalSubspace.full(n)}
        )
    lo = min(w for w, _ in weighted)
    hi = max(w for w, _ in weighted)
    mapping = {lo - 1: RationalSubspace.zero(n)}
    for m in range(lo, hi + 1):
        mapping[m] = RationalSubspace.from_vectors(
            n, [v for w, v in weighted if w <= m]
        )
    return IndexedFiltration.from_dict(n, mapping)


@dataclass
class PropertyReport:
    checks: list

    @property
    def ok(self):
        return all(passed for _, passed, _ in self.checks)

    def failures(self):
        return [(name, witness) for name, passed, witness in self.checks if not passed]

    def __str__(self):
        lines = []
        for name, passed, witness in self.checks:
            mark = "ok" if passed else "FAIL"
            lines.append(f"[{mark}] {name}" + (f" witness: {witness}" if witness and not passed else ""))
        return "\n".join(lines)


def verify_weight_properties(N, W: IndexedFiltration, shift=0) -> PropertyReport:
    """Check N W_n <= W_{n-2} and that N^j induces bijections on the graded
    pieces, relative to a centered copy of W (un-shift by ``shift``)."""
    N = _as_fraction_matrix(N)
    checks = []
    centered = W.shift(-shift) if shift else W
    lo, hi = centered.lowest - 1, centered.highest + 1
    for idx in range(lo, hi + 1):
        space = centered.at(idx)
        target = centered.at(idx - 2)
        img = space.image_under(N)
        ok = target.contains_subspace(img)
        witness = None
        if not ok:
            for v in space.basis:
                if not target.contains(mat_vec(N, list(v))):
                    witness = f"N * {tuple(v)} escapes W_{idx - 2}"
                    break
        checks.append((f"N(W_{idx}) in W_{idx - 2}", ok, witness))
    for j in range(1, max(hi, -lo) + 1):
        da = _graded_rank_through(N, centered, j)
        top_dim = centered.graded_dim(j)
        bot_dim = centered.graded_dim(-j)
        ok = da == top_dim == bot_dim
        witness = None if ok else (
            f"N^{j}: Gr_{j} -> Gr_{-j} has rank {da}, dims {top_dim}/{bot_dim}"
        )
        checks.append((f"N^{j} : Gr_{j} ~ Gr_{-j}", ok, witness))
    return PropertyReport(checks)


def _graded_rank_through(N, W, j):
    """Rank of the map Gr_j -> Gr_{-j} induced by N^j."""
    Nj = mat_power(N, j)
    top, top_prev = W.at(j), W.at(j - 1)
    bot_prev = W.at(-j - 1)
    image_vectors = [mat_vec(Nj, list(v)) for v in extend_basis(top_prev, top)]
    # rank modulo W_{-j-1}
    base = [list(v) for v in bot_prev.basis]
    total = RationalSubspace.from_vectors(W.ambient, base + image_vectors)
    return total.dim - bot_prev.dim


def shift_filtration(W: IndexedFiltration, k, convention="standard") -> IndexedFiltration:
    return W.shift(k, convention=convention)


def picard_lefschetz_filtration(N) -> IndexedFiltration:
    """Length-3 filtration W_0 = im N <= W_1 = ker N <= W_2 = V for N^2 = 0.

    Agrees with shift_filtration(weight_filtration(N), 1).
    """
    N = _as_fraction_matrix(N)
    n = len(N)
    if not mat_is_zero(mat_mul(N, N)):
        raise ValueError("picard_lefschetz_filtration requires N^2 = 0")
    direct = IndexedFiltration.from_dict(
        n,
        {
            -1: RationalSubspace.zero(n),
            0: image(N),
            1: kernel(N),
            2: RationalSubspace.full(n),
        },
    )
    general = shift_filtration(weight_filtration(N), 1)
    assert all(direct.at(m) == general.at(m) for m in range(-1, 3)), (
        "Picard-Lefschetz filtration disagrees with the shifted general construction"
    )
    return direct
