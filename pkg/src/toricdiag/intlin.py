"""Exact integer and rational linear algebra.

Matrices are small (at most a few dozen rows) so everything is done with
Python integers and ``fractions.Fraction``.  No floating point is used.
"""

from fractions import Fraction
from math import gcd
from itertools import combinations
from typing import NamedTuple, Sequence


class TorsionClassGroup(ValueError):
    """The cokernel of the ray matrix has torsion."""


class _Matrix:
    """Immutable dense matrix stored as a tuple of row tuples."""

    _coerce = staticmethod(lambda x: x)

    def __init__(self, rows, ncols=None):
        rows = tuple(tuple(self._coerce(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        self._rows = rows
        self.nrows = len(rows)
        self.ncols = ncols

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def entries(self):
        return [x for r in self._rows for x in r]

    def row(self, i):
        return self._rows[i]

    def col(self, j):
        return tuple(r[j] for r in self._rows)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __iter__(self):
        return iter(self._rows)

    def __len__(self):
        return self.nrows

    def __eq__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __repr__(self):
        return f"{type(self).__name__}({[list(r) for r in self._rows]!r})"

    def tolist(self):
        return [list(r) for r in self._rows]

    @property
    def T(self):
        return type(self)([self.col(j) for j in range(self.ncols)], self.nrows)

    def columns(self, idx):
        return type(self)([[r[j] for j in idx] for r in self._rows], len(idx))

    def rows_at(self, idx):
        return type(self)([self._rows[i] for i in idx], self.ncols)

    def __matmul__(self, other):
        if isinstance(other, _Matrix):
            if self.ncols != other.nrows:
                raise ValueError("shape mismatch")
            cols = [other.col(j) for j in range(other.ncols)]
            out = [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows]
            cls = RatMatrix if RatMatrix in (type(self), type(other)) else IntMatrix
            return cls(out, other.ncols)
        # vector
        return tuple(sum(a * b for a, b in zip(r, other)) for r in self._rows)


class IntMatrix(_Matrix):
    """Exact integer matrix."""

    @staticmethod
    def _coerce(x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"non-integer entry {x}")
            return int(x.numerator)
        if int(x) != x:
            raise ValueError(f"non-integer entry {x}")
        return int(x)

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m, n):
        return cls([[0] * n for _ in range(m)], n)


class RatMatrix(_Matrix):
    """Exact rational matrix; entries are Fractions in lowest terms."""

    _coerce = staticmethod(Fraction)


class SnfResult(NamedTuple):
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self):
        k = min(self.D.shape)
        return [self.D[i, i] for i in range(k) if self.D[i, i] != 0]


def as_int(M):
    return M if isinstance(M, IntMatrix) else IntMatrix(M)


def as_rat(M):
    return M if isinstance(M, RatMatrix) else RatMatrix(M)


def _ident(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def snf(M) -> SnfResult:
    """Smith normal form: returns (U, D, V) with U*M*V = D."""
    M = as_int(M)
    m, n = M.shape
    A = M.tolist()
    U = _ident(m)
    V = _ident(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for r in A:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    while t < min(m, n):
        # smallest nonzero pivot in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder into the pivot slot
                cands = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, i, j = min(cands)
                if i != t:
                    swap_rows(t, i)
                if j != t:
                    swap_cols(t, j)
                continue
            # divisibility: pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return SnfResult(IntMatrix(U, m), IntMatrix(A, n), IntMatrix(V, n))


def hnf_rows(rows: Sequence[Sequence[int]]):
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows: echelon, positive pivots, entries above
    each pivot reduced into [0, pivot).
    """
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    n = len(A[0])
    out = []
    r0 = 0
    for c in range(n):
        rowsc = [i for i in range(r0, len(A)) if A[i][c]]
        if not rowsc:
            continue
        while True:
            rowsc = [i for i in range(r0, len(A)) if A[i][c]]
            piv = min(rowsc, key=lambda i: abs(A[i][c]))
            A[r0], A[piv] = A[piv], A[r0]
            done = True
            for i in range(r0 + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[r0][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r0])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if A[r0][c] < 0:
            A[r0] = [-a for a in A[r0]]
        for i in range(r0):
            q = A[i][c] // A[r0][c]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r0])]
        r0 += 1
        if r0 == len(A):
            break
    out = [r for r in A[:r0]]
    return out


def rank(M) -> int:
    M = as_rat(M)
    return len(_echelon(M.tolist()))


def _echelon(A):
    """Gaussian elimination over Q; returns list of (pivot_col, row)."""
    A = [list(map(Fraction, r)) for r in A]
    piv = []
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
    return [(c, A[i]) for i, c in enumerate(piv)]


def det(M):
    """Exact determinant of a square matrix (Fraction for rational input)."""
    M = as_rat(M)
    n, m = M.shape
    if n != m:
        raise ValueError("det of non-square matrix")
    A = M.tolist()
    d = Fraction(1)
    for c in range(n):
        k = next((i for i in range(c, n) if A[i][c] != 0), None)
        if k is None:
            return 0
        if k != c:
            A[c], A[k] = A[k], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    if d.denominator == 1:
        return int(d)
    return d


def int_det(rows) -> int:
    """Determinant of a small integer matrix given as nested lists."""
    d = det(RatMatrix(rows)) if rows else 1
    return int(d)


def solve(A, B):
    """Solve A X = B exactly for X (A with independent columns).

    Raises ValueError if the system is inconsistent.
    """
    A = as_rat(A)
    B = as_rat(B)
    m, k = A.shape
    aug = [list(A.row(i)) + list(B.row(i)) for i in range(m)]
    ech = _echelon(aug)
    X = [[Fraction(0)] * B.ncols for _ in range(k)]
    pivots = [c for c, _ in ech]
    if pivots[:k] != list(range(k)) or any(c >= k for c in pivots):
        raise ValueError("inconsistent or rank-deficient system")
    for c, row in ech:
        X[c] = row[k:]
    return RatMatrix(X, B.ncols)


def inverse(M) -> RatMatrix:
    M = as_rat(M)
    return solve(M, RatMatrix(_ident(M.nrows)))


def kernel_basis(M) -> IntMatrix:
    """Columns form a Z-basis of {k : M k = 0}, in Hermite normal form."""
    M = as_int(M)
    m, n = M.shape
    if n == 0:
        return IntMatrix([], 0)
    res = snf(M)
    r = len(res.invariant_factors)
    vecs = [res.V.col(j) for j in range(r, n)]
    vecs = hnf_rows(vecs)
    if not vecs:
        return IntMatrix([[] for _ in range(n)], 0)
    return IntMatrix(vecs).T


def cokernel_presentation(B) -> IntMatrix:
    """Grading matrix pi with pi*B = 0 whose rows span the left kernel of B.

    ``B`` has the ray generators as rows.  Raises TorsionClassGroup when
    the cokernel of B has torsion.
    """
    B = as_int(B)
    if B.ncols and any(f != 1 for f in snf(B).invariant_factors):
        raise TorsionClassGroup(f"invariant factors {snf(B).invariant_factors}")
    K = kernel_basis(B.T)
    if K.ncols == 0:
        return IntMatrix([], B.nrows)
    return K.T


def maximal_minors_in_unit_set(B) -> bool:
    """True iff B has independent columns and every maximal minor is 0, 1 or -1."""
    B = as_int(B)
    m, k = B.shape
    if k > m:
        return False
    if k == 0:
        return True
    nonzero = False
    for rows in combinations(range(m), k):
        d = int_det([B.row(i) for i in rows])
        if d not in (0, 1, -1):
            return False
        nonzero = nonzero or d != 0
    return nonzero


def leftmost_maxrank_columns(M) -> list:
    """Indices of columns kept by a left-to-right greedy rank scan."""
    M = as_rat(M)
    kept = []
    basis = []  # echelon rows of the kept columns, for incremental rank
    for j in range(M.ncols):
        v = list(M.col(j))
        for pc, b in basis:
            if v[pc] != 0:
                f = v[pc] / b[pc]
                v = [x - f * y for x, y in zip(v, b)]
        nz = next((i for i, x in enumerate(v) if x != 0), None)
        if nz is not None:
            basis.append((nz, v))
            kept.append(j)
    return kept


def leftmost_maxrank_submatrix(M) -> RatMatrix:
    """Columns of M kept by a greedy left-to-right rank scan."""
    M = as_rat(M)
    idx = leftmost_maxrank_columns(M)
    return RatMatrix([[r[j] for j in idx] for r in M], len(idx))


def solve_integral(A, b):
    """Some integer x with A x = b, or None.  Uses the SNF of A."""
    A = as_int(A)
    U, D, V = snf(A)
    c = U @ tuple(b)
    k = min(D.shape)
    y = [0] * A.ncols
    for i in range(A.nrows):
        d = D[i, i] if i < k else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    return tuple(V @ tuple(y))


def sparse_rank(rows) -> int:
    """Rank over Q of a sparse integer matrix given as a list of {col: value} dicts.

    Fraction-free elimination; rows are divided by their content after each
    step so entries stay small on the boundary matrices this is used for.
    """
    pivots = {}
    r = 0
    for row in rows:
        row = {c: v for c, v in row.items() if v}
        while row:
            c = min(row)
            if c not in pivots:
                g = 0
                for v in row.values():
                    g = gcd(g, v)
                pivots[c] = {k: v // g for k, v in row.items()}
                r += 1
                break
            p = pivots[c]
            a, b = p[c], row[c]
            new = {k: a * v for k, v in row.items()}
            for k, v in p.items():
                new[k] = new.get(k, 0) - b * v
            row = {k: v for k, v in new.items() if v}
            g = 0
            for v in row.values():
                g = gcd(g, v)
            if g > 1:
                row = {k: v // g for k, v in row.items()}
    return r
