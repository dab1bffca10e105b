"""Exact integer lattice algebra on row lattices.

Matrices are lists of rows of Python ints.  Every lattice here is the integer
row span of a matrix.  Hermite form is row style: echelon, positive pivots,
entries above a pivot reduced into [0, pivot).
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence, TextIO

import numpy as np

Matrix = list  # list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    Bt = list(zip(*B)) if B else []
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def vecmat(v: Sequence[int], A: Matrix) -> list[int]:
    if not A:
        return []
    out = [0] * len(A[0])
    for c, row in zip(v, A):
        if c:
            for j, x in enumerate(row):
                if x:
                    out[j] += c * x
    return out


def det(A: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _row_axpy(dst: list, src: list, q: int, start: int = 0) -> None:
    # dst -= q * src
    for j in range(start, len(dst)):
        s = src[j]
        if s:
            dst[j] -= q * s


def hnf(M: Matrix, transform: bool = True) -> tuple[Matrix, Matrix | None]:
    """Row Hermite normal form.  Returns (H, U) with U unimodular and U M = H.

    Zero rows of H sit at the bottom.  ``U`` is None when transform is False.
    """
    m = len(M)
    ncols = len(M[0]) if m else 0
    H = [list(r) for r in M]
    U = identity(m) if transform else None
    r = 0
    for j in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][j]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][j]))
            if p != r:
                H[r], H[p] = H[p], H[r]
                if U is not None:
                    U[r], U[p] = U[p], U[r]
            if len(nz) == 1:
                break
            a = H[r][j]
            for i in range(r + 1, m):
                b = H[i][j]
                if b:
                    q = b // a
                    _row_axpy(H[i], H[r], q, j)
                    if U is not None:
                        _row_axpy(U[i], U[r], q)
        if not H[r][j]:
            continue
        if H[r][j] < 0:
            H[r] = [-x for x in H[r]]
            if U is not None:
                U[r] = [-x for x in U[r]]
        piv = H[r][j]
        for i in range(r):
            q = H[i][j] // piv
            if q:
                _row_axpy(H[i], H[r], q, j)
                if U is not None:
                    _row_axpy(U[i], U[r], q)
        r += 1
    return H, U


def hnf_basis(M: Matrix) -> Matrix:
    """Nonzero rows of the Hermite form: the canonical basis of the row lattice."""
    H, _ = hnf(M, transform=False)
    return [row for row in H if any(row)]


def rank(M: Matrix) -> int:
    return len(hnf_basis(M)) if M else 0


def rank_mod_p(M, p: int = 2_147_483_629) -> int:
    """Rank over F_p.  A lower bound for the rational rank, equal for all but
    finitely many p."""
    A = np.array(M, dtype=np.int64) % p
    if A.size == 0:
        return 0
    m, n = A.shape
    r = 0
    for j in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, j])[0]
        if not len(nz):
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, j]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[r + 1:, j].copy()
        rows = np.nonzero(col)[0]
        if len(rows):
            # split the product so intermediate values stay below 2^63
            hi, lo = A[r] >> 16, A[r] & 0xFFFF
            c = col[rows][:, None]
            upd = (((c * hi) % p) * 65536 + c * lo) % p
            A[r + 1 + rows] = (A[r + 1 + rows] - upd) % p
        r += 1
    return r


@dataclass
class SmithForm:
    D: Matrix
    U: Matrix | None
    V: Matrix | None
    factors: list  # nonzero diagonal entries d1 | d2 | ...

    @property
    def rank(self) -> int:
        return len(self.factors)


def smith(M: Matrix, transforms: bool = True) -> SmithForm:
    """Smith normal form with U M V = D by gcd-driven elementary operations."""
    m = len(M)
    n = len(M[0]) if m else 0
    A = [list(r) for r in M]
    U = identity(m) if transforms else None
    V = identity(n) if transforms else None

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        if U is not None:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in A:
            row[j], row[k] = row[k], row[j]
        if V is not None:
            for row in V:
                row[j], row[k] = row[k], row[j]

    def col_axpy(dst, src, q):
        # col dst -= q * col src
        for row in A:
            if row[src]:
                row[dst] -= q * row[src]
        if V is not None:
            for row in V:
                if row[src]:
                    row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // piv
                    _row_axpy(A[i], A[t], q, t)
                    if U is not None:
                        _row_axpy(U[i], U[t], q)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // piv
                    col_axpy(j, t, q)
                    if A[t][j]:
                        dirty = True
            if dirty:
                # a remainder survived: move the smallest entry of row/col t to the pivot
                cands = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cands)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # pivot must divide the remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            for j in range(t, n):
                A[t][j] += A[bad][j]
            if U is not None:
                for j in range(m):
                    U[t][j] += U[bad][j]
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    factors = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    return SmithForm(A, U, V, factors)


def snf(M: Matrix) -> tuple[Matrix, list]:
    s = smith(M, transforms=False)
    return s.D, s.factors


def solve_in_lattice(v: Sequence[int], basis: Matrix) -> list | None:
    """Coefficients c with c . basis = v for an echelon basis, or None."""
    x = list(v)
    coeffs = []
    for row in basis:
        j = next(k for k, y in enumerate(row) if y)
        if any(x[:j]):
            return None
        q, rem = divmod(x[j], row[j])
        if rem:
            return None
        coeffs.append(q)
        if q:
            _row_axpy(x, row, q, j)
    if any(x):
        return None
    return coeffs


def membership(v: Sequence[int], L: Matrix) -> list | None:
    """Integer coefficients c with c . L = v (one per row of L), or None."""
    if not L:
        return [] if not any(v) else None
    H, U = hnf(L)
    r = sum(1 for row in H if any(row))
    c = solve_in_lattice(v, H[:r])
    if c is None:
        return None
    return vecmat(c, U[:r])


def saturation(L: Matrix, n: int | None = None) -> Matrix:
    """Hermite basis of (rational span of L) intersected with Z^n."""
    if not L or not any(any(r) for r in L):
        return []
    s = smith(L)
    Vinv = inverse_unimodular(s.V)
    return hnf_basis(Vinv[:s.rank])


def inverse_unimodular(V: Matrix) -> Matrix:
    n = len(V)
    aug = [list(V[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    H, _ = hnf(aug, transform=False)
    # H = W [V | I] with W V = Hermite form of V = I (V is unimodular)
    if any(H[i][j] != int(i == j) for i in range(n) for j in range(n)):
        raise ValueError("matrix is not unimodular")
    return [row[n:] for row in H]


def quotient_invariants(L: Matrix, n: int) -> tuple[list, int]:
    """(nontrivial invariant factors, free rank) of Z^n / L."""
    if not L:
        return [], n
    factors = snf(L)[1]
    return [d for d in factors if d != 1], n - len(factors)


@dataclass
class QuotientCoords:
    """Coordinates of Z^n / L from the Smith column transform.

    ``x -> x V``; coordinate i is free when ``factors[i] == 0`` and lives in
    Z/factors[i] otherwise.  Coordinates with factor 1 are dropped.
    """

    V: Matrix
    factors: list  # one per kept column
    columns: list

    @classmethod
    def of(cls, L: Matrix, n: int) -> "QuotientCoords":
        if L and any(any(r) for r in L):
            s = smith(L)
            V = s.V
            diag = s.factors + [0] * (n - s.rank)
        else:
            V, diag = identity(n), [0] * n
        cols = [j for j, d in enumerate(diag) if d != 1]
        return cls(V, [diag[j] for j in cols], cols)

    def __call__(self, x: Sequence[int]) -> list:
        y = vecmat(x, self.V)
        return [y[j] % d if d else y[j] for j, d in zip(self.columns, self.factors)]


def is_primitive(v: Sequence[int], B: Matrix, n: int | None = None) -> bool:
    """True when the image of v in Z^n / B is nonzero and not k*h for k > 1.

    Requires Z^n / B to be torsion free.
    """
    n = len(v) if n is None else n
    q = QuotientCoords.of(B, n)
    if any(q.factors):
        raise ValueError("quotient has torsion; primitivity undefined here")
    g = 0
    for x in q(v):
        g = gcd(g, x)
    return g == 1


class Lattice:
    """Incrementally grown row lattice kept in Hermite form.

    Intended for many insertions and membership queries against a slowly
    changing lattice.
    """

    __slots__ = ("n", "rows", "pivots")

    def __init__(self, n: int, vectors: Iterable[Sequence[int]] = ()):
        self.n = n
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []
        for v in vectors:
            self.add(v)

    def copy(self) -> "Lattice":
        other = Lattice(self.n)
        other.rows = [list(r) for r in self.rows]
        other.pivots = list(self.pivots)
        return other

    @property
    def rank(self) -> int:
        return len(self.rows)

    def basis(self) -> Matrix:
        self.canonicalize()
        return [list(r) for r in self.rows]

    def _reduce(self, v: Sequence[int]) -> list:
        x = [int(t) for t in v]
        for row, j in zip(self.rows, self.pivots):
            if x[j]:
                _row_axpy(x, row, x[j] // row[j], j)
        return x

    def __contains__(self, v: Sequence[int]) -> bool:
        return not any(self._reduce(v))

    def add(self, v: Sequence[int]) -> bool:
        """Insert v; return True when the lattice grew."""
        x = self._reduce(v)
        if not any(x):
            return False
        rows, pivots = self.rows, self.pivots
        while True:
            j = next(k for k, y in enumerate(x) if y)
            if j in pivots:
                idx = pivots.index(j)
                row = rows[idx]
                # gcd step between x and the pivot row on column j
                a, b = row[j], x[j]
                g, s, t = _xgcd(a, b)
                new_row = [s * p + t * q for p, q in zip(row, x)]
                x = [(a // g) * q - (b // g) * p for p, q in zip(row, x)]
                rows[idx] = new_row
                self._normalize(idx)
                x = self._reduce(x)
                if not any(x):
                    return True
                continue
            idx = 0
            while idx < len(pivots) and pivots[idx] < j:
                idx += 1
            rows.insert(idx, x)
            pivots.insert(idx, j)
            self._normalize(idx)
            return True

    def _normalize(self, idx: int) -> None:
        row, j = self.rows[idx], self.pivots[idx]
        if row[j] < 0:
            row[:] = [-y for y in row]
        for k in range(idx + 1, len(self.rows)):
            jj = self.pivots[k]
            q = row[jj] // self.rows[k][jj]
            if q:
                _row_axpy(row, self.rows[k], q, jj)
        piv = row[j]
        for k in range(idx):
            other = self.rows[k]
            q = other[j] // piv
            if q:
                _row_axpy(other, row, q, j)

    def canonicalize(self) -> None:
        """Reduce every entry above a pivot into [0, pivot)."""
        for k, (row, j) in enumerate(zip(self.rows, self.pivots)):
            for i in range(k):
                q = self.rows[i][j] // row[j]
                if q:
                    _row_axpy(self.rows[i], row, q, j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice) or self.n != other.n:
            return False
        self.canonicalize()
        other.canonicalize()
        return self.rows == other.rows

    def quotient_invariants(self) -> tuple[list, int]:
        return quotient_invariants(self.basis(), self.n)

    def index_product(self) -> int:
        """Product of pivots; equals |torsion of Z^n/L| when L is full rank."""
        p = 1
        for row, j in zip(self.rows, self.pivots):
            p *= row[j]
        return p


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    # returns (g, s, t) with s*a + t*b = g > 0
    x0, x1, y0, y1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q, r = divmod(aa, bb)
        aa, bb = bb, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if aa < 0:
        aa, x0, y0 = -aa, -x0, -y0
    return aa, x0, y0


class FullRankFilter:
    """Fast batch membership against a full-rank lattice via its finite quotient.

    Maps vectors into Z^n / L = (+) Z/d_i using Smith coordinates reduced mod
    d_i; a vector is in L exactly when every coordinate vanishes.
    """

    def __init__(self, lattice: Lattice):
        if lattice.rank != lattice.n:
            raise ValueError("lattice must be full rank")
        q = QuotientCoords.of(lattice.basis(), lattice.n)
        self.factors = q.factors
        if not q.columns:
            self.P = np.zeros((lattice.n, 0), dtype=np.int64)
        else:
            P = np.array([[q.V[i][j] % d for j, d in zip(q.columns, q.factors)]
                          for i in range(lattice.n)], dtype=object)
            self.P = P.astype(np.int64)
        self.mods = np.array(self.factors, dtype=np.int64)

    @property
    def trivial(self) -> bool:
        return not self.factors

    def outside(self, X: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of X that are not in the lattice."""
        if self.trivial:
            return np.zeros(len(X), dtype=bool)
        R = (np.asarray(X, dtype=np.int64) @ self.P) % self.mods
        return R.any(axis=1)


@dataclass
class SpanReport:
    ambient_rank: int           # rank of the ambient homology group
    span_rank: int              # rank of the span inside it
    invariant_factors: list     # nontrivial torsion factors of ambient / span
    verdict: str                # "equal", "finite-index" or "rank-deficient"
    rank_defect: int = 0
    witnesses: list = field(default_factory=list)
    rational_equal: bool = False

    @property
    def index(self) -> int | None:
        if self.rank_defect:
            return None
        p = 1
        for d in self.invariant_factors:
            p *= d
        return p

    def to_dict(self) -> dict:
        return {
            "ambient_rank": self.ambient_rank,
            "span_rank": self.span_rank,
            "invariant_factors": list(self.invariant_factors),
            "rank_defect": self.rank_defect,
            "verdict": self.verdict,
            "rational_equal": self.rational_equal,
            "index": self.index,
            "witnesses": [list(w) for w in self.witnesses],
        }


def span_verdict(factors: list, defect: int) -> str:
    if defect:
        return "rank-deficient"
    if factors:
        return "finite-index"
    return "equal"


def write_triplets(M: Matrix, out: TextIO, ncols: int | None = None) -> None:
    rows = len(M)
    cols = ncols if ncols is not None else (len(M[0]) if M else 0)
    out.write(f"{rows} {cols}\n")
    for i, row in enumerate(M):
        for j, x in enumerate(row):
            if x:
                out.write(f"{i} {j} {x}\n")


def read_triplets(src: TextIO | str) -> Matrix:
    if isinstance(src, str):
        src = io.StringIO(src)
    header = src.readline().split()
    m, n = int(header[0]), int(header[1])
    M = zeros(m, n)
    for line in src:
        parts = line.split()
        if not parts:
            continue
        i, j, x = int(parts[0]), int(parts[1]), int(parts[2])
        M[i][j] = x
    return M
