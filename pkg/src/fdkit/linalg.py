"""Exact linear algebra over F_p plus integer matrix rank.

All matrices are numpy int64 arrays with entries reduced mod p.  Row vectors
span subspaces; reduced row echelon form is the canonical representative, so
subspace equality is matrix equality.  Integer ranks (for the free abelian
group K(A)) are computed fraction-free over Z, never mod p.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def asmod(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def zeros(shape) -> np.ndarray:
    return np.zeros(shape, dtype=np.int64)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # entries < p and p^2 * inner-dim stays far below 2^63
    return (a @ b) % p


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices).

    Zero rows are dropped, pivots are 1 and alone in their column.
    """
    a = asmod(mat, p).copy()
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        other = np.nonzero(a[:, c])[0]
        other = other[other != r]
        if other.size:
            a[other] = (a[other] - np.outer(a[other, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return rref(mat, p)[0].shape[0]


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {x : mat @ x = 0}, in rref."""
    a = np.asarray(mat, dtype=np.int64)
    m, n = a.shape
    r, pivots = rref(a, p)
    free = [j for j in range(n) if j not in pivots]
    out = zeros((len(free), n))
    for k, j in enumerate(free):
        out[k, j] = 1
        for i, c in enumerate(pivots):
            out[k, c] = (-int(r[i, j])) % p
    # already echelon up to row order; normalize for canonical form
    return rref(out, p)[0] if out.size else out


def solve(mat: np.ndarray, rhs: np.ndarray, p: int):
    """One particular solution x of mat @ x = rhs, or None."""
    a = asmod(mat, p)
    b = asmod(rhs, p).reshape(-1)
    m, n = a.shape
    aug = np.concatenate([a, b.reshape(m, 1)], axis=1)
    r, pivots = rref(aug, p)
    x = zeros(n)
    for i, c in enumerate(pivots):
        if c == n:
            return None
        x[c] = r[i, n]
    return x


def inverse(mat: np.ndarray, p: int) -> np.ndarray:
    a = asmod(mat, p)
    n = a.shape[0]
    aug = np.concatenate([a, eye(n)], axis=1)
    r, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix not invertible mod p")
    return r[:, n:]


class RowBasis:
    """Canonical row space over F_p: rref rows plus pivot bookkeeping.

    Because the rows are fully reduced, coordinates of a member vector can be
    read off the pivot columns directly.
    """

    __slots__ = ("p", "rows", "pivots", "ncols")

    def __init__(self, rows: np.ndarray, p: int, *, reduced: bool = False):
        rows = asmod(rows, p)
        if rows.ndim != 2:
            raise ValueError("RowBasis expects a 2-d array")
        self.p = p
        self.ncols = rows.shape[1]
        if reduced:
            self.rows = rows
            self.pivots = _find_pivots(rows)
        else:
            self.rows, self.pivots = rref(rows, p)

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def coords(self, v: np.ndarray):
        """Coefficients c with c @ rows == v, or None if v not in the span."""
        v = asmod(v, self.p)
        c = v[self.pivots] if self.dim else zeros(0)
        if self.dim:
            residual = (v - c @ self.rows) % self.p
        else:
            residual = v
        if np.any(residual):
            return None
        return c

    def coords_matrix(self, vs: np.ndarray):
        """Row-wise coords for a stack of member vectors (None if any fails)."""
        vs = asmod(vs, self.p)
        cs = vs[:, self.pivots] if self.dim else zeros((vs.shape[0], 0))
        residual = (vs - cs @ self.rows) % self.p if self.dim else vs
        if np.any(residual):
            return None
        return cs

    def contains_vector(self, v: np.ndarray) -> bool:
        return self.coords(v) is not None

    def contains_rows(self, other: np.ndarray) -> bool:
        return self.coords_matrix(asmod(other, self.p)) is not None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RowBasis)
            and self.p == other.p
            and self.rows.shape == other.rows.shape
            and bool(np.array_equal(self.rows, other.rows))
        )

    def __hash__(self):
        return hash((self.p, self.rows.shape, self.rows.tobytes()))


def _find_pivots(reduced_rows: np.ndarray) -> list[int]:
    pivots = []
    for row in reduced_rows:
        nz = np.nonzero(row)[0]
        pivots.append(int(nz[0]))
    return pivots


def intersect_rowspaces(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """rref basis of rowspace(a) ∩ rowspace(b) (Zassenhaus-style)."""
    a = asmod(a, p)
    b = asmod(b, p)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return zeros((0, a.shape[1]))
    # x @ a = y @ b  <=>  (x | y) in nullspace of [a ; -b]^T
    stacked = np.concatenate([a, (-b) % p], axis=0)
    ns = nullspace(stacked.T, p)
    xs = ns[:, : a.shape[0]]
    inter = matmul(xs, a, p)
    return rref(inter, p)[0]


def complement_pivots(rows_rref: np.ndarray, pivots: list[int], n: int) -> list[int]:
    """Coordinate positions spanning a complement of a row space in F_p^n."""
    return [j for j in range(n) if j not in pivots]


def int_matrix_rank(rows) -> int:
    """Rank over Q of a matrix with (small) integer entries, exactly.

    Fraction-based Gaussian elimination; sizes here are tiny (rows indexed by
    module summands, columns by iso-classes), so clarity beats speed.
    """
    m = [[Fraction(int(x)) for x in row] for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank_ = 0
    row_idx = 0
    for c in range(ncols):
        piv = None
        for i in range(row_idx, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[row_idx], m[piv] = m[piv], m[row_idx]
        inv = 1 / m[row_idx][c]
        m[row_idx] = [x * inv for x in m[row_idx]]
        for i in range(len(m)):
            if i != row_idx and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[row_idx])]
        rank_ += 1
        row_idx += 1
        if row_idx == len(m):
            break
    return rank_
