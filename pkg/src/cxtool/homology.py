"""Integer homology of Delta complexes via Smith normal form.

All arithmetic is on Python ints.  Boundary matrices are sparse and have
mostly unit entries, so unit pivots are eliminated first on the sparse
form; whatever is left goes through a dense gcd-reducing Smith reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import DeltaComplex


class IntegerMatrix:
    """Sparse integer matrix; ``entries`` maps (row, col) to a nonzero int."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {k: v for k, v in (entries or {}).items() if v}

    @classmethod
    def from_dense(cls, a):
        rows = len(a)
        cols = len(a[0]) if rows else 0
        return cls(rows, cols, {(i, j): int(x) for i, row in enumerate(a) for j, x in enumerate(row) if x})

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        by_row = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out = {}
        for (i, k), u in self.entries.items():
            for j, v in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + u * v
        return IntegerMatrix(self.rows, other.cols, out)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"IntegerMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


@dataclass
class SnfResult:
    factors: tuple
    rank: int
    left: list = None  # U with U @ M @ V = D, only when transforms were requested
    right: list = None
    diagonal: list = None


def smith_normal_form(M, transforms=False) -> SnfResult:
    """Invariant factors d_1 | d_2 | ... of an integer matrix.

    ``M`` is an :class:`IntegerMatrix` or a list of rows.  With
    ``transforms`` the unimodular ``left``/``right`` matrices are returned
    as well (dense, slow; meant for debugging).
    """
    if not isinstance(M, IntegerMatrix):
        M = IntegerMatrix.from_dense(M)
    if transforms:
        D, U, V = _snf_dense(M.to_dense(), track=True)
        factors = _diag(D)
        return SnfResult(tuple(factors), len(factors), U, V, D)

    rows = {}
    cols = {}
    for (i, j), v in M.entries.items():
        rows.setdefault(i, {})[j] = v
        cols.setdefault(j, set()).add(i)
    ones = 0
    while True:
        pivot = _find_unit(rows)
        if pivot is None:
            break
        r, c = pivot
        prow = rows.pop(r)
        a = prow[c]
        for r2 in list(cols[c]):
            if r2 == r:
                continue
            row2 = rows[r2]
            mult = row2[c] * a  # a = +-1, so a^-1 = a
            for j, v in prow.items():
                nv = row2.get(j, 0) - mult * v
                if nv:
                    if j not in row2:
                        cols.setdefault(j, set()).add(r2)
                    row2[j] = nv
                else:
                    row2.pop(j, None)
                    cols[j].discard(r2)
            if not row2:
                del rows[r2]
        for j in prow:
            cols[j].discard(r)
        del cols[c]
        ones += 1

    rest = [r for r in rows if rows[r]]
    rest_cols = sorted({j for r in rest for j in rows[r]})
    factors = [1] * ones
    if rest:
        cidx = {j: k for k, j in enumerate(rest_cols)}
        dense = [[0] * len(rest_cols) for _ in rest]
        for k, r in enumerate(rest):
            for j, v in rows[r].items():
                dense[k][cidx[j]] = v
        D, _, _ = _snf_dense(dense)
        factors += _diag(D)
    return SnfResult(tuple(factors), len(factors))


def _find_unit(rows):
    best = None
    for r, row in rows.items():
        for c, v in row.items():
            if v in (1, -1):
                # prefer short rows: less fill-in
                if best is None or len(row) < best[0]:
                    best = (len(row), r, c)
                    if best[0] == 1:
                        return r, c
                break
    return None if best is None else (best[1], best[2])


def _diag(D):
    out = []
    for i in range(min(len(D), len(D[0]) if D else 0)):
        if D[i][i]:
            out.append(abs(D[i][i]))
    return out


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _snf_dense(A, track=False):
    A = [list(r) for r in A]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m) if track else None
    V = _identity(n) if track else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if track:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        A[dst] = [x + k * y for x, y in zip(A[dst], A[src])]
        if track:
            U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        if track:
            for row in V:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        done = False
                        if abs(A[i][t]) < abs(A[t][t]):
                            swap_rows(t, i)
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        done = False
                        if abs(A[t][j]) < abs(A[t][t]):
                            swap_cols(t, j)
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if track:
                U[t] = [-x for x in U[t]]
        t += 1
    return A, U, V


def rank_mod_p(M: IntegerMatrix, p: int) -> int:
    """Rank over Z/p; a cross-check only, never used for the integer result."""
    rows = {}
    for (i, j), v in M.entries.items():
        if v % p:
            rows.setdefault(i, {})[j] = v % p
    rank = 0
    pivots = {}
    for i in sorted(rows):
        row = dict(rows[i])
        while row:
            c = min(row)
            if c not in pivots:
                inv = pow(row[c], -1, p)
                pivots[c] = {j: v * inv % p for j, v in row.items()}
                rank += 1
                break
            prow = pivots[c]
            a = row[c]
            for j, v in prow.items():
                nv = (row.get(j, 0) - a * v) % p
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)
    return rank


# -- homology ---------------------------------------------------------------

def boundary_matrices(X: DeltaComplex) -> list:
    """``[d_1, ..., d_top]``; ``d_k`` has a column per k-simplex, a row per (k-1)-simplex."""
    out = []
    for k in range(1, X.top_dimension + 1):
        row_of = {s: i for i, s in enumerate(X.simplices[k - 1])}
        entries = {}
        for j, s in enumerate(X.simplices[k]):
            for i, f in enumerate(X.facets[s]):
                key = (row_of[f], j)
                entries[key] = entries.get(key, 0) + (-1) ** i
        out.append(IntegerMatrix(len(X.simplices[k - 1]), len(X.simplices[k]), entries))
    return out


@dataclass
class HomologyProfile:
    betti: tuple
    torsion: tuple = field(default_factory=tuple)

    def to_json(self):
        return {"betti": list(self.betti), "torsion": [list(t) for t in self.torsion]}

    def euler_characteristic(self):
        return sum((-1) ** k * b for k, b in enumerate(self.betti))


def homology_groups(X: DeltaComplex) -> HomologyProfile:
    counts = X.f_vector()
    snfs = [smith_normal_form(d) for d in boundary_matrices(X)]
    ranks = [0] + [s.rank for s in snfs] + [0]
    betti = tuple(counts[k] - ranks[k] - ranks[k + 1] for k in range(len(counts)))
    torsion = tuple(
        tuple(d for d in (snfs[k].factors if k < len(snfs) else ()) if d > 1) for k in range(len(counts))
    )
    return HomologyProfile(betti, torsion)


def betti_numbers_mod_p(X: DeltaComplex, p: int) -> tuple:
    counts = X.f_vector()
    ranks = [0] + [rank_mod_p(d, p) for d in boundary_matrices(X)] + [0]
    return tuple(counts[k] - ranks[k] - ranks[k + 1] for k in range(len(counts)))
