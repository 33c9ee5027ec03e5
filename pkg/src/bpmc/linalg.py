"""Exact rational linear algebra and the spectral-radius trichotomy.

Everything here works on :class:`fractions.Fraction`; floating point never
enters a decision.  Elimination is fraction-free (Bareiss) on integer rows,
with the first nonzero entry in column order as pivot.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import DimensionMismatch, NegativeEntry, NotIrreducible
from .graph import scc_decompose, Digraph


class Trichotomy(enum.IntEnum):
    """Position of a spectral radius relative to 1; ordered Less < Equal < Greater."""

    LESS = -1
    EQUAL = 0
    GREATER = 1

    def __str__(self) -> str:
        return self.name.capitalize()


@dataclass(frozen=True)
class RationalMatrix:
    """Square matrix indexed by an ordered key tuple, stored sparsely.

    Zero entries are never stored, so ``entries`` doubles as the edge set
    of the matrix graph.
    """

    keys: tuple[Hashable, ...]
    entries: Mapping[tuple[Hashable, Hashable], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("matrix keys must be unique")
        pos = set(self.keys)
        clean = {}
        for (r, c), v in self.entries.items():
            if r not in pos or c not in pos:
                raise KeyError(f"entry ({r!r}, {c!r}) outside key set")
            v = Fraction(v)
            if v != 0:
                clean[(r, c)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], keys: Sequence[Hashable] | None = None):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square")
        keys = tuple(range(n)) if keys is None else tuple(keys)
        ents = {
            (keys[i], keys[j]): Fraction(v)
            for i, row in enumerate(rows)
            for j, v in enumerate(row)
            if v != 0
        }
        return cls(keys, ents)

    @classmethod
    def identity(cls, keys: Sequence[Hashable]) -> "RationalMatrix":
        return cls(tuple(keys), {(k, k): Fraction(1) for k in keys})

    @property
    def n(self) -> int:
        return len(self.keys)

    def __getitem__(self, rc: tuple[Hashable, Hashable]) -> Fraction:
        return self.entries.get(rc, Fraction(0))

    def rows(self) -> list[list[Fraction]]:
        idx = {k: i for i, k in enumerate(self.keys)}
        out = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (r, c), v in self.entries.items():
            out[idx[r]][idx[c]] = v
        return out

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.keys, {(c, r): v for (r, c), v in self.entries.items()})

    def scale(self, c) -> "RationalMatrix":
        c = Fraction(c)
        return RationalMatrix(self.keys, {rc: v * c for rc, v in self.entries.items()})

    def submatrix(self, keys: Iterable[Hashable]) -> "RationalMatrix":
        keys = tuple(keys)
        ks = set(keys)
        return RationalMatrix(
            keys, {(r, c): v for (r, c), v in self.entries.items() if r in ks and c in ks}
        )

    def graph_edges(self) -> set[tuple[Hashable, Hashable]]:
        return set(self.entries)

    def digraph(self) -> Digraph:
        idx = {k: i for i, k in enumerate(self.keys)}
        return Digraph.from_edges(self.n, ((idx[r], idx[c]) for r, c in self.entries))

    def row_sums(self) -> dict[Hashable, Fraction]:
        sums = {k: Fraction(0) for k in self.keys}
        for (r, _), v in self.entries.items():
            sums[r] += v
        return sums

    def matvec(self, x: Sequence[Fraction]) -> list[Fraction]:
        idx = {k: i for i, k in enumerate(self.keys)}
        out = [Fraction(0)] * self.n
        for (r, c), v in self.entries.items():
            out[idx[r]] += v * x[idx[c]]
        return out

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self.entries.values())


def _as_rows(A) -> list[list[Fraction]]:
    if isinstance(A, RationalMatrix):
        return A.rows()
    rows = [[Fraction(v) for v in row] for row in A]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("matrix must be square")
    return rows


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        m = lcm(*(v.denominator for v in row)) if row else 1
        out.append([int(v * m) for v in row])
    return out


def bareiss_echelon(rows: Sequence[Sequence[Fraction]], ncols: int | None = None):
    """Fraction-free row echelon form.

    Only the first ``ncols`` columns are eligible as pivots (the rest are the
    augmented right-hand side).  Returns ``(E, pivots)`` with ``E`` an integer
    matrix and ``pivots`` the pivot column of each nonzero row.
    """
    A = _integer_rows(rows)
    m = len(A)
    width = len(A[0]) if A else 0
    ncols = width if ncols is None else ncols
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            A[p], A[r] = A[r], A[p]
        piv = A[r][c]
        Ar = A[r]
        for i in range(r + 1, m):
            Ai = A[i]
            a = Ai[c]
            for j in range(c + 1, width):
                Ai[j] = (piv * Ai[j] - a * Ar[j]) // prev
            Ai[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return A, pivots


def _back_substitute(E, pivots, rhs_col: int | None, free_values: dict[int, Fraction], ncols: int):
    x = [Fraction(0)] * ncols
    for c, v in free_values.items():
        x[c] = v
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = E[r]
        acc = Fraction(row[rhs_col]) if rhs_col is not None else Fraction(0)
        for j in range(c + 1, ncols):
            if row[j]:
                acc -= row[j] * x[j]
        x[c] = acc / row[c]
    return x


def solve_linear(A, b: Sequence) -> list[Fraction] | None:
    """Exact solution of ``A x = b`` (free variables set to 0), or None if inconsistent."""
    rows = _as_rows(A)
    n = len(rows)
    if len(b) != n:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {n}")
    aug = [row + [Fraction(bi)] for row, bi in zip(rows, b)]
    E, pivots = bareiss_echelon(aug, ncols=n)
    for r in range(len(pivots), n):
        if E[r][n] != 0:
            return None
    return _back_substitute(E, pivots, n, {}, n)


def null_space_basis(A) -> list[list[Fraction]]:
    """Basis of the kernel of ``A``, one vector per non-pivot column."""
    rows = _as_rows(A)
    n = len(rows)
    if n == 0:
        return []
    E, pivots = bareiss_echelon(rows)
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        vals = {c: Fraction(0) for c in free}
        vals[f] = Fraction(1)
        basis.append(_back_substitute(E, pivots, None, vals, n))
    return basis


def _i_minus(M: RationalMatrix) -> list[list[Fraction]]:
    rows = M.rows()
    for i in range(len(rows)):
        rows[i] = [-v for v in rows[i]]
        rows[i][i] += 1
    return rows


def _check_nonnegative(M: RationalMatrix) -> None:
    bad = [(rc, v) for rc, v in M.entries.items() if v < 0]
    if bad:
        raise NegativeEntry(f"negative entry at {bad[0][0]!r}: {bad[0][1]}")


def rho_trichotomy_irreducible(M: RationalMatrix) -> Trichotomy:
    """Compare the spectral radius of an irreducible nonnegative matrix with 1.

    1. If ker(I - M) is one-dimensional and spanned by a strictly positive
       vector, rho = 1 (only the Perron root has a positive eigenvector).
    2. Otherwise, if (I - M) x = 1 has a nonnegative solution, rho < 1
       (Collatz-Wielandt: M x = x - 1 < x).
    3. Otherwise rho > 1.
    """
    _check_nonnegative(M)
    if M.n == 0 or not M.entries:
        raise NotIrreducible("matrix has no edges")
    if len(scc_decompose(M.digraph()).sccs) != 1:
        raise NotIrreducible("matrix graph is not strongly connected")
    if M.n == 1:
        v = next(iter(M.entries.values()))
        return Trichotomy((v > 1) - (v < 1))
    IM = _i_minus(M)
    ker = null_space_basis(IM)
    if len(ker) == 1:
        v = ker[0]
        if all(x > 0 for x in v) or all(x < 0 for x in v):
            return Trichotomy.EQUAL
    x = solve_linear(IM, [1] * M.n)
    if x is not None and all(xi >= 0 for xi in x):
        return Trichotomy.LESS
    return Trichotomy.GREATER


def rho_trichotomy(M: RationalMatrix) -> Trichotomy:
    """Spectral radius vs 1 for any nonnegative matrix: the max over its SCC blocks."""
    _check_nonnegative(M)
    dec = scc_decompose(M.digraph())
    best = Trichotomy.LESS
    for members, nontrivial in zip(dec.sccs, dec.nontrivial):
        if not nontrivial:
            continue
        t = rho_trichotomy_irreducible(M.submatrix(M.keys[i] for i in members))
        if t > best:
            best = t
            if best is Trichotomy.GREATER:
                break
    return best
