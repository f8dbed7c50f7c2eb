"""Exact integer linear algebra.

Matrices are numpy arrays of ``dtype=object`` holding Python ints, so every
entry is an arbitrary-precision integer and ``@`` stays exact. Nothing in this
module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np

from .errors import ConsistencyError, NotASublattice, RankMismatch


def int_matrix(rows, shape=None) -> np.ndarray:
    """Build an exact integer matrix from nested sequences.

    ``shape`` is only needed for matrices with no rows, whose column count
    cannot be inferred.
    """
    if isinstance(rows, np.ndarray) and rows.dtype == object and rows.ndim == 2:
        return rows.copy()
    rows = [[int(x) for x in row] for row in rows]
    if not rows:
        if shape is None:
            shape = (0, 0)
        return np.zeros(shape, dtype=object)
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != out.shape[1]:
            raise ValueError("ragged matrix")
        out[i, :] = row
    return out


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=object)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=object)


def diagonal(entries) -> np.ndarray:
    entries = list(entries)
    out = zeros(len(entries), len(entries))
    for i, d in enumerate(entries):
        out[i, i] = d
    return out


def to_lists(M) -> list[list[int]]:
    return [[int(x) for x in row] for row in np.asarray(M)]


def is_integral(M) -> bool:
    return all(Fraction(x).denominator == 1 for x in np.asarray(M).flat)


def det(M) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in np.asarray(M)]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def minor(M, i: int, j: int) -> np.ndarray:
    M = np.asarray(M)
    return np.delete(np.delete(M, i, axis=0), j, axis=1)


def adjugate(M) -> np.ndarray:
    """Adjugate via cofactors; ``adj(M) @ M == det(M) * I``."""
    M = np.asarray(M)
    n = M.shape[0]
    out = zeros(n, n)
    if n == 1:
        out[0, 0] = 1
        return out
    for i in range(n):
        for j in range(n):
            out[j, i] = (-1) ** (i + j) * det(minor(M, i, j))
    return out


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """A finite abelian group ``Z/d1 + ... + Z/dk`` with ``d_i | d_{i+1}``.

    Factors equal to one are never stored; the empty tuple is the trivial
    group.
    """

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        if any(d < 2 for d in factors):
            raise ValueError(f"invariant factors must be >= 2, got {factors}")
        for a, b in zip(factors, factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors {factors} do not form a divisor chain")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def from_diagonal(cls, entries) -> FiniteAbelianGroup:
        """Group ``+ Z/e`` over arbitrary positive orders ``e``, renormalized."""
        entries = [abs(int(e)) for e in entries]
        if any(e == 0 for e in entries):
            raise ValueError("infinite cyclic summand in a finite group")
        return cokernel(diagonal(entries))[0]

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def __str__(self):
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)

    def factors_line(self) -> str:
        return " ".join(str(d) for d in self.invariant_factors)


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == D`` with ``U, V`` unimodular and ``Uinv = U^-1``."""

    D: np.ndarray
    U: np.ndarray
    V: np.ndarray
    Uinv: np.ndarray
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d != 0)


def smith_normal_form(A) -> SnfResult:
    """Smith normal form with transforms.

    Pivoting picks the smallest nonzero absolute value in the active block and
    eliminates its row and column, repivoting on remainders, then repairs
    divisibility by folding an offending row into the pivot row.
    """
    A = int_matrix(A) if not isinstance(A, np.ndarray) else A.astype(object)
    D = A.copy()
    m, n = D.shape
    U, Uinv, V = identity(m), identity(m), identity(n)

    def swap_rows(i, j):
        if i != j:
            D[[i, j]] = D[[j, i]]
            U[[i, j]] = U[[j, i]]
            Uinv[:, [i, j]] = Uinv[:, [j, i]]

    def swap_cols(i, j):
        if i != j:
            D[:, [i, j]] = D[:, [j, i]]
            V[:, [i, j]] = V[:, [j, i]]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] += q * D[src]
        U[dst] += q * U[src]
        Uinv[:, src] -= q * Uinv[:, dst]

    def add_col(dst, src, q):
        D[:, dst] += q * D[:, src]
        V[:, dst] += q * V[:, src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = D[i, j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = D[t, t]
            for i in range(t + 1, m):
                q = D[i, t] // p
                if q:
                    add_row(i, t, -q)
            for j in range(t + 1, n):
                q = D[t, j] // p
                if q:
                    add_col(j, t, -q)
            best = None
            for i in range(t + 1, m):
                if D[i, t] and (best is None or abs(D[i, t]) < best[0]):
                    best = (abs(D[i, t]), i, "row")
            for j in range(t + 1, n):
                if D[t, j] and (best is None or abs(D[t, j]) < best[0]):
                    best = (abs(D[t, j]), j, "col")
            if best is not None:
                if best[2] == "row":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i, j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t, t] < 0:
            D[t] = -D[t]
            U[t] = -U[t]
            Uinv[:, t] = -Uinv[:, t]

    factors = tuple(int(D[i, i]) for i in range(min(m, n)))
    if not (U @ A @ V == D).all():
        raise ConsistencyError("Smith normal form transform check failed")
    if not (U @ Uinv == identity(m)).all():
        raise ConsistencyError("Smith normal form inverse check failed")
    return SnfResult(D=D, U=U, V=V, Uinv=Uinv, invariant_factors=factors)


def cokernel(A, rows: int | None = None) -> tuple[FiniteAbelianGroup, int]:
    """Torsion part and free rank of ``Z^rows / A Z^cols``."""
    A = _as_matrix(A, rows)
    snf = smith_normal_form(A)
    m = A.shape[0]
    torsion = [d for d in snf.invariant_factors if d > 1]
    return FiniteAbelianGroup(tuple(torsion)), m - snf.rank


def integer_kernel(A) -> np.ndarray:
    """Columns form a basis of ``{x in Z^n : A x = 0}``."""
    A = _as_matrix(A)
    snf = smith_normal_form(A)
    return snf.V[:, snf.rank:]


def lattice_coordinates(B_big, B_sub) -> np.ndarray:
    """Coordinates of the columns of ``B_sub`` in a basis of the lattice spanned by ``B_big``.

    The basis is ``d_i * Uinv[:, i]`` from the Smith form of ``B_big``.
    Raises :class:`NotASublattice` when some column is outside that lattice.
    """
    B_big = _as_matrix(B_big)
    B_sub = _as_matrix(B_sub, B_big.shape[0])
    if B_sub.shape[0] != B_big.shape[0]:
        raise ValueError("lattices live in different ambient spaces")
    snf = smith_normal_form(B_big)
    r = snf.rank
    Z = snf.U @ B_sub
    coords = zeros(r, B_sub.shape[1])
    for k in range(B_sub.shape[1]):
        for i in range(Z.shape[0]):
            z = Z[i, k]
            if i >= r:
                if z != 0:
                    raise NotASublattice(f"column {k} leaves the rational span")
            elif z % snf.invariant_factors[i]:
                raise NotASublattice(f"column {k} has non-integral coordinates")
            else:
                coords[i, k] = z // snf.invariant_factors[i]
    return coords


def lattice_quotient(B_big, B_sub) -> FiniteAbelianGroup:
    """The finite group ``span_Z(B_big) / span_Z(B_sub)``."""
    coords = lattice_coordinates(B_big, B_sub)
    group, free = cokernel(coords, coords.shape[0])
    if free:
        raise RankMismatch(f"sublattice has corank {free}")
    return group


def lattice_intersection(A, B) -> np.ndarray:
    """Columns spanning ``span_Z(A) & span_Z(B)``, read off the kernel of ``[A | -B]``."""
    A = _as_matrix(A)
    B = _as_matrix(B, A.shape[0])
    K = integer_kernel(np.hstack([A, -B]))
    return A @ K[: A.shape[1], :]


def lattice_index(B_big, B_sub) -> int:
    return lattice_quotient(B_big, B_sub).order


class CokernelPresentation:
    """``Z^k / Im R`` with explicit invariant-factor coordinates.

    ``coords(x)`` reduces a vector of ``Z^k`` to its coordinates against the
    cyclic generators; ``generator(i)`` lifts the i-th generator back.
    Coordinates of free summands are plain integers.
    """

    def __init__(self, relations, rows: int | None = None):
        self.relations = _as_matrix(relations, rows)
        self.snf = smith_normal_form(self.relations)
        k = self.relations.shape[0]
        diag = list(self.snf.invariant_factors) + [0] * (k - len(self.snf.invariant_factors))
        self.indices = tuple(i for i, d in enumerate(diag) if d != 1)
        self.moduli = tuple(diag[i] for i in self.indices)

    @property
    def ambient_rank(self) -> int:
        return self.relations.shape[0]

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.moduli if d == 0)

    @property
    def group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(tuple(d for d in self.moduli if d))

    def coords(self, x) -> tuple[int, ...]:
        y = self.snf.U @ np.asarray(x, dtype=object).reshape(-1)
        return tuple(int(y[i] % d) if d else int(y[i]) for i, d in zip(self.indices, self.moduli))

    def generator(self, i: int) -> np.ndarray:
        return self.snf.Uinv[:, self.indices[i]].copy()

    def is_zero(self, x) -> bool:
        return not any(self.coords(x))


def hom_is_surjective(M, target_moduli) -> bool:
    """Whether the columns of ``M`` generate ``+ Z/t_i``."""
    M = _as_matrix(M, len(target_moduli))
    stacked = np.hstack([M, diagonal(target_moduli)])
    group, free = cokernel(stacked, len(target_moduli))
    return group.is_trivial and free == 0


def hom_kernel(M, source_moduli, target_moduli) -> FiniteAbelianGroup:
    """Kernel of the homomorphism ``+Z/s_j -> +Z/t_i`` with matrix ``M``.

    Computed as ``K / diag(s)`` where ``K = {x : M x in diag(t) Z^t}``, read
    off the integer kernel of ``[M | -diag(t)]``.
    """
    s, t = len(source_moduli), len(target_moduli)
    if s == 0:
        return FiniteAbelianGroup()
    M = _as_matrix(M, t)
    stacked = np.hstack([M, -diagonal(target_moduli)]) if t else M.reshape(0, s)
    if t == 0:
        K = identity(s)
    else:
        K = integer_kernel(stacked)[:s, :]
    return lattice_quotient(K, diagonal(source_moduli))


def _as_matrix(A, rows: int | None = None) -> np.ndarray:
    if isinstance(A, np.ndarray):
        if A.ndim != 2:
            raise ValueError("expected a 2-d matrix")
        return A.astype(object)
    A = [list(r) for r in A]
    if not A:
        return zeros(rows or 0, 0)
    return int_matrix(A)
