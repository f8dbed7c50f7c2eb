"""Independent reference computations used only by the tests."""

from __future__ import annotations

from itertools import combinations

import sympy
from sympy.matrices.normalforms import smith_normal_form as sympy_snf


def sympy_invariant_factors(rows) -> tuple[int, ...]:
    """Nontrivial invariant factors of the cokernel, via sympy (zeros dropped)."""
    M = sympy.Matrix(rows)
    if 0 in M.shape:
        return ()
    D = sympy_snf(M, domain=sympy.ZZ)
    diag = [abs(int(D[i, i])) for i in range(min(D.shape))]
    return tuple(sorted(d for d in diag if d > 1))


def sympy_free_rank(rows) -> int:
    M = sympy.Matrix(rows)
    return M.shape[0] - M.rank()


def brute_force_trees(g) -> set[frozenset[int]]:
    """Every (n-1)-subset of non-loop edges that connects all vertices."""
    edges = [k for k in range(len(g.edges)) if k not in g.loops]
    out = set()
    for sub in combinations(edges, g.n - 1):
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for k in sub:
            a, b = find(g.endpoints(k)[0]), find(g.endpoints(k)[1])
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            out.add(frozenset(sub))
    return out


def laplacian_by_summation(g):
    """Column v is the sum over half-edges h at v of (v - root(iota h))."""
    L = [[0] * g.n for _ in range(g.n)]
    for h, v in enumerate(g.root):
        L[v][v] += 1
        L[g.root[g.inv[h]]][v] -= 1
    return L


def sympy_reciprocal_zeta(Q, A, m: int, n: int):
    """``(1-u^2)^(m-n) det(I - A u + (Q - I) u^2)`` as a sympy polynomial in ``u``."""
    u = sympy.symbols("u")
    I = sympy.eye(n)
    M = I - sympy.Matrix(A) * u + (sympy.Matrix(Q) - I) * u**2
    expr = sympy.cancel(M.det() * (1 - u**2) ** (m - n))
    return sympy.Poly(sympy.expand(expr), u)


def expansion_at_one(poly) -> list[int]:
    """Coefficients of ``(u-1)^k``."""
    u = poly.gens[0]
    t = sympy.symbols("t")
    shifted = sympy.Poly(sympy.expand(poly.as_expr().subs(u, t + 1)), t)
    return [int(c) for c in reversed(shifted.all_coeffs())]


def sympy_adjugate(rows):
    return sympy.Matrix(rows).adjugate()
