"""Chip-firing on graphs of groups.

A graph of groups here is a half-edge graph decorated with the orders of its
vertex and half-edge groups. Only these orders enter chip-firing: a vertex of
weight ``c(v)`` fires by sending ``c(v)/c(h)`` chips along each half-edge ``h``
rooted at it.

Matrices follow the column convention: column ``v`` of the Laplacian is the
image of the generator ``v``, so every column has degree zero. The transpose
of this matrix has zero row sums but generally not zero column sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm, prod
from typing import Sequence

import numpy as np

from . import lattice
from .errors import (
    DisconnectedGraph,
    DivisibilityViolation,
    InternalMismatch,
    LeadingCoeffMismatch,
    MismatchedAdjugate,
    NonIntegerOrder,
    TreeInput,
)
from .graph import HalfEdgeGraph, enumerate_spanning_trees, root_matrices
from .lattice import CokernelPresentation, FiniteAbelianGroup


@dataclass(frozen=True, eq=False)
class GraphOfGroups:
    graph: HalfEdgeGraph
    cv: tuple[int, ...]
    ch: tuple[int, ...]

    def __post_init__(self):
        g = self.graph
        cv = tuple(int(c) for c in self.cv)
        ch = tuple(int(c) for c in self.ch)
        if len(cv) != g.n or len(ch) != len(g.halfedges):
            raise DivisibilityViolation("weight vectors do not match the graph")
        if any(c < 1 for c in cv + ch):
            raise DivisibilityViolation("weights must be positive integers")
        for h, v in enumerate(g.root):
            if cv[v] % ch[h]:
                raise DivisibilityViolation(
                    f"c({g.halfedges[h]})={ch[h]} does not divide c({g.vertices[v]})={cv[v]}"
                )
            if ch[h] != ch[g.inv[h]]:
                raise DivisibilityViolation(
                    f"half-edges {g.halfedges[h]} and {g.halfedges[g.inv[h]]} of one edge "
                    "carry different weights"
                )
        object.__setattr__(self, "cv", cv)
        object.__setattr__(self, "ch", ch)

    @classmethod
    def trivial(cls, graph: HalfEdgeGraph) -> GraphOfGroups:
        return cls(graph, (1,) * graph.n, (1,) * len(graph.halfedges))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def ce(self) -> tuple[int, ...]:
        """Edge weights, aligned with ``graph.edges``."""
        return tuple(self.ch[h] for h, _ in self.graph.edges)

    @property
    def lcm_vertex_weights(self) -> int:
        return lcm(*self.cv) if self.cv else 1

    @property
    def is_trivial(self) -> bool:
        return all(c == 1 for c in self.cv + self.ch)

    def without_legs(self) -> GraphOfGroups:
        g = self.graph
        keep = [h for h in range(len(g.halfedges)) if g.inv[h] != h]
        return GraphOfGroups(g.restrict_halfedges(keep), self.cv, tuple(self.ch[h] for h in keep))

    def __eq__(self, other):
        if not isinstance(other, GraphOfGroups):
            return NotImplemented
        return (self.graph, self.cv, self.ch) == (other.graph, other.cv, other.ch)

    def __hash__(self):
        return hash((self.graph, self.cv, self.ch))

    @cached_property
    def laplacian(self) -> np.ndarray:
        return gog_laplacian(self).L


def as_gog(x) -> GraphOfGroups:
    return x if isinstance(x, GraphOfGroups) else GraphOfGroups.trivial(x)


def tau_weighted(x: GraphOfGroups) -> np.ndarray:
    """Half-edges by vertices: ``tau(v) = sum over h at v of (c(v)/c(h)) h``."""
    x = as_gog(x)
    g = x.graph
    out = lattice.zeros(len(g.halfedges), g.n)
    for h, v in enumerate(g.root):
        out[h, v] = x.cv[v] // x.ch[h]
    return out


def root_matrix(g: HalfEdgeGraph) -> np.ndarray:
    """Vertices by half-edges matrix of the root map."""
    out = lattice.zeros(g.n, len(g.halfedges))
    for h, v in enumerate(g.root):
        out[v, h] = 1
    return out


def involution_matrix(g: HalfEdgeGraph) -> np.ndarray:
    nh = len(g.halfedges)
    out = lattice.zeros(nh, nh)
    for h, j in enumerate(g.inv):
        out[j, h] = 1
    return out


@dataclass(frozen=True, eq=False)
class LaplacianBundle:
    L: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    S: np.ndarray
    T: np.ndarray
    C_V: np.ndarray
    C_E: np.ndarray
    orientation: tuple[tuple[int, int], ...]


def gog_laplacian(x: GraphOfGroups) -> LaplacianBundle:
    """Laplacian ``r (Id - iota) tau`` with valency and adjacency parts.

    The factorization through the root matrices is verified exactly: over
    rationals, ``L = (S-T) C_E^-1 (S-T)^t C_V``, and likewise for the
    leg-free parts of ``Q`` and ``A``.
    """
    x = as_gog(x)
    g = x.graph
    n = g.n
    R = root_matrix(g)
    L = R @ (lattice.identity(len(g.halfedges)) - involution_matrix(g)) @ tau_weighted(x)
    Q, A = lattice.zeros(n, n), lattice.zeros(n, n)
    Q_edges, A_edges = lattice.zeros(n, n), lattice.zeros(n, n)
    for h, v in enumerate(g.root):
        w = x.cv[v] // x.ch[h]
        u = g.root[g.inv[h]]
        Q[v, v] += w
        A[u, v] += w
        if g.inv[h] != h:
            Q_edges[v, v] += w
            A_edges[u, v] += w
    if not (L == Q - A).all():
        raise InternalMismatch("L != Q - A")
    S, T = root_matrices(g)
    C_V = lattice.diagonal(x.cv)
    C_E = lattice.diagonal(x.ce)
    CE_inv = np.array(
        [[Fraction(1, c) if i == j else Fraction(0) for j, c in enumerate(x.ce)] for i in range(len(x.ce))],
        dtype=object,
    ).reshape(len(x.ce), len(x.ce))
    D = S - T
    checks = (
        (L, D @ CE_inv @ D.T @ C_V, "L factorization"),
        (Q_edges, (S @ CE_inv @ S.T + T @ CE_inv @ T.T) @ C_V, "Q factorization"),
        (A_edges, (S @ CE_inv @ T.T + T @ CE_inv @ S.T) @ C_V, "A factorization"),
    )
    for actual, expected, name in checks:
        if not (actual == expected).all():
            raise InternalMismatch(f"{name} failed")
    return LaplacianBundle(L, Q, A, S, T, C_V, C_E, g.edges)


def weighted_tree_sum(x: GraphOfGroups) -> Fraction:
    """``sum over spanning trees T of prod over e in T of 1/c(e)``."""
    x = as_gog(x)
    ce = x.ce
    return sum((Fraction(1, prod(ce[k] for k in tree)) for tree in enumerate_spanning_trees(x.graph)), Fraction(0))


def xi(x: GraphOfGroups) -> Fraction:
    x = as_gog(x)
    return prod(x.cv) * weighted_tree_sum(x)


def adjugate_check(x: GraphOfGroups) -> tuple[np.ndarray, Fraction]:
    """Cofactor adjugate of ``L``, checked against ``C_V^-1 J xi``."""
    x = as_gog(x)
    if not x.graph.is_connected:
        raise DisconnectedGraph("adjugate identity needs a connected graph")
    adj = lattice.adjugate(x.laplacian)
    value = xi(x)
    for u in range(x.n):
        for v in range(x.n):
            if adj[u, v] != value / x.cv[u]:
                raise MismatchedAdjugate(
                    f"adj(L)[{u},{v}] = {adj[u, v]}, expected {value / x.cv[u]}"
                )
    return adj, value


def jacobian_order_matrixtree(x: GraphOfGroups) -> int:
    """Order of the Jacobian from weighted spanning trees."""
    x = as_gog(x)
    if not x.graph.is_connected:
        raise DisconnectedGraph("Jacobian order needs a connected graph")
    value = xi(x) / x.lcm_vertex_weights
    if value.denominator != 1 or value <= 0:
        raise NonIntegerOrder(f"matrix-tree value {value} is not a positive integer")
    return int(value)


class JacobianPresentation:
    """Degree-zero divisors modulo the image of the Laplacian.

    Degree-zero divisors are identified with ``Z^(n-1)`` by dropping the last
    coordinate, so the Jacobian is the cokernel of ``L`` with its last row
    deleted.
    """

    def __init__(self, x: GraphOfGroups):
        x = as_gog(x)
        if not x.graph.is_connected:
            raise DisconnectedGraph(f"graph has {len(x.graph.components)} components")
        self.gog = x
        self.L = x.laplacian
        self.presentation = CokernelPresentation(self.L[:-1, :], x.n - 1)
        if self.presentation.free_rank:
            raise InternalMismatch("Jacobian of a connected graph has a free part")

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.presentation.group

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.presentation.moduli

    @property
    def order(self) -> int:
        return self.group.order

    def coords(self, D: Sequence[int]) -> tuple[int, ...]:
        D = tuple(int(a) for a in D)
        if len(D) != self.gog.n:
            raise ValueError("divisor length does not match the graph")
        if sum(D):
            raise ValueError("only degree-zero divisors have Jacobian classes")
        return self.presentation.coords(D[:-1])

    def generator(self, i: int) -> tuple[int, ...]:
        head = [int(a) for a in self.presentation.generator(i)]
        return tuple(head + [-sum(head)])

    def is_principal(self, D: Sequence[int]) -> bool:
        return not any(self.coords(D))


def jacobian_presentation(x: GraphOfGroups) -> JacobianPresentation:
    return JacobianPresentation(x)


def jacobian_structure(x: GraphOfGroups) -> FiniteAbelianGroup:
    """Invariant factors of the Jacobian, checked against the matrix-tree order."""
    group = JacobianPresentation(x).group
    expected = jacobian_order_matrixtree(x)
    if group.order != expected:
        raise InternalMismatch(f"Smith form order {group.order} != matrix-tree order {expected}")
    return group


def fire_vertex(x: GraphOfGroups, D: Sequence[int], v) -> tuple[int, ...]:
    x = as_gog(x)
    i = x.graph.vertex(v)
    D = x.graph.divisor(D)
    col = x.laplacian[:, i]
    return tuple(int(a - b) for a, b in zip(D, col))


# zeta function


@dataclass(frozen=True)
class ZetaExpansion:
    reciprocal_poly: tuple[int, ...]
    shifted: tuple[int, ...]
    vanishing_order: int
    genus: int
    leading_coeff: int
    expected_leading: int | None

    @property
    def checked(self) -> bool:
        return self.expected_leading is not None


def zeta_expansion(x: GraphOfGroups) -> ZetaExpansion:
    """Reciprocal zeta function and its expansion at ``u = 1``.

    The polynomial is ``(1-u^2)^(m-n) det(I - A u + (Q - I) u^2)`` for the
    graph with its legs removed. ``shifted[k]`` is the coefficient of
    ``(u-1)^k``. For ``g >= 1`` the coefficients below ``(u-1)^g`` must vanish
    and the one at ``(u-1)^g`` must match the closed form in terms of weights
    and the Jacobian order; otherwise :class:`LeadingCoeffMismatch` is raised.
    The closed form may be zero, in which case the observed vanishing order
    exceeds ``g``.
    """
    x = as_gog(x)
    if not x.graph.is_connected:
        raise DisconnectedGraph("zeta expansion needs a connected graph")
    core = x.without_legs()
    bundle = gog_laplacian(core)
    Q, A = bundle.Q, bundle.A
    n, m = core.n, len(core.graph.edges)
    I = lattice.identity(n)
    points = list(range(2 * n + 1))
    values = [lattice.det(I - A * u + (Q - I) * (u * u)) for u in points]
    poly = _interpolate(points, values)
    factor = [1, 0, -1]
    if m >= n:
        for _ in range(m - n):
            poly = _poly_mul(poly, factor)
    else:
        for _ in range(n - m):
            poly = _poly_div_exact(poly, factor)
    poly = _trim(poly)
    shifted = _trim(_taylor_shift(poly, 1))
    order = next((k for k, c in enumerate(shifted) if c), len(shifted))
    g = m - n + 1
    leading = shifted[g] if g < len(shifted) else 0
    expected = None
    if g >= 1:
        weight_term = sum(Fraction(1, c) for c in core.ce) - sum(Fraction(1, c) for c in core.cv)
        value = 2**g * (-1) ** (g + 1) * x.lcm_vertex_weights * weight_term * jacobian_order_matrixtree(x)
        if value.denominator != 1:
            raise LeadingCoeffMismatch(f"closed-form leading coefficient {value} is not an integer")
        expected = int(value)
        if any(shifted[:g]):
            raise LeadingCoeffMismatch(f"expansion at u=1 has a nonzero term below order {g}")
        if leading != expected:
            raise LeadingCoeffMismatch(f"coefficient of (u-1)^{g} is {leading}, expected {expected}")
    return ZetaExpansion(tuple(poly), tuple(shifted), order, g, leading, expected)


def zeta_leading_check(x: GraphOfGroups) -> ZetaExpansion:
    """As :func:`zeta_expansion` but refuse trees, where the check is vacuous."""
    x = as_gog(x)
    if x.graph.is_connected and x.graph.genus == 0:
        raise TreeInput("graph is a tree; the leading-coefficient identity is vacuous")
    return zeta_expansion(x)


def _interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Exact Lagrange interpolation; the result must have integer coefficients."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i, (xi_, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        basis = [Fraction(1)]
        denom = 1
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = _poly_mul(basis, [-xj, 1])
            denom *= xi_ - xj
        for k, b in enumerate(basis):
            coeffs[k] += Fraction(yi) * b / denom
    if any(c.denominator != 1 for c in coeffs):
        raise InternalMismatch("interpolated determinant has non-integer coefficients")
    return [int(c) for c in coeffs]


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_div_exact(a, b):
    a = list(_trim(a))
    b = _trim(b)
    if len(a) < len(b):
        if any(a):
            raise InternalMismatch("polynomial division is not exact")
        return [0]
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        c, r = divmod(a[k + len(b) - 1], b[-1])
        if r:
            raise InternalMismatch("polynomial division is not exact")
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] -= c * y
    if any(a):
        raise InternalMismatch("polynomial division is not exact")
    return q


def _taylor_shift(a, s):
    """Coefficients of ``p(t + s)`` in ``t``."""
    out = [0] * len(a)
    for c in reversed(a):
        for k in range(len(out) - 1, 0, -1):
            out[k] = out[k] * s + out[k - 1]
        out[0] = out[0] * s + c
    return out


def _trim(a):
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a
