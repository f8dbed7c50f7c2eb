"""Maps between a cover and its quotient graph of groups.

``p_*`` adds up chips over each fiber; ``p^*`` sends ``v`` to ``c(v)`` times
the sum of its fiber. Both commute with the Laplacians and so descend to the
Jacobians, where ``p_*`` is onto and ``p_* p^*`` is multiplication by ``|G|``.
The kernel of ``p_*`` on divisors restricts the cover Laplacian to the voltage
Laplacian ``L0``, whose cokernel inside the image of the boundary map is the
voltage Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import lattice
from .errors import InternalMismatch, OrderIdentityViolation, PresentationSolveFailure
from .gog import GraphOfGroups, JacobianPresentation, involution_matrix, root_matrix, tau_weighted
from .group import GraphAction, QuotientData, quotient_graph_of_groups
from .lattice import FiniteAbelianGroup


class CoverContext:
    """An action together with its quotient and ordered fibers.

    Each fiber starts with the chosen section, followed by the remaining
    members in index order.
    """

    def __init__(self, action: GraphAction, quotient: QuotientData | None = None):
        self.action = action
        self.quotient = quotient if quotient is not None else quotient_graph_of_groups(action)
        q = self.quotient
        self.source = action.graph
        self.target = q.gog
        pv, ph = q.projection.vertex_map, q.projection.halfedge_map
        self.vertex_fibers = tuple(
            (sec,) + tuple(x for x in range(self.source.n) if pv[x] == v and x != sec)
            for v, sec in enumerate(q.vertex_section)
        )
        self.halfedge_fibers = tuple(
            (sec,) + tuple(x for x in range(len(self.source.halfedges)) if ph[x] == h and x != sec)
            for h, sec in enumerate(q.halfedge_section)
        )
        G = action.order
        for fibers, weights in ((self.vertex_fibers, self.target.cv), (self.halfedge_fibers, self.target.ch)):
            for fib, c in zip(fibers, weights):
                if len(fib) * c != G:
                    raise InternalMismatch("orbit-stabilizer count failed")

    @property
    def group_order(self) -> int:
        return self.action.order

    # divisor-level matrices

    @cached_property
    def push_vertices(self) -> np.ndarray:
        return _fiber_matrix(self.vertex_fibers, self.source.n, (1,) * len(self.vertex_fibers))

    @cached_property
    def pull_vertices(self) -> np.ndarray:
        return _fiber_matrix(self.vertex_fibers, self.source.n, self.target.cv).T.copy()

    @cached_property
    def push_halfedges(self) -> np.ndarray:
        return _fiber_matrix(self.halfedge_fibers, len(self.source.halfedges), (1,) * len(self.halfedge_fibers))

    @cached_property
    def pull_halfedges(self) -> np.ndarray:
        return _fiber_matrix(self.halfedge_fibers, len(self.source.halfedges), self.target.ch).T.copy()

    @cached_property
    def source_gog(self) -> GraphOfGroups:
        return GraphOfGroups.trivial(self.source)

    @cached_property
    def source_jacobian(self) -> JacobianPresentation:
        return JacobianPresentation(self.source_gog)

    @cached_property
    def target_jacobian(self) -> JacobianPresentation:
        return JacobianPresentation(self.target)


def _fiber_matrix(fibers, n_source, weights) -> np.ndarray:
    out = lattice.zeros(len(fibers), n_source)
    for i, (fib, w) in enumerate(zip(fibers, weights)):
        for x in fib:
            out[i, x] = w
    return out


def pushforward_divisor(ctx: CoverContext, D: Sequence[int]) -> tuple[int, ...]:
    D = ctx.source.divisor(D)
    return tuple(int(a) for a in ctx.push_vertices @ np.array(D, dtype=object))


def pullback_divisor(ctx: CoverContext, D: Sequence[int]) -> tuple[int, ...]:
    D = ctx.target.graph.divisor(D)
    return tuple(int(a) for a in ctx.pull_vertices @ np.array(D, dtype=object))


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    actual: object
    passed: bool

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def as_dict(self) -> dict:
        return {"name": self.name, "expected": _jsonable(self.expected),
                "actual": _jsonable(self.actual), "status": self.status}


def _jsonable(x):
    if isinstance(x, FiniteAbelianGroup):
        return list(x.invariant_factors)
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    if isinstance(x, np.integer):
        return int(x)
    return x


def intertwining_checks(ctx: CoverContext) -> list[Check]:
    """Divisor-level identities for ``p_*`` and ``p^*`` against r, iota, tau and L."""
    src, tgt = ctx.source, ctx.target
    Rs, Rt = root_matrix(src), root_matrix(tgt.graph)
    Is, It = involution_matrix(src), involution_matrix(tgt.graph)
    Ts, Tt = tau_weighted(ctx.source_gog), tau_weighted(tgt)
    Ls, Lt = ctx.source_gog.laplacian, tgt.laplacian
    PV, PH = ctx.push_vertices, ctx.push_halfedges
    UV, UH = ctx.pull_vertices, ctx.pull_halfedges
    G = ctx.group_order
    pairs = [
        ("p_* r = r p_*", PV @ Rs, Rt @ PH),
        ("p_* iota = iota p_*", PH @ Is, It @ PH),
        ("p_* tau = tau p_*", PH @ Ts, Tt @ PV),
        ("p_* L = L p_*", PV @ Ls, Lt @ PV),
        ("r p^* = p^* r", Rs @ UH, UV @ Rt),
        ("iota p^* = p^* iota", Is @ UH, UH @ It),
        ("tau p^* = p^* tau", Ts @ UV, UH @ Tt),
        ("L p^* = p^* L", Ls @ UV, UV @ Lt),
        ("p_* p^* = |G| on divisors", PV @ UV, G * lattice.identity(tgt.n)),
    ]
    return [Check(name, True, bool((a == b).all()), bool((a == b).all())) for name, a, b in pairs]


@dataclass(frozen=True, eq=False)
class InducedMaps:
    push: np.ndarray
    pull: np.ndarray
    source_moduli: tuple[int, ...]
    target_moduli: tuple[int, ...]
    surjective: bool
    composition_ok: bool
    kernel: FiniteAbelianGroup


def _check_presentation(jac: JacobianPresentation):
    k = len(jac.moduli)
    for i in range(k):
        e = tuple(1 if j == i else 0 for j in range(k))
        if jac.coords(jac.generator(i)) != e:
            raise PresentationSolveFailure(f"generator {i} does not reduce to its own coordinate")


def induced_jacobian_maps(ctx: CoverContext) -> InducedMaps:
    """Matrices of ``p_*`` and ``p^*`` between invariant-factor presentations."""
    js, jt = ctx.source_jacobian, ctx.target_jacobian
    _check_presentation(js)
    _check_presentation(jt)
    ks, kt = len(js.moduli), len(jt.moduli)
    push = lattice.zeros(kt, ks)
    for i in range(ks):
        push[:, i] = jt.coords(pushforward_divisor(ctx, js.generator(i)))
    pull = lattice.zeros(ks, kt)
    for i in range(kt):
        pull[:, i] = js.coords(pullback_divisor(ctx, jt.generator(i)))
    # the matrices must kill the relations, or the coordinate solve is wrong
    for i, d in enumerate(js.moduli):
        if any((d * push[r, i]) % m for r, m in enumerate(jt.moduli)):
            raise PresentationSolveFailure("pushforward matrix is not well defined")
    for i, d in enumerate(jt.moduli):
        if any((d * pull[r, i]) % m for r, m in enumerate(js.moduli)):
            raise PresentationSolveFailure("pullback matrix is not well defined")
    G = ctx.group_order
    comp = push @ pull
    composition_ok = all(
        (comp[r, c] - (G if r == c else 0)) % m == 0 for r, m in enumerate(jt.moduli) for c in range(kt)
    )
    surjective = lattice.hom_is_surjective(push, jt.moduli)
    kernel = lattice.hom_kernel(push, js.moduli, jt.moduli)
    return InducedMaps(push, pull, js.moduli, jt.moduli, surjective, composition_ok, kernel)


@dataclass(frozen=True, eq=False)
class VoltageKernelData:
    """Bases of the fiberwise degree-zero lattices and the restricted maps.

    ``V0_basis`` and ``H0_basis`` have one column ``x_g - x_1`` per fiber
    element other than the section ``x_1``; a vector in the kernel has
    coordinate ``y[x_g]`` on that column.
    """

    V0_basis: np.ndarray
    H0_basis: np.ndarray
    r0: np.ndarray
    iota0: np.ndarray
    tau0: np.ndarray
    L0: np.ndarray
    boundary0: np.ndarray
    V0_labels: tuple[str, ...]
    H0_labels: tuple[str, ...]


def _kernel_basis(fibers, n):
    cols, rows, labels = [], [], []
    for fib in fibers:
        for x in fib[1:]:
            v = [0] * n
            v[x], v[fib[0]] = 1, -1
            cols.append(v)
            rows.append(x)
    E = lattice.int_matrix(cols, (0, n)).T.copy() if cols else lattice.zeros(n, 0)
    P = lattice.zeros(len(rows), n)
    for i, x in enumerate(rows):
        P[i, x] = 1
    return E, P, rows


def _restrict(M, E_src, P_tgt, E_tgt, name):
    image = M @ E_src
    out = P_tgt @ image
    if not (E_tgt @ out == image).all():
        raise InternalMismatch(f"{name} does not preserve the degree-zero fibers")
    return out


def voltage_kernel_data(ctx: CoverContext) -> VoltageKernelData:
    src = ctx.source
    EV, PV, vrows = _kernel_basis(ctx.vertex_fibers, src.n)
    EH, PH, hrows = _kernel_basis(ctx.halfedge_fibers, len(src.halfedges))
    R, I = root_matrix(src), involution_matrix(src)
    T = tau_weighted(ctx.source_gog)
    r0 = _restrict(R, EH, PV, EV, "root map")
    i0 = _restrict(I, EH, PH, EH, "involution")
    t0 = _restrict(T, EV, PH, EH, "tau")
    L0 = _restrict(ctx.source_gog.laplacian, EV, PV, EV, "Laplacian")
    boundary = r0 @ (lattice.identity(EH.shape[1]) - i0)
    if not (boundary @ t0 == L0).all():
        raise InternalMismatch("L0 != r0 (Id - iota0) tau0")
    return VoltageKernelData(
        EV, EH, r0, i0, t0, L0, boundary,
        tuple(src.vertices[x] for x in vrows), tuple(src.halfedges[x] for x in hrows),
    )


def voltage_jacobian(ctx: CoverContext, strict: bool = True) -> tuple[np.ndarray, FiniteAbelianGroup]:
    """``L0`` and ``Jac0 = Im boundary0 / Im L0``.

    With ``strict`` the order identity ``|Jac0| |Jac(quotient)| = |Jac(cover)|``
    is enforced. It is not a theorem in general: free actions of non-abelian
    groups break it, and so do some actions with nontrivial stabilizers (K4
    modulo the Klein group generated by ``(ab)`` and ``(cd)`` is the smallest
    fixture). :func:`voltage_defects` measures the gap.
    """
    data = voltage_kernel_data(ctx)
    jac0 = lattice.lattice_quotient(data.boundary0, data.L0)
    expected = ctx.source_jacobian.order
    if strict and jac0.order * ctx.target_jacobian.order != expected:
        raise OrderIdentityViolation(
            f"|Jac0| * |Jac(quotient)| = {jac0.order} * {ctx.target_jacobian.order} != {expected}"
        )
    return data.L0, jac0


@dataclass(frozen=True)
class VoltageDefects:
    """How far the natural map ``Jac0 -> ker p_*`` is from an isomorphism.

    ``injectivity`` is the order of its kernel ``(Im boundary0 & Im L) / Im L0``
    and ``surjectivity`` the index of its image in ``ker p_*``.
    """

    injectivity: int
    surjectivity: int

    @property
    def isomorphism(self) -> bool:
        return self.injectivity == 1 and self.surjectivity == 1


def voltage_defects(ctx: CoverContext, kernel_order: int | None = None) -> VoltageDefects:
    data = voltage_kernel_data(ctx)
    if data.L0.shape[0] == 0:
        return VoltageDefects(1, kernel_order or 1)
    jac0 = lattice.lattice_quotient(data.boundary0, data.L0)
    L = ctx.source_gog.laplacian
    K = lattice.integer_kernel(ctx.push_vertices @ L)
    rows = [x for fib in ctx.vertex_fibers for x in fib[1:]]
    in_kernel = (L @ K)[rows, :]
    meet = lattice.lattice_intersection(data.boundary0, in_kernel)
    inj = lattice.lattice_index(meet, data.L0)
    if kernel_order is None:
        kernel_order = induced_jacobian_maps(ctx).kernel.order
    image = jac0.order // inj
    return VoltageDefects(inj, kernel_order // image)


@dataclass
class CoverReport:
    group_order: int
    source_jacobian: FiniteAbelianGroup
    target_jacobian: FiniteAbelianGroup
    voltage_jacobian: FiniteAbelianGroup
    kernel: FiniteAbelianGroup
    defects: VoltageDefects
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_cover(action: GraphAction) -> CoverReport:
    ctx = CoverContext(action)
    checks = intertwining_checks(ctx)
    maps = induced_jacobian_maps(ctx)
    _, jac0 = voltage_jacobian(ctx, strict=False)
    defects = voltage_defects(ctx, maps.kernel.order)
    js, jt = ctx.source_jacobian.group, ctx.target_jacobian.group
    checks += [
        Check("p_* onto on Jacobians", True, maps.surjective, maps.surjective),
        Check("p_* p^* = |G| on Jacobians", True, maps.composition_ok, maps.composition_ok),
        Check("|Jac0| * |Jac(quotient)| = |Jac(cover)|", js.order, jac0.order * jt.order,
              jac0.order * jt.order == js.order),
        Check("Jac0 = ker p_* (invariant factors)", maps.kernel, jac0, maps.kernel == jac0),
    ]
    return CoverReport(ctx.group_order, js, jt, jac0, maps.kernel, defects, checks)
