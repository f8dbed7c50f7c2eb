import numpy as np
import pytest
from hypothesis import given, strategies as st

from chipgog import lattice
from chipgog.errors import NotASublattice, RankMismatch
from chipgog.lattice import FiniteAbelianGroup, CokernelPresentation

from oracles import sympy_free_rank, sympy_invariant_factors

matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


def test_det_small():
    assert lattice.det([[2, 1], [1, 3]]) == 5
    assert lattice.det(lattice.zeros(0, 0)) == 1
    assert lattice.det([[0, 1], [1, 0]]) == -1
    assert lattice.det([[1, 2], [2, 4]]) == 0


def test_adjugate_identity():
    M = lattice.int_matrix([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    adj = lattice.adjugate(M)
    assert (adj @ M == lattice.det(M) * lattice.identity(3)).all()


def test_group_validation_and_format():
    assert str(FiniteAbelianGroup((4, 4))) == "Z/4 + Z/4"
    assert str(FiniteAbelianGroup()) == "0"
    assert FiniteAbelianGroup.from_diagonal([1, 4, 2]) == FiniteAbelianGroup((2, 4))
    assert FiniteAbelianGroup.from_diagonal([6, 4]).invariant_factors == (2, 12)
    with pytest.raises(ValueError):
        FiniteAbelianGroup((4, 2))
    with pytest.raises(ValueError):
        FiniteAbelianGroup((1, 2))


def test_snf_k4_reduced():
    L = [[3, -1, -1], [-1, 3, -1], [-1, -1, 3]]
    assert lattice.smith_normal_form(L).invariant_factors == (1, 4, 4)
    assert lattice.cokernel(L) == (FiniteAbelianGroup((4, 4)), 0)


@given(matrices)
def test_snf_transforms(rows):
    A = lattice.int_matrix(rows)
    s = lattice.smith_normal_form(A)
    assert (s.U @ A @ s.V == s.D).all()
    assert abs(lattice.det(s.U)) == 1 and abs(lattice.det(s.V)) == 1
    d = s.invariant_factors
    assert all(b == 0 if a == 0 else b % a == 0 for a, b in zip(d, d[1:]))
    for i in range(s.D.shape[0]):
        for j in range(s.D.shape[1]):
            if i != j:
                assert s.D[i, j] == 0


@given(matrices)
def test_cokernel_matches_sympy(rows):
    group, free = lattice.cokernel(rows)
    assert group.invariant_factors == sympy_invariant_factors(rows)
    assert free == sympy_free_rank(rows)


@given(matrices)
def test_integer_kernel(rows):
    A = lattice.int_matrix(rows)
    K = lattice.integer_kernel(A)
    assert (A @ K == 0).all()
    assert K.shape[1] == A.shape[1] - np.linalg.matrix_rank(A.astype(float))


def test_lattice_quotient_and_index():
    big = lattice.identity(2)
    sub = [[2, 0], [0, 3]]
    assert lattice.lattice_quotient(big, sub) == FiniteAbelianGroup((6,))
    assert lattice.lattice_index([[2, 0], [0, 2]], [[4, 0], [0, 2]]) == 2
    with pytest.raises(NotASublattice):
        lattice.lattice_coordinates([[2, 0], [0, 2]], [[1], [0]])
    with pytest.raises(RankMismatch):
        lattice.lattice_quotient(big, [[1], [1]])


def test_lattice_intersection():
    A = lattice.int_matrix([[2], [0]])
    B = lattice.int_matrix([[3], [0]])
    meet = lattice.lattice_intersection(A, B)
    assert lattice.lattice_quotient([[6], [0]], meet).is_trivial
    assert lattice.lattice_quotient(meet, [[6], [0]]).is_trivial


def test_cokernel_presentation_coordinates():
    p = CokernelPresentation([[2, 0], [0, 4]])
    assert p.group == FiniteAbelianGroup((2, 4))
    assert p.is_zero([2, 4]) and not p.is_zero([1, 0])
    for i in range(len(p.moduli)):
        c = p.coords(p.generator(i))
        assert c == tuple(1 if j == i else 0 for j in range(len(p.moduli)))


@given(matrices, st.lists(st.integers(-9, 9), min_size=5, max_size=5))
def test_presentation_respects_relations(rows, x):
    p = CokernelPresentation(rows)
    k = p.ambient_rank
    x = np.array(x[:k] + [0] * (k - len(x[:k])), dtype=object)
    rel = p.relations[:, 0]
    assert p.coords(x) == p.coords(x + 3 * rel)


def test_hom_kernel_and_surjectivity():
    # Z/4 -> Z/2, reduction
    assert lattice.hom_is_surjective([[1]], (2,))
    assert lattice.hom_kernel([[1]], (4,), (2,)) == FiniteAbelianGroup((2,))
    # Z/2 -> Z/4, x -> 2x is injective but not onto
    assert not lattice.hom_is_surjective([[2]], (4,))
    assert lattice.hom_kernel([[2]], (2,), (4,)).is_trivial
    assert lattice.hom_kernel([[0, 0]], (2, 2), (3,)) == FiniteAbelianGroup((2, 2))
