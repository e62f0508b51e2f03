import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logtoric.intlinalg import (
    FPAbelianGroup,
    IntMatrix,
    cokernel,
    det,
    hermite_normal_form,
    kernel_basis,
    lattice_member,
    primitive,
    rank,
    smith_normal_form,
    solve_integer,
)


def is_unimodular(u):
    return abs(det(u)) == 1


def test_hnf_identity():
    m = IntMatrix.identity(2)
    h, u = hermite_normal_form(m)
    assert h == m
    assert u == m


def test_hnf_zero():
    m = IntMatrix.zero(3, 2)
    h, u = hermite_normal_form(m)
    assert h == m
    assert u == IntMatrix.identity(3)


def test_hnf_small():
    # Oracle: H must equal U @ m, U unimodular, H echelon with reduced
    # entries above positive pivots.  Expected H computed by hand from
    # elementary row reduction of [[2,4],[6,8]].
    m = IntMatrix.from_rows([[2, 4], [6, 8]])
    h, u = hermite_normal_form(m)
    assert u @ m == h
    assert is_unimodular(u)
    assert h == IntMatrix.from_rows([[2, 0], [0, 4]])


def test_snf_hand_reduction():
    # diag(2,3) -> diag(1,6): reduce by hand with elementary ops.
    m = IntMatrix.from_rows([[2, 0], [0, 3]])
    d, u, v = smith_normal_form(m)
    assert u @ m @ v == d
    assert d == IntMatrix.from_rows([[1, 0], [0, 6]])


def test_snf_identity_and_1x1():
    d, u, v = smith_normal_form(IntMatrix.identity(3))
    assert d == IntMatrix.identity(3)
    d, u, v = smith_normal_form(IntMatrix.from_rows([[2]]))
    assert d == IntMatrix.from_rows([[2]])


@pytest.mark.parametrize(
    "vec,expected",
    [
        ((2, 4), (1, 2)),
        ((1, 0, 0), (1, 0, 0)),
        ((-6, 9), (-2, 3)),
    ],
)
def test_primitive(vec, expected):
    assert primitive(vec) == expected


def test_primitive_zero_rejected():
    with pytest.raises(ValueError, match="nonzero"):
        primitive((0, 0))


def test_cokernel_examples():
    assert cokernel(IntMatrix.from_rows([[2]])).invariants() == (0, (2,))
    # zero map Z^0 -> Z^2
    assert cokernel(IntMatrix.zero(2, 0)).invariants() == (2, ())
    # relations diag(1,6) on Z^2: oracle via SNF by hand, Z/6
    assert cokernel(IntMatrix.from_rows([[1, 0], [0, 6]])).invariants() == (0, (6,))


def _random_matrix(rng, max_dim=4, lo=-6, hi=6):
    r = rng.randint(1, max_dim)
    c = rng.randint(1, max_dim)
    return IntMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(c)] for _ in range(r)]
    )


def test_randomized_transform_identities():
    rng = random.Random(20260401)
    for _ in range(60):
        m = _random_matrix(rng)
        h, u = hermite_normal_form(m)
        assert u @ m == h
        assert is_unimodular(u)
        d, u2, v2 = smith_normal_form(m)
        assert u2 @ m @ v2 == d
        assert is_unimodular(u2)
        assert is_unimodular(v2)
        diag = [x for x in d.diagonal() if x != 0]
        assert all(b % a == 0 for a, b in zip(diag, diag[1:]))
        assert all(x >= 0 for x in d.diagonal())
        assert d.is_diagonal()


@given(
    st.lists(
        st.lists(st.integers(-9, 9), min_size=1, max_size=4),
        min_size=1,
        max_size=4,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1)
)
@settings(max_examples=80, deadline=None)
def test_snf_properties(rows):
    m = IntMatrix.from_rows(rows)
    d, u, v = smith_normal_form(m)
    assert u @ m @ v == d
    assert abs(det(u)) == 1
    assert abs(det(v)) == 1
    diag = [x for x in d.diagonal() if x != 0]
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


@given(
    st.lists(
        st.lists(st.integers(-9, 9), min_size=1, max_size=4),
        min_size=1,
        max_size=4,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1)
)
@settings(max_examples=60, deadline=None)
def test_cokernel_rank_vs_rational_rank(rows):
    m = IntMatrix.from_rows(rows)
    assert cokernel(m).rank == m.rows - rank(m)


def test_kernel_and_solve():
    m = IntMatrix.from_rows([[1, 1, 1], [0, 1, 2]])
    ker = kernel_basis(m)
    assert len(ker) == 1
    k = ker[0]
    assert m.apply(k) == (0, 0)
    assert primitive(k) in ((1, -2, 1), (-1, 2, -1))

    assert solve_integer(m, (3, 3)) is not None
    x = solve_integer(m, (3, 3))
    assert m.apply(x) == (3, 3)
    # 2x = (1,) has no integer solution
    assert solve_integer(IntMatrix.from_rows([[2]]), (1,)) is None


def test_lattice_member():
    basis = [(2, 0), (0, 3)]
    assert lattice_member(basis, (4, 3))
    assert not lattice_member(basis, (1, 0))
    assert lattice_member([], (0, 0))
    assert not lattice_member([], (1, 0))


def test_group_repr():
    g = FPAbelianGroup(3, IntMatrix.from_rows([[2, 0, 0]]))
    assert g.invariants() == (2, (2,))
    assert repr(g) == "Z + Z + Z/2"
