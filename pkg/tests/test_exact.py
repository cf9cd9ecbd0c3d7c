from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from dca import exact
from dca.errors import Inconsistent
from dca.exact import QZeta, ZETA, format_exact, parse_exact

small = st.integers(-4, 4)


@st.composite
def matrices(draw):
    r = draw(st.integers(1, 6))
    c = draw(st.integers(1, 6))
    return [[draw(small) for _ in range(c)] for _ in range(r)], c


def sparse(M):
    return [{j: v for j, v in enumerate(row) if v} for row in M]


@given(matrices())
def test_rank_matches_sympy(mc):
    M, c = mc
    assert exact.rank(sparse(M), c) == sympy.Matrix(M).rank()


@given(matrices())
def test_nullspace_is_a_kernel_basis(mc):
    M, c = mc
    null = exact.nullspace(sparse(M), c)
    assert len(null) == c - sympy.Matrix(M).rank()
    for vec in null:
        assert all(v == 0 for v in exact.matvec(sparse(M), vec))


@given(matrices(), st.lists(small, min_size=6, max_size=6))
def test_solve_or_certificate(mc, b):
    M, c = mc
    rhs = b[: len(M)]
    try:
        x, kernel = exact.solve(sparse(M), rhs, c)
    except Inconsistent as err:
        cert = err.certificate
        # the combination kills every column but not the right-hand side
        for j in range(c):
            assert sum(cert.get(i, 0) * M[i][j] for i in range(len(M))) == 0
        assert sum(cert.get(i, 0) * rhs[i] for i in range(len(M))) != 0
    else:
        assert exact.matvec(sparse(M), x) == [Fraction(v) for v in rhs]
        assert len(kernel) == c - sympy.Matrix(M).rank()


def test_inconsistent_pair():
    with pytest.raises(Inconsistent):
        exact.solve([{0: 1}, {0: 2}], [1, 1], 1)


def test_zeta_arithmetic():
    assert ZETA ** 3 == 1
    assert 1 + ZETA + ZETA ** 2 == 0
    assert ZETA * ZETA.conjugate() == 1
    assert (QZeta(2, 3) / QZeta(2, 3)) == 1
    assert abs(complex(ZETA) - complex(-0.5, 3 ** 0.5 / 2)) < 1e-12


@given(st.fractions(max_denominator=50))
def test_format_parse_round_trip(x):
    assert parse_exact(format_exact(x)) == x


def test_format_parse_zeta():
    z = QZeta(Fraction(1, 2), -3)
    assert parse_exact(format_exact(z)) == z
