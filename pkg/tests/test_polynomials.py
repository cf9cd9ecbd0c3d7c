import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dca.errors import DomainMismatch, WindowTooSmall
from dca.euclid.lattice import qb_apply, qw_power
from dca.euclid.polynomials import (
    CanonicalTriangle,
    TriangularWindow,
    canonical_polynomials,
    edge_data,
    fill_from_hypotenuse,
    in_pol,
    pol_space_basis,
    ring_growth,
    taylor_step,
)
from dca.triangle_ops import random_combination


@pytest.mark.parametrize("k", range(6))
def test_dimension(k):
    space = pol_space_basis(k)
    assert space.dimension == 2 * k + 2
    assert space.stable and space.determined_by_triangle


def test_window_must_contain_triangle():
    with pytest.raises(WindowTooSmall):
        pol_space_basis(2, CanonicalTriangle((0, 0), 2), TriangularWindow(3))


def test_elements_satisfy_the_equations():
    for f in pol_space_basis(2).basis:
        assert in_pol(f, 2)
        assert not any(qb_apply(f).values())
        assert not any(qw_power(f, 3).values())


@pytest.mark.parametrize("k", [1, 2, 3])
def test_canonical_polynomials(k):
    can = canonical_polynomials(k)
    tri = can.triangle
    assert can.sum_in_lower
    for alpha, f in enumerate(can.functions):
        assert in_pol(f, k)
        data = edge_data(tri, alpha)
        assert all(f[p] == v for p, v in data.items())


@pytest.mark.parametrize("k", [1, 2])
def test_rotation_permutes_canonical_polynomials(k):
    can = canonical_polynomials(k)
    tri = can.triangle
    pts = tri.points()
    rotated = [{tri.rotate(p): f[p] for p in pts} for f in can.functions]
    originals = [{p: f[p] for p in pts} for f in can.functions]
    assert all(r in originals for r in rotated)
    assert sorted(originals.index(r) for r in rotated) == [0, 1, 2]


@pytest.mark.parametrize("k", range(4))
def test_taylor_step_is_idempotent(k):
    rng = random.Random(k)
    tri = CanonicalTriangle((0, 0), k)
    psi = random_combination(pol_space_basis(k, tri).basis, rng)
    step = taylor_step(psi, tri)
    assert all(step.phi[p] == psi[p] for p in psi)
    assert taylor_step(step.phi, tri).phi == step.phi


def test_taylor_step_of_general_function():
    # a d-holomorphic function on a big window, generic hypotenuse data
    rng = random.Random(5)
    psi = fill_from_hypotenuse([rng.randint(-5, 5) for _ in range(16)], (-2, -2))
    k = 2
    t2 = CanonicalTriangle((0, 0), k)
    phi = taylor_step(psi, t2).phi
    diff = {p: psi[p] - phi[p] for p in phi if p in psi}
    assert all(diff[p] == 0 for p in t2.points())
    t3 = CanonicalTriangle((0, 0), k + 1)
    assert any(diff[p] for p in t3.points() if p in diff)


def test_taylor_step_rejects_bad_input():
    tri = CanonicalTriangle((0, 0), 1)
    with pytest.raises(DomainMismatch):
        taylor_step({(0, 0): 1}, tri)
    with pytest.raises(DomainMismatch):
        taylor_step({p: 1 for p in tri.points()}, tri)


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=12))
def test_fill_from_hypotenuse_is_dholomorphic(values):
    psi = fill_from_hypotenuse(values)
    assert not any(qb_apply(psi).values())
    L = len(values) - 1
    assert [psi[(a, L - a)] for a in range(L + 1)] == [Fraction(v) for v in values]


def test_ring_growth():
    psi = fill_from_hypotenuse([1, 0, 0, 0, 0, 0])
    g = ring_growth(psi, (0, 0))
    assert g[0] == abs(psi[(0, 0)])
    assert list(g) == sorted(g)
    assert g[5] >= 1
