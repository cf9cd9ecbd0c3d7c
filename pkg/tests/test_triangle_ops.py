import csv
import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dca.complex import Coloring, Connection, build_surface, covariant_constant_basis
from dca.errors import DomainMismatch, Inconsistent, MissingColoring, NoAgreement, NotClosed
from dca.euclid.lattice import euclid_surface, hex_patch, torus_surface
from dca.hyperbolic.ball import build_ball
from dca.triangle_ops import (
    boundary_triangles,
    build_Q,
    convex_hull,
    dholomorphic_kernel,
    evaluate,
    in_hull,
    inner,
    laplace_identity_check,
    liouville_check,
    maximum_principle_check,
    random_combination,
    solve_boundary_value,
)

OCTAHEDRON = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]


def single():
    s = build_surface([(0, 1, 2)])
    return s, Coloring(("b",))


def test_single_triangle_row():
    s, col = single()
    q = build_Q(s, col, "black")
    assert q.matrix_rows() == [{0: 1, 1: 1, 2: 1}]
    assert q.apply({0: 1, 1: 2, 2: 3}) == {0: 6}


def test_missing_coloring():
    s, _ = single()
    with pytest.raises(MissingColoring):
        build_Q(s, None)
    with pytest.raises(MissingColoring):
        build_Q(s, Coloring(("b",)), "white")


def test_apply_outside_domain():
    s, col = single()
    with pytest.raises(DomainMismatch):
        build_Q(s, col).apply({0: 1})


@given(st.randoms(use_true_random=False))
def test_adjoint_identity(rnd):
    patch = euclid_surface(hex_patch(2))
    q = build_Q(patch.surface, patch.coloring, "both")
    psi = {v: Fraction(rnd.randint(-9, 9)) for v in patch.surface.vertices}
    phi = {i: Fraction(rnd.randint(-9, 9)) for i in q.rows}
    assert inner(q.apply(psi), phi) == inner(psi, q.adjoint_apply(phi))


def test_operator_csv(tmp_path):
    s, col = single()
    path = tmp_path / "q.csv"
    build_Q(s, col).write_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["row", "col", "value"] and len(rows) == 4


def test_laplace_identities_euclid():
    patch = euclid_surface(hex_patch(3))
    res = laplace_identity_check(patch.surface, patch.coloring)
    assert len(res) == 3 and all(r["pass"] for r in res)


def test_laplace_identities_hyperbolic():
    surface, coloring = build_ball(2).ball_complex(2)
    assert all(r["pass"] for r in laplace_identity_check(surface, coloring))


def test_single_triangle_kernel():
    s, col = single()
    assert dholomorphic_kernel(s, col).dimension == 2


@pytest.mark.parametrize("r,dof", [(1, 5), (2, 17), (3, 61)])
def test_kernel_on_balls(r, dof):
    surface, coloring = build_ball(r).ball_complex(r)
    assert dholomorphic_kernel(surface, coloring).dimension == dof


def test_boundary_value_inconsistent():
    s, col = single()
    with pytest.raises(Inconsistent) as err:
        solve_boundary_value(s, col, None, {0: 1, 1: 1, 2: 1})
    cert = err.value.certificate
    assert set(cert) == {("triangle", 0), ("vertex", 0), ("vertex", 1), ("vertex", 2)}


def test_boundary_value_unique_and_not():
    s, col = single()
    sol = solve_boundary_value(s, col, None, {0: 1, 1: 2})
    assert sol.unique and sol.psi[2] == -3
    assert solve_boundary_value(s, col, None, {0: 1}).kernel_dimension == 1
    with pytest.raises(DomainMismatch):
        solve_boundary_value(s, col, None, {7: 1})


def test_domain_must_be_black():
    patch = euclid_surface(hex_patch(1))
    with pytest.raises(DomainMismatch):
        dholomorphic_kernel(patch.surface, patch.coloring, patch.coloring.white())


def test_evaluate_reconstructs_on_triangle():
    patch = euclid_surface(hex_patch(2))
    s = patch.surface
    basis = covariant_constant_basis(s, Connection.canonical(s))
    psi = {v: 3 * basis[0][v] - 2 * basis[1][v] for v in s.vertices}
    for i in patch.coloring.black():
        ev = evaluate(psi, s.simplices[i], basis)
        assert ev.coords == (3, -2)


def test_evaluate_rejects_non_holomorphic():
    s, _ = single()
    basis = covariant_constant_basis(s, Connection.canonical(s))
    with pytest.raises(NoAgreement):
        evaluate({0: 1, 1: 1, 2: 1}, (0, 1, 2), basis)


def test_liouville_octahedron():
    s = build_surface(OCTAHEDRON)
    from dca.complex import find_bw_coloring

    res = liouville_check(s, find_bw_coloring(s))
    assert res["pass"] and res["lhs_dim"] == 2 == res["ker_qw_dim"]


def test_liouville_torus():
    t = torus_surface((3, 0), (0, 3))
    assert liouville_check(t.surface, t.coloring)["pass"]


def test_liouville_needs_closed():
    patch = euclid_surface(hex_patch(1))
    with pytest.raises(NotClosed):
        liouville_check(patch.surface, patch.coloring)


@pytest.mark.parametrize("radius", [3, 4])
def test_maximum_principle_euclid(radius):
    rng = random.Random(radius)
    patch = euclid_surface(hex_patch(radius))
    kern = dholomorphic_kernel(patch.surface, patch.coloring)
    for _ in range(10):
        psi = random_combination(kern.basis, rng)
        res = maximum_principle_check(patch.surface, patch.coloring, psi)
        assert res["pass"] and res["simply_connected"]


def test_maximum_principle_hyperbolic():
    rng = random.Random(1)
    surface, coloring = build_ball(2).ball_complex(2)
    kern = dholomorphic_kernel(surface, coloring)
    for _ in range(10):
        psi = random_combination(kern.basis, rng)
        assert maximum_principle_check(surface, coloring, psi)["pass"]


def test_maximum_principle_needs_dholomorphic():
    patch = euclid_surface(hex_patch(2))
    with pytest.raises(DomainMismatch):
        maximum_principle_check(patch.surface, patch.coloring, {v: 1 for v in patch.surface.vertices})


def test_boundary_triangles_of_small_patch():
    patch = euclid_surface(hex_patch(1))
    # every vertex of a one-ring is on the patch boundary except the centre
    assert boundary_triangles(patch.surface, patch.coloring, patch.coloring.black()) == sorted(patch.coloring.black())


points = st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=12)


def _brute_in_hull(pts, p):
    """Point in hull iff it is a convex combination of some triangle (or segment)."""
    pts = sorted(set(pts))
    if p in pts:
        return True
    for a, b in itertools.combinations(pts, 2):
        cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if cross == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
            return True
    for a, b, c in itertools.combinations(pts, 3):
        def side(u, v):
            return (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0])

        if (b[0] - a[0]) * (c[1] - a[1]) == (b[1] - a[1]) * (c[0] - a[0]):
            continue  # collinear triples are covered by the segments
        s = [side(a, b), side(b, c), side(c, a)]
        if all(x >= 0 for x in s) or all(x <= 0 for x in s):
            return True
    return False


@given(points, st.tuples(st.integers(-7, 7), st.integers(-7, 7)))
def test_hull_membership_matches_brute_force(pts, p):
    assert in_hull(convex_hull(pts), p) == _brute_in_hull(pts, p)
