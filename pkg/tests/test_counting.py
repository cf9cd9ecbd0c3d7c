import random
from fractions import Fraction

import pytest

from dca.errors import DependentDataSet, DomainMismatch, TooLarge
from dca.hyperbolic.counting import (
    alternate_points,
    dof_rank_check,
    equation_count,
    independence_check,
    independent_boundary_points,
    kernel_on_ball,
    reconstruct_from_halfdata,
)
from dca.hyperbolic.functions import qb_residual

# (unknowns, equations, dof) on D_1 .. D_4
COUNTS = [(9, 4, 5), (41, 24, 17), (161, 100, 61), (609, 384, 225)]


@pytest.mark.parametrize("r", range(4))
def test_equation_count(ball4, r):
    c = equation_count(r, ball4)
    assert (c["N_r1"], c["Eq_r1"], c["dof"]) == COUNTS[r]
    assert c["dof"] == c["boundary"] // 2 + 1
    assert c["pass"] and all(s["pass"] for s in c["strips"])


@pytest.mark.parametrize("r", range(3))
def test_dof_by_rank(ball4, r):
    chk = dof_rank_check(r, ball=ball4)
    assert chk["pass"] and chk["independent"]
    assert chk["dof"] == COUNTS[r][2]


def test_dof_size_cap(ball4):
    with pytest.raises(TooLarge):
        dof_rank_check(4, max_radius=4, ball=ball4)
    with pytest.raises(ValueError):
        equation_count(-1, ball4)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_alternate_points_are_independent(ball4, r):
    pts = alternate_points(ball4, r)
    assert len(pts) == len(ball4.cycles[r]) // 2 + 1
    assert independence_check(r, pts, ball4)["independent"]


@pytest.mark.parametrize("r", [1, 2])
def test_reconstruct_round_trip(ball4, r):
    rng = random.Random(r)
    _, basis = kernel_on_ball(ball4, r)
    coef = [rng.randint(-3, 3) for _ in basis]
    psi = {v: sum((c * f[v] for c, f in zip(coef, basis)), Fraction(0)) for v in basis[0]}
    assert not qb_residual(ball4, psi)
    pts = independent_boundary_points(ball4, r, basis)
    assert set(pts) <= set(ball4.cycles[r])
    back = reconstruct_from_halfdata(r, {p: psi[p] for p in pts}, ball=ball4)
    assert back == psi
    back2 = reconstruct_from_halfdata(r, psi, alternate_points(ball4, r), ball=ball4)
    assert back2 == psi


def test_zero_data_gives_zero(ball4):
    pts = alternate_points(ball4, 2)
    psi = reconstruct_from_halfdata(2, {p: 0 for p in pts}, pts, ball4)
    assert not any(psi.values())


def test_dependent_points_carry_a_certificate(ball4):
    r = 1
    cyc = ball4.cycles[r]
    # consecutive boundary points leave a one-dimensional gap
    pts = cyc[:4] + [0]
    with pytest.raises(DependentDataSet) as err:
        reconstruct_from_halfdata(r, {p: 1 for p in pts}, pts, ball4)
    cert = err.value.certificate
    assert cert and all(cert.get(p, 0) == 0 for p in pts)
    full = {v: cert.get(v, Fraction(0)) for v in ball4.vertices_within(r)}
    assert not qb_residual(ball4, full)


def test_wrong_point_count(ball4):
    with pytest.raises(DependentDataSet):
        reconstruct_from_halfdata(1, {}, [1, 2], ball4)


def test_missing_data(ball4):
    pts = alternate_points(ball4, 1)
    with pytest.raises(DomainMismatch):
        reconstruct_from_halfdata(1, {pts[0]: 1}, pts, ball4)
