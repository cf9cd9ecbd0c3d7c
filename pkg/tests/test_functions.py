import random
from fractions import Fraction

import pytest

from dca.errors import DomainMismatch, InfeasibleAnchor, NotAPath
from dca.hyperbolic.ball import right_convex_check
from dca.hyperbolic.counting import ZeroPatchSampler
from dca.hyperbolic.functions import (
    b_run,
    black_triangles,
    construct_special,
    default_anchor,
    extend_layers,
    forced_zeros,
    maximal_path,
    psi_xl,
    qb_residual,
    z_pr,
    zero_set_components,
)


def test_maximal_path_turns_three_right(ball4):
    x, l = default_anchor(ball4, "psi_xl")
    path = maximal_path(ball4, x, l)
    verdict = right_convex_check(ball4, path)
    assert verdict.convex and all(c == 3 for _, c in verdict.counts)
    # every edge has a black triangle on its right
    for a, b in zip(path, path[1:]):
        assert ball4.triangle_color(a, b, ball4.ccw_next[b][a]) == "b"
    # the path runs from the outer layer through the centre to the outer layer
    assert ball4.layer_of[path[0]] == ball4.layer_of[path[-1]] == 4


def test_maximal_path_needs_black_right_triangle(ball4):
    x, l = default_anchor(ball4, "psi_xl")
    with pytest.raises(InfeasibleAnchor):
        maximal_path(ball4, l, x)
    with pytest.raises(NotAPath):
        maximal_path(ball4, 0, ball4.cycles[2][0])


@pytest.mark.parametrize("policy", ["least-norm", "sparse"])
def test_psi_xl_pattern(ball4, policy):
    x, l = default_anchor(ball4, "psi_xl")
    f = psi_xl(ball4, x, l, policy)
    path = maximal_path(ball4, x, l)
    i0 = path.index(x)
    assert [f.psi[v] for v in path] == [(-1) ** (i - i0) for i in range(len(path))]
    zeros = [v for v, val in f.support_seed.items() if val == 0]
    assert zeros and all(f.psi[v] == 0 for v in zeros)
    assert not qb_residual(ball4, f.psi)
    assert set(f.psi) == set(ball4.layer_of)


def test_psi_xl_growth_is_monotone(ball4):
    for policy in ("least-norm", "sparse"):
        g = [v for _, v in psi_xl(ball4, 0, 2, policy).growth]
        assert g == sorted(g) and g[-1] > g[0]


def test_z_pr_pattern(ball4):
    r, start = default_anchor(ball4, "z_pr")
    f = z_pr(ball4, r, start)
    P = b_run(ball4, r, start)
    assert all(f.psi[v] == 0 for v, d in ball4.layer_of.items() if d < r)
    assert all(f.psi[v] == 0 for v in ball4.layers[r] if v not in P)
    assert [f.psi[v] for v in P] == [(-1) ** i for i in range(len(P))]
    assert not qb_residual(ball4, f.psi)
    g = [v for _, v in f.growth]
    assert g == sorted(g)


def test_z_pr_anchor_checks(ball4):
    with pytest.raises(InfeasibleAnchor):
        z_pr(ball4, 0, 0)
    with pytest.raises(InfeasibleAnchor):
        z_pr(ball4, 4, ball4.cycles[4][0])
    with pytest.raises(InfeasibleAnchor):
        z_pr(ball4, 2, 0)
    # on layer 2 some runs meet forced zeros
    blocked = forced_zeros(ball4, 2)
    bad = next(v for v in ball4.cycles[2] if blocked & set(b_run(ball4, 2, v)))
    with pytest.raises(InfeasibleAnchor):
        z_pr(ball4, 2, bad)


def test_construct_special(ball4):
    f = construct_special("z_pr", (1, 1), 3)
    assert f.kind == "z_pr" and f.radius == 3
    with pytest.raises(ValueError):
        construct_special("other", (0, 2), 3)
    with pytest.raises(ValueError):
        construct_special("psi_xl", (0, 2), 3, policy="greedy")


def test_extend_layers_single_triangle(ball4):
    t = black_triangles(ball4, ball4.vertices_within(1))[0]
    psi = extend_layers(ball4, {t[0]: Fraction(1), t[1]: Fraction(1)}, [[t[2]]], "sparse")
    assert psi[t[2]] == -2


def test_extend_layers_inconsistent(ball4):
    # a layer-1 vertex lies in four black triangles; fixing all its
    # neighbours to 1 asks for -2 and has no solution unless they agree
    c = ball4.cycles[1][0]
    known = {v: Fraction(1) for v in ball4.vertices_within(2) if v != c}
    known[0] = Fraction(5)
    with pytest.raises(InfeasibleAnchor):
        extend_layers(ball4, known, [[c]], "sparse")
    with pytest.raises(ValueError):
        extend_layers(ball4, known, [[c]], "greedy")


def test_empty_zero_set(ball4):
    assert zero_set_components(ball4, {v: Fraction(1) for v in ball4.layer_of}) == []


def test_zero_set_needs_values_everywhere(ball4):
    with pytest.raises(DomainMismatch):
        zero_set_components(ball4, {0: Fraction(1)})


def test_zero_set_components_are_right_convex(ball4):
    sampler = ZeroPatchSampler(ball4)
    rng = random.Random(0)
    seen = 0
    for _ in range(20):
        psi, patch = sampler.draw(rng)
        assert all(psi[v] == 0 for v in patch)
        assert not qb_residual(ball4, psi)
        for comp in zero_set_components(ball4, psi):
            seen += 1
            assert comp.right_convex
            assert all(t.count in (2, 3) for t in comp.turns)
    assert seen > 0
