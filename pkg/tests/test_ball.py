import json

import pytest
from hypothesis import given, strategies as st

from dca.complex import Connection, covariant_constant_basis
from dca.dynamics import Word
from dca.errors import DisconnectedSeed, NotAPath
from dca.hyperbolic.ball import (
    DomainSpec,
    ball_from_json,
    ball_to_json,
    boundary_path,
    boundary_word,
    build_ball,
    build_domain,
    right_convex_check,
)


def test_boundary_counts(ball5):
    assert [ball5.boundary_size(k) for k in range(1, 6)] == [8, 32, 120, 448, 1672]


def test_every_interior_vertex_has_degree_eight(ball5):
    for v in ball5.vertices_within(4):
        assert len(ball5.adj[v]) == 8 and ball5.link_complete(v)


def test_ball_is_a_disc(ball4):
    surface, coloring = ball4.ball_complex(4)
    assert surface.orientable and coloring.is_valid(surface)
    assert surface.euler_characteristic() == 1


def test_covariant_constants_on_third_ball(ball4):
    surface, _ = ball4.ball_complex(3)
    assert len(covariant_constant_basis(surface, Connection.canonical(surface))) == 2


def test_first_words(ball4):
    assert boundary_word(ball4, 1) == "bw" * 4
    assert Word(boundary_word(ball4, 2)).equivalent(Word("bwbwwbwb" * 4))


def test_word_layer_range(ball4):
    with pytest.raises(ValueError):
        boundary_word(ball4, 0)
    with pytest.raises(ValueError):
        boundary_word(ball4, 5)


def test_boundary_paths_are_convex(ball4):
    for k in range(1, 4):
        assert right_convex_check(ball4, boundary_path(ball4, k), closed=True).convex


def test_reversed_boundary_is_not_convex(ball4):
    assert not right_convex_check(ball4, ball4.cycles[2], closed=True).convex


def test_doubling_back_is_not_convex(ball4):
    v = ball4.neighbors(0)[0]
    assert not right_convex_check(ball4, [0, v, 0]).convex


def test_not_a_path(ball4):
    far = ball4.cycles[3][0]
    with pytest.raises(NotAPath):
        right_convex_check(ball4, [0, far])
    with pytest.raises(NotAPath):
        right_convex_check(ball4, [0])


def test_triangle_seed_radius_zero(ball4):
    dom = build_domain(DomainSpec((0, 1, 2), 0), ball4)
    assert dom.vertices == {0, 1, 2}


def test_disconnected_seed(ball4):
    far = ball4.cycles[3][0]
    with pytest.raises(DisconnectedSeed):
        build_domain(DomainSpec((0, far), 1), ball4)


def test_ball_domain_matches_layers(ball4):
    dom = build_domain(DomainSpec((0,), 2), ball4)
    assert dom.vertices == set(ball4.vertices_within(2))


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 8))
def test_domain_composition(r1, r2, v):
    ball = build_ball(5)
    seed = (v,)
    inner = build_domain(DomainSpec(seed, r1), ball)
    outer = build_domain(DomainSpec(tuple(sorted(inner.vertices)), r2), ball)
    assert outer.vertices == build_domain(DomainSpec(seed, r1 + r2), ball).vertices


def test_odd_degree_rejected():
    with pytest.raises(ValueError):
        build_ball(2, p=7)


def test_json_round_trip(ball4, tmp_path):
    small = build_ball(2)
    data = json.loads(json.dumps(ball_to_json(small)))
    surface, coloring, layers, cycles = ball_from_json(data)
    ref, ref_col = small.complex()
    assert surface.simplices == ref.simplices
    assert coloring == ref_col
    assert layers == small.layers and cycles == small.cycles
