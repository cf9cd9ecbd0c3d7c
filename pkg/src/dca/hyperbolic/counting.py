"""Counting equations and degrees of freedom of ``Q^b psi = 0`` on balls."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping, Sequence

from .. import exact
from ..errors import DependentDataSet, DomainMismatch, Inconsistent, TooLarge
from .ball import HyperbolicBall, bfs_distances, boundary_word, build_ball
from .functions import black_triangles


def _ball_for(r: int, ball: HyperbolicBall | None) -> HyperbolicBall:
    if ball is None or ball.radius < r:
        return build_ball(r)
    return ball


def _letters(ball: HyperbolicBall, k: int) -> tuple[int, int]:
    if k == 0:
        return 0, 0
    word = boundary_word(ball, k)
    return word.count("b"), word.count("w")


def equation_count(r: int, ball: HyperbolicBall | None = None) -> dict:
    """Equations ``Eq_{r+1}`` and unknowns ``N_{r+1}`` of ``Q^b psi = 0`` on ``D_{r+1}``.

    Also counts, strip by strip, the black triangles with a single vertex on
    the inner circle (one per ``b`` of the outer boundary word) and those with
    a single vertex on the outer circle (one per ``w`` of the inner word).
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    ball = _ball_for(r + 1, ball)
    verts = ball.vertices_within(r + 1)
    N1 = len(verts)
    N0 = len(ball.vertices_within(r))
    eq = len(black_triangles(ball, verts))
    B1, W1 = _letters(ball, r + 1)
    strips = []
    total = 0
    for k in range(r + 1):
        inner_one = outer_one = 0
        for t in black_triangles(ball, ball.vertices_within(k + 1)):
            layers = [ball.layer_of[v] for v in t]
            if min(layers) != k or max(layers) != k + 1:
                continue
            if layers.count(k) == 1:
                inner_one += 1
            else:
                outer_one += 1
        b_out, _ = _letters(ball, k + 1)
        _, w_in = _letters(ball, k)
        strips.append(
            {
                "strip": k,
                "one_inner_vertex": inner_one,
                "b_outer": b_out,
                "one_outer_vertex": outer_one,
                "w_inner": w_in,
                "pass": inner_one == b_out and outer_one == w_in,
            }
        )
        total += inner_one + outer_one
    checks = {
        "eq_identity": eq == B1 + N0 - 1,
        "dof_identity": N1 - eq == W1 + 1,
        "strip_sum": total == eq,
        "strips": all(s["pass"] for s in strips),
    }
    return {
        "r": r,
        "N_r": N0,
        "N_r1": N1,
        "Eq_r1": eq,
        "B_r1": B1,
        "W_r1": W1,
        "dof": N1 - eq,
        "boundary": len(ball.cycles[r + 1]),
        "strips": strips,
        "checks": checks,
        "pass": all(checks.values()),
    }


def _qb_rows(ball: HyperbolicBall, verts: Sequence[int]) -> tuple[list[dict[int, int]], dict[int, int]]:
    col = {v: j for j, v in enumerate(verts)}
    rows = [{col[v]: 1 for v in t} for t in black_triangles(ball, verts)]
    return rows, col


def dof_rank_check(r: int, max_radius: int = 4, ball: HyperbolicBall | None = None) -> dict:
    """Exact dimension of ``{psi : Q^b psi = 0 on D_{r+1}}`` against ``|dD_{r+1}|/2 + 1``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r + 1 > max_radius:
        raise TooLarge(f"D_{r + 1} exceeds the size cap (max radius {max_radius})")
    ball = _ball_for(r + 1, ball)
    verts = ball.vertices_within(r + 1)
    rows, _ = _qb_rows(ball, verts)
    rank = exact.rank(rows, len(verts))
    expected = len(ball.cycles[r + 1]) // 2 + 1
    dof = len(verts) - rank
    return {
        "r": r,
        "unknowns": len(verts),
        "equations": len(rows),
        "rank": rank,
        "independent": rank == len(rows),
        "dof": dof,
        "expected": expected,
        "pass": dof == expected and rank == len(rows),
    }


def kernel_on_ball(ball: HyperbolicBall, r: int) -> tuple[list[int], list[dict[int, Fraction]]]:
    verts = ball.vertices_within(r)
    rows, _ = _qb_rows(ball, verts)
    basis = exact.nullspace(rows, len(verts))
    zero = Fraction(0)
    return verts, [{v: vec.get(j, zero) for j, v in enumerate(verts)} for vec in basis]


def _restriction_rows(basis: Sequence[Mapping[int, Fraction]], points: Sequence[int]) -> list[dict[int, Fraction]]:
    return [{j: f[p] for j, f in enumerate(basis) if f[p]} for p in points]


def independent_boundary_points(ball: HyperbolicBall, r: int, basis=None) -> list[int]:
    """Pivot boundary vertices, scanning the layer ``r`` cycle in order."""
    if basis is None:
        _, basis = kernel_on_ball(ball, r)
    ech = exact.Echelon(len(basis))
    chosen = []
    for p, row in zip(ball.cycles[r], _restriction_rows(basis, ball.cycles[r])):
        if ech.add(row):
            chosen.append(p)
            if len(chosen) == len(basis):
                break
    return chosen


def independence_check(r: int, points: Sequence[int], ball: HyperbolicBall | None = None) -> dict:
    ball = _ball_for(r, ball)
    _, basis = kernel_on_ball(ball, r)
    rank = exact.rank(_restriction_rows(basis, points), len(basis))
    return {
        "r": r,
        "points": len(points),
        "dof": len(basis),
        "rank": rank,
        "independent": rank == len(points) == len(basis),
    }


def alternate_points(ball: HyperbolicBall, r: int) -> list[int]:
    """Every other boundary vertex plus the one after the first."""
    cyc = ball.cycles[r]
    return list(cyc[::2]) + [cyc[1]]


def reconstruct_from_halfdata(
    r: int,
    data: Mapping[int, object],
    points: Sequence[int] | None = None,
    ball: HyperbolicBall | None = None,
) -> dict[int, Fraction]:
    """The d-holomorphic function on ``D_r`` with the given values at ``points``.

    Without ``points`` the pivot boundary vertices are used.  A singular
    choice raises :class:`DependentDataSet` carrying a nonzero d-holomorphic
    function that vanishes at every chosen point.
    """
    ball = _ball_for(r, ball)
    verts, basis = kernel_on_ball(ball, r)
    if points is None:
        points = independent_boundary_points(ball, r, basis)
    points = list(points)
    if len(points) != len(basis):
        raise DependentDataSet(None, f"need exactly {len(basis)} points, got {len(points)}")
    M = _restriction_rows(basis, points)
    null = exact.nullspace(M, len(basis))
    if null:
        cert = {v: sum((c * basis[j][v] for j, c in null[0].items()), Fraction(0)) for v in verts}
        raise DependentDataSet({v: x for v, x in cert.items() if x}, "chosen points are dependent")
    absent = [p for p in points if p not in data]
    if absent:
        raise DomainMismatch(f"no data at {absent[:5]}")
    coef, _ = exact.solve(M, [Fraction(data[p]) for p in points], len(basis))
    return {v: sum((c * basis[j][v] for j, c in coef.items()), Fraction(0)) for v in verts}


# -- random functions with zero patches ---------------------------------------------------


class ZeroPatchSampler:
    """Random d-holomorphic functions on a ball vanishing on a vertex patch.

    The kernel basis of ``Q^b`` is computed once.  Each draw prescribes zeros
    on the patch and random nonzero integers at a few other vertices, then
    solves for kernel coordinates with all free coordinates set to zero, so
    the result usually has more zeros than the patch itself.  Draws that
    contradict ``Q^b psi = 0``, or vanish away from the outer layer, are
    retried.
    """

    def __init__(self, ball: HyperbolicBall, patch_radius: int = 1, samples: int = 6, bound: int = 5):
        self.ball = ball
        self.patch_radius = patch_radius
        self.samples = samples
        self.bound = bound
        self.vertices, self.basis = kernel_on_ball(ball, ball.radius)
        # centres deep enough that the patch boundary has complete links
        self.centres = ball.vertices_within(max(ball.radius - patch_radius - 2, 0))

    def draw(self, rng: random.Random, tries: int = 20) -> tuple[dict[int, Fraction], list[int]]:
        ball = self.ball
        values = [c for c in range(-self.bound, self.bound + 1) if c]
        for _ in range(tries):
            centre = rng.choice(self.centres)
            patch = sorted(bfs_distances(ball, [centre], self.patch_radius))
            taken = set(patch)
            others = [v for v in self.vertices if v not in taken]
            picks = rng.sample(others, min(self.samples, len(others)))
            cons = [(v, 0) for v in patch] + [(v, rng.choice(values)) for v in picks]
            M = _restriction_rows(self.basis, [v for v, _ in cons])
            try:
                coef, _ = exact.solve(M, [Fraction(c) for _, c in cons], len(self.basis))
            except Inconsistent:
                continue
            psi = {v: Fraction(0) for v in self.vertices}
            for j, c in coef.items():
                for v, x in self.basis[j].items():
                    if x:
                        psi[v] += c * x
            # support confined to the outer layer leaves nothing to analyse
            if any(x and ball.link_complete(v) for v, x in psi.items()):
                return psi, patch
        raise Inconsistent(None, "no consistent random draw found")
