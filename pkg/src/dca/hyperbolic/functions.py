"""Zero sets and special d-holomorphic functions on {3,8} balls.

Vertex functions on a ball are dicts ``{vertex id: value}``.  A function is
d-holomorphic when the three values on every black triangle of the ball sum
to zero.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .. import exact
from ..complex import BLACK
from ..errors import DomainMismatch, Inconsistent, InfeasibleAnchor, NotAPath
from .ball import HyperbolicBall, bfs_distances, build_ball

POLICIES = ("least-norm", "sparse")


def black_triangles(ball: HyperbolicBall, vertices=None) -> list[tuple[int, int, int]]:
    vs = None if vertices is None else set(vertices)
    return [
        t
        for t, c in zip(ball.triangles, ball.colors)
        if c == BLACK and (vs is None or all(v in vs for v in t))
    ]


def qb_residual(ball: HyperbolicBall, psi: Mapping[int, object]) -> list[tuple[int, int, int]]:
    """Black triangles inside the support of ``psi`` where ``Q^b psi != 0``."""
    return [t for t in black_triangles(ball, psi) if sum(psi[v] for v in t) != 0]


def _ccw_prev(ball: HyperbolicBall, v: int) -> dict[int, int]:
    return {y: x for x, y in ball.ccw_next[v].items()}


# -- zero sets -------------------------------------------------------------------------


@dataclass(frozen=True)
class Turn:
    prev: int
    vertex: int
    next: int
    count: int
    zeros: tuple[int, ...]


@dataclass
class ZeroSetComponent:
    turns: list[Turn]
    closed: bool
    truncated: int
    dangling: int = 0

    @property
    def path(self) -> list[int]:
        return [t.vertex for t in self.turns]

    @property
    def right_convex(self) -> bool:
        return not self.dangling and all(t.count in (2, 3) for t in self.turns)


def _zero_arcs(ball: HyperbolicBall, psi: Mapping[int, object], v: int) -> list[Turn]:
    """Turns at a nonzero vertex with complete link, one per maximal zero arc."""
    ring = ball.ccw_next[v]
    start = next(iter(ring))
    link = [start]
    while len(link) < len(ring):
        link.append(ring[link[-1]])
    zero = [psi[x] == 0 for x in link]
    n = len(link)
    if all(zero):
        return [Turn(v, v, v, n + 1, tuple(link))]
    turns = []
    for i in range(n):
        # an arc starts right after a nonzero neighbour
        if zero[i] or not zero[(i + 1) % n]:
            continue
        j = (i + 1) % n
        arc = []
        while zero[j]:
            arc.append(link[j])
            j = (j + 1) % n
        turns.append(Turn(link[i], v, link[j], len(arc) + 1, tuple(arc)))
    return turns


def zero_set_components(ball: HyperbolicBall, psi: Mapping[int, object]) -> list[ZeroSetComponent]:
    """Oriented near-boundary components of the zero set of ``psi``.

    Every nonzero vertex adjacent to a zero contributes one turn per arc of
    zero neighbours; the zeros lie on the right of the turn, so its right
    count is the arc length plus one.  Consecutive turns share the triangle
    spanned by the edge between them and the adjacent zero.  Vertices whose
    link leaves the ball cannot be analysed; chains end there and are counted
    as truncated.
    """
    missing = [v for v in ball.layer_of if v not in psi]
    if missing:
        raise DomainMismatch(f"psi undefined at {len(missing)} ball vertices")
    zeros = {v for v in ball.layer_of if psi[v] == 0}
    near = sorted({w for z in zeros for w in ball.adj[z] if w not in zeros})
    starts: dict[tuple[int, int, int], Turn] = {}
    for v in near:
        if not ball.link_complete(v):
            continue
        for t in _zero_arcs(ball, psi, v):
            starts[(t.prev, v, t.zeros[0])] = t
    successor: dict[Turn, Turn | None] = {}
    for t in starts.values():
        # next turn sits at t.next, enters from t.vertex, first zero is t.zeros[-1]
        successor[t] = starts.get((t.vertex, t.next, t.zeros[-1]))
    has_pred = {s for s in successor.values() if s is not None}
    seen: set[Turn] = set()
    out = []

    def walk(t: Turn) -> list[Turn]:
        chain = []
        while t is not None and t not in seen:
            seen.add(t)
            chain.append(t)
            t = successor[t]
        return chain

    order = sorted(starts.values(), key=lambda t: (t.vertex, t.prev, t.zeros))
    for t in order:
        if t not in has_pred and t not in seen:
            chain = walk(t)
            ends = [chain[0].prev, chain[-1].next]
            cut = sum(1 for v in ends if not ball.link_complete(v))
            out.append(ZeroSetComponent(chain, False, cut, 2 - cut))
    for t in order:
        if t not in seen:
            out.append(ZeroSetComponent(walk(t), True, 0))
    return out


# -- maximal black paths -----------------------------------------------------------------


def _step(ball: HyperbolicBall, ring: Mapping[int, int], x: int, times: int) -> int | None:
    for _ in range(times):
        if x not in ring:
            return None
        x = ring[x]
    return x


def maximal_path(ball: HyperbolicBall, x: int, l: int) -> list[int]:
    """The path ``...bbb...`` through the edge ``x -> l``, as far as the ball allows.

    At every vertex the path turns so that three triangles lie on its right;
    the triangles on the right of the edges are then all black.
    """
    if l not in ball.adj.get(x, ()):
        raise NotAPath(f"{x} -> {l} is not an edge")
    third = ball.ccw_next[l].get(x)
    if third is None or ball.triangle_color(x, l, third) != BLACK:
        raise InfeasibleAnchor(f"the triangle on the right of {x} -> {l} is not black")
    fwd = [x, l]
    while ball.link_complete(fwd[-1]):
        nxt = _step(ball, ball.ccw_next[fwd[-1]], fwd[-2], 3)
        fwd.append(nxt)
    back = []
    prev, cur = l, x
    while ball.link_complete(cur):
        before = _step(ball, _ccw_prev(ball, cur), prev, 3)
        back.append(before)
        prev, cur = cur, before
    return list(reversed(back)) + fwd


# -- layered extension --------------------------------------------------------------------


def _least_norm(rows: list[dict[int, int]], rhs: list, ncols: int) -> dict[int, Fraction]:
    """Exact minimum-norm solution ``A^T (A A^T)^-1 b`` over independent rows."""
    ech = exact.Echelon(ncols)
    keep = [i for i, r in enumerate(rows) if ech.add(r)]
    # consistency of the dropped rows is checked by the caller afterwards
    A = [rows[i] for i in keep]
    b = [rhs[i] for i in keep]
    by_col: dict[int, list[tuple[int, int]]] = {}
    for i, r in enumerate(A):
        for c, v in r.items():
            by_col.setdefault(c, []).append((i, v))
    gram: list[dict[int, int]] = [dict() for _ in A]
    for entries in by_col.values():
        for i, vi in entries:
            for j, vj in entries:
                gram[i][j] = gram[i].get(j, 0) + vi * vj
    y, _ = exact.solve(gram, b, len(A))
    x: dict[int, Fraction] = {}
    for i, yi in y.items():
        for c, v in A[i].items():
            x[c] = x.get(c, Fraction(0)) + yi * v
    return x


def extend_layers(
    ball: HyperbolicBall,
    known: Mapping[int, object],
    layers: Sequence[Sequence[int]],
    policy: str = "least-norm",
) -> dict[int, object]:
    """Extend ``known`` over ``layers`` one layer at a time.

    Each layer is chosen to satisfy every black triangle that becomes complete
    with it.  ``least-norm`` takes the minimum Euclidean norm solution,
    ``sparse`` sets all free values to zero.  Raises :class:`InfeasibleAnchor`
    when some layer admits no solution.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    psi = dict(known)
    tri_at: dict[int, list[tuple[int, int, int]]] = {}
    for t in black_triangles(ball):
        for v in t:
            tri_at.setdefault(v, []).append(t)
    for layer in layers:
        layer = [v for v in layer if v not in psi]
        if not layer:
            continue
        col = {v: j for j, v in enumerate(layer)}
        rows, rhs, seen = [], [], set()
        for v in layer:
            for t in tri_at.get(v, []):
                if t in seen or not all(u in psi or u in col for u in t):
                    continue
                seen.add(t)
                row: dict[int, int] = {}
                acc = Fraction(0)
                for u in t:
                    if u in col:
                        row[col[u]] = row.get(col[u], 0) + 1
                    else:
                        acc += psi[u]
                rows.append(row)
                rhs.append(-acc)
        try:
            if policy == "sparse":
                x, _ = exact.solve(rows, rhs, len(layer))
            else:
                exact.solve(rows, rhs, len(layer))
                x = _least_norm(rows, rhs, len(layer))
        except Inconsistent as err:
            raise InfeasibleAnchor(f"no extension over a layer of {len(layer)} vertices") from err
        for v, j in col.items():
            psi[v] = x.get(j, Fraction(0))
    return psi


# -- special functions ----------------------------------------------------------------


@dataclass
class SpecialFunction:
    kind: str
    anchor: tuple
    radius: int
    policy: str
    psi: dict[int, object]
    support_seed: dict[int, object]
    growth: list[tuple[int, float]] = field(default_factory=list)


def _right_region(ball: HyperbolicBall, path: Sequence[int]) -> set[int]:
    on_path = set(path)
    seeds = set()
    for a, b in zip(path, path[1:]):
        third = ball.ccw_next[b].get(a)
        if third is not None and third not in on_path:
            seeds.add(third)
    for i in range(1, len(path) - 1):
        ring = ball.ccw_next[path[i]]
        x = ring[path[i - 1]]
        while x != path[i + 1]:
            if x not in on_path:
                seeds.add(x)
            x = ring[x]
    region = set(seeds)
    queue = deque(seeds)
    while queue:
        v = queue.popleft()
        for w in ball.adj[v]:
            if w not in region and w not in on_path:
                region.add(w)
                queue.append(w)
    return region


def _layers_from(ball: HyperbolicBall, sources, exclude: set[int]) -> list[list[int]]:
    dist = {v: 0 for v in sources}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for w in ball.adj[v]:
            if w not in dist and w not in exclude:
                dist[w] = dist[v] + 1
                queue.append(w)
    depth = max(dist.values(), default=0)
    return [sorted(v for v, d in dist.items() if d == k) for k in range(1, depth + 1)]


def _growth(ball: HyperbolicBall, psi: Mapping[int, object], dist: Mapping[int, int]) -> list[tuple[int, float]]:
    best: dict[int, float] = {}
    for v, d in dist.items():
        if v in psi:
            best[d] = max(best.get(d, 0.0), abs(float(psi[v])))
    return sorted(best.items())


def psi_xl(ball: HyperbolicBall, x: int, l: int, policy: str = "least-norm") -> SpecialFunction:
    """Zero right of the maximal path through ``x -> l``, alternating on it."""
    path = maximal_path(ball, x, l)
    right = _right_region(ball, path)
    left_seeds = set()
    for i in range(1, len(path) - 1):
        ring = ball.ccw_next[path[i]]
        y = ring[path[i + 1]]
        while y != path[i - 1]:
            left_seeds.add(y)
            y = ring[y]
    if left_seeds & right:
        raise InfeasibleAnchor("the path does not separate the ball")
    i0 = path.index(x)
    seed = {v: Fraction(0) for v in right}
    for i, v in enumerate(path):
        seed[v] = Fraction((-1) ** (i - i0))
    layers = _layers_from(ball, path, right)
    psi = extend_layers(ball, seed, layers, policy)
    _require_dholomorphic(ball, psi)
    dist = bfs_distances(ball, path)
    return SpecialFunction("psi_xl", (x, l), ball.radius, policy, psi, seed, _growth(ball, psi, dist))


def forced_zeros(ball: HyperbolicBall, r: int) -> set[int]:
    """Layer ``r`` vertices in a black triangle with two vertices in ``D_{r-1}``."""
    out = set()
    for t in black_triangles(ball):
        inner = [v for v in t if ball.layer_of[v] < r]
        outer = [v for v in t if ball.layer_of[v] == r]
        if len(inner) == 2 and len(outer) == 1:
            out.add(outer[0])
    return out


def b_run(ball: HyperbolicBall, r: int, start: int) -> list[int]:
    """Maximal run of layer ``r`` vertices around ``start`` joined by ``b`` edges."""
    cyc = ball.cycles[r]
    L = len(cyc)
    pos = cyc.index(start)

    def is_b(i: int) -> bool:
        u, w = cyc[i % L], cyc[(i + 1) % L]
        inner = [
            t for t in ball.edge_triangles[frozenset((u, w))]
            if all(ball.layer_of[v] <= r for v in ball.triangles[t])
        ]
        return ball.colors[inner[0]] == BLACK

    if all(is_b(i) for i in range(L)):
        raise InfeasibleAnchor(f"layer {r} is a single b run")
    lo = pos
    while is_b(lo - 1):
        lo -= 1
    hi = pos
    while is_b(hi):
        hi += 1
    return [cyc[i % L] for i in range(lo, hi + 1)]


def z_pr(ball: HyperbolicBall, r: int, start: int, policy: str = "least-norm") -> SpecialFunction:
    """Zero on ``D_{r-1}`` and on layer ``r`` away from the ``b`` run ``P`` at ``start``."""
    if not 1 <= r < ball.radius:
        raise InfeasibleAnchor(f"layer {r} must lie strictly inside the ball")
    if ball.layer_of.get(start) != r:
        raise InfeasibleAnchor(f"vertex {start} is not on layer {r}")
    P = b_run(ball, r, start)
    blocked = forced_zeros(ball, r) & set(P)
    if blocked:
        raise InfeasibleAnchor(f"P meets forced zeros {sorted(blocked)[:5]}")
    seed = {v: Fraction(0) for v, d in ball.layer_of.items() if d <= r}
    for i, v in enumerate(P):
        seed[v] = Fraction((-1) ** i)
    layers = [ball.layers[k] for k in range(r + 1, ball.radius + 1)]
    psi = extend_layers(ball, seed, layers, policy)
    _require_dholomorphic(ball, psi)
    dist = {v: d - r for v, d in ball.layer_of.items() if d >= r}
    return SpecialFunction("z_pr", (r, start), ball.radius, policy, psi, seed, _growth(ball, psi, dist))


def _require_dholomorphic(ball: HyperbolicBall, psi: Mapping[int, object]) -> None:
    bad = qb_residual(ball, psi)
    if bad:
        raise InfeasibleAnchor(f"Q^b psi != 0 on {len(bad)} triangles")


def construct_special(
    kind: str,
    anchor: tuple,
    radius: int,
    policy: str = "least-norm",
    ball: HyperbolicBall | None = None,
) -> SpecialFunction:
    """``kind`` is ``psi_xl`` with anchor ``(x, l)`` or ``z_pr`` with anchor ``(r, vertex)``."""
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if ball is None or ball.radius != radius:
        ball = build_ball(radius)
    if kind == "psi_xl":
        return psi_xl(ball, anchor[0], anchor[1], policy)
    if kind == "z_pr":
        return z_pr(ball, anchor[0], anchor[1], policy)
    raise ValueError(f"unknown kind {kind!r}")


def default_anchor(ball: HyperbolicBall, kind: str) -> tuple:
    """A valid anchor near the centre: the first edge out of ``0`` with a black
    triangle on its right, or the first admissible run on layer 1."""
    if kind == "psi_xl":
        for l in ball.neighbors(0):
            third = ball.ccw_next[l].get(0)
            if third is not None and ball.triangle_color(0, l, third) == BLACK:
                return (0, l)
    if kind == "z_pr":
        blocked = forced_zeros(ball, 1)
        for v in ball.cycles[1]:
            if not blocked & set(b_run(ball, 1, v)):
                return (1, v)
    raise InfeasibleAnchor(f"no anchor for {kind}")
