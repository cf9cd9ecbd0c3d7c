"""Explicit balls in the {3,8} triangle lattice.

The ball is grown layer by layer.  Layer ``k`` is a counter-clockwise cycle
``v_0 .. v_{L-1}``.  Outside every edge ``v_i v_{i+1}`` a new apex ``a_i`` is
added, and between ``a_{i-1}`` and ``a_i`` the vertex ``v_i`` receives
``p - 3 - t_i`` private new vertices, where ``t_i`` counts the triangles it
already has, so that every vertex of layer ``k`` ends with exactly ``p``
triangles.  The next cycle is the concatenation of ``[q_1 .. q_s, a_i]``.

Triangles are stored counter-clockwise; ``ccw_next[v][x] = y`` whenever
``(v, x, y)`` is a counter-clockwise triangle, so walking ``ccw_next[v]``
turns around ``v``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..complex import BLACK, WHITE, Coloring, TriangulatedSurface, build_surface
from ..errors import DisconnectedSeed, NotAPath


def _flip(c: str) -> str:
    return WHITE if c == BLACK else BLACK


@dataclass(eq=False)
class HyperbolicBall:
    radius: int
    p: int
    layers: list[list[int]]
    cycles: list[list[int]]
    triangles: list[tuple[int, int, int]]
    colors: list[str]
    ccw_next: dict[int, dict[int, int]] = field(repr=False)
    layer_of: dict[int, int] = field(repr=False)
    edge_triangles: dict[frozenset, list[int]] = field(repr=False)
    adj: dict[int, set[int]] = field(repr=False, default_factory=dict)

    @property
    def vertex_count(self) -> int:
        return len(self.layer_of)

    def boundary_size(self, k: int) -> int:
        return len(self.cycles[k])

    def neighbors(self, v: int) -> list[int]:
        """Neighbours of ``v`` in counter-clockwise order (as far as they exist)."""
        nxt = self.ccw_next[v]
        if not nxt:
            return []
        prev_of = {y: x for x, y in nxt.items()}
        start = next((x for x in nxt if x not in prev_of), next(iter(nxt)))
        out, x = [start], start
        while x in nxt and nxt[x] != start:
            x = nxt[x]
            out.append(x)
        return out

    def link_complete(self, v: int) -> bool:
        return len(self.ccw_next[v]) == self.p

    def triangle_color(self, a: int, b: int, c: int) -> str:
        key = frozenset((a, b))
        for t in self.edge_triangles[key]:
            if c in self.triangles[t]:
                return self.colors[t]
        raise KeyError((a, b, c))

    def vertices_within(self, k: int) -> list[int]:
        return sorted(v for v, d in self.layer_of.items() if d <= k)

    def complex(self, vertices: Iterable[int] | None = None) -> tuple[TriangulatedSurface, Coloring]:
        """Induced subcomplex on ``vertices`` (default: the whole ball)."""
        vs = set(self.layer_of) if vertices is None else set(vertices)
        keep = [i for i, t in enumerate(self.triangles) if all(v in vs for v in t)]
        surface = build_surface(self.triangles[i] for i in keep)
        by_key = {tuple(sorted(self.triangles[i])): self.colors[i] for i in keep}
        coloring = Coloring(tuple(by_key[s] for s in surface.simplices))
        orient = []
        for s in surface.simplices:
            t = next(self.triangles[i] for i in self.edge_triangles[frozenset(s[:2])] if set(self.triangles[i]) == set(s))
            orient.append(_parity(t, s))
        surface.orientation = tuple(orient)
        return surface, coloring

    def ball_complex(self, k: int) -> tuple[TriangulatedSurface, Coloring]:
        return self.complex(self.vertices_within(k))


def _parity(seq: Sequence[int], ref: Sequence[int]) -> int:
    pos = [ref.index(v) for v in seq]
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if pos[i] > pos[j])
    return 1 if inv % 2 == 0 else -1


class _Builder:
    def __init__(self, p: int):
        self.p = p
        self.triangles: list[tuple[int, int, int]] = []
        self.colors: list[str] = []
        self.ccw_next: dict[int, dict[int, int]] = {}
        self.edge_triangles: dict[frozenset, list[int]] = {}
        self.adj: dict[int, set[int]] = {}
        self.count = 0

    def vertex(self) -> int:
        v = self.count
        self.count += 1
        self.ccw_next[v] = {}
        self.adj[v] = set()
        return v

    def add(self, a: int, b: int, c: int, color: str) -> None:
        idx = len(self.triangles)
        self.triangles.append((a, b, c))
        self.colors.append(color)
        for v, x, y in ((a, b, c), (b, c, a), (c, a, b)):
            self.ccw_next[v][x] = y
            self.adj[v].update((x, y))
        for e in ((a, b), (b, c), (c, a)):
            self.edge_triangles.setdefault(frozenset(e), []).append(idx)

    def color_across(self, a: int, b: int) -> str:
        """Colour for a new triangle on edge ``ab`` (opposite to the existing one)."""
        (t,) = self.edge_triangles[frozenset((a, b))]
        return _flip(self.colors[t])


def build_ball(r: int, p: int = 8) -> HyperbolicBall:
    """Ball ``D_r`` around vertex 0 of the lattice with ``p`` triangles per vertex.

    The triangle ``(0, 1, 2)`` is black.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if p < 7 or p % 2:
        raise ValueError("need an even number p >= 8 of triangles per vertex")
    b = _Builder(p)
    center = b.vertex()
    layers = [[center]]
    cycles = [[center]]
    if r >= 1:
        ring = [b.vertex() for _ in range(p)]
        for i in range(p):
            b.add(center, ring[i], ring[(i + 1) % p], BLACK if i % 2 == 0 else WHITE)
        layers.append(list(ring))
        cycles.append(list(ring))
    for _ in range(2, r + 1):
        cyc = cycles[-1]
        L = len(cyc)
        t = [len(b.ccw_next[v]) for v in cyc]
        apex = [b.vertex() for _ in range(L)]
        private = []
        for i in range(L):
            s = p - 3 - t[i]
            if s < 0:
                raise RuntimeError(f"vertex {cyc[i]} already has {t[i]} triangles")
            private.append([b.vertex() for _ in range(s)])
        for i in range(L):
            v, w = cyc[i], cyc[(i + 1) % L]
            b.add(v, apex[i], w, b.color_across(v, w))
        new_cycle = []
        for i in range(L):
            v = cyc[i]
            fan = [apex[i - 1]] + private[i] + [apex[i]]
            # first fan triangle is adjacent to the edge triangle (v_{i-1}, a_{i-1}, v)
            color = _flip(b.colors[b.edge_triangles[frozenset((v, apex[i - 1]))][0]])
            for x, y in zip(fan, fan[1:]):
                b.add(v, x, y, color)
                color = _flip(color)
            new_cycle.extend(private[i] + [apex[i]])
        layers.append(list(new_cycle))
        cycles.append(new_cycle)
    layer_of = {v: k for k, layer in enumerate(layers) for v in layer}
    return HyperbolicBall(
        radius=r,
        p=p,
        layers=layers,
        cycles=cycles,
        triangles=b.triangles,
        colors=b.colors,
        ccw_next=b.ccw_next,
        layer_of=layer_of,
        edge_triangles=b.edge_triangles,
        adj=b.adj,
    )


def bfs_distances(ball: HyperbolicBall, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
    dist = {v: 0 for v in sources}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for w in ball.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


# -- domains ------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainSpec:
    seed: tuple[int, ...]
    radius: int


@dataclass(eq=False)
class Domain:
    spec: DomainSpec
    ball: HyperbolicBall
    distance: dict[int, int]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.distance)

    def complex(self) -> tuple[TriangulatedSurface, Coloring]:
        return self.ball.complex(self.vertices)


def _connected(ball: HyperbolicBall, verts: set[int]) -> bool:
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in ball.adj[v]:
            if w in verts and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)


def build_domain(spec: DomainSpec, ball: HyperbolicBall | None = None) -> Domain:
    """All vertices within edge distance ``spec.radius`` of the seed set.

    Vertex ids refer to the deterministic ball construction.  A ball of radius
    ``max layer(seed) + radius`` contains every shortest path involved, so
    distances computed inside it are the lattice distances.
    """
    seed = set(spec.seed)
    if not seed:
        raise ValueError("empty seed set")
    if ball is None:
        reach = 0
        ball = build_ball(0)
        while max(seed) >= ball.vertex_count:
            reach += 1
            ball = build_ball(reach)
    unknown = [v for v in seed if v not in ball.layer_of]
    if unknown:
        raise ValueError(f"seed vertices {unknown[:5]} are not in the ball")
    need = max(ball.layer_of[v] for v in seed) + spec.radius
    if ball.radius < need:
        ball = build_ball(need, ball.p)
    if not _connected(ball, seed):
        raise DisconnectedSeed("seed set is not connected by lattice edges")
    dist = bfs_distances(ball, seed, spec.radius)
    return Domain(spec, ball, dist)


# -- words and convexity --------------------------------------------------------------


def boundary_path(ball: HyperbolicBall, k: int) -> list[int]:
    """Layer ``k`` cycle oriented with the ball ``D_k`` on the right."""
    return list(reversed(ball.cycles[k]))


def boundary_word(ball: HyperbolicBall, k: int) -> str:
    """Colour of the interior triangle on each edge of the boundary of ``D_k``."""
    if not 1 <= k <= ball.radius:
        raise ValueError(f"layer must be in 1..{ball.radius}")
    path = boundary_path(ball, k)
    letters = []
    for i, u in enumerate(path):
        w = path[(i + 1) % len(path)]
        inner = [
            t
            for t in ball.edge_triangles[frozenset((u, w))]
            if all(ball.layer_of[x] <= k for x in ball.triangles[t])
        ]
        if len(inner) != 1:
            raise RuntimeError(f"edge {(u, w)} has {len(inner)} interior triangles")
        letters.append(ball.colors[inner[0]])
    return "".join(letters)


def right_count(ball: HyperbolicBall, prev: int, v: int, nxt: int) -> int:
    """Triangles on the right of ``prev -> v -> nxt`` at ``v``."""
    ring = ball.ccw_next[v]
    if prev not in ball.adj[v] or nxt not in ball.adj[v]:
        raise NotAPath(f"{prev} -> {v} -> {nxt} is not an edge path")
    x, c = prev, 0
    while x != nxt:
        if x not in ring:
            raise NotAPath(f"right side of {prev}->{v}->{nxt} leaves the ball")
        x = ring[x]
        c += 1
        if c > ball.p:
            raise NotAPath(f"{nxt} is not adjacent to {v}")
    return c


@dataclass
class ConvexityVerdict:
    counts: list[tuple[int, int]]
    convex: bool


def right_convex_check(ball: HyperbolicBall, path: Sequence[int], closed: bool = False) -> ConvexityVerdict:
    """Right-convexity: 2 or 3 triangles on the right at every inner vertex
    (every vertex for closed paths)."""
    if len(path) < 2:
        raise NotAPath("a path needs at least two vertices")
    for a, b in zip(path, list(path[1:]) + ([path[0]] if closed else [])):
        if b not in ball.adj[a]:
            raise NotAPath(f"{a} and {b} are not adjacent")
    idx = range(len(path)) if closed else range(1, len(path) - 1)
    n = len(path)
    counts = [(path[i], right_count(ball, path[i - 1], path[i], path[(i + 1) % n])) for i in idx]
    return ConvexityVerdict(counts, all(c in (2, 3) for _, c in counts))


# -- serialization ------------------------------------------------------------------


def ball_to_json(ball: HyperbolicBall) -> dict:
    from ..complex import surface_to_json

    surface, coloring = ball.complex()
    data = surface_to_json(surface, coloring)
    data["p"] = ball.p
    data["radius"] = ball.radius
    data["layers"] = [list(layer) for layer in ball.layers]
    data["boundary_cycles"] = [list(c) for c in ball.cycles]
    return data


def ball_from_json(data: Mapping) -> tuple[TriangulatedSurface, Coloring | None, list[list[int]], list[list[int]]]:
    from ..complex import surface_from_json

    surface, coloring = surface_from_json(data)
    return surface, coloring, [list(x) for x in data["layers"]], [list(x) for x in data["boundary_cycles"]]
