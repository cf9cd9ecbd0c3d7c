"""Simplicial complexes with black/white structure and discrete GL_n connections.

A connection assigns a nonzero coefficient ``b[T, P]`` to every top simplex
``T`` and vertex ``P`` of ``T``; a vertex function ``psi`` is covariantly
constant when ``sum_P b[T, P] psi(P) = 0`` on every top simplex.  Parallel
transport solves that equation simplex by simplex along a thick path.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import (
    BoundaryVertex,
    DegeneratePath,
    EmptyInput,
    NonManifold,
    NotClosed,
    NotColorable,
    NotFlat,
    ZeroGaugeValue,
)
from .exact import ZETA, div

Simplex = tuple[int, ...]
Face = tuple[int, ...]
VertexFunction = dict[int, object]

BLACK, WHITE = "b", "w"


def _faces(simplex: Simplex) -> list[Face]:
    return [simplex[:i] + simplex[i + 1:] for i in range(len(simplex))]


@dataclass(eq=False)
class TriangulatedSurface:
    """Pure simplicial complex of dimension ``dimension``.

    ``simplices`` are sorted vertex tuples; ``orientation[i]`` is +1 when the
    sorted order of simplex ``i`` is positively oriented and -1 otherwise.
    ``orientation`` is ``None`` for non-orientable complexes.
    """

    dimension: int
    vertices: tuple[int, ...]
    simplices: tuple[Simplex, ...]
    facet_adjacency: dict[Face, tuple[int, ...]]
    orientation: tuple[int, ...] | None = None
    index: dict[Simplex, int] = field(default_factory=dict, repr=False)

    @property
    def orientable(self) -> bool:
        return self.orientation is not None

    def boundary_faces(self) -> list[Face]:
        return [f for f, ts in self.facet_adjacency.items() if len(ts) == 1]

    @property
    def is_closed(self) -> bool:
        return not self.boundary_faces()

    def neighbors(self, i: int) -> list[tuple[Face, int]]:
        out = []
        for f in _faces(self.simplices[i]):
            for j in self.facet_adjacency[f]:
                if j != i:
                    out.append((f, j))
        return out

    def star(self, v: int) -> list[int]:
        return [i for i, s in enumerate(self.simplices) if v in s]

    def oriented(self, i: int) -> Simplex:
        """Vertices of simplex ``i`` in positively oriented order."""
        s = self.simplices[i]
        if self.orientation is None or self.orientation[i] > 0:
            return s
        return (s[1], s[0]) + s[2:]

    def euler_characteristic(self) -> int:
        chi = 0
        for k in range(self.dimension + 1):
            faces = {c for s in self.simplices for c in combinations(s, k + 1)}
            chi += (-1) ** k * len(faces)
        return chi

    def dual_connected(self) -> bool:
        if not self.simplices:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for _, j in self.neighbors(i):
                if j not in seen:
                    seen.add(j)
                    queue.append(j)
        return len(seen) == len(self.simplices)


def build_surface(simplex_list: Iterable[Sequence[int]]) -> TriangulatedSurface:
    """Build a complex from its top simplices.

    Raises :class:`EmptyInput` for no simplices and :class:`NonManifold` when a
    codimension-one face lies in more than two simplices.
    """
    simplices = [tuple(sorted(s)) for s in simplex_list]
    if not simplices:
        raise EmptyInput("no simplices given")
    arity = len(simplices[0])
    if arity < 2 or any(len(s) != arity for s in simplices):
        raise ValueError("simplices must have uniform arity >= 2")
    if any(len(set(s)) != arity for s in simplices):
        raise ValueError("repeated vertex inside a simplex")
    if len(set(simplices)) != len(simplices):
        raise ValueError("duplicate simplex")
    adjacency: dict[Face, list[int]] = {}
    for i, s in enumerate(simplices):
        for f in _faces(s):
            adjacency.setdefault(f, []).append(i)
    for f, ts in adjacency.items():
        if len(ts) > 2:
            raise NonManifold(f, [simplices[t] for t in ts])
    adjacency_t = {f: tuple(ts) for f, ts in adjacency.items()}
    return TriangulatedSurface(
        dimension=arity - 1,
        vertices=tuple(sorted({v for s in simplices for v in s})),
        simplices=tuple(simplices),
        facet_adjacency=adjacency_t,
        orientation=_orient(simplices, adjacency_t),
        index={s: i for i, s in enumerate(simplices)},
    )


def _orient(simplices, adjacency) -> tuple[int, ...] | None:
    # deleting position k of a simplex with sign s induces s * (-1)**k on the face;
    # the two simplices on a face must induce opposite signs
    sign: list[int | None] = [None] * len(simplices)
    for root in range(len(simplices)):
        if sign[root] is not None:
            continue
        sign[root] = 1
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for k, f in enumerate(_faces(simplices[i])):
                induced = sign[i] * (-1) ** k
                for j in adjacency[f]:
                    if j == i:
                        continue
                    other = next(v for v in simplices[j] if v not in f)
                    want = -induced * (-1) ** simplices[j].index(other)
                    if sign[j] is None:
                        sign[j] = want
                        queue.append(j)
                    elif sign[j] != want:
                        return None
    return tuple(sign)


def oriented_surface(triangles: Iterable[Sequence[int]]) -> TriangulatedSurface:
    """Build a surface whose orientation agrees with the given vertex orders."""
    tris = [tuple(t) for t in triangles]
    surface = build_surface(tris)
    if surface.orientation is None:
        raise ValueError("triangles are not consistently orientable")
    first = tris[0]
    i0 = surface.index[tuple(sorted(first))]
    if _perm_parity(first, surface.simplices[i0]) * surface.orientation[i0] < 0:
        surface.orientation = tuple(-s for s in surface.orientation)
    for t in tris[1:]:
        i = surface.index[tuple(sorted(t))]
        if _perm_parity(t, surface.simplices[i]) != surface.orientation[i]:
            raise ValueError(f"vertex order of {t} disagrees with the orientation")
    return surface


def _perm_parity(seq: Sequence[int], ref: Sequence[int]) -> int:
    pos = [ref.index(v) for v in seq]
    sign = 1
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if pos[i] > pos[j]:
                sign = -sign
    return sign


# -- thick paths ------------------------------------------------------------


@dataclass(frozen=True)
class ThickPath:
    """Top simplices ``T_1 .. T_k`` with consecutive ones sharing a facet.

    Construction does not insist that consecutive shared faces differ, so a
    back-and-forth path still has a parity; transport rejects such paths.
    """

    simplices: tuple[Simplex, ...]

    def __post_init__(self):
        simp = tuple(tuple(sorted(s)) for s in self.simplices)
        object.__setattr__(self, "simplices", simp)
        if not simp:
            raise EmptyInput("empty thick path")
        n = len(simp[0])
        for a, b in zip(simp, simp[1:]):
            if len(set(a) & set(b)) != n - 1:
                raise ValueError(f"{a} and {b} do not share a facet")

    @property
    def shared_faces(self) -> tuple[Face, ...]:
        return tuple(
            tuple(sorted(set(a) & set(b))) for a, b in zip(self.simplices, self.simplices[1:])
        )

    @property
    def closed(self) -> bool:
        return len(self.simplices) > 1 and self.simplices[0] == self.simplices[-1]

    @property
    def length(self) -> int:
        return len(self.simplices) - 1

    @property
    def degenerate(self) -> bool:
        faces = self.shared_faces
        if any(a == b for a, b in zip(faces, faces[1:])):
            return True
        return self.closed and len(faces) > 1 and faces[0] == faces[-1]


def phi2(path: ThickPath) -> int:
    """Number of simplices traversed by a closed thick path, mod 2."""
    if not path.closed:
        raise NotClosed("parity is defined on closed thick paths")
    return path.length % 2


# -- coloring ---------------------------------------------------------------


@dataclass(frozen=True)
class Coloring:
    """Black/white labels of top simplices, indexed like ``surface.simplices``."""

    colors: tuple[str, ...]

    def black(self) -> list[int]:
        return [i for i, c in enumerate(self.colors) if c == BLACK]

    def white(self) -> list[int]:
        return [i for i, c in enumerate(self.colors) if c == WHITE]

    def swapped(self) -> "Coloring":
        return Coloring(tuple(WHITE if c == BLACK else BLACK for c in self.colors))

    def is_valid(self, surface: TriangulatedSurface) -> bool:
        if len(self.colors) != len(surface.simplices):
            return False
        if any(c not in (BLACK, WHITE) for c in self.colors):
            return False
        return all(
            self.colors[ts[0]] != self.colors[ts[1]]
            for ts in surface.facet_adjacency.values()
            if len(ts) == 2
        )


def _bfs_tree(surface: TriangulatedSurface, root: int):
    parent: dict[int, int | None] = {root: None}
    order = [root]
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for _, j in surface.neighbors(i):
            if j not in parent:
                parent[j] = i
                order.append(j)
                queue.append(j)
    return parent, order


def _fundamental_cycle(surface, parent, a, b) -> ThickPath:
    """Closed thick path: tree path lca..a, the dual edge a-b, tree path b..lca."""

    def up(i):
        out = [i]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out

    pa, pb = up(a), up(b)
    on_a = set(pa)
    lca = next(x for x in pb if x in on_a)
    seq = list(reversed(pa[: pa.index(lca) + 1])) + pb[: pb.index(lca)] + [lca]
    return ThickPath(tuple(surface.simplices[i] for i in seq))


def find_bw_coloring(surface: TriangulatedSurface) -> Coloring:
    """Two-colour top simplices so that facet-adjacent ones differ.

    The lowest-indexed simplex of each dual component is black.  Raises
    :class:`NotColorable` carrying an odd closed thick path.
    """
    color: dict[int, str] = {}
    for root in range(len(surface.simplices)):
        if root in color:
            continue
        parent, order = _bfs_tree(surface, root)
        depth = {root: 0}
        for i in order[1:]:
            depth[i] = depth[parent[i]] + 1
        for i in order:
            color[i] = BLACK if depth[i] % 2 == 0 else WHITE
        for i in order:
            for _, j in surface.neighbors(i):
                if color[j] == color[i]:
                    raise NotColorable(_fundamental_cycle(surface, parent, i, j))
    return Coloring(tuple(color[i] for i in range(len(surface.simplices))))


# -- connections ------------------------------------------------------------


@dataclass(eq=False)
class Connection:
    """Nonzero coefficients ``b[T, P]`` for every top simplex ``T`` and ``P`` in ``T``.

    Only the ratios within one simplex matter; raw values are kept so gauge
    transformations act by plain multiplication.
    """

    surface: TriangulatedSurface
    coefficients: dict[tuple[Simplex, int], object]

    def __post_init__(self):
        for key, v in self.coefficients.items():
            if not v:
                raise ValueError(f"zero connection coefficient at {key}")

    @classmethod
    def canonical(cls, surface: TriangulatedSurface) -> "Connection":
        return cls(surface, {(s, p): 1 for s in surface.simplices for p in s})

    def coef(self, simplex: Simplex, vertex: int):
        return self.coefficients[(simplex, vertex)]

    def ratio(self, simplex: Simplex, p: int, q: int):
        return div(self.coef(simplex, p), self.coef(simplex, q))

    @property
    def is_canonical(self) -> bool:
        return all(v == 1 for v in self.coefficients.values())

    def complete(self, simplex: Simplex, known: Mapping[int, object]):
        """Value at the one vertex of ``simplex`` absent from ``known`` that
        makes the simplex equation hold."""
        missing = [p for p in simplex if p not in known]
        if len(missing) != 1:
            raise ValueError("exactly one vertex value must be unknown")
        m = missing[0]
        acc = Fraction(0)
        for p in simplex:
            if p != m:
                acc = acc + self.coef(simplex, p) * known[p]
        return div(-acc, self.coef(simplex, m))

    def residual(self, simplex: Simplex, psi: Mapping[int, object]):
        acc = Fraction(0)
        for p in simplex:
            acc = acc + self.coef(simplex, p) * psi[p]
        return acc


def parallel_transport(
    conn: Connection,
    path: ThickPath,
    in_values: Mapping[int, object],
    in_face: Face | None = None,
) -> dict[int, object]:
    """Carry values on a face of ``T_1`` to the last shared face of the path.

    For closed paths the default in-face is the face through which the path
    re-enters ``T_1``.  A length-zero path returns ``in_values`` unchanged.
    """
    if path.degenerate:
        raise DegeneratePath("consecutive shared faces coincide")
    faces = path.shared_faces
    if in_face is None:
        in_face = faces[-1] if path.closed else tuple(sorted(in_values))
    in_face = tuple(sorted(in_face))
    first = path.simplices[0]
    if len(in_face) != len(first) - 1 or not set(in_face) <= set(first):
        raise ValueError(f"{in_face} is not a facet of {first}")
    if set(in_values) != set(in_face):
        raise ValueError("in_values must be indexed by the in-face vertices")
    if path.length and faces[0] == in_face:
        raise DegeneratePath("first step leaves through the in-face")
    vals = dict(in_values)
    for simplex, out in zip(path.simplices, faces):
        full = dict(vals)
        missing = next(p for p in simplex if p not in vals)
        full[missing] = conn.complete(simplex, vals)
        vals = {v: full[v] for v in out}
    return vals


@dataclass(frozen=True)
class HolonomyElement:
    """Linear map on values over ``face`` (columns = images of unit vectors).

    ``permutation`` maps each vertex of the base simplex to the vertex whose
    initial value it carries after transport; set for canonical connections.
    """

    face: Face
    matrix: tuple[tuple[object, ...], ...]
    permutation: dict[int, int] | None = None

    @property
    def is_identity(self) -> bool:
        n = len(self.face)
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def permutation_sign(self) -> int | None:
        if self.permutation is None:
            return None
        keys = sorted(self.permutation)
        return _perm_parity([self.permutation[k] for k in keys], keys)


def holonomy(conn: Connection, path: ThickPath) -> HolonomyElement:
    if not path.closed:
        raise NotClosed("holonomy needs a closed thick path")
    face = path.shared_faces[-1]
    cols = []
    for v in face:
        unit = {u: Fraction(int(u == v)) for u in face}
        out = parallel_transport(conn, path, unit, in_face=face)
        cols.append([out[u] for u in face])
    matrix = tuple(tuple(cols[c][r] for c in range(len(face))) for r in range(len(face)))
    perm = None
    if conn.is_canonical:
        base = path.simplices[0]
        n = len(base) - 1
        # distinct values summing to zero are carried around as a permutation
        start = dict(zip(base, list(range(1, n + 1)) + [-n * (n + 1) // 2]))
        out = parallel_transport(conn, path, {v: start[v] for v in face}, in_face=face)
        full = dict(out)
        missing = next(p for p in base if p not in full)
        full[missing] = conn.complete(base, out)
        by_value = {val: v for v, val in start.items()}
        perm = {v: by_value[full[v]] for v in base}
    return HolonomyElement(face=face, matrix=matrix, permutation=perm)


def _link_loop(surface: TriangulatedSurface, core: tuple[int, ...]) -> ThickPath:
    """Closed thick path through the simplices containing a codim-2 face ``core``."""
    star = [i for i, s in enumerate(surface.simplices) if set(core) <= set(s)]
    if not star:
        raise ValueError(f"{core} is not in the complex")
    start = star[0]
    seq = [start]
    prev_face = None
    cur = start
    while True:
        s = surface.simplices[cur]
        facets = [f for f in _faces(s) if set(core) <= set(f) and f != prev_face]
        f = facets[0]
        others = [j for j in surface.facet_adjacency[f] if j != cur]
        if not others:
            raise BoundaryVertex(f"facet {f} around {core} is on the boundary")
        cur = others[0]
        prev_face = f
        seq.append(cur)
        if cur == start:
            break
    if len(seq) < 3:
        raise BoundaryVertex(f"degenerate star around {core}")
    return ThickPath(tuple(surface.simplices[i] for i in seq))


def vertex_curvature(conn: Connection, vertex: int) -> list[HolonomyElement]:
    """Holonomies around every codim-2 face through ``vertex``.

    For surfaces that is the single loop around the vertex.  The connection
    is flat at the vertex iff every returned element is the identity.
    """
    surface = conn.surface
    n = surface.dimension
    if n < 2:
        raise ValueError("curvature needs dimension >= 2")
    cores = sorted(
        {c for s in surface.simplices if vertex in s for c in combinations(s, n - 1) if vertex in c}
    )
    if not cores:
        raise ValueError(f"vertex {vertex} not in complex")
    return [holonomy(conn, _link_loop(surface, c)) for c in cores]


def interior_vertices(surface: TriangulatedSurface) -> list[int]:
    on_boundary = {v for f in surface.boundary_faces() for v in f}
    return [v for v in surface.vertices if v not in on_boundary]


def covariant_constant_basis(surface: TriangulatedSurface, conn: Connection) -> list[VertexFunction]:
    """Basis of solutions of the simplex equations on every top simplex.

    Propagates unit data from one facet of the first simplex over a spanning
    tree of the dual graph and then checks every dual edge; a mismatch raises
    :class:`NotFlat` with the offending closed thick path.
    """
    if conn.surface is not surface:
        raise ValueError("connection belongs to a different surface")
    if not surface.dual_connected():
        raise ValueError("covariant constants need a connected complex")
    n = surface.dimension
    if n == 2:
        for v in interior_vertices(surface):
            for h in vertex_curvature(conn, v):
                if not h.is_identity:
                    raise NotFlat(_link_loop(surface, (v,)), f"curvature at vertex {v}")
    parent, order = _bfs_tree(surface, 0)
    root = surface.simplices[0]
    local: dict[int, dict[int, tuple]] = {}
    seed = {v: tuple(Fraction(int(i == k)) for k in range(n)) for i, v in enumerate(root[:n])}
    local[0] = _complete_vectors(conn, root, seed)
    for i in order[1:]:
        p = parent[i]
        s = surface.simplices[i]
        known = {v: local[p][v] for v in s if v in local[p]}
        local[i] = _complete_vectors(conn, s, known)
    for f, ts in surface.facet_adjacency.items():
        if len(ts) == 2:
            a, b = ts
            if any(local[a][v] != local[b][v] for v in f):
                raise NotFlat(_fundamental_cycle(surface, parent, a, b), "nontrivial topological holonomy")
    values: dict[int, tuple] = {}
    for i in order:
        for v, vec in local[i].items():
            if v in values and values[v] != vec:
                raise NotFlat(None, f"inconsistent values at vertex {v}")
            values[v] = vec
    return [{v: vec[k] for v, vec in sorted(values.items())} for k in range(n)]


def _complete_vectors(conn, simplex, known):
    n = len(next(iter(known.values())))
    missing = next(p for p in simplex if p not in known)
    comp = tuple(conn.complete(simplex, {v: known[v][k] for v in known}) for k in range(n))
    out = dict(known)
    out[missing] = comp
    return out


def gauge_conjugate(conn: Connection, f: Mapping[int, object]) -> Connection:
    """Connection for ``Q -> Q f``: coefficients become ``b[T, P] * f(P)``.

    Covariant constants of the result are ``psi / f`` for covariant constants
    ``psi`` of ``conn``.
    """
    for v in conn.surface.vertices:
        if v not in f or not f[v]:
            raise ZeroGaugeValue(f"gauge function vanishes at vertex {v}")
    return Connection(
        conn.surface, {(s, p): b * f[p] for (s, p), b in conn.coefficients.items()}
    )


def cube_root_gauge(surface: TriangulatedSurface) -> VertexFunction:
    """Covariant constant of the canonical connection with values 1, zeta, zeta^2
    on every triangle (exact, in Q(zeta))."""
    if surface.dimension != 2:
        raise ValueError("the cube-root gauge is defined for surfaces")
    e1, e2 = covariant_constant_basis(surface, Connection.canonical(surface))
    f0 = {v: e1[v] + ZETA * e2[v] for v in surface.vertices}
    roots = {ZETA ** 0, ZETA, ZETA ** 2}
    bad = [v for v, x in f0.items() if x not in roots]
    if bad:
        raise ValueError(f"values outside the cube roots of unity at {bad[:5]}")
    return f0


# -- serialization ------------------------------------------------------------


def surface_to_json(surface: TriangulatedSurface, coloring: Coloring | None = None) -> dict:
    data = {
        "dimension": surface.dimension,
        "vertices": list(surface.vertices),
        "simplices": [list(s) for s in surface.simplices],
    }
    if coloring is not None:
        data["colors"] = list(coloring.colors)
    if surface.orientation is not None:
        data["orientation"] = list(surface.orientation)
    return data


def surface_from_json(data: Mapping) -> tuple[TriangulatedSurface, Coloring | None]:
    surface = build_surface(data["simplices"])
    if int(data.get("dimension", surface.dimension)) != surface.dimension:
        raise ValueError("dimension does not match simplex arity")
    if "vertices" in data and sorted(data["vertices"]) != list(surface.vertices):
        raise ValueError("vertex list does not match simplices")
    listed = [tuple(sorted(s)) for s in data["simplices"]]
    if "orientation" in data and surface.orientation is not None:
        given = dict(zip(listed, data["orientation"]))
        want = tuple(int(given[s]) for s in surface.simplices)
        flipped = tuple(-x for x in surface.orientation)
        if want not in (surface.orientation, flipped):
            raise ValueError("orientation field is inconsistent")
        surface.orientation = want
    coloring = None
    if "colors" in data:
        given = dict(zip(listed, data["colors"]))
        coloring = Coloring(tuple(given[s] for s in surface.simplices))
        if not coloring.is_valid(surface):
            raise ValueError("colors are not a valid black/white coloring")
    return surface, coloring
