"""The equilateral triangle lattice with coordinates (m, n).

Shifts are ``t1(m, n) = (m + 1, n)`` and ``t2(m, n) = (m, n + 1)``.  The black
(up) triangle rooted at ``(m, n)`` has vertices ``(m, n), (m+1, n), (m, n+1)``;
the white (down) triangle rooted at ``(m, n)`` has ``(m, n), (m-1, n), (m, n-1)``.
With that indexing ``Q^b = 1 + t1 + t2`` and ``Q^w = 1 + t1^-1 + t2^-1`` act on
vertex functions and can be iterated.

Lattice functions are plain dicts ``{(m, n): value}``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..complex import BLACK, WHITE, Coloring, TriangulatedSurface, build_surface
from ..errors import WindowTooSmall
from ..exact import format_exact, parse_exact

Point = tuple[int, int]
LatticeFunction = dict[Point, object]

QB_STENCIL = ((0, 0), (1, 0), (0, 1))
QW_STENCIL = ((0, 0), (-1, 0), (0, -1))
NEIGHBORS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def _stencil_apply(psi: Mapping[Point, object], stencil) -> LatticeFunction:
    out = {}
    for (m, n) in psi:
        pts = [(m + a, n + b) for a, b in stencil]
        if all(p in psi for p in pts):
            acc = Fraction(0)
            for p in pts:
                acc = acc + psi[p]
            out[(m, n)] = acc
    if psi and not out:
        raise WindowTooSmall("no point has its whole stencil inside the window")
    return out


def qb_apply(psi: Mapping[Point, object]) -> LatticeFunction:
    """``psi(m,n) + psi(m+1,n) + psi(m,n+1)`` wherever all three are defined."""
    return _stencil_apply(psi, QB_STENCIL)


def qw_apply(psi: Mapping[Point, object]) -> LatticeFunction:
    """``psi(m,n) + psi(m-1,n) + psi(m,n-1)`` wherever all three are defined."""
    return _stencil_apply(psi, QW_STENCIL)


def qw_power(psi: Mapping[Point, object], k: int) -> LatticeFunction:
    out = dict(psi)
    for _ in range(k):
        out = qw_apply(out)
    return out


def hex_distance(p: Point, q: Point = (0, 0)) -> int:
    dm, dn = p[0] - q[0], p[1] - q[1]
    return max(abs(dm), abs(dn), abs(dm + dn))


def hex_patch(radius: int, center: Point = (0, 0)) -> list[Point]:
    cm, cn = center
    return sorted(
        (cm + m, cn + n)
        for m in range(-radius, radius + 1)
        for n in range(-radius, radius + 1)
        if hex_distance((m, n)) <= radius
    )


def triangle_window(size: int, origin: Point = (0, 0)) -> list[Point]:
    """``{(m, n) : m, n >= 0, m + n <= size}`` shifted to ``origin``."""
    m0, n0 = origin
    return [(m0 + m, n0 + n) for m in range(size + 1) for n in range(size + 1 - m)]


def covariant_constant(f: tuple, points: Iterable[Point]) -> LatticeFunction:
    """``psi(m, n) = f[(m - n) mod 3]``; covariantly constant iff ``sum(f) == 0``."""
    return {(m, n): f[(m - n) % 3] for (m, n) in points}


# -- finite complexes -------------------------------------------------------------


@dataclass(eq=False)
class LatticePatch:
    """Finite piece of the lattice as a surface with its natural coloring."""

    surface: TriangulatedSurface
    coloring: Coloring
    points: list[Point]
    vid: dict[Point, int]

    def to_vertex_function(self, psi: Mapping[Point, object]) -> dict[int, object]:
        return {self.vid[p]: v for p, v in psi.items() if p in self.vid}

    def to_lattice_function(self, psi: Mapping[int, object]) -> LatticeFunction:
        return {self.points[v]: val for v, val in psi.items()}

    def root(self, simplex_index: int) -> tuple[str, Point]:
        """Colour and root point of a triangle."""
        pts = [self.points[v] for v in self.surface.simplices[simplex_index]]
        if self.coloring.colors[simplex_index] == BLACK:
            return BLACK, min(pts, key=lambda p: p[0] + p[1])
        return WHITE, max(pts, key=lambda p: p[0] + p[1])


def euclid_surface(points: Iterable[Point]) -> LatticePatch:
    """All lattice triangles with every vertex in ``points``; up triangles black."""
    pts = sorted(set(points))
    vid = {p: i for i, p in enumerate(pts)}
    tris, colors = [], []
    for (m, n) in pts:
        up = [(m, n), (m + 1, n), (m, n + 1)]
        down = [(m, n), (m - 1, n), (m, n - 1)]
        if all(p in vid for p in up):
            tris.append(tuple(vid[p] for p in up))
            colors.append(BLACK)
        if all(p in vid for p in down):
            tris.append(tuple(vid[p] for p in down))
            colors.append(WHITE)
    used = {v for t in tris for v in t}
    if len(used) != len(pts):
        raise WindowTooSmall("some points lie in no triangle")
    surface = build_surface(tris)
    order = {tuple(sorted(t)): c for t, c in zip(tris, colors)}
    coloring = Coloring(tuple(order[s] for s in surface.simplices))
    return LatticePatch(surface, coloring, pts, vid)


def lattice_hnf(u: Point, v: Point) -> tuple[int, int, int]:
    """``(a, b, c)`` with ``<u, v> = <(a, 0), (b, c)>``, ``a, c > 0``, ``0 <= b < a``."""
    rows = [list(u), list(v)]
    # Euclid on the second coordinate
    while rows[1][1] != 0:
        q = rows[0][1] // rows[1][1]
        rows[0] = [rows[0][0] - q * rows[1][0], rows[0][1] - q * rows[1][1]]
        rows[0], rows[1] = rows[1], rows[0]
    (b, c), (a, _) = rows[0], rows[1]
    if a == 0 or c == 0:
        raise ValueError("generators are linearly dependent")
    if c < 0:
        b, c = -b, -c
    a = abs(a)
    return a, b % a, c


def torus_surface(u: Point, v: Point) -> LatticePatch:
    """Quotient of the lattice by the sublattice spanned by ``u`` and ``v``."""
    a, b, c = lattice_hnf(u, v)

    def reduce(m, n):
        k = n // c
        return ((m - k * b) % a, n - k * c)

    pts = sorted({reduce(m, n) for m in range(a) for n in range(c)})
    vid = {p: i for i, p in enumerate(pts)}
    tris, colors = [], []
    for (m, n) in pts:
        tris.append(tuple(vid[reduce(*q)] for q in [(m, n), (m + 1, n), (m, n + 1)]))
        colors.append(BLACK)
        tris.append(tuple(vid[reduce(*q)] for q in [(m, n), (m - 1, n), (m, n - 1)]))
        colors.append(WHITE)
    if any(len(set(t)) < 3 for t in tris) or len({tuple(sorted(t)) for t in tris}) < len(tris):
        raise WindowTooSmall("quotient too small to be a simplicial complex")
    surface = build_surface(tris)
    order = {tuple(sorted(t)): col for t, col in zip(tris, colors)}
    coloring = Coloring(tuple(order[s] for s in surface.simplices))
    return LatticePatch(surface, coloring, pts, vid)


# -- operator identity --------------------------------------------------------------


def qbqw_identity_check(radius: int = 4) -> dict:
    """Check ``Q^b Q^w = -Delta + 9`` row by row at interior points of a hex patch.

    ``Delta`` is the positive graph Laplacian read off the triangulated patch;
    ``Q^b Q^w`` is obtained by applying the two stencils to point masses.
    """
    from ..triangle_ops import laplacian_row, vertex_neighbors

    patch = euclid_surface(hex_patch(radius))
    nb = vertex_neighbors(patch.surface)
    window = patch.points
    worst = Fraction(0)
    checked = 0
    for x in hex_patch(radius - 2):
        # row x of an operator A is the functional psi -> (A psi)(x); probe with masses
        lap = laplacian_row(patch.surface, patch.vid[x], nb)
        for y in hex_patch(2, x):
            delta = {p: Fraction(int(p == y)) for p in window}
            got = qb_apply(qw_apply(delta)).get(x)
            want = -lap.get(patch.vid[y], 0) + (9 if y == x else 0)
            worst = max(worst, abs(got - want))
        checked += 1
    return {
        "identity": "QbQw = -Delta + 9",
        "lhs_dim": checked,
        "rhs_dim": checked,
        "pass": worst == 0,
        "discrepancy": format_exact(worst),
    }


# -- CSV ----------------------------------------------------------------------------


def write_lattice_csv(psi: Mapping[Point, object], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "n", "value"])
        for (m, n) in sorted(psi):
            w.writerow([m, n, format_exact(psi[(m, n)])])


def read_lattice_csv(path) -> LatticeFunction:
    out: LatticeFunction = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out[(int(row["m"]), int(row["n"]))] = parse_exact(row["value"])
    return out
