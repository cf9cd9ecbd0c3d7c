"""d-polynomials on the equilateral lattice.

``Pol_k`` is the space of ``psi`` with ``Q^b psi = 0`` and ``(Q^w)^(k+1) psi = 0``.
On a finite triangular window both conditions are imposed wherever their
stencils fit; the window is large enough once enlarging it no longer changes
the dimension and restriction to the smaller window stays injective.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .. import exact
from ..errors import DomainMismatch, Inconsistent, NoSuchPolynomial, RankDeficient, WindowTooSmall
from .lattice import LatticeFunction, Point, qb_apply, qw_power, triangle_window


@dataclass(frozen=True)
class CanonicalTriangle:
    """``T_k = {m >= m0, n >= n0, (m - m0) + (n - n0) <= 2k + 1}``: black inside,
    ``2k + 2`` points on every edge."""

    anchor: Point
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    @property
    def size(self) -> int:
        return 2 * self.k + 1

    def points(self) -> list[Point]:
        return triangle_window(self.size, self.anchor)

    def corners(self) -> tuple[Point, Point, Point]:
        m0, n0 = self.anchor
        K = self.size
        return (m0, n0), (m0 + K, n0), (m0, n0 + K)

    def edge(self, alpha: int) -> list[Point]:
        """Edge ``alpha`` walked from its start corner; the edges are oriented
        cyclically c0 -> c1 -> c2 -> c0."""
        m0, n0 = self.anchor
        K = self.size
        if alpha == 0:
            return [(m0 + i, n0) for i in range(K + 1)]
        if alpha == 1:
            return [(m0 + K - i, n0 + i) for i in range(K + 1)]
        if alpha == 2:
            return [(m0, n0 + K - i) for i in range(K + 1)]
        raise ValueError("alpha must be 0, 1 or 2")

    def rotate(self, p: Point) -> Point:
        """Order-three lattice symmetry preserving ``T_k`` and both colours."""
        m0, n0 = self.anchor
        m, n = p[0] - m0, p[1] - n0
        return (m0 + n, n0 + self.size - m - n)

    def window(self, margin: int) -> "TriangularWindow":
        """Rotation-invariant triangular window containing ``T_k``."""
        m0, n0 = self.anchor
        return TriangularWindow(self.size + 3 * margin, (m0 - margin, n0 - margin))


@dataclass(frozen=True)
class TriangularWindow:
    size: int
    origin: Point = (0, 0)

    def points(self) -> list[Point]:
        return triangle_window(self.size, self.origin)

    def contains(self, p: Point) -> bool:
        m, n = p[0] - self.origin[0], p[1] - self.origin[1]
        return m >= 0 and n >= 0 and m + n <= self.size

    def enlarged(self, by: int = 1) -> "TriangularWindow":
        return TriangularWindow(self.size + 3 * by, (self.origin[0] - by, self.origin[1] - by))


def qw_power_stencil(k: int) -> dict[Point, int]:
    """Coefficients of ``(1 + t1^-1 + t2^-1)^k`` keyed by shift."""
    return {
        (-i, -j): factorial(k) // (factorial(i) * factorial(j) * factorial(k - i - j))
        for i in range(k + 1)
        for j in range(k + 1 - i)
    }


def pol_constraints(k: int, points: Sequence[Point]) -> list[dict[int, int]]:
    col = {p: j for j, p in enumerate(points)}
    rows = []
    for (m, n) in points:
        up = [(m, n), (m + 1, n), (m, n + 1)]
        if all(p in col for p in up):
            rows.append({col[p]: 1 for p in up})
    stencil = qw_power_stencil(k + 1)
    for (m, n) in points:
        pts = {(m + a, n + b): c for (a, b), c in stencil.items()}
        if all(p in col for p in pts):
            rows.append({col[p]: c for p, c in pts.items()})
    return rows


def _pol_basis_on(k: int, points: Sequence[Point]) -> list[LatticeFunction]:
    rows = pol_constraints(k, points)
    zero = Fraction(0)
    return [
        {p: vec.get(j, zero) for j, p in enumerate(points)}
        for vec in exact.nullspace(rows, len(points))
    ]


def _restricted_rank(basis: Sequence[Mapping], points: Sequence[Point]) -> int:
    col = {p: j for j, p in enumerate(points)}
    rows = [{col[p]: f.get(p, 0) for p in points if f.get(p, 0)} for f in basis]
    return exact.rank(rows, len(points))


@dataclass
class PolSpace:
    k: int
    triangle: CanonicalTriangle
    window: TriangularWindow
    basis: list[LatticeFunction]
    stable: bool
    determined_by_triangle: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)


def pol_space_basis(
    k: int,
    triangle: CanonicalTriangle | None = None,
    window: TriangularWindow | None = None,
) -> PolSpace:
    """Exact basis of ``Pol_k`` on ``window`` with a stability check.

    Raises :class:`WindowTooSmall` when the dimension on the enlarged window
    differs or restriction from it is not injective.
    """
    triangle = triangle or CanonicalTriangle((0, 0), k)
    window = window or triangle.window(1)
    pts = window.points()
    tri_pts = triangle.points()
    if not all(window.contains(p) for p in tri_pts):
        raise WindowTooSmall("window does not contain the canonical triangle")
    basis = _pol_basis_on(k, pts)
    big = _pol_basis_on(k, window.enlarged().points())
    stable = len(big) == len(basis) and _restricted_rank(big, pts) == len(basis)
    if not stable:
        raise WindowTooSmall(f"dimension not stable: {len(basis)} vs {len(big)} on enlarged window")
    determined = _restricted_rank(basis, tri_pts) == len(basis)
    return PolSpace(k, triangle, window, basis, stable, determined)


def _fit_on_triangle(space: PolSpace, target: Mapping[Point, object]) -> LatticeFunction:
    """The element of ``space`` with the given values on its canonical triangle."""
    tri = space.triangle.points()
    rows = [{j: f[p] for j, f in enumerate(space.basis) if f[p]} for p in tri]
    rhs = [Fraction(target[p]) for p in tri]
    x, kernel = exact.solve(rows, rhs, len(space.basis))
    if kernel:
        raise RankDeficient(f"{len(kernel)}-dimensional ambiguity on the triangle")
    out = {}
    for p in space.window.points():
        acc = Fraction(0)
        for j, c in x.items():
            acc += c * space.basis[j][p]
        out[p] = acc
    return out


def in_pol(psi: Mapping[Point, object], k: int) -> bool:
    """``Q^b psi = 0`` and ``(Q^w)^(k+1) psi = 0`` wherever defined."""
    if any(qb_apply(psi).values()):
        return False
    return not any(qw_power(psi, k + 1).values())


@dataclass
class CanonicalPolynomials:
    triangle: CanonicalTriangle
    functions: list[LatticeFunction]
    sum_in_lower: bool


def edge_data(triangle: CanonicalTriangle, alpha: int) -> dict[Point, int]:
    """Zero on ``T_k`` except edge ``alpha``, alternating +1, -1 from its start."""
    data = {p: 0 for p in triangle.points()}
    for i, p in enumerate(triangle.edge(alpha)):
        data[p] = (-1) ** i
    return data


def canonical_polynomials(k: int, triangle: CanonicalTriangle | None = None, margin: int = 1) -> CanonicalPolynomials:
    if k < 1:
        raise ValueError("canonical polynomials need k >= 1")
    triangle = triangle or CanonicalTriangle((0, 0), k)
    space = pol_space_basis(k, triangle, triangle.window(margin))
    funcs = []
    for alpha in range(3):
        try:
            funcs.append(_fit_on_triangle(space, edge_data(triangle, alpha)))
        except Inconsistent:
            raise NoSuchPolynomial(f"edge {alpha} data is not the trace of a k-polynomial") from None
    total = {p: funcs[0][p] + funcs[1][p] + funcs[2][p] for p in funcs[0]}
    return CanonicalPolynomials(triangle, funcs, in_pol(total, k - 1))


@dataclass
class TaylorStep:
    phi: LatticeFunction
    rank: int
    dimension: int


def taylor_step(psi: Mapping[Point, object], triangle: CanonicalTriangle, margin: int = 1) -> TaylorStep:
    """The unique ``phi`` in ``Pol_k`` agreeing with ``psi`` on ``T_k``."""
    tri = triangle.points()
    missing = [p for p in tri if p not in psi]
    if missing:
        raise DomainMismatch(f"psi undefined on the triangle at {missing[:3]}")
    on_tri = {p: psi[p] for p in tri}
    if any(qb_apply(on_tri).values()):
        raise DomainMismatch("psi is not d-holomorphic on the triangle")
    space = pol_space_basis(triangle.k, triangle, triangle.window(margin))
    rank = _restricted_rank(space.basis, tri)
    if rank != space.dimension:
        raise RankDeficient(f"rank {rank} < {space.dimension} on the triangle")
    return TaylorStep(_fit_on_triangle(space, on_tri), rank, space.dimension)


def fill_from_hypotenuse(values: Sequence, origin: Point = (0, 0)) -> LatticeFunction:
    """d-holomorphic function on a triangular window from its hypotenuse values.

    ``values[a]`` sits at ``origin + (a, L - a)``; lower diagonals follow from
    ``psi(m, n) = -psi(m+1, n) - psi(m, n+1)``.
    """
    L = len(values) - 1
    m0, n0 = origin
    psi = {(m0 + a, n0 + L - a): Fraction(v) for a, v in enumerate(values)}
    for s in range(L - 1, -1, -1):
        for a in range(s + 1):
            p = (m0 + a, n0 + s - a)
            psi[p] = -psi[(p[0] + 1, p[1])] - psi[(p[0], p[1] + 1)]
    return psi


def ring_growth(psi: Mapping[Point, object], center: Point) -> dict[int, float]:
    """Max ``|psi|`` on each hex ring around ``center``."""
    from .lattice import hex_distance

    out: dict[int, float] = {}
    for p, v in psi.items():
        d = hex_distance(p, center)
        out[d] = max(out.get(d, 0.0), abs(float(v)))
    return dict(sorted(out.items()))
