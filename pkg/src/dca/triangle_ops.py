"""Triangle operators Q^b, Q^w, Q = Q^b + Q^w on two-coloured surfaces.

``Q^X psi(T) = sum_{P in T} b[T, P] psi(P)`` for ``T`` in the family ``X``.
Everything here is exact: vertex functions are dicts of Fractions (or
Q(zeta) elements after a gauge change) and kernels come from the sparse
integer elimination in :mod:`dca.exact`.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import exact
from .complex import (
    BLACK,
    WHITE,
    Coloring,
    Connection,
    TriangulatedSurface,
    covariant_constant_basis,
    interior_vertices,
)
from .errors import DomainMismatch, Inconsistent, MissingColoring, NoAgreement, NotClosed

FAMILIES = ("black", "white", "both")


@dataclass(eq=False)
class TriangleOperator:
    """Sparse map from vertex functions to functions on a family of simplices.

    ``rows`` lists simplex indices of ``surface``; row ``T`` has coefficient
    ``conn.coef(T, P)`` at each vertex ``P`` of ``T``.
    """

    surface: TriangulatedSurface
    rows: tuple[int, ...]
    conn: Connection
    coloring: Coloring | None = None
    family: str = "both"

    def row(self, i: int) -> dict[int, object]:
        s = self.surface.simplices[i]
        return {p: self.conn.coef(s, p) for p in s}

    def matrix_rows(self) -> list[dict[int, object]]:
        return [self.row(i) for i in self.rows]

    @property
    def columns(self) -> list[int]:
        return sorted({p for i in self.rows for p in self.surface.simplices[i]})

    def apply(self, psi: Mapping[int, object]) -> dict[int, object]:
        out = {}
        for i in self.rows:
            s = self.surface.simplices[i]
            missing = [p for p in s if p not in psi]
            if missing:
                raise DomainMismatch(f"psi undefined at {missing} (simplex {s})")
            acc = Fraction(0)
            for p in s:
                acc = acc + self.conn.coef(s, p) * psi[p]
            out[i] = acc
        return out

    def adjoint_apply(self, phi: Mapping[int, object]) -> dict[int, object]:
        """``(Q* phi)(P) = sum_{T containing P} b[T, P] phi(T)`` (unit weights)."""
        extra = set(phi) - set(self.rows)
        if extra:
            raise DomainMismatch(f"phi defined off the family: {sorted(extra)[:5]}")
        out: dict[int, object] = {p: Fraction(0) for p in self.columns}
        for i, val in phi.items():
            s = self.surface.simplices[i]
            for p in s:
                out[p] = out[p] + self.conn.coef(s, p) * val
        return out

    def write_csv(self, path) -> None:
        """Sparse triplets ``row,col,value`` (row = simplex index, col = vertex id)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "value"])
            for i in self.rows:
                for p, v in sorted(self.row(i).items()):
                    w.writerow([i, p, exact.format_exact(v)])


def build_Q(
    surface: TriangulatedSurface,
    coloring: Coloring | None,
    family: str = "black",
    conn: Connection | None = None,
) -> TriangleOperator:
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    if coloring is None or not coloring.is_valid(surface):
        raise MissingColoring("a valid black/white coloring is required")
    conn = conn or Connection.canonical(surface)
    if family == "black":
        rows = coloring.black()
    elif family == "white":
        rows = coloring.white()
    else:
        rows = coloring.black() + coloring.white()
    if not rows:
        raise MissingColoring(f"no {family} simplices in this coloring")
    return TriangleOperator(surface, tuple(rows), conn, coloring, family)


def inner(u: Mapping, v: Mapping):
    """Counting-measure inner product over the common keys."""
    acc = Fraction(0)
    for k in u.keys() & v.keys():
        acc = acc + u[k] * v[k]
    return acc


# -- operator identities ---------------------------------------------------------


def _gram_row(op: TriangleOperator, vertex: int) -> dict[int, object]:
    """Row ``vertex`` of ``op* op`` as a sparse dict."""
    out: dict[int, object] = {}
    for i in op.rows:
        s = op.surface.simplices[i]
        if vertex not in s:
            continue
        c = op.conn.coef(s, vertex)
        for p in s:
            out[p] = out.get(p, 0) + c * op.conn.coef(s, p)
    return {p: v for p, v in out.items() if v}


def _sub(a: Mapping, b: Mapping) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def _scale(c, row: Mapping) -> dict:
    return {k: c * v for k, v in row.items() if v}


def vertex_neighbors(surface: TriangulatedSurface) -> dict[int, set[int]]:
    nb: dict[int, set[int]] = {v: set() for v in surface.vertices}
    for s in surface.simplices:
        for p in s:
            nb[p].update(q for q in s if q != p)
    return nb


def laplacian_row(surface: TriangulatedSurface, vertex: int, nb=None) -> dict[int, int]:
    """Positive graph Laplacian: ``(Delta psi)(P) = m_P psi(P) - sum_{P'~P} psi(P')``."""
    nb = nb or vertex_neighbors(surface)
    row = {vertex: len(nb[vertex])}
    for q in nb[vertex]:
        row[q] = -1
    return row


def _max_abs(row: Mapping) -> Fraction:
    return max((abs(Fraction(v)) for v in row.values()), default=Fraction(0))


def laplace_identity_check(
    surface: TriangulatedSurface, coloring: Coloring, conn: Connection | None = None
) -> list[dict]:
    """Compare ``Q*Q``, ``2 Qb* Qb``, ``2 Qw* Qw`` and ``-2 Delta + 3 m_P`` row by
    row on interior vertices.  One report per identity."""
    if surface.dimension != 2:
        raise ValueError("the factorization identities are stated for surfaces")
    conn = conn or Connection.canonical(surface)
    qb = build_Q(surface, coloring, "black", conn)
    qw = build_Q(surface, coloring, "white", conn)
    q = build_Q(surface, coloring, "both", conn)
    nb = vertex_neighbors(surface)
    interior = interior_vertices(surface)
    worst = {"Q*Q = 2Qb*Qb": Fraction(0), "Q*Q = 2Qw*Qw": Fraction(0), "Q*Q = -2Delta + 3m": Fraction(0)}
    for v in interior:
        full = _gram_row(q, v)
        lap = laplacian_row(surface, v, nb)
        rhs = {
            "Q*Q = 2Qb*Qb": _scale(2, _gram_row(qb, v)),
            "Q*Q = 2Qw*Qw": _scale(2, _gram_row(qw, v)),
            "Q*Q = -2Delta + 3m": _sub(_scale(-2, lap), {v: -3 * len(nb[v])}),
        }
        for name, r in rhs.items():
            worst[name] = max(worst[name], _max_abs(_sub(full, r)))
    n = len(interior)
    return [
        {
            "identity": name,
            "lhs_dim": n,
            "rhs_dim": n,
            "pass": d == 0,
            "discrepancy": exact.format_exact(d),
        }
        for name, d in worst.items()
    ]


# -- kernels and solves ----------------------------------------------------------


@dataclass
class KernelResult:
    vertices: list[int]
    basis: list[dict[int, Fraction]]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _domain_rows(surface, coloring, domain):
    black = set(coloring.black())
    if domain is None:
        domain = sorted(black)
    domain = sorted(domain)
    bad = [i for i in domain if i not in black]
    if bad:
        raise DomainMismatch(f"domain contains non-black simplices {bad[:5]}")
    if not domain:
        raise DomainMismatch("empty domain")
    verts = sorted({p for i in domain for p in surface.simplices[i]})
    col = {v: j for j, v in enumerate(verts)}
    rows = [{col[p]: 1 for p in surface.simplices[i]} for i in domain]
    return domain, verts, col, rows


def dholomorphic_kernel(
    surface: TriangulatedSurface, coloring: Coloring, domain: Iterable[int] | None = None
) -> KernelResult:
    """Exact basis of ``{psi : Q^b psi = 0 on domain}`` (canonical connection),
    as functions on the vertices of the domain triangles."""
    _, verts, col, rows = _domain_rows(surface, coloring, domain)
    basis = exact.nullspace(rows, len(verts))
    return KernelResult(verts, [{verts[j]: v for j, v in vec.items()} for vec in basis])


@dataclass
class BoundaryValueSolution:
    psi: dict[int, Fraction]
    kernel_dimension: int

    @property
    def unique(self) -> bool:
        return self.kernel_dimension == 0


def solve_boundary_value(
    surface: TriangulatedSurface,
    coloring: Coloring,
    domain: Iterable[int] | None,
    constraints: Mapping[int, object],
) -> BoundaryValueSolution:
    """A d-holomorphic ``psi`` on the domain with prescribed values.

    Raises :class:`Inconsistent` whose certificate maps equation labels
    (``("triangle", index)`` or ``("vertex", id)``) to integer multipliers.
    """
    dom, verts, col, rows = _domain_rows(surface, coloring, domain)
    labels = [("triangle", i) for i in dom]
    rhs: list = [0] * len(rows)
    for v, val in sorted(constraints.items()):
        if v not in col:
            raise DomainMismatch(f"constrained vertex {v} is outside the domain")
        rows.append({col[v]: 1})
        rhs.append(Fraction(val))
        labels.append(("vertex", v))
    try:
        x, kernel = exact.solve(rows, rhs, len(verts))
    except Inconsistent as err:
        cert = {labels[i]: c for i, c in err.certificate.items()}
        raise Inconsistent(cert, "prescribed values contradict Q^b psi = 0") from None
    psi = {v: x.get(j, Fraction(0)) for j, v in enumerate(verts)}
    return BoundaryValueSolution(psi, len(kernel))


def random_combination(basis: Sequence[Mapping], rng: random.Random, bound: int = 5) -> dict:
    """Integer combination of basis functions with coefficients in [-bound, bound]."""
    keys = sorted({k for b in basis for k in b})
    out = {k: Fraction(0) for k in keys}
    for b in basis:
        c = rng.randint(-bound, bound)
        if c:
            for k, v in b.items():
                out[k] += c * v
    return out


# -- evaluation --------------------------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    """Coordinates of the covariant constant agreeing with psi on ``triangle``."""

    triangle: tuple[int, ...]
    coords: tuple[Fraction, Fraction]

    def reconstruct(self, basis: Sequence[Mapping]) -> dict:
        c1, c2 = self.coords
        return {p: c1 * basis[0][p] + c2 * basis[1][p] for p in self.triangle}


def evaluate(psi: Mapping, triangle: Sequence[int], basis: Sequence[Mapping]) -> Evaluation:
    if len(basis) != 2:
        raise ValueError("evaluation needs a two-element covariant-constant basis")
    tri = tuple(sorted(triangle))
    e1, e2 = basis
    det, pair = None, None
    for a, b in ((0, 1), (0, 2), (1, 2)):
        p, q = tri[a], tri[b]
        d = e1[p] * e2[q] - e1[q] * e2[p]
        if d:
            det, pair = d, (p, q)
            break
    if det is None:
        raise NoAgreement("basis restricted to the triangle is degenerate")
    p, q = pair
    c1 = exact.div(psi[p] * e2[q] - psi[q] * e2[p], det)
    c2 = exact.div(e1[p] * psi[q] - e1[q] * psi[p], det)
    ev = Evaluation(tri, (c1, c2))
    back = ev.reconstruct(basis)
    if any(back[v] != psi[v] for v in tri):
        raise NoAgreement(f"psi is not in the covariant-constant span on {tri}")
    return ev


# -- Liouville -----------------------------------------------------------------


def _in_span(vec: Mapping, basis: Sequence[Mapping]) -> bool:
    keys = sorted({k for b in basis for k in b} | set(vec))
    col = {k: j for j, k in enumerate(keys)}
    rows = [{col[k]: v for k, v in b.items() if v} for b in basis]
    r0 = exact.rank(rows, len(keys))
    rows.append({col[k]: v for k, v in vec.items() if v})
    return exact.rank(rows, len(keys)) == r0


def liouville_check(surface: TriangulatedSurface, coloring: Coloring) -> dict:
    """On a closed surface, compare ``ker Q^b``, ``ker Q^w`` and the covariant
    constants by exact rank.  Raises :class:`NotFlat` via the covariant basis."""
    if not surface.is_closed:
        raise NotClosed("Liouville check needs a closed surface")
    conn = Connection.canonical(surface)
    cc = covariant_constant_basis(surface, conn)
    kb = dholomorphic_kernel(surface, coloring)
    kw = dholomorphic_kernel(surface, coloring.swapped())
    contained = all(_in_span(c, kb.basis) and _in_span(c, kw.basis) for c in cc)
    ok = kb.dimension == len(cc) == kw.dimension and contained
    return {
        "identity": "ker Qb = covariant constants",
        "lhs_dim": kb.dimension,
        "rhs_dim": len(cc),
        "ker_qw_dim": kw.dimension,
        "pass": ok,
    }


# -- maximum principle --------------------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[tuple]) -> list[tuple]:
    """Monotone chain hull, counter-clockwise, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def in_hull(hull: Sequence[tuple], p: tuple) -> bool:
    if not hull:
        return False
    if len(hull) == 1:
        return tuple(p) == tuple(hull[0])
    if len(hull) == 2:
        a, b = hull
        if _cross(a, b, p) != 0:
            return False
        return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    return all(_cross(hull[i], hull[(i + 1) % len(hull)], p) >= 0 for i in range(len(hull)))


def boundary_triangles(surface: TriangulatedSurface, coloring: Coloring, domain: Iterable[int]) -> list[int]:
    """Domain triangles with a vertex in a black triangle outside the domain.

    A vertex on the boundary of a finite patch also counts: the patch stands
    for a piece of a larger surface whose missing black triangles touch it.
    """
    dom = set(domain)
    outside = {p for i in coloring.black() if i not in dom for p in surface.simplices[i]}
    outside |= {p for f in surface.boundary_faces() for p in f}
    return sorted(i for i in dom if any(p in outside for p in surface.simplices[i]))


def maximum_principle_check(
    surface: TriangulatedSurface,
    coloring: Coloring,
    psi: Mapping,
    domain: Iterable[int] | None = None,
    basis: Sequence[Mapping] | None = None,
) -> dict:
    domain = sorted(domain) if domain is not None else coloring.black()
    basis = basis or covariant_constant_basis(surface, Connection.canonical(surface))
    for i in domain:
        s = surface.simplices[i]
        if sum((psi[p] for p in s), Fraction(0)) != 0:
            raise DomainMismatch(f"psi is not d-holomorphic on simplex {s}")
    evals = {i: evaluate(psi, surface.simplices[i], basis).coords for i in domain}
    bnd = boundary_triangles(surface, coloring, domain)
    hull = convex_hull(evals[i] for i in bnd)
    bset = set(bnd)
    failures = [i for i in domain if i not in bset and not in_hull(hull, evals[i])]
    chi = surface.euler_characteristic()
    return {
        "identity": "interior evaluations in hull of boundary evaluations",
        "domain_size": len(domain),
        "boundary_triangles": len(bnd),
        "hull_vertices": len(hull),
        "failures": failures,
        "simply_connected": chi == 1,
        "pass": not failures,
    }
