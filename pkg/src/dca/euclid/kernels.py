"""Fundamental solutions of ``Q^b`` and the discrete Cauchy formula.

Two kernels satisfy ``Q^b G = delta`` (delta at the black triangle rooted at
the origin):

* the Pascal kernel ``G0(-i, -j) = (-1)^(i+j) C(i+j, i)``, zero off the cone
  ``m, n <= 0``, exact and exponentially growing;
* the Fourier kernel
  ``G(m, n) = (2 pi)^-2 \\iint e^{i(m k1 + n k2)} / (1 + e^{i k1} + e^{i k2})``,
  which decays like ``1 / d``.

For the Fourier kernel the inner ``k1`` integral is done by residues.  With
``a = 1 + e^{ik}`` the pole ``e^{ik1} = -a`` lies inside the unit circle iff
``k`` is in ``(2pi/3, 4pi/3)`` and

* ``m >= 1``:  ``G = (1/2pi) \\int_{2pi/3}^{4pi/3} e^{ink} (-a)^{m-1} dk``
* ``m <= 0``:  ``G = -(1/2pi) \\int_{-2pi/3}^{2pi/3} e^{ink} (-a)^{m-1} dk``.

Both integrands are smooth on their closed intervals, so composite
Gauss-Legendre converges geometrically.  A direct two-dimensional midpoint
rule with refinement around the two singular points is kept as an
independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, pi
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import KernelWindowTooSmall, QuadratureNotConverged, WindowTooSmall
from .lattice import LatticeFunction, Point, qb_apply, qw_power

MODES = ("residue", "midpoint")
SINGULAR_POINTS = ((2 * pi / 3, 4 * pi / 3), (4 * pi / 3, 2 * pi / 3))


# -- Pascal kernel ------------------------------------------------------------------


def pascal_value(m: int, n: int) -> int:
    if m > 0 or n > 0:
        return 0
    i, j = -m, -n
    return (-1) ** (i + j) * comb(i + j, i)


def pascal_kernel(depth: int) -> LatticeFunction:
    """``G0`` on ``{m, n <= 2, m + n >= -depth}`` by forward recursion.

    Rows ``m + n = -s`` are filled from ``G0(x) = delta(x) - G0(x + e1) - G0(x + e2)``
    starting at the origin; everything off the cone is zero.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    g: dict[Point, int] = {}
    for s in range(-4, depth + 1):
        for m in range(-s - 2, 3):
            n = -s - m
            if n > 2:
                continue
            if m > 0 or n > 0:
                g[(m, n)] = 0
            else:
                g[(m, n)] = int((m, n) == (0, 0)) - g.get((m + 1, n), 0) - g.get((m, n + 1), 0)
    return g


# -- Fourier kernel -----------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """``grid``: panels (residue) or cells per axis (midpoint); ``refine``:
    doublings (residue) or dyadic levels around singular points (midpoint)."""

    grid: int = 32
    mode: str = "residue"
    refine: int = 3
    order: int = 32
    tol: float = 1e-10

    def __post_init__(self):
        if self.grid < 8:
            raise ValueError("grid resolution must be at least 8")
        if self.refine < 0:
            raise ValueError("refinement levels must be nonnegative")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "midpoint" and self.grid % 3:
            raise ValueError("midpoint grid must be a multiple of 3 to avoid sampling the singularity")


@dataclass
class GreenValues:
    values: dict[Point, float]
    error_estimate: float
    spec: QuadratureSpec
    levels: int = 0

    def __getitem__(self, p: Point) -> float:
        return self.values[p]


def _gauss_panels(a: float, b: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _residue_values(points: Sequence[Point], panels: int, order: int) -> np.ndarray:
    inner = _gauss_panels(2 * pi / 3, 4 * pi / 3, panels, order)
    outer = _gauss_panels(-2 * pi / 3, 2 * pi / 3, panels, order)
    out = np.empty(len(points))
    for idx, (m, n) in enumerate(points):
        k, w = inner if m >= 1 else outer
        a = 1 + np.exp(1j * k)
        val = np.sum(w * np.exp(1j * n * k) * (-a) ** (m - 1)) / (2 * pi)
        out[idx] = (val if m >= 1 else -val).real
    return out


def _midpoint_values(points: Sequence[Point], grid: int, levels: int) -> np.ndarray:
    """Tensor midpoint rule; cells touching a singular point are split
    dyadically ``levels`` times (only the sub-cells touching it recurse)."""
    h = 2 * pi / grid
    c = (np.arange(grid) + 0.5) * h
    k1, k2 = np.meshgrid(c, c, indexing="ij")
    mask = np.ones_like(k1, dtype=bool)
    cells: list[tuple[float, float, float]] = []
    for s1, s2 in SINGULAR_POINTS:
        i0, j0 = round(s1 / h), round(s2 / h)
        for i in (i0 - 1, i0):
            for j in (j0 - 1, j0):
                mask[i % grid, j % grid] = False
                cells.append((i * h, j * h, h))
    extra_k1, extra_k2, extra_w = [], [], []
    for level in range(levels + 1):
        nxt = []
        for (x0, y0, size) in cells:
            half = size / 2
            for dx in (0, half):
                for dy in (0, half):
                    sx, sy = x0 + dx, y0 + dy
                    touches = any(
                        abs(sx + half / 2 - s1) <= half / 2 + 1e-12 and abs(sy + half / 2 - s2) <= half / 2 + 1e-12
                        for s1, s2 in SINGULAR_POINTS
                    )
                    if touches and level < levels:
                        nxt.append((sx, sy, half))
                    else:
                        extra_k1.append(sx + half / 2)
                        extra_k2.append(sy + half / 2)
                        extra_w.append(half * half)
        cells = nxt
    K1 = np.concatenate([k1[mask], np.array(extra_k1)])
    K2 = np.concatenate([k2[mask], np.array(extra_k2)])
    W = np.concatenate([np.full(mask.sum(), h * h), np.array(extra_w)])
    denom = 1 + np.exp(1j * K1) + np.exp(1j * K2)
    base = W / denom / (2 * pi) ** 2
    out = np.empty(len(points))
    for idx, (m, n) in enumerate(points):
        out[idx] = np.sum(base * np.exp(1j * (m * K1 + n * K2))).real
    return out


def green_function(points: Iterable[Point], spec: QuadratureSpec | None = None) -> GreenValues:
    """Fourier Green function at ``points`` with an error estimate.

    Residue mode doubles the panel count until two successive values agree
    to ``spec.tol``; midpoint mode compares the rule on ``grid`` and ``2 * grid``.
    """
    spec = spec or QuadratureSpec()
    pts = sorted(set(points))
    if spec.mode == "residue":
        prev = _residue_values(pts, spec.grid, spec.order)
        err = float("inf")
        for level in range(1, max(spec.refine, 1) + 1):
            cur = _residue_values(pts, spec.grid * 2 ** level, spec.order)
            err = float(np.max(np.abs(cur - prev))) if len(pts) else 0.0
            prev = cur
            if err <= spec.tol:
                return GreenValues(dict(zip(pts, prev.tolist())), err, spec, level)
        raise QuadratureNotConverged(f"error estimate {err:.3g} above tolerance {spec.tol:.3g}")
    # compare against a doubled grid so the estimate covers the smooth part too
    coarse = _midpoint_values(pts, spec.grid, spec.refine)
    cur = _midpoint_values(pts, 2 * spec.grid, spec.refine)
    err = float(np.max(np.abs(cur - coarse))) if len(pts) else 0.0
    if err > spec.tol:
        raise QuadratureNotConverged(f"error estimate {err:.3g} above tolerance {spec.tol:.3g}")
    return GreenValues(dict(zip(pts, cur.tolist())), err, spec, spec.refine)


def delta_residual(g: Mapping[Point, float]) -> float:
    """``max |Q^b G - delta|`` over points where ``Q^b G`` is defined."""
    qb = qb_apply(g)
    return max(abs(v - (1.0 if p == (0, 0) else 0.0)) for p, v in qb.items())


def rational_analog(g: Mapping[Point, float], k: int) -> LatticeFunction:
    """``(Q^w)^k G``; decays like ``d^-(k+1)``."""
    out = qw_power(g, k)
    if not out:
        raise WindowTooSmall(f"window has no margin for (Q^w)^{k}")
    return out


LATTICE_DIRECTIONS = ((1, 0), (0, 1), (-1, 0), (0, -1), (1, -1), (-1, 1))


def envelope(f: Mapping[Point, float], p: Point) -> float:
    """Amplitude of the period-three oscillation at the black triangle rooted at ``p``.

    Far from the origin ``f(x) ~ 2 Re(omega^(m-n) A(x))`` with ``A`` slowly
    varying; the three vertices of a black triangle carry the three residues
    of ``m - n``, and ``sum_r cos^2(t + 2 pi r / 3) = 3/2`` gives
    ``2|A| = sqrt(2/3 * sum f^2)``.
    """
    m, n = p
    return float(np.sqrt(2.0 / 3.0 * (f[(m, n)] ** 2 + f[(m + 1, n)] ** 2 + f[(m, n + 1)] ** 2)))


def ray_points(distances: Iterable[int], margin: int = 0) -> set[Point]:
    """Points needed by :func:`decay_slope`, plus ``margin`` rows for ``(Q^w)^k``."""
    pts: set[Point] = set()
    for d in distances:
        for a, b in LATTICE_DIRECTIONS:
            m, n = d * a, d * b
            for x, y in ((m, n), (m + 1, n), (m, n + 1)):
                for i in range(margin + 1):
                    for j in range(margin + 1 - i):
                        pts.add((x - i, y - j))
    return pts


def decay_slope(values: Mapping[Point, float], distances: Sequence[int]) -> float:
    """Log-log slope of the oscillation envelope against hex distance.

    For each ``d`` the envelope is averaged (geometric mean) over the six
    lattice directions at distance ``d``; the slope comes from a
    least-squares line through ``(log d, log envelope)``.
    """
    xs, ys = [], []
    for d in distances:
        logs = []
        for a, b in LATTICE_DIRECTIONS:
            p = (d * a, d * b)
            try:
                logs.append(np.log(envelope(values, p)))
            except KeyError:
                raise WindowTooSmall(f"no samples at distance {d} in direction {(a, b)}") from None
        xs.append(np.log(d))
        ys.append(float(np.mean(logs)))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


# -- Cauchy formula -----------------------------------------------------------------


@dataclass
class CauchyReport:
    kernel: str
    max_error: float
    exact: bool
    strip_only: bool
    support_size: int
    reconstructed: dict[Point, object] = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.exact if self.kernel == "pascal" else self.strip_only


def extension_source(domain: Iterable[Point], psi: Mapping[Point, object]) -> dict[Point, object]:
    """``Q^b psi_bar`` where ``psi_bar`` is ``psi`` on the domain and 0 elsewhere."""
    dom = set(domain)
    cand = {(m - a, n - b) for (m, n) in dom for (a, b) in ((0, 0), (1, 0), (0, 1))}
    out = {}
    for (m, n) in cand:
        acc = Fraction(0)
        for p in ((m, n), (m + 1, n), (m, n + 1)):
            if p in dom:
                acc = acc + psi[p]
        if acc:
            out[(m, n)] = acc
    return out


def cauchy_reconstruct(
    domain: Iterable[Point],
    psi: Mapping[Point, object],
    kernel: str = "pascal",
    table: Mapping[Point, object] | None = None,
    spec: QuadratureSpec | None = None,
) -> CauchyReport:
    """Rebuild ``psi`` on the domain from ``sum_y Q^b psi_bar(y) G(x - y)``.

    ``table`` may hold precomputed kernel values; a needed difference missing
    from it raises :class:`KernelWindowTooSmall`.
    """
    dom = sorted(set(domain))
    dset = set(dom)
    src = extension_source(dom, psi)
    strip_only = all(
        not all(p in dset for p in ((m, n), (m + 1, n), (m, n + 1))) for (m, n) in src
    )
    diffs = {(x[0] - y[0], x[1] - y[1]) for x in dom for y in src}
    if kernel == "pascal":
        if table is None:
            depth = max((-(a + b) for a, b in diffs), default=0)
            table = pascal_kernel(max(depth, 0))
        G = {}
        for dlt in diffs:
            if dlt in table:
                G[dlt] = table[dlt]
            elif dlt[0] > 0 or dlt[1] > 0:
                G[dlt] = 0
            else:
                raise KernelWindowTooSmall(f"Pascal table lacks difference {dlt}")
    elif kernel == "fourier":
        if table is None:
            table = green_function(diffs, spec).values
        missing = [dlt for dlt in diffs if dlt not in table]
        if missing:
            raise KernelWindowTooSmall(f"Green table lacks {len(missing)} differences, e.g. {missing[0]}")
        G = table
    else:
        raise ValueError("kernel must be 'pascal' or 'fourier'")
    rec: dict[Point, object] = {}
    for x in dom:
        acc = Fraction(0) if kernel == "pascal" else 0.0
        for y, f in src.items():
            g = G[(x[0] - y[0], x[1] - y[1])]
            if g:
                acc = acc + (f * g if kernel == "pascal" else float(f) * g)
        rec[x] = acc
    errs = [abs(float(rec[x]) - float(psi[x])) for x in dom]
    exact_ok = kernel == "pascal" and all(rec[x] == psi[x] for x in dom)
    return CauchyReport(kernel, max(errs, default=0.0), exact_ok, strip_only, len(src), rec)
