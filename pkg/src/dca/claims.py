"""Checkable claims, shared by the command line and the acceptance tests.

Every runner returns a :class:`Report` whose claims carry the expected value,
the computed value, a provenance tag and a verdict.
"""
from __future__ import annotations

import random
from typing import Sequence

from .complex import Connection, covariant_constant_basis
from .dynamics import Word, perron_certificate, substitute
from .euclid import kernels
from .euclid.lattice import euclid_surface, hex_patch, qbqw_identity_check, torus_surface
from .euclid.polynomials import (
    CanonicalTriangle,
    TriangularWindow,
    canonical_polynomials,
    in_pol,
    pol_space_basis,
    taylor_step,
)
from .hyperbolic.ball import boundary_word, build_ball
from .hyperbolic.counting import ZeroPatchSampler, dof_rank_check, equation_count
from .hyperbolic.functions import zero_set_components
from .report import Report
from .triangle_ops import dholomorphic_kernel, laplace_identity_check, liouville_check, maximum_principle_check, random_combination

BALL_COUNTS = (8, 32, 120, 448, 1672)


def ball_counts(radius: int = 5) -> Report:
    rep = Report("hyper ball")
    ball = build_ball(radius)
    for r in range(1, radius + 1):
        expected = BALL_COUNTS[r - 1] if r <= len(BALL_COUNTS) else None
        got = ball.boundary_size(r)
        rep.claim(f"boundary_D{r}", expected, got, "published" if expected else "computed", expected is None or got == expected)
    rep.data["vertices"] = ball.vertex_count
    return rep


def substitution_consistency(kmax: int = 4) -> Report:
    rep = Report("dyn substitution")
    ball = build_ball(kmax + 1)
    for k in range(1, kmax + 1):
        image = substitute(Word(boundary_word(ball, k)))
        target = Word(boundary_word(ball, k + 1))
        rep.claim(f"T(word_{k}) ~ word_{k + 1}", len(target), len(image), "derived", image.equivalent(target))
    return rep


def perron() -> Report:
    rep = Report("dyn perron")
    cert = perron_certificate()
    rep.claim("charpoly", "(x^2-4x+1)(x-1)^2", " ".join(map(str, cert.charpoly)), "derived",
              cert.charpoly == (1, -6, 10, -6, 1))
    rep.claim("column_sums", [4, 4, 3, 3], [sum(col) for col in zip(*cert.matrix)], "derived",
              [sum(col) for col in zip(*cert.matrix)] == [4, 4, 3, 3])
    rep.claim("quotient", [[3, 2], [1, 1]], [list(r) for r in cert.quotient], "derived", cert.quotient == ((3, 2), (1, 1)))
    rep.claim("spectral_radius", "2+sqrt(3)", cert.value, "published", cert.valid)
    rep.data["matrix"] = [list(r) for r in cert.matrix]
    rep.data["cofactor"] = list(cert.cofactor)
    rep.data["cofactor_root_bound"] = cert.cofactor_root_bound
    rep.data["primitive_power"] = cert.primitive_power
    return rep


def degrees_of_freedom(rmax: int = 4, max_radius: int = 4, rank: bool = True) -> Report:
    """Counts on ``D_1 .. D_rmax``; ``rank`` adds the exact nullspace dimension."""
    rep = Report("hyper dof")
    ball = build_ball(rmax)
    for r in range(rmax):
        counts = equation_count(r, ball)
        expected = counts["boundary"] // 2 + 1
        rep.claim(f"counting_D{r + 1}", expected, counts["dof"], "published", counts["pass"] and counts["dof"] == expected)
        if rank:
            chk = dof_rank_check(r, max_radius, ball)
            rep.claim(f"nullspace_D{r + 1}", expected, chk["dof"], "derived", chk["pass"])
        rep.data[f"D{r + 1}"] = {k: counts[k] for k in ("N_r", "N_r1", "Eq_r1", "B_r1", "W_r1")}
    return rep


def pol_dimensions(kmax: int = 8, canonical_k: int = 3, seed: int = 0) -> Report:
    rep = Report("euclid pol-dim")
    rng = random.Random(seed)
    for k in range(kmax + 1):
        space = pol_space_basis(k)
        rep.claim(f"dim_Pol_{k}", 2 * k + 2, space.dimension, "published", space.dimension == 2 * k + 2 and space.determined_by_triangle)
    for k in range(canonical_k + 1):
        tri = CanonicalTriangle((0, 0), k)
        space = pol_space_basis(k, tri)
        psi = random_combination(space.basis, rng)
        step = taylor_step(psi, tri)
        again = taylor_step(step.phi, tri)
        ok = all(step.phi[p] == psi[p] for p in psi) and again.phi == step.phi
        rep.claim(f"taylor_idempotent_{k}", True, ok, "derived", ok)
    for k in range(1, canonical_k + 1):
        can = canonical_polynomials(k)
        ok = can.sum_in_lower and all(in_pol(f, k) for f in can.functions)
        rep.claim(f"canonical_sum_in_Pol_{k - 1}", True, ok, "published", ok)
    return rep


def factorization(radius: int = 4, hyper_radius: int = 3) -> Report:
    rep = Report("core identity")
    patch = euclid_surface(hex_patch(radius))
    for res in laplace_identity_check(patch.surface, patch.coloring):
        rep.claim(f"euclid: {res['identity']}", "0", res["discrepancy"], "published", res["pass"])
    surface, coloring = build_ball(hyper_radius).ball_complex(hyper_radius)
    for res in laplace_identity_check(surface, coloring):
        rep.claim(f"hyperbolic: {res['identity']}", "0", res["discrepancy"], "published", res["pass"])
    res = qbqw_identity_check(radius)
    rep.claim(f"euclid: {res['identity']}", "0", res["discrepancy"], "published", res["pass"])
    return rep


def liouville(sizes: Sequence[int] = (1, 2, 3)) -> Report:
    rep = Report("core liouville")
    for N in sizes:
        torus = torus_surface((3 * N, 0), (0, 3 * N))
        res = liouville_check(torus.surface, torus.coloring)
        rep.claim(f"ker_Qb_torus_{3 * N}", 2, res["lhs_dim"], "published", res["pass"] and res["lhs_dim"] == 2)
    return rep


def maximum_principle(samples: int = 100, seed: int = 0, radius: int = 6, hyper_radius: int = 3) -> Report:
    rep = Report("core maxprinciple")
    rng = random.Random(seed)
    patch = euclid_surface(hex_patch(radius))
    cases = [("euclid", patch.surface, patch.coloring), ("hyperbolic", *build_ball(hyper_radius).ball_complex(hyper_radius))]
    for name, surface, coloring in cases:
        basis = covariant_constant_basis(surface, Connection.canonical(surface))
        kern = dholomorphic_kernel(surface, coloring)
        failures = 0
        for _ in range(samples):
            psi = random_combination(kern.basis, rng)
            failures += len(maximum_principle_check(surface, coloring, psi, basis=basis)["failures"])
        rep.claim(f"{name}_failures", 0, failures, "published", failures == 0)
    return rep


def green(
    window: int = 21,
    spec: kernels.QuadratureSpec | None = None,
    distances: Sequence[int] = tuple(range(10, 101)),
    slopes: bool = True,
) -> Report:
    rep = Report("euclid green")
    spec = spec or kernels.QuadratureSpec()
    h = window // 2
    pts = [(m, n) for m in range(-h, h + 2) for n in range(-h, h + 2)]
    g = kernels.green_function(pts, spec)
    res = kernels.delta_residual(g.values)
    rep.claim("max|QbG - delta|", "<1e-06", res, "published", res < 1e-6)
    rep.data["error_estimate"] = g.error_estimate
    if slopes:
        ray = kernels.green_function(kernels.ray_points(distances, margin=3), spec)
        for k in range(3):
            f = kernels.rational_analog(ray.values, k) if k else ray.values
            s = kernels.decay_slope(f, distances)
            target = -(k + 1)
            tol = 0.1 * (k + 1)
            rep.claim(f"slope_Qw^{k}G", f"{target}+-{tol:g}", s, "published", abs(s - target) <= tol)
    return rep


def cauchy(
    kmax: int = 3,
    radius: int = 6,
    seed: int = 0,
    spec: kernels.QuadratureSpec | None = None,
    kernel_names: Sequence[str] = ("pascal", "fourier"),
) -> Report:
    rep = Report("euclid cauchy")
    rng = random.Random(seed)
    dom = hex_patch(radius)
    fourier_table = None
    for k in range(kmax + 1):
        space = pol_space_basis(k, CanonicalTriangle((-radius, -radius), k), TriangularWindow(3 * radius, (-radius, -radius)))
        psi_full = random_combination(space.basis, rng)
        psi = {p: psi_full[p] for p in dom}
        if "pascal" in kernel_names:
            pas = kernels.cauchy_reconstruct(dom, psi, "pascal")
            rep.claim(f"pascal_exact_Pol_{k}", True, pas.exact, "published", pas.passed)
        if "fourier" not in kernel_names:
            continue
        if fourier_table is None:
            # sources never leave the one-step strip around the patch
            diffs = {(a - c, b - d) for (a, b) in dom for (c, d) in hex_patch(radius + 1)}
            fourier_table = kernels.green_function(diffs, spec).values
        fou = kernels.cauchy_reconstruct(dom, psi, "fourier", table=fourier_table)
        scale = max(abs(float(v)) for v in psi.values()) or 1.0
        err = fou.max_error / scale
        rep.claim(f"fourier_error_Pol_{k}", "<1e-05", err, "published", err < 1e-5 and fou.strip_only)
    return rep


def zero_sets(samples: int = 100, seed: int = 0, radius: int = 4, patch_radius: int = 1) -> Report:
    rep = Report("hyper zeroset")
    rng = random.Random(seed)
    ball = build_ball(radius)
    sampler = ZeroPatchSampler(ball, patch_radius)
    comps = failures = 0
    for _ in range(samples):
        psi, _ = sampler.draw(rng)
        for comp in zero_set_components(ball, psi):
            comps += 1
            failures += not comp.right_convex
    rep.claim("non_convex_components", 0, failures, "published", failures == 0 and comps > 0)
    rep.data["components"] = comps
    return rep
