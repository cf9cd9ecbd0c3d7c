import random
from math import comb

import pytest
from hypothesis import given, strategies as st

from dca.errors import KernelWindowTooSmall, QuadratureNotConverged
from dca.euclid import kernels
from dca.euclid.lattice import hex_patch, qb_apply, read_lattice_csv, write_lattice_csv
from dca.euclid.polynomials import CanonicalTriangle, TriangularWindow, pol_space_basis
from dca.triangle_ops import random_combination


@given(st.integers(0, 30), st.integers(0, 30))
def test_pascal_closed_form(i, j):
    assert kernels.pascal_value(-i, -j) == (-1) ** (i + j) * comb(i + j, i)


def test_pascal_table_matches_closed_form_and_is_fundamental():
    g = kernels.pascal_kernel(12)
    assert all(v == kernels.pascal_value(*p) for p, v in g.items())
    qb = qb_apply(g)
    assert all(v == int(p == (0, 0)) for p, v in qb.items())


def test_pascal_vanishes_off_the_cone():
    g = kernels.pascal_kernel(6)
    assert all(v == 0 for (m, n), v in g.items() if m > 0 or n > 0)


def test_pascal_grows_exponentially():
    g = kernels.pascal_kernel(20)
    rows = [max(abs(v) for (m, n), v in g.items() if m + n == -s) for s in range(21)]
    ratios = [b / a for a, b in zip(rows[10:], rows[11:])]
    assert all(r > 1.5 for r in ratios)


@pytest.fixture(scope="module")
def green_small():
    pts = [(m, n) for m in range(-6, 8) for n in range(-6, 8)]
    return kernels.green_function(pts)


def test_green_is_fundamental(green_small):
    assert kernels.delta_residual(green_small.values) < 1e-10


def test_green_symmetry(green_small):
    g = green_small.values
    assert all(abs(g[(m, n)] - g[(n, m)]) < 1e-12 for (m, n) in g)


def test_green_origin_triangle_sums_to_one(green_small):
    g = green_small.values
    assert abs(g[(0, 0)] + g[(1, 0)] + g[(0, 1)] - 1) < 1e-10


def test_midpoint_agrees_with_residue(green_small):
    pts = [(0, 0), (1, 0), (2, -1), (3, 2), (-2, -2)]
    mid = kernels.green_function(pts, kernels.QuadratureSpec(grid=96, mode="midpoint", refine=6, tol=1e-2))
    for p in pts:
        assert abs(mid[p] - green_small[p]) < 1e-2


def test_quadrature_not_converged():
    with pytest.raises(QuadratureNotConverged):
        kernels.green_function([(40, 0)], kernels.QuadratureSpec(grid=8, order=2, refine=1, tol=1e-14))


def test_bad_quadrature_spec():
    with pytest.raises(ValueError):
        kernels.QuadratureSpec(grid=4)
    with pytest.raises(ValueError):
        kernels.QuadratureSpec(mode="simpson")
    with pytest.raises(ValueError):
        kernels.QuadratureSpec(grid=32, mode="midpoint")


def test_decay_slope_of_green():
    d = range(10, 41, 5)
    ray = kernels.green_function(kernels.ray_points(d))
    assert abs(kernels.decay_slope(ray.values, d) + 1) < 0.1


def test_cauchy_pascal_exact():
    rng = random.Random(3)
    dom = hex_patch(3)
    space = pol_space_basis(1, CanonicalTriangle((-3, -3), 1), TriangularWindow(9, (-3, -3)))
    full = random_combination(space.basis, rng)
    psi = {p: full[p] for p in dom}
    rep = kernels.cauchy_reconstruct(dom, psi, "pascal")
    assert rep.exact and rep.passed
    assert all(rep.reconstructed[p] == psi[p] for p in dom)


def test_cauchy_table_too_small():
    dom = hex_patch(2)
    psi = {p: 0 for p in dom}
    psi[(0, 0)] = 1
    with pytest.raises(KernelWindowTooSmall):
        kernels.cauchy_reconstruct(dom, psi, "fourier", table={(0, 0): 0.3})
    with pytest.raises(KernelWindowTooSmall):
        kernels.cauchy_reconstruct(dom, psi, "pascal", table={(0, 0): 1})


def test_green_csv_round_trip(tmp_path, green_small):
    path = tmp_path / "g.csv"
    write_lattice_csv(green_small.values, path)
    back = read_lattice_csv(path)
    assert back == green_small.values
