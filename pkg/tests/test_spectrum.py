import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgchar.builders import cycle, interval, star
from qgchar.graph import DIRICHLET, NEUMANN
from qgchar.spectrum import (
    Multiplicity,
    RefinedBy,
    ScanOptions,
    default_grid_points,
    find_roots,
    graph_spectrum,
    weyl_count_estimate,
)


def sinc_sqrt(z):
    if z > 0:
        lam = math.sqrt(z)
        return math.sin(lam) / lam
    if z < 0:
        k = math.sqrt(-z)
        return math.sinh(k) / k
    return 1.0


def minus_four_sin2(z):
    if z >= 0:
        return -4 * math.sin(math.sqrt(z)) ** 2
    return 4 * math.sinh(math.sqrt(-z)) ** 2


def test_dirichlet_interval_roots():
    roots = find_roots(sinc_sqrt, ScanOptions(0.5, 100.0, 2000))
    expected = [(k * math.pi) ** 2 for k in (1, 2, 3)]
    assert [r.z for r in roots] == pytest.approx(expected, abs=1e-8)
    assert all(r.multiplicity_flag is Multiplicity.SIMPLE for r in roots)
    assert all(r.refined_by is RefinedBy.SIGN_CHANGE_BISECTION for r in roots)


def test_double_roots_flagged():
    roots = find_roots(minus_four_sin2, ScanOptions(0.5, 50.0, 2000))
    assert [r.z for r in roots] == pytest.approx([math.pi**2, 4 * math.pi**2], abs=1e-6)
    assert all(r.multiplicity_flag is Multiplicity.EVEN_SUSPECTED for r in roots)
    assert all(r.refined_by is RefinedBy.MINIMUM_REFINEMENT for r in roots)


def test_simple_root_at_origin():
    roots = find_roots(minus_four_sin2, ScanOptions(-1.0, 12.0, 500))
    assert roots[0].z == pytest.approx(0.0, abs=1e-10)
    assert roots[0].multiplicity_flag is Multiplicity.SIMPLE
    assert roots[1].multiplicity_flag is Multiplicity.EVEN_SUSPECTED


def test_no_roots():
    assert find_roots(sinc_sqrt, ScanOptions(1.0, 2.0, 50)) == []


def test_exact_grid_zero():
    roots = find_roots(lambda z: z - 1.0, ScanOptions(0.0, 2.0, 3))
    assert len(roots) == 1 and roots[0].z == 1.0


def test_touching_zero_without_sign_change():
    roots = find_roots(lambda z: (z - 0.3) ** 2, ScanOptions(-1.0, 1.0, 41))
    assert len(roots) == 1
    assert roots[0].z == pytest.approx(0.3, abs=1e-8)
    assert roots[0].multiplicity_flag is Multiplicity.EVEN_SUSPECTED


def test_narrow_lobe_split_into_two_roots():
    f = lambda z: (z - 0.30) * (z - 0.3004)  # noqa: E731
    roots = find_roots(f, ScanOptions(-1.0, 1.0, 41))
    assert [r.z for r in roots] == pytest.approx([0.30, 0.3004], abs=1e-12)
    assert all(r.multiplicity_flag is Multiplicity.SIMPLE for r in roots)


def test_near_miss_rejected():
    assert find_roots(lambda z: (z - 0.3) ** 2 + 1e-3, ScanOptions(-1.0, 1.0, 41)) == []


@pytest.mark.parametrize(
    "kwargs",
    [dict(z_lo=1.0, z_hi=1.0), dict(z_lo=0.0, z_hi=1.0, grid_points=1), dict(z_lo=0.0, z_hi=1.0, tol_z=0.0)],
)
def test_scan_options_validation(kwargs):
    with pytest.raises(ValueError):
        ScanOptions(**kwargs)


def test_residual_bounded():
    opts = ScanOptions(-3.0, 200.0, 3000)
    for r in find_roots(minus_four_sin2, opts) + find_roots(sinc_sqrt, opts):
        assert r.residual <= opts.tol_value
        assert opts.z_lo <= r.z <= opts.z_hi


def test_weyl_examples():
    assert weyl_count_estimate(interval(1.0), (10 * math.pi) ** 2) == pytest.approx(10.0)
    assert weyl_count_estimate(cycle([1.0, 1.0]), (5 * math.pi) ** 2) == pytest.approx(10.0)
    assert weyl_count_estimate(star([1.0, 1.0, 1.0]), (4 * math.pi) ** 2) == pytest.approx(12.0)
    with pytest.raises(ValueError):
        weyl_count_estimate(interval(1.0), 0.0)


def test_circle_count_within_weyl_band():
    g = cycle([1.0, 1.0])
    roots = graph_spectrum(g, 1, "neumann", (5 * math.pi) ** 2 + 1.0)
    assert sum(r.multiplicity for r in roots) == 11
    assert abs(11 - weyl_count_estimate(g, (5 * math.pi) ** 2)) <= len(g.vertices) + 2


def test_dirichlet_interval_accuracy_fine_grid():
    g = interval(1.0, DIRICHLET, DIRICHLET)
    z_hi = (10.5 * math.pi) ** 2
    n = int(100 * math.sqrt(z_hi)) + 1  # 100 points per unit of sqrt(z)
    roots = graph_spectrum(g, 1, "dirichlet", z_hi, z_lo=0.5, grid_points=n)
    assert len(roots) == 10
    assert max(abs(r.z - ((k + 1) * math.pi) ** 2) for k, r in enumerate(roots)) <= 1e-8


def test_default_grid_points_floor():
    assert default_grid_points(1.0, 0.0, 1.0) == 400
    assert default_grid_points(10.0, -5.0, 60.0) > 400


@settings(max_examples=10)
@given(n=st.integers(60, 400))
def test_doubling_grid_keeps_simple_roots(n):
    coarse = find_roots(sinc_sqrt, ScanOptions(0.5, 200.0, n))
    fine = find_roots(sinc_sqrt, ScanOptions(0.5, 200.0, 2 * n))
    fine_z = np.array([r.z for r in fine])
    for r in coarse:
        if r.multiplicity_flag is Multiplicity.SIMPLE:
            assert np.min(np.abs(fine_z - r.z)) <= 1e-10


def test_neumann_interval_includes_zero():
    g = interval(1.0, NEUMANN, NEUMANN)
    roots = graph_spectrum(g, 1, "neumann", 90.0)
    assert [r.z for r in roots] == pytest.approx([0.0, math.pi**2, 4 * math.pi**2, 9 * math.pi**2], abs=1e-8)


def test_flat_triple_zero_does_not_stall():
    """A cubed sine is rounding noise near its zeros; the scan must still return them."""
    f = lambda z: math.sin(math.sqrt(z)) ** 3 if z > 0 else 0.0 if z == 0 else -math.sinh(math.sqrt(-z)) ** 3  # noqa: E731
    roots = find_roots(f, ScanOptions(-2.0, 100.0, 2000))
    assert [r.z for r in roots] == pytest.approx([0.0, math.pi**2, 4 * math.pi**2, 9 * math.pi**2], abs=1e-6)
