#!/usr/bin/env python3.11
"""
Tests for the Hessian, twisted indices, monodromy and iteration theory.

Reference values are worked out by hand for axis orbits of a circle, an
ellipse with semi-axes (2, 1) and an ellipsoid with semi-axes (1, 1.3, 1.7).
On the minor axis of the ellipse the twisted Hessian has eigenvalues
0.5 +- |cos(theta/2)| at z = exp(i theta), which fixes every count below.
"""

import cmath
import contextlib
import io
import math
import sys
import traceback
from dataclasses import replace
from pathlib import Path

import numpy as np

# Add lib directory to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from lib import (
    log, error, info,
    circle, ellipsoid, make_configuration, iterate,
    assemble_hessian, twisted_hessian, indices_at, monodromy, mean_index, bott_split,
    poincare_set_distance, nullity_cross_check, prime_power_list, iteration_report,
    semicontinuity_scan, kernel_dimension, generate_seeds, find_critical, deduplicate, polygon_seed,
    DomainError, NonUnitTwist, NotCritical,
)
from lib.configuration import make_orbit


def axis_orbit(body, point):
    point = np.asarray(point, dtype=float)
    return make_orbit(make_configuration(body, [point, -point]))


def circle_diameter():
    return axis_orbit(circle(1.0), [1.0, 0.0])


def major_axis():
    return axis_orbit(ellipsoid(2.0, 1.0), [2.0, 0.0])


def minor_axis():
    return axis_orbit(ellipsoid(2.0, 1.0), [0.0, 1.0])


def ellipsoid_axes():
    body = ellipsoid(1.0, 1.3, 1.7)
    return [axis_orbit(body, p) for p in ([1.0, 0.0, 0.0], [0.0, 1.3, 0.0], [0.0, 0.0, 1.7])]


def all_axis_orbits():
    return [major_axis(), minor_axis()] + ellipsoid_axes()


def test_circle_diameter_indices():
    H = assemble_hessian(circle_diameter())
    assert np.allclose(np.linalg.eigvalsh(H.real_matrix), [-2.0, 0.0], atol=1e-12)
    assert indices_at(H, 1.0).counts == (1, 0, 1)
    for z in (-1.0, 1j, cmath.exp(0.3j)):
        assert indices_at(H, z).counts == (2, 0, 0)
    avind, avcoind = mean_index(H)
    assert abs(avind - 2.0) <= 1e-9 and abs(avcoind) <= 1e-9
    for m in (2, 3, 5):
        assert bott_split(H, m).counts == (2 * m - 1, 0, 1)


def test_major_axis_is_nondegenerate_maximum():
    H = assemble_hessian(major_axis())
    assert np.allclose(np.diag(H.real_matrix), [-3.5, -3.5], atol=1e-12)
    for z in (1.0, -1.0, 1j, cmath.exp(2.0j)):
        assert indices_at(H, z).counts == (2, 0, 0)
    mono = monodromy(H)
    assert mono.poincare_points == ()
    assert min(abs(mono.eigenvalues)) < 0.01 and max(abs(mono.eigenvalues)) > 100.0
    mean = mean_index(H, mono)
    assert (mean.avind, mean.avcoind) == (2.0, 0.0)
    assert H.difference_gap() > 0.5


def test_minor_axis_poincare_points():
    H = assemble_hessian(minor_axis())
    assert indices_at(H, 1.0).counts == (1, 1, 0)
    mono = monodromy(H)
    angles = sorted(p.angle for p in mono.poincare_points)
    assert len(angles) == 2
    assert abs(angles[0] - 2.0 * math.pi / 3.0) <= 1e-6
    assert abs(angles[1] - 4.0 * math.pi / 3.0) <= 1e-6
    assert all(p.multiplicity == 1 for p in mono.poincare_points)
    for p in mono.poincare_points:
        assert indices_at(H, p.z).counts == (0, 1, 1)
    mean = mean_index(H, mono)
    assert not mean.quadrature_fallback
    assert abs(mean.avind - 2.0 / 3.0) <= 1e-9
    assert abs(mean.avcoind - 4.0 / 3.0) <= 1e-9
    assert mono.inverse_residual <= 1e-8


def test_minor_axis_bott_values():
    H = assemble_hessian(minor_axis())
    expected = {2: (1, 3, 0), 3: (1, 3, 2), 4: (3, 5, 0), 5: (3, 7, 0), 6: (3, 7, 2)}
    for m, counts in expected.items():
        assert bott_split(H, m).counts == counts, (m, bott_split(H, m).counts)


def test_ellipsoid_axes():
    x1, x2, x3 = (assemble_hessian(o) for o in ellipsoid_axes())
    assert indices_at(x3, 1.0).counts == (4, 0, 0)
    assert monodromy(x3).poincare_points == ()
    assert tuple(mean_index(x3)) == (4.0, 0.0)
    assert monodromy(x1).total_multiplicity == 4
    assert monodromy(x2).total_multiplicity == 2
    for H in (x1, x2, x3):
        assert H.dimension == 4
        assert H.symmetry_error() <= 1e-12


def test_direct_iterates_match_bott_splitting():
    for orbit in all_axis_orbits():
        H1 = assemble_hessian(orbit, with_fd=False)
        for m in (2, 3, 4, 5, 8):
            Hm = assemble_hessian(iterate(orbit.config, m), with_fd=False)
            for z in (1.0, -1.0, 1j):
                direct = indices_at(Hm, z).counts
                split = bott_split(H1, m, z).counts
                assert direct == split, (orbit.body.name, m, z, direct, split)


def test_nullity_stays_bounded():
    for orbit in all_axis_orbits():
        H1 = assemble_hessian(orbit, with_fd=False)
        for m in range(1, 65):
            assert bott_split(H1, m).nul <= 2 * H1.N


def test_poincare_points_of_iterates_are_powers():
    orbit = minor_axis()
    base = monodromy(assemble_hessian(orbit, with_fd=False))
    for m in range(2, 7):
        Hm = assemble_hessian(iterate(orbit.config, m), with_fd=False)
        points = [p.z for p in monodromy(Hm).poincare_points]
        powers = {complex(round((p.z ** m).real, 9), round((p.z ** m).imag, 9)) for p in base.poincare_points}
        assert poincare_set_distance(points, list(powers)) <= 1e-6, (m, points, powers)


def test_finite_difference_oracle():
    for orbit in [circle_diameter()] + all_axis_orbits():
        H = assemble_hessian(orbit)
        assert H.oracle_error() <= 1e-4, (orbit.body.name, H.oracle_error())
        assert H.symmetry_error() <= 1e-12
        assert H.dimension == orbit.n * orbit.body.N


def test_iteration_report_major_axis():
    report = iteration_report(major_axis(), prime_power_list(2, 32))
    assert report.passed, [r.verdicts for r in report.failing_rows()]
    assert [r.m for r in report.rows] == [1, 2, 4, 8, 16, 32]
    assert report.mean_coindex_zero
    for row in report.rows:
        assert row.direct.counts == (2 * row.m, 0, 0)
        assert row.hypothesis and row.local_max


def test_iteration_report_minor_axis():
    report = iteration_report(minor_axis(), [1, 2, 3, 4, 5, 6])
    assert report.passed, [r.verdicts for r in report.failing_rows()]
    assert report.divisibility_monotone
    assert not report.mean_coindex_zero
    assert [row.hypothesis for row in report.rows] == [True, False, False, False, False, False]
    assert report.rows[2].direct.counts == (1, 3, 2)


def test_cross_checks():
    for orbit in (major_axis(), minor_axis()):
        H = assemble_hessian(orbit, with_fd=False)
        rows = nullity_cross_check(H)
        assert all(row['match'] for row in rows), rows
    report = semicontinuity_scan(assemble_hessian(minor_axis(), with_fd=False))
    assert report.passed and not report.inconclusive
    assert len(report.points) == 2


def test_error_paths():
    body = circle(1.0)
    try:
        assemble_hessian(make_configuration(body, [[1.0, 0.0], [0.0, 1.0]]))
        raise AssertionError("non-critical configuration accepted")
    except NotCritical:
        pass
    H = assemble_hessian(circle_diameter(), with_fd=False)
    try:
        twisted_hessian(H, 2.0)
        raise AssertionError("twist off the unit circle accepted")
    except NonUnitTwist:
        pass
    assert prime_power_list(2, 32) == [1, 2, 4, 8, 16, 32]
    assert prime_power_list(3, 10) == [1, 3, 9]
    try:
        prime_power_list(4, 10)
        raise AssertionError("composite base accepted")
    except DomainError:
        pass




# ---------------------------------------------------------------------------
# Orbits found by the solvers (n >= 3); on the ellipse these lie in families
# ---------------------------------------------------------------------------

_FOUND = {}


def found_orbits(axes, n, count=12, rng_seed=7, limit=3):
    """First few distinct critical orbits from both solvers, cached per body and n"""
    key = (axes, n, count, rng_seed)
    if key not in _FOUND:
        body = ellipsoid(*axes)
        seeds = generate_seeds(body, n, count, 'mixed', rng_seed)
        found = []
        for mode in ('maximize', 'newton'):
            found.extend(find_critical(body, n, seeds, mode, on_failure=lambda i, e: None))
        _FOUND[key] = deduplicate(found)
    orbits = _FOUND[key]
    assert orbits, (axes, n)
    return orbits[:limit]


ELLIPSE = (2.0, 1.0)
ELLIPSOID = (1.0, 1.3, 1.7)


def ellipse_rhombus():
    return make_orbit(polygon_seed(ellipsoid(*ELLIPSE), 4, 1))


def found_fixtures():
    return (found_orbits(ELLIPSE, 3) + found_orbits(ELLIPSE, 4) + found_orbits(ELLIPSE, 5)
            + found_orbits(ELLIPSOID, 3) + [ellipse_rhombus()])


def test_found_orbits_oracle_and_symmetry():
    for orbit in found_fixtures():
        H = assemble_hessian(orbit)
        scale = max(1.0, float(np.linalg.norm(H.real_matrix, 2)))
        assert H.oracle_error() <= 1e-4, (orbit.n, H.oracle_error())
        assert H.symmetry_error() <= 1e-9 * scale, (orbit.n, H.symmetry_error())
        assert H.dimension == orbit.n * orbit.body.N


def test_rhombus_has_exact_zero_blocks():
    H = assemble_hessian(ellipse_rhombus(), with_fd=False)
    assert H.n == 4
    assert np.all(H.block(0, 2) == 0.0) and np.all(H.block(2, 0) == 0.0)
    assert np.all(H.block(1, 3) == 0.0) and np.all(H.block(3, 1) == 0.0)
    assert np.any(H.block(0, 3) != 0.0) and np.any(H.block(0, 1) != 0.0)


def test_found_orbit_points_carry_nullity():
    for orbit in found_fixtures():
        H = assemble_hessian(orbit, with_fd=False)
        mono = monodromy(H)
        points = mono.poincare_points
        for p in points:
            assert p.multiplicity > 0
            assert indices_at(H, p.z).nul == p.multiplicity, (orbit.n, p)
        for z in (1.0, -1.0):
            nul = indices_at(H, z).nul
            if nul:
                assert any(abs(p.z - z) <= 1e-12 for p in points), (orbit.n, z, points)
            # a split Jordan block would show up as a pair hugging +-1
            assert not any(1e-12 < abs(p.z - z) < 1e-2 for p in points), (orbit.n, z, points)
        assert mono.total_multiplicity <= 2 * H.N
        rows = nullity_cross_check(H, mono=mono)
        assert all(row['match'] for row in rows), (orbit.n, [r for r in rows if not r['match']])
        if not mono.unresolved:
            assert not mean_index(H, mono).quadrature_fallback


def test_ellipse_families_are_degenerate_at_one():
    for n in (3, 5):
        for orbit in found_orbits(ELLIPSE, n):
            if orbit.iteration_order > 1:
                continue
            H = assemble_hessian(orbit, with_fd=False)
            assert indices_at(H, 1.0).nul >= 1, (n, indices_at(H, 1.0))
            mono = monodromy(H)
            at_one = [p for p in mono.poincare_points if abs(p.z - 1.0) <= 1e-12]
            assert len(at_one) == 1 and at_one[0].multiplicity == indices_at(H, 1.0).nul
            assert all(abs(p.z - 1.0) > 1e-2 for p in mono.poincare_points if p is not at_one[0])


def test_found_orbit_iterates_match_bott_splitting():
    for orbit in found_fixtures():
        H1 = assemble_hessian(orbit, with_fd=False)
        for m in (2, 3, 4, 5, 8):
            Hm = assemble_hessian(iterate(orbit.config, m), with_fd=False)
            for z in (1.0, -1.0, 1j):
                direct = indices_at(Hm, z).counts
                split = bott_split(H1, m, z).counts
                assert direct == split, (orbit.n, m, z, direct, split)


def test_ellipsoid_triangle_third_iterate():
    orbit = found_orbits(ELLIPSOID, 3)[0]
    H1 = assemble_hessian(orbit, with_fd=False)
    H3 = assemble_hessian(iterate(orbit.config, 3), with_fd=False)
    assert H3.dimension == 9 * H1.N
    assert H3.symmetry_error() <= 1e-9 * max(1.0, float(np.linalg.norm(H3.real_matrix, 2)))
    for z in (1.0, -1.0, 1j, cmath.exp(0.7j)):
        assert indices_at(H3, z).counts == bott_split(H1, 3, z).counts, z


def test_found_orbit_powers_and_nullity_bound():
    for orbit in found_fixtures():
        H1 = assemble_hessian(orbit, with_fd=False)
        base = monodromy(H1)
        for m in range(2, 9):
            Hm = assemble_hessian(iterate(orbit.config, m), with_fd=False)
            points = [p.z for p in monodromy(Hm).poincare_points]
            powers = {complex(round((p.z ** m).real, 9), round((p.z ** m).imag, 9)) for p in base.poincare_points}
            assert poincare_set_distance(points, list(powers)) <= 1e-6, (orbit.n, m, points, powers)
        for m in range(1, 65):
            assert bott_split(H1, m).nul <= 2 * H1.N, (orbit.n, m)


def test_found_orbit_iteration_chains():
    for orbit in (found_orbits(ELLIPSE, 3)[0], found_orbits(ELLIPSOID, 3)[0]):
        report = iteration_report(orbit, list(range(1, 65)))
        assert report.passed, [(r.m, r.verdicts) for r in report.failing_rows()]
        assert [r.m for r in report.rows] == list(range(1, 65))
        assert report.divisibility_monotone


def test_found_orbit_semicontinuity():
    scanned = 0
    for orbit in found_fixtures():
        H = assemble_hessian(orbit, with_fd=False)
        if not monodromy(H).poincare_points:
            continue
        report = semicontinuity_scan(H)
        assert report.passed, (orbit.n, report)
        scanned += 1
    assert scanned


def test_kernel_rank_is_relative():
    # perturbed Jordan block at 1: one kernel direction, not two and not zero
    jordan = np.array([[1.0, 1.0], [-1e-6, 1.0]])
    assert kernel_dimension(jordan - np.eye(2)) == 1
    assert kernel_dimension(jordan - np.eye(2), limit=2) == 1
    # badly conditioned hyperbolic matrix away from its spectrum
    phi = np.diag([1e9, 1e-9])
    shifted = phi - 1j * np.eye(2)
    near = int(np.sum(np.abs(np.linalg.eigvals(phi) - 1j) <= 1e-2))
    assert near == 0
    assert kernel_dimension(shifted, limit=near) == 0
    assert kernel_dimension(np.zeros((3, 3))) == 3
    assert kernel_dimension(np.eye(3)) == 0


def test_thin_gap_reported_once_per_operator():
    H = assemble_hessian(circle_diameter(), with_fd=False)
    # shift both eigenvalues by 1e-6: the kernel at z = 1 becomes a thin gap
    thin = replace(H, diagonal_blocks=tuple(b + 1e-6 * np.eye(b.shape[0]) for b in H.diagonal_blocks))
    stream = io.StringIO()
    with contextlib.redirect_stderr(stream):
        triples = [indices_at(thin, 1.0) for _ in range(4)]
    assert all(t.thin_gap for t in triples)
    assert triples[0].counts == (1, 1, 0)
    assert stream.getvalue().count("spectral gap is thin") == 1
    assert triples[0] == replace(triples[0], thin_gap=False)
    other = replace(thin)
    stream = io.StringIO()
    with contextlib.redirect_stderr(stream):
        indices_at(other, 1.0)
    assert stream.getvalue().count("spectral gap is thin") == 1


TESTS = [
    test_circle_diameter_indices,
    test_major_axis_is_nondegenerate_maximum,
    test_minor_axis_poincare_points,
    test_minor_axis_bott_values,
    test_ellipsoid_axes,
    test_direct_iterates_match_bott_splitting,
    test_nullity_stays_bounded,
    test_poincare_points_of_iterates_are_powers,
    test_finite_difference_oracle,
    test_iteration_report_major_axis,
    test_iteration_report_minor_axis,
    test_cross_checks,
    test_error_paths,
    test_found_orbits_oracle_and_symmetry,
    test_rhombus_has_exact_zero_blocks,
    test_found_orbit_points_carry_nullity,
    test_ellipse_families_are_degenerate_at_one,
    test_found_orbit_iterates_match_bott_splitting,
    test_ellipsoid_triangle_third_iterate,
    test_found_orbit_powers_and_nullity_bound,
    test_found_orbit_iteration_chains,
    test_found_orbit_semicontinuity,
    test_kernel_rank_is_relative,
    test_thin_gap_reported_once_per_operator,
]


def main():
    log("=" * 60)
    log("Spectral Tests")
    log("=" * 60)
    failed = 0
    for test in TESTS:
        try:
            test()
            info(f"✓ {test.__name__}")
        except Exception as e:
            failed += 1
            error(f"✗ {test.__name__}: {type(e).__name__}: {e}")
            traceback.print_exc()
    if failed:
        error(f"{failed} of {len(TESTS)} test(s) failed")
        return 1
    log(f"🎉 All {len(TESTS)} spectral tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
