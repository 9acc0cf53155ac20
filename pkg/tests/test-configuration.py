#!/usr/bin/env python3.11
"""
Tests for configurations, the length functional and the orbit search.

The gradient is checked against central differences on random
configurations; the search is checked against the analytic chord formula
2n sin(pi r / n) on the circle and against the two axes of an ellipse.
"""

import math
import sys
import traceback
from pathlib import Path

import numpy as np

# Add lib directory to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from lib import (
    log, error, info,
    circle, sphere, ellipsoid, radial_point,
    make_configuration, length, grad_residual, tangent_field_fd_check,
    dihedral_orders, relabel, canonicalize, iterate, iteration_order, primitive,
    rotation_number, distinct, deduplicate, polygon_seed, generate_seeds,
    find_critical, solve_seed, reflow_deviation,
    orbit_to_record, orbit_from_record,
    AdjacencyViolation, SeedCollapsed,
)
from lib.configuration import make_orbit


def _random_configuration(body, n, rng, min_chord):
    while True:
        directions = rng.standard_normal((n, body.ambient_dim))
        points = [radial_point(body, u) for u in directions]
        config = make_configuration(body, points)
        if np.linalg.norm(config.chords(), axis=1).min() >= min_chord:
            return config


def test_diameter_is_critical():
    body = circle(1.0)
    config = make_configuration(body, [[1.0, 0.0], [-1.0, 0.0]])
    assert length(config) == 4.0
    assert grad_residual(config) <= 1e-12
    assert rotation_number(config) == 1


def test_adjacent_points_must_differ():
    body = circle(1.0)
    try:
        make_configuration(body, [[1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
        raise AssertionError("coinciding neighbours accepted")
    except AdjacencyViolation as e:
        assert e.junction == 0


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for body in (circle(1.0), sphere(1.0, 3), ellipsoid(1.0, 1.3, 1.7)):
        for _ in range(100):
            config = _random_configuration(body, 4, rng, 0.2 * body.diameter)
            V = rng.standard_normal((config.n, body.N))
            analytic, numeric = tangent_field_fd_check(config, V, h=1e-5)
            assert abs(analytic - numeric) <= 1e-6 * max(1.0, abs(analytic)), (body.name, analytic, numeric)


def test_dihedral_invariance():
    rng = np.random.default_rng(2)
    body = ellipsoid(1.0, 1.3, 1.7)
    config = _random_configuration(body, 5, rng, 0.1)
    key = canonicalize(config)
    for order in dihedral_orders(config.n):
        other = relabel(config, order)
        assert canonicalize(other) == key
        assert length(other) == length(config)
    assert len(dihedral_orders(5)) == 10


def test_iterates():
    body = circle(1.0)
    triangle = polygon_seed(body, 3, 1)
    tripled = iterate(triangle, 3)
    assert tripled.n == 9
    assert iteration_order(tripled) == 3
    assert abs(length(tripled) - 3.0 * length(triangle)) <= 1e-12
    assert np.allclose(primitive(tripled).coords, triangle.coords)
    base = make_orbit(triangle)
    assert not distinct(base, make_orbit(tripled))


def test_rotation_numbers():
    body = circle(1.0)
    assert rotation_number(polygon_seed(body, 5, 1)) == 1
    assert rotation_number(polygon_seed(body, 5, 2)) == 2
    assert rotation_number(polygon_seed(body, 7, 3)) == 3


def test_seeding_is_reproducible():
    body = ellipsoid(1.0, 1.3, 1.7)
    first = generate_seeds(body, 3, 6, 'mixed', rng_seed=11)
    second = generate_seeds(body, 3, 6, 'mixed', rng_seed=11)
    assert len(first) == len(second) > 0
    for a, b in zip(first, second):
        assert np.array_equal(a.coords, b.coords)


def test_circle_diameters_form_one_class():
    body = circle(1.0)
    seeds = generate_seeds(body, 2, 6, 'mixed', rng_seed=0)
    orbits = find_critical(body, 2, seeds, mode='maximize')
    assert len(orbits) == 1
    assert abs(orbits[0].length - 4.0) <= 1e-8
    assert orbits[0].symmetry_class == 0
    assert reflow_deviation(orbits[0]) <= 1e-6


def test_circle_chord_formula():
    body = circle(1.0)
    for n in range(2, 8):
        admissible = [r for r in range(1, n // 2 + 1) if math.gcd(n, r) == 1]
        rotations = list(range(1, n // 2 + 1))
        seeds = generate_seeds(body, n, 2 * len(rotations), 'structured', rng_seed=0)
        orbits = find_critical(body, n, seeds, mode='newton')
        lengths = [o.length for o in orbits]
        for r in admissible:
            expected = 2.0 * n * math.sin(math.pi * r / n)
            assert any(abs(L - expected) <= 1e-8 for L in lengths), (n, r, lengths)


def test_ellipse_axes():
    body = ellipsoid(2.0, 1.0)
    seeds = generate_seeds(body, 2, 8, 'mixed', rng_seed=0)
    found = find_critical(body, 2, seeds, 'maximize') + find_critical(body, 2, seeds, 'newton')
    orbits = deduplicate(found)
    lengths = [o.length for o in orbits]
    assert any(abs(L - 8.0) <= 1e-8 for L in lengths), lengths
    assert any(abs(L - 4.0) <= 1e-8 for L in lengths), lengths
    for orbit in orbits:
        assert reflow_deviation(orbit) <= 1e-6


def test_record_round_trip():
    body = circle(1.0)
    orbit = make_orbit(polygon_seed(body, 5, 2))
    record = orbit_to_record(orbit)
    assert record['n'] == 5 and record['rotation_number'] == 2
    restored = orbit_from_record(body, record)
    assert abs(restored.length - orbit.length) <= 1e-12
    assert restored.canonical_key == orbit.canonical_key




def test_collapsed_seed_names_its_junction_once():
    import lib.configuration as configuration

    seed = polygon_seed(ellipsoid(2.0, 1.0), 3, 1, phase=0.3)
    original = configuration.displace

    def collapse(config, X, tol=None):
        raise AdjacencyViolation("adjacent points coincide", junction=1)

    configuration.displace = collapse
    try:
        solve_seed(seed, 'newton')
        raise AssertionError("collapsed Newton iterate accepted")
    except SeedCollapsed as e:
        message = str(e)
        assert e.junction == 1
        assert message.count("junction") == 1, message
        assert message.endswith("(junction 1)"), message
    finally:
        configuration.displace = original


TESTS = [
    test_diameter_is_critical,
    test_adjacent_points_must_differ,
    test_gradient_matches_finite_differences,
    test_dihedral_invariance,
    test_iterates,
    test_rotation_numbers,
    test_seeding_is_reproducible,
    test_circle_diameters_form_one_class,
    test_circle_chord_formula,
    test_ellipse_axes,
    test_record_round_trip,
    test_collapsed_seed_names_its_junction_once,
]


def main():
    log("=" * 60)
    log("Configuration Tests")
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
    log(f"🎉 All {len(TESTS)} configuration tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
