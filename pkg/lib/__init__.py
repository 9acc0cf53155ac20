#!/usr/bin/env python3.11
"""
Init file for the billiard orbit library.

This module provides a unified import interface for all library components.
"""

# Import all commonly used functions and classes
from .common import (
    ROOT, Colors, log, warn, error, info, utc_timestamp,
    ensure_directory, read_json_file, write_json_file,
    find_files_by_pattern, get_project_paths,
    get_run_config_path, list_available_run_configs,
    list_newest_run_configs, validate_run_config_exists
)

from .errors import *  # noqa: F401,F403
from .errors import __all__ as _error_names

from .data_conversion import (
    NumericJSONEncoder, complex_to_pair, prepare_json_serializable,
    format_value, render_csv, write_csv_file, read_csv_table
)

from .geometry import (
    ConvexBody, SurfacePoint, Chart,
    from_callables, ellipsoid, sphere, circle, superellipsoid,
    register_body, available_bodies, load_plugin_body, make_body, parse_body_spec,
    project_tangent, project_chord_orthogonal, tangent_basis, shape_operator,
    check_strict_convexity, make_chart, chart_to_surface, surface_to_chart,
    radial_point, ray_intersect, reflect, billiard_flow, planarity_residual
)

from .configuration import (
    Tolerances, DEFAULT_TOLERANCES, Configuration, TangentField, CriticalOrbit,
    make_configuration, check_adjacency, length, gradient, grad_residual, displace,
    tangent_field_fd_check, dihedral_orders, relabel, canonicalize, iterate,
    iteration_order, primitive, rotation_number, distinct, deduplicate,
    polygon_seed, structured_seeds, random_seeds, generate_seeds,
    solve_seed, find_critical, reflow_deviation, orbit_to_record, orbit_from_record
)

from .spectral import (
    HessianOperator, TwistedHessian, IndexTriple, PoincarePoint, Monodromy,
    MeanIndex, IterationRow, IterationReport, SemicontinuityReport,
    chart_hessian, assemble_hessian, twisted_hessian, index_triple, indices_at,
    kernel_dimension, monodromy, poincare_set_distance, nullity_cross_check,
    roots_of, bott_split, mean_index, prime_power_list, divisibility_monotone,
    iteration_report, semicontinuity_scan
)

from .topology import (
    PoincarePolynomial, BangertPath,
    betti_polynomial, equivariant_polynomial, betti_rational, equivariant_rational,
    rank_sum, log_chord_product, epsilon_membership,
    bangert_lift, check_estimate, lift_endpoints_ok, angle_path, standard_paths
)

from .runconfig import (
    DEFAULT_RUN_CONFIG, load_run_config, merge_run_config,
    validate_run_config_structure, get_run_config_summary, run_config_digest,
    resolve_run_config, tolerances_from, body_from
)

from .paths import paths

__version__ = "1.0.0"
__all__ = [
    # Common utilities
    'ROOT', 'Colors', 'log', 'warn', 'error', 'info', 'utc_timestamp',
    'ensure_directory', 'read_json_file', 'write_json_file',
    'find_files_by_pattern', 'get_project_paths',
    'get_run_config_path', 'list_available_run_configs',
    'list_newest_run_configs', 'validate_run_config_exists',

    # Data conversion
    'NumericJSONEncoder', 'complex_to_pair', 'prepare_json_serializable',
    'format_value', 'render_csv', 'write_csv_file', 'read_csv_table',

    # Geometry
    'ConvexBody', 'SurfacePoint', 'Chart',
    'from_callables', 'ellipsoid', 'sphere', 'circle', 'superellipsoid',
    'register_body', 'available_bodies', 'load_plugin_body', 'make_body', 'parse_body_spec',
    'project_tangent', 'project_chord_orthogonal', 'tangent_basis', 'shape_operator',
    'check_strict_convexity', 'make_chart', 'chart_to_surface', 'surface_to_chart',
    'radial_point', 'ray_intersect', 'reflect', 'billiard_flow', 'planarity_residual',

    # Configurations and critical orbits
    'Tolerances', 'DEFAULT_TOLERANCES', 'Configuration', 'TangentField', 'CriticalOrbit',
    'make_configuration', 'check_adjacency', 'length', 'gradient', 'grad_residual', 'displace',
    'tangent_field_fd_check', 'dihedral_orders', 'relabel', 'canonicalize', 'iterate',
    'iteration_order', 'primitive', 'rotation_number', 'distinct', 'deduplicate',
    'polygon_seed', 'structured_seeds', 'random_seeds', 'generate_seeds',
    'solve_seed', 'find_critical', 'reflow_deviation', 'orbit_to_record', 'orbit_from_record',

    # Spectral theory
    'HessianOperator', 'TwistedHessian', 'IndexTriple', 'PoincarePoint', 'Monodromy',
    'MeanIndex', 'IterationRow', 'IterationReport', 'SemicontinuityReport',
    'chart_hessian', 'assemble_hessian', 'twisted_hessian', 'index_triple', 'indices_at',
    'kernel_dimension', 'monodromy', 'poincare_set_distance', 'nullity_cross_check',
    'roots_of', 'bott_split', 'mean_index', 'prime_power_list', 'divisibility_monotone',
    'iteration_report', 'semicontinuity_scan',

    # Topology
    'PoincarePolynomial', 'BangertPath',
    'betti_polynomial', 'equivariant_polynomial', 'betti_rational', 'equivariant_rational',
    'rank_sum', 'log_chord_product', 'epsilon_membership',
    'bangert_lift', 'check_estimate', 'lift_endpoints_ok', 'angle_path', 'standard_paths',

    # Run configurations
    'DEFAULT_RUN_CONFIG', 'load_run_config', 'merge_run_config',
    'validate_run_config_structure', 'get_run_config_summary', 'run_config_digest',
    'resolve_run_config', 'tolerances_from', 'body_from',

    # Path management
    'paths',
] + list(_error_names)
