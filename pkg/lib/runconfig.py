#!/usr/bin/env python3.11
"""
Run configuration management.

A run configuration is a YAML file under config/runs/ describing one
reproducible computation: the table, the period n, the iteration list, the
seeding and tolerances, and per-subcommand options. Command-line flags are
merged on top ("flags win"), and every output file records the digest of
the fully merged configuration.
"""

import copy
import hashlib
import json
from typing import Any, Dict, List, Optional

import yaml

from .common import log, warn, error, validate_run_config_exists
from .configuration import Tolerances
from .data_conversion import NumericJSONEncoder
from .errors import RunConfigError
from .geometry import ConvexBody, available_bodies, make_body

DEFAULT_RUN_CONFIG: Dict[str, Any] = {
    'name': 'adhoc',
    'body': {'name': 'circle', 'params': [1.0], 'plugin': None},
    'n': 2,
    'm_list': [1, 2, 3, 4, 5, 8],
    'mode': 'both',
    'seeds': {'count': 8, 'strategy': 'mixed', 'rng_seed': 0, 'rotation': None},
    'solver': {'max_iters': 500, 'workers': 1, 'primitive_only': False},
    'tolerances': {
        'critical': 1e-9,
        'adjacent_scale': 1e-6,
        'geo': 1e-8,
        'length': 1e-8,
    },
    'output': {'directory': None},
    'simulate': {'start': None, 'direction': None, 'target': None, 'k': 4, 'check_period': None},
    'indices': {'z_samples': 16, 'scan_samples': 8},
    'iterate': {'prime': None, 'max_m': None, 'workers': 1, 'twists': [[-1.0, 0.0], [0.0, 1.0]]},
    'topology': {'m_list': [5, 10, 20], 'samples': 64, 'paths': None, 'epsilon': None},
    'birkhoff': {'pairs': [[3, 1], [4, 1], [5, 1], [5, 2]], 'phases': 8},
}

VALID_MODES = ('maximize', 'newton', 'both')
VALID_STRATEGIES = ('structured', 'random', 'mixed')


def load_run_config(run_name: str) -> Dict[str, Any]:
    """Load a run configuration from file"""
    try:
        run_path = validate_run_config_exists(run_name)
    except FileNotFoundError as e:
        raise RunConfigError(str(e)) from e

    try:
        with open(run_path, 'r') as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        error(f"Failed to parse run configuration {run_name}: {e}")
        raise RunConfigError(f"Malformed YAML in {run_path}: {e}") from e

    if not isinstance(data, dict):
        raise RunConfigError(f"Run configuration {run_path} must be a mapping")
    data.setdefault('name', run_path.stem)
    log(f"Loaded run configuration: {run_path.stem}")
    return data


def merge_run_config(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    """Merge two configurations, with overlay taking precedence.

    Nested mappings merge key by key, lists are replaced, and None in the
    overlay means "not given" and keeps the base value.
    """
    merged = copy.deepcopy(base)
    for key, value in (overlay or {}).items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_run_config(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def validate_run_config_structure(data: Dict[str, Any]) -> Dict[str, List[str]]:
    """Validate run configuration structure and return any issues"""
    issues = {
        'errors': [],
        'warnings': [],
        'info': []
    }

    known = set(DEFAULT_RUN_CONFIG)
    for key in data:
        if key not in known:
            issues['warnings'].append(f"Unknown section: {key}")

    body = data.get('body')
    if not isinstance(body, dict):
        issues['errors'].append("body section must be a dictionary")
    else:
        if body.get('plugin'):
            issues['info'].append(f"Body from plug-in {body['plugin']}")
        elif body.get('name') not in available_bodies():
            issues['errors'].append(f"Unknown body '{body.get('name')}' (available: {', '.join(available_bodies())})")
        params = body.get('params', [])
        if not isinstance(params, list) or not all(_is_number(p) for p in params):
            issues['errors'].append("body.params must be a list of numbers")

    n = data.get('n')
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        issues['errors'].append(f"n must be an integer >= 2, got {n!r}")

    m_list = data.get('m_list')
    if not isinstance(m_list, list) or not m_list or not all(isinstance(m, int) and m >= 1 for m in m_list):
        issues['errors'].append("m_list must be a non-empty list of positive integers")

    if data.get('mode') not in VALID_MODES:
        issues['errors'].append(f"mode must be one of {', '.join(VALID_MODES)}")

    seeds = data.get('seeds')
    if not isinstance(seeds, dict):
        issues['errors'].append("seeds section must be a dictionary")
    else:
        if seeds.get('strategy') not in VALID_STRATEGIES:
            issues['errors'].append(f"seeds.strategy must be one of {', '.join(VALID_STRATEGIES)}")
        if not isinstance(seeds.get('count'), int) or seeds.get('count') < 1:
            issues['errors'].append("seeds.count must be a positive integer")
        if not isinstance(seeds.get('rng_seed'), int):
            issues['errors'].append("seeds.rng_seed must be an integer (runs must be reproducible)")

    tolerances = data.get('tolerances')
    if not isinstance(tolerances, dict):
        issues['errors'].append("tolerances section must be a dictionary")
    else:
        for key, value in tolerances.items():
            if key not in DEFAULT_RUN_CONFIG['tolerances']:
                issues['warnings'].append(f"Unknown tolerance: {key}")
            elif not _is_number(value) or value <= 0:
                issues['errors'].append(f"tolerances.{key} must be a positive number")

    iterate_options = data.get('iterate', {})
    if isinstance(iterate_options, dict):
        for pair in iterate_options.get('twists') or []:
            if not (isinstance(pair, list) and len(pair) == 2 and all(_is_number(v) for v in pair)):
                issues['errors'].append(f"iterate.twists entries must be [re, im], got {pair!r}")
            elif abs(abs(complex(*pair)) - 1.0) > 1e-12:
                issues['errors'].append(f"iterate.twists entry {pair!r} is not on the unit circle")

    birkhoff = data.get('birkhoff', {})
    if isinstance(birkhoff, dict):
        for pair in birkhoff.get('pairs', []):
            if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, int) for v in pair)):
                issues['errors'].append(f"birkhoff.pairs entries must be [n, r], got {pair!r}")

    return issues


def get_run_config_summary(data: Dict[str, Any]) -> Dict[str, Any]:
    """Get a summary of run configuration contents"""
    body = data.get('body', {})
    return {
        'name': data.get('name'),
        'body': body.get('plugin') or f"{body.get('name')} {' '.join(str(p) for p in body.get('params', []))}".strip(),
        'n': data.get('n'),
        'mode': data.get('mode'),
        'seed_count': data.get('seeds', {}).get('count'),
        'rng_seed': data.get('seeds', {}).get('rng_seed'),
        'm_list': data.get('m_list'),
    }


def run_config_digest(data: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of a configuration"""
    canonical = json.dumps(data, sort_keys=True, separators=(',', ':'), cls=NumericJSONEncoder)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def resolve_run_config(run: Optional[str] = None, overlay: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Defaults, then the named/path configuration, then flag overrides"""
    data = copy.deepcopy(DEFAULT_RUN_CONFIG)
    if run:
        data = merge_run_config(data, load_run_config(run))
    data = merge_run_config(data, overlay or {})

    issues = validate_run_config_structure(data)
    for message in issues['warnings']:
        warn(message)
    if issues['errors']:
        for message in issues['errors']:
            error(message)
        raise RunConfigError(f"Invalid run configuration: {issues['errors'][0]}")
    return data


def tolerances_from(data: Dict[str, Any]) -> Tolerances:
    values = data.get('tolerances', {})
    return Tolerances(**{k: float(v) for k, v in values.items() if k in DEFAULT_RUN_CONFIG['tolerances']})


def body_from(data: Dict[str, Any]) -> ConvexBody:
    body = data['body']
    return make_body(body.get('name', 'custom'), body.get('params', []), plugin=body.get('plugin'))
