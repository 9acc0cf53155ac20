#!/usr/bin/env python3.11
"""
Subcommand implementations shared by the scripts and the dispatcher.

Each cmd_* takes a fully merged run configuration (see lib.runconfig),
writes its result files through a RunOutput and returns a process exit
code: 0 success, 2 nothing found, 3 property violation, 4 input error.
"""

import argparse
import math
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .common import log, warn, error, info, utc_timestamp, read_json_file, write_json_file, find_files_by_pattern
from .configuration import (
    CriticalOrbit, deduplicate, find_critical, generate_seeds, orbit_from_record,
    orbit_to_record, polygon_seed, reflow_deviation,
)
from .data_conversion import complex_to_pair, render_csv, write_csv_file
from .errors import (
    AdjacencyViolation, BilliardError, DomainError, GrazingRay, NotCritical,
    NotStrictlyConvex, OffSurface, RunConfigError,
)
from .geometry import billiard_flow, radial_point
from .paths import PathManager
from .runconfig import body_from, run_config_digest, tolerances_from
from .spectral import (
    assemble_hessian, indices_at, iteration_report, mean_index, monodromy,
    nullity_cross_check, prime_power_list, semicontinuity_scan,
)
from .topology import (
    bangert_lift, betti_polynomial, check_estimate, epsilon_membership,
    equivariant_polynomial, lift_endpoints_ok, standard_paths,
)

EXIT_OK = 0
EXIT_NOTHING_FOUND = 2
EXIT_VIOLATION = 3
EXIT_INPUT = 4

ORACLE_TOL = 1e-4
SYMMETRY_TOL = 1e-9

_INPUT_ERRORS = (DomainError, OffSurface, GrazingRay, NotCritical, NotStrictlyConvex,
                 AdjacencyViolation, FileNotFoundError)


def exit_code_for(exc: BaseException) -> int:
    """Input problems map to 4, every other library failure to 3"""
    return EXIT_INPUT if isinstance(exc, _INPUT_ERRORS) else EXIT_VIOLATION


class RunOutput:
    """Result files of one run; the 'generated' stamp is the only time-dependent field"""

    def __init__(self, data: Dict[str, Any]):
        self.data = data
        self.name = data.get('name') or 'adhoc'
        self.digest = run_config_digest(data)
        self.generated = utc_timestamp()
        directory = (data.get('output') or {}).get('directory')
        self.paths = PathManager(out_dir=directory) if directory else PathManager()
        self.written: List[Path] = []
        self._lock = threading.Lock()

    @property
    def orbits_dir(self) -> Path:
        return self.paths.orbits_dir(self.name)

    def _target(self, kind: str, filename: str) -> Path:
        directory = {
            'orbits': self.paths.orbits_dir,
            'tables': self.paths.tables_dir,
            'reports': self.paths.reports_dir,
        }[kind](self.name)
        return directory / filename

    def metadata(self, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        meta = {'run_config_digest': self.digest, 'run': self.name}
        meta.update(extra or {})
        return meta

    def write_csv(self, kind: str, filename: str, header: Sequence[str], rows: Sequence[Sequence[Any]],
                  metadata: Optional[Dict[str, Any]] = None) -> Path:
        target = self._target(kind, filename)
        with self._lock:
            write_csv_file(target, header, rows, self.metadata(metadata), self.generated)
            self.written.append(target)
        log(f"Wrote {self.paths.get_relative_path(target)}")
        return target

    def write_json(self, kind: str, filename: str, payload: Dict[str, Any]) -> Path:
        target = self._target(kind, filename)
        document = dict(payload)
        document['generated'] = self.generated
        document['run_config_digest'] = self.digest
        with self._lock:
            if not write_json_file(target, document):
                raise OSError(f"Could not write {target}")
            self.written.append(target)
        log(f"Wrote {self.paths.get_relative_path(target)}")
        return target


# ---------------------------------------------------------------------------
# Shared argument handling
# ---------------------------------------------------------------------------

def int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(',', ' ').split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of integers, got '{text}'")


def float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace(',', ' ').split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list of numbers, got '{text}'")


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Run selection and the overrides every subcommand understands"""
    parser.add_argument('--run', '-r', help='Run configuration name under config/runs/ or path to a YAML file')
    parser.add_argument('--body', help='Body spec, e.g. "ellipse 2 1" or "mypkg.tables:egg 1.5"')
    parser.add_argument('--n', type=int, help='Number of bounce points')
    parser.add_argument('--m-list', type=int_list, help='Iteration orders, e.g. 1,2,4,8')
    parser.add_argument('--mode', choices=['maximize', 'newton', 'both'], help='Critical point solver')
    parser.add_argument('--seeds', type=int, help='Number of seeds')
    parser.add_argument('--strategy', choices=['structured', 'random', 'mixed'], help='Seeding strategy')
    parser.add_argument('--rng-seed', type=int, help='Seed of the random generator')
    parser.add_argument('--rotation', type=int, help='Rotation number of structured seeds')
    parser.add_argument('--workers', type=int, help='Parallel workers for seeds and iteration rows')
    parser.add_argument('--tol-critical', type=float, help='Gradient residual accepted as critical')
    parser.add_argument('--out', help='Output root directory (default: out/)')


def overlay_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Flags as a run-config overlay; unset flags stay None and are skipped by the merge"""
    overlay: Dict[str, Any] = {
        'n': getattr(args, 'n', None),
        'm_list': getattr(args, 'm_list', None),
        'mode': getattr(args, 'mode', None),
        'seeds': {
            'count': getattr(args, 'seeds', None),
            'strategy': getattr(args, 'strategy', None),
            'rng_seed': getattr(args, 'rng_seed', None),
            'rotation': getattr(args, 'rotation', None),
        },
        'solver': {'workers': getattr(args, 'workers', None)},
        'tolerances': {'critical': getattr(args, 'tol_critical', None)},
        'output': {'directory': getattr(args, 'out', None)},
    }
    spec = getattr(args, 'body', None)
    if spec:
        tokens = spec.split()
        try:
            params = [float(t) for t in tokens[1:]]
        except ValueError:
            raise RunConfigError(f"body parameters must be numbers: '{spec}'")
        if ':' in tokens[0]:
            overlay['body'] = {'name': 'plugin', 'params': params, 'plugin': tokens[0]}
        else:
            overlay['body'] = {'name': tokens[0], 'params': params, 'plugin': ''}
    return overlay


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(data: Dict[str, Any]) -> int:
    """Bounce trace of one trajectory, with an optional periodicity check"""
    body = body_from(data)
    options = data['simulate']
    k = int(options['k'])
    start = options.get('start')
    if start is None:
        axis = np.zeros(body.ambient_dim)
        axis[0] = 1.0
        start = radial_point(body, axis)
    p0 = body.surface_point(start)

    if options.get('direction') is not None:
        d0 = np.asarray(options['direction'], dtype=float)
    else:
        target = options.get('target')
        target = np.asarray(target, dtype=float) if target is not None else body.interior_point
        d0 = target - p0.coords
    norm = float(np.linalg.norm(d0))
    if norm == 0.0:
        raise DomainError("Start direction vanishes")
    d0 = d0 / norm

    log(f"Simulating {k} bounce(s) on {body.name} {list(body.params)}")
    bounces = billiard_flow(body, p0, d0, k)

    header = ['bounce'] + [f"x{i}" for i in range(body.ambient_dim)] + ['residual']
    rows = [[0] + p0.coords.tolist() + [p0.on_surface_residual]]
    rows += [[i + 1] + q.coords.tolist() + [q.on_surface_residual] for i, q in enumerate(bounces)]
    extra: Dict[str, Any] = {'body': f"{body.name} {list(body.params)}", 'k': k}

    period = options.get('check_period')
    if period is not None:
        period = int(period)
        if period < 1 or period > k:
            raise DomainError(f"--check-period must lie in 1..k = {k}, got {period}")
        sequence = np.array([p0.coords] + [q.coords for q in bounces])
        deviation = max(float(np.linalg.norm(sequence[i + period] - sequence[i]))
                        for i in range(len(sequence) - period))
        extra['period'] = period
        extra['period_deviation'] = repr(deviation)
        info(f"Max deviation from {period}-periodicity: {deviation:.3e}")

    out = RunOutput(data)
    out.write_csv('tables', f"trace-k{k}.csv", header, rows, extra)
    return EXIT_OK


# ---------------------------------------------------------------------------
# find
# ---------------------------------------------------------------------------

def search_orbits(data: Dict[str, Any]) -> List[CriticalOrbit]:
    """Seeds from the run configuration, solved in the configured mode(s)"""
    body = body_from(data)
    tol = tolerances_from(data)
    n = int(data['n'])
    seeds_cfg, solver = data['seeds'], data['solver']
    seeds = generate_seeds(body, n, int(seeds_cfg['count']), seeds_cfg['strategy'],
                           int(seeds_cfg['rng_seed']), seeds_cfg.get('rotation'), tol)
    if not seeds:
        warn("Seeding produced no admissible configuration")
        return []
    modes = ['maximize', 'newton'] if data['mode'] == 'both' else [data['mode']]
    found: List[CriticalOrbit] = []
    for mode in modes:
        found.extend(find_critical(body, n, seeds, mode, tol, int(solver['max_iters']),
                                   workers=int(solver['workers']),
                                   primitive_only=bool(solver['primitive_only'])))
    return deduplicate(found, tol)


def _safe_reflow(orbit: CriticalOrbit) -> Optional[float]:
    try:
        return reflow_deviation(orbit)
    except BilliardError as e:
        warn(f"Re-flow of orbit of length {orbit.length:.12g} failed: {e}")
        return None


def cmd_find(data: Dict[str, Any]) -> int:
    """Deduplicated critical orbits as JSON records plus a summary table"""
    n = int(data['n'])
    orbits = search_orbits(data)
    if not orbits:
        error(f"No critical orbit found for n={n}")
        return EXIT_NOTHING_FOUND

    out = RunOutput(data)
    rows = []
    for index, orbit in enumerate(orbits):
        record = orbit_to_record(orbit)
        record['reflow_deviation'] = _safe_reflow(orbit)
        out.write_json('orbits', f"orbit-n{n}-{index:03d}.json", record)
        rows.append([index, orbit.length, orbit.grad_residual, orbit.rotation_number,
                     orbit.iteration_order, orbit.symmetry_class, record['reflow_deviation']])
        info(f"orbit {index}: length {orbit.length:.12f}, residual {orbit.grad_residual:.2e}")

    out.write_csv('tables', f"orbits-n{n}.csv",
                  ['orbit', 'length', 'grad_residual', 'rotation_number', 'iteration_order',
                   'symmetry_class', 'reflow_deviation'], rows, {'n': n})
    log(f"✓ Found {len(orbits)} distinct orbit(s)")
    return EXIT_OK


def load_orbits(data: Dict[str, Any]) -> List[CriticalOrbit]:
    """Stored orbits of the run when they match its body, otherwise a fresh search"""
    body = body_from(data)
    tol = tolerances_from(data)
    n = int(data['n'])
    out = RunOutput(data)
    orbits = []
    for path in find_files_by_pattern(out.orbits_dir, f"orbit-n{n}-*.json"):
        record = read_json_file(path)
        if not record:
            continue
        if record.get('body') != body.describe():
            warn(f"Ignoring {path.name}: recorded for {record.get('body')}")
            continue
        orbits.append(orbit_from_record(body, record, tol))
    if orbits:
        log(f"Loaded {len(orbits)} stored orbit(s) from {out.paths.get_relative_path(out.orbits_dir)}")
        return orbits
    info("No stored orbits for this run; searching")
    return search_orbits(data)


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------

def _poincare_text(points) -> str:
    return ';'.join(f"{p.angle:.12f}x{p.multiplicity}" for p in points)


def cmd_indices(data: Dict[str, Any]) -> int:
    """Index table of every orbit: triples, Poincaré points, mean indices, oracle checks"""
    n = int(data['n'])
    tol = tolerances_from(data)
    options = data['indices']
    orbits = load_orbits(data)
    if not orbits:
        error(f"No critical orbit available for n={n}")
        return EXIT_NOTHING_FOUND

    out = RunOutput(data)
    header = ['orbit', 'length', 'ind', 'coind', 'nul', 'total', 'avind', 'avcoind',
              'poincare_points', 'poincare_multiplicity', 'symmetry_error', 'oracle_error',
              'difference_gap', 'inverse_residual', 'nullity_match', 'semicontinuity_ok', 'inconclusive']
    rows, details, violations = [], [], []
    for index, orbit in enumerate(orbits):
        H = assemble_hessian(orbit, tol, with_fd=True)
        triple = indices_at(H, 1.0)
        mono = monodromy(H)
        mean = mean_index(H, mono)
        scan = semicontinuity_scan(H, int(options['scan_samples']), mono)
        cross = nullity_cross_check(H, int(options['z_samples']), mono)
        scale = max(float(np.linalg.norm(H.real_matrix, 2)), 1.0)

        checks = {
            'dimension': triple.total == H.dimension,
            'poincare_multiplicity': mono.total_multiplicity <= 2 * H.N,
            'nullity_match': all(r['match'] for r in cross),
            'semicontinuity': scan.passed,
            'oracle': H.oracle_error() is not None and H.oracle_error() <= ORACLE_TOL,
            'symmetric': H.symmetry_error() <= SYMMETRY_TOL * scale,
        }
        for name, ok in checks.items():
            if not ok:
                violations.append(f"orbit {index}: {name}")
        for message in scan.inconclusive:
            warn(f"orbit {index}: {message}")

        rows.append([index, orbit.length, triple.ind, triple.coind, triple.nul, triple.total,
                     mean.avind, mean.avcoind, _poincare_text(mono.poincare_points),
                     mono.total_multiplicity, H.symmetry_error(), H.oracle_error(), H.difference_gap(),
                     mono.inverse_residual, checks['nullity_match'], scan.passed, len(scan.inconclusive)])
        details.append({
            'orbit': index,
            'length': orbit.length,
            'triple': list(triple.counts),
            'mean_index': {'avind': mean.avind, 'avcoind': mean.avcoind,
                           'quadrature_fallback': mean.quadrature_fallback},
            'poincare_points': [{'z': complex_to_pair(p.z), 'angle': p.angle, 'multiplicity': p.multiplicity,
                                 'ambiguous': p.ambiguous}
                                for p in mono.poincare_points],
            'monodromy_ambiguous': mono.ambiguous,
            'max_transfer_condition': mono.max_transfer_condition,
            'nullity_cross_check': [{'z': complex_to_pair(r['z']), 'twisted_nul': r['twisted_nul'],
                                     'kernel_dim': r['kernel_dim']} for r in cross],
            'semicontinuity': {
                'arcs_constant': scan.arcs_constant,
                'points': [{'z': complex_to_pair(p['z']), 'triple': list(p['triple'].counts),
                            'left': list(p['left'].counts) if p['left'] else None,
                            'right': list(p['right'].counts) if p['right'] else None,
                            'jump_ok': p['jump_ok']} for p in scan.points],
                'inconclusive': scan.inconclusive,
            },
            'checks': checks,
        })
        info(f"orbit {index}: (ind, coind, nul) = {triple.counts}, avind = {mean.avind:.6f}, "
             f"Poincaré points: {_poincare_text(mono.poincare_points) or 'none'}")

    out.write_csv('tables', f"indices-n{n}.csv", header, rows, {'n': n, 'N': orbits[0].body.N})
    out.write_json('reports', f"indices-n{n}.json", {'n': n, 'orbits': details})
    if violations:
        for message in violations:
            error(f"Property violation: {message}")
        return EXIT_VIOLATION
    log(f"✓ Index table for {len(orbits)} orbit(s)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# iterate
# ---------------------------------------------------------------------------

def iteration_m_list(data: Dict[str, Any]) -> List[int]:
    options = data['iterate']
    if options.get('prime'):
        max_m = int(options.get('max_m') or max(data['m_list']))
        return prime_power_list(int(options['prime']), max_m)
    return [int(m) for m in data['m_list']]


ITERATE_HEADER = ['m', 'z_re', 'z_im', 'ind', 'coind', 'nul', 'source']


def iteration_twists(data: Dict[str, Any]) -> List[complex]:
    """Twists z of the iterate table; z = 1 always comes first"""
    twists = [complex(1.0)]
    for pair in data['iterate'].get('twists') or []:
        z = complex(float(pair[0]), float(pair[1]))
        if abs(abs(z) - 1.0) > 1e-12:
            raise DomainError(f"iterate.twists entry {list(pair)} is not on the unit circle")
        if all(abs(z - w) > 1e-12 for w in twists):
            twists.append(z)
    return twists


def _triple_list(triple) -> Optional[List[int]]:
    return list(triple.counts) if triple is not None else None


def cmd_iterate(data: Dict[str, Any], orbit_index: Optional[int] = None) -> int:
    """Iteration report per orbit; exit 3 names every failing row"""
    n = int(data['n'])
    tol = tolerances_from(data)
    m_list = iteration_m_list(data)
    orbits = load_orbits(data)
    if orbit_index is not None:
        if not 0 <= orbit_index < len(orbits):
            raise DomainError(f"Orbit index {orbit_index} out of range (0..{len(orbits) - 1})")
        selected = [(orbit_index, orbits[orbit_index])]
    else:
        selected = list(enumerate(orbits))
    if not selected:
        error(f"No critical orbit available for n={n}")
        return EXIT_NOTHING_FOUND

    out = RunOutput(data)
    failed = False
    workers = int(data['iterate'].get('workers') or data['solver']['workers'])
    twists = iteration_twists(data)
    for index, orbit in selected:
        report = iteration_report(orbit, m_list, tol, workers=workers, twists=twists)
        table = []
        for row in report.rows:
            for z, direct, bott in row.twisted:
                table.append([row.m, z.real, z.imag, *direct.counts, 'direct'])
                table.append([row.m, z.real, z.imag, *bott.counts, 'bott'])
        out.write_csv('tables', f"iterate-n{n}-{index:03d}.csv", ITERATE_HEADER, table,
                      {'n': n, 'orbit': index, 'length': orbit.length})
        rows = []
        for row in report.rows:
            rows.append({
                'm': row.m,
                'direct': _triple_list(row.direct),
                'bott': _triple_list(row.bott),
                'bounds': row.bounds,
                'verdicts': row.verdicts,
                'coind_preserved': row.coind_preserved,
                'nul_preserved': row.nul_preserved,
                'hypothesis': row.hypothesis,
                'coind_le_N': row.coind_le_N,
                'local_max': row.local_max,
                'error': row.error,
                'passed': row.passed,
            })
        out.write_json('reports', f"iterate-n{n}-{index:03d}.json", {
            'orbit': index,
            'n': n,
            'length': orbit.length,
            'm_list': m_list,
            'mean_ind': report.mean_ind,
            'mean_coind': report.mean_coind,
            'quadrature_fallback': report.quadrature_fallback,
            'poincare_points': [{'z': complex_to_pair(p.z), 'multiplicity': p.multiplicity,
                                 'ambiguous': p.ambiguous}
                                for p in report.poincare_points],
            'divisibility_monotone': report.divisibility_monotone,
            'mean_coindex_zero': report.mean_coindex_zero,
            'rows': rows,
            'passed': report.passed,
        })
        for row in report.failing_rows():
            failed = True
            reasons = [name for name, ok in row.verdicts.items() if not ok] or [row.error]
            if not row.verdicts.get('bott_match', True):
                error(f"orbit {index} m={row.m}: direct {_triple_list(row.direct)} "
                      f"!= Bott split {_triple_list(row.bott)}")
            error(f"orbit {index} row m={row.m} failed: {', '.join(str(r) for r in reasons)}")
        if not report.divisibility_monotone:
            failed = True
            error(f"orbit {index}: indices decrease along a divisibility chain")
        hypothesis = [row.m for row in report.rows if row.hypothesis]
        info(f"orbit {index}: avind = {report.mean_ind:.6f}, coind/nul preserved at m = {hypothesis}")

    if failed:
        return EXIT_VIOLATION
    log(f"✓ Iteration reports for {len(selected)} orbit(s) passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------

TOPOLOGY_ACTIONS = ('betti', 'equivariant', 'betti-rank-sum', 'equivariant-rank-sum', 'bangert')


def cmd_topology(data: Dict[str, Any], action: str, N: Optional[int] = None, n: Optional[int] = None,
                 coefficients: bool = False) -> int:
    """Polynomials and rank sums on stdout, or the lift estimate for the configured paths"""
    if action == 'bangert':
        return cmd_bangert(data)
    if action not in TOPOLOGY_ACTIONS:
        raise DomainError(f"Unknown topology action '{action}' (expected one of {', '.join(TOPOLOGY_ACTIONS)})")
    if N is None or n is None:
        raise DomainError(f"'{action}' needs N and n")
    poly = betti_polynomial(N, n) if action.startswith('betti') else equivariant_polynomial(N, n)
    if action.endswith('rank-sum'):
        print(poly.rank_sum(N))
    elif coefficients:
        print(list(poly.coeffs))
    else:
        print(poly)
    return EXIT_OK


def cmd_bangert(data: Dict[str, Any]) -> int:
    """Lift every configured path for every m and check the length lower bound"""
    body = body_from(data)
    tol = tolerances_from(data)
    options = data['topology']
    samples = int(options['samples'])
    if samples < 64:
        warn(f"Paths with {samples} samples are coarser than the usual 64")
    available = standard_paths(body, samples)
    names = options.get('paths') or sorted(available)
    unknown = [name for name in names if name not in available]
    if unknown:
        raise DomainError(f"Unknown path(s) {unknown} for this body (available: {', '.join(sorted(available))})")
    epsilon = options.get('epsilon')

    header = ['path', 'm', 'x', 'k', 'length', 'intermediate', 'bound', 'intermediate_ok', 'ok']
    if epsilon:
        header.append('in_epsilon')
    rows = []
    checked = skipped = 0
    passed = True
    for name in names:
        path = available[name]
        for m in options['m_list']:
            try:
                lift = bangert_lift(path, int(m), tol)
            except AdjacencyViolation as e:
                warn(f"{name} m={m}: {e}; estimate not applicable")
                skipped += 1
                continue
            checked += 1
            if not lift_endpoints_ok(lift, tol):
                passed = False
                error(f"{name} m={m}: lifted endpoints are not the iterated endpoints")
            for sample, config in zip(check_estimate(lift), lift.lifted):
                row = [name, m, sample['x'], sample['k'], sample['length'], sample['intermediate'],
                       sample['bound'], sample['intermediate_ok'], sample['ok']]
                if epsilon:
                    row.append(epsilon_membership(config, float(epsilon)))
                passed &= sample['ok'] and sample['intermediate_ok']
                rows.append(row)

    if checked == 0:
        error("No path could be lifted")
        return EXIT_NOTHING_FOUND
    verdict = 'PASS' if passed else 'FAIL'
    out = RunOutput(data)
    meta = {'body': f"{body.name} {list(body.params)}", 'verdict': verdict, 'skipped': skipped}
    out.write_csv('tables', 'bangert.csv', header, rows, meta)
    print(render_csv(header, rows, {'run_config_digest': out.digest}), end='')
    print(verdict)
    return EXIT_OK if passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# birkhoff
# ---------------------------------------------------------------------------

def cmd_birkhoff(data: Dict[str, Any]) -> int:
    """Count distinct (n, r) orbits on a plane table for every configured coprime pair"""
    body = body_from(data)
    if body.ambient_dim != 2:
        raise DomainError(f"birkhoff needs a plane table, got ambient dimension {body.ambient_dim}")
    tol = tolerances_from(data)
    options, solver = data['birkhoff'], data['solver']
    phases = int(options['phases'])
    rng = np.random.default_rng(int(data['seeds']['rng_seed']))

    results, rows = [], []
    passed = True
    for n, r in options['pairs']:
        n, r = int(n), int(r)
        if not (n >= 2 and 1 <= r < n and math.gcd(n, r) == 1):
            raise DomainError(f"(n, r) = ({n}, {r}) is not a coprime pair with 1 <= r < n")
        seeds = []
        for k in range(phases):
            phase = 2.0 * math.pi * k / (n * phases)
            try:
                seeds.append(polygon_seed(body, n, r, phase, jitter=0.02 if k % 2 else 0.0, rng=rng, tol=tol))
            except AdjacencyViolation:
                continue
        found: List[CriticalOrbit] = []
        for mode in ('maximize', 'newton'):
            found.extend(find_critical(body, n, seeds, mode, tol, int(solver['max_iters']),
                                       workers=int(solver['workers']), primitive_only=True))
        target = min(r, n - r)
        orbits = [o for o in deduplicate(found, tol) if o.rotation_number == target]
        ok = len(orbits) >= 2
        passed &= ok
        lengths = sorted(o.length for o in orbits)
        results.append({'n': n, 'r': r, 'count': len(orbits), 'lengths': lengths, 'passed': ok})
        rows.append([n, r, len(orbits), lengths[0] if lengths else None, lengths[-1] if lengths else None, ok])
        (info if ok else error)(f"(n, r) = ({n}, {r}): {len(orbits)} distinct orbit(s)")

    out = RunOutput(data)
    out.write_csv('tables', 'birkhoff.csv', ['n', 'r', 'count', 'min_length', 'max_length', 'passed'], rows,
                  {'body': f"{body.name} {list(body.params)}"})
    out.write_json('reports', 'birkhoff.json', {'body': body.describe(), 'pairs': results, 'passed': passed})
    return EXIT_OK if passed else EXIT_VIOLATION
