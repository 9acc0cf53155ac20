#!/usr/bin/env python3.11
"""
Cyclic configuration spaces of bounce points and the length functional.

A Configuration is a closed polygon inscribed in the table boundary. Its
critical points for the perimeter are exactly the periodic billiard
trajectories. This module holds the perimeter and its tangential gradient,
the two critical-point solvers (ascent and damped Newton), seeding, dihedral
canonicalization and the geometric distinctness test used to deduplicate.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .common import warn, info
from .errors import (
    AdjacencyViolation, AmbientDimension, BilliardError, DomainError,
    NoConvergence, OutOfChart, SeedCollapsed,
)
from .geometry import (
    ConvexBody, SurfacePoint, billiard_flow, chart_to_surface, make_chart,
    radial_point, tangent_basis,
)

ARMIJO = 1e-4
NEWTON_SWITCH = 1e-6
STEP_CAP = 0.1  # per-point displacement cap, in body diameters
MAX_ITERS = 500

CanonicalKey = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class Tolerances:
    critical: float = 1e-9
    adjacent_scale: float = 1e-6
    geo: float = 1e-8
    length: float = 1e-8

    def adjacent(self, body: ConvexBody) -> float:
        return self.adjacent_scale * body.diameter


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True, eq=False)
class Configuration:
    """Cyclic sequence q_0 ... q_{n-1} of bounce points (indices mod n)"""
    body: ConvexBody
    points: Tuple[SurfacePoint, ...]

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def coords(self) -> np.ndarray:
        return np.array([p.coords for p in self.points])

    def chords(self) -> np.ndarray:
        X = self.coords
        return np.roll(X, -1, axis=0) - X


@dataclass(frozen=True, eq=False)
class TangentField:
    """Tangent vectors v_j at q_j, as frame coordinates and ambient vectors"""
    frames: Tuple[np.ndarray, ...]
    components: np.ndarray  # n x N frame coordinates

    @property
    def vectors(self) -> np.ndarray:
        return np.array([E @ c for E, c in zip(self.frames, self.components)])

    def sup_norm(self) -> float:
        return float(np.abs(self.components).max()) if self.components.size else 0.0

    def flat(self) -> np.ndarray:
        return self.components.reshape(-1)


@dataclass(frozen=True, eq=False)
class CriticalOrbit:
    config: Configuration
    length: float
    grad_residual: float
    canonical_key: CanonicalKey
    rotation_number: Optional[int] = None
    iteration_order: int = 1
    symmetry_class: Optional[int] = None

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def body(self) -> ConvexBody:
        return self.config.body


def make_configuration(body: ConvexBody, points: Sequence, tol: Tolerances = DEFAULT_TOLERANCES) -> Configuration:
    """Build a configuration, checking that cyclically adjacent points differ"""
    if len(points) < 2:
        raise DomainError(f"A configuration needs n >= 2 points, got {len(points)}")
    pts = tuple(p if isinstance(p, SurfacePoint) else body.surface_point(p) for p in points)
    config = Configuration(body=body, points=pts)
    check_adjacency(config, tol)
    return config


def check_adjacency(config: Configuration, tol: Tolerances = DEFAULT_TOLERANCES) -> None:
    chords = np.linalg.norm(config.chords(), axis=1)
    bad = np.flatnonzero(chords <= tol.adjacent(config.body))
    if bad.size:
        j = int(bad[0])
        raise AdjacencyViolation(
            f"q_{j} and q_{(j + 1) % config.n} coincide (|chord| = {chords[j]:.3e})", junction=j)


def config_frames(config: Configuration) -> Tuple[np.ndarray, ...]:
    """The fixed orthonormal tangent frame at every bounce point"""
    return tuple(tangent_basis(p.unit_outward_normal) for p in config.points)


# ---------------------------------------------------------------------------
# Length functional
# ---------------------------------------------------------------------------

def length(config: Configuration) -> float:
    """Perimeter of the inscribed closed polygon"""
    return math.fsum(float(c) for c in np.linalg.norm(config.chords(), axis=1))


def chord_units(config: Configuration) -> Tuple[np.ndarray, np.ndarray]:
    """Unit chords u_j = (q_{j+1} - q_j)/|q_{j+1} - q_j| and their lengths"""
    chords = config.chords()
    lengths = np.linalg.norm(chords, axis=1)
    return chords / lengths[:, None], lengths


def bisector_defects(config: Configuration) -> np.ndarray:
    """Ambient vectors q'_j = u_{j-1} - u_j whose tangential parts form dL_n"""
    u, _ = chord_units(config)
    return np.roll(u, 1, axis=0) - u


def gradient(config: Configuration) -> TangentField:
    """Tangential gradient of L_n in the per-point frames"""
    frames = config_frames(config)
    defects = bisector_defects(config)
    components = np.array([E.T @ d for E, d in zip(frames, defects)])
    return TangentField(frames=frames, components=components)


def grad_residual(config: Configuration) -> float:
    return gradient(config).sup_norm()


def displace(config: Configuration, X: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> Configuration:
    """Move every q_j by chart coordinates X[j] in the chart centered at q_j"""
    body = config.body
    X = np.asarray(X, dtype=float).reshape(config.n, body.N)
    moved = [chart_to_surface(make_chart(body, p), x) for p, x in zip(config.points, X)]
    return make_configuration(body, moved, tol)


def tangent_field_fd_check(config: Configuration, direction: np.ndarray, h: float = 1e-5) -> Tuple[float, float]:
    """Analytic dL_n(v) against a central difference along chart direction v"""
    V = np.asarray(direction, dtype=float).reshape(config.n, config.body.N)
    analytic = float(np.sum(gradient(config).components * V))
    plus = length(displace(config, h * V))
    minus = length(displace(config, -h * V))
    return analytic, (plus - minus) / (2.0 * h)


# ---------------------------------------------------------------------------
# Relabelings, iterates, rotation numbers
# ---------------------------------------------------------------------------

def dihedral_orders(n: int) -> List[List[int]]:
    """Index orders for the 2n rotations and reflections of Z_n"""
    orders = []
    for k in range(n):
        orders.append([(k + j) % n for j in range(n)])
        orders.append([(k - j) % n for j in range(n)])
    return orders


def relabel(config: Configuration, order: Sequence[int]) -> Configuration:
    return Configuration(body=config.body, points=tuple(config.points[i] for i in order))


def canonicalize(config: Configuration, tol: Tolerances = DEFAULT_TOLERANCES) -> CanonicalKey:
    """Lexicographically least grid-rounded coordinate sequence over D_n"""
    grid = np.round(config.coords / tol.geo).astype(np.int64)
    rows = [tuple(int(v) for v in row) for row in grid]
    return min(tuple(rows[i] for i in order) for order in dihedral_orders(config.n))


def iterate(config: Configuration, m: int) -> Configuration:
    """The m-fold iterate (q, ..., q)"""
    if m < 1:
        raise DomainError(f"Iteration order must be >= 1, got {m}")
    return Configuration(body=config.body, points=config.points * m)


def iteration_order(config: Configuration, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Largest m such that the configuration is an m-fold iterate"""
    X = config.coords
    n = config.n
    for period in range(1, n):
        if n % period:
            continue
        if np.max(np.linalg.norm(np.roll(X, -period, axis=0) - X, axis=1)) <= tol.geo:
            return n // period
    return 1


def primitive(config: Configuration, tol: Tolerances = DEFAULT_TOLERANCES) -> Configuration:
    m = iteration_order(config, tol)
    return Configuration(body=config.body, points=config.points[:config.n // m])


def rotation_number(config: Configuration) -> int:
    """Winding number of a plane polygon around the interior point"""
    body = config.body
    if body.ambient_dim != 2:
        raise AmbientDimension(f"Rotation numbers need a plane table, ambient dimension is {body.ambient_dim}")
    rel = config.coords - body.interior_point
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    steps = np.mod(np.roll(theta, -1) - theta, 2.0 * np.pi)
    r = int(round(float(np.sum(steps)) / (2.0 * np.pi))) % config.n
    return min(r, config.n - r)


# ---------------------------------------------------------------------------
# Distinctness
# ---------------------------------------------------------------------------

def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def relabel_distance(a: Configuration, b: Configuration) -> float:
    """Smallest sup-distance between a and a dihedral relabeling of b"""
    if a.n != b.n:
        return math.inf
    A, B = a.coords, b.coords
    return min(float(np.max(np.linalg.norm(A - B[order], axis=1))) for order in dihedral_orders(b.n))


def distinct(a: CriticalOrbit, b: CriticalOrbit, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Whether two orbits are geometrically distinct trajectories"""
    if a.n == b.n:
        if a.canonical_key == b.canonical_key:
            return False
        return (abs(a.length - b.length) > tol.length
                or hausdorff(a.config.coords, b.config.coords) > tol.geo)
    small, large = (a, b) if a.n < b.n else (b, a)
    if large.n % small.n:
        return True
    m = large.n // small.n
    return relabel_distance(iterate(small.config, m), large.config) > tol.geo


def gram_invariant_distance(a: Configuration, b: Configuration) -> float:
    """Distance between Gram matrices about the center, minimized over D_n"""
    if a.n != b.n:
        return math.inf
    A = a.coords - a.body.interior_point
    B = b.coords - b.body.interior_point
    GA = A @ A.T
    best = math.inf
    for order in dihedral_orders(b.n):
        Bo = B[order]
        best = min(best, float(np.max(np.abs(GA - Bo @ Bo.T))))
    return best


# ---------------------------------------------------------------------------
# Seeds
# ---------------------------------------------------------------------------

def coordinate_planes(dim: int) -> List[Tuple[int, int]]:
    return [(a, b) for a in range(dim) for b in range(a + 1, dim)]


def polygon_seed(body: ConvexBody, n: int, r: int, phase: float = 0.0,
                 plane: Tuple[int, int] = (0, 1), jitter: float = 0.0,
                 rng: Optional[np.random.Generator] = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> Configuration:
    """(n, r) star polygon on a coordinate-plane section, radially projected"""
    a, b = plane
    points = []
    for j in range(n):
        angle = phase + 2.0 * np.pi * r * j / n
        u = np.zeros(body.ambient_dim)
        u[a], u[b] = np.cos(angle), np.sin(angle)
        if jitter and rng is not None:
            u = u + jitter * rng.standard_normal(body.ambient_dim)
        points.append(body.surface_point(radial_point(body, u)))
    return make_configuration(body, points, tol)


def structured_seeds(body: ConvexBody, n: int, r: int, count: int,
                     rng: np.random.Generator, jitter: float = 0.05,
                     tol: Tolerances = DEFAULT_TOLERANCES) -> List[Configuration]:
    """(n, r) polygons on coordinate-plane sections at spread phases, every other one jittered"""
    planes = coordinate_planes(body.ambient_dim)
    per_plane = max(1, math.ceil(count / len(planes)))
    seeds = []
    for i in range(count):
        plane = planes[i % len(planes)]
        k = i // len(planes)
        # one period of the polygon's rotational symmetry
        phase = 2.0 * np.pi * k / (n * per_plane)
        noise = jitter if k % 2 else 0.0
        try:
            seeds.append(polygon_seed(body, n, r, phase, plane, noise, rng, tol))
        except AdjacencyViolation:
            continue
    return seeds


def random_seeds(body: ConvexBody, n: int, count: int, rng: np.random.Generator,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> List[Configuration]:
    """Uniformly random bounce points, radially projected from the interior"""
    seeds = []
    attempts = 0
    while len(seeds) < count and attempts < 20 * count + 20:
        attempts += 1
        directions = rng.standard_normal((n, body.ambient_dim))
        try:
            points = [body.surface_point(radial_point(body, u)) for u in directions]
            seeds.append(make_configuration(body, points, tol))
        except AdjacencyViolation:
            continue
    return seeds


def generate_seeds(body: ConvexBody, n: int, count: int, strategy: str = 'mixed',
                   rng_seed: int = 0, rotation: Optional[int] = None,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> List[Configuration]:
    """Seed list for one search; deterministic given rng_seed"""
    rng = np.random.default_rng(rng_seed)
    if strategy not in ('structured', 'random', 'mixed'):
        raise DomainError(f"Unknown seeding strategy '{strategy}'")
    rotations = [rotation] if rotation else list(range(1, n // 2 + 1))
    seeds: List[Configuration] = []
    if strategy in ('structured', 'mixed'):
        budget = count if strategy == 'structured' else (count + 1) // 2
        per_r = max(1, budget // len(rotations))
        for r in rotations:
            seeds.extend(structured_seeds(body, n, r, per_r, rng, tol=tol))
    if strategy in ('random', 'mixed'):
        seeds.extend(random_seeds(body, n, max(0, count - len(seeds)), rng, tol))
    return seeds


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------

def _capped(config: Configuration, X: np.ndarray) -> np.ndarray:
    cap = STEP_CAP * config.body.diameter
    biggest = float(np.max(np.linalg.norm(X.reshape(config.n, -1), axis=1)))
    return X * (cap / biggest) if biggest > cap else X


def _ascend(config: Configuration, tol: Tolerances, max_iters: int) -> Configuration:
    """Projected gradient ascent with Armijo backtracking, then a Newton polish"""
    body = config.body
    alpha = 0.1 * body.diameter
    polish_failed = False
    for _ in range(max_iters):
        G = gradient(config).components
        residual = float(np.abs(G).max())
        if residual <= tol.critical:
            return config
        if residual <= NEWTON_SWITCH and not polish_failed:
            try:
                return _newton(config, tol, max_iters)
            except (NoConvergence, SeedCollapsed):
                polish_failed = True
        base = length(config)
        step = alpha
        while True:
            X = _capped(config, step * G)
            try:
                trial = displace(config, X, tol)
            except (OutOfChart, AdjacencyViolation):
                trial = None
            if trial is not None and length(trial) >= base + ARMIJO * float(np.sum(G * X)):
                config = trial
                alpha = 2.0 * step
                break
            step *= 0.5
            if step < 1e-14 * body.diameter:
                raise NoConvergence(f"Line search stalled at residual {residual:.3e}")
    raise NoConvergence(f"Ascent did not reach tol_critical in {max_iters} iterations")


def _newton(config: Configuration, tol: Tolerances, max_iters: int) -> Configuration:
    """Levenberg-Marquardt on the tangential gradient, Jacobian = chart Hessian"""
    from .spectral import chart_hessian

    mu = None
    G = gradient(config).flat()
    for _ in range(max_iters):
        if np.abs(G).max() <= tol.critical:
            return config
        H = chart_hessian(config)
        scale = max(1.0, float(np.linalg.norm(H, 2)) ** 2)
        if mu is None:
            mu = 1e-3 * scale
        delta = -np.linalg.solve(H @ H + mu * np.eye(H.shape[0]), H @ G)
        try:
            trial = displace(config, _capped(config, delta), tol)
        except OutOfChart:
            trial = None
        except AdjacencyViolation as e:
            raise SeedCollapsed("Newton iterate left the configuration space", junction=e.junction) from e
        if trial is not None:
            G_trial = gradient(trial).flat()
            if np.linalg.norm(G_trial) < np.linalg.norm(G):
                config, G = trial, G_trial
                mu = max(mu / 10.0, 1e-18 * scale)
                continue
        mu *= 10.0
        if mu > 1e16 * scale:
            raise NoConvergence(f"Damping exploded at residual {np.abs(G).max():.3e}")
    if np.abs(G).max() <= tol.critical:
        return config
    raise NoConvergence(f"Newton did not reach tol_critical in {max_iters} iterations")


def make_orbit(config: Configuration, tol: Tolerances = DEFAULT_TOLERANCES) -> CriticalOrbit:
    """Wrap a (near-)critical configuration with its derived data"""
    rotation = rotation_number(config) if config.body.ambient_dim == 2 else None
    return CriticalOrbit(
        config=config, length=length(config), grad_residual=grad_residual(config),
        canonical_key=canonicalize(config, tol), rotation_number=rotation,
        iteration_order=iteration_order(config, tol),
    )


def _report_failure(seed_index: int, exc: Exception) -> None:
    warn(f"seed {seed_index}: {type(exc).__name__}: {exc}")


def solve_seed(seed: Configuration, mode: str = 'maximize', tol: Tolerances = DEFAULT_TOLERANCES,
               max_iters: int = MAX_ITERS) -> CriticalOrbit:
    """Run one solver from one seed"""
    if mode == 'maximize':
        config = _ascend(seed, tol, max_iters)
    elif mode == 'newton':
        config = _newton(seed, tol, max_iters)
    else:
        raise DomainError(f"Unknown solver mode '{mode}' (expected maximize or newton)")
    return make_orbit(config, tol)


def find_critical(body: ConvexBody, n: int, seeds: Sequence[Configuration], mode: str = 'maximize',
                  tol: Tolerances = DEFAULT_TOLERANCES, max_iters: int = MAX_ITERS,
                  on_failure: Optional[Callable[[int, Exception], None]] = None,
                  workers: int = 1, primitive_only: bool = False,
                  reduce_symmetry: bool = True) -> List[CriticalOrbit]:
    """Critical points of L_n reached from the seeds, deduplicated in seed order"""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if mode not in ('maximize', 'newton'):
        raise DomainError(f"Unknown solver mode '{mode}' (expected maximize or newton)")
    on_failure = on_failure or _report_failure

    def attempt(item):
        index, seed = item
        if seed.n != n:
            return index, DomainError(f"seed has {seed.n} points, expected {n}")
        try:
            return index, solve_seed(seed, mode, tol, max_iters)
        except BilliardError as e:
            return index, e

    items = list(enumerate(seeds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(attempt, items))
    else:
        results = [attempt(item) for item in items]

    solved: List[CriticalOrbit] = []
    failures = 0
    for index, outcome in results:
        if isinstance(outcome, Exception):
            failures += 1
            on_failure(index, outcome)
            continue
        if outcome.grad_residual > tol.critical:
            failures += 1
            on_failure(index, NoConvergence(f"residual {outcome.grad_residual:.3e} above tolerance"))
            continue
        if primitive_only and outcome.iteration_order > 1:
            continue
        solved.append(outcome)

    found = deduplicate(solved, tol, reduce_symmetry)
    info(f"find_critical n={n} mode={mode}: {len(found)} orbit(s) from {len(seeds)} seed(s), {failures} failure(s)")
    return found


def deduplicate(orbits: Sequence[CriticalOrbit], tol: Tolerances = DEFAULT_TOLERANCES,
                reduce_symmetry: bool = True) -> List[CriticalOrbit]:
    """First representative of each orbit, in input order.

    On bodies with a continuous symmetry only one orbit per congruence class
    is kept, and symmetry_class numbers the classes.
    """
    found: List[CriticalOrbit] = []
    classes: List[CriticalOrbit] = []
    for orbit in orbits:
        if any(not distinct(orbit, kept, tol) for kept in found):
            continue
        body = orbit.body
        if reduce_symmetry and body.symmetry == 'orthogonal':
            scale = body.diameter ** 2
            if any(gram_invariant_distance(orbit.config, rep.config) <= 1e-6 * scale for rep in classes):
                continue
            classes.append(orbit)
            orbit = replace(orbit, symmetry_class=len(classes) - 1)
        found.append(orbit)
    return found


def reflow_deviation(orbit: CriticalOrbit) -> float:
    """Replay the orbit with the billiard flow and return the largest bounce mismatch"""
    config = orbit.config
    q0, q1 = config.points[0], config.points[1]
    d0 = q1.coords - q0.coords
    bounces = billiard_flow(config.body, q0, d0 / np.linalg.norm(d0), config.n)
    expected = np.roll(config.coords, -1, axis=0)
    return float(np.max(np.linalg.norm(np.array([b.coords for b in bounces]) - expected, axis=1)))


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def orbit_to_record(orbit: CriticalOrbit) -> Dict[str, Any]:
    record = {
        'body': orbit.body.describe(),
        'n': orbit.n,
        'points': orbit.config.coords.tolist(),
        'length': orbit.length,
        'grad_residual': orbit.grad_residual,
        'canonical_key': [list(row) for row in orbit.canonical_key],
        'iteration_order': orbit.iteration_order,
    }
    if orbit.rotation_number is not None:
        record['rotation_number'] = orbit.rotation_number
    if orbit.symmetry_class is not None:
        record['symmetry_class'] = orbit.symmetry_class
    return record


def orbit_from_record(body: ConvexBody, record: Dict[str, Any],
                      tol: Tolerances = DEFAULT_TOLERANCES) -> CriticalOrbit:
    config = make_configuration(body, [np.asarray(p, dtype=float) for p in record['points']], tol)
    orbit = make_orbit(config, tol)
    if record.get('symmetry_class') is not None:
        orbit = replace(orbit, symmetry_class=int(record['symmetry_class']))
    return orbit
