#!/usr/bin/env python3.11
"""
Geometry of strictly convex billiard tables.

A table boundary S is the zero set of a level function F with F < 0 inside.
This module provides the body type, surface points, tangent charts, the
ray-surface intersection, specular reflection and the billiard flow built
from them. All types are immutable after construction.
"""

import importlib
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DomainError, GrazingRay, NoConvergence, NonUnitVector,
    NotStrictlyConvex, OffSurface, OutOfChart, RunConfigError,
)

# Default tolerances (surface and adjacency scale with the body diameter)
TOL_SURFACE = 1e-10
TOL_GRAZING = 1e-8
TOL_UNIT = 1e-10
RETRACTION_MAX_STEPS = 50
RAY_MAX_ITERS = 200

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Implicitly described smooth strictly convex hypersurface in R^{N+1}"""
    ambient_dim: int
    level_function: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    interior_point: np.ndarray
    name: str = 'custom'
    params: Tuple[float, ...] = ()
    diameter: float = 2.0
    symmetry: Optional[str] = None
    orientation: float = 1.0

    @property
    def N(self) -> int:
        """Dimension of the hypersurface"""
        return self.ambient_dim - 1

    @property
    def tol_surface(self) -> float:
        return TOL_SURFACE * self.diameter

    def F(self, x: np.ndarray) -> float:
        return self.orientation * float(self.level_function(np.asarray(x, dtype=float)))

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.orientation * np.asarray(self.gradient(np.asarray(x, dtype=float)), dtype=float)

    def hess(self, x: np.ndarray) -> np.ndarray:
        h = self.orientation * np.asarray(self.hessian(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (h + h.T)

    def unit_normal(self, x: np.ndarray) -> np.ndarray:
        g = self.grad(x)
        norm = np.linalg.norm(g)
        if norm == 0.0 or not np.isfinite(norm):
            raise OffSurface(f"Vanishing gradient at {np.asarray(x).tolist()}")
        return g / norm

    def surface_point(self, x: Sequence[float], check: bool = True) -> 'SurfacePoint':
        """Wrap coordinates as a SurfacePoint, verifying the level residual"""
        coords = np.array(x, dtype=float)
        if coords.shape != (self.ambient_dim,):
            raise DomainError(f"Expected a point in R^{self.ambient_dim}, got shape {coords.shape}")
        residual = abs(self.F(coords))
        if check and residual > self.tol_surface:
            raise OffSurface(f"Point {coords.tolist()} is off the surface (|F| = {residual:.3e})")
        coords.setflags(write=False)
        normal = self.unit_normal(coords)
        normal.setflags(write=False)
        return SurfacePoint(coords=coords, unit_outward_normal=normal, on_surface_residual=residual)

    def describe(self) -> Dict[str, Any]:
        return {'name': self.name, 'params': [float(p) for p in self.params]}


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    coords: np.ndarray
    unit_outward_normal: np.ndarray
    on_surface_residual: float

    @property
    def normal(self) -> np.ndarray:
        return self.unit_outward_normal


@dataclass(frozen=True, eq=False)
class Chart:
    """Tangent-plane chart at a base point, retracted to S along the base normal"""
    body: ConvexBody
    base: SurfacePoint
    tangent_basis: np.ndarray  # (N+1) x N, orthonormal columns
    retraction_tol: float
    validity_radius: float


# ---------------------------------------------------------------------------
# Built-in bodies and plug-ins
# ---------------------------------------------------------------------------

def _orient(body: ConvexBody) -> ConvexBody:
    """Flip the level function globally if its gradient points inward"""
    axis = np.zeros(body.ambient_dim)
    axis[0] = 1.0
    p = radial_point(body, axis)
    g = np.asarray(body.gradient(p), dtype=float)
    if float(np.dot(g, p - body.interior_point)) > 0:
        return body
    return ConvexBody(
        ambient_dim=body.ambient_dim, level_function=body.level_function,
        gradient=body.gradient, hessian=body.hessian,
        interior_point=body.interior_point, name=body.name, params=body.params,
        diameter=body.diameter, symmetry=body.symmetry, orientation=-1.0,
    )


def from_callables(F: Callable, grad: Callable, hess: Callable,
                   interior_point: Sequence[float], name: str = 'custom',
                   params: Sequence[float] = (), diameter: Optional[float] = None,
                   symmetry: Optional[str] = None) -> ConvexBody:
    """Build a body from a callable triple (F, grad, hess) and an interior point"""
    interior = np.array(interior_point, dtype=float)
    interior.setflags(write=False)
    body = ConvexBody(
        ambient_dim=int(interior.shape[0]), level_function=F, gradient=grad,
        hessian=hess, interior_point=interior, name=name,
        params=tuple(float(p) for p in params),
        diameter=float(diameter) if diameter else 1.0, symmetry=symmetry,
    )
    if body.F(interior) == 0.0:
        raise DomainError("Interior point lies on the surface")
    if diameter is None:
        body = _with_estimated_diameter(body)
    return _orient(body)


def _with_estimated_diameter(body: ConvexBody) -> ConvexBody:
    dim = body.ambient_dim
    radii = []
    directions = list(np.eye(dim)) + list(-np.eye(dim))
    directions.append(np.ones(dim) / np.sqrt(dim))
    directions.append(-np.ones(dim) / np.sqrt(dim))
    for u in directions:
        p = radial_point(body, u)
        radii.append(np.linalg.norm(p - body.interior_point))
    return ConvexBody(
        ambient_dim=dim, level_function=body.level_function,
        gradient=body.gradient, hessian=body.hessian,
        interior_point=body.interior_point, name=body.name, params=body.params,
        diameter=2.0 * float(max(radii)), symmetry=body.symmetry,
        orientation=body.orientation,
    )


def ellipsoid(*semi_axes: float) -> ConvexBody:
    """Axis-aligned ellipsoid sum (x_i/a_i)^2 = 1"""
    a = np.array(semi_axes, dtype=float)
    if a.size < 2 or np.any(a <= 0):
        raise DomainError(f"ellipsoid needs at least two positive semi-axes, got {list(semi_axes)}")
    inv2 = 1.0 / a ** 2
    symmetry = 'orthogonal' if np.allclose(a, a[0], rtol=0, atol=0) else None
    return ConvexBody(
        ambient_dim=a.size,
        level_function=lambda x: float(np.dot(inv2, x * x) - 1.0),
        gradient=lambda x: 2.0 * inv2 * x,
        hessian=lambda x: np.diag(2.0 * inv2),
        interior_point=np.zeros(a.size),
        name='ellipsoid' if a.size > 2 else 'ellipse',
        params=tuple(a.tolist()), diameter=2.0 * float(a.max()), symmetry=symmetry,
    )


def sphere(radius: float = 1.0, dim: int = 3) -> ConvexBody:
    """Round sphere of the given radius in R^dim"""
    if radius <= 0 or int(dim) < 2:
        raise DomainError(f"sphere needs radius > 0 and dim >= 2, got {radius}, {dim}")
    dim = int(dim)
    r2 = float(radius) ** 2
    return ConvexBody(
        ambient_dim=dim,
        level_function=lambda x: float(np.dot(x, x) / r2 - 1.0),
        gradient=lambda x: 2.0 * x / r2,
        hessian=lambda x: 2.0 * np.eye(dim) / r2,
        interior_point=np.zeros(dim),
        name='circle' if dim == 2 else 'sphere',
        params=(float(radius),) if dim == 2 else (float(radius), float(dim)),
        diameter=2.0 * float(radius), symmetry='orthogonal',
    )


def circle(radius: float = 1.0) -> ConvexBody:
    return sphere(radius, 2)


def superellipsoid(exponent: float, *semi_axes: float) -> ConvexBody:
    """sum (x_i/a_i)^p = 1 for an even exponent p >= 2"""
    p = int(exponent)
    if p != exponent or p < 2 or p % 2:
        raise DomainError(f"superellipsoid exponent must be an even integer >= 2, got {exponent}")
    a = np.array(semi_axes, dtype=float)
    if a.size < 2 or np.any(a <= 0):
        raise DomainError(f"superellipsoid needs at least two positive semi-axes, got {list(semi_axes)}")
    if p == 2:
        return ellipsoid(*semi_axes)
    return ConvexBody(
        ambient_dim=a.size,
        level_function=lambda x: float(np.sum((x / a) ** p) - 1.0),
        gradient=lambda x: p * (x / a) ** (p - 1) / a,
        hessian=lambda x: np.diag(p * (p - 1) * (x / a) ** (p - 2) / a ** 2),
        interior_point=np.zeros(a.size),
        name='superellipsoid', params=(float(p),) + tuple(a.tolist()),
        diameter=2.0 * float(np.linalg.norm(a)),
    )


_BODY_FACTORIES: Dict[str, Callable[..., ConvexBody]] = {
    'circle': circle,
    'sphere': sphere,
    'ellipse': ellipsoid,
    'ellipsoid': ellipsoid,
    'superellipsoid': superellipsoid,
}


def register_body(name: str, factory: Callable[..., ConvexBody]) -> None:
    """Register a named body factory taking positional float parameters"""
    _BODY_FACTORIES[name] = factory


def available_bodies() -> List[str]:
    return sorted(_BODY_FACTORIES)


def load_plugin_body(plugin: str, params: Sequence[float] = ()) -> ConvexBody:
    """Resolve "module:callable" returning a ConvexBody or (F, grad, hess[, interior])"""
    if ':' not in plugin:
        raise RunConfigError(f"Plug-in id must look like 'module:callable', got '{plugin}'")
    module_name, attr = plugin.split(':', 1)
    try:
        factory = getattr(importlib.import_module(module_name), attr)
    except (ImportError, AttributeError) as e:
        raise RunConfigError(f"Cannot load body plug-in '{plugin}': {e}") from e

    result = factory(*params)
    if isinstance(result, ConvexBody):
        return result
    if isinstance(result, tuple) and len(result) in (3, 4):
        if len(result) == 4:
            interior = result[3]
        else:
            dim = getattr(factory, 'ambient_dim', None)
            if dim is None:
                raise RunConfigError(
                    f"Plug-in '{plugin}' returned a bare triple; set {attr}.ambient_dim or return an interior point")
            interior = np.zeros(int(dim))
        return from_callables(result[0], result[1], result[2], interior,
                              name=plugin, params=params)
    raise RunConfigError(f"Plug-in '{plugin}' must return a ConvexBody or (F, grad, hess[, interior])")


def make_body(name: str, params: Sequence[float] = (), plugin: Optional[str] = None) -> ConvexBody:
    """Build a body from a name plus parameter list, e.g. ("ellipsoid", [1, 1.3, 1.7])"""
    if plugin:
        return load_plugin_body(plugin, params)
    factory = _BODY_FACTORIES.get(name)
    if factory is None:
        raise RunConfigError(f"Unknown body '{name}' (available: {', '.join(available_bodies())})")
    try:
        return factory(*[float(p) for p in params])
    except TypeError as e:
        raise RunConfigError(f"Bad parameters for body '{name}': {list(params)} ({e})") from e


def parse_body_spec(spec: str) -> ConvexBody:
    """Parse a compact body string such as "ellipsoid 1 1.3 1.7" or "pkg.mod:factory 2" """
    tokens = spec.split()
    if not tokens:
        raise RunConfigError("Empty body specification")
    params = [float(t) for t in tokens[1:]]
    if ':' in tokens[0]:
        return make_body(tokens[0], params, plugin=tokens[0])
    return make_body(tokens[0], params)


# ---------------------------------------------------------------------------
# Projections, charts, curvature
# ---------------------------------------------------------------------------

def project_tangent(body: ConvexBody, p: SurfacePoint, v: Sequence[float]) -> np.ndarray:
    """Orthogonal projection of an ambient vector onto T_p S"""
    n = p.unit_outward_normal
    v = np.asarray(v, dtype=float)
    return v - np.dot(v, n) * n


def project_chord_orthogonal(u: Sequence[float], v: Sequence[float]) -> np.ndarray:
    """Orthogonal projection onto the complement of the unit vector u"""
    u = np.asarray(u, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > TOL_UNIT:
        raise NonUnitVector(f"Chord direction has norm {np.linalg.norm(u):.12g}")
    v = np.asarray(v, dtype=float)
    return v - np.dot(v, u) * u


def tangent_basis(normal: np.ndarray) -> np.ndarray:
    """Orthonormal tangent frame from the axes most transverse to the normal"""
    dim = normal.shape[0]
    order = np.argsort(np.abs(normal), kind='stable')[:dim - 1]
    basis: List[np.ndarray] = []
    for axis in order:
        e = np.zeros(dim)
        e[axis] = 1.0
        for _ in range(2):
            e = e - np.dot(e, normal) * normal
            for b in basis:
                e = e - np.dot(e, b) * b
        basis.append(e / np.linalg.norm(e))
    E = np.column_stack(basis)
    E.setflags(write=False)
    return E


def shape_operator(body: ConvexBody, p: SurfacePoint, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Second fundamental form w.r.t. the outward normal, in a tangent frame"""
    E = tangent_basis(p.unit_outward_normal) if basis is None else basis
    g = np.linalg.norm(body.grad(p.coords))
    II = E.T @ body.hess(p.coords) @ E / g
    return 0.5 * (II + II.T)


def check_strict_convexity(body: ConvexBody, p: SurfacePoint, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Return the principal curvatures at p, raising if any is not positive"""
    curvatures = np.linalg.eigvalsh(shape_operator(body, p, basis))
    floor = 1e-10 / body.diameter
    if curvatures.size and curvatures.min() <= floor:
        raise NotStrictlyConvex(
            f"Shape operator not positive definite at {p.coords.tolist()} "
            f"(min curvature {curvatures.min():.3e})")
    return curvatures


def make_chart(body: ConvexBody, p: SurfacePoint, validity_radius: Optional[float] = None,
               check_convexity: bool = True) -> Chart:
    """Chart at p: tangent coordinates retracted along the normal line of p"""
    E = tangent_basis(p.unit_outward_normal)
    if check_convexity:
        check_strict_convexity(body, p, E)
    radius = 0.25 * body.diameter if validity_radius is None else float(validity_radius)
    return Chart(body=body, base=p, tangent_basis=E,
                 retraction_tol=10.0 * body.tol_surface, validity_radius=radius)


def chart_to_surface(chart: Chart, x: Sequence[float]) -> SurfacePoint:
    """Map tangent coordinates to S by Newton along the base normal"""
    body = chart.body
    x = np.asarray(x, dtype=float).reshape(-1)
    if np.linalg.norm(x) > chart.validity_radius:
        raise OutOfChart(f"|x| = {np.linalg.norm(x):.3e} exceeds chart radius {chart.validity_radius:.3e}")
    n = chart.base.unit_outward_normal
    y = chart.base.coords + chart.tangent_basis @ x
    s = 0.0
    step_floor = 8.0 * _EPS * body.diameter
    for _ in range(RETRACTION_MAX_STEPS):
        point = y + s * n
        value = body.F(point)
        slope = float(np.dot(body.grad(point), n))
        if slope <= 0.0:
            raise OutOfChart("Normal line of the chart no longer crosses the surface transversally")
        delta = value / slope
        s -= delta
        if abs(s) > chart.validity_radius:
            raise OutOfChart(f"Retraction left the chart (normal offset {s:.3e})")
        if abs(delta) <= step_floor:
            break
    else:
        if abs(body.F(y + s * n)) > body.tol_surface:
            raise OutOfChart(f"Retraction did not converge in {RETRACTION_MAX_STEPS} steps")
    try:
        return body.surface_point(y + s * n)
    except OffSurface as e:
        raise OutOfChart(str(e)) from e


def surface_to_chart(chart: Chart, p: SurfacePoint) -> np.ndarray:
    """Tangent coordinates of a surface point in the chart"""
    coords = p.coords if isinstance(p, SurfacePoint) else np.asarray(p, dtype=float)
    return chart.tangent_basis.T @ (coords - chart.base.coords)


# ---------------------------------------------------------------------------
# Rays and reflection
# ---------------------------------------------------------------------------

def _as_surface_point(body: ConvexBody, p) -> SurfacePoint:
    return p if isinstance(p, SurfacePoint) else body.surface_point(p)


def _check_unit(d: np.ndarray, what: str = "Direction") -> None:
    if abs(np.linalg.norm(d) - 1.0) > TOL_UNIT:
        raise NonUnitVector(f"{what} has norm {np.linalg.norm(d):.12g}")


def _root_on_ray(body: ConvexBody, origin: np.ndarray, d: np.ndarray,
                 lo: float, hi: float, max_iters: int) -> float:
    """Safeguarded Newton/bisection for F(origin + t d) = 0 on a sign-change bracket"""
    g = lambda t: body.F(origin + t * d)
    outside = 1.0 if g(hi) > 0 else -1.0
    t = 0.5 * (lo + hi)
    target = 1e-3 * body.tol_surface
    for _ in range(max_iters):
        value = g(t)
        if abs(value) <= target:
            return t
        if value * outside < 0:
            lo = t
        else:
            hi = t
        if hi - lo <= 4.0 * _EPS * max(hi, 1.0):
            return t
        slope = float(np.dot(body.grad(origin + t * d), d))
        candidate = t - value / slope if slope != 0.0 else np.nan
        if not np.isfinite(candidate) or candidate <= lo or candidate >= hi:
            candidate = 0.5 * (lo + hi)
        t = candidate
    if abs(g(t)) <= body.tol_surface:
        return t
    raise NoConvergence(f"Ray root not resolved in {max_iters} iterations (|F| = {abs(g(t)):.3e})")


def radial_point(body: ConvexBody, direction: Sequence[float]) -> np.ndarray:
    """Surface point hit by the ray from the interior point along direction"""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    c = body.interior_point
    inside = body.F(c)
    hi = 0.5 * body.diameter
    for _ in range(64):
        if body.F(c + hi * u) * inside < 0:
            break
        hi *= 2.0
    else:
        raise NoConvergence("Radial ray never leaves the body")
    t = _root_on_ray(body, c, u, 0.0, hi, RAY_MAX_ITERS)
    return c + t * u


def ray_intersect(body: ConvexBody, p: SurfacePoint, d: Sequence[float],
                  max_iters: int = RAY_MAX_ITERS) -> SurfacePoint:
    """Second intersection of the inward ray p + t d (t > 0) with S"""
    p = _as_surface_point(body, p)
    d = np.asarray(d, dtype=float)
    _check_unit(d)
    if float(np.dot(d, p.unit_outward_normal)) >= -TOL_GRAZING:
        raise GrazingRay(f"Ray is not strictly inward (<d, n> = {np.dot(d, p.unit_outward_normal):.3e})")

    origin = p.coords
    hi = body.diameter
    for _ in range(64):
        if body.F(origin + hi * d) > 0:
            break
        hi *= 2.0
    else:
        raise NoConvergence("Ray never leaves the body")
    # dyadic search for an interior sample below the exit point
    lo = 0.5 * hi
    for _ in range(80):
        if body.F(origin + lo * d) < 0:
            break
        lo *= 0.5
    else:
        raise GrazingRay("Chord too short to bracket")
    t = _root_on_ray(body, origin, d, lo, hi, max_iters)
    return body.surface_point(origin + t * d)


def reflect(p: SurfacePoint, d: Sequence[float]) -> np.ndarray:
    """Specular reflection of an incoming direction at p"""
    d = np.asarray(d, dtype=float)
    n = p.unit_outward_normal
    dn = float(np.dot(d, n))
    if abs(dn) <= TOL_GRAZING:
        raise GrazingRay(f"Grazing incidence (<d, n> = {dn:.3e})")
    if dn < 0:
        raise DomainError("Incoming direction must point outward at the bounce point")
    return d - 2.0 * dn * n


def billiard_flow(body: ConvexBody, p0, d0: Sequence[float], k: int) -> List[SurfacePoint]:
    """The first k bounce points of the billiard trajectory leaving p0 along d0"""
    if k < 1:
        raise DomainError(f"Bounce count must be >= 1, got {k}")
    p = _as_surface_point(body, p0)
    d = np.asarray(d0, dtype=float)
    bounces: List[SurfacePoint] = []
    for i in range(k):
        try:
            q = ray_intersect(body, p, d)
            d = reflect(q, d)
        except GrazingRay as e:
            raise GrazingRay(str(e), bounce_index=i) from e
        except NoConvergence as e:
            raise NoConvergence(str(e), bounce_index=i) from e
        bounces.append(q)
        p = q
    return bounces


def planarity_residual(points: Sequence[SurfacePoint], p0, d0: Sequence[float]) -> float:
    """Largest distance of the points from span(p0, d0)"""
    x0 = p0.coords if isinstance(p0, SurfacePoint) else np.asarray(p0, dtype=float)
    Q, _ = np.linalg.qr(np.column_stack([x0, np.asarray(d0, dtype=float)]))
    worst = 0.0
    for q in points:
        x = q.coords if isinstance(q, SurfacePoint) else np.asarray(q, dtype=float)
        worst = max(worst, float(np.linalg.norm(x - Q @ (Q.T @ x))))
    return worst
