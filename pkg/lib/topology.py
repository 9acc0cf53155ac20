#!/usr/bin/env python3.11
"""
Topology side of the iteration theory.

Poincaré polynomials of cyclic configuration spaces of spheres (plain and
dihedral-equivariant, Z_2 coefficients) in factored and rational form,
membership in the epsilon-thickened configuration space, and the lift of a
path of configurations to a path of m-fold iterated configurations together
with its length lower bound.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .configuration import (
    DEFAULT_TOLERANCES, Configuration, Tolerances, check_adjacency, iterate,
    length, make_configuration,
)
from .errors import AdjacencyViolation, DomainError
from .geometry import ConvexBody, radial_point

LOG_SLACK = 1e-12
ESTIMATE_SLACK = 1e-9

_t = sympy.Symbol('t')


@dataclass(frozen=True)
class PoincarePolynomial:
    """Degree-indexed Betti numbers"""
    coeffs: Tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def evaluate(self, t: int) -> int:
        return sum(c * t ** k for k, c in enumerate(self.coeffs))

    def rank_sum(self, upto: int) -> int:
        """Sum of the coefficients of t^0 ... t^upto"""
        return sum(self.coeffs[:upto + 1])

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            monomial = '' if k == 0 else ('t' if k == 1 else f"t^{k}")
            if not monomial:
                terms.append(str(c))
            else:
                terms.append(monomial if c == 1 else f"{c}{monomial}")
        return ' + '.join(terms) if terms else '0'


@dataclass(frozen=True, eq=False)
class BangertPath:
    samples: Tuple[Configuration, ...]
    m: int
    lifted: Tuple[Configuration, ...]
    parameters: Tuple[float, ...] = field(default=())


def _poly(coeffs: Sequence[int]) -> PoincarePolynomial:
    values = [int(c) for c in coeffs]
    while len(values) > 1 and values[-1] == 0:
        values.pop()
    return PoincarePolynomial(coeffs=tuple(values))


def _geometric(step: int, terms: int) -> np.ndarray:
    """Coefficients of sum_{j < terms} t^(step j)"""
    c = np.zeros(step * (terms - 1) + 1, dtype=np.int64)
    c[::step] = 1
    return c


def _sphere_factor(N: int) -> np.ndarray:
    """Coefficients of t^N + 1"""
    c = np.zeros(N + 1, dtype=np.int64)
    c[0] = c[N] = 1
    return c


def betti_polynomial(N: int, n: int) -> PoincarePolynomial:
    """(t^N + 1) sum_{j=0}^{n-2} t^((N-1) j) for Conf_n(S^N)"""
    if N < 2:
        raise DomainError(f"betti_polynomial needs N >= 2, got N={N}")
    if n < 2:
        raise DomainError(f"betti_polynomial needs n >= 2, got n={n}")
    return _poly(np.convolve(_sphere_factor(N), _geometric(N - 1, n - 1)))


def equivariant_polynomial(N: int, n: int) -> PoincarePolynomial:
    """Dihedral-equivariant polynomial, defined for N >= 3 and odd n >= 3"""
    if N < 3:
        raise DomainError(f"equivariant_polynomial needs N >= 3, got N={N}")
    if n < 3 or n % 2 == 0:
        raise DomainError(f"equivariant_polynomial needs an odd n >= 3, got n={n}")
    factor = np.convolve(_geometric(2 * (N - 1), (n - 1) // 2), _geometric(1, N))
    return _poly(np.convolve(factor, _sphere_factor(N)))


def _exact_quotient(numerator, denominator) -> PoincarePolynomial:
    quotient, remainder = sympy.div(sympy.Poly(numerator, _t), sympy.Poly(denominator, _t))
    if not remainder.is_zero:
        raise DomainError(f"Rational form does not divide exactly (remainder {remainder.as_expr()})")
    return _poly(int(c) for c in reversed(quotient.all_coeffs()))


def betti_rational(N: int, n: int) -> PoincarePolynomial:
    if N < 2 or n < 2:
        raise DomainError(f"betti_rational needs N >= 2 and n >= 2, got N={N}, n={n}")
    t = _t
    return _exact_quotient((t ** N + 1) * (t ** ((n - 1) * (N - 1)) - 1), t ** (N - 1) - 1)


def equivariant_rational(N: int, n: int) -> PoincarePolynomial:
    if N < 3 or n < 3 or n % 2 == 0:
        raise DomainError(f"equivariant_rational needs N >= 3 and odd n >= 3, got N={N}, n={n}")
    t = _t
    numerator = (t ** ((n - 1) * (N - 1)) - 1) * (t ** N - 1) * (t ** N + 1)
    return _exact_quotient(numerator, (t ** (2 * (N - 1)) - 1) * (t - 1))


def rank_sum(poly: PoincarePolynomial, upto: int) -> int:
    return poly.rank_sum(upto)


# ---------------------------------------------------------------------------
# Thickened configuration space
# ---------------------------------------------------------------------------

def log_chord_product(config: Configuration) -> float:
    return math.fsum(math.log(float(c)) for c in np.linalg.norm(config.chords(), axis=1))


def epsilon_membership(config: Configuration, epsilon: float) -> bool:
    """Whether prod_j |q_j - q_{j-1}| >= epsilon^n"""
    if epsilon <= 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    target = config.n * math.log(epsilon)
    return log_chord_product(config) >= target - LOG_SLACK * max(1.0, abs(target))


# ---------------------------------------------------------------------------
# Paths and their iterated lift
# ---------------------------------------------------------------------------

def bangert_lift(path: Sequence[Configuration], m: int,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> BangertPath:
    """Samplewise lift of a path in Conf_n to a path in Conf_{nm} between iterates"""
    if m < 1:
        raise DomainError(f"Iteration order must be >= 1, got {m}")
    samples = tuple(path)
    if len(samples) < 2:
        raise DomainError("A path needs at least two samples")
    n = samples[0].n
    if any(s.n != n for s in samples):
        raise DomainError("All path samples must have the same number of points")
    S = len(samples)
    ys = [s / (S - 1) for s in range(S)]
    if m == 1:
        return BangertPath(samples=samples, m=1, lifted=samples, parameters=tuple(ys))

    q0, q1 = samples[0].points, samples[-1].points
    lifted: List[Configuration] = []
    xs: List[float] = []
    for k in range(m):
        for s, sample in enumerate(samples):
            if k > 0 and s == 0:
                continue  # same configuration as the last sample of block k-1
            config = Configuration(body=sample.body, points=q1 * k + sample.points + q0 * (m - k - 1))
            try:
                check_adjacency(config, tol)
            except AdjacencyViolation as e:
                raise AdjacencyViolation("Lifted configuration leaves Conf_nm",
                                         junction=e.junction, sample=len(lifted)) from e
            lifted.append(config)
            xs.append((k + ys[s]) / m)
    return BangertPath(samples=samples, m=m, lifted=tuple(lifted), parameters=tuple(xs))


def check_estimate(lift: BangertPath) -> List[Dict[str, Any]]:
    """Per-sample lengths of the lift against both lower bounds"""
    m = lift.m
    L0 = length(lift.samples[0])
    L1 = length(lift.samples[-1])
    bound = (m - 3) * min(L0, L1)
    S = len(lift.samples)
    rows = []
    for i, (x, config) in enumerate(zip(lift.parameters, lift.lifted)):
        k = 0 if i < S else min(m - 1, 1 + (i - S) // (S - 1))
        value = length(config)
        intermediate = (k - 1) * L1 + (m - k - 2) * L0
        rows.append({
            'x': x, 'k': k, 'length': value, 'intermediate': intermediate, 'bound': bound,
            'intermediate_ok': value >= intermediate - ESTIMATE_SLACK * max(1.0, abs(value)),
            'ok': value >= bound - ESTIMATE_SLACK * max(1.0, abs(value)),
        })
    return rows


def lift_endpoints_ok(lift: BangertPath, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Lifted endpoints equal the m-fold iterates of the path endpoints"""
    first = iterate(lift.samples[0], lift.m).coords
    last = iterate(lift.samples[-1], lift.m).coords
    return (np.max(np.abs(lift.lifted[0].coords - first)) <= tol.geo
            and np.max(np.abs(lift.lifted[-1].coords - last)) <= tol.geo)


def angle_path(body: ConvexBody, start_angles: Sequence[float], end_angles: Sequence[float],
               samples: int = 64, plane: Tuple[int, int] = (0, 1), lift_axis: Optional[int] = None,
               lift_height: float = 0.8, tol: Tolerances = DEFAULT_TOLERANCES) -> List[Configuration]:
    """Linear interpolation of polar angles in a coordinate plane, radially projected.

    With lift_axis set, point j is pushed off the plane by
    sin(pi t) * lift_height * c_j along that axis, with c_j distinct for all j,
    so that points sharing an angle mid-path stay apart.
    """
    a = np.asarray(start_angles, dtype=float)
    b = np.asarray(end_angles, dtype=float)
    if a.shape != b.shape:
        raise DomainError("Start and end angle lists must have the same length")
    n = a.size
    heights = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
    path = []
    for s in range(samples):
        t = s / (samples - 1)
        theta = (1.0 - t) * a + t * b
        points = []
        for j in range(n):
            u = np.zeros(body.ambient_dim)
            u[plane[0]], u[plane[1]] = np.cos(theta[j]), np.sin(theta[j])
            if lift_axis is not None:
                u[lift_axis] = math.sin(math.pi * t) * lift_height * heights[j]
            points.append(body.surface_point(radial_point(body, u)))
        path.append(make_configuration(body, points, tol))
    return path


def standard_paths(body: ConvexBody, samples: int = 64) -> Dict[str, List[Configuration]]:
    """Named test paths: within one winding class on plane tables, across classes in higher dimension"""
    pi = math.pi
    paths = {
        'diameter-rotation': angle_path(body, [0.0, pi], [pi / 2, 3 * pi / 2], samples),
        'triangle-squeeze': angle_path(body, [0.0, 2 * pi / 3, 4 * pi / 3], [0.0, pi / 2, pi], samples),
        'square-rectangle': angle_path(body, [0.0, pi / 2, pi, 3 * pi / 2],
                                       [0.0, pi / 3, pi, 4 * pi / 3], samples),
    }
    if body.ambient_dim >= 3:
        paths['diameter3-triangle2'] = angle_path(
            body, [j * pi for j in range(6)], [j * 2 * pi / 3 for j in range(6)], samples, lift_axis=2)
        paths['pentagon-star'] = angle_path(
            body, [j * 2 * pi / 5 for j in range(5)], [j * 4 * pi / 5 for j in range(5)], samples, lift_axis=2)
    return paths
