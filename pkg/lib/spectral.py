#!/usr/bin/env python3.11
"""
Second variation of the length functional and its iteration theory.

The Hessian of L_n at a critical configuration is a cyclic block-tridiagonal
operator in per-point tangent frames. Twisting the wrap-around blocks by a
unit complex z gives the operator on z-periodic sequences, whose eigencounts
are the twisted indices. The monodromy of the kernel recursion locates the
Poincaré points, and everything else (Bott splitting, mean indices, the
iteration inequalities and the semicontinuity scan) is built on those two.
"""

import cmath
import math
import threading
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import sympy

from .common import warn, info
from .configuration import (
    DEFAULT_TOLERANCES, Configuration, CriticalOrbit, Tolerances, bisector_defects,
    chord_units, config_frames, grad_residual, iterate,
)
from .errors import (
    BilliardError, DomainError, EigenFailure, InconclusiveJump, NonUnitTwist,
    NotCritical, TransferSingular,
)
from .geometry import chart_to_surface, make_chart

ZERO_THRESHOLD = 1e-7
TOL_CIRCLE = 1e-7
TOL_TWIST = 1e-12
CLUSTER_TOL = 1e-5
AMBIGUOUS_BAND = 1e-4
CANDIDATE_BAND = 1e-2
MERGE_TOL = 1e-2
KERNEL_GAP = 1e-5
SCAN_POINTS = 64
BISECT_TOL = 1e-13

TRANSFER_COND_MAX = 1e12
FD_STEP = 1e-4
QUADRATURE_POINTS = 1024
MIN_ARC = 1e-6
BOUND_SLACK = 1e-9

_THIN_GAP_REPORTED: "weakref.WeakSet[HessianOperator]" = weakref.WeakSet()
_THIN_GAP_LOCK = threading.Lock()


@dataclass(frozen=True, eq=False)
class HessianOperator:
    """Hessian of L_n at a critical configuration, in fixed tangent frames"""
    config: Configuration
    frames: Tuple[np.ndarray, ...]
    diagonal_blocks: Tuple[np.ndarray, ...]
    couplings: Tuple[np.ndarray, ...]  # block (j, j+1)
    real_matrix: np.ndarray
    difference_matrix: np.ndarray
    fd_matrix: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def N(self) -> int:
        return self.config.body.N

    @property
    def dimension(self) -> int:
        return self.n * self.N

    def block(self, i: int, j: int) -> np.ndarray:
        N = self.N
        return self.real_matrix[i * N:(i + 1) * N, j * N:(j + 1) * N]

    def symmetry_error(self) -> float:
        return float(np.linalg.norm(self.real_matrix - self.real_matrix.T, 2))

    def oracle_error(self) -> Optional[float]:
        """Relative distance of real_matrix from the finite-difference Hessian"""
        if self.fd_matrix is None:
            return None
        return float(np.linalg.norm(self.real_matrix - self.fd_matrix) / max(np.linalg.norm(self.fd_matrix), 1e-300))

    def difference_gap(self) -> Optional[float]:
        """Relative distance of the bare difference operator from the oracle"""
        if self.fd_matrix is None:
            return None
        return float(np.linalg.norm(self.difference_matrix - self.fd_matrix) / max(np.linalg.norm(self.fd_matrix), 1e-300))


@dataclass(frozen=True, eq=False)
class TwistedHessian:
    z: complex
    matrix: np.ndarray


@dataclass(frozen=True)
class IndexTriple:
    ind: int
    coind: int
    nul: int
    z: complex = 1.0
    zero_threshold: float = 0.0
    thin_gap: bool = field(default=False, compare=False)

    @property
    def counts(self) -> Tuple[int, int, int]:
        return self.ind, self.coind, self.nul

    @property
    def total(self) -> int:
        return self.ind + self.coind + self.nul


@dataclass(frozen=True)
class PoincarePoint:
    z: complex
    multiplicity: int
    ambiguous: bool = False

    @property
    def angle(self) -> float:
        return cmath.phase(self.z) % (2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class Monodromy:
    phi: np.ndarray
    eigenvalues: np.ndarray
    poincare_points: Tuple[PoincarePoint, ...]
    forward_blocks: Tuple[Tuple[np.ndarray, np.ndarray], ...]   # (A_j, B_j)
    backward_blocks: Tuple[Tuple[np.ndarray, np.ndarray], ...]  # (C_j, D_j)
    inverse_residual: float
    max_transfer_condition: float
    ambiguous: bool = False
    unresolved: bool = False

    @property
    def total_multiplicity(self) -> int:
        return sum(p.multiplicity for p in self.poincare_points)


@dataclass(frozen=True)
class MeanIndex:
    avind: float
    avcoind: float
    quadrature_fallback: bool = False

    def __iter__(self):
        yield self.avind
        yield self.avcoind


@dataclass
class IterationRow:
    m: int
    direct: Optional[IndexTriple] = None
    bott: Optional[IndexTriple] = None
    bounds: Dict[str, float] = field(default_factory=dict)
    verdicts: Dict[str, bool] = field(default_factory=dict)
    coind_preserved: bool = False
    nul_preserved: bool = False
    coind_le_N: bool = False
    local_max: bool = False
    error: Optional[str] = None
    twisted: List[Tuple[complex, IndexTriple, IndexTriple]] = field(default_factory=list)  # (z, direct, bott)

    @property
    def hypothesis(self) -> bool:
        """coind and nul unchanged relative to m = 1"""
        return self.coind_preserved and self.nul_preserved

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.verdicts.values())


@dataclass
class IterationReport:
    base: CriticalOrbit
    rows: List[IterationRow]
    mean_ind: float
    mean_coind: float
    quadrature_fallback: bool
    poincare_points: Tuple[PoincarePoint, ...]
    divisibility_monotone: bool
    mean_coindex_zero: bool

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows) and self.divisibility_monotone

    def failing_rows(self) -> List[IterationRow]:
        return [row for row in self.rows if not row.passed]


@dataclass
class SemicontinuityReport:
    points: List[Dict[str, Any]]
    arcs_constant: bool
    inconclusive: List[str]

    @property
    def passed(self) -> bool:
        return self.arcs_constant and all(p['jump_ok'] for p in self.points)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def _blocks(config: Configuration):
    """Frames, diagonal blocks (with and without curvature) and couplings"""
    body = config.body
    n, N = config.n, body.N
    frames = config_frames(config)
    u, ell = chord_units(config)
    defects = bisector_defects(config)
    eye = np.eye(body.ambient_dim)
    projectors = [eye - np.outer(u[j], u[j]) for j in range(n)]

    couplings = []
    diag_plain = [np.zeros((N, N)) for _ in range(n)]
    for j in range(n):
        k = (j + 1) % n
        P = projectors[j] / ell[j]
        couplings.append(-frames[j].T @ P @ frames[k])
        diag_plain[j] = diag_plain[j] + frames[j].T @ P @ frames[j]
        diag_plain[k] = diag_plain[k] + frames[k].T @ P @ frames[k]

    diag_full = []
    for j, p in enumerate(config.points):
        grad = body.grad(p.coords)
        II = frames[j].T @ body.hess(p.coords) @ frames[j] / np.linalg.norm(grad)
        curvature = -float(np.dot(defects[j], p.unit_outward_normal)) * 0.5 * (II + II.T)
        diag_full.append(diag_plain[j] + curvature)
    return frames, diag_plain, diag_full, couplings


def _assemble(diagonal: Sequence[np.ndarray], couplings: Sequence[np.ndarray], z: complex = 1.0) -> np.ndarray:
    n = len(diagonal)
    N = diagonal[0].shape[0]
    M = np.zeros((n * N, n * N), dtype=complex)
    for j in range(n):
        M[j * N:(j + 1) * N, j * N:(j + 1) * N] += diagonal[j]
    for j in range(n):
        k = (j + 1) % n
        factor = z if j == n - 1 else 1.0
        M[j * N:(j + 1) * N, k * N:(k + 1) * N] += factor * couplings[j]
        M[k * N:(k + 1) * N, j * N:(j + 1) * N] += np.conj(factor) * couplings[j].T
    return M


def chart_hessian(config: Configuration) -> np.ndarray:
    """Hessian of L_n in the normal-retraction charts centered at config"""
    _, _, diag_full, couplings = _blocks(config)
    return _assemble(diag_full, couplings).real


def _fd_hessian(config: Configuration, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Hessian of L_n composed with the chart product"""
    body = config.body
    n, N = config.n, body.N
    charts = [make_chart(body, p) for p in config.points]
    base = config.coords
    cache: Dict[Tuple[int, Tuple[float, ...]], np.ndarray] = {}

    def point(j: int, x: Tuple[float, ...]) -> np.ndarray:
        if not any(x):
            return base[j]
        key = (j, x)
        if key not in cache:
            cache[key] = chart_to_surface(charts[j], np.array(x)).coords
        return cache[key]

    def local_length(moves: Dict[int, Tuple[float, ...]]) -> float:
        edges = sorted({e % n for j in moves for e in (j - 1, j)})
        zero = (0.0,) * N
        total = []
        for e in edges:
            a = point(e, moves.get(e, zero))
            b = point((e + 1) % n, moves.get((e + 1) % n, zero))
            total.append(float(np.linalg.norm(b - a)))
        return math.fsum(total)

    def shift(i: int, s: float) -> Tuple[float, ...]:
        x = [0.0] * N
        x[i] = s
        return tuple(x)

    dim = n * N
    H = np.zeros((dim, dim))
    for a in range(dim):
        j, i = divmod(a, N)
        centre = local_length({j: (0.0,) * N})
        H[a, a] = (local_length({j: shift(i, h)}) - 2.0 * centre + local_length({j: shift(i, -h)})) / h ** 2
        for b in range(a + 1, dim):
            k, l = divmod(b, N)
            stencil = []
            for sa, sb in ((h, h), (h, -h), (-h, h), (-h, -h)):
                if j == k:
                    x = [0.0] * N
                    x[i] += sa
                    x[l] += sb
                    stencil.append(local_length({j: tuple(x)}))
                else:
                    stencil.append(local_length({j: shift(i, sa), k: shift(l, sb)}))
            value = (stencil[0] - stencil[1] - stencil[2] + stencil[3]) / (4.0 * h ** 2)
            H[a, b] = H[b, a] = value
    return H


def assemble_hessian(target: Union[Configuration, CriticalOrbit], tol: Tolerances = DEFAULT_TOLERANCES,
                     with_fd: bool = True, fd_step: float = FD_STEP) -> HessianOperator:
    """Hessian operator at a critical configuration, plus the finite-difference oracle"""
    config = target.config if isinstance(target, CriticalOrbit) else target
    residual = grad_residual(config)
    if residual > tol.critical:
        raise NotCritical(f"Gradient residual {residual:.3e} exceeds tol_critical {tol.critical:.1e}")
    frames, diag_plain, diag_full, couplings = _blocks(config)
    real = _assemble(diag_full, couplings).real
    plain = _assemble(diag_plain, couplings).real
    fd = _fd_hessian(config, fd_step) if with_fd else None
    operator = HessianOperator(
        config=config, frames=frames, diagonal_blocks=tuple(diag_full),
        couplings=tuple(couplings), real_matrix=real, difference_matrix=plain, fd_matrix=fd,
    )
    gap = operator.difference_gap()
    if gap is not None and gap > 1e-3:
        info(f"difference operator alone differs from the oracle by {gap:.2e} (curvature term included in real_matrix)")
    return operator


def twisted_hessian(H: HessianOperator, z: complex) -> TwistedHessian:
    """Hessian on z-periodic sequences v_{j+n} = z v_j"""
    z = complex(z)
    if abs(abs(z) - 1.0) > TOL_TWIST:
        raise NonUnitTwist(f"|z| = {abs(z):.15g} is not 1")
    return TwistedHessian(z=z, matrix=_assemble(H.diagonal_blocks, H.couplings, z))


def index_triple(Hz: TwistedHessian, zero_threshold: float = ZERO_THRESHOLD, quiet: bool = False) -> IndexTriple:
    """Counts of negative, positive and near-zero eigenvalues"""
    try:
        eigenvalues = scipy.linalg.eigh(Hz.matrix, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenFailure(f"Eigensolve failed at z = {Hz.z}: {e}") from e
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    theta = zero_threshold * scale
    magnitudes = np.abs(eigenvalues)
    borderline = magnitudes[(magnitudes > theta) & (magnitudes <= 10.0 * theta)]
    if borderline.size and not quiet:
        warn(f"spectral gap is thin at z = {Hz.z:.6g}: |lambda| = {borderline.min():.3e} vs threshold {theta:.3e}")
    return IndexTriple(
        ind=int(np.sum(eigenvalues < -theta)),
        coind=int(np.sum(eigenvalues > theta)),
        nul=int(np.sum(magnitudes <= theta)),
        z=Hz.z, zero_threshold=theta, thin_gap=bool(borderline.size),
    )


def indices_at(H: HessianOperator, z: complex = 1.0) -> IndexTriple:
    """index_triple of H_z; a thin spectral gap is reported once per operator"""
    triple = index_triple(twisted_hessian(H, z), quiet=True)
    if triple.thin_gap:
        with _THIN_GAP_LOCK:
            first = H not in _THIN_GAP_REPORTED
            _THIN_GAP_REPORTED.add(H)
        if first:
            warn(f"spectral gap is thin at z = {triple.z:.6g} (threshold {triple.zero_threshold:.3e}); "
                 f"further thin gaps of this operator are not reported")
    return triple


# ---------------------------------------------------------------------------
# Monodromy and Poincaré points
# ---------------------------------------------------------------------------

def kernel_dimension(matrix: np.ndarray, tol: float = ZERO_THRESHOLD, limit: Optional[int] = None) -> int:
    """Numerical kernel dimension from singular values.

    Singular values count as zero below tol relative to the largest one, or
    below KERNEL_GAP times both the largest and the next one. limit caps the
    result (the algebraic multiplicity, when known).
    """
    singular = np.sort(scipy.linalg.svdvals(matrix))
    if not singular.size:
        return 0
    largest = float(singular[-1])
    count = int(np.sum(singular <= tol * max(1.0, largest)))
    for k in range(1, singular.size):
        if singular[k - 1] <= KERNEL_GAP * largest and singular[k - 1] <= KERNEL_GAP * singular[k]:
            count = max(count, k)
    return count if limit is None else min(count, limit)


def _eigen_count(H: HessianOperator, z: complex) -> Tuple[int, float]:
    """Negative eigenvalue count of H_z and its smallest |eigenvalue| relative to the largest"""
    eigenvalues = scipy.linalg.eigh(twisted_hessian(H, z).matrix, eigvals_only=True)
    scale = max(float(np.max(np.abs(eigenvalues))), 1e-300)
    return int(np.sum(eigenvalues < 0.0)), float(np.min(np.abs(eigenvalues))) / scale


def _crossing_angles(H: HessianOperator, samples: int = SCAN_POINTS) -> List[float]:
    """Angles where the negative count of H_z changes, located by bisection"""
    angles = 2.0 * math.pi * (np.arange(samples) + 0.5) / samples
    counts = [_eigen_count(H, cmath.exp(1j * t))[0] for t in angles]
    found = []
    for k in range(samples):
        lo, hi = float(angles[k]), float(angles[k]) + 2.0 * math.pi / samples
        left = counts[k]
        if counts[(k + 1) % samples] == left:
            continue
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if _eigen_count(H, cmath.exp(1j * mid))[0] == left:
                lo = mid
            else:
                hi = mid
        found.append((0.5 * (lo + hi)) % (2.0 * math.pi))
    return found


def _circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def _locate_poincare_points(H: HessianOperator, eigenvalues: np.ndarray
                            ) -> Tuple[List[PoincarePoint], bool]:
    """Poincaré points as the z with nul_z > 0, seeded by the spectrum of Phi.

    Candidates are the unit-circle projections of eigenvalues of Phi near
    the circle, the crossings of the negative count of H_z, and z = +-1.
    A candidate near the circle that no nullity confirms leaves the result
    unresolved.
    """
    confirmed: List[Dict[str, Any]] = []
    for z in (1.0, -1.0):
        nul = indices_at(H, z).nul
        if nul:
            confirmed.append({'z': complex(z), 'angle': cmath.phase(z) % (2.0 * math.pi),
                              'nul': nul, 'ambiguous': False, 'anchor': True})

    # (angle, distance of the source eigenvalue from the circle); crossings lie on it
    candidates = [(cmath.phase(lam) % (2.0 * math.pi), abs(abs(lam) - 1.0))
                  for lam in eigenvalues if abs(abs(lam) - 1.0) <= CANDIDATE_BAND]
    candidates.extend((t, 0.0) for t in _crossing_angles(H))
    candidates.sort()

    clusters: List[List[Tuple[float, float]]] = []
    for cand in candidates:
        for cluster in clusters:
            if _circular_gap(cluster[0][0], cand[0]) <= CLUSTER_TOL:
                cluster.append(cand)
                break
        else:
            clusters.append([cand])

    unresolved = False
    for cluster in clusters:
        start = cluster[0][0]
        off_circle = max(d for _, d in cluster)
        anchor = next((p for p in confirmed if p['anchor'] and _circular_gap(p['angle'], start) <= MERGE_TOL), None)
        if anchor is not None:
            # a Jordan block at +-1 splits under rounding; keep the single point and flag it
            if _circular_gap(anchor['angle'], start) > CLUSTER_TOL or off_circle > TOL_CIRCLE:
                anchor['ambiguous'] = True
            continue
        best = min((t for t, _ in cluster), key=lambda t: _eigen_count(H, cmath.exp(1j * t))[1])
        z = cmath.exp(1j * best)
        nul = indices_at(H, z).nul
        if not nul:
            unresolved |= off_circle <= AMBIGUOUS_BAND
            continue
        if all(_circular_gap(best, p['angle']) > CLUSTER_TOL for p in confirmed):
            confirmed.append({'z': z, 'angle': best, 'nul': nul,
                              'ambiguous': off_circle > TOL_CIRCLE, 'anchor': False})

    points = [PoincarePoint(z=p['z'], multiplicity=p['nul'], ambiguous=p['ambiguous'])
              for p in sorted(confirmed, key=lambda p: p['angle'])]
    return points, unresolved


def monodromy(H: HessianOperator) -> Monodromy:
    """Transfer of kernel sequences over one period, Phi(v_0, v_1) = (v_n, v_{n+1})"""
    n, N = H.n, H.N
    C, D = H.couplings, H.diagonal_blocks
    eye, zero = np.eye(N), np.zeros((N, N))

    worst = 0.0
    forward, backward = [], []
    for j in range(n):
        cond = float(np.linalg.cond(C[j]))
        worst = max(worst, cond)
        if not np.isfinite(cond) or cond > TRANSFER_COND_MAX:
            raise TransferSingular(f"Transfer block at q_{j} has condition number {cond:.3e}")
        A = -np.linalg.solve(C[j], D[j])
        B = -np.linalg.solve(C[j], C[(j - 1) % n].T)
        forward.append((A, B))
        Cb = -np.linalg.solve(C[(j - 1) % n].T, D[j])
        Db = -np.linalg.solve(C[(j - 1) % n].T, C[j])
        backward.append((Cb, Db))

    def step(j: int) -> np.ndarray:
        A, B = forward[j]
        return np.block([[zero, eye], [B, A]])

    def back(j: int) -> np.ndarray:
        Cb, Db = backward[j]
        return np.block([[Cb, Db], [eye, zero]])

    phi = np.eye(2 * N)
    for j in list(range(1, n)) + [0]:
        phi = step(j) @ phi
    phi_back = np.eye(2 * N)
    for j in [0] + list(range(n - 1, 0, -1)):
        phi_back = back(j) @ phi_back
    residual = float(np.linalg.norm(phi_back @ phi - np.eye(2 * N)))

    try:
        eigenvalues = scipy.linalg.eigvals(phi)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenFailure(f"Monodromy eigensolve failed: {e}") from e
    points, unresolved = _locate_poincare_points(H, eigenvalues)
    ambiguous = unresolved or any(p.ambiguous for p in points)
    if sum(p.multiplicity for p in points) > 2 * N:
        warn(f"Poincaré multiplicities sum to {sum(p.multiplicity for p in points)} > 2N = {2 * N}")
    return Monodromy(
        phi=phi, eigenvalues=eigenvalues, poincare_points=tuple(points),
        forward_blocks=tuple(forward), backward_blocks=tuple(backward),
        inverse_residual=residual, max_transfer_condition=worst, ambiguous=ambiguous,
        unresolved=unresolved,
    )


def poincare_set_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Hausdorff distance between two finite subsets of the unit circle"""
    a, b = list(a), list(b)
    if not a and not b:
        return 0.0
    if not a or not b:
        return math.inf
    d = np.abs(np.subtract.outer(np.array(a), np.array(b)))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def nullity_cross_check(H: HessianOperator, samples: int = 16,
                        mono: Optional[Monodromy] = None) -> List[Dict[str, Any]]:
    """nul_z from the twisted eigencount against dim ker(Phi - zI)"""
    mono = mono or monodromy(H)
    zs = [cmath.exp(2j * math.pi * k / samples) for k in range(samples)]
    zs.extend(p.z for p in mono.poincare_points)
    eye = np.eye(mono.phi.shape[0])
    rows = []
    for z in zs:
        twisted = indices_at(H, z).nul
        algebraic = int(np.sum(np.abs(mono.eigenvalues - z) <= MERGE_TOL))
        kernel = kernel_dimension(mono.phi - z * eye, limit=algebraic)
        rows.append({'z': z, 'twisted_nul': twisted, 'kernel_dim': kernel, 'match': twisted == kernel})
    return rows


# ---------------------------------------------------------------------------
# Iteration theory
# ---------------------------------------------------------------------------

def roots_of(z: complex, m: int) -> List[complex]:
    base = cmath.phase(z) / m
    return [cmath.exp(1j * (base + 2.0 * math.pi * k / m)) for k in range(m)]


def bott_split(H: HessianOperator, m: int, z: complex = 1.0) -> IndexTriple:
    """Index triple of the m-th iterate at z, summed over the m-th roots of z"""
    if m < 1:
        raise DomainError(f"Iteration order must be >= 1, got {m}")
    if m == 1:
        return indices_at(H, z)
    triples = [indices_at(H, w) for w in roots_of(complex(z), m)]
    return IndexTriple(
        ind=sum(t.ind for t in triples), coind=sum(t.coind for t in triples),
        nul=sum(t.nul for t in triples), z=complex(z),
        zero_threshold=max(t.zero_threshold for t in triples),
    )


def mean_index(H: HessianOperator, mono: Optional[Monodromy] = None) -> MeanIndex:
    """Average of ind_z and coind_z over the unit circle"""
    mono = mono or monodromy(H)
    if mono.unresolved:
        warn("Poincaré points are numerically ambiguous; averaging by quadrature")
        angles = 2.0 * math.pi * (np.arange(QUADRATURE_POINTS) + 0.5) / QUADRATURE_POINTS
        triples = [indices_at(H, cmath.exp(1j * t)) for t in angles]
        return MeanIndex(
            avind=float(np.mean([t.ind for t in triples])),
            avcoind=float(np.mean([t.coind for t in triples])),
            quadrature_fallback=True,
        )
    angles = sorted(p.angle for p in mono.poincare_points)
    if not angles:
        t = indices_at(H, -1.0)
        return MeanIndex(avind=float(t.ind), avcoind=float(t.coind))
    avind = avcoind = 0.0
    for start, arc in _arcs(angles):
        t = indices_at(H, cmath.exp(1j * (start + 0.5 * arc)))
        avind += arc * t.ind
        avcoind += arc * t.coind
    return MeanIndex(avind=avind / (2.0 * math.pi), avcoind=avcoind / (2.0 * math.pi))


def _arcs(angles: Sequence[float]) -> List[Tuple[float, float]]:
    """(start angle, length) of the open arcs between sorted angles"""
    arcs = []
    for i, start in enumerate(angles):
        end = angles[(i + 1) % len(angles)]
        arc = (end - start) % (2.0 * math.pi)
        if arc == 0.0:
            arc = 2.0 * math.pi
        arcs.append((start, arc))
    return arcs


def prime_power_list(p: int, max_m: int) -> List[int]:
    """1, p, p^2, ... up to max_m"""
    if not sympy.isprime(p):
        raise DomainError(f"{p} is not prime")
    values, m = [], 1
    while m <= max_m:
        values.append(m)
        m *= p
    return values


def _row(H1: HessianOperator, base: IndexTriple, mean: MeanIndex, m: int,
         tol: Tolerances, twists: Sequence[complex] = (1.0,)) -> IterationRow:
    row = IterationRow(m=m)
    N = H1.N
    try:
        Hm = assemble_hessian(iterate(H1.config, m), tol, with_fd=False)
        direct = indices_at(Hm, 1.0)
        bott = bott_split(H1, m, 1.0)
        row.twisted = [(1.0 + 0j, direct, bott)]
        for z in twists:
            z = complex(z)
            if abs(z - 1.0) > TOL_TWIST:
                row.twisted.append((z, indices_at(Hm, z), bott_split(H1, m, z)))
    except BilliardError as e:
        row.error = f"{type(e).__name__}: {e}"
        return row
    row.direct, row.bott = direct, bott
    row.bounds = {
        'ind_lower': m * mean.avind - 2 * N,
        'ind_upper': m * mean.avind + 2 * N - direct.nul,
        'coind_lower': m * mean.avcoind - 2 * N,
        'coind_upper': m * mean.avcoind + 2 * N - direct.nul,
    }
    row.verdicts = {
        'bott_match': all(d.counts == b.counts for _, d, b in row.twisted),
        'dimension': direct.total == m * H1.dimension,
        'nul_bound': direct.nul <= 2 * N,
        'ind_lower': direct.ind >= row.bounds['ind_lower'] - BOUND_SLACK,
        'ind_upper': direct.ind <= row.bounds['ind_upper'] + BOUND_SLACK,
        'coind_lower': direct.coind >= row.bounds['coind_lower'] - BOUND_SLACK,
        'coind_upper': direct.coind <= row.bounds['coind_upper'] + BOUND_SLACK,
        'limit_law': abs(direct.ind / m - mean.avind) <= 2 * N / m + BOUND_SLACK,
    }
    row.coind_preserved = direct.coind == base.coind
    row.nul_preserved = direct.nul == base.nul
    row.coind_le_N = direct.coind <= N
    row.local_max = direct.coind == 0 and direct.nul == 0
    return row


def divisibility_monotone(rows: Sequence[IterationRow]) -> bool:
    """ind and coind never decrease along m | m' within the rows"""
    good = [r for r in rows if r.direct is not None]
    for a in good:
        for b in good:
            if a.m < b.m and b.m % a.m == 0:
                if b.direct.ind < a.direct.ind or b.direct.coind < a.direct.coind:
                    return False
    return True


def iteration_report(orbit: CriticalOrbit, m_list: Sequence[int], tol: Tolerances = DEFAULT_TOLERANCES,
                     workers: int = 1, twists: Sequence[complex] = (1.0,)) -> IterationReport:
    """Direct and split indices of the iterates at each twist z, with the iteration inequalities"""
    H1 = assemble_hessian(orbit, tol, with_fd=False)
    mono = monodromy(H1)
    mean = mean_index(H1, mono)
    base = indices_at(H1, 1.0)
    ms = [int(m) for m in m_list]
    if any(m < 1 for m in ms):
        raise DomainError(f"m_list entries must be >= 1, got {ms}")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda m: _row(H1, base, mean, m, tol, twists), ms))
    else:
        rows = [_row(H1, base, mean, m, tol, twists) for m in ms]

    for row in rows:
        if row.error:
            warn(f"m={row.m}: {row.error}")
    return IterationReport(
        base=orbit, rows=rows, mean_ind=mean.avind, mean_coind=mean.avcoind,
        quadrature_fallback=mean.quadrature_fallback, poincare_points=mono.poincare_points,
        divisibility_monotone=divisibility_monotone(rows),
        mean_coindex_zero=abs(mean.avcoind) <= BOUND_SLACK,
    )


def semicontinuity_scan(H: HessianOperator, samples: int = 8,
                        mono: Optional[Monodromy] = None) -> SemicontinuityReport:
    """Arc constancy and jump bounds of ind_z, coind_z around each Poincaré point"""
    if samples < 3:
        raise DomainError(f"semicontinuity_scan needs at least 3 samples per arc, got {samples}")
    mono = mono or monodromy(H)
    angles = sorted(p.angle for p in mono.poincare_points)
    if not angles:
        triples = [indices_at(H, cmath.exp(2j * math.pi * (k + 0.5) / samples)).counts for k in range(samples)]
        return SemicontinuityReport(points=[], arcs_constant=len(set(triples)) == 1, inconclusive=[])

    inconclusive: List[str] = []
    arc_values: List[Optional[List[IndexTriple]]] = []
    arcs_constant = True
    for start, arc in _arcs(angles):
        if arc < MIN_ARC:
            inconclusive.append(str(InconclusiveJump(f"arc of length {arc:.2e} after angle {start:.6f} too short")))
            arc_values.append(None)
            continue
        values = [indices_at(H, cmath.exp(1j * (start + arc * k / (samples + 1))))
                  for k in range(1, samples + 1)]
        arcs_constant &= len({t.counts for t in values}) == 1
        arc_values.append(values)

    points = []
    for i, angle in enumerate(angles):
        at = indices_at(H, cmath.exp(1j * angle))
        right = arc_values[i]
        left = arc_values[i - 1]
        record = {'z': cmath.exp(1j * angle), 'triple': at, 'left': None, 'right': None, 'jump_ok': True}
        for side, values in (('left', left and left[-1]), ('right', right and right[0])):
            if not values:
                record['jump_ok'] = False
                continue
            record[side] = values
            record['jump_ok'] &= (at.ind <= values.ind <= at.ind + at.nul
                                  and at.coind <= values.coind <= at.coind + at.nul)
        points.append(record)
    return SemicontinuityReport(points=points, arcs_constant=arcs_constant, inconclusive=inconclusive)
