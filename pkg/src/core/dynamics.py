"""
The induced map on projective space at a fixed lambda: charts, the invariant
manifold, Jacobians with spectral checks, contraction order, rescaled
coordinates and large-lambda orbits.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.core.config_manager import config
from src.core.errors import (
    ChartBreakdownError,
    IndeterminacyError,
    InsufficientDataError,
    InvalidArgumentError,
    NotStableError,
)
from src.core.gluing import GluingData, classify, label_dynamics, require_valid
from src.core.polyengine import LocalWeightTable, compile_plan, local_weights
from src.utils.logger import logger


def _ones(index: int) -> int:
    return bin(index).count("1")


@dataclass(frozen=True)
class NumVector:
    """Homogeneous coordinates in assignment order"""

    entries: np.ndarray
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))
        object.__setattr__(self, "lam", complex(self.lam))
        if not np.any(self.entries):
            raise IndeterminacyError("The zero vector is not a point of projective space")

    @property
    def k(self) -> int:
        return len(self.entries).bit_length() - 1

    def normalized(self) -> "NumVector":
        return NumVector(self.entries / np.max(np.abs(self.entries)), self.lam)


@dataclass(frozen=True)
class ChartPoint:
    """[x] = (x)/(0) for the 2^k - 1 nonzero assignments x"""

    coords: np.ndarray
    lam: complex

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=complex))
        object.__setattr__(self, "lam", complex(self.lam))

    @property
    def k(self) -> int:
        return (len(self.coords) + 1).bit_length() - 1

    def free(self) -> np.ndarray:
        """The unit-vector coordinates [e_1], ..., [e_k]"""
        return np.array([self.coords[(1 << j) - 1] for j in range(self.k)])

    def lift(self) -> NumVector:
        return NumVector(np.concatenate(([1.0], self.coords)), self.lam)


def manifold_point(free: Sequence[complex], lam: complex) -> ChartPoint:
    """Chart point with [x] equal to the product of [e_j] over the ones of x"""
    free = np.asarray(free, dtype=complex)
    k = len(free)
    coords = np.ones((1 << k) - 1, dtype=complex)
    for x in range(1, 1 << k):
        for j in range(k):
            if x >> j & 1:
                coords[x - 1] *= free[j]
    return ChartPoint(coords, lam)


def fubini_study(u: Sequence[complex], v: Sequence[complex]) -> float:
    """Projective distance in [0, pi/2], zero iff u and v are proportional"""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise InvalidArgumentError("Fubini-Study distance needs nonzero vectors")
    u, v = u / nu, v / nv
    inner = np.vdot(u, v)
    return float(math.atan2(np.linalg.norm(v - inner * u), abs(inner)))


def manifold_residual(p: ChartPoint) -> float:
    """Largest deviation from [x] = prod [e_j] over |x| >= 2, scaled by 1 + max |coord|"""
    ideal = manifold_point(p.free(), p.lam).coords
    worst = 0.0
    for x in range(1, 1 << p.k):
        if _ones(x) >= 2:
            worst = max(worst, abs(p.coords[x - 1] - ideal[x - 1]))
    return worst / (1.0 + float(np.max(np.abs(p.coords))))


def to_chart(v: NumVector, threshold: Optional[float] = None) -> ChartPoint:
    threshold = threshold if threshold is not None else config.get("tolerances.chart_threshold", 1e-14)
    entries = v.entries
    zero = abs(entries[0])
    peak = float(np.max(np.abs(entries)))
    if zero <= threshold * peak:
        raise ChartBreakdownError(zero / peak if peak else 0.0, threshold)
    return ChartPoint(entries[1:] / entries[0], v.lam)


def rescale(v: NumVector) -> NumVector:
    """Coordinates multiplied by lambda^-|x|"""
    if v.lam == 0:
        raise InvalidArgumentError("Rescaling needs lambda != 0")
    scale = np.array([v.lam ** -_ones(x) for x in range(len(v.entries))])
    return NumVector(v.entries * scale, v.lam)


def unrescale(v: NumVector) -> NumVector:
    if v.lam == 0:
        raise InvalidArgumentError("Rescaling needs lambda != 0")
    scale = np.array([v.lam ** _ones(x) for x in range(len(v.entries))])
    return NumVector(v.entries * scale, v.lam)


class ProjectiveMap:
    """
    F at one lambda. The compiled recursion terms are evaluated once; every
    call reuses them.
    """

    def __init__(self, d: GluingData, lam: complex, table: Optional[LocalWeightTable] = None):
        lam = complex(lam)
        if lam == 0:
            raise InvalidArgumentError("The projective map is undefined at lambda = 0")
        require_valid(d)
        self.data = d
        self.lam = lam
        self.table = table or local_weights(d)
        self.plan = compile_plan(d, self.table)
        self.terms = self.plan.numeric(lam)
        self.size = 1 << d.k
        self.copy_scale = np.array([lam ** -_ones(y) for y in range(self.size)])

    # ---------------------------------------------------------- the map

    def _homogeneous(self, reduced: np.ndarray) -> np.ndarray:
        out = np.zeros(self.size, dtype=complex)
        for x, (idx, weights) in enumerate(self.terms):
            if len(weights):
                out[x] = np.dot(weights, np.prod(reduced[idx], axis=1))
        return out

    def __call__(self, v: NumVector) -> NumVector:
        return self.apply(v)

    def apply(self, v: NumVector, indeterminacy: Optional[float] = None) -> NumVector:
        limit = indeterminacy if indeterminacy is not None else config.get("tolerances.indeterminacy", 1e-300)
        if len(v.entries) != self.size:
            raise InvalidArgumentError(f"Expected {self.size} coordinates, got {len(v.entries)}")
        peak = float(np.max(np.abs(v.entries)))
        image = self._homogeneous(v.entries / peak * self.copy_scale)
        if float(np.max(np.abs(image))) < limit:
            raise IndeterminacyError(f"F maps the point to (0, ..., 0) at lambda = {self.lam}")
        return NumVector(image * peak ** self.data.m, self.lam)

    def apply_rescaled(self, u: NumVector) -> NumVector:
        """The rescaled recursion: copy values enter unchanged, outputs are scaled by lambda^-|x|"""
        image = self._homogeneous(u.entries)
        return NumVector(image * self.copy_scale, self.lam)

    def step_chart(self, p: ChartPoint) -> ChartPoint:
        return to_chart(self.apply(p.lift()))

    # ---------------------------------------------------------- derivatives

    def differential(self, v: np.ndarray) -> np.ndarray:
        """D F at v: entry [x, y] is the partial of F_x with respect to (y)"""
        reduced = v * self.copy_scale
        out = np.zeros((self.size, self.size), dtype=complex)
        m = self.data.m
        for x, (idx, weights) in enumerate(self.terms):
            if not len(weights):
                continue
            factors = reduced[idx]
            for i in range(m):
                others = np.prod(np.delete(factors, i, axis=1), axis=1) if m > 1 else np.ones(len(weights))
                np.add.at(out[x], idx[:, i], weights * others)
        return out * self.copy_scale[np.newaxis, :]

    def chart_jacobian(self, p: ChartPoint) -> np.ndarray:
        """Quotient rule applied to [x]' = F_x(1, c) / F_0(1, c)"""
        u = p.lift().entries
        w = self._homogeneous(u * self.copy_scale)
        threshold = config.get("tolerances.chart_threshold", 1e-14)
        if abs(w[0]) <= threshold * float(np.max(np.abs(w))):
            raise ChartBreakdownError(abs(w[0]) / float(np.max(np.abs(w))), threshold)
        dw = self.differential(u)
        jac = (dw[1:, 1:] * w[0] - np.outer(w[1:], dw[0, 1:])) / w[0] ** 2
        return jac


# ------------------------------------------------------------------ public operations

def eval_F(d: GluingData, v: NumVector, fmap: Optional[ProjectiveMap] = None) -> NumVector:
    fmap = fmap or ProjectiveMap(d, v.lam)
    return fmap.apply(v)


def eval_rescaled(d: GluingData, u: NumVector, fmap: Optional[ProjectiveMap] = None) -> NumVector:
    fmap = fmap or ProjectiveMap(d, u.lam)
    return fmap.apply_rescaled(u)


def step_chart(d: GluingData, p: ChartPoint, fmap: Optional[ProjectiveMap] = None) -> ChartPoint:
    fmap = fmap or ProjectiveMap(d, p.lam)
    return fmap.step_chart(p)


def manifold_step(d: GluingData, lam: complex, free: Sequence[complex],
                  table: Optional[LocalWeightTable] = None) -> np.ndarray:
    """
    Free coordinates one step later on the invariant manifold: for e = Phi(j)
    and l = Lambda(j), the ratio of the sums over member bits Y of
    [e_l]^|Y| Z_e(Y, root)/lambda^|Y| with the root occupied and vacant.
    """
    lam = complex(lam)
    if lam == 0:
        raise InvalidArgumentError("The manifold dynamics are undefined at lambda = 0")
    table = table or local_weights(d)
    free = np.asarray(free, dtype=complex)
    out = np.empty(d.k, dtype=complex)
    for j in range(1, d.k + 1):
        e = d.phi_edge(j)
        base = free[e.label - 1]
        sums = []
        for root_bit in (1, 0):
            acc = 0j
            for mask in range(1 << len(e)):
                bits = tuple((mask >> i) & 1 for i in range(len(e)))
                w = table.weight(e.id, bits, root_bit)
                if w:
                    ones = sum(bits)
                    acc += (base / lam) ** ones * complex(w(lam))
            sums.append(acc)
        if sums[1] == 0:
            raise IndeterminacyError(f"Manifold step for label {j} divides by zero")
        out[j - 1] = sums[0] / sums[1]
    return out


def fixed_manifold_point(d: GluingData, lam: complex, free: Sequence[complex]) -> ChartPoint:
    """
    A point of the periodic submanifold: periodic-label coordinates from
    `free` (sorted label order), the others 1, pushed forward preperiod times.
    """
    cls = classify(d)
    if not cls.stable:
        raise NotStableError(f"Periodic submanifold needs stable data ({cls.tokens()})")
    dyn = label_dynamics(d)
    periodic = sorted(dyn.periodic_labels)
    if len(free) != len(periodic):
        raise InvalidArgumentError(f"Expected {len(periodic)} free coordinates, got {len(free)}")
    coords = np.ones(d.k, dtype=complex)
    for label, value in zip(periodic, free):
        coords[label - 1] = value
    fmap = ProjectiveMap(d, lam)
    p = manifold_point(coords, lam)
    for _ in range(dyn.preperiod):
        p = fmap.step_chart(p)
    return p


def jacobian(d: GluingData, lam: complex, p: ChartPoint, iterations: int = 1,
             fmap: Optional[ProjectiveMap] = None) -> np.ndarray:
    """Analytic Jacobian of the chart map, chained over `iterations` steps"""
    fmap = fmap or ProjectiveMap(d, lam)
    total = np.eye(len(p.coords), dtype=complex)
    point = p
    for _ in range(iterations):
        total = fmap.chart_jacobian(point) @ total
        point = fmap.step_chart(point)
    return total


def numeric_jacobian(d: GluingData, lam: complex, p: ChartPoint, h: float = 1e-6,
                     fmap: Optional[ProjectiveMap] = None) -> np.ndarray:
    """Central differences; the chart map is holomorphic so a real step suffices"""
    fmap = fmap or ProjectiveMap(d, lam)
    size = len(p.coords)
    out = np.empty((size, size), dtype=complex)
    for y in range(size):
        step = h * (1.0 + abs(p.coords[y]))
        shift = np.zeros(size, dtype=complex)
        shift[y] = step
        plus = fmap.step_chart(ChartPoint(p.coords + shift, p.lam)).coords
        minus = fmap.step_chart(ChartPoint(p.coords - shift, p.lam)).coords
        out[:, y] = (plus - minus) / (2 * step)
    return out


# ------------------------------------------------------------------ spectral checks

def row_reduced_rank(matrix: np.ndarray, rel_pivot: Optional[float] = None) -> int:
    """Rank by Gaussian elimination with partial pivoting; pivots below rel_pivot*||M|| count as zero"""
    rel_pivot = rel_pivot if rel_pivot is not None else config.get("tolerances.rank_pivot", 1e-8)
    a = np.array(matrix, dtype=complex)
    norm = np.linalg.norm(a, 2) if a.size else 0.0
    if norm == 0.0:
        return 0
    threshold = rel_pivot * norm
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivot = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[pivot, col]) <= threshold:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        a[rank + 1:] -= np.outer(a[rank + 1:, col] / a[rank, col], a[rank])
        rank += 1
    return rank


@dataclass(frozen=True)
class SpectralReport:
    dimension: int
    k0: int
    nu1: float
    jacobian_norm: float
    idempotent_rank: int
    kernel_dimension: int

    @property
    def nu1_normalized(self) -> float:
        return self.nu1 / (1.0 + self.jacobian_norm) ** (2 * self.dimension)

    @property
    def rank_matches(self) -> bool:
        return self.idempotent_rank == self.k0

    @property
    def kernel_matches(self) -> bool:
        return self.kernel_dimension == self.dimension - self.k0

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "k0": self.k0,
            "nu1": self.nu1,
            "nu1_normalized": self.nu1_normalized,
            "jacobian_norm": self.jacobian_norm,
            "idempotent_rank": self.idempotent_rank,
            "kernel_dimension": self.kernel_dimension,
            "rank_matches": self.rank_matches,
            "kernel_matches": self.kernel_matches,
        }


def spectral_check(jac: np.ndarray, k0: int, rel_pivot: Optional[float] = None) -> SpectralReport:
    """
    nu1 = ||J^D (J - I)^D|| vanishes iff the spectrum lies in {0, 1}; the rank
    of J^D counts the eigenvalue-1 part.
    """
    rel_pivot = rel_pivot if rel_pivot is not None else config.get("tolerances.rank_pivot", 1e-8)
    jac = np.asarray(jac, dtype=complex)
    dim = jac.shape[0]
    power = np.linalg.matrix_power(jac, dim)
    shifted = np.linalg.matrix_power(jac - np.eye(dim), dim)
    nu1 = float(np.linalg.norm(power @ shifted, 2))
    norm = float(np.linalg.norm(jac, 2))
    rank = row_reduced_rank(power, rel_pivot)
    if norm == 0.0:
        kernel = dim
    else:
        singular = np.linalg.svd(jac, compute_uv=False)
        kernel = int(np.sum(singular <= rel_pivot * singular[0]))
    return SpectralReport(dim, k0, nu1, norm, rank, kernel)


# ------------------------------------------------------------------ contraction order

def contraction_order(d: GluingData, lam: complex, base_free: Sequence[complex],
                      ladder: Optional[Sequence[float]] = None, seed: Optional[int] = None,
                      tangent: bool = False) -> float:
    """
    Slope of log(residual after the map) against log(residual before) for
    off-manifold perturbations of size eps; 2 means quadratic contraction.
    With tangent=True the perturbation moves along the manifold, so no
    residual survives and the fit is refused.
    """
    cls = classify(d)
    if not cls.expanding:
        raise NotStableError(f"Contraction order needs expanding data ({cls.tokens()})")
    ladder = ladder if ladder is not None else config.get("dynamics.contraction_ladder", [1e-2, 1e-3, 1e-4])
    seed = seed if seed is not None else config.get("run.seed", 0)
    floor = config.get("tolerances.residual_floor", 1e-14)
    steps = cls.expanding_witness_n

    fmap = ProjectiveMap(d, lam)
    rng = np.random.default_rng(seed)
    base = manifold_point(base_free, lam)
    size = len(base.coords)
    direction = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    direction /= np.linalg.norm(direction)
    free_direction = direction[:d.k]

    xs, ys = [], []
    for eps in ladder:
        if tangent:
            point = manifold_point(np.asarray(base_free, dtype=complex) + eps * free_direction, lam)
        else:
            point = ChartPoint(base.coords + eps * direction, lam)
        r_in = manifold_residual(point)
        image = point
        for _ in range(steps):
            image = fmap.step_chart(image)
        r_out = manifold_residual(image)
        if r_in < floor or r_out < floor:
            logger.numeric_event("contraction fit", f"eps={eps:g} dropped (residuals {r_in:.2e}, {r_out:.2e})")
            continue
        xs.append(math.log(r_in))
        ys.append(math.log(r_out))
    if len(xs) < 3:
        raise InsufficientDataError(f"Only {len(xs)} usable perturbation sizes; need 3 for a slope")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


# ------------------------------------------------------------------ orbits

@dataclass
class OrbitRecord:
    iteration: int
    residual: Optional[float]
    step_distance: float
    dist_to_ones_mass: float
    # affine chart coordinates, None where the chart breaks down
    chart: Optional[np.ndarray] = None


@dataclass
class OrbitSummary:
    lam: complex
    period: int
    records: List[OrbitRecord] = field(default_factory=list)
    converged: bool = False
    converged_at: Optional[int] = None
    truncated: bool = False
    final: Optional[np.ndarray] = None

    @property
    def final_distance(self) -> float:
        return self.records[-1].dist_to_ones_mass if self.records else math.nan


def orbit(d: GluingData, lam: complex, start: NumVector, n_max: Optional[int] = None,
          tolerance: Optional[float] = None) -> OrbitSummary:
    """
    Iterate F with max-modulus renormalisation. Converged once the distance
    between u_n and u_{n-period} drops below the tolerance.
    """
    n_max = n_max if n_max is not None else config.get("dynamics.orbit_iterations", 60)
    tolerance = tolerance if tolerance is not None else config.get("tolerances.convergence", 1e-10)
    dyn = label_dynamics(d)
    period = dyn.period if dyn.period else 1
    fmap = ProjectiveMap(d, lam)

    ones_mass = np.zeros(1 << d.k, dtype=complex)
    ones_mass[-1] = 1.0
    summary = OrbitSummary(complex(lam), period)
    history = [start.normalized().entries]
    for n in range(1, n_max + 1):
        try:
            current = fmap.apply(NumVector(history[-1], lam)).normalized()
        except IndeterminacyError as err:
            logger.numeric_event("orbit truncated", str(err))
            summary.truncated = True
            break
        history.append(current.entries)
        try:
            chart = to_chart(current)
            residual = manifold_residual(chart)
        except ChartBreakdownError:
            chart, residual = None, None
        step_distance = fubini_study(history[-1], history[-2])
        summary.records.append(OrbitRecord(n, residual, step_distance,
                                           fubini_study(current.entries, ones_mass),
                                           None if chart is None else chart.coords))
        if len(history) > period and fubini_study(history[-1], history[-1 - period]) < tolerance:
            summary.converged = True
            summary.converged_at = n
            break
    summary.final = history[-1]
    logger.debug(f"Orbit at lambda={lam}: converged={summary.converged} after {len(summary.records)} steps")
    return summary
