"""
Zeros of independence polynomials: Aberth-Ehrlich root finding in double
precision, residual checks and simultaneous refinement in mpmath, zero
atlases and boundedness verdicts.

A root r of p is accepted when |p(r)| / ||c||_2 stays below the residual
bound, c being the integer coefficient vector of p with any lambda^t factor
removed.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath as mp
import numpy as np

from src.core.config_manager import config
from src.core.errors import InvalidArgumentError, RootFindingError
from src.core.gluing import GluingData
from src.core.graph import MarkedGraph
from src.core.polyengine import PolyVector, RecursionPlan, compile_plan, sequence, total
from src.utils.logger import logger
from src.utils.polynomial import Polynomial

# complex entries per evaluation block
BLOCK_ELEMENTS = 1 << 21

# bits on top of the rung and of the evaluation scale
GUARD_BITS = 32

# extended-precision Aberth sweeps per rung
REFINEMENT_SWEEPS = 40

VERDICT_BOUNDED = "bounded-plateau"
VERDICT_GROWING = "growing"
VERDICT_INCONCLUSIVE = "inconclusive"


class LogScaledPolynomial:
    """
    p(z) = sum c_i z^i evaluated through log|c_i| + i log z, shifted by the
    column maximum, so coefficients far outside the double range are fine.
    """

    def __init__(self, coefficients: Sequence[int]):
        self.coefficients = tuple(coefficients)
        self.degree = len(self.coefficients) - 1
        self.powers = np.arange(self.degree + 1, dtype=float)
        self.log_abs = np.array([math.log(abs(c)) if c else -np.inf for c in self.coefficients])
        self.signs = np.array([(c > 0) - (c < 0) for c in self.coefficients], dtype=float)
        self.support = self.signs != 0

    def _evaluate(self, z: np.ndarray):
        z = np.asarray(z, dtype=complex)
        z = np.where(z == 0, 1e-300, z)
        log_z = np.log(z)
        powers = self.powers[self.support][:, None]
        log_c = self.log_abs[self.support][:, None]
        signs = self.signs[self.support][:, None]
        block = max(1, BLOCK_ELEMENTS // max(1, len(powers)))
        p = np.empty(len(z), dtype=complex)
        dp = np.empty(len(z), dtype=complex)
        mag = np.empty(len(z), dtype=float)
        tops = np.empty(len(z), dtype=float)
        for start in range(0, len(z), block):
            lz = log_z[start:start + block][None, :]
            exponent = log_c + powers * lz
            top = np.max(exponent.real, axis=0)
            terms = signs * np.exp(exponent - top)
            p[start:start + block] = terms.sum(axis=0)
            dp[start:start + block] = (powers * terms).sum(axis=0) / z[start:start + block]
            mag[start:start + block] = np.abs(terms).sum(axis=0)
            tops[start:start + block] = top
        return p, dp, mag, tops

    def evaluate(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Scaled p(z), p'(z) and sum |c_i z^i|, sharing one scale per point"""
        p, dp, mag, _ = self._evaluate(z)
        return p, dp, mag

    def newton_ratio(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """p/p' and log sum |c_i z^i|, the scale of the rounding error of Horner's rule"""
        p, dp, mag, tops = self._evaluate(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
        return ratio, tops + np.log(mag)

    def value_mp(self, z, derivative: bool = False):
        """p(z), or (p(z), p'(z)), at the current mpmath precision"""
        desc = list(reversed(self.coefficients))
        return mp.polyval(desc, z, derivative=derivative)


def _coefficient_matrix(polys: Sequence[Polynomial]) -> np.ndarray:
    width = max(1, max((len(p) for p in polys), default=1))
    matrix = np.zeros((len(polys), width))
    for row, p in enumerate(polys):
        matrix[row, :len(p)] = p.coefficients
    return matrix


def _rows_with_derivative(matrix: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Every row polynomial and its derivative at every point, shape (points, rows)"""
    width = matrix.shape[1]
    powers = z[:, None] ** np.arange(width)[None, :]
    values = powers @ matrix.T
    slopes = matrix[:, 1:] * np.arange(1, width)[None, :]
    return values, powers[:, :width - 1] @ slopes.T


def _renormalise(v: np.ndarray, w: np.ndarray, log_scale: np.ndarray):
    peak = np.maximum(np.abs(v).max(axis=1), np.abs(w).max(axis=1))
    peak = np.where((peak > 0) & np.isfinite(peak), peak, 1.0)
    return v / peak[:, None], w / peak[:, None], log_scale + np.log(peak)


class RecursionEvaluator:
    """
    Z_{G_n}(z) and Z_{G_n}'(z) through the polynomial recursion instead of
    the coefficients of Z_{G_n}. Values and derivatives move through the
    levels together and share one rescaling per point and level, so the
    evaluation stays well conditioned for degrees in the thousands.
    """

    def __init__(self, d: GluingData, start: PolyVector, levels: int,
                 plan: Optional[RecursionPlan] = None):
        if levels < 0:
            raise InvalidArgumentError(f"Level must be >= 0, got {levels}")
        plan = plan or compile_plan(d)
        if len(start.entries) != 1 << plan.k:
            raise InvalidArgumentError(f"Start vector has {len(start.entries)} entries, expected {1 << plan.k}")
        self.levels = levels
        self.m = plan.m
        self.size = 1 << plan.k
        self.ones = tuple(bin(y).count("1") for y in range(self.size))

        self.start = start.entries
        self.start_slopes = tuple(p.derivative() for p in start.entries)
        self.start_matrix = _coefficient_matrix(start.entries)

        outputs, indices, weights = [], [], []
        for x, terms in enumerate(plan.terms):
            for idx, weight in terms:
                outputs.append(x)
                indices.append(idx)
                weights.append(weight)
        self.terms = tuple(zip(outputs, indices, weights, (w.derivative() for w in weights)))
        self.term_index = np.array(indices, dtype=int).reshape(len(indices), self.m)
        self.weight_matrix = _coefficient_matrix(weights)
        self.gather = np.zeros((len(indices), self.size))
        self.gather[np.arange(len(indices)), outputs] = 1.0

    def newton_ratio(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Z/Z' and the log of the common scale the values were carried at"""
        z = np.asarray(z, dtype=complex)
        ratio = np.empty(len(z), dtype=complex)
        log_scale = np.empty(len(z), dtype=float)
        block = max(1, BLOCK_ELEMENTS // max(1, self.term_index.size))
        for start in range(0, len(z), block):
            chunk = slice(start, start + block)
            ratio[chunk], log_scale[chunk] = self._ratio_block(z[chunk])
        return ratio, log_scale

    def _ratio_block(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ones = np.array(self.ones)
        v, w = _rows_with_derivative(self.start_matrix, z)
        v, w, log_scale = _renormalise(v, w, np.zeros(len(z)))
        weights, slopes = _rows_with_derivative(self.weight_matrix, z)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            inv = 1.0 / z
            scale = inv[:, None] ** ones[None, :]
            shift = ones[None, :] * inv[:, None]
            for _ in range(self.levels):
                r = v * scale
                dr = (w - shift * v) * scale
                factors = r[:, self.term_index]
                factor_slopes = dr[:, self.term_index]
                prod = np.prod(factors, axis=2)
                dprod = np.zeros_like(prod)
                for i in range(self.m):
                    dprod += factor_slopes[:, :, i] * np.prod(np.delete(factors, i, axis=2), axis=2)
                v = (weights * prod) @ self.gather
                w = (slopes * prod + weights * dprod) @ self.gather
                v, w, log_scale = _renormalise(v, w, self.m * log_scale)
            ratio = v.sum(axis=1) / w.sum(axis=1)
        return ratio, log_scale

    def value_mp(self, z, derivative: bool = False):
        """Z(z), or (Z(z), Z'(z)), at the current mpmath precision"""
        v = [p(z) for p in self.start]
        w = [p(z) for p in self.start_slopes] if derivative else None
        inv = 1 / z
        inv_powers = [inv ** j for j in range(max(self.ones) + 1)]
        weights = [(weight(z), slope(z) if derivative else 0) for _, _, weight, slope in self.terms]
        for _ in range(self.levels):
            r = [v[y] * inv_powers[j] for y, j in enumerate(self.ones)]
            if derivative:
                dr = [(w[y] - j * v[y] * inv) * inv_powers[j] for y, j in enumerate(self.ones)]
            nv = [mp.mpc(0)] * self.size
            nw = [mp.mpc(0)] * self.size
            for (x, idx, _, _), (weight, slope) in zip(self.terms, weights):
                factors = [r[i] for i in idx]
                prod = mp.fprod(factors)
                nv[x] += weight * prod
                if derivative:
                    dprod = mp.fsum(
                        dr[c] * mp.fprod(factors[:i] + factors[i + 1:]) for i, c in enumerate(idx)
                    )
                    nw[x] += slope * prod + weight * dprod
            v, w = nv, nw
        if derivative:
            return mp.fsum(v), mp.fsum(w)
        return mp.fsum(v)


def newton_polygon_radii(coefficients: Sequence[int]) -> List[Tuple[int, float]]:
    """
    Upper convex hull of (i, log|c_i|): one (count, radius) pair per hull
    segment, count roots expected near the given radius.
    """
    points = [(i, math.log(abs(c))) for i, c in enumerate(coefficients) if c]
    hull: List[Tuple[int, float]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    segments = []
    for (xa, ya), (xb, yb) in zip(hull, hull[1:]):
        segments.append((xb - xa, math.exp((ya - yb) / (xb - xa))))
    return segments


def initial_guesses(coefficients: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    guesses = []
    phase = rng.uniform(0, 2 * math.pi)
    for count, radius in newton_polygon_radii(coefficients):
        angles = 2 * math.pi * np.arange(count) / count + phase + math.pi / (2 * count)
        guesses.append(radius * np.exp(1j * angles))
    return np.concatenate(guesses) if guesses else np.zeros(0, dtype=complex)


def _aberth_sums(z: np.ndarray, active: np.ndarray) -> np.ndarray:
    """sum_{j != i} 1/(z_i - z_j) for every active i"""
    out = np.empty(len(active), dtype=complex)
    block = max(1, BLOCK_ELEMENTS // max(1, len(z)))
    for start in range(0, len(active), block):
        rows = active[start:start + block]
        diff = z[rows][:, None] - z[None, :]
        diff[np.arange(len(rows)), rows] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            out[start:start + block] = (1.0 / diff).sum(axis=1)
    return out


def aberth(coefficients: Sequence[int], seed: Optional[int] = None,
           max_iterations: Optional[int] = None, tolerance: Optional[float] = None,
           evaluator=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Simultaneous Aberth-Ehrlich iteration in double precision, started on
    Newton-polygon circles. The evaluator defaults to the log-scaled
    coefficients. Returns the approximations and the indices still moving
    when the sweep budget ran out.
    """
    seed = seed if seed is not None else config.get("run.seed", 0)
    max_iterations = max_iterations or config.get("zeros.max_iterations", 500)
    tolerance = tolerance or config.get("tolerances.root_update", 1e-13)
    evaluator = evaluator or LogScaledPolynomial(coefficients)
    stall = math.sqrt(tolerance)

    z = initial_guesses(coefficients, np.random.default_rng(seed))
    active = np.arange(len(z))
    previous = np.full(len(z), np.inf)
    iterations = 0
    while len(active) and iterations < max_iterations:
        iterations += 1
        ratio, _ = evaluator.newton_ratio(z[active])
        sums = _aberth_sums(z, active)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            delta = ratio / (1.0 - ratio * sums)
        delta = np.where(np.isfinite(delta), delta, 0.0)
        z[active] = z[active] - delta

        size = np.abs(delta)
        reach = 1.0 + np.abs(z[active])
        done = size <= tolerance * reach
        # stalled at rounding level
        stalled = (size > 0.5 * previous[active]) & (size <= stall * reach)
        previous[active] = size
        active = active[~(done | stalled)]
    if len(active):
        logger.numeric_event("aberth", f"{len(active)} roots unconverged after {iterations} iterations")
    logger.debug(f"Aberth iteration on degree {len(z)} finished after {iterations} sweeps")
    return z, active


def _working_precision(rung: int, log_scale: float, norm_sq: int, count: int) -> int:
    """Bits that keep evaluation rounding below 2^-rung relative to ||c||"""
    extra = log_scale / math.log(2) - 0.5 * math.log2(norm_sq) if math.isfinite(log_scale) else 0.0
    return rung + GUARD_BITS + count.bit_length() + max(0, math.ceil(extra))


def residuals_at(evaluator, z: np.ndarray, indices: Sequence[int], norm_sq: int,
                 rung: int = 53) -> Dict[int, float]:
    """|p(z_i)| / ||c|| for the given indices, evaluated in mpmath"""
    indices = list(indices)
    if not indices:
        return {}
    _, log_scale = evaluator.newton_ratio(z[indices])
    out = {}
    for i, scale in zip(indices, log_scale):
        with mp.workprec(_working_precision(rung, float(scale), norm_sq, len(z))):
            value = evaluator.value_mp(mp.mpc(complex(z[i])))
            out[i] = float(abs(value) / mp.sqrt(norm_sq))
    return out


def refine_simultaneously(evaluator, z: np.ndarray, indices: Sequence[int], rung: int,
                          norm_sq: int, bound: float,
                          sweeps: int = REFINEMENT_SWEEPS) -> Tuple[List[int], Dict[int, float]]:
    """
    Aberth sweeps in mpmath over the given roots while every other root
    stays put and repels. Each root is carried at its own working precision.
    z is updated in place; returns the indices still above the bound and
    the residuals of the accepted ones, taken at the extended-precision
    value each reported double rounds.
    """
    points = {i: mp.mpc(complex(z[i])) for i in indices}
    accepted: Dict[int, float] = {}
    active = list(indices)
    for _ in range(sweeps):
        if not active:
            break
        _, log_scale = evaluator.newton_ratio(z[active])
        # the repulsion term only rescales a small Newton step
        sums = _aberth_sums(z, np.array(active))
        moving = []
        for i, scale, s in zip(active, log_scale, sums):
            with mp.workprec(_working_precision(rung, float(scale), norm_sq, len(z))):
                value, slope = evaluator.value_mp(points[i], derivative=True)
                residual = float(abs(value) / mp.sqrt(norm_sq))
                if residual < bound:
                    accepted[i] = residual
                    continue
                if slope == 0:
                    moving.append(i)
                    continue
                ratio = value / slope
                repel = mp.mpc(complex(s)) if np.isfinite(s) else 0
                points[i] = points[i] - ratio / (1 - ratio * repel)
            z[i] = complex(points[i])
            moving.append(i)
        active = moving
    return active, accepted


def backward_error(p: Polynomial, r: complex, precision: Optional[int] = None) -> float:
    """|p(r)| / ||c||_2 evaluated in mpmath, so no overflow"""
    if p.is_zero():
        raise InvalidArgumentError("Backward error of the zero polynomial is undefined")
    evaluator = LogScaledPolynomial(p.coefficients)
    norm_sq = sum(c * c for c in p.coefficients)
    if precision is None:
        _, log_scale = evaluator.newton_ratio(np.array([complex(r)]))
        precision = _working_precision(53, float(log_scale[0]), norm_sq, len(p))
    with mp.workprec(precision):
        return float(abs(evaluator.value_mp(mp.mpc(complex(r)))) / mp.sqrt(norm_sq))


def roots(p: Polynomial, seed: Optional[int] = None,
          ladder: Optional[Sequence[int]] = None, evaluator=None) -> List[complex]:
    """All roots with multiplicity; lambda^t factors are split off first"""
    roots_, _ = roots_with_residuals(p, seed, ladder, evaluator)
    return roots_


def roots_with_residuals(p: Polynomial, seed: Optional[int] = None,
                         ladder: Optional[Sequence[int]] = None,
                         evaluator=None) -> Tuple[List[complex], List[float]]:
    """
    Double-precision Aberth first; roots whose residual fails the bound are
    refined together at every further rung of the precision ladder. An
    evaluator other than the coefficients must compute p itself, so p needs
    a nonzero constant term then.
    """
    if p.is_zero():
        raise InvalidArgumentError("The zero polynomial has no finite root set")
    ladder = list(ladder or config.get("zeros.precision_ladder", [53, 106, 212]))
    bound = config.get("tolerances.root_residual", 1e-8)

    t = p.valuation()
    if evaluator is not None and t:
        raise InvalidArgumentError("A custom evaluator needs a polynomial with nonzero constant term")
    reduced = p.divide_by_power(t)
    coeffs = reduced.coefficients
    found: List[complex] = [0j] * t
    residuals: List[float] = [0.0] * t
    if reduced.degree == 0:
        return found, residuals
    if reduced.degree == 1:
        found.append(complex(-coeffs[0] / coeffs[1]))
        residuals.append(0.0)
        return found, residuals

    evaluator = evaluator or LogScaledPolynomial(coeffs)
    norm_sq = sum(c * c for c in coeffs)
    z, _ = aberth(coeffs, seed=seed, evaluator=evaluator)
    errors = residuals_at(evaluator, z, range(len(z)), norm_sq, ladder[0])
    stuck = [i for i in range(len(z)) if not errors[i] < bound]
    for rung in ladder[1:]:
        if not stuck:
            break
        logger.numeric_event("precision ladder", f"refining {len(stuck)} roots at {rung} bits")
        stuck, accepted = refine_simultaneously(evaluator, z, stuck, rung, norm_sq, bound)
        errors.update(accepted)
    if stuck:
        raise RootFindingError(f"Roots of a degree-{reduced.degree} polynomial failed the residual bound", stuck)

    found.extend(complex(r) for r in z)
    residuals.extend(errors[i] for i in range(len(z)))
    order = sorted(range(len(found)), key=lambda i: (found[i].real, found[i].imag))
    return [found[i] for i in order], [residuals[i] for i in order]


def snap_real(values: Sequence[complex], tolerance: Optional[float] = None) -> List[complex]:
    tolerance = tolerance if tolerance is not None else config.get("tolerances.real_snap", 1e-10)
    return [complex(r.real, 0.0) if abs(r.imag) < tolerance * (1 + abs(r)) else r for r in values]


def conjugate_defect(values: Sequence[complex]) -> float:
    """Largest distance from a root to its nearest conjugate in the set"""
    arr = np.asarray(values, dtype=complex)
    if not len(arr):
        return 0.0
    gaps = np.abs(arr[:, None] - np.conj(arr)[None, :])
    return float(np.max(np.min(gaps, axis=1)))


# ------------------------------------------------------------------ atlas

@dataclass
class AtlasLevel:
    n: int
    degree: int
    roots: List[complex]
    residuals: List[float]

    @property
    def max_modulus(self) -> float:
        return max((abs(r) for r in self.roots), default=0.0)


@dataclass
class ZeroAtlas:
    levels: List[AtlasLevel] = field(default_factory=list)

    def max_moduli(self) -> List[float]:
        return [level.max_modulus for level in self.levels]

    def to_rows(self) -> List[Tuple[int, float, float, float, float]]:
        rows = []
        for level in self.levels:
            for r, res in zip(level.roots, level.residuals):
                rows.append((level.n, r.real, r.imag, abs(r), res))
        return rows

    def summary(self) -> Dict:
        verdict = boundedness_report(self)
        return {
            "levels": [
                {"n": lvl.n, "degree": lvl.degree, "max_modulus": lvl.max_modulus}
                for lvl in self.levels
            ],
            "verdict": verdict.verdict,
            "early_max": verdict.early_max,
            "late_max": verdict.late_max,
            "growth_ratios": verdict.growth_ratios,
        }


def atlas(d: GluingData, g0: MarkedGraph, n_max: int, seed: Optional[int] = None) -> ZeroAtlas:
    """
    Roots of Z_{G_n} for every level the polynomial engine delivers. The
    exact coefficients give the starting circles and the residual scale;
    the iteration itself evaluates through the recursion.
    """
    bound = config.get("tolerances.root_residual", 1e-8)
    result = ZeroAtlas()
    vectors = sequence(d, g0, n_max)
    plan = compile_plan(d)
    for vector in vectors:
        poly = total(vector)
        evaluator = RecursionEvaluator(d, vectors[0], vector.level, plan)
        found, residuals = roots_with_residuals(poly, seed, evaluator=evaluator)
        if len(found) != poly.degree:
            raise RootFindingError(f"Level {vector.level}: {len(found)} roots for degree {poly.degree}")
        bad = [i for i, res in enumerate(residuals) if not res < bound]
        if bad:
            raise RootFindingError(f"Level {vector.level}: residual bound violated", bad)
        result.levels.append(AtlasLevel(vector.level, poly.degree, snap_real(found), residuals))
        logger.info(f"Zero atlas level {vector.level}: degree {poly.degree}, "
                    f"max modulus {result.levels[-1].max_modulus:.6g}")
    return result


@dataclass(frozen=True)
class BoundednessVerdict:
    verdict: str
    early_max: Optional[float]
    late_max: Optional[float]
    growth_ratios: Tuple[float, ...]


def boundedness_report(a: ZeroAtlas, plateau_ratio: Optional[float] = None,
                       growth_ratio: Optional[float] = None) -> BoundednessVerdict:
    """
    growing: the last three successive max-modulus ratios are all at least
    growth_ratio. bounded-plateau: the last three levels stay within
    plateau_ratio of the best of an earlier window of three.
    """
    plateau_ratio = plateau_ratio or config.get("zeros.plateau_ratio", 1.2)
    growth_ratio = growth_ratio or config.get("zeros.growth_ratio", 1.5)
    moduli = a.max_moduli()
    if len(moduli) < 6:
        return BoundednessVerdict(VERDICT_INCONCLUSIVE, None, None, ())

    ratios = tuple(
        (b / a_ if a_ > 0 else math.inf) for a_, b in zip(moduli[-4:-1], moduli[-3:])
    )
    late_start = len(moduli) - 3
    late = moduli[late_start:]
    early = moduli[late_start - 4:late_start - 1] if late_start >= 4 else moduli[:3]
    early_max, late_max = max(early), max(late)

    if all(r >= growth_ratio for r in ratios):
        verdict = VERDICT_GROWING
    elif late_max <= plateau_ratio * early_max:
        verdict = VERDICT_BOUNDED
    else:
        verdict = VERDICT_INCONCLUSIVE
    return BoundednessVerdict(verdict, early_max, late_max, ratios)
