"""
Exact 2^k-vector polynomial recursion

entry(x) at level n+1 is a sum over copy assignments Y = (y(1), ..., y(m)) of
    prod_i entry(y(i)) / lambda^|y(i)|  *  prod_e Z_e(Y|e, x|e)
The division is exact per copy factor since an occupied mark of a copy
contributes one lambda to that copy's entry.
"""

import math
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config_manager import config
from src.core.errors import InexactDivisionError, InvalidArgumentError
from src.core.gluing import GluingData, require_valid
from src.core.graph import (
    MarkedGraph,
    all_assignments,
    assignment_bits,
    conditioned_vector,
    constrained_poly,
    format_assignment,
)
from src.core.recursion import vertex_count_sequence
from src.utils.logger import logger
from src.utils.polynomial import Polynomial, poly_product, poly_sum

WeightKey = Tuple[Tuple[int, ...], Optional[int]]


def _ones(index: int) -> int:
    return bin(index).count("1")


@dataclass(frozen=True)
class PolyVector:
    """Conditioned independence polynomials of G_n in assignment order"""

    entries: Tuple[Polynomial, ...]
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        size = len(self.entries)
        if size < 4 or size & (size - 1):
            raise InvalidArgumentError(f"A vector needs 2^k entries with k >= 2, got {size}")

    @property
    def k(self) -> int:
        return len(self.entries).bit_length() - 1

    def entry(self, bits: Sequence[int]) -> Polynomial:
        return self.entries[sum(b << j for j, b in enumerate(bits))]

    def evaluate(self, lam: complex) -> np.ndarray:
        return np.array([complex(p(lam)) for p in self.entries], dtype=complex)

    def max_degree(self) -> int:
        return max(p.degree for p in self.entries)


@dataclass(frozen=True)
class LocalWeightTable:
    """Z_e per edge, keyed by (member bits in sorted member order, root bit or None)"""

    weights: Dict[str, Dict[WeightKey, Polynomial]]

    def weight(self, edge_id: str, member_bits: Sequence[int], root_bit: Optional[int] = None) -> Polynomial:
        return self.weights[edge_id].get((tuple(member_bits), root_bit), Polynomial.zero())


def local_weights(d: GluingData) -> LocalWeightTable:
    """
    Conditioned partition function of every connector with attached vertices
    fixed to the member bits and, for Phi-edges, the root fixed to the root bit.
    Conflicting requirements on one vertex give the zero polynomial.
    """
    require_valid(d)
    table: Dict[str, Dict[WeightKey, Polynomial]] = {}
    for e in d.edges:
        conn = d.connecting[e.id]
        attach = d.attach[e.id]
        root_bits = (0, 1) if d.root_label(e.id) is not None else (None,)
        entries = {}
        for bits in product((0, 1), repeat=len(e)):
            for root_bit in root_bits:
                constraints: Dict[int, int] = {}
                consistent = True
                pins = [(attach[i], b) for i, b in zip(e.members, bits)]
                if root_bit is not None:
                    pins.append((conn.root, root_bit))
                for vertex, bit in pins:
                    if constraints.setdefault(vertex, bit) != bit:
                        consistent = False
                        break
                entries[(bits, root_bit)] = (
                    constrained_poly(conn.sigma, constraints) if consistent else Polynomial.zero()
                )
        table[e.id] = entries
    return LocalWeightTable(table)


# ------------------------------------------------------------------ recursion plan

@dataclass(frozen=True)
class RecursionPlan:
    """
    For every output assignment x the surviving terms of the recursion:
    (assignment index of each copy, product of local weights).
    """

    m: int
    k: int
    terms: Tuple[Tuple[Tuple[Tuple[int, ...], Polynomial], ...], ...]

    def term_count(self) -> int:
        return sum(len(t) for t in self.terms)

    def numeric(self, lam: complex) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Per output: (T x m index array, T complex weights) at the given lambda"""
        out = []
        for terms in self.terms:
            if not terms:
                out.append((np.zeros((0, self.m), dtype=int), np.zeros(0, dtype=complex)))
                continue
            idx = np.array([t[0] for t in terms], dtype=int)
            weights = np.array([complex(t[1](lam)) for t in terms], dtype=complex)
            out.append((idx, weights))
        return out


def compile_plan(d: GluingData, table: Optional[LocalWeightTable] = None) -> RecursionPlan:
    """Expand the sum edge by edge, keeping only nonzero local weights"""
    table = table or local_weights(d)
    plan = []
    for x in all_assignments(d.k):
        states: Dict[Tuple[int, ...], Polynomial] = {(0,) * d.m: Polynomial.one()}
        for e in d.edges:
            j = d.root_label(e.id)
            root_bit = x[j - 1] if j is not None else None
            choices = []
            for bits in product((0, 1), repeat=len(e)):
                w = table.weight(e.id, bits, root_bit)
                if w:
                    choices.append((bits, w))
            shift = e.label - 1
            nxt: Dict[Tuple[int, ...], Polynomial] = {}
            for idx, weight in states.items():
                for bits, w in choices:
                    key = list(idx)
                    for member, bit in zip(e.members, bits):
                        key[member - 1] |= bit << shift
                    key = tuple(key)
                    nxt[key] = nxt.get(key, Polynomial.zero()) + weight * w
            states = nxt
        plan.append(tuple((idx, w) for idx, w in sorted(states.items()) if w))
    result = RecursionPlan(d.m, d.k, tuple(plan))
    logger.debug(f"Compiled recursion plan with {result.term_count()} terms")
    return result


# ------------------------------------------------------------------ exact step

def initial_vector(g0: MarkedGraph, budget: Optional[int] = None) -> PolyVector:
    return PolyVector(tuple(conditioned_vector(g0, budget)), 0)


def _reduced_copies(v: PolyVector) -> List[Polynomial]:
    out = []
    for y, p in enumerate(v.entries):
        try:
            out.append(p.divide_by_power(_ones(y)))
        except InexactDivisionError as err:
            raise InexactDivisionError(
                f"Copy factor for assignment {format_assignment(assignment_bits(y, v.k))} "
                f"at level {v.level}: {err}"
            ) from err
    return out


def step(d: GluingData, v: PolyVector, plan: Optional[RecursionPlan] = None) -> PolyVector:
    if len(v.entries) != 1 << d.k:
        raise InvalidArgumentError(f"Vector has {len(v.entries)} entries, expected {1 << d.k}")
    plan = plan or compile_plan(d)
    reduced = _reduced_copies(v)
    products: Dict[Tuple[int, ...], Polynomial] = {}

    def copies_product(idx):
        key = tuple(sorted(idx))
        if key not in products:
            products[key] = poly_product(reduced[i] for i in key)
        return products[key]

    entries = []
    for terms in plan.terms:
        entries.append(poly_sum(w * copies_product(idx) for idx, w in terms))
    return PolyVector(tuple(entries), v.level + 1)


def step_naive(d: GluingData, v: PolyVector, table: Optional[LocalWeightTable] = None) -> PolyVector:
    """Literal sum over all 2^(mk) copy assignments, each term divided separately"""
    if len(v.entries) != 1 << d.k:
        raise InvalidArgumentError(f"Vector has {len(v.entries)} entries, expected {1 << d.k}")
    table = table or local_weights(d)
    entries = []
    for x in all_assignments(d.k):
        total = Polynomial.zero()
        for ys in product(range(1 << d.k), repeat=d.m):
            weight = Polynomial.one()
            ones = 0
            for e in d.edges:
                bits = tuple((ys[i - 1] >> (e.label - 1)) & 1 for i in e.members)
                ones += sum(bits)
                j = d.root_label(e.id)
                weight = weight * table.weight(e.id, bits, x[j - 1] if j is not None else None)
                if not weight:
                    break
            if not weight:
                continue
            term = poly_product(v.entries[y] for y in ys) * weight
            total = total + term.divide_by_power(ones)
        entries.append(total)
    return PolyVector(tuple(entries), v.level + 1)


def total(v: PolyVector) -> Polynomial:
    return poly_sum(v.entries)


def sequence(d: GluingData, g0: MarkedGraph, n_max: int,
             degree_budget: Optional[int] = None,
             brute_budget: Optional[int] = None) -> List[PolyVector]:
    """Levels 0..n_max; stops early (with a warning) once the degree budget would be exceeded"""
    require_valid(d)
    limit = degree_budget if degree_budget is not None else config.get("budgets.poly_degree", 100000)
    counts = vertex_count_sequence(d, g0.vertex_count, n_max)
    plan = compile_plan(d)
    vectors = [initial_vector(g0, brute_budget)]
    for n in range(1, n_max + 1):
        if counts[n] > limit:
            logger.numeric_event(
                "sequence truncated",
                f"level {n} may reach degree {counts[n]} over budget {limit}; returning levels 0..{n - 1}",
            )
            break
        vectors.append(step(d, vectors[-1], plan))
        logger.debug(f"Level {n}: max degree {vectors[-1].max_degree()}")
    return vectors


# ------------------------------------------------------------------ numeric map

def evaluate_step(d: GluingData, values: Sequence[complex], lam: complex,
                  plan: Optional[RecursionPlan] = None,
                  numeric_plan=None) -> np.ndarray:
    """The homogeneous degree-m map F at a fixed nonzero lambda"""
    if lam == 0:
        raise InvalidArgumentError("The numeric map needs lambda != 0")
    vals = np.asarray(values, dtype=complex)
    if vals.shape != (1 << d.k,):
        raise InvalidArgumentError(f"Expected {1 << d.k} coordinates, got shape {vals.shape}")
    if numeric_plan is None:
        numeric_plan = (plan or compile_plan(d)).numeric(lam)
    scale = np.array([lam ** -_ones(y) for y in range(1 << d.k)], dtype=complex)
    reduced = vals * scale
    out = np.empty(1 << d.k, dtype=complex)
    for x, (idx, weights) in enumerate(numeric_plan):
        out[x] = np.dot(weights, np.prod(reduced[idx], axis=1)) if len(weights) else 0.0
    return out


def free_energy_sequence(d: GluingData, g0: MarkedGraph, n_max: int, lam: complex,
                         brute_budget: Optional[int] = None) -> List[Optional[float]]:
    """log|Z_{G_n}(lambda)| / |V(G_n)| for n = 0..n_max; None where Z vanishes"""
    counts = vertex_count_sequence(d, g0.vertex_count, n_max)
    if lam == 0:
        return [0.0] * (n_max + 1)
    require_valid(d)
    numeric_plan = compile_plan(d).numeric(lam)
    u = initial_vector(g0, brute_budget).evaluate(lam)
    log_scale = 0.0
    values: List[Optional[float]] = []
    for n in range(n_max + 1):
        if n > 0:
            u = evaluate_step(d, u, lam, numeric_plan=numeric_plan)
            log_scale *= d.m
        peak = float(np.max(np.abs(u)))
        if peak == 0.0 or not math.isfinite(peak):
            logger.numeric_event("free energy", f"vector vanished at level {n}")
            values.extend([None] * (n_max + 1 - n))
            break
        u = u / peak
        log_scale += math.log(peak)
        z = abs(complex(np.sum(u)))
        values.append(None if z == 0.0 else (math.log(z) + log_scale) / counts[n])
    return values


def manifold_defects(v: PolyVector) -> List[Tuple[str, int]]:
    """
    Pairs (x, j) for which (x with j set to 1)*(0) != (x with j set to 0)*(e_j)
    exactly, x ranging over assignments with x_j = 0.
    """
    zero = v.entries[0]
    defects = []
    for j in range(v.k):
        unit = v.entries[1 << j]
        for x in range(1 << v.k):
            if x >> j & 1:
                continue
            lhs = v.entries[x | (1 << j)] * zero
            rhs = v.entries[x] * unit
            if lhs != rhs:
                defects.append((format_assignment(assignment_bits(x, v.k)), j + 1))
    return defects
