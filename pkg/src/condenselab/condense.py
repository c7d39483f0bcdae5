"""Restriction-space search: condensation maxima, bound checks, optimality."""

from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from condenselab.config import DEFAULT, Config
from condenselab.constructions import modified_rubinstein, rubinstein_base
from condenselab.errors import CapacityError, InputShapeError, UsageError
from condenselab.fnrep import (
    DenseTruthTable,
    Restriction,
    StructuredFunction,
    classify,
    Constancy,
    enumerate_all_restrictions,
    enumerate_restrictions,
    materialize,
    random_restriction,
    restrict,
    restrict_table,
    restriction_count,
    restrictions_with_free_set,
)
from condenselab.measures import (
    MeasureKind,
    MeasureSpec,
    Tag,
    block_sensitivity,
    certificate,
    compute_measure,
    fourier_sparsity,
)
from condenselab.reports import EXHAUSTIVE, ClaimReport, ClaimStatus, bound_status, sampled_mode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Exhaustive:
    label: str = "Exhaustive"

    def as_mode(self) -> Dict[str, Any]:
        return dict(EXHAUSTIVE)


@dataclass(frozen=True)
class Sample:
    seed: int
    trials: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise UsageError(f"sample trials must be >= 1, got {self.trials}")

    @property
    def label(self) -> str:
        return f"Sampled(seed={self.seed}, trials={self.trials})"

    def as_mode(self) -> Dict[str, Any]:
        return sampled_mode(self.seed, self.trials)


Mode = Union[Exhaustive, Sample]


@dataclass(frozen=True)
class CondensationQuery:
    function: StructuredFunction
    measure: MeasureSpec
    free_budget: int
    mode: Mode = Exhaustive()

    def __post_init__(self) -> None:
        if not 0 <= self.free_budget <= self.function.arity:
            raise InputShapeError(f"free budget {self.free_budget} outside [0, {self.function.arity}]")


@dataclass(frozen=True)
class CondensationResult:
    value: int
    witness: Restriction
    mode: Mode
    examined: int
    # a sampled maximum is only a lower bound on the true one
    lower_bound: bool = False
    rechecked: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "witness": str(self.witness),
            "mode": self.mode.as_mode(),
            "examined": self.examined,
            "lower_bound": self.lower_bound,
        }


class _RestrictedMeasure:
    """Measure of restricted tables, memoized by the restricted table itself."""

    def __init__(self, spec: MeasureSpec, config: Config) -> None:
        self.spec = spec
        self.config = config
        self.memo: Dict[Tuple[int, bytes], int] = {}

    def __call__(self, sub: DenseTruthTable) -> int:
        # constant restrictions count as 0 for every measure
        if classify(sub) is not Constancy.NONCONSTANT:
            return 0
        key = (sub.arity, sub.packed)
        value = self.memo.get(key)
        if value is None:
            value = self.memo[key] = compute_measure(sub, self.spec, self.config)
        return value


def _scan_free_sets(
    packed: bytes, arity: int, spec: MeasureSpec, free_sets: Sequence[Tuple[int, ...]], config: Config
) -> Tuple[int, int, Optional[Restriction], int]:
    """Best (value, first position, witness, examined) over the given free sets."""
    table = DenseTruthTable(arity, packed)
    measure = _RestrictedMeasure(spec, config)
    best_value, best_pos, best_rho = -1, -1, None
    position = 0
    for free_set in free_sets:
        for rho in restrictions_with_free_set(arity, free_set):
            value = measure(restrict_table(table, rho))
            if value > best_value:
                best_value, best_pos, best_rho = value, position, rho
            position += 1
    return best_value, best_pos, best_rho, position


def _shards(items: List[Tuple[int, ...]], jobs: int) -> List[List[Tuple[int, ...]]]:
    size = max(1, -(-len(items) // jobs))
    return [items[start:start + size] for start in range(0, len(items), size)]


def _exhaustive_max(
    table: DenseTruthTable, spec: MeasureSpec, free_budget: int, config: Config, jobs: int
) -> Tuple[int, Restriction, int]:
    # raises CapacityError before any work when the space is too large
    enumerate_restrictions(table.arity, free_budget, config)
    free_sets = list(itertools.combinations(range(table.arity), free_budget))
    if jobs <= 1 or len(free_sets) < 2:
        value, _, witness, examined = _scan_free_sets(table.packed, table.arity, spec, free_sets, config)
        return value, witness, examined
    shards = _shards(free_sets, jobs)
    logger.info("scanning %d free sets in %d shards", len(free_sets), len(shards))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(_scan_free_sets, table.packed, table.arity, spec, shard, config) for shard in shards
        ]
        results = [future.result() for future in futures]
    best_value, best_witness, examined = -1, None, 0
    # shards are in enumeration order, so strict improvement keeps the first witness
    for value, _, witness, count in results:
        examined += count
        if value > best_value:
            best_value, best_witness = value, witness
    return best_value, best_witness, examined


def _sampled_max(
    table: DenseTruthTable, spec: MeasureSpec, free_budget: int, mode: Sample, config: Config
) -> Tuple[int, Restriction, int]:
    rng = np.random.default_rng(mode.seed)
    measure = _RestrictedMeasure(spec, config)
    best_value, best_rho = -1, None
    for _ in range(mode.trials):
        rho = random_restriction(table.arity, free_budget, rng)
        value = measure(restrict_table(table, rho))
        if value > best_value:
            best_value, best_rho = value, rho
    return best_value, best_rho, mode.trials


def _recheck(f: StructuredFunction, spec: MeasureSpec, rho: Restriction, config: Config) -> int:
    sub = materialize(restrict(f, rho), config)
    if classify(sub) is not Constancy.NONCONSTANT:
        return 0
    return compute_measure(sub, spec, config)


def max_measure_over_restrictions(
    query: CondensationQuery, config: Config = DEFAULT, jobs: int = 1
) -> CondensationResult:
    f = query.function
    table = materialize(f, config)
    if isinstance(query.mode, Sample):
        value, witness, examined = _sampled_max(table, query.measure, query.free_budget, query.mode, config)
    else:
        value, witness, examined = _exhaustive_max(table, query.measure, query.free_budget, config, jobs)
    rechecked = _recheck(f, query.measure, witness, config)
    if rechecked != value:
        raise AssertionError(f"witness {witness} re-measures to {rechecked}, search reported {value}")
    logger.debug(
        "max %s over %d restrictions with %d free: %d at %s",
        query.measure.label,
        examined,
        query.free_budget,
        value,
        witness,
    )
    return CondensationResult(
        value=value,
        witness=witness,
        mode=query.mode,
        examined=examined,
        lower_bound=isinstance(query.mode, Sample),
    )


@dataclass(frozen=True)
class ProfileRow:
    free_budget: int
    value: Optional[int]
    witness: Optional[Restriction]
    mode: str
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "free_budget": self.free_budget,
            "value": self.value,
            "witness": None if self.witness is None else str(self.witness),
            "mode": self.mode,
            "error": self.error,
        }


def condensation_profile(
    f: StructuredFunction,
    measure: MeasureSpec,
    budgets: Sequence[int],
    mode: Mode = Exhaustive(),
    config: Config = DEFAULT,
    jobs: int = 1,
) -> List[ProfileRow]:
    rows = []
    for budget in budgets:
        try:
            result = max_measure_over_restrictions(CondensationQuery(f, measure, budget, mode), config, jobs)
        except CapacityError as exc:
            logger.info("profile row %d skipped: %s", budget, exc)
            rows.append(ProfileRow(budget, None, None, mode.label, error=str(exc)))
            continue
        rows.append(ProfileRow(budget, result.value, result.witness, mode.label))
    return rows


def profile_is_monotone(rows: Sequence[ProfileRow]) -> bool:
    """Whether the measured rows are non-decreasing in the free budget."""
    values = [row.value for row in sorted(rows, key=lambda row: row.free_budget) if row.value is not None]
    return all(a <= b for a, b in zip(values, values[1:]))


# --- bound checks ------------------------------------------------------------------


def verify_base_restriction_lemmas(b: int, n: int, config: Config = DEFAULT) -> ClaimReport:
    """Check C0(g|rho) <= max(2, r/b) and bs0(g|rho) <= max(1, r/b) over every restriction."""
    started = time.perf_counter()
    g = rubinstein_base(b, n)
    table = materialize(g, config)
    restrictions = enumerate_all_restrictions(g.arity, config)
    certificate_memo: Dict[bytes, int] = {}
    block_memo: Dict[bytes, int] = {}
    examined = nonconstant = 0
    max_c0 = max_bs0 = 0
    violations: List[Dict[str, Any]] = []
    for rho in restrictions:
        examined += 1
        sub = restrict_table(table, rho)
        if classify(sub) is not Constancy.NONCONSTANT:
            continue
        nonconstant += 1
        key = sub.packed + bytes([sub.arity])
        if key not in certificate_memo:
            certificate_memo[key] = certificate(sub, Tag.ON_ZEROS, config)
            block_memo[key] = block_sensitivity(sub, Tag.ON_ZEROS, config)
        c0, bs0 = certificate_memo[key], block_memo[key]
        ratio = Fraction(rho.free_count, b)
        max_c0, max_bs0 = max(max_c0, c0), max(max_bs0, bs0)
        if c0 > max(Fraction(2), ratio) or bs0 > max(Fraction(1), ratio):
            violations.append({"restriction": str(rho), "C0": c0, "bs0": bs0, "free": rho.free_count})
    logger.info("base restriction lemmas b=%d n=%d: %d restrictions, %d violations", b, n, examined, len(violations))
    return ClaimReport(
        claim_id="RUB-LEMMA",
        statement="restricted base function: C0 <= max(2, r/b) and bs0 <= max(1, r/b)",
        params={"b": b, "n": n},
        expected="no violation",
        observed={"examined": examined, "nonconstant": nonconstant, "violations": len(violations),
                  "max_C0": max_c0, "max_bs0": max_bs0},
        status=ClaimStatus.PASS if not violations else ClaimStatus.FAIL,
        runtime_ms=int((time.perf_counter() - started) * 1000),
        details={"violations": violations[:20]},
    )


def incondensability_bounds(b: int, n: int, r: int, free_budget: int, kind: MeasureKind) -> Dict[str, Fraction]:
    """Per-side closed-form bounds: value-1 side b*n, value-0 side t/b + r (2r + t/b for C)."""
    ratio = Fraction(free_budget, b)
    zero_side = ratio + r if kind is MeasureKind.BLOCK_SENSITIVITY else ratio + 2 * r
    ones_side = Fraction(b * n)
    return {"ones": ones_side, "zeros": zero_side, "overall": max(ones_side, zero_side)}


_EXHAUSTIVE_ARITY = 9


def verify_incondensability(
    b: int,
    n: int,
    r: int,
    free_budget: int,
    kind: MeasureKind = MeasureKind.BLOCK_SENSITIVITY,
    mode: Optional[Mode] = None,
    config: Config = DEFAULT,
) -> ClaimReport:
    if kind not in (MeasureKind.BLOCK_SENSITIVITY, MeasureKind.CERTIFICATE):
        raise UsageError(f"incondensability is checked for bs and C, not {kind.value}")
    started = time.perf_counter()
    f = modified_rubinstein(b, n, r)
    if not 0 <= free_budget <= f.arity:
        raise InputShapeError(f"free budget {free_budget} outside [0, {f.arity}]")
    if mode is None:
        mode = Exhaustive() if f.arity <= _EXHAUSTIVE_ARITY else Sample(config.default_seed, 10_000)
    table = materialize(f, config)
    bounds = incondensability_bounds(b, n, r, free_budget, kind)
    ones_measure = _RestrictedMeasure(MeasureSpec(kind, Tag.ON_ONES), config)
    zeros_measure = _RestrictedMeasure(MeasureSpec(kind, Tag.ON_ZEROS), config)

    if isinstance(mode, Sample):
        rng = np.random.default_rng(mode.seed)
        restrictions: Iterator[Restriction] = (
            random_restriction(f.arity, free_budget, rng) for _ in range(mode.trials)
        )
    else:
        restrictions = enumerate_restrictions(f.arity, free_budget, config)

    examined = 0
    max_ones = max_zeros = 0
    violations: List[Dict[str, Any]] = []
    for rho in restrictions:
        examined += 1
        sub = restrict_table(table, rho)
        ones, zeros = ones_measure(sub), zeros_measure(sub)
        max_ones, max_zeros = max(max_ones, ones), max(max_zeros, zeros)
        if ones > bounds["ones"] or zeros > bounds["zeros"]:
            violations.append({"restriction": str(rho), "ones": ones, "zeros": zeros})
    observed = max(max_ones, max_zeros)
    logger.info(
        "incondensability %s b=%d n=%d r=%d t=%d: max %d vs bound %s over %d restrictions",
        kind.value, b, n, r, free_budget, observed, bounds["overall"], examined,
    )
    return ClaimReport(
        claim_id="INCOND",
        statement="restricted modified Rubinstein function: measure <= max(b*n, t/b + r) (2r + t/b for C)",
        params={"b": b, "n": n, "r": r, "free": free_budget, "measure": kind.value},
        expected={"bound": bounds["overall"], "ones_side": bounds["ones"], "zeros_side": bounds["zeros"]},
        observed={"max": observed, "ones_side": max_ones, "zeros_side": max_zeros, "examined": examined},
        status=bound_status(not violations, mode.as_mode()),
        mode=mode.as_mode(),
        runtime_ms=int((time.perf_counter() - started) * 1000),
        details={"violations": violations[:20]},
    )


# --- optimality of the exponent ------------------------------------------------------


@dataclass(frozen=True)
class OptimalityPoint:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.alpha < 0 or self.beta < 0:
            raise InputShapeError("alpha and beta must be non-negative")

    def to_dict(self) -> Dict[str, str]:
        return {"alpha": str(self.alpha), "beta": str(self.beta)}


def optimality_exponent(point: OptimalityPoint) -> Fraction:
    """Exponent relating bs(f) to the best restricted bs, for b = n**alpha and r = n**beta."""
    a, b = point.alpha, point.beta
    return Fraction(max(a + 1, b + 1)) / max(Fraction(1), b, a + 1, b + 1 - a)


@dataclass(frozen=True)
class OptimalityGridResult:
    value: Fraction
    argmax: OptimalityPoint
    maximizers: Tuple[OptimalityPoint, ...] = field(default=())
    points: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": str(self.value),
            "argmax": self.argmax.to_dict(),
            "maximizers": [p.to_dict() for p in self.maximizers],
            "points": self.points,
        }


def optimality_grid(step: Fraction, max_exponent: Fraction) -> OptimalityGridResult:
    step, max_exponent = Fraction(step), Fraction(max_exponent)
    if step <= 0:
        raise UsageError("grid step must be positive")
    if max_exponent < 0:
        raise UsageError("grid range must be non-negative")
    count = int(max_exponent // step) + 1
    axis = [k * step for k in range(count)]
    best: Optional[Fraction] = None
    maximizers: List[OptimalityPoint] = []
    for alpha in axis:
        for beta in axis:
            point = OptimalityPoint(alpha, beta)
            value = optimality_exponent(point)
            if best is None or value > best:
                best, maximizers = value, [point]
            elif value == best:
                maximizers.append(point)
    return OptimalityGridResult(best, maximizers[0], tuple(maximizers), count * count)


# --- Fourier sparsity --------------------------------------------------------------------


def sparsity_condensation_search(
    f: StructuredFunction, budget: int, config: Config = DEFAULT
) -> Tuple[bool, Optional[Restriction]]:
    """First restriction with at most ``budget`` free variables keeping the sparsity of ``f``."""
    if not 0 <= budget <= f.arity:
        raise InputShapeError(f"budget {budget} outside [0, {f.arity}]")
    table = materialize(f, config)
    target = fourier_sparsity(table, config)
    required = sum(restriction_count(f.arity, t) for t in range(budget + 1))
    if required > config.enumeration_budget:
        raise CapacityError("enumeration_budget", config.enumeration_budget, required)
    for free_count in range(budget + 1):
        for rho in enumerate_restrictions(f.arity, free_count, config):
            if fourier_sparsity(restrict_table(table, rho), config) == target:
                return True, rho
    return False, None
