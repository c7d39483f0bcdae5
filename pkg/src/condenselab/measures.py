"""Exact complexity measures with explicit solver caps.

Every measure is computed exactly; exceeding a cap raises ``CapacityError``
instead of falling back to an approximation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from condenselab import andtree, spectral
from condenselab.andtree import AndDecisionTree
from condenselab.config import DEFAULT, Config
from condenselab.errors import CapacityError, InputShapeError, UsageError
from condenselab.fnrep import (
    Bits,
    DenseTruthTable,
    StructuredFunction,
    bits_to_index,
    materialize,
)

logger = logging.getLogger(__name__)


class Tag(Enum):
    ALL = "all"
    ON_ZEROS = "zeros"
    ON_ONES = "ones"


class MeasureKind(Enum):
    SENSITIVITY = "s"
    BLOCK_SENSITIVITY = "bs"
    CERTIFICATE = "C"
    DT_DEPTH = "D"
    ZERO_DEPTH = "D0"
    ONE_DEPTH = "D1"
    AND_DT_DEPTH = "and"
    OR_DT_DEPTH = "or"
    FOURIER_SPARSITY = "sparsity"
    DEGREE = "deg"


_TAGGED_KINDS = {MeasureKind.SENSITIVITY, MeasureKind.BLOCK_SENSITIVITY, MeasureKind.CERTIFICATE}

_KIND_ALIASES = {
    "sensitivity": MeasureKind.SENSITIVITY,
    "blocksensitivity": MeasureKind.BLOCK_SENSITIVITY,
    "block_sensitivity": MeasureKind.BLOCK_SENSITIVITY,
    "certificate": MeasureKind.CERTIFICATE,
    "dtdepth": MeasureKind.DT_DEPTH,
    "dt_depth": MeasureKind.DT_DEPTH,
    "zerodepth": MeasureKind.ZERO_DEPTH,
    "zero_depth": MeasureKind.ZERO_DEPTH,
    "onedepth": MeasureKind.ONE_DEPTH,
    "one_depth": MeasureKind.ONE_DEPTH,
    "anddtdepth": MeasureKind.AND_DT_DEPTH,
    "and_dt_depth": MeasureKind.AND_DT_DEPTH,
    "ordtdepth": MeasureKind.OR_DT_DEPTH,
    "or_dt_depth": MeasureKind.OR_DT_DEPTH,
    "fouriersparsity": MeasureKind.FOURIER_SPARSITY,
    "fourier_sparsity": MeasureKind.FOURIER_SPARSITY,
    "degree": MeasureKind.DEGREE,
}


@dataclass(frozen=True)
class MeasureSpec:
    kind: MeasureKind
    tag: Tag = Tag.ALL

    def __post_init__(self) -> None:
        if self.tag is not Tag.ALL and self.kind not in _TAGGED_KINDS:
            raise UsageError(f"value tag {self.tag.value} does not apply to {self.kind.value}")

    @property
    def label(self) -> str:
        if self.tag is Tag.ALL:
            return self.kind.value
        suffix = "0" if self.tag is Tag.ON_ZEROS else "1"
        return f"{self.kind.value}{suffix}"


def parse_measure(name: str, tag: Optional[str] = None) -> MeasureSpec:
    key = name.strip()
    kind = next((k for k in MeasureKind if k.value == key), None)
    if kind is None:
        kind = _KIND_ALIASES.get(key.lower())
    if kind is None:
        raise UsageError(f"unknown measure {name!r}")
    if tag is None:
        return MeasureSpec(kind)
    try:
        return MeasureSpec(kind, Tag(tag))
    except ValueError as exc:
        raise UsageError(f"unknown value tag {tag!r}; use zeros or ones") from exc


@dataclass(frozen=True)
class BlockFamily:
    """Pairwise-disjoint sensitive blocks (1-based variable indices) at ``point``."""

    blocks: Tuple[Tuple[int, ...], ...]
    point: Bits

    def verify(self, f: StructuredFunction) -> bool:
        seen: set[int] = set()
        value = f.evaluate(self.point)
        for block in self.blocks:
            if not block or seen.intersection(block):
                return False
            seen.update(block)
            flipped = list(self.point)
            for var in block:
                flipped[var - 1] ^= 1
            if f.evaluate(flipped) == value:
                return False
        return True

    def to_dict(self) -> Dict[str, object]:
        return {"blocks": [list(block) for block in self.blocks], "point": list(self.point)}


@dataclass(frozen=True)
class CertificateWitness:
    point: Bits
    positions: Tuple[int, ...]
    value: int

    def verify(self, f: StructuredFunction, config: Config = DEFAULT) -> bool:
        from condenselab.constructions import CertificateClaim, verify_certificate

        claim = CertificateClaim.of([(pos, self.point[pos - 1]) for pos in self.positions])
        return verify_certificate(f, self.point, claim, self.value, config)

    def to_dict(self) -> Dict[str, object]:
        return {"positions": list(self.positions), "point": list(self.point), "value": self.value}


def _dense(f: StructuredFunction, config: Config, cap_name: str, cap: int) -> DenseTruthTable:
    if f.arity > cap:
        raise CapacityError(cap_name, cap, f.arity)
    return materialize(f, config)


def _point(f: StructuredFunction, x: Sequence[int]) -> Bits:
    if len(x) != f.arity:
        raise InputShapeError(f"expected {f.arity} input bits, got {len(x)}")
    return tuple(int(bit) for bit in x)


def _tagged_indices(table: DenseTruthTable, tag: Tag) -> np.ndarray:
    values = table.values
    if tag is Tag.ON_ZEROS:
        return np.flatnonzero(values == 0)
    if tag is Tag.ON_ONES:
        return np.flatnonzero(values == 1)
    return np.arange(values.size)


def _mask_to_vars(mask: int) -> Tuple[int, ...]:
    out = []
    var = 1
    while mask:
        if mask & 1:
            out.append(var)
        mask >>= 1
        var += 1
    return tuple(out)


# --- sensitivity -----------------------------------------------------------


def _sensitivity_counts(table: DenseTruthTable) -> np.ndarray:
    values = table.values
    indices = np.arange(values.size)
    counts = np.zeros(values.size, dtype=np.int64)
    for i in range(table.arity):
        counts += values != values[indices ^ (1 << i)]
    return counts


def sensitivity_at(f: StructuredFunction, x: Sequence[int], config: Config = DEFAULT) -> int:
    point = _point(f, x)
    rows = np.tile(np.asarray(point, dtype=np.uint8), (f.arity + 1, 1))
    for i in range(f.arity):
        rows[i + 1, i] ^= 1
    outputs = f.evaluate_rows(rows)
    return int(np.count_nonzero(outputs[1:] != outputs[0]))


def sensitivity(f: StructuredFunction, tag: Tag = Tag.ALL, config: Config = DEFAULT) -> int:
    table = _dense(f, config, "dense_cap", config.dense_cap)
    points = _tagged_indices(table, tag)
    if points.size == 0:
        return 0
    return int(_sensitivity_counts(table)[points].max())


# --- sensitive blocks --------------------------------------------------------


def minimal_sensitive_blocks(table: DenseTruthTable, x_index: int) -> List[int]:
    """Bit masks of the inclusion-minimal sensitive blocks at ``x_index``.

    Sorted by size, then lexicographically by their variable lists.
    """
    values = table.values
    masks = np.arange(values.size)
    sensitive = values[masks ^ x_index] != values[x_index]
    sensitive[0] = False
    has_sensitive_subset = sensitive.copy()
    for i in range(table.arity):
        view = has_sensitive_subset.reshape(-1, 2, 2 ** i)
        view[:, 1, :] |= view[:, 0, :]
    has_proper = np.zeros_like(sensitive)
    for i in range(table.arity):
        target = has_proper.reshape(-1, 2, 2 ** i)
        source = has_sensitive_subset.reshape(-1, 2, 2 ** i)
        target[:, 1, :] |= source[:, 0, :]
    minimal = np.flatnonzero(sensitive & ~has_proper)
    blocks = [int(mask) for mask in minimal]
    blocks.sort(key=lambda mask: (bin(mask).count("1"), _mask_to_vars(mask)))
    return blocks


def _packing_key(blocks: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(sorted(_mask_to_vars(mask) for mask in blocks))


def max_disjoint_packing(blocks: Sequence[int]) -> List[int]:
    """Exact maximum set packing by include/exclude branch-and-bound.

    Among maximum packings the lexicographically smallest block set wins.
    """
    best: List[int] = []
    best_key: Optional[Tuple[Tuple[int, ...], ...]] = None

    def search(candidates: List[int], chosen: List[int]) -> None:
        nonlocal best, best_key
        if not candidates:
            key = _packing_key(chosen)
            if len(chosen) > len(best) or (len(chosen) == len(best) and (best_key is None or key < best_key)):
                best, best_key = list(chosen), key
            return
        union = 0
        smallest = None
        for mask in candidates:
            union |= mask
            size = bin(mask).count("1")
            smallest = size if smallest is None else min(smallest, size)
        upper = len(chosen) + min(len(candidates), bin(union).count("1") // smallest)
        if upper < len(best):
            return
        first, rest = candidates[0], candidates[1:]
        search([mask for mask in rest if not mask & first], chosen + [first])
        search(rest, chosen)

    search(list(blocks), [])
    return sorted(best, key=_mask_to_vars)


def block_sensitivity_at(
    f: StructuredFunction, x: Sequence[int], config: Config = DEFAULT
) -> Tuple[int, BlockFamily]:
    point = _point(f, x)
    table = _dense(f, config, "bs_cap", config.bs_cap)
    packing = max_disjoint_packing(minimal_sensitive_blocks(table, bits_to_index(point)))
    witness = BlockFamily(tuple(_mask_to_vars(mask) for mask in packing), point)
    return len(packing), witness


def _bs_at_index(table: DenseTruthTable, index: int) -> int:
    return len(max_disjoint_packing(minimal_sensitive_blocks(table, index)))


def block_sensitivity(f: StructuredFunction, tag: Tag = Tag.ALL, config: Config = DEFAULT) -> int:
    table = _dense(f, config, "bs_cap", config.bs_cap)
    counts = _sensitivity_counts(table)
    best = 0
    for index in _tagged_indices(table, tag):
        # bs is bounded by the arity; s is a lower bound for it
        best = max(best, int(counts[index]))
        if best == table.arity:
            break
        best = max(best, _bs_at_index(table, int(index)))
    return best


# --- certificates --------------------------------------------------------------


def _highest_bit(mask: int) -> int:
    return mask.bit_length() - 1


def _lex_hitting_set(blocks: List[int], size: int) -> Optional[int]:
    """Lexicographically first set of ``size`` variables meeting every block."""

    def search(start: int, chosen: int, unhit: List[int], slots: int) -> Optional[int]:
        if not unhit:
            return chosen
        if slots == 0:
            return None
        high = ~((1 << start) - 1)
        used = 0
        disjoint = 0
        last = None
        for mask in unhit:
            available = mask & high
            if not available:
                return None
            if not available & used:
                disjoint += 1
                used |= available
            top = _highest_bit(mask)
            last = top if last is None else min(last, top)
        if disjoint > slots:
            return None
        for i in range(start, last + 1):
            bit = 1 << i
            if not any(mask & bit for mask in unhit):
                continue
            found = search(i + 1, chosen | bit, [mask for mask in unhit if not mask & bit], slots - 1)
            if found is not None:
                return found
        return None

    return search(0, 0, blocks, size)


def _certificate_mask(table: DenseTruthTable, index: int) -> int:
    # S certifies x iff S meets every (minimal) sensitive block of x
    blocks = minimal_sensitive_blocks(table, index)
    if not blocks:
        return 0
    for size in range(1, table.arity + 1):
        found = _lex_hitting_set(blocks, size)
        if found is not None:
            return found
    raise AssertionError("the full variable set always certifies")


def certificate_at(
    f: StructuredFunction, x: Sequence[int], config: Config = DEFAULT
) -> Tuple[int, CertificateWitness]:
    point = _point(f, x)
    table = _dense(f, config, "cert_cap", config.cert_cap)
    index = bits_to_index(point)
    positions = _mask_to_vars(_certificate_mask(table, index))
    return len(positions), CertificateWitness(point, positions, int(table.values[index]))


def certificate(f: StructuredFunction, tag: Tag = Tag.ALL, config: Config = DEFAULT) -> int:
    table = _dense(f, config, "cert_cap", config.cert_cap)
    best = 0
    for index in _tagged_indices(table, tag):
        best = max(best, bin(_certificate_mask(table, int(index))).count("1"))
        if best == table.arity:
            break
    return best


# --- decision-tree depths -------------------------------------------------------


def _cofactors(values: np.ndarray, var: int) -> Tuple[np.ndarray, np.ndarray]:
    view = values.reshape(-1, 2, 2 ** var)
    return (
        np.ascontiguousarray(view[:, 0, :]).reshape(-1),
        np.ascontiguousarray(view[:, 1, :]).reshape(-1),
    )


class DepthSolver:
    """Memoized minimax over subfunctions, keyed by their truth tables.

    ``charge`` selects which answers count: both (plain depth), 0 or 1.
    """

    def __init__(self, charge: Callable[[int, int], int]) -> None:
        self.charge = charge
        self.memo: Dict[Tuple[int, bytes], int] = {}

    def solve(self, values: np.ndarray, arity: int) -> int:
        if not values.any() or values.all():
            return 0
        key = (arity, values.tobytes())
        cached = self.memo.get(key)
        if cached is None:
            cached = self.memo[key] = self._best(values, arity)[1]
        return cached

    def best_variable(self, values: np.ndarray, arity: int) -> Optional[int]:
        """0-based variable starting an optimal tree; None for constants."""
        values = np.ascontiguousarray(values, dtype=np.uint8)
        if not values.any() or values.all():
            return None
        return self._best(values, arity)[0]

    def _best(self, values: np.ndarray, arity: int) -> Tuple[int, int]:
        best_var, best = -1, None
        for var in range(arity):
            zero, one = _cofactors(values, var)
            if np.array_equal(zero, one):
                continue
            depth = self.charge(self.solve(zero, arity - 1), self.solve(one, arity - 1))
            if best is None or depth < best:
                best_var, best = var, depth
        return best_var, best


def plain_charge(zero: int, one: int) -> int:
    return 1 + max(zero, one)


def zero_charge(zero: int, one: int) -> int:
    return max(1 + zero, one)


def one_charge(zero: int, one: int) -> int:
    return max(zero, 1 + one)


def _solve_depth(f: StructuredFunction, config: Config, charge: Callable[[int, int], int]) -> int:
    table = _dense(f, config, "dt_cap", config.dt_cap)
    solver = DepthSolver(charge)
    depth = solver.solve(np.array(table.values, dtype=np.uint8), table.arity)
    logger.debug("depth search over %d variables memoized %d subfunctions", table.arity, len(solver.memo))
    return depth


def dt_depth(f: StructuredFunction, config: Config = DEFAULT) -> int:
    return _solve_depth(f, config, plain_charge)


def zero_depth(f: StructuredFunction, config: Config = DEFAULT) -> int:
    return _solve_depth(f, config, zero_charge)


def one_depth(f: StructuredFunction, config: Config = DEFAULT) -> int:
    return _solve_depth(f, config, one_charge)


def log_factor(arity: int) -> int:
    """ceil(log2(arity + 1))."""
    return int(arity).bit_length()


def and_dt_depth_bounds(f: StructuredFunction, config: Config = DEFAULT) -> Tuple[int, int]:
    lower = zero_depth(f, config)
    return lower, lower * log_factor(f.arity)


def and_dt_depth_exact(
    f: StructuredFunction, config: Config = DEFAULT, solver: Optional[andtree.AndTreeSolver] = None
) -> Tuple[int, AndDecisionTree]:
    table = _dense(f, config, "andtree_cap", config.andtree_cap)
    solver = solver or andtree.AndTreeSolver(table.arity)
    return solver.solve(table)


def or_dt_tree(
    f: StructuredFunction, config: Config = DEFAULT, solver: Optional[andtree.AndTreeSolver] = None
) -> Tuple[int, AndDecisionTree]:
    """OR-tree depth via duality: OR_S(x) = NOT AND_S(NOT x).

    The returned tree queries disjunctions (``kind == "or"``).
    """
    table = _dense(f, config, "andtree_cap", config.andtree_cap)
    solver = solver or andtree.AndTreeSolver(table.arity)
    depth, dual = solver.solve(andtree.dual_table(table))
    return depth, andtree.dual_tree(dual)


def or_dt_depth_exact(
    f: StructuredFunction, config: Config = DEFAULT, solver: Optional[andtree.AndTreeSolver] = None
) -> int:
    return or_dt_tree(f, config, solver)[0]


def fourier_sparsity(f: StructuredFunction, config: Config = DEFAULT) -> int:
    return spectral.fourier_sparsity(_dense(f, config, "dense_cap", config.dense_cap))


def degree(f: StructuredFunction, config: Config = DEFAULT) -> int:
    return spectral.degree(_dense(f, config, "dense_cap", config.dense_cap))


def compute_measure(f: StructuredFunction, spec: MeasureSpec, config: Config = DEFAULT) -> int:
    kind = spec.kind
    if kind is MeasureKind.SENSITIVITY:
        return sensitivity(f, spec.tag, config)
    if kind is MeasureKind.BLOCK_SENSITIVITY:
        return block_sensitivity(f, spec.tag, config)
    if kind is MeasureKind.CERTIFICATE:
        return certificate(f, spec.tag, config)
    if kind is MeasureKind.DT_DEPTH:
        return dt_depth(f, config)
    if kind is MeasureKind.ZERO_DEPTH:
        return zero_depth(f, config)
    if kind is MeasureKind.ONE_DEPTH:
        return one_depth(f, config)
    if kind is MeasureKind.AND_DT_DEPTH:
        return and_dt_depth_exact(f, config)[0]
    if kind is MeasureKind.OR_DT_DEPTH:
        return or_dt_depth_exact(f, config)
    if kind is MeasureKind.FOURIER_SPARSITY:
        return fourier_sparsity(f, config)
    return degree(f, config)


def measure_at(f: StructuredFunction, spec: MeasureSpec, x: Sequence[int], config: Config = DEFAULT):
    """Pointwise value and witness for s, bs and C."""
    if spec.kind is MeasureKind.SENSITIVITY:
        return sensitivity_at(f, x, config), None
    if spec.kind is MeasureKind.BLOCK_SENSITIVITY:
        return block_sensitivity_at(f, x, config)
    if spec.kind is MeasureKind.CERTIFICATE:
        return certificate_at(f, x, config)
    raise UsageError(f"{spec.kind.value} has no pointwise form")
