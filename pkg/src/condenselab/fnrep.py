"""Boolean function representations and the restriction algebra.

Variable ``i`` (1-based) is bit ``2**(i-1)`` of a truth-table index, and
column ``i-1`` of an input row.  Every value here is immutable.
"""

from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from condenselab.config import DEFAULT, Config
from condenselab.errors import CapacityError, InputShapeError

logger = logging.getLogger(__name__)

Bits = Tuple[int, ...]

_MATERIALIZE_CHUNK = 1 << 16


class Cell(Enum):
    ZERO = "0"
    ONE = "1"
    FREE = "*"


class Constancy(Enum):
    CONSTANT0 = "Constant0"
    CONSTANT1 = "Constant1"
    NONCONSTANT = "NonConstant"


def parse_bits(text: str, length: Optional[int] = None) -> Bits:
    text = text.strip()
    if any(ch not in "01" for ch in text):
        raise InputShapeError(f"bit string may only contain 0 and 1: {text!r}")
    if length is not None and len(text) != length:
        raise InputShapeError(f"expected {length} bits, got {len(text)}")
    return tuple(int(ch) for ch in text)


def format_bits(bits: Sequence[int]) -> str:
    return "".join(str(int(bit)) for bit in bits)


def index_to_bits(index: int, arity: int) -> Bits:
    return tuple((index >> i) & 1 for i in range(arity))


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for i, bit in enumerate(bits):
        if bit:
            index |= 1 << i
    return index


def rows_for_indices(indices: np.ndarray, arity: int) -> np.ndarray:
    """Input rows (one per index) with column ``i`` holding bit ``i``."""
    shifts = np.arange(arity, dtype=np.int64)
    return ((indices.astype(np.int64)[:, None] >> shifts) & 1).astype(np.uint8)


def _check_rows(rows: np.ndarray, arity: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.uint8)
    if rows.ndim != 2 or rows.shape[1] != arity:
        raise InputShapeError(f"expected rows of length {arity}, got shape {rows.shape}")
    return rows


class StructuredFunction(ABC):
    """A Boolean function that can be evaluated on batches of input rows."""

    @property
    @abstractmethod
    def arity(self) -> int:
        ...

    @abstractmethod
    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        """Evaluate a ``(m, arity)`` uint8 array, returning ``m`` output bits."""

    @abstractmethod
    def descriptor(self) -> Dict[str, Any]:
        ...

    def restricted_constancy(self, rho: "Restriction") -> Optional[Constancy]:
        """Family rule deciding constancy of ``self|rho`` without a dense scan."""
        return None

    def evaluate(self, x: Sequence[int]) -> int:
        if len(x) != self.arity:
            raise InputShapeError(f"expected {self.arity} input bits, got {len(x)}")
        if any(bit not in (0, 1) for bit in x):
            raise InputShapeError("input bits must be 0 or 1")
        row = np.asarray([list(x)], dtype=np.uint8).reshape(1, self.arity)
        return int(self.evaluate_rows(row)[0])


@dataclass(frozen=True)
class DenseTruthTable(StructuredFunction):
    """Bit-packed truth table; bit ``e`` of ``packed`` (little-endian) is f at index e."""

    _arity: int
    packed: bytes = field(repr=False)

    def __post_init__(self) -> None:
        if self._arity < 0:
            raise InputShapeError("arity must be non-negative")
        expected = (2 ** self._arity + 7) // 8
        if len(self.packed) != expected:
            raise InputShapeError(
                f"table for arity {self._arity} needs {expected} packed bytes, got {len(self.packed)}"
            )

    @property
    def arity(self) -> int:
        return self._arity

    @classmethod
    def from_values(cls, arity: int, values: Any) -> "DenseTruthTable":
        array = np.asarray(values, dtype=np.uint8).reshape(-1)
        if array.size != 2 ** arity:
            raise InputShapeError(f"table for arity {arity} needs {2 ** arity} values, got {array.size}")
        if array.size and array.max(initial=0) > 1:
            raise InputShapeError("table values must be 0 or 1")
        return cls(arity, np.packbits(array, bitorder="little").tobytes())

    @classmethod
    def from_int(cls, arity: int, value: int) -> "DenseTruthTable":
        size = 2 ** arity
        if value < 0 or value >> size:
            raise InputShapeError(f"table integer does not fit {size} bits")
        return cls(arity, value.to_bytes((size + 7) // 8, "little"))

    @classmethod
    def from_hex(cls, arity: int, text: str) -> "DenseTruthTable":
        text = text.strip()
        width = hex_width(arity)
        if len(text) != width or any(ch not in "0123456789abcdef" for ch in text):
            raise InputShapeError(f"expected {width} lowercase hex digits for arity {arity}")
        return cls.from_int(arity, int(text, 16))

    @cached_property
    def values(self) -> np.ndarray:
        array = np.unpackbits(
            np.frombuffer(self.packed, dtype=np.uint8), count=2 ** self._arity, bitorder="little"
        )
        array.setflags(write=False)
        return array

    def to_int(self) -> int:
        return int.from_bytes(self.packed, "little")

    def to_hex(self) -> str:
        return format(self.to_int(), f"0{hex_width(self._arity)}x")

    def count_ones(self) -> int:
        return int(self.values.sum())

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self._arity)
        weights = np.left_shift(np.int64(1), np.arange(self._arity, dtype=np.int64))
        indices = rows.astype(np.int64) @ weights
        return self.values[indices]

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "table", "params": {"arity": self._arity, "hex": self.to_hex()}}


def hex_width(arity: int) -> int:
    return (2 ** arity + 3) // 4


@dataclass(frozen=True)
class Restriction:
    cells: Tuple[Cell, ...]

    @property
    def arity(self) -> int:
        return len(self.cells)

    @classmethod
    def parse(cls, literal: str) -> "Restriction":
        try:
            return cls(tuple(Cell(ch) for ch in literal.strip()))
        except ValueError as exc:
            raise InputShapeError(f"restriction literal may only contain 0, 1 and *: {literal!r}") from exc

    @classmethod
    def all_free(cls, arity: int) -> "Restriction":
        return cls((Cell.FREE,) * arity)

    @classmethod
    def from_assignment(cls, arity: int, assignment: Dict[int, int]) -> "Restriction":
        """Fix the 1-based variables in ``assignment``; leave the rest free."""
        cells = [Cell.FREE] * arity
        for var, value in assignment.items():
            if not 1 <= var <= arity:
                raise InputShapeError(f"variable {var} outside [1, {arity}]")
            cells[var - 1] = Cell.ONE if value else Cell.ZERO
        return cls(tuple(cells))

    def __str__(self) -> str:
        return "".join(cell.value for cell in self.cells)

    @cached_property
    def free_positions(self) -> Tuple[int, ...]:
        """0-based positions of free variables, ascending."""
        return tuple(i for i, cell in enumerate(self.cells) if cell is Cell.FREE)

    @cached_property
    def fixed_positions(self) -> Tuple[int, ...]:
        return tuple(i for i, cell in enumerate(self.cells) if cell is not Cell.FREE)

    @property
    def free_count(self) -> int:
        return len(self.free_positions)

    @cached_property
    def ones_mask(self) -> int:
        return bits_to_index([cell is Cell.ONE for cell in self.cells])

    def merge(self, y: Sequence[int]) -> Bits:
        if len(y) != self.free_count:
            raise InputShapeError(f"expected {self.free_count} free bits, got {len(y)}")
        free_values = iter(y)
        merged = []
        for cell in self.cells:
            if cell is Cell.FREE:
                merged.append(int(next(free_values)))
            else:
                merged.append(1 if cell is Cell.ONE else 0)
        return tuple(merged)

    def compose(self, inner: "Restriction") -> "Restriction":
        """The single restriction equal to applying ``self`` then ``inner``."""
        if inner.arity != self.free_count:
            raise InputShapeError(
                f"inner restriction has arity {inner.arity}, expected {self.free_count}"
            )
        cells = list(self.cells)
        for position, cell in zip(self.free_positions, inner.cells):
            cells[position] = cell
        return Restriction(tuple(cells))

    def consistent_with(self, x: Sequence[int]) -> bool:
        return all(
            cell is Cell.FREE or (bit == 1) == (cell is Cell.ONE)
            for cell, bit in zip(self.cells, x)
        )


@dataclass(frozen=True)
class Restricted(StructuredFunction):
    inner: StructuredFunction
    rho: Restriction

    def __post_init__(self) -> None:
        if self.rho.arity != self.inner.arity:
            raise InputShapeError(
                f"restriction arity {self.rho.arity} does not match function arity {self.inner.arity}"
            )

    @property
    def arity(self) -> int:
        return self.rho.free_count

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        free = np.asarray(self.rho.free_positions, dtype=np.int64)
        if isinstance(self.inner, DenseTruthTable):
            weights = np.left_shift(np.int64(1), free)
            indices = self.rho.ones_mask + rows.astype(np.int64) @ weights
            return self.inner.values[indices]
        inner_rows = np.zeros((rows.shape[0], self.inner.arity), dtype=np.uint8)
        for position in self.rho.fixed_positions:
            if self.rho.cells[position] is Cell.ONE:
                inner_rows[:, position] = 1
        inner_rows[:, free] = rows
        return self.inner.evaluate_rows(inner_rows)

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "restricted", "params": {"inner": self.inner.descriptor(), "rho": str(self.rho)}}


@dataclass(frozen=True)
class InputsNegated(StructuredFunction):
    inner: StructuredFunction

    @property
    def arity(self) -> int:
        return self.inner.arity

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        return self.inner.evaluate_rows(np.bitwise_xor(rows, np.uint8(1)))

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "negated_inputs", "params": {"inner": self.inner.descriptor()}}


def evaluate(f: StructuredFunction, x: Sequence[int]) -> int:
    return f.evaluate(x)


def materialize(f: StructuredFunction, config: Config = DEFAULT) -> DenseTruthTable:
    if f.arity > config.dense_cap:
        raise CapacityError("dense_cap", config.dense_cap, f.arity, "materialize")
    if isinstance(f, DenseTruthTable):
        return f
    size = 2 ** f.arity
    chunks = []
    for start in range(0, size, _MATERIALIZE_CHUNK):
        indices = np.arange(start, min(size, start + _MATERIALIZE_CHUNK), dtype=np.int64)
        chunks.append(np.asarray(f.evaluate_rows(rows_for_indices(indices, f.arity)), dtype=np.uint8))
    return DenseTruthTable.from_values(f.arity, np.concatenate(chunks))


def restrict(f: StructuredFunction, rho: Restriction) -> StructuredFunction:
    if rho.arity != f.arity:
        raise InputShapeError(f"restriction arity {rho.arity} does not match function arity {f.arity}")
    if isinstance(f, Restricted):
        return Restricted(f.inner, f.rho.compose(rho))
    return Restricted(f, rho)


def restrict_table(table: DenseTruthTable, rho: Restriction) -> DenseTruthTable:
    """Dense restriction; the fast path used by the restriction searches."""
    if rho.arity != table.arity:
        raise InputShapeError(f"restriction arity {rho.arity} does not match table arity {table.arity}")
    free = np.asarray(rho.free_positions, dtype=np.int64)
    indices = np.arange(2 ** rho.free_count, dtype=np.int64)
    inner = np.full(indices.shape, rho.ones_mask, dtype=np.int64)
    for k, position in enumerate(free):
        inner |= ((indices >> k) & 1) << position
    return DenseTruthTable.from_values(rho.free_count, table.values[inner])


def classify(table: DenseTruthTable) -> Constancy:
    ones = table.count_ones()
    if ones == 0:
        return Constancy.CONSTANT0
    if ones == 2 ** table.arity:
        return Constancy.CONSTANT1
    return Constancy.NONCONSTANT


def is_constant(f: StructuredFunction, config: Config = DEFAULT) -> Constancy:
    if f.arity <= config.dense_cap:
        return classify(materialize(f, config))
    if isinstance(f, Restricted):
        verdict = f.inner.restricted_constancy(f.rho)
        if verdict is not None:
            return verdict
    raise CapacityError("dense_cap", config.dense_cap, f.arity, "no structural constancy rule")


def negate_inputs(f: StructuredFunction) -> StructuredFunction:
    if isinstance(f, InputsNegated):
        return f.inner
    return InputsNegated(f)


def negate_table(table: DenseTruthTable, *, inputs: bool = True, output: bool = False) -> DenseTruthTable:
    values = table.values
    if inputs:
        # complementing every input reverses the index order
        values = values[::-1]
    if output:
        values = 1 - values
    return DenseTruthTable.from_values(table.arity, values)


def permute_inputs(table: DenseTruthTable, order: Sequence[int]) -> DenseTruthTable:
    """g with g(y) = f(x) where x[order[j]] = y[j] (0-based positions)."""
    if sorted(int(i) for i in order) != list(range(table.arity)):
        raise InputShapeError(f"{list(order)} is not a permutation of {table.arity} positions")
    indices = np.arange(2 ** table.arity, dtype=np.int64)
    source = np.zeros_like(indices)
    for new, old in enumerate(order):
        source |= ((indices >> new) & 1) << int(old)
    return DenseTruthTable.from_values(table.arity, table.values[source])


def restriction_count(arity: int, free_count: int) -> int:
    if not 0 <= free_count <= arity:
        raise InputShapeError(f"free_count {free_count} outside [0, {arity}]")
    return comb(arity, free_count) * 2 ** (arity - free_count)


def restrictions_with_free_set(arity: int, free_set: Sequence[int]) -> Iterator[Restriction]:
    """All restrictions leaving exactly the 0-based positions ``free_set`` free."""
    fixed = [i for i in range(arity) if i not in free_set]
    for assignment in itertools.product((Cell.ZERO, Cell.ONE), repeat=len(fixed)):
        cells = [Cell.FREE] * arity
        for position, cell in zip(fixed, assignment):
            cells[position] = cell
        yield Restriction(tuple(cells))


def _restrictions(arity: int, free_count: int) -> Iterator[Restriction]:
    for free_set in itertools.combinations(range(arity), free_count):
        yield from restrictions_with_free_set(arity, free_set)


def enumerate_restrictions(arity: int, free_count: int, config: Config = DEFAULT) -> Iterator[Restriction]:
    """Every restriction with exactly ``free_count`` free cells, once each.

    Order is lexicographic over free sets, then over the assignment to the
    fixed cells (``0`` before ``1``, first fixed cell most significant).
    """
    required = restriction_count(arity, free_count)
    if required > config.enumeration_budget:
        raise CapacityError("enumeration_budget", config.enumeration_budget, required)
    logger.debug("enumerating %d restrictions of arity %d with %d free", required, arity, free_count)
    return _restrictions(arity, free_count)


def enumerate_all_restrictions(arity: int, config: Config = DEFAULT) -> Iterator[Restriction]:
    required = 3 ** arity
    if required > config.enumeration_budget:
        raise CapacityError("enumeration_budget", config.enumeration_budget, required)
    return (Restriction(cells) for cells in itertools.product(tuple(Cell), repeat=arity))


def random_restriction(arity: int, free_count: int, rng: np.random.Generator) -> Restriction:
    free = set(int(i) for i in rng.choice(arity, size=free_count, replace=False))
    values = rng.integers(0, 2, size=arity)
    return Restriction(
        tuple(
            Cell.FREE if i in free else (Cell.ONE if values[i] else Cell.ZERO)
            for i in range(arity)
        )
    )


def write_table(path: Path, table: DenseTruthTable) -> None:
    path = Path(path)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with tmp_path.open("w", encoding="utf-8") as handle:
        handle.write(f"arity: {table.arity}\n{table.to_hex()}\n")
    tmp_path.replace(path)


def read_table(path: Path, config: Config = DEFAULT) -> DenseTruthTable:
    lines = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
    if len(lines) != 2 or not lines[0].startswith("arity:"):
        raise InputShapeError(f"{path}: expected 'arity: <n>' followed by one hex line")
    try:
        arity = int(lines[0].split(":", 1)[1])
    except ValueError as exc:
        raise InputShapeError(f"{path}: arity is not an integer") from exc
    if arity > config.dense_cap:
        raise CapacityError("dense_cap", config.dense_cap, arity, str(path))
    return DenseTruthTable.from_hex(arity, lines[1])
