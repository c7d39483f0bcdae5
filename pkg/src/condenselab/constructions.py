"""Explicit function families: modified Rubinstein, TRIBES, its dual and cheat sheets."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from condenselab.config import DEFAULT, Config
from condenselab.errors import InputShapeError, MalformedClaimError, UsageError
from condenselab.fnrep import (
    Cell,
    Constancy,
    DenseTruthTable,
    Restriction,
    StructuredFunction,
    _check_rows,
    materialize,
    read_table,
)

logger = logging.getLogger(__name__)


def _require_positive(**params: int) -> None:
    for name, value in params.items():
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise InputShapeError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class RubinsteinParams:
    b: int
    n: int
    r: int = 1

    def __post_init__(self) -> None:
        _require_positive(b=self.b, n=self.n, r=self.r)

    @property
    def base_arity(self) -> int:
        return self.b * self.n

    @property
    def arity(self) -> int:
        return self.r * self.b * self.n


def _base_accepts(blocks: np.ndarray, b: int) -> np.ndarray:
    # blocks: (..., n, b); accept iff total weight is b and some block is all ones
    full = blocks.all(axis=-1).any(axis=-1)
    weight = blocks.sum(axis=(-2, -1), dtype=np.int64)
    return (full & (weight == b)).astype(np.uint8)


@dataclass(frozen=True)
class RubinsteinBase(StructuredFunction):
    """g on b*n variables: exactly one block of b variables is all ones, all else zero.

    Block ``j`` (0-based) covers variables ``j*b+1 .. j*b+b``.
    """

    b: int
    n: int

    def __post_init__(self) -> None:
        _require_positive(b=self.b, n=self.n)

    @property
    def arity(self) -> int:
        return self.b * self.n

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        return _base_accepts(rows.reshape(rows.shape[0], self.n, self.b), self.b)

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "rub", "params": {"b": self.b, "n": self.n}}

    def block_cells(self, rho: Restriction, j: int) -> Tuple[Cell, ...]:
        return rho.cells[j * self.b:(j + 1) * self.b]

    def restricted_constancy(self, rho: Restriction) -> Optional[Constancy]:
        if rho.free_count == 0:
            point = rho.merge(())
            return Constancy.CONSTANT1 if self.evaluate(point) else Constancy.CONSTANT0
        has_zero = [Cell.ZERO in self.block_cells(rho, j) for j in range(self.n)]
        has_one = [Cell.ONE in self.block_cells(rho, j) for j in range(self.n)]
        for j in range(self.n):
            others_clear = not any(has_one[i] for i in range(self.n) if i != j)
            if not has_zero[j] and others_clear:
                # an accepting completion exists, and flipping any free bit of it rejects
                return Constancy.NONCONSTANT
        return Constancy.CONSTANT0


@dataclass(frozen=True)
class ModifiedRubinstein(StructuredFunction):
    """OR of ``r`` copies of ``RubinsteinBase(b, n)`` on consecutive variable groups."""

    b: int
    n: int
    r: int

    def __post_init__(self) -> None:
        _require_positive(b=self.b, n=self.n, r=self.r)

    @property
    def params(self) -> RubinsteinParams:
        return RubinsteinParams(self.b, self.n, self.r)

    @property
    def arity(self) -> int:
        return self.r * self.b * self.n

    def copy_positions(self, i: int) -> range:
        """0-based positions of copy ``i`` (1-based)."""
        width = self.b * self.n
        return range((i - 1) * width, i * width)

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        copies = _base_accepts(rows.reshape(rows.shape[0], self.r, self.n, self.b), self.b)
        return copies.any(axis=1).astype(np.uint8)

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "modrub", "params": {"b": self.b, "n": self.n, "r": self.r}}


@dataclass(frozen=True)
class Tribes(StructuredFunction):
    """AND of n ORs; block ``i`` is variables ``(i-1)n+1 .. in``."""

    n: int

    def __post_init__(self) -> None:
        _require_positive(n=self.n)

    @property
    def arity(self) -> int:
        return self.n * self.n

    def block_of(self, var: int) -> int:
        """1-based block containing the 1-based variable ``var``."""
        return (var - 1) // self.n + 1

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        blocks = rows.reshape(rows.shape[0], self.n, self.n)
        return blocks.any(axis=2).all(axis=1).astype(np.uint8)

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "tribes", "params": {"n": self.n}}


@dataclass(frozen=True)
class DualTribes(StructuredFunction):
    """OR of n ANDs over the same blocks as ``Tribes``."""

    n: int

    def __post_init__(self) -> None:
        _require_positive(n=self.n)

    @property
    def arity(self) -> int:
        return self.n * self.n

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        blocks = rows.reshape(rows.shape[0], self.n, self.n)
        return blocks.all(axis=2).any(axis=1).astype(np.uint8)

    def descriptor(self) -> Dict[str, Any]:
        return {"family": "dualtribes", "params": {"n": self.n}}


def rubinstein_base(b: int, n: int) -> RubinsteinBase:
    return RubinsteinBase(b, n)


def modified_rubinstein(b: int, n: int, r: int) -> ModifiedRubinstein:
    return ModifiedRubinstein(b, n, r)


def tribes(n: int) -> Tribes:
    return Tribes(n)


def dual_tribes(n: int) -> DualTribes:
    return DualTribes(n)


def _table_from_indices(arity: int, predicate) -> DenseTruthTable:
    indices = np.arange(2 ** arity, dtype=np.int64)
    return DenseTruthTable.from_values(arity, predicate(indices).astype(np.uint8))


def _weights(indices: np.ndarray, arity: int) -> np.ndarray:
    weight = np.zeros(indices.shape, dtype=np.int64)
    for i in range(arity):
        weight += (indices >> i) & 1
    return weight


def constant(arity: int, value: int) -> DenseTruthTable:
    return _table_from_indices(arity, lambda idx: np.full(idx.shape, int(bool(value))))


def parity(n: int) -> DenseTruthTable:
    return _table_from_indices(n, lambda idx: _weights(idx, n) % 2)


def and_function(n: int) -> DenseTruthTable:
    return _table_from_indices(n, lambda idx: idx == 2 ** n - 1)


def or_function(n: int) -> DenseTruthTable:
    return _table_from_indices(n, lambda idx: idx != 0)


def majority(n: int) -> DenseTruthTable:
    return _table_from_indices(n, lambda idx: 2 * _weights(idx, n) > n)


def upward_closure(values: np.ndarray, arity: int) -> np.ndarray:
    closed = np.array(values, dtype=np.uint8).reshape(-1)
    for i in range(arity):
        view = closed.reshape(-1, 2, 2 ** i)
        view[:, 1, :] |= view[:, 0, :]
    return closed


def random_monotone(arity: int, rng: np.random.Generator) -> DenseTruthTable:
    """Upward closure of a random seed set; density varies per draw."""
    density = rng.uniform(0.02, 0.4)
    seeds = (rng.random(2 ** arity) < density).astype(np.uint8)
    return DenseTruthTable.from_values(arity, upward_closure(seeds, arity))


@dataclass(frozen=True)
class CertificateClaim:
    """Entries are (1-based position, value) pairs."""

    entries: Tuple[Tuple[int, int], ...]

    @classmethod
    def of(cls, entries: Sequence[Tuple[int, int]]) -> "CertificateClaim":
        return cls(tuple((int(pos), int(val)) for pos, val in entries))


def _subcube_is_constant(table: DenseTruthTable, entries: Sequence[Tuple[int, int]], value: int) -> bool:
    mask = 0
    fixed = 0
    for position, bit in entries:
        mask |= 1 << (position - 1)
        if bit:
            fixed |= 1 << (position - 1)
    indices = np.arange(2 ** table.arity, dtype=np.int64)
    inside = (indices & mask) == fixed
    return bool(np.all(table.values[inside] == value))


def _claim_holds(table: DenseTruthTable, x: Sequence[int], claim: CertificateClaim, value: int) -> bool:
    for position, bit in claim.entries:
        if not 1 <= position <= table.arity or x[position - 1] != bit:
            return False
    return _subcube_is_constant(table, claim.entries, value)


def verify_certificate(
    base: StructuredFunction,
    x: Sequence[int],
    claim: CertificateClaim,
    claimed_value: int,
    config: Config = DEFAULT,
) -> bool:
    if len(x) != base.arity:
        raise InputShapeError(f"expected {base.arity} input bits, got {len(x)}")
    for position, _ in claim.entries:
        if not 1 <= position <= base.arity:
            raise MalformedClaimError(f"certificate position {position} outside [1, {base.arity}]")
    return _claim_holds(materialize(base, config), tuple(int(bit) for bit in x), claim, int(claimed_value))


@dataclass(frozen=True)
class CheatSheetSpec:
    """Layout: c copies of the base input, then 2**c cells of c*m bits.

    A claim is ``cert_size`` entries of ``ptr_width`` position bits
    (0-based, least significant first) followed by one value bit.
    """

    base: StructuredFunction
    c: int
    cert_size: int
    ptr_width: int

    def __post_init__(self) -> None:
        _require_positive(c=self.c)
        if self.cert_size < 0 or self.ptr_width < 0:
            raise InputShapeError("cert_size and ptr_width must be non-negative")
        if 2 ** self.ptr_width < self.base_arity:
            raise InputShapeError(
                f"ptr_width {self.ptr_width} cannot address {self.base_arity} positions"
            )
        if self.base_arity <= DEFAULT.cert_cap:
            from condenselab.measures import Tag, certificate

            expected = certificate(self.base, Tag.ALL, DEFAULT)
            if self.cert_size != expected:
                raise MalformedClaimError(
                    f"cert_size {self.cert_size} differs from the base certificate complexity {expected}"
                )

    @property
    def base_arity(self) -> int:
        return self.base.arity

    @property
    def m(self) -> int:
        return self.cert_size * (self.ptr_width + 1)

    @property
    def cell_width(self) -> int:
        return self.c * self.m

    @property
    def cell_count(self) -> int:
        return 2 ** self.c

    @property
    def arity(self) -> int:
        return self.c * self.base_arity + self.cell_count * self.cell_width

    def copy_positions(self, i: int) -> range:
        """0-based positions of copy ``i`` (1-based)."""
        return range((i - 1) * self.base_arity, i * self.base_arity)

    def cell_positions(self, address: int) -> range:
        start = self.c * self.base_arity + address * self.cell_width
        return range(start, start + self.cell_width)

    def locate(self, position: int) -> Tuple[str, int, int]:
        """Map a 0-based position to ("copy", i, offset) or ("cell", address, offset)."""
        if not 0 <= position < self.arity:
            raise InputShapeError(f"position {position} outside the cheat-sheet input")
        copies_end = self.c * self.base_arity
        if position < copies_end:
            return "copy", position // self.base_arity + 1, position % self.base_arity
        offset = position - copies_end
        return "cell", offset // self.cell_width, offset % self.cell_width

    def encode_claim(self, claim: CertificateClaim) -> Tuple[int, ...]:
        if len(claim.entries) != self.cert_size:
            raise MalformedClaimError(
                f"claim has {len(claim.entries)} entries, the cell layout needs {self.cert_size}"
            )
        bits: List[int] = []
        for position, value in claim.entries:
            if not 1 <= position <= 2 ** self.ptr_width:
                raise MalformedClaimError(f"position {position} does not fit {self.ptr_width} bits")
            pointer = position - 1
            bits.extend((pointer >> k) & 1 for k in range(self.ptr_width))
            bits.append(int(value))
        return tuple(bits)

    def encode_cell(self, claims: Sequence[CertificateClaim]) -> Tuple[int, ...]:
        if len(claims) != self.c:
            raise MalformedClaimError(f"a cell holds {self.c} claims, got {len(claims)}")
        bits: List[int] = []
        for claim in claims:
            bits.extend(self.encode_claim(claim))
        return tuple(bits)

    def decode_cell(self, bits: Sequence[int]) -> List[CertificateClaim]:
        if len(bits) != self.cell_width:
            raise InputShapeError(f"cell needs {self.cell_width} bits, got {len(bits)}")
        claims = []
        entry_width = self.ptr_width + 1
        for i in range(self.c):
            chunk = bits[i * self.m:(i + 1) * self.m]
            entries = []
            for e in range(self.cert_size):
                entry = chunk[e * entry_width:(e + 1) * entry_width]
                pointer = sum(int(bit) << k for k, bit in enumerate(entry[:self.ptr_width]))
                entries.append((pointer + 1, int(entry[self.ptr_width])))
            claims.append(CertificateClaim(tuple(entries)))
        return claims


def cheat_sheet_spec(base: StructuredFunction, c: int, config: Config = DEFAULT) -> CheatSheetSpec:
    """Spec whose cert_size is the certificate complexity of ``base``."""
    from condenselab.measures import Tag, certificate

    ptr_width = (base.arity - 1).bit_length() if base.arity > 1 else 0
    return CheatSheetSpec(base, c, certificate(base, Tag.ALL, config), ptr_width)


@dataclass(frozen=True)
class CheatSheet(StructuredFunction):
    spec: CheatSheetSpec

    @property
    def arity(self) -> int:
        return self.spec.arity

    @cached_property
    def base_table(self) -> DenseTruthTable:
        return materialize(self.spec.base)

    def address(self, base_values: Sequence[int]) -> int:
        return sum(int(value) << i for i, value in enumerate(base_values))

    def evaluate_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = _check_rows(rows, self.arity)
        spec = self.spec
        count = rows.shape[0]
        copies = rows[:, :spec.c * spec.base_arity].reshape(count, spec.c, spec.base_arity)
        base_values = self.base_table.evaluate_rows(
            copies.reshape(count * spec.c, spec.base_arity)
        ).reshape(count, spec.c)
        out = np.zeros(count, dtype=np.uint8)
        for row in range(count):
            values = [int(v) for v in base_values[row]]
            cell = spec.cell_positions(self.address(values))
            claims = spec.decode_cell([int(bit) for bit in rows[row, cell.start:cell.stop]])
            out[row] = all(
                _claim_holds(self.base_table, [int(bit) for bit in copies[row, i]], claims[i], values[i])
                for i in range(spec.c)
            )
        return out

    def descriptor(self) -> Dict[str, Any]:
        spec = self.spec
        return {
            "family": "cheatsheet",
            "params": {
                "base": spec.base.descriptor(),
                "c": spec.c,
                "cert_size": spec.cert_size,
                "ptr_width": spec.ptr_width,
            },
        }


def cheat_sheet(spec: CheatSheetSpec) -> CheatSheet:
    return CheatSheet(spec)


def rubinstein_profile(b: int, n: int, r: int) -> Dict[str, int]:
    """Closed-form measure values of the Rubinstein family at full size."""
    params = RubinsteinParams(b, n, r)
    return {
        "C1(g)": params.base_arity,
        "C0(g)": n if n >= 2 else 1,
        "bs0(g)": n,
        # accepting inputs sit 2b apart, so b >= 2 leaves one accepting neighbour
        "s0(g)": 1 if b >= 2 else n,
        "bs(f,0)": r * n,
        "C(f,0)": r * n,
        "s(f) single accepting copy": params.base_arity,
    }


def _parse_ints(text: str, count: int, literal: str) -> List[int]:
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != count:
        raise UsageError(f"{literal!r}: expected {count} comma-separated integers")
    try:
        return [int(part) for part in parts]
    except ValueError as exc:
        raise UsageError(f"{literal!r}: parameters must be integers") from exc


_DENSE_BUILDERS = {
    "parity": parity,
    "and": and_function,
    "or": or_function,
    "maj": majority,
    "const0": lambda n: constant(n, 0),
    "const1": lambda n: constant(n, 1),
}


def parse_family(literal: str, config: Config = DEFAULT) -> StructuredFunction:
    """Parse ``rub:b,n``, ``modrub:b,n,r``, ``tribes:n``, ``dualtribes:n``,
    ``cs:<base literal>,c``, the dense builders (``parity:n`` ...), or a table file path."""
    literal = literal.strip()
    name, _, rest = literal.partition(":")
    try:
        if name == "rub":
            return RubinsteinBase(*_parse_ints(rest, 2, literal))
        if name == "modrub":
            return ModifiedRubinstein(*_parse_ints(rest, 3, literal))
        if name == "tribes":
            return Tribes(*_parse_ints(rest, 1, literal))
        if name == "dualtribes":
            return DualTribes(*_parse_ints(rest, 1, literal))
        if name == "cs":
            base_literal, _, c_text = rest.rpartition(",")
            if not base_literal:
                raise UsageError(f"{literal!r}: expected cs:<base>,<c>")
            base = parse_family(base_literal, config)
            (c,) = _parse_ints(c_text, 1, literal)
            return CheatSheet(cheat_sheet_spec(base, c, config))
        if name in _DENSE_BUILDERS:
            (arity,) = _parse_ints(rest, 1, literal)
            return _DENSE_BUILDERS[name](arity)
    except InputShapeError as exc:
        raise UsageError(f"{literal!r}: {exc}") from exc
    path = Path(literal)
    if path.exists():
        return read_table(path, config)
    raise UsageError(f"unknown function literal {literal!r}")
