"""Exact AND-decision-tree (and, by duality, OR-decision-tree) search.

A search state is the set of still-consistent inputs, stored as a Python
int bitmask over the ``2**arity`` truth-table indices.  A 1-answer to the
conjunction over ``S`` intersects the state with the all-ones subcube on
``S``; a 0-answer intersects it with the complement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from condenselab.errors import InputShapeError
from condenselab.fnrep import DenseTruthTable, negate_table, rows_for_indices

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AndDecisionTree:
    """Leaf when ``query`` is None; otherwise an internal node.

    ``query`` holds 1-based variable indices.  ``kind`` is ``"and"`` for
    conjunction queries and ``"or"`` for disjunction queries.
    """

    query: Optional[Tuple[int, ...]] = None
    zero: Optional["AndDecisionTree"] = None
    one: Optional["AndDecisionTree"] = None
    output: Optional[int] = None
    kind: str = "and"

    @classmethod
    def leaf(cls, output: int, kind: str = "and") -> "AndDecisionTree":
        return cls(output=int(output), kind=kind)

    @property
    def is_leaf(self) -> bool:
        return self.query is None

    def answer(self, x) -> int:
        bits = [int(x[var - 1]) for var in self.query]
        return int(all(bits)) if self.kind == "and" else int(any(bits))

    def evaluate(self, x) -> int:
        node = self
        while not node.is_leaf:
            node = node.one if node.answer(x) else node.zero
        return node.output

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.zero.depth(), self.one.depth())

    def size(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + self.zero.size() + self.one.size()

    def verify(self, table: DenseTruthTable) -> bool:
        """Every input reaches a leaf with the right output and no leaf is unreachable."""
        rows = rows_for_indices(np.arange(2 ** table.arity), table.arity)
        return self._verify_rows(rows, table.values)

    def _verify_rows(self, rows: np.ndarray, expected: np.ndarray) -> bool:
        if rows.shape[0] == 0:
            return False
        if self.is_leaf:
            return bool(np.all(expected == self.output))
        if any(var < 1 or var > rows.shape[1] for var in self.query) or not self.query:
            return False
        columns = rows[:, [var - 1 for var in self.query]]
        answers = columns.all(axis=1) if self.kind == "and" else columns.any(axis=1)
        return self.zero._verify_rows(rows[~answers], expected[~answers]) and self.one._verify_rows(
            rows[answers], expected[answers]
        )

    def to_dict(self) -> Dict[str, Any]:
        if self.is_leaf:
            return {"output": self.output}
        return {
            "kind": self.kind,
            "query": list(self.query),
            "zero": self.zero.to_dict(),
            "one": self.one.to_dict(),
        }


def dual_table(table: DenseTruthTable) -> DenseTruthTable:
    """f'(y) = 1 - f(not y); OR-trees for f are AND-trees for f'."""
    return negate_table(table, inputs=True, output=True)


def dual_tree(tree: AndDecisionTree) -> AndDecisionTree:
    kind = "or" if tree.kind == "and" else "and"
    if tree.is_leaf:
        return AndDecisionTree.leaf(1 - tree.output, kind)
    return AndDecisionTree(query=tree.query, zero=dual_tree(tree.one), one=dual_tree(tree.zero), kind=kind)


def _mask_to_vars(mask: int) -> Tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1)


class AndTreeSolver:
    """Iterative-deepening AND-tree search with a memo shared across calls.

    Memo entries are keyed by ``(domain, ones & domain)`` so different
    functions of the same arity reuse each other's subproblems.
    """

    def __init__(self, arity: int) -> None:
        if arity < 0:
            raise InputShapeError("arity must be non-negative")
        self.arity = arity
        self.full = (1 << 2 ** arity) - 1
        indices = np.arange(2 ** arity, dtype=np.int64)
        self.queries: List[Tuple[int, int]] = []
        for subset in range(1, 2 ** arity):
            accepted = (indices & subset) == subset
            bits = np.packbits(accepted.astype(np.uint8), bitorder="little").tobytes()
            self.queries.append((subset, int.from_bytes(bits, "little")))
        # (domain, ones) -> [largest infeasible budget + 1, smallest feasible budget]
        self.memo: Dict[Tuple[int, int], List[Optional[int]]] = {}

    def _feasible(self, domain: int, ones: int, budget: int) -> bool:
        if ones == 0 or ones == domain:
            return True
        if budget == 0:
            return False
        key = (domain, ones)
        entry = self.memo.get(key)
        if entry is None:
            entry = self.memo[key] = [1, None]
        if entry[1] is not None and entry[1] <= budget:
            return True
        if entry[0] > budget:
            return False
        seen = set()
        for _, accepted in self.queries:
            yes = domain & accepted
            if yes == 0 or yes == domain or yes in seen:
                continue
            seen.add(yes)
            no = domain & ~accepted
            if self._feasible(yes, ones & yes, budget - 1) and self._feasible(no, ones & no, budget - 1):
                entry[1] = budget
                return True
        entry[0] = budget + 1
        return False

    def _build(self, domain: int, ones: int, budget: int) -> AndDecisionTree:
        if ones == 0:
            return AndDecisionTree.leaf(0)
        if ones == domain:
            return AndDecisionTree.leaf(1)
        for subset, accepted in self.queries:
            yes = domain & accepted
            if yes == 0 or yes == domain:
                continue
            no = domain & ~accepted
            if self._feasible(yes, ones & yes, budget - 1) and self._feasible(no, ones & no, budget - 1):
                return AndDecisionTree(
                    query=_mask_to_vars(subset),
                    zero=self._build(no, ones & no, budget - 1),
                    one=self._build(yes, ones & yes, budget - 1),
                )
        raise AssertionError("feasible budget must yield a tree")

    def solve(self, table: DenseTruthTable) -> Tuple[int, AndDecisionTree]:
        if table.arity != self.arity:
            raise InputShapeError(f"solver built for arity {self.arity}, got table of arity {table.arity}")
        ones = table.to_int()
        budget = 0
        while not self._feasible(self.full, ones, budget):
            budget += 1
        tree = self._build(self.full, ones, budget)
        logger.debug("AND-tree depth %d for %s (memo %d)", budget, table.to_hex(), len(self.memo))
        return budget, tree
