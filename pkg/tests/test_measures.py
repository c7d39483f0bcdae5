import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condenselab.config import Config
from condenselab.constructions import and_function, constant, dual_tribes, majority, or_function, parity, tribes
from condenselab.errors import CapacityError, InputShapeError, UsageError
from condenselab.fnrep import DenseTruthTable, index_to_bits, materialize
from condenselab.measures import (
    DepthSolver,
    MeasureKind,
    MeasureSpec,
    Tag,
    and_dt_depth_bounds,
    and_dt_depth_exact,
    block_sensitivity,
    block_sensitivity_at,
    certificate,
    certificate_at,
    compute_measure,
    degree,
    dt_depth,
    fourier_sparsity,
    log_factor,
    max_disjoint_packing,
    measure_at,
    minimal_sensitive_blocks,
    one_depth,
    or_dt_depth_exact,
    or_dt_tree,
    parse_measure,
    sensitivity,
    sensitivity_at,
    zero_charge,
    zero_depth,
)


def tables(arity):
    return st.integers(0, 2 ** (2 ** arity) - 1).map(lambda value: DenseTruthTable.from_int(arity, value))


def test_and_measures():
    f = and_function(3)
    assert sensitivity(f) == 3
    assert sensitivity(f, Tag.ON_ZEROS) == 1
    assert block_sensitivity(f, Tag.ON_ONES) == 3
    assert certificate(f) == 3
    assert certificate(f, Tag.ON_ZEROS) == 1
    assert dt_depth(f) == 3


def test_majority_and_parity():
    assert sensitivity(majority(3)) == 2
    assert block_sensitivity(majority(3)) == 2
    assert certificate(majority(3)) == 2
    assert block_sensitivity(parity(3)) == 3
    assert certificate(parity(3)) == 3


def test_constants_measure_zero():
    f = constant(3, 1)
    assert sensitivity(f) == 0
    assert block_sensitivity(f) == 0
    assert certificate(f) == 0
    assert dt_depth(f) == 0
    assert sensitivity(f, Tag.ON_ZEROS) == 0


def test_tribes2_values():
    f = tribes(2)
    assert sensitivity(f) == 2
    assert certificate(f) == 2
    assert dt_depth(f) == 4
    assert zero_depth(f) == 3


def test_tribes3_zero_depth():
    assert zero_depth(tribes(3)) == 7


def test_sensitivity_at_structured_function():
    assert sensitivity_at(tribes(3), (1, 0, 0, 1, 0, 0, 1, 0, 0)) == 3
    with pytest.raises(InputShapeError):
        sensitivity_at(tribes(2), (1, 0))


def test_minimal_blocks_and_packing():
    assert minimal_sensitive_blocks(and_function(3), 0) == [0b111]
    assert minimal_sensitive_blocks(and_function(3), 7) == [1, 2, 4]
    # {1},{2,3} beats {1},{3} and {1,2},{3} on the lexicographic tie-break
    assert max_disjoint_packing([0b011, 0b001, 0b110, 0b100]) == [0b001, 0b110]
    assert max_disjoint_packing([]) == []


def test_block_sensitivity_witness():
    value, family = block_sensitivity_at(and_function(3), (1, 1, 1))
    assert value == 3
    assert family.blocks == ((1,), (2,), (3,))
    assert family.verify(and_function(3))
    value, family = block_sensitivity_at(and_function(3), (0, 0, 0))
    assert value == 1
    assert family.blocks == ((1, 2, 3),)


def test_certificate_witness():
    value, witness = certificate_at(and_function(3), (0, 1, 1))
    assert value == 1
    assert witness.positions == (1,)
    assert witness.value == 0
    assert witness.verify(and_function(3))
    value, witness = certificate_at(tribes(2), (1, 0, 0, 1))
    assert witness.positions == (1, 4)
    assert witness.to_dict()["positions"] == [1, 4]


def test_lexicographically_first_certificate():
    # x1 OR x2 at 11: both {1} and {2} certify; {1} comes first
    value, witness = certificate_at(or_function(2), (1, 1))
    assert (value, witness.positions) == (1, (1,))


@settings(max_examples=80, deadline=None)
@given(table=tables(3))
def test_measure_chain(table):
    s, bs, c, d = sensitivity(table), block_sensitivity(table), certificate(table), dt_depth(table)
    assert s <= bs <= c <= d
    assert c == max(certificate(table, Tag.ON_ZEROS), certificate(table, Tag.ON_ONES))
    assert zero_depth(table) <= d
    assert one_depth(table) <= d


@settings(max_examples=40, deadline=None)
@given(table=tables(4), index=st.integers(0, 15))
def test_pointwise_witnesses_verify(table, index):
    x = index_to_bits(index, 4)
    bs, family = block_sensitivity_at(table, x)
    assert len(family.blocks) == bs
    assert family.verify(table)
    c, witness = certificate_at(table, x)
    assert witness.verify(table)
    assert bs <= c


def test_depth_solver_best_variable():
    solver = DepthSolver(zero_charge)
    table = tribes(2)
    values = materialize(table).values
    assert solver.best_variable(values, 4) in range(4)
    assert solver.best_variable(np.zeros(4, dtype=np.uint8), 2) is None


def test_and_tree_depth():
    depth, tree = and_dt_depth_exact(tribes(2))
    assert depth == 3
    assert tree.depth() == 3
    assert and_dt_depth_bounds(tribes(2)) == (3, 9)
    assert and_dt_depth_exact(and_function(3))[0] == 1
    assert and_dt_depth_exact(or_function(3))[0] == 3


def test_or_tree_depth_via_duality():
    assert or_dt_depth_exact(or_function(3)) == 1
    assert or_dt_depth_exact(dual_tribes(2)) == 3
    depth, tree = or_dt_tree(dual_tribes(2))
    assert tree.kind == "or"
    assert tree.verify(materialize(dual_tribes(2)))


def test_log_factor():
    assert [log_factor(n) for n in (1, 2, 3, 4, 7, 8)] == [1, 2, 2, 3, 3, 4]


def test_fourier_wrappers():
    assert fourier_sparsity(and_function(2)) == 4
    assert fourier_sparsity(parity(4)) == 1
    assert degree(and_function(3)) == 3
    assert degree(constant(3, 1)) == 0


def test_caps_raise_capacity_error():
    small = Config(dt_cap=2, bs_cap=2, cert_cap=2, andtree_cap=2)
    f = and_function(3)
    with pytest.raises(CapacityError):
        dt_depth(f, small)
    with pytest.raises(CapacityError):
        block_sensitivity(f, Tag.ALL, small)
    with pytest.raises(CapacityError) as info:
        certificate(f, Tag.ALL, small)
    assert info.value.cap_name == "cert_cap"
    with pytest.raises(CapacityError):
        and_dt_depth_exact(f, small)


def test_parse_measure():
    assert parse_measure("bs", "zeros") == MeasureSpec(MeasureKind.BLOCK_SENSITIVITY, Tag.ON_ZEROS)
    assert parse_measure("bs", "zeros").label == "bs0"
    assert parse_measure("certificate", "ones").label == "C1"
    assert parse_measure("zero_depth").kind is MeasureKind.ZERO_DEPTH
    with pytest.raises(UsageError):
        parse_measure("D", "zeros")
    with pytest.raises(UsageError):
        parse_measure("nope")
    with pytest.raises(UsageError):
        parse_measure("s", "maybe")


def test_compute_measure_dispatch():
    f = tribes(2)
    expected = {"s": 2, "bs": 2, "C": 2, "D": 4, "D0": 3, "and": 3, "sparsity": fourier_sparsity(f)}
    for name, value in expected.items():
        assert compute_measure(f, parse_measure(name)) == value


def test_measure_at():
    value, witness = measure_at(and_function(3), parse_measure("C"), (1, 1, 1))
    assert value == 3
    assert measure_at(and_function(3), parse_measure("s"), (1, 1, 0)) == (1, None)
    with pytest.raises(UsageError):
        measure_at(and_function(3), parse_measure("D"), (1, 1, 1))
