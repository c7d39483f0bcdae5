import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condenselab.config import Config
from condenselab.constructions import and_function, modified_rubinstein, parity, rubinstein_base, tribes
from condenselab.errors import CapacityError, InputShapeError
from condenselab.fnrep import (
    Cell,
    Constancy,
    DenseTruthTable,
    Restriction,
    classify,
    enumerate_all_restrictions,
    enumerate_restrictions,
    is_constant,
    materialize,
    negate_inputs,
    negate_table,
    parse_bits,
    permute_inputs,
    random_restriction,
    read_table,
    restrict,
    restrict_table,
    restriction_count,
    write_table,
)


def tables(arity):
    return st.lists(st.integers(0, 1), min_size=2 ** arity, max_size=2 ** arity).map(
        lambda values: DenseTruthTable.from_values(arity, values)
    )


def restrictions(arity):
    return st.lists(st.sampled_from(list(Cell)), min_size=arity, max_size=arity).map(
        lambda cells: Restriction(tuple(cells))
    )


def test_hex_encoding_puts_index_zero_in_the_low_bit():
    table = DenseTruthTable.from_values(2, [0, 0, 0, 1])
    assert table.to_hex() == "8"
    assert DenseTruthTable.from_hex(2, "8") == table
    assert DenseTruthTable.from_values(1, [1, 0]).to_hex() == "1"


def test_values_are_read_only():
    table = and_function(2)
    with pytest.raises(ValueError):
        table.values[0] = 1


def test_evaluate_checks_length():
    with pytest.raises(InputShapeError):
        and_function(3).evaluate((1, 1))
    with pytest.raises(InputShapeError):
        parse_bits("10a")


def test_bad_table_shape():
    with pytest.raises(InputShapeError):
        DenseTruthTable.from_values(2, [0, 1, 1])
    with pytest.raises(InputShapeError):
        DenseTruthTable.from_hex(2, "F")


def test_restriction_literal():
    rho = Restriction.parse("1*0*")
    assert str(rho) == "1*0*"
    assert rho.free_positions == (1, 3)
    assert rho.merge((0, 1)) == (1, 0, 0, 1)
    with pytest.raises(InputShapeError):
        Restriction.parse("1x0")


def test_compose_flattens():
    outer = Restriction.parse("1**")
    assert outer.compose(Restriction.parse("*0")) == Restriction.parse("1*0")
    nested = restrict(restrict(and_function(3), outer), Restriction.parse("*0"))
    assert nested.rho == Restriction.parse("1*0")
    assert nested.arity == 1


def test_restrict_and_to_projection():
    sub = restrict_table(and_function(3), Restriction.parse("1*1"))
    assert sub.arity == 1
    assert list(sub.values) == [0, 1]
    with pytest.raises(InputShapeError):
        restrict_table(and_function(3), Restriction.parse("1*"))


@settings(max_examples=60, deadline=None)
@given(table=tables(4), rho=restrictions(4), data=st.data())
def test_restrict_matches_merge(table, rho, data):
    y = data.draw(st.lists(st.integers(0, 1), min_size=rho.free_count, max_size=rho.free_count))
    full = rho.merge(y)
    assert restrict_table(table, rho).evaluate(y) == table.evaluate(full)
    assert restrict(table, rho).evaluate(y) == table.evaluate(full)


def test_structured_restriction_agrees_with_dense():
    rho = Restriction.parse("0**1")
    structured = materialize(restrict(tribes(2), rho))
    assert structured == restrict_table(materialize(tribes(2)), rho)


def test_classify():
    assert classify(and_function(2)) is Constancy.NONCONSTANT
    assert classify(restrict_table(and_function(2), Restriction.parse("0*"))) is Constancy.CONSTANT0
    assert classify(restrict_table(and_function(2), Restriction.parse("11"))) is Constancy.CONSTANT1


def test_is_constant_uses_structure_past_dense_cap():
    from condenselab.constructions import RubinsteinBase

    g = RubinsteinBase(2, 3)
    small = Config(dense_cap=2)
    assert is_constant(restrict(g, Restriction.parse("11****")), small) is Constancy.NONCONSTANT
    assert is_constant(restrict(g, Restriction.parse("101***")), small) is Constancy.CONSTANT0
    with pytest.raises(CapacityError):
        is_constant(g, small)


def test_negate_inputs_on_parity3_complements():
    table = parity(3)
    negated = negate_table(table)
    assert np.array_equal(negated.values, 1 - table.values)
    structured = negate_inputs(table)
    assert all(structured.evaluate(x) == table.evaluate(tuple(1 - b for b in x)) for x in [(0, 0, 0), (1, 0, 1)])
    assert negate_inputs(structured) is table


@settings(max_examples=40, deadline=None)
@given(table=tables(4), data=st.data())
def test_negating_twice_is_the_identity(table, data):
    x = tuple(data.draw(st.lists(st.integers(0, 1), min_size=4, max_size=4)))
    twice = negate_inputs(negate_inputs(table))
    assert twice.evaluate(x) == table.evaluate(x)
    assert negate_table(negate_table(table)) == table
    once = negate_inputs(table)
    assert once.evaluate(x) == table.evaluate(tuple(1 - bit for bit in x))


@settings(max_examples=60, deadline=None)
@given(
    f=st.sampled_from([tribes(3), modified_rubinstein(2, 2, 2), rubinstein_base(2, 5)]),
    data=st.data(),
)
def test_nested_structured_restriction_matches_pointwise(f, data):
    outer = data.draw(restrictions(f.arity))
    inner = data.draw(restrictions(outer.free_count))
    y = data.draw(st.lists(st.integers(0, 1), min_size=inner.free_count, max_size=inner.free_count))
    nested = restrict(restrict(f, outer), inner)
    assert nested.inner is f
    assert nested.evaluate(y) == f.evaluate(outer.merge(inner.merge(y)))


def test_permute_inputs():
    table = DenseTruthTable.from_values(2, [0, 1, 0, 0])  # x1 AND NOT x2
    swapped = permute_inputs(table, (1, 0))
    assert swapped.evaluate((0, 1)) == 1
    assert swapped.evaluate((1, 0)) == 0
    with pytest.raises(InputShapeError):
        permute_inputs(table, (0, 0))


def test_enumerate_restrictions_order_and_count():
    found = [str(rho) for rho in enumerate_restrictions(4, 2)]
    assert len(found) == restriction_count(4, 2) == 24
    assert len(set(found)) == 24
    assert found[:4] == ["**00", "**01", "**10", "**11"]
    assert sum(1 for _ in enumerate_all_restrictions(3)) == 27


def test_enumeration_budget_is_eager():
    with pytest.raises(CapacityError) as info:
        enumerate_restrictions(4, 2, Config(enumeration_budget=10))
    assert info.value.cap_name == "enumeration_budget"
    assert info.value.required == 24


def test_random_restriction_has_requested_free_count():
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert random_restriction(6, 2, rng).free_count == 2


def test_table_file_round_trip(tmp_path):
    path = tmp_path / "t.tbl"
    write_table(path, materialize(tribes(2)))
    assert path.read_text(encoding="utf-8").splitlines()[0] == "arity: 4"
    assert read_table(path) == materialize(tribes(2))
    with pytest.raises(CapacityError):
        read_table(path, Config(dense_cap=3))


def test_materialize_respects_dense_cap():
    with pytest.raises(CapacityError):
        materialize(tribes(3), Config(dense_cap=8))
