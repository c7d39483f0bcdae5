from fractions import Fraction

import pytest

from condenselab.condense import (
    CondensationQuery,
    Exhaustive,
    OptimalityPoint,
    Sample,
    condensation_profile,
    incondensability_bounds,
    max_measure_over_restrictions,
    optimality_exponent,
    optimality_grid,
    profile_is_monotone,
    sparsity_condensation_search,
    verify_base_restriction_lemmas,
    verify_incondensability,
)
from condenselab.config import Config
from condenselab.constructions import and_function, majority, parity, tribes
from condenselab.errors import CapacityError, InputShapeError, UsageError
from condenselab.fnrep import Restriction
from condenselab.measures import MeasureKind, parse_measure
from condenselab.reports import ClaimStatus


def test_max_over_restrictions_keeps_first_witness():
    result = max_measure_over_restrictions(CondensationQuery(and_function(3), parse_measure("s"), 2))
    assert result.value == 2
    assert result.witness == Restriction.parse("**1")
    assert result.examined == 6
    assert not result.lower_bound
    assert result.to_dict()["witness"] == "**1"


def test_zero_free_budget_gives_constants():
    result = max_measure_over_restrictions(CondensationQuery(majority(3), parse_measure("bs"), 0))
    assert result.value == 0
    assert result.witness == Restriction.parse("000")


def test_parallel_scan_matches_serial():
    query = CondensationQuery(tribes(2), parse_measure("C"), 2)
    serial = max_measure_over_restrictions(query, jobs=1)
    parallel = max_measure_over_restrictions(query, jobs=2)
    assert (parallel.value, parallel.witness, parallel.examined) == (serial.value, serial.witness, serial.examined)


def test_sampled_search_is_a_lower_bound():
    exact = max_measure_over_restrictions(CondensationQuery(tribes(2), parse_measure("bs"), 3))
    sampled = max_measure_over_restrictions(CondensationQuery(tribes(2), parse_measure("bs"), 3, Sample(5, 20)))
    assert sampled.lower_bound
    assert sampled.value <= exact.value
    assert sampled.to_dict()["mode"] == {"kind": "Sampled", "seed": 5, "trials": 20}
    again = max_measure_over_restrictions(CondensationQuery(tribes(2), parse_measure("bs"), 3, Sample(5, 20)))
    assert again.witness == sampled.witness


def test_query_validation():
    with pytest.raises(InputShapeError):
        CondensationQuery(and_function(3), parse_measure("s"), 4)
    with pytest.raises(UsageError):
        Sample(1, 0)
    with pytest.raises(CapacityError):
        max_measure_over_restrictions(
            CondensationQuery(tribes(2), parse_measure("s"), 2), Config(enumeration_budget=10)
        )


def test_profile_rows():
    rows = condensation_profile(tribes(2), parse_measure("s"), range(5))
    assert [row.value for row in rows] == [0, 1, 2, 2, 2]
    assert profile_is_monotone(rows)
    assert rows[0].to_dict()["mode"] == "Exhaustive"


def test_profile_marks_capacity_rows():
    rows = condensation_profile(tribes(2), parse_measure("s"), [0, 4], Exhaustive(), Config(enumeration_budget=8))
    assert rows[0].value is None
    assert "enumeration_budget" in rows[0].error
    assert rows[1].value == 2


def test_base_restriction_lemmas():
    report = verify_base_restriction_lemmas(2, 2)
    assert report.claim_id == "RUB-LEMMA"
    assert report.observed["examined"] == 81
    assert report.observed["violations"] == 0
    assert report.status is ClaimStatus.PASS


def test_incondensability_bounds():
    bounds = incondensability_bounds(2, 2, 2, 4, MeasureKind.BLOCK_SENSITIVITY)
    assert bounds == {"ones": 4, "zeros": 4, "overall": 4}
    assert incondensability_bounds(2, 2, 2, 3, MeasureKind.CERTIFICATE)["zeros"] == Fraction(11, 2)


def test_incondensability_at_full_and_half_budget():
    full = verify_incondensability(2, 2, 2, 8)
    assert full.status is ClaimStatus.PASS
    assert full.observed["ones_side"] == 4
    assert full.observed["examined"] == 1
    half = verify_incondensability(2, 2, 2, 4, MeasureKind.CERTIFICATE)
    assert half.status is ClaimStatus.PASS
    assert half.mode == {"kind": "Exhaustive"}


def test_sampled_incondensability_never_passes():
    report = verify_incondensability(2, 2, 2, 4, mode=Sample(0, 30))
    assert report.status is ClaimStatus.NO_COUNTEREXAMPLE
    with pytest.raises(UsageError):
        verify_incondensability(2, 2, 2, 4, MeasureKind.DT_DEPTH)


def test_optimality_exponent():
    assert optimality_exponent(OptimalityPoint(1, 2)) == Fraction(3, 2)
    assert optimality_exponent(OptimalityPoint(0, 0)) == 1
    with pytest.raises(InputShapeError):
        OptimalityPoint(-1, 0)


def test_optimality_grid():
    result = optimality_grid(Fraction(1, 2), Fraction(3))
    assert result.value == Fraction(3, 2)
    assert result.argmax == OptimalityPoint(1, 2)
    assert result.maximizers == (OptimalityPoint(1, 2),)
    assert result.points == 49
    single = optimality_grid(Fraction(1), Fraction(0))
    assert single.points == 1
    assert single.value == 1
    assert optimality_grid(Fraction(1), Fraction(1)).points == 4
    with pytest.raises(UsageError):
        optimality_grid(Fraction(0), Fraction(1))


def test_sparsity_condensation_search():
    found, rho = sparsity_condensation_search(and_function(2), 1)
    assert (found, rho) == (False, None)
    found, rho = sparsity_condensation_search(and_function(2), 2)
    assert found and rho == Restriction.parse("**")
    found, rho = sparsity_condensation_search(parity(3), 0)
    assert found and rho.free_count == 0
