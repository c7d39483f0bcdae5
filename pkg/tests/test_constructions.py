import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condenselab.constructions import (
    CertificateClaim,
    CheatSheet,
    CheatSheetSpec,
    DualTribes,
    ModifiedRubinstein,
    RubinsteinBase,
    Tribes,
    cheat_sheet,
    cheat_sheet_spec,
    majority,
    modified_rubinstein,
    parse_family,
    random_monotone,
    rubinstein_base,
    rubinstein_profile,
    tribes,
    verify_certificate,
)
from condenselab.errors import InputShapeError, MalformedClaimError, UsageError
from condenselab.fnrep import DenseTruthTable, materialize


def test_rubinstein_base_accepts_one_full_block():
    g = RubinsteinBase(2, 2)
    assert g.evaluate((1, 1, 0, 0)) == 1
    assert g.evaluate((0, 0, 1, 1)) == 1
    assert g.evaluate((1, 1, 1, 1)) == 0
    assert g.evaluate((1, 0, 0, 1)) == 0
    assert materialize(g).count_ones() == 2


def test_modified_rubinstein_is_or_of_copies():
    f = ModifiedRubinstein(2, 2, 2)
    assert f.arity == 8
    assert f.evaluate((0, 0, 0, 0, 0, 0, 1, 1)) == 1
    assert f.evaluate((1, 1, 1, 0, 0, 0, 0, 0)) == 0
    assert list(f.copy_positions(2)) == [4, 5, 6, 7]


def test_tribes_and_dual():
    assert tribes(2).evaluate((1, 0, 0, 1)) == 1
    assert tribes(2).evaluate((1, 1, 0, 0)) == 0
    assert DualTribes(2).evaluate((1, 1, 0, 0)) == 1
    assert DualTribes(2).evaluate((1, 0, 0, 1)) == 0
    assert Tribes(3).block_of(4) == 2


def test_bad_parameters():
    with pytest.raises(InputShapeError):
        RubinsteinBase(0, 2)
    with pytest.raises(InputShapeError):
        Tribes(0)


def test_majority():
    table = majority(3)
    assert table.evaluate((1, 1, 0)) == 1
    assert table.evaluate((1, 0, 0)) == 0


def test_random_monotone_is_monotone():
    rng = np.random.default_rng(11)
    for arity in range(1, 6):
        values = random_monotone(arity, rng).values.astype(int)
        for i in range(arity):
            view = values.reshape(-1, 2, 2 ** i)
            assert np.all(view[:, 1, :] >= view[:, 0, :])


def test_verify_certificate():
    x = (1, 0, 0, 1)
    assert verify_certificate(tribes(2), x, CertificateClaim.of([(1, 1), (4, 1)]), 1)
    assert not verify_certificate(tribes(2), x, CertificateClaim.of([(1, 1)]), 1)
    assert not verify_certificate(tribes(2), x, CertificateClaim.of([(2, 1), (4, 1)]), 1)
    with pytest.raises(MalformedClaimError):
        verify_certificate(tribes(2), x, CertificateClaim.of([(5, 1)]), 1)


def test_cheat_sheet_layout():
    spec = cheat_sheet_spec(tribes(2), 2)
    assert spec.cert_size == 2
    assert spec.ptr_width == 2
    assert spec.m == 6
    assert spec.cell_count == 4
    assert spec.arity == 56
    assert spec.locate(0) == ("copy", 1, 0)
    assert spec.locate(8) == ("cell", 0, 0)
    assert spec.locate(55) == ("cell", 3, 11)


def test_cell_encoding_round_trips():
    spec = cheat_sheet_spec(tribes(2), 2)
    claims = [CertificateClaim.of([(1, 1), (4, 1)]), CertificateClaim.of([(2, 0), (3, 1)])]
    assert spec.decode_cell(spec.encode_cell(claims)) == claims
    with pytest.raises(MalformedClaimError):
        spec.encode_claim(CertificateClaim.of([(1, 1)]))


def _cheat_sheet_input(spec, copy_bits, address, claims):
    bits = [0] * spec.arity
    for i, copy in enumerate(copy_bits):
        bits[i * spec.base_arity:(i + 1) * spec.base_arity] = copy
    cell = spec.cell_positions(address)
    bits[cell.start:cell.stop] = spec.encode_cell(claims)
    return tuple(bits)


def test_cheat_sheet_accepts_valid_claims():
    spec = cheat_sheet_spec(tribes(2), 2)
    f = CheatSheet(spec)
    claim = CertificateClaim.of([(1, 1), (4, 1)])
    copies = [(1, 0, 0, 1), (1, 0, 0, 1)]
    assert f.evaluate(_cheat_sheet_input(spec, copies, 3, [claim, claim])) == 1
    # wrong cell for base values (1, 1)
    assert f.evaluate(_cheat_sheet_input(spec, copies, 0, [claim, claim])) == 0
    wrong = CertificateClaim.of([(1, 1), (2, 1)])
    assert f.evaluate(_cheat_sheet_input(spec, copies, 3, [claim, wrong])) == 0


@settings(max_examples=40, deadline=None)
@given(
    copies=st.lists(st.lists(st.integers(0, 1), min_size=4, max_size=4), min_size=2, max_size=2),
    noise=st.lists(st.integers(0, 1), min_size=48, max_size=48),
)
def test_cheat_sheet_ignores_cells_it_does_not_address(copies, noise):
    spec = cheat_sheet_spec(tribes(2), 2)
    f = CheatSheet(spec)
    address = sum(int(tribes(2).evaluate(tuple(copy))) << i for i, copy in enumerate(copies))
    claim = CertificateClaim.of([(1, 1), (4, 1)])
    clean = _cheat_sheet_input(spec, copies, address, [claim, claim])
    noisy = list(clean)
    for other in range(spec.cell_count):
        if other == address:
            continue
        cell = spec.cell_positions(other)
        noisy[cell.start:cell.stop] = noise[other * spec.cell_width:(other + 1) * spec.cell_width]
    assert f.evaluate(tuple(noisy)) == f.evaluate(clean)


def test_cheat_sheet_spec_checks_the_certificate_size():
    with pytest.raises(MalformedClaimError):
        cheat_sheet(CheatSheetSpec(tribes(2), 2, 1, 2))
    with pytest.raises(MalformedClaimError):
        CheatSheetSpec(tribes(2), 2, 3, 2)
    assert CheatSheetSpec(tribes(2), 2, 2, 2) == cheat_sheet_spec(tribes(2), 2)


def test_rubinstein_profile():
    profile = rubinstein_profile(2, 2, 4)
    assert profile["C1(g)"] == 4
    assert profile["C0(g)"] == 2
    assert profile["bs(f,0)"] == 8


def test_parse_family():
    assert parse_family("tribes:2") == Tribes(2)
    assert parse_family("modrub:2,2,4") == ModifiedRubinstein(2, 2, 4)
    assert isinstance(parse_family("parity:3"), DenseTruthTable)
    assert parse_family("cs:tribes:2,2").arity == 56
    for bad in ("rub:2", "tribes:x", "bogus:1", "tribes:0"):
        with pytest.raises(UsageError):
            parse_family(bad)


def test_parse_family_reads_table_files(tmp_path):
    from condenselab.fnrep import write_table

    path = tmp_path / "maj.tbl"
    write_table(path, majority(3))
    assert parse_family(str(path)) == majority(3)


def test_factories_match_literals():
    assert rubinstein_base(2, 3) == parse_family("rub:2,3")
    assert modified_rubinstein(2, 2, 3) == parse_family("modrub:2,2,3")
    wrapped = cheat_sheet(cheat_sheet_spec(tribes(2), 2))
    assert isinstance(wrapped, CheatSheet)
    assert wrapped.arity == parse_family("cs:tribes:2,2").arity
