import pytest

from lvkit.local_factors import (
    INERT,
    INERT_ALL_FIXED,
    INERT_HALF_SWAP,
    SPLIT,
    SPLIT_V,
    InducedDatum,
    IsobaricShape,
    PlaceConfigF,
    admissible_actions,
    compositions,
    lemma32_cases,
    partitions,
    prop34_cases,
    prop34_lhs,
    prop34_rhs,
    verify_lemma32,
    verify_prop34,
)


def test_partitions_are_unordered():
    assert len(partitions(5)) == 7
    assert all(tuple(sorted(p, reverse=True)) == tuple(p) for p in partitions(5))


def test_compositions_are_ordered():
    got = set(compositions(3))
    assert got == {(3,), (2, 1), (1, 2), (1, 1, 1)}
    for n in range(1, 8):
        cs = compositions(n)
        assert len(cs) == 2 ** (n - 1)
        assert all(sum(c) == n for c in cs)
        assert len(set(cs)) == len(cs)


def test_lemma32_case_grid():
    cases = lemma32_cases(3)
    assert len(cases) == 12
    kinds = {c.kind for _, c in cases}
    assert kinds == {SPLIT, INERT}


@pytest.mark.parametrize("parts", [(2,), (1, 1), (2, 1), (1, 2), (3, 1)])
@pytest.mark.parametrize("kind", [SPLIT, INERT])
def test_lemma32_identity(parts, kind):
    rep = verify_lemma32(IsobaricShape(parts), PlaceConfigF(kind))
    assert rep.equal
    assert rep.case.startswith("lemma32 %s" % kind)
    assert rep.elapsed_ms >= 0
    assert rep.lhs == rep.rhs


def test_induced_datum_validation():
    with pytest.raises(ValueError):
        InducedDatum(2, 2, INERT_ALL_FIXED)
    with pytest.raises(ValueError):
        InducedDatum(1, 2, INERT_HALF_SWAP)
    with pytest.raises(ValueError):
        InducedDatum(2, 1, "Bogus")


def test_admissible_actions_parity():
    assert admissible_actions(1, 2) == [SPLIT_V]
    assert set(admissible_actions(2, 2)) == {SPLIT_V, INERT_HALF_SWAP}
    assert set(admissible_actions(3, 1)) == {SPLIT_V, INERT_ALL_FIXED}
    assert set(admissible_actions(2, 1)) == {
        SPLIT_V,
        INERT_ALL_FIXED,
        INERT_HALF_SWAP,
    }


def test_prop34_case_grid():
    cases = [(d.m, d.l, d.c_action) for d in prop34_cases(6)]
    assert len(cases) == 26
    assert (2, 1, INERT_HALF_SWAP) in cases
    assert (1, 2, INERT_HALF_SWAP) not in cases
    assert all(m * l <= 6 for m, l, _ in cases)


@pytest.mark.parametrize(
    "m,l,action",
    [
        (1, 2, SPLIT_V),
        (2, 1, SPLIT_V),
        (2, 1, INERT_ALL_FIXED),
        (2, 1, INERT_HALF_SWAP),
        (3, 1, INERT_ALL_FIXED),
        (1, 3, INERT_ALL_FIXED),
        (2, 2, INERT_HALF_SWAP),
    ],
)
def test_prop34_identity(m, l, action):
    rep = verify_prop34(InducedDatum(m, l, action))
    assert rep.equal
    assert rep.case.startswith("prop34")


def test_prop34_sides_agree_directly():
    datum = InducedDatum(2, 1, INERT_ALL_FIXED)
    assert prop34_lhs(datum) == prop34_rhs(datum)


def test_prop34_root_of_unity_choice_is_immaterial():
    assert verify_prop34(InducedDatum(2, 1, INERT_ALL_FIXED), zeta_power=3).equal
    assert verify_prop34(InducedDatum(2, 3, SPLIT_V), zeta_power=5).equal
