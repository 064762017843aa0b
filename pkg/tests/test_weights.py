from fractions import Fraction

import pytest

from lvkit.weights import (
    HighestWeight,
    crit_asai,
    crit_rankin_selberg,
    infinity_type,
    no_middle_class,
    parse_weight_json,
    piano_check,
    sufficiently_regular,
)


def test_rows_must_be_weakly_decreasing():
    HighestWeight.from_rows([[3, 3, 0]])
    with pytest.raises(ValueError, match="weakly decreasing"):
        HighestWeight.from_rows([[0, 1]])


def test_parse_weight_json_roundtrip():
    mu, r = parse_weight_json(
        {"n": 2, "d": 2, "mu": [[3, 0], [1, -1]], "r": "1/2"}
    )
    assert mu.n == 2 and mu.d == 2
    assert r == Fraction(1, 2)
    mu0, r0 = parse_weight_json({"n": 1, "d": 1, "mu": [[0]]})
    assert r0 == 0


@pytest.mark.parametrize(
    "obj",
    [
        {"n": 2, "d": 1},
        {"n": 2, "d": 1, "mu": [[1, 0], [2, 0]]},
        {"n": 2, "d": 1, "mu": [[1, 0, 0]]},
        {"n": 2, "d": 1, "mu": [[0, 1]]},
        {"n": 2, "d": 1, "mu": "x"},
    ],
)
def test_parse_weight_json_rejects_malformed(obj):
    with pytest.raises(ValueError):
        parse_weight_json(obj)


def test_zero_weight_pairing_has_central_point():
    mu = HighestWeight.from_rows([[0, 0]])
    mup = HighestWeight.from_rows([[0]])
    a = infinity_type(mu, 0)
    b = infinity_type(mup, 0)
    cs = crit_rankin_selberg(a, b, 0, 0)
    assert cs.enumerate() == [Fraction(1, 2)]
    assert piano_check(mu, mup)
    assert no_middle_class(a, b, 0, 0)


def test_self_dual_rank2_asai_windows():
    mu = HighestWeight.from_rows([[2, -1]])
    it = infinity_type(mu, 0)
    same = crit_asai(it, 1)
    opp = crit_asai(it, -1)
    assert same.enumerate() == [-2, 0, 1, 3]
    assert opp.enumerate() == [-3, -1, 2, 4]
    assert same.contains(0) and same.contains(1)
    assert not opp.contains(0) and not opp.contains(1)


def test_asai_sign_validation():
    it = infinity_type(HighestWeight.from_rows([[2, -1]]), 0)
    with pytest.raises(ValueError, match="sign"):
        crit_asai(it, 0)


def test_rank1_asai_window_is_unbounded():
    it = infinity_type(HighestWeight.from_rows([[0]]), 0)
    cs = crit_asai(it, 1)
    with pytest.raises(ValueError, match="unbounded"):
        cs.enumerate()


def test_piano_interlaces_against_the_dual_partner():
    # chain mu_1 >= -nu_(n-1) >= mu_2 >= ... >= mu_n per embedding
    assert piano_check(
        HighestWeight.from_rows([[3, 0]]), HighestWeight.from_rows([[-1]])
    )
    assert not piano_check(
        HighestWeight.from_rows([[3, 0]]), HighestWeight.from_rows([[1]])
    )
    assert not piano_check(
        HighestWeight.from_rows([[5, 4]]), HighestWeight.from_rows([[0]])
    )
    with pytest.raises(ValueError):
        piano_check(
            HighestWeight.from_rows([[1, 0]]), HighestWeight.from_rows([[1, 0]])
        )


def test_sufficiently_regular_needs_gaps_of_two():
    assert sufficiently_regular(HighestWeight.from_rows([[4, 2, 0]]))
    assert not sufficiently_regular(HighestWeight.from_rows([[2, 0, -1]]))
    assert not sufficiently_regular(HighestWeight.from_rows([[2, 2, 0]]))


def test_middle_class_pairs_signal_empty_window():
    a = infinity_type(HighestWeight.from_rows([[0, 0]]), Fraction(1, 2))
    b = infinity_type(HighestWeight.from_rows([[0]]), 0)
    if not no_middle_class(a, b, Fraction(1, 2), 0):
        cs = crit_rankin_selberg(a, b, Fraction(1, 2), 0)
        assert cs.is_empty_signal()
