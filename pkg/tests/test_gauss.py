import math

import mpmath
import pytest
import sympy

from lvkit.algebra import ceq, cmul
from lvkit.gaussnum import (
    DirichletChar,
    characters,
    class_number_check,
    dirichlet_L,
    gauss_sum,
    is_fundamental,
    kronecker,
    kronecker_char,
    primitive_characters,
    verify_quadratic_gauss,
)


def test_kronecker_odd_prime_is_euler_criterion():
    for p in (3, 5, 7, 11, 13, 17, 19, 23):
        for a in range(p):
            e = pow(a, (p - 1) // 2, p)
            want = 0 if e == 0 else (1 if e == 1 else -1)
            assert kronecker(a, p) == want


def test_kronecker_two_and_multiplicativity():
    table = {1: 1, 3: -1, 5: -1, 7: 1}
    for a in range(16):
        want = 0 if a % 2 == 0 else table[a % 8]
        assert kronecker(a, 2) == want
    for a in (-7, -2, 3, 10):
        for m in (3, 4, 5):
            for n in (2, 7, 9):
                assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)
    assert kronecker(5, 1) == 1


def test_fundamental_discriminants():
    fund = [D for D in range(-200, 0) if is_fundamental(D)]
    assert len(fund) == 62
    for D in (-3, -4, -7, -8, -11, -15, -19, -20, -23, -24):
        assert is_fundamental(D)
    for D in (-1, -2, -5, -6, -9, -12, -16, -27, -28):
        assert not is_fundamental(D)


def test_character_group_sizes():
    for N in range(1, 31):
        chars = characters(N)
        assert len(chars) == int(sympy.totient(N))
        want = sum(
            sympy.mobius(N // d) * sympy.totient(d) for d in sympy.divisors(N)
        )
        assert len(primitive_characters(N)) == max(0, int(want))


def test_characters_are_multiplicative():
    for chi in characters(12):
        for a in range(12):
            for b in range(12):
                assert ceq(chi.values[a * b % 12], cmul(chi.values[a], chi.values[b]))


def test_kronecker_character_is_odd_quadratic():
    chi = kronecker_char(-4)
    assert chi.modulus == 4
    assert chi.primitive
    assert chi.values[1] == 1 and chi.values[3] == -1
    assert chi.parity() == -1
    conj = chi.conjugate()
    assert conj.values == chi.values


def test_quadratic_gauss_sums_hit_exact_targets():
    g4 = gauss_sum(kronecker_char(-4))
    assert g4.distance(mpmath.mpc(0, 2)) < 1e-25
    g3 = gauss_sum(kronecker_char(-3))
    assert g3.distance(mpmath.mpc(0, mpmath.sqrt(3))) < 1e-25


def test_gauss_sum_magnitude_small_moduli():
    for N in range(2, 21):
        for chi in primitive_characters(N):
            g = gauss_sum(chi)
            mag2 = g.to_mpc().real ** 2 + g.to_mpc().imag ** 2
            assert abs(mag2 - N) < 1e-12


def test_dirichlet_series_against_known_values():
    out = dirichlet_L(kronecker_char(-4), 2, tol=1e-12)
    assert out.error_bound <= 1e-12
    assert out.distance(mpmath.mpc(mpmath.catalan, 0)) < out.error_bound + 1e-20
    out = dirichlet_L(kronecker_char(-4), 1, tol=1e-12)
    assert out.distance(mpmath.mpc(mpmath.pi / 4, 0)) < out.error_bound + 1e-20


def test_principal_series_reduces_to_zeta():
    chi0 = [c for c in characters(2) if all(v in (0, 1) for v in c.values)][0]
    out = dirichlet_L(chi0, 2, tol=1e-12)
    assert out.distance(mpmath.mpc(mpmath.pi ** 2 / 8, 0)) < 1e-11
    with pytest.raises(ValueError):
        dirichlet_L(chi0, 1)


def test_quadratic_gauss_report():
    rep = verify_quadratic_gauss(-7)
    assert set(rep) == {"case", "lhs", "rhs", "abs_err", "tol", "equal"}
    assert rep["equal"]
    assert rep["abs_err"] < 1e-9
    for bad in (-6, 0, 5):
        with pytest.raises(ValueError):
            verify_quadratic_gauss(bad)


def test_class_number_formula():
    table = {-3: (1, 6), -4: (1, 4), -7: (1, 2), -8: (1, 2), -11: (1, 2), -23: (3, 2)}
    for D, (h, w) in table.items():
        rep = class_number_check(D, h, w)
        assert rep["equal"], rep
    assert not class_number_check(-4, 2, 4)["equal"]


def test_tolerance_drives_precision():
    assert verify_quadratic_gauss(-7, tol=1e-30)["equal"]
    rep = class_number_check(-4, 1, 4, tol=1e-12)
    assert rep["tol"] == 1e-12
    assert rep["equal"] and rep["abs_err"] <= 1e-12
