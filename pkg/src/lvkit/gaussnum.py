"""Numeric cross-checks for Gauss sums and the class number formula.

Desk-scale verification over the rationals: exact Dirichlet characters with
cyclotomic values, Gauss sums evaluated to 30 significant digits, and
Dirichlet L-series with a rigorous tail bound.  Everything here is d = 1;
higher-degree statements stay symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .algebra import Cyclotomic

__all__ = [
    "kronecker",
    "is_fundamental",
    "DirichletChar",
    "trivial_char",
    "kronecker_char",
    "characters",
    "primitive_characters",
    "ComplexApprox",
    "gauss_sum",
    "dirichlet_L",
    "verify_quadratic_gauss",
    "class_number_check",
    "DPS",
]

DPS = 30


# ---------------------------------------------------------------------------
# Kronecker symbol

def kronecker(a, n):
    """The Kronecker symbol (a|n), extending Jacobi to all integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -1
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # Jacobi by quadratic reciprocity
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def is_fundamental(D):
    """Whether D is a fundamental discriminant (1 counts, 0 does not)."""
    if D == 0:
        return False

    def squarefree(m):
        m = abs(m)
        k = 2
        while k * k <= m:
            if m % (k * k) == 0:
                return False
            k += 1
        return True

    if D % 4 == 1:
        return squarefree(D)
    if D % 4 == 0:
        q = D // 4
        return q % 4 in (2, 3) and squarefree(q)
    return False


# ---------------------------------------------------------------------------
# unit groups mod N and Dirichlet characters

def _factorize(N):
    out = []
    p = 2
    while p * p <= N:
        if N % p == 0:
            e = 0
            while N % p == 0:
                N //= p
                e += 1
            out.append((p, e))
        p += 1
    if N > 1:
        out.append((N, 1))
    return out


def _primitive_root(q):
    # q an odd prime power; smallest generator of the cyclic unit group
    phi = q - q // _factorize(q)[0][0]
    factors = [p for p, _ in _factorize(phi)]
    for g in range(2, q):
        if gcd(g, q) != 1:
            continue
        if all(pow(g, phi // p, q) != 1 for p in factors):
            return g
    raise ValueError("no primitive root mod %d" % q)


def _unit_generators(q, p, e):
    # generators with their orders, and the discrete log of each unit
    if p == 2:
        if e == 1:
            return [], {1: ()}
        if e == 2:
            return [(3, 2)], {1: (0,), 3: (1,)}
        # units mod 2^e for e >= 3: <-1> x <3>
        half = 2 ** (e - 2)
        logs = {}
        for i in range(2):
            for j in range(half):
                a = (pow(-1, i, q) * pow(3, j, q)) % q
                logs[a] = (i, j)
        return [(q - 1, 2), (3, half)], logs
    g = _primitive_root(q)
    phi = q - q // p
    logs = {}
    x = 1
    for j in range(phi):
        logs[x] = (j,)
        x = x * g % q
    return [(g, phi)], logs


class _UnitGroup:
    """CRT structure of (Z/N)^* with exact discrete logs."""

    def __init__(self, N):
        self.N = N
        self.factors = _factorize(N)
        self.orders = []
        self._logs = []
        self._moduli = []
        for p, e in self.factors:
            q = p ** e
            gens, logs = _unit_generators(q, p, e)
            self._moduli.append(q)
            self._logs.append(logs)
            self.orders.extend(o for _, o in gens)
        self.exponent = 1
        for o in self.orders:
            self.exponent = self.exponent * o // gcd(self.exponent, o)

    def dlog(self, a):
        if gcd(a, self.N) != 1:
            return None
        out = []
        for q, logs in zip(self._moduli, self._logs):
            out.extend(logs[a % q])
        return tuple(out)


@dataclass(frozen=True)
class DirichletChar:
    """A Dirichlet character mod N with exact cyclotomic values.

    values[a] is the value at a for 0 <= a < N: a root of unity on the
    units, the integer 0 elsewhere.
    """

    modulus: int
    values: tuple
    primitive: bool

    def __call__(self, n):
        return self.values[n % self.modulus]

    def is_principal(self):
        return all(v == 1 for v in self.values if v != 0)

    def parity(self):
        """chi(-1), which is 1 or -1."""
        v = self(-1)
        if isinstance(v, Cyclotomic):
            v = v.coeffs[0] if v.is_rational() else v
        return int(v)

    def conjugate(self):
        # values are roots of unity, so conjugation is evaluation at the
        # inverse argument
        N = self.modulus
        if N == 1:
            return self
        vals = [0] * N
        for a in range(N):
            if gcd(a, N) == 1:
                vals[a] = self.values[pow(a, -1, N)]
        return DirichletChar(N, tuple(vals), self.primitive)


def _is_primitive(N, values):
    # induced from modulus M iff trivial on units that are 1 mod M
    for M in range(1, N):
        if N % M:
            continue
        if all(values[a] == 1 for a in range(1, N) if (a - 1) % M == 0 and gcd(a, N) == 1):
            return False
    return True


def trivial_char(N=1):
    vals = tuple(1 if gcd(a, N) == 1 else 0 for a in range(N)) if N > 1 else (1,)
    return DirichletChar(N, vals, N == 1)


def _char_from_exponents(N, group, exps):
    L = group.exponent
    vals = []
    for a in range(N):
        dl = group.dlog(a) if N > 1 else ()
        if dl is None:
            vals.append(0)
            continue
        tot = 0
        for x, k, o in zip(dl, exps, group.orders):
            tot = (tot + (L // o) * k * x) % L
        if tot == 0:
            vals.append(1)
        else:
            vals.append(Cyclotomic.root_of_unity(L, tot))
    if N == 1:
        vals = [1]
    return DirichletChar(N, tuple(vals), _is_primitive(N, vals))


def characters(N):
    """All phi(N) Dirichlet characters mod N, exactly."""
    if N == 1:
        return [trivial_char(1)]
    group = _UnitGroup(N)
    chars = []
    combos = [()]
    for o in group.orders:
        combos = [c + (k,) for c in combos for k in range(o)]
    for exps in combos:
        chars.append(_char_from_exponents(N, group, exps))
    return chars


def primitive_characters(N):
    return [c for c in characters(N) if c.primitive]


def kronecker_char(D):
    """The quadratic character of a fundamental discriminant, mod |D|."""
    if not is_fundamental(D):
        raise ValueError("%d is not a fundamental discriminant" % D)
    N = abs(D)
    vals = tuple(kronecker(D, a) for a in range(N)) if N > 1 else (1,)
    return DirichletChar(N, vals, N == 1 or _is_primitive(N, vals))


# ---------------------------------------------------------------------------
# high-precision evaluation

@dataclass(frozen=True)
class ComplexApprox:
    """A complex value with an additively propagated error bound."""

    real: object
    imag: object
    error_bound: float

    def to_mpc(self):
        return mpmath.mpc(self.real, self.imag)

    def __add__(self, other):
        return ComplexApprox(
            self.real + other.real,
            self.imag + other.imag,
            self.error_bound + other.error_bound,
        )

    def distance(self, other):
        """|self - other| as a float, ignoring the bounds."""
        if isinstance(other, ComplexApprox):
            other = other.to_mpc()
        return float(abs(self.to_mpc() - mpmath.mpc(other)))

    def __str__(self):
        return "%s + %si (+-%.2g)" % (
            mpmath.nstr(mpmath.mpf(self.real), 17),
            mpmath.nstr(mpmath.mpf(self.imag), 17),
            self.error_bound,
        )


def _mpfrac(x):
    f = Fraction(x)
    return mpmath.mpf(f.numerator) / f.denominator


def _cyclotomic_mpc(v):
    if isinstance(v, Cyclotomic):
        acc = mpmath.mpc(0)
        for k, c in enumerate(v.coeffs):
            if c:
                acc += _mpfrac(c) * mpmath.expjpi(mpmath.mpf(2 * k) / v.order)
        return acc
    return mpmath.mpc(_mpfrac(v))


def gauss_sum(chi):
    """The additive-twist sum over residues mod the character's modulus.

    Evaluated at 30 significant digits; the recorded bound covers the
    root-of-unity roundoff.
    """
    N = chi.modulus
    with mpmath.workdps(DPS):
        acc = mpmath.mpc(0)
        for a in range(N):
            v = chi.values[a]
            if v == 0:
                continue
            acc += _cyclotomic_mpc(v) * mpmath.expjpi(mpmath.mpf(2 * a) / N)
        if N == 1:
            acc = mpmath.mpc(1)
        bound = float(N * mpmath.mpf(10) ** (2 - DPS))
        return ComplexApprox(acc.real, acc.imag, bound)


def dirichlet_L(chi, s, tol=1e-9):
    """Dirichlet L-series value at real s >= 1 with tail bound below tol.

    Non-principal characters are summed in blocks of the modulus; the tail
    after M terms is the exact periodic-mean correction plus a remainder
    bounded by B*s/M^(s+1).  Principal characters reduce to the zeta
    function times the local corrections (s > 1 only).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if s < 1:
        raise ValueError("s below 1 is out of scope")
    N = chi.modulus
    with mpmath.workdps(DPS):
        if chi.is_principal():
            if s == 1:
                raise ValueError("principal character at s = 1 diverges")
            val = mpmath.zeta(s)
            for p, _ in _factorize(N):
                val *= 1 - mpmath.mpf(p) ** (-s)
            return ComplexApprox(val.real, mpmath.mpf(0), float(mpmath.mpf(10) ** (3 - DPS)))

        vals = [_cyclotomic_mpc(v) if v != 0 else mpmath.mpc(0) for v in chi.values]
        # partial sums over one period, their mean, and the centered bound
        S = []
        acc = mpmath.mpc(0)
        for r in range(1, N + 1):
            acc += vals[r % N]
            S.append(acc)
        mean = sum(S) / N
        acc2 = mpmath.mpc(0)
        B = mpmath.mpf(0)
        for r in range(N):
            acc2 += S[r] - mean
            B = max(B, abs(acc2))
        B = float(B) + 1e-20

        # smallest block-multiple M with remainder bound under tol/2
        M = N
        while B * s / (M ** (s + 1)) > tol / 2:
            M *= 2
        M = ((M + N - 1) // N) * N

        head = mpmath.mpc(0)
        for n in range(M, 0, -1):
            v = vals[n % N]
            if v != 0:
                head += v * mpmath.mpf(n) ** (-s)
        tail_mean = mean * mpmath.mpf(M + 1) ** (-s)
        remainder = B * s / (M ** (s + 1))
        val = head + tail_mean
        bound = remainder + float((M + 10) * mpmath.mpf(10) ** (2 - DPS))
        return ComplexApprox(val.real, val.imag, bound)


# ---------------------------------------------------------------------------
# reports

def _report(case, lhs, rhs, tol):
    abs_err = abs(lhs - rhs)
    return {
        "case": case,
        "lhs": float(lhs),
        "rhs": float(rhs),
        "abs_err": float(abs_err),
        "tol": float(tol),
        "equal": bool(abs_err <= tol),
    }


def verify_quadratic_gauss(D, tol=1e-9):
    """Check that the quadratic Gauss sum of D < 0 equals i*sqrt(|D|)."""
    if not is_fundamental(D) or D >= 0:
        raise ValueError("%d is not a negative fundamental discriminant" % D)
    if abs(D) > 200:
        raise ValueError("|D| above 200 is out of the checked range")
    G = gauss_sum(kronecker_char(D))
    with mpmath.workdps(DPS):
        expected = mpmath.sqrt(-D)
        err = abs(G.to_mpc() - mpmath.mpc(0, expected))
        rep = _report("quadratic-gauss[D=%d]" % D, G.imag, expected, tol)
        rep["abs_err"] = float(err)
        rep["equal"] = bool(err <= tol)
    return rep


def class_number_check(D, h, w, tol=1e-6):
    """Check L(1, chi_D) against 2*pi*h / (w*sqrt(|D|)) for D < 0."""
    if not is_fundamental(D) or D >= 0:
        raise ValueError("%d is not a negative fundamental discriminant" % D)
    L = dirichlet_L(kronecker_char(D), 1, tol=min(tol / 10, 1e-8))
    with mpmath.workdps(DPS):
        rhs = 2 * mpmath.pi * h / (w * mpmath.sqrt(-D))
        return _report("class-number[D=%d,h=%d,w=%d]" % (D, h, w), L.real, rhs, tol)
