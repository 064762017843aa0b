"""Exact arithmetic core: cyclotomic numbers, formal Satake symbols, Laurent
polynomials in those symbols, and denominators of unramified Euler factors.

Everything here is exact.  Coefficients are represented as ``int``,
``fractions.Fraction`` or :class:`Cyclotomic`, whichever is smallest; the
``c*`` helpers below dispatch between them so that the all-integer case (by
far the most common one in large products) never touches Fraction or vector
arithmetic.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import gcd


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    # den is monic; division must be exact
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_coeffs(m: int) -> tuple[int, ...]:
    """Integer coefficients of the m-th cyclotomic polynomial, ascending.

    >>> cyclotomic_coeffs(1)
    (-1, 1)
    >>> cyclotomic_coeffs(6)
    (1, -1, 1)
    >>> cyclotomic_coeffs(12)
    (1, 0, -1, 0, 1)
    """
    if m < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_coeffs(d)))
    return tuple(poly)


def euler_phi(m: int) -> int:
    return len(cyclotomic_coeffs(m)) - 1


# ---------------------------------------------------------------------------
# coefficient dispatch helpers


def _reduce_mod_cyclo(vec: list, m: int) -> list:
    """Reduce a coefficient vector (ascending powers of the root) mod Phi_m."""
    phi = euler_phi(m)
    if len(vec) <= phi:
        return list(vec) + [0] * (phi - len(vec))
    phim = cyclotomic_coeffs(m)
    vec = list(vec)
    for k in range(len(vec) - 1, phi - 1, -1):
        c = vec[k]
        if c:
            vec[k] = 0
            for j in range(phi):
                vec[k - phi + j] = vec[k - phi + j] - c * phim[j]
    return vec[:phi]


class Cyclotomic:
    """Element of the cyclotomic field of the given order, stored on the
    power basis 1, z, ..., z^(phi(order)-1) modulo the cyclotomic polynomial.

    Arithmetic between different orders promotes to the lcm.  Verification
    cases fix one ambient order up front, so promotion is rare in hot loops.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs, _reduced: bool = False):
        if not _reduced:
            coeffs = _reduce_mod_cyclo(list(coeffs), order)
        self.order = order
        self.coeffs = tuple(coeffs)

    # -- constructors

    @classmethod
    def rational(cls, q, order: int = 1) -> "Cyclotomic":
        phi = euler_phi(order)
        return cls(order, (q,) + (0,) * (phi - 1), _reduced=True)

    @classmethod
    def root_of_unity(cls, order: int, power: int) -> "Cyclotomic":
        """z^power in the field of the given order.

        >>> Cyclotomic.root_of_unity(4, 2).rational_value()
        Fraction(-1, 1)
        """
        power %= order
        vec = [0] * (power + 1)
        vec[power] = 1
        return cls(order, vec)

    # -- promotion

    def promote(self, order: int) -> "Cyclotomic":
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError("can only promote to a multiple order")
        step = order // self.order
        vec = [0] * ((len(self.coeffs) - 1) * step + 1 or 1)
        for k, c in enumerate(self.coeffs):
            if c:
                vec[k * step] = c
        return Cyclotomic(order, vec)

    # -- predicates

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational: %s" % (self,))
        return Fraction(self.coeffs[0])

    # -- arithmetic

    def _pair(self, other: "Cyclotomic"):
        if self.order == other.order:
            return self, other
        m = self.order * other.order // gcd(self.order, other.order)
        return self.promote(m), other.promote(m)

    def __add__(self, other):
        other = as_cyclotomic(other)
        a, b = self._pair(other)
        return Cyclotomic(
            a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)], _reduced=True
        )

    def __neg__(self):
        return Cyclotomic(self.order, [-x for x in self.coeffs], _reduced=True)

    def __sub__(self, other):
        return self + (-as_cyclotomic(other))

    def __mul__(self, other):
        other = as_cyclotomic(other)
        a, b = self._pair(other)
        if b.is_rational():
            q = b.coeffs[0]
            return Cyclotomic(a.order, [x * q for x in a.coeffs], _reduced=True)
        if a.is_rational():
            q = a.coeffs[0]
            return Cyclotomic(b.order, [x * q for x in b.coeffs], _reduced=True)
        out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        out[i + j] += x * y
        return Cyclotomic(a.order, out)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return as_cyclotomic(other) - self

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse via the extended Euclidean algorithm on
        Q[x] modulo the cyclotomic polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Cyclotomic.rational(Fraction(1) / Fraction(self.coeffs[0]), self.order)
        mod = [Fraction(c) for c in cyclotomic_coeffs(self.order)]
        a = [Fraction(c) for c in self.coeffs]

        def degree(p):
            for k in range(len(p) - 1, -1, -1):
                if p[k]:
                    return k
            return -1

        # invariant: r0 = s0 * self (mod Phi), r1 = s1 * self (mod Phi)
        r0, r1 = mod, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while degree(r1) > 0:
            d0, d1 = degree(r0), degree(r1)
            if d0 < d1:
                r0, r1, s0, s1 = r1, r0, s1, s0
                continue
            c = r0[d0] / r1[d1]
            shift = d0 - d1
            r0 = list(r0)
            for j in range(d1 + 1):
                r0[j + shift] -= c * r1[j]
            ln = max(len(s0), len(s1) + shift)
            s0 = list(s0) + [Fraction(0)] * (ln - len(s0))
            for j in range(len(s1)):
                s0[j + shift] -= c * s1[j]
        if degree(r1) != 0:
            raise ZeroDivisionError("zero divisor in cyclotomic inversion")
        c = r1[0]
        inv = [q / c for q in s1]
        return Cyclotomic(self.order, inv)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.coeffs[0]) == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._pair(other)
        return all(Fraction(x) == Fraction(y) for x, y in zip(a.coeffs, b.coeffs))

    def __hash__(self):
        if self.is_rational():
            return hash(Fraction(self.coeffs[0]))
        return hash((self.order, tuple(Fraction(c) for c in self.coeffs)))

    def __repr__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                z = "z%d" % self.order if k == 1 else "z%d^%d" % (self.order, k)
                if c == 1:
                    parts.append(z)
                elif c == -1:
                    parts.append("-" + z)
                else:
                    parts.append("%s*%s" % (c, z))
        s = " + ".join(parts).replace("+ -", "- ")
        return "(%s)" % s


def as_cyclotomic(x) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic.rational(x)
    raise TypeError("cannot coerce %r" % (x,))


# coefficient values in polynomials: int | Fraction | Cyclotomic.
# The int x int case dominates large expansions; keep it allocation-free.


def cadd(a, b):
    if type(a) is int and type(b) is int:
        return a + b
    if isinstance(a, Cyclotomic) or isinstance(b, Cyclotomic):
        return as_cyclotomic(a) + as_cyclotomic(b)
    return a + b  # Fraction mix


def cmul(a, b):
    if type(a) is int and type(b) is int:
        return a * b
    if isinstance(a, Cyclotomic) or isinstance(b, Cyclotomic):
        return as_cyclotomic(a) * as_cyclotomic(b)
    return a * b


def cneg(a):
    if isinstance(a, Cyclotomic):
        return -a
    return -a


def ciszero(a) -> bool:
    if isinstance(a, Cyclotomic):
        return a.is_zero()
    return a == 0


def cinv(a):
    if type(a) is int or isinstance(a, Fraction):
        return ccanon(Fraction(1, 1) / Fraction(a))
    return a.inverse()


def chalf(a):
    # exact division by 2
    if type(a) is int:
        if a % 2 == 0:
            return a // 2
        return Fraction(a, 2)
    if isinstance(a, Fraction):
        return a / 2
    return a * Fraction(1, 2)


def ccanon(a):
    """Smallest canonical representation of a coefficient value."""
    if isinstance(a, Cyclotomic):
        if a.is_rational():
            a = a.rational_value()
        else:
            return a
    if isinstance(a, Fraction) and a.denominator == 1:
        return int(a)
    return a


def ceq(a, b) -> bool:
    if type(a) is int and type(b) is int:
        return a == b
    if isinstance(a, Cyclotomic) or isinstance(b, Cyclotomic):
        return as_cyclotomic(a) == as_cyclotomic(b)
    return a == b


def cstr(a) -> str:
    if isinstance(a, Cyclotomic):
        return repr(a)
    return str(a)


# ---------------------------------------------------------------------------
# formal symbols


_SYM_LOCK = threading.Lock()
_SYM_TABLE: dict[str, "FormalSymbol"] = {}


class FormalSymbol:
    """Interned formal symbol: a Satake eigenvalue, a fixed root of an
    eigenvalue, or an abstract character value.

    Symbols are compared and ordered by name, so canonical forms do not
    depend on creation order or process identity.
    """

    __slots__ = ("name", "kind", "root_order", "parent")

    def __new__(cls, name: str, kind: str = "eigen", root_order: int = 0, parent=None):
        with _SYM_LOCK:
            sym = _SYM_TABLE.get(name)
            if sym is not None:
                if sym.kind != kind or sym.root_order != root_order or sym.parent is not parent:
                    raise ValueError("symbol %r re-registered inconsistently" % name)
                return sym
            sym = object.__new__(cls)
            object.__setattr__(sym, "name", name)
            object.__setattr__(sym, "kind", kind)
            object.__setattr__(sym, "root_order", root_order)
            object.__setattr__(sym, "parent", parent)
            _SYM_TABLE[name] = sym
            return sym

    def __setattr__(self, *a):
        raise AttributeError("FormalSymbol is immutable")

    def __lt__(self, other):
        return self.name < other.name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        # re-intern on unpickling (keeps multiprocessing workers consistent)
        if self.kind == "root":
            return (_rebuild_root, (self.name, self.parent, self.root_order))
        return (FormalSymbol, (self.name, self.kind))


def _rebuild_root(name, parent, order):
    return root_symbol(name, parent, order)


def symbol(name: str, kind: str = "eigen") -> FormalSymbol:
    if kind not in ("eigen", "char"):
        raise ValueError("kind must be 'eigen' or 'char'")
    return FormalSymbol(name, kind)


def root_symbol(name: str, parent: FormalSymbol, order: int) -> FormalSymbol:
    """A symbol u with u^order = parent.  The relation is only applied by
    an explicit substitution pass (see LaurentPoly.subst_roots)."""
    if order < 1:
        raise ValueError("root order must be positive")
    return FormalSymbol(name, "root", order, parent)


def reset_symbols() -> None:
    # test isolation helper; never used by library code
    with _SYM_LOCK:
        _SYM_TABLE.clear()


# monomials: sorted tuples of (symbol, nonzero exponent)

_EMPTY_MONO: tuple = ()


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    merged = {}
    for s, e in m1:
        merged[s] = e
    for s, e in m2:
        e2 = merged.get(s, 0) + e
        if e2:
            merged[s] = e2
        elif s in merged:
            del merged[s]
    return tuple(sorted(merged.items()))


def mono_inv(m: tuple) -> tuple:
    return tuple((s, -e) for s, e in m)


def mono_str(m: tuple) -> str:
    if not m:
        return "1"
    parts = []
    for s, e in m:
        parts.append(s.name if e == 1 else "%s^%d" % (s.name, e))
    return "*".join(parts)


class LaurentPoly:
    """Sparse Laurent polynomial: monomial -> coefficient, no zero entries.

    Monomial keys are sorted tuples of (FormalSymbol, exponent).  The zero
    polynomial is the empty map.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None, _trust: bool = False):
        if terms is None:
            terms = {}
        if not _trust:
            clean = {}
            for mono, c in terms.items():
                c = ccanon(c)
                if not ciszero(c):
                    clean[tuple(sorted(mono))] = c
            terms = clean
        self.terms = terms

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls({}, _trust=True)

    @classmethod
    def constant(cls, c) -> "LaurentPoly":
        c = ccanon(c)
        if ciszero(c):
            return cls.zero()
        return cls({_EMPTY_MONO: c}, _trust=True)

    @classmethod
    def monomial(cls, coeff, mono: tuple) -> "LaurentPoly":
        coeff = ccanon(coeff)
        if ciszero(coeff):
            return cls.zero()
        return cls({tuple(sorted(mono)): coeff}, _trust=True)

    @classmethod
    def from_symbol(cls, sym: FormalSymbol, exp: int = 1, coeff=1) -> "LaurentPoly":
        if exp == 0:
            return cls.constant(coeff)
        return cls.monomial(coeff, ((sym, exp),))

    # -- queries

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return len(self.terms) == 1 and _EMPTY_MONO in self.terms and ceq(
            self.terms[_EMPTY_MONO], 1
        )

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def as_monomial(self):
        if len(self.terms) != 1:
            raise ValueError("not a monomial")
        ((mono, c),) = self.terms.items()
        return mono, c

    def constant_term(self):
        return self.terms.get(_EMPTY_MONO, 0)

    # -- arithmetic

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            other = LaurentPoly.constant(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            c2 = cadd(out.get(mono, 0), c)
            c2 = ccanon(c2)
            if ciszero(c2):
                out.pop(mono, None)
            else:
                out[mono] = c2
        return LaurentPoly(out, _trust=True)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({m: cneg(c) for m, c in self.terms.items()}, _trust=True)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            other = LaurentPoly.constant(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for mono1, c1 in a.items():
            for mono2, c2 in b.items():
                mono = mono_mul(mono1, mono2)
                c = cadd(out.get(mono, 0), cmul(c1, c2))
                c = ccanon(c)
                if ciszero(c):
                    out.pop(mono, None)
                else:
                    out[mono] = c
        return LaurentPoly(out, _trust=True)

    __rmul__ = __mul__

    def inverse_of_monomial(self) -> "LaurentPoly":
        mono, c = self.as_monomial()
        return LaurentPoly.monomial(cinv(c), mono_inv(mono))

    # -- root substitution

    def subst_roots(self) -> "LaurentPoly":
        """Apply u^order = parent to every root symbol: the exponent of u is
        Euclidean-divided, the quotient moves to the parent symbol.  This is
        the ring homomorphism fixing every non-root symbol."""
        out: dict = {}
        for mono, c in self.terms.items():
            acc: dict = {}
            for s, e in mono:
                if s.kind == "root":
                    q, r = divmod(e, s.root_order)
                    if r:
                        acc[s] = acc.get(s, 0) + r
                    if q:
                        p = s.parent
                        acc[p] = acc.get(p, 0) + q
                else:
                    acc[s] = acc.get(s, 0) + e
            key = tuple(sorted((s, e) for s, e in acc.items() if e))
            c2 = cadd(out.get(key, 0), c)
            c2 = ccanon(c2)
            if ciszero(c2):
                out.pop(key, None)
            else:
                out[key] = c2
        return LaurentPoly(out, _trust=True)

    # -- equality / rendering

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(ceq(c, other.terms[m]) for m, c in self.terms.items())

    def __hash__(self):
        raise TypeError("LaurentPoly is not hashable")

    def __str__(self):
        if not self.terms:
            return "0"
        keys = sorted(self.terms, key=lambda m: tuple((s.name, -e) for s, e in m))
        parts = []
        for mono in keys:
            c = self.terms[mono]
            cs = cstr(c)
            if not mono:
                parts.append(cs)
            elif ceq(c, 1):
                parts.append(mono_str(mono))
            elif ceq(c, -1):
                parts.append("-" + mono_str(mono))
            else:
                if isinstance(c, Fraction) or (isinstance(c, Cyclotomic) and not c.is_rational()):
                    cs = "(%s)" % cs if not cs.startswith("(") else cs
                parts.append("%s*%s" % (cs, mono_str(mono)))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def poly_normalize(p: LaurentPoly) -> LaurentPoly:
    """Idempotent canonical form: drops zero coefficients, canonicalizes
    coefficient representations.  Constructors already normalize; this is
    the explicit entry point the contracts talk about."""
    return LaurentPoly(p.terms)


def tensor_eigenvalues(A, B) -> list:
    """All pairwise products of two eigenvalue multisets (order: A outer)."""
    out = []
    for a in A:
        for b in B:
            out.append(a * b)
    return out


# ---------------------------------------------------------------------------
# Euler factor denominators


class EulerFactorDenom:
    """Denominator of an unramified local Euler factor: a polynomial in the
    place variable X = q^(-s) with LaurentPoly coefficients, constant term 1,
    stored densely by X-degree.

    fdeg records the residue degree: X occurs only in powers divisible by it.
    """

    __slots__ = ("coeffs", "fdeg")

    def __init__(self, coeffs, fdeg: int = 1, _trust: bool = False):
        if not _trust:
            coeffs = [c if isinstance(c, LaurentPoly) else LaurentPoly.constant(c) for c in coeffs]
            while len(coeffs) > 1 and coeffs[-1].is_zero():
                coeffs.pop()
            if not coeffs or not coeffs[0].is_one():
                raise ValueError("constant term must be 1")
            support = [k for k, c in enumerate(coeffs) if k and not c.is_zero()]
            g = 0
            for k in support:
                g = gcd(g, k)
            if support and g % fdeg != 0:
                raise ValueError("X-support not contained in multiples of fdeg")
            fdeg = max(fdeg, 1)
        self.coeffs = tuple(coeffs)
        self.fdeg = fdeg

    @classmethod
    def one(cls) -> "EulerFactorDenom":
        return cls((LaurentPoly.constant(1),), 1, _trust=True)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> LaurentPoly:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return LaurentPoly.zero()

    def term_count(self) -> int:
        return sum(len(c.terms) for c in self.coeffs)

    def subst_roots(self) -> "EulerFactorDenom":
        return EulerFactorDenom(
            [c.subst_roots() for c in self.coeffs], self.fdeg, _trust=True
        )

    def __eq__(self, other):
        if not isinstance(other, EulerFactorDenom):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) != len(b):
            return False
        return all(x == y for x, y in zip(a, b))

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if k == 0:
                parts.append(str(c))
                continue
            x = "X" if k == 1 else "X^%d" % k
            if c.is_one():
                parts.append(x)
            elif c.is_monomial() and ceq(c.as_monomial()[1], -1) :
                mono, _ = c.as_monomial()
                parts.append("-%s*%s" % (mono_str(mono), x) if mono else "-" + x)
            elif c.is_monomial():
                mono, cc = c.as_monomial()
                ms = mono_str(mono)
                if not mono:
                    parts.append("%s*%s" % (cstr(cc), x))
                elif ceq(cc, 1):
                    parts.append("%s*%s" % (ms, x))
                else:
                    parts.append("%s*%s*%s" % (cstr(cc), ms, x))
            else:
                parts.append("(%s)*%s" % (c, x))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


class _MonoCodec:
    """Packs exponent vectors over a fixed symbol set into single integers
    so that monomial multiplication becomes integer addition.

    Each symbol gets a bit field wide enough for the worst cumulative
    exponent the computation can produce (callers supply that bound), with
    a midpoint offset so negative exponents stay inside the field; no
    carries can then cross field boundaries.
    """

    __slots__ = ("syms", "shifts", "offs", "masks", "base")

    def __init__(self, bounds: dict):
        self.syms = sorted(bounds)
        self.shifts = {}
        self.offs = {}
        self.masks = []
        sh = 0
        base = 0
        for s in self.syms:
            w = (2 * bounds[s] + 2).bit_length() + 1
            off = 1 << (w - 1)
            self.shifts[s] = sh
            self.offs[s] = off
            self.masks.append((sh, (1 << w) - 1, off))
            base += off << sh
            sh += w
        self.base = base

    def delta(self, mono: tuple) -> int:
        """Offset-free encoding; base + delta(m1) + delta(m2) packs m1*m2."""
        shifts = self.shifts
        acc = 0
        for s, e in mono:
            acc += e << shifts[s]
        return acc

    def unpack(self, key: int, syms_cache: list) -> tuple:
        out = []
        for i, (sh, mask, off) in enumerate(self.masks):
            e = ((key >> sh) & mask) - off
            if e:
                out.append((syms_cache[i], e))
        return tuple(out)

    def to_poly_table(self, raw: list) -> list:
        """Canonicalize a list of {packed: coeff} dicts into LaurentPolys."""
        syms = self.syms
        polys = []
        for d in raw:
            out = {}
            for key, c in d.items():
                c = ccanon(c)
                if ciszero(c):
                    continue
                out[self.unpack(key, syms)] = c
            polys.append(LaurentPoly(out, _trust=True))
        return polys


def euler_from_eigenvalues(eigs, f: int) -> EulerFactorDenom:
    """Expand prod (1 - e * X^f) over the eigenvalue multiset.

    Eigenvalues must be Laurent monomials (possibly with cyclotomic
    coefficient); the expansion is a left fold, multiplying the current
    dense coefficient table by one linear factor at a time with packed
    monomial keys.
    """
    if f < 1:
        raise ValueError("residue degree must be positive")
    monos = []
    for e in eigs:
        if isinstance(e, LaurentPoly):
            monos.append(e.as_monomial())
        else:
            c = ccanon(e)
            if ciszero(c):
                raise ValueError("zero eigenvalue")
            monos.append((_EMPTY_MONO, c))
    # cumulative per-symbol exponent bound over any sub-product
    bounds: dict = {}
    for emono, _ in monos:
        for s, e in emono:
            bounds[s] = bounds.get(s, 0) + abs(e)
    codec = _MonoCodec(bounds)
    n = len(monos)
    table: list[dict] = [dict() for _ in range(n * f + 1)]
    table[0][codec.base] = 1
    top = 0
    for emono, ecoeff in monos:
        eadj = codec.delta(emono)
        # new[k] = old[k] - e * old[k - f], computed top-down so the table
        # can be updated in place
        top += f
        plain = ecoeff == 1 and type(ecoeff) is int
        for k in range(top, f - 1, -1):
            src = table[k - f]
            if not src:
                continue
            dst = table[k]
            dget = dst.get
            if plain:
                for mono, c in src.items():
                    key = mono + eadj
                    c2 = cadd(dget(key, 0), -c if type(c) is int else cneg(c))
                    if ciszero(c2):
                        dst.pop(key, None)
                    else:
                        dst[key] = c2
            else:
                for mono, c in src.items():
                    key = mono + eadj
                    c2 = cadd(dget(key, 0), cneg(cmul(ecoeff, c)))
                    if ciszero(c2):
                        dst.pop(key, None)
                    else:
                        dst[key] = c2
    return EulerFactorDenom(codec.to_poly_table(table), f)


def euler_product(factors) -> EulerFactorDenom:
    """Product of Euler-factor denominators (dense convolution in X over
    packed monomial keys)."""
    factors = list(factors)
    if not factors:
        return EulerFactorDenom.one()
    if len(factors) == 1:
        return factors[0]
    # per-symbol bound: sum over factors of the largest exponent magnitude
    bounds: dict = {}
    for fac in factors:
        fmax: dict = {}
        for c in fac.coeffs:
            for mono in c.terms:
                for s, e in mono:
                    a = abs(e)
                    if a > fmax.get(s, 0):
                        fmax[s] = a
        for s, a in fmax.items():
            bounds[s] = bounds.get(s, 0) + a
    codec = _MonoCodec(bounds)
    base = codec.base

    def pack(fac):
        out = []
        for c in fac.coeffs:
            out.append(
                {base + codec.delta(mono): cc for mono, cc in c.terms.items()}
            )
        return out

    acc = pack(factors[0])
    fdeg = factors[0].fdeg
    for fac in factors[1:]:
        nxt = pack(fac)
        out = [dict() for _ in range(len(acc) + len(nxt) - 1)]
        for j, db in enumerate(nxt):
            if not db:
                continue
            for i, da in enumerate(acc):
                if not da:
                    continue
                o = out[i + j]
                oget = o.get
                for k2, c2 in db.items():
                    adj = k2 - base
                    if c2 == 1 and type(c2) is int:
                        for k1, c1 in da.items():
                            key = k1 + adj
                            v = cadd(oget(key, 0), c1)
                            if ciszero(v):
                                o.pop(key, None)
                            else:
                                o[key] = v
                    else:
                        for k1, c1 in da.items():
                            key = k1 + adj
                            v = cadd(oget(key, 0), cmul(c1, c2))
                            if ciszero(v):
                                o.pop(key, None)
                            else:
                                o[key] = v
        acc = out
        fdeg = gcd(fdeg, fac.fdeg)
    return EulerFactorDenom(codec.to_poly_table(acc), fdeg)


def euler_power(base: EulerFactorDenom, k: int) -> EulerFactorDenom:
    if k < 0:
        raise ValueError("negative power")
    acc = EulerFactorDenom.one()
    for _ in range(k):
        acc = euler_product([acc, base])
    return acc


def euler_sqrt(p: EulerFactorDenom) -> EulerFactorDenom:
    """Exact polynomial square root with constant term 1.

    Coefficientwise recursion: c_k = (b_k - sum_{0<j<k} c_j c_{k-j}) / 2,
    unique once the constant term is fixed to 1.  Raises if the input is
    not a perfect square.
    """
    if p.degree % 2:
        raise ValueError("odd degree has no square root")
    half = p.degree // 2
    c: list[LaurentPoly] = [LaurentPoly.constant(1)]
    for k in range(1, half + 1):
        acc = p.coeff(k)
        for j in range(1, k):
            acc = acc - c[j] * c[k - j]
        ck = LaurentPoly({m: chalf(v) for m, v in acc.terms.items()})
        c.append(ck)
    root = EulerFactorDenom(c, 1)
    if euler_product([root, root]) != p:
        raise ValueError("not a perfect square")
    return root
