"""Unramified local L-factor denominators and the two factorization
identities verified by exact expansion: the isobaric-sum Asai factorization
(split and inert residue behaviour) and the comparison of the Asai factor of
a cyclically induced character against its predicted product form.

Convention: X stands for q^{-s} at the base place; a factor living over a
place of residue degree f is a polynomial in X^f, so both sides of every
identity are compared in the single variable X.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import gcd

from .algebra import (
    Cyclotomic,
    LaurentPoly,
    ccanon,
    cmul,
    euler_from_eigenvalues,
    euler_product,
    euler_sqrt,
    root_symbol,
    symbol,
    tensor_eigenvalues,
)
from .reports import VerificationReport, render_denom
from .weights import IsobaricShape

SPLIT = "Split"
INERT = "Inert"

SPLIT_V = "SplitV"
INERT_ALL_FIXED = "InertAllFixed"
INERT_HALF_SWAP = "InertHalfSwap"

_C_ACTIONS = (SPLIT_V, INERT_ALL_FIXED, INERT_HALF_SWAP)


@dataclass(frozen=True)
class PlaceConfigF:
    """Residue behaviour of the quadratic base extension at one place:
    either two places lie above it or a single one of residue degree 2."""

    kind: str

    def __post_init__(self):
        if self.kind not in (SPLIT, INERT):
            raise ValueError("kind must be %r or %r" % (SPLIT, INERT))


@dataclass(frozen=True)
class UnramifiedChar:
    """Unramified character, recorded by its value at a uniformizer.  When
    conjugate_dual is set, the value at the conjugate place is the inverse."""

    eigenvalue: LaurentPoly
    conjugate_dual: bool = False

    def __post_init__(self):
        # must be a unit of the Laurent ring
        if not self.eigenvalue.is_monomial():
            raise ValueError("eigenvalue must be a single invertible monomial")

    def conjugate_eigenvalue(self) -> LaurentPoly:
        if not self.conjugate_dual:
            raise ValueError("character is not marked conjugate self-dual")
        return self.eigenvalue.inverse_of_monomial()


@dataclass(frozen=True)
class GammaTwist:
    """Sign of the auxiliary quadratic twist at a degree-2 place: trivial
    for even rank, the sign character for odd rank."""

    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def for_rank(cls, n: int) -> "GammaTwist":
        return cls(1 if n % 2 == 0 else -1)


def _eig(x) -> LaurentPoly:
    if isinstance(x, UnramifiedChar):
        return x.eigenvalue
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.constant(x)


# ---------------------------------------------------------------------------
# local factors


def rs_local_factor(A, B, f: int):
    """prod_{a in A, b in B} (1 - a b X^f)."""
    A = [_eig(a) for a in A]
    B = [_eig(b) for b in B]
    if not A or not B:
        raise ValueError("eigenvalue multisets must be nonempty")
    return euler_from_eigenvalues(tensor_eigenvalues(A, B), f)


def asai_local_factor_split(A1, A2):
    """prod_{a in A1, b in A2} (1 - a b X); degree |A1|*|A2|."""
    A1 = [_eig(a) for a in A1]
    A2 = [_eig(a) for a in A2]
    if len(A1) != len(A2):
        raise ValueError("eigenvalue lists must have equal size")
    if not A1:
        raise ValueError("eigenvalue lists must be nonempty")
    return euler_from_eigenvalues(tensor_eigenvalues(A1, A2), 1)


def asai_local_factor_inert(blocks, gamma: GammaTwist):
    """Degree-2 place: one twisted linear factor per inducing character and
    one quadratic factor per unordered pair of distinct characters.  The
    block grouping of the input does not affect the result."""
    flat = [_eig(x) for block in blocks for x in block]
    if not flat:
        raise ValueError("need at least one inducing character")
    diag = [e if gamma.sign == 1 else -e for e in flat]
    parts = [euler_from_eigenvalues(diag, 1)]
    pairs = [
        flat[p] * flat[q] for p in range(len(flat)) for q in range(p + 1, len(flat))
    ]
    if pairs:
        parts.append(euler_from_eigenvalues(pairs, 2))
    return euler_product(parts)


# ---------------------------------------------------------------------------
# isobaric-sum factorization


def _timed(f):
    t0 = time.perf_counter()
    out = f()
    return out, (time.perf_counter() - t0) * 1000.0


def verify_lemma32(partition: IsobaricShape, config: PlaceConfigF) -> VerificationReport:
    """Compare the Asai factor of a full isobaric sum against the product of
    per-block Asai factors and cross-block Rankin-Selberg factors, with one
    free eigenvalue symbol per inducing character."""
    parts = partition.parts
    blocks = [
        [LaurentPoly.from_symbol(symbol("t%d_%d" % (i + 1, j + 1)))
         for j in range(sz)]
        for i, sz in enumerate(parts)
    ]
    k = len(blocks)

    def compute():
        if config.kind == SPLIT:
            # conjugate self-duality: the eigenvalues at the second place
            # are the inverses of those at the first
            inv = [[e.inverse_of_monomial() for e in b] for b in blocks]
            all_e = [e for b in blocks for e in b]
            all_i = [e for b in inv for e in b]
            lhs = asai_local_factor_split(all_e, all_i)
            rhs_parts = [asai_local_factor_split(blocks[i], inv[i]) for i in range(k)]
            for i in range(k):
                for j in range(i + 1, k):
                    rhs_parts.append(rs_local_factor(blocks[i], inv[j], 1))
                    rhs_parts.append(rs_local_factor(inv[i], blocks[j], 1))
            return lhs, euler_product(rhs_parts)
        gamma = GammaTwist.for_rank(partition.n)
        lhs = asai_local_factor_inert(blocks, gamma)
        rhs_parts = [asai_local_factor_inert([blocks[i]], gamma) for i in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                rhs_parts.append(rs_local_factor(blocks[i], blocks[j], 2))
        return lhs, euler_product(rhs_parts)

    (lhs, rhs), ms = _timed(compute)
    return VerificationReport(
        case="lemma32 %s %s" % (config.kind, "+".join(str(p) for p in parts)),
        lhs=render_denom(lhs),
        rhs=render_denom(rhs),
        equal=lhs == rhs,
        elapsed_ms=round(ms, 3),
    )


# ---------------------------------------------------------------------------
# cyclically induced characters


@dataclass(frozen=True, eq=False)
class InducedDatum:
    """Local shape of a character induced along a degree-n cyclic extension:
    m places upstairs, each of residue degree l over the base, with the
    conjugation action given by c_action.  eigenvalues lists the values
    t_1..t_m; omitted entries are generated as free symbols subject to the
    constraints of the action (all 1 for InertAllFixed, inverse-paired
    across the half shift for InertHalfSwap)."""

    m: int
    l: int
    c_action: str
    eigenvalues: tuple = ()

    def __post_init__(self):
        if self.m < 1 or self.l < 1:
            raise ValueError("m and l must be positive")
        if self.c_action not in _C_ACTIONS:
            raise ValueError("unknown conjugation action %r" % self.c_action)
        if self.c_action == INERT_HALF_SWAP and self.m % 2:
            raise ValueError("half-swap action needs an even number of places")
        if self.c_action == INERT_ALL_FIXED and self.l % 2 == 0:
            # a degree-2l local extension with the conjugation inside its
            # Galois group fixes every place only when l is odd
            raise ValueError("all-fixed action needs odd residue degree l")
        if not self.eigenvalues:
            object.__setattr__(self, "eigenvalues", self._generic_eigenvalues())
        evs = tuple(self.eigenvalues)
        object.__setattr__(self, "eigenvalues", evs)
        if len(evs) != self.m:
            raise ValueError("need exactly m eigenvalues")
        for e in evs:
            if not isinstance(e, LaurentPoly) or not e.is_monomial():
                raise ValueError("eigenvalues must be Laurent monomials")
        if self.c_action == INERT_ALL_FIXED:
            if not all(e.is_one() for e in evs):
                raise ValueError("all-fixed action forces every eigenvalue to 1")
        if self.c_action == INERT_HALF_SWAP:
            h = self.m // 2
            for i in range(h):
                if evs[i + h] != evs[i].inverse_of_monomial():
                    raise ValueError(
                        "half-swap action forces t_{i+m/2} = t_i^-1"
                    )

    def _generic_eigenvalues(self) -> tuple:
        if self.c_action == INERT_ALL_FIXED:
            return tuple(LaurentPoly.constant(1) for _ in range(self.m))
        if self.c_action == INERT_HALF_SWAP:
            h = self.m // 2
            free = [LaurentPoly.from_symbol(symbol("t%d" % (i + 1))) for i in range(h)]
            return tuple(free + [e.inverse_of_monomial() for e in free])
        return tuple(
            LaurentPoly.from_symbol(symbol("t%d" % (i + 1))) for i in range(self.m)
        )

    @property
    def n(self) -> int:
        return self.m * self.l

    @property
    def n_parity(self) -> int:
        return self.n % 2

    @property
    def eta_sign(self) -> int:
        return -1 if self.n % 2 == 0 else 1

    def case_label(self) -> str:
        return "n=%d m=%d l=%d %s" % (self.n, self.m, self.l, self.c_action)


def _root_of(ev: LaurentPoly, order: int) -> LaurentPoly:
    """Adjoin an order-th root of a free-symbol eigenvalue."""
    mono, c = ev.as_monomial()
    if len(mono) != 1 or mono[0][1] != 1 or c != 1:
        raise ValueError("roots can only be adjoined to free symbol eigenvalues")
    base = mono[0][0]
    return LaurentPoly.from_symbol(root_symbol("%sr%d" % (base.name, order), base, order))


def _upstairs_units(datum: InducedDatum) -> list:
    if datum.l == 1 or datum.c_action == INERT_ALL_FIXED:
        return list(datum.eigenvalues)
    if datum.c_action == INERT_HALF_SWAP:
        h = datum.m // 2
        roots = [_root_of(datum.eigenvalues[i], datum.l) for i in range(h)]
        return roots + [u.inverse_of_monomial() for u in roots]
    return [_root_of(e, datum.l) for e in datum.eigenvalues]


def induced_eigenvalues(datum: InducedDatum, zeta_power: int = 1) -> list:
    """The n = m*l eigenvalues u_i zeta^a (u_i an l-th root of t_i, zeta a
    primitive l-th root of unity), all negated when n is even.  zeta_power
    picks which primitive root is used; the verified identities do not
    depend on the choice."""
    l = datum.l
    if gcd(zeta_power, l) != 1:
        raise ValueError("zeta_power must be coprime to l")
    s = datum.eta_sign
    out = []
    for u in _upstairs_units(datum):
        mono, c = u.as_monomial()
        for a in range(l):
            z = s if l == 1 else cmul(
                s, ccanon(Cyclotomic.root_of_unity(l, (zeta_power * a) % l))
            )
            out.append(LaurentPoly.monomial(ccanon(cmul(c, z)), mono))
    return out


def prop34_lhs(datum: InducedDatum, zeta_power: int = 1):
    """Asai factor of the induced character, built directly from its
    eigenvalue multiset.  At a degree-2 place the pair part is recovered as
    the exact square root P of the full ordered-pair product, P(0) = 1."""
    E = induced_eigenvalues(datum, zeta_power)
    if datum.c_action == SPLIT_V:
        lhs = asai_local_factor_split(E, [e.inverse_of_monomial() for e in E])
    else:
        gamma = GammaTwist.for_rank(datum.n)
        diag = euler_from_eigenvalues(
            [e if gamma.sign == 1 else -e for e in E], 1
        )
        n = len(E)
        square = euler_from_eigenvalues(
            [E[p] * E[q] for p in range(n) for q in range(n) if p != q], 2
        )
        lhs = euler_product([diag, euler_sqrt(square)])
    return lhs.subst_roots()


def prop34_rhs(datum: InducedDatum):
    """Predicted factorization: the twisted-pair factors for the shifts
    k = 1 .. K, the quadratic-character factor, and for even n the extra
    half-degree factor, each branch with the residue degrees and signs
    forced by the conjugation action."""
    n, m, l = datum.n, datum.m, datum.l
    if n < 2:
        raise ValueError("induced datum is degenerate: need n >= 2")
    t = list(datum.eigenvalues)
    tinv = [e.inverse_of_monomial() for e in t]

    def tw(i):  # 1-based index reduced mod m
        return (i - 1) % m

    one = LaurentPoly.constant(1)
    minus_one = LaurentPoly.constant(-1)
    K = (n - 1) // 2 if n % 2 else (n - 2) // 2
    factors = []
    if datum.c_action == SPLIT_V:
        for k in range(1, K + 1):
            eigs = []
            for i in range(1, m + 1):
                a = t[tw(i)] * tinv[tw(i + k)]
                eigs.append(a)
                eigs.append(a.inverse_of_monomial())
            factors.append(euler_from_eigenvalues(eigs, l))
        factors.append(euler_from_eigenvalues([one] * m, l))
        if n % 2 == 0:
            factors.append(
                euler_from_eigenvalues(
                    [t[tw(i)] * tinv[tw(i + n // 2)] for i in range(1, m + 1)], l
                )
            )
    elif datum.c_action == INERT_ALL_FIXED:
        for _ in range(K):
            factors.append(euler_from_eigenvalues([one] * m, 2 * l))
        factors.append(euler_from_eigenvalues([minus_one] * m, l))
        if n % 2 == 0:
            factors.append(euler_from_eigenvalues([one] * (m // 2), 2 * l))
    else:
        for k in range(1, K + 1):
            factors.append(
                euler_from_eigenvalues(
                    [t[tw(i)] * tinv[tw(i + k)] for i in range(1, m + 1)], 2 * l
                )
            )
        factors.append(euler_from_eigenvalues([one] * (m // 2), 2 * l))
        if n % 2 == 0:
            if l % 2:
                factors.append(
                    euler_from_eigenvalues([-t[tw(i)] for i in range(1, m + 1)], l)
                )
            else:
                factors.append(euler_from_eigenvalues([one] * (m // 2), 2 * l))
    return euler_product(factors)


def verify_prop34(datum: InducedDatum, zeta_power: int = 1) -> VerificationReport:
    def compute():
        return prop34_lhs(datum, zeta_power), prop34_rhs(datum)

    (lhs, rhs), ms = _timed(compute)
    case = datum.case_label()
    if zeta_power != 1:
        case += " zeta^%d" % zeta_power
    return VerificationReport(
        case="prop34 " + case,
        lhs=render_denom(lhs),
        rhs=render_denom(rhs),
        equal=lhs == rhs,
        elapsed_ms=round(ms, 3),
    )


# ---------------------------------------------------------------------------
# case grids


def partitions(n: int):
    """Unordered partitions of n as non-increasing tuples."""

    def gen(rest, cap):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, cap), 0, -1):
            for tail in gen(rest - p, p):
                yield (p,) + tail

    return list(gen(n, n))


def compositions(n: int):
    """Ordered partitions of n (all 2^(n-1) block orderings)."""

    def gen(rest):
        if rest == 0:
            yield ()
            return
        for p in range(rest, 0, -1):
            for tail in gen(rest - p):
                yield (p,) + tail

    return list(gen(n))


def lemma32_cases(max_n: int, min_n: int = 2):
    out = []
    for n in range(min_n, max_n + 1):
        for part in compositions(n):
            for kind in (SPLIT, INERT):
                out.append((IsobaricShape(part), PlaceConfigF(kind)))
    return out


def admissible_actions(m: int, l: int) -> list:
    acts = [SPLIT_V]
    if l % 2:
        acts.append(INERT_ALL_FIXED)
    if m % 2 == 0:
        acts.append(INERT_HALF_SWAP)
    return acts


def prop34_cases(max_n: int, min_n: int = 2):
    out = []
    for n in range(min_n, max_n + 1):
        for m in range(1, n + 1):
            if n % m:
                continue
            l = n // m
            for act in admissible_actions(m, l):
                out.append(InducedDatum(m, l, act))
    return out
