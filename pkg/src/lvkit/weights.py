"""Highest weights, infinity-types, critical windows, and the interlacing /
regularity predicates, together with the isobaric-shape combinatorics.

Half-integers are stored doubled (2a) so all window comparisons run on
integers; rational shifts r, s enter only through Fractions at the edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("expected exact rational, got %r" % (x,))


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class HighestWeight:
    """Weakly decreasing integer vectors (mu_iota, mu_iotabar) per CM place."""

    embeddings: tuple  # tuple of (tuple mu_iota, tuple mu_iotabar)

    def __post_init__(self):
        if not self.embeddings:
            raise ValueError("need at least one embedding")
        n = len(self.embeddings[0][0])
        for mu_i, mu_ib in self.embeddings:
            if len(mu_i) != n or len(mu_ib) != n:
                raise ValueError("ragged weight vectors")
            for v in (mu_i, mu_ib):
                if any(v[j] < v[j + 1] for j in range(n - 1)):
                    raise ValueError("weight vectors must be weakly decreasing")

    @property
    def n(self) -> int:
        return len(self.embeddings[0][0])

    @property
    def d(self) -> int:
        return len(self.embeddings)

    @staticmethod
    def dual_vector(v) -> tuple:
        return tuple(-x for x in reversed(v))

    @classmethod
    def from_rows(cls, rows, rows_bar=None) -> "HighestWeight":
        """Build from the iota-components; the conjugate components default
        to the dual vectors (conjugate self-dual convention)."""
        rows = [tuple(r) for r in rows]
        if rows_bar is None:
            rows_bar = [cls.dual_vector(r) for r in rows]
        else:
            rows_bar = [tuple(r) for r in rows_bar]
        if len(rows_bar) != len(rows):
            raise ValueError("mismatched embedding counts")
        return cls(tuple(zip(rows, rows_bar)))

    @classmethod
    def zero(cls, n: int, d: int) -> "HighestWeight":
        return cls.from_rows([(0,) * n] * d)


@dataclass(frozen=True)
class InfinityType:
    """Exponent vectors a_{iota,i} per embedding, stored doubled (2a)."""

    rows2: tuple  # d tuples of n doubled integers, strictly or weakly decreasing
    r: Fraction = Fraction(0)

    def __post_init__(self):
        if not self.rows2:
            raise ValueError("need at least one embedding")
        n = len(self.rows2[0])
        for row in self.rows2:
            if len(row) != n:
                raise ValueError("ragged exponent vectors")
            # entries lie in (n-1)/2 + Z, i.e. doubled entries share the
            # parity of n-1
            for x in row:
                if (x - (n - 1)) % 2:
                    raise ValueError("exponent outside (n-1)/2 + Z")

    @property
    def n(self) -> int:
        return len(self.rows2[0])

    @property
    def d(self) -> int:
        return len(self.rows2)

    def values(self, iota: int):
        return [Fraction(x, 2) for x in self.rows2[iota]]

    def is_regular(self) -> bool:
        return all(len(set(row)) == len(row) for row in self.rows2)

    def is_conjugate_self_dual_shape(self) -> bool:
        # exponent multiset closed under negation per embedding
        return all(sorted(row) == sorted(-x for x in row) for row in self.rows2)


def infinity_type(mu: HighestWeight, r) -> InfinityType:
    """Exponents a_{iota,i} = -mu_{iota,n-i+1} + (n+1)/2 - i.

    The shift r cancels between the inducing-character exponent and the
    normalization, so the output depends on mu alone; r is carried along
    for window arithmetic.
    """
    r = _as_fraction(r)
    n = mu.n
    rows2 = []
    for mu_i, _ in mu.embeddings:
        row = [-2 * mu_i[n - i] + (n + 1) - 2 * i for i in range(1, n + 1)]
        row.sort(reverse=True)
        rows2.append(tuple(row))
    return InfinityType(tuple(rows2), r)


# ---------------------------------------------------------------------------
# isobaric shapes


@dataclass(frozen=True)
class IsobaricShape:
    """Ordered block sizes (n_1, ..., n_k) of an isobaric sum, with distinct
    block labels; e is the global twist flag."""

    parts: tuple
    labels: tuple = ()
    e: int = 0

    def __post_init__(self):
        if not self.parts or any(p <= 0 for p in self.parts):
            raise ValueError("parts must be positive")
        if self.e not in (0, 1):
            raise ValueError("e must be 0 or 1")
        if not self.labels:
            object.__setattr__(
                self, "labels", tuple("b%d" % (i + 1) for i in range(len(self.parts)))
            )
        if len(self.labels) != len(self.parts):
            raise ValueError("one label per part")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be pairwise distinct")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> int:
        return len(self.parts)


def rho_exponents(shape: IsobaricShape) -> list:
    """Half-sum shifts a_i = sum_{j>i} n_j - sum_{j<i} n_j."""
    parts = shape.parts
    k = len(parts)
    out = []
    for i in range(1, k + 1):
        a = sum(parts[i:]) - sum(parts[: i - 1])
        out.append(a)
    return out


NO_TWIST = "NoTwist"
ETA_TWIST = "EtaTwist"


def alg_twist(shape: IsobaricShape, i: int):
    """Twist flag for block i (1-based): no twist iff n and n_i share parity.
    Returns (flag, e_i) with e_i = 0 for NoTwist and -1 otherwise."""
    if not 1 <= i <= shape.k:
        raise IndexError("block index out of range")
    if (shape.n - shape.parts[i - 1]) % 2 == 0:
        return NO_TWIST, 0
    return ETA_TWIST, -1


# ---------------------------------------------------------------------------
# critical windows


@dataclass(frozen=True)
class CriticalSet:
    """Solution set of a critical-window inequality.

    Stored as a doubled half-open window (lo2 exclusive, hi2 inclusive;
    None = unbounded) plus an optional parity filter for the Asai case.
    Membership is exact; enumeration materializes the set and requires a
    bounded window.
    """

    kind: str  # "rs" (half-integers 1/2 + m) or "asai" (integers m)
    lo2: object = None  # doubled, exclusive
    hi2: object = None  # doubled, inclusive
    parity: str | None = None  # "same" | "opposite" for the Asai case
    empty_reason: str | None = None

    def is_empty_signal(self) -> bool:
        return self.empty_reason is not None

    @classmethod
    def none_signal(cls, kind: str, reason: str) -> "CriticalSet":
        return cls(kind=kind, lo2=0, hi2=0, empty_reason=reason)

    # -- membership

    def _window_contains2(self, x2) -> bool:
        if self.empty_reason is not None:
            return False
        if self.lo2 is not None and not (self.lo2 < x2):
            return False
        if self.hi2 is not None and not (x2 <= self.hi2):
            return False
        return True

    @staticmethod
    def _parity_ok(m: int, parity: str) -> bool:
        # same-sign Asai: positive odd or non-positive even
        # opposite-sign Asai: positive even or negative odd
        if parity == "same":
            return (m > 0 and m % 2 == 1) or (m <= 0 and m % 2 == 0)
        if parity == "opposite":
            return (m > 0 and m % 2 == 0) or (m < 0 and m % 2 == 1)
        raise ValueError("unknown parity filter %r" % parity)

    def contains(self, x) -> bool:
        """x is the actual point: a half-integer 1/2+m for kind 'rs', an
        integer m for kind 'asai'."""
        x = _as_fraction(x)
        if self.kind == "rs":
            m = x - Fraction(1, 2)
            if m.denominator != 1:
                return False
            return self._window_contains2(2 * x)
        if self.kind == "asai":
            if x.denominator != 1:
                return False
            m = int(x)
            if self.parity is not None and not self._parity_ok(m, self.parity):
                return False
            return self._window_contains2(2 * m)
        raise ValueError("unknown kind %r" % self.kind)

    # -- enumeration

    def enumerate(self) -> list:
        if self.empty_reason is not None:
            return []
        if self.lo2 is None or self.hi2 is None:
            raise ValueError("cannot enumerate an unbounded critical window")
        out = []
        if self.kind == "rs":
            # half-integers 1/2 + m in (lo2/2, hi2/2]
            m_lo = (Fraction(self.lo2) / 2 - Fraction(1, 2)).__floor__()
            m_hi = (Fraction(self.hi2) / 2 - Fraction(1, 2)).__floor__()
            for m in range(m_lo, m_hi + 1):
                x = Fraction(2 * m + 1, 2)
                if self._window_contains2(2 * x):
                    out.append(x)
            return out
        m_lo = (Fraction(self.lo2) / 2).__floor__()
        m_hi = (Fraction(self.hi2) / 2).__floor__()
        for m in range(m_lo, m_hi + 1):
            if self._window_contains2(2 * m) and (
                self.parity is None or self._parity_ok(m, self.parity)
            ):
                out.append(m)
        return out


def no_middle_class(a: InfinityType, b: InfinityType, r, s) -> bool:
    """True iff a_{iota,i} + b_{iota,j} != r + s for all i, j, iota."""
    if a.d != b.d:
        raise ValueError("mismatched embedding counts")
    target2 = 2 * (_as_fraction(r) + _as_fraction(s))
    for ra, rb in zip(a.rows2, b.rows2):
        for x in ra:
            for y in rb:
                if x + y == target2:
                    return False
    return True


def crit_rankin_selberg(a: InfinityType, b: InfinityType, r=None, s=None) -> CriticalSet:
    """Half-integers 1/2+m with -M < 1/2+m+r+s <= M, where M is the minimum
    of |a_{iota,i} + b_{iota,j} - r - s|; strict left, inclusive right."""
    if b.n != a.n - 1:
        raise ValueError("second factor must have rank n-1")
    r = a.r if r is None else _as_fraction(r)
    s = b.r if s is None else _as_fraction(s)
    if not no_middle_class(a, b, r, s):
        return CriticalSet.none_signal("rs", "middle-class exponents: no critical points")
    rs2 = 2 * (r + s)
    m2 = None
    for ra, rb in zip(a.rows2, b.rows2):
        for x in ra:
            for y in rb:
                v = abs(x + y - rs2)
                if m2 is None or v < m2:
                    m2 = v
    # window on the 1/2+m axis: (-M - r - s, M - r - s]
    return CriticalSet(kind="rs", lo2=-m2 - rs2, hi2=m2 - rs2)


def crit_asai(a: InfinityType, sign: int) -> CriticalSet:
    """Integers in (max negative pairwise difference, min positive pairwise
    difference], parity-filtered: sign=+1 selects the factor matching
    (-1)^n (positive odd or non-positive even), sign=-1 the opposite one
    (positive even or negative odd)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if not a.is_regular():
        raise ValueError("infinity-type must be regular")
    max_neg2 = None
    min_pos2 = None
    for row in a.rows2:
        for x in row:
            for y in row:
                diff = x - y
                if diff < 0 and (max_neg2 is None or diff > max_neg2):
                    max_neg2 = diff
                if diff > 0 and (min_pos2 is None or diff < min_pos2):
                    min_pos2 = diff
    return CriticalSet(
        kind="asai",
        lo2=max_neg2,
        hi2=min_pos2,
        parity="same" if sign == 1 else "opposite",
    )


# ---------------------------------------------------------------------------
# predicates


def _chain_ok(mu_row, mup_row) -> bool:
    n = len(mu_row)
    seq = []
    for j in range(1, n):
        seq.append(mu_row[j - 1])
        seq.append(-mup_row[n - 1 - j])
    seq.append(mu_row[n - 1])
    return all(seq[i] >= seq[i + 1] for i in range(len(seq) - 1))


def piano_check(mu: HighestWeight, mup: HighestWeight) -> bool:
    """Interlacing of the two weights at every place: the direct chain on
    the iota-components and the dual-weight chain on the conjugate ones."""
    if mup.n != mu.n - 1:
        raise ValueError("second weight must have rank n-1")
    if mup.d != mu.d:
        raise ValueError("mismatched embedding counts")
    for (mu_i, mu_ib), (mup_i, mup_ib) in zip(mu.embeddings, mup.embeddings):
        if not _chain_ok(mu_i, mup_i):
            return False
        if not _chain_ok(
            HighestWeight.dual_vector(mu_ib), HighestWeight.dual_vector(mup_ib)
        ):
            return False
    return True


def sufficiently_regular(mu: HighestWeight) -> bool:
    """Consecutive gaps >= 2 in every iota-component."""
    for mu_i, _ in mu.embeddings:
        if any(mu_i[j] - mu_i[j + 1] < 2 for j in range(len(mu_i) - 1)):
            return False
    return True


def bottom_degree(n: int, d: int) -> int:
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    return d * n * (n - 1) // 2


# ---------------------------------------------------------------------------
# JSON weight files


def parse_weight_json(obj: dict):
    """Parse { "n", "d", "mu", "r" } (+ optional "mu_bar") into a weight and
    its shift.  mu lists the iota-component vectors, one per embedding; the
    conjugate components default to the dual vectors."""
    try:
        n = int(obj["n"])
        d = int(obj["d"])
        mu = obj["mu"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("weight object needs integer n, d and a mu array") from exc
    if not isinstance(mu, list) or len(mu) != d:
        raise ValueError("mu must list %d embedding vectors" % d)
    for row in mu:
        if not isinstance(row, list) or len(row) != n or not all(
            isinstance(x, int) for x in row
        ):
            raise ValueError("each mu vector must hold %d integers" % n)
    mu_bar = obj.get("mu_bar")
    if mu_bar is not None:
        if not isinstance(mu_bar, list) or len(mu_bar) != d:
            raise ValueError("mu_bar must list %d embedding vectors" % d)
    r = _as_fraction(obj.get("r", 0))
    w = HighestWeight.from_rows(mu, mu_bar)
    if w.n != n:
        raise ValueError("mu rank disagrees with n")
    return w, r
