"""Kloosterman sums for the canonical additive character of GF(2^r).

Only the canonical character lam(x) = (-1)^tr(x) is implemented.  Any other
nontrivial character is x -> lam(c*x) and can be handled by the caller by
scaling the arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from gl2kloosterman.field import FieldParams

# Iteration cap for the m-dimensional sums: (q - 1)^m tuples are enumerated.
SMALL_FIELD_Q = 64


class IterationCapError(ValueError):
    pass


def max_dimension(q: int) -> int:
    return 3 if q <= SMALL_FIELD_Q else 2


def _check_dimension(p: FieldParams, m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"dimension must be a positive integer, got {m!r}")
    if m > max_dimension(p.q):
        raise IterationCapError(
            f"m={m} exceeds the exhaustive-iteration cap for q={p.q} "
            f"(max m={max_dimension(p.q)})"
        )


def _check_nonzero(p: FieldParams, a: int) -> None:
    p.check(a)
    if a == 0:
        raise ValueError("Kloosterman sums are defined for a != 0 only")


def kloosterman_sum(p: FieldParams, a: int) -> int:
    """K(lam; a) = sum over alpha != 0 of lam(alpha + a/alpha)."""
    _check_nonzero(p, a)
    chi = p.char_table
    inv = p.inv_table
    return sum(int(chi[alpha ^ p.mul(a, int(inv[alpha]))]) for alpha in p.nonzero())


def _tuple_sums_and_logs(p: FieldParams, m: int) -> tuple[np.ndarray, np.ndarray]:
    """XOR-sum and log of the product for every m-tuple of nonzero elements."""
    elems = np.arange(1, p.q, dtype=np.int64)
    logs = p.log_table[elems]
    s = np.zeros(1, dtype=np.int64)
    lg = np.zeros(1, dtype=np.int64)
    for _ in range(m):
        s = (s[:, None] ^ elems[None, :]).ravel()
        lg = ((lg[:, None] + logs[None, :]) % (p.q - 1)).ravel()
    return s, lg


def kloosterman_m_sum(p: FieldParams, m: int, a: int) -> int:
    """K_m(lam; a): sum over (alpha_1..alpha_m) of
    lam(alpha_1 + ... + alpha_m + a / (alpha_1 ... alpha_m)).

    Every tuple is visited; m is capped (see :func:`max_dimension`).
    """
    _check_nonzero(p, a)
    _check_dimension(p, m)
    s, lg = _tuple_sums_and_logs(p, m)
    twist = p.exp_table[(p.log_table[a] - lg) % (p.q - 1)]
    return int(p.char_table[s ^ twist].sum())


@dataclass(frozen=True)
class KloostermanTable:
    params: FieldParams
    m: int
    values: dict[int, int] = field(repr=False)

    def __getitem__(self, a: int) -> int:
        return self.values[a]

    def __len__(self) -> int:
        return len(self.values)


def kloosterman_table(p: FieldParams, m: int = 1) -> KloostermanTable:
    """K_m(lam; a) for every a != 0.

    The tuple enumeration is shared across all a by histogramming the tuples
    on (sum, log of product); the character is then summed against that
    histogram, which is a regrouping of the same finite sum.
    """
    _check_dimension(p, m)
    q = p.q
    if m == 1:
        return KloostermanTable(p, 1, {a: kloosterman_sum(p, a) for a in p.nonzero()})
    s, lg = _tuple_sums_and_logs(p, m)
    hist = np.bincount(s * (q - 1) + lg, minlength=q * (q - 1)).reshape(q, q - 1)
    sums_idx, logs_idx = np.nonzero(hist)
    weights = hist[sums_idx, logs_idx]
    values = {}
    for a in p.nonzero():
        twist = p.exp_table[(p.log_table[a] - logs_idx) % (q - 1)]
        values[a] = int((weights * p.char_table[sums_idx ^ twist]).sum())
    return KloostermanTable(p, m, values)


def power_moment(table: KloostermanTable, h: int) -> int:
    """MK_m^h: the exact sum of K_m(lam; a)^h over a != 0."""
    if h < 0:
        raise ValueError("moment order must be nonnegative")
    return sum(v**h for v in table.values.values())


@dataclass(frozen=True)
class ValueCensus:
    params: FieldParams
    multiplicity: dict[int, int]

    @property
    def support(self) -> list[int]:
        return sorted(self.multiplicity)


def theoretical_range(q: int) -> list[int]:
    """Integers t with |t| < 2 sqrt(q) and t = -1 mod 4."""
    bound = 4 * q  # compare t^2 < 4q to stay in integers
    lo = -math.isqrt(bound) - 1
    return [t for t in range(lo, -lo + 1) if t * t < bound and t % 4 == 3]


def value_census(p: FieldParams, table: KloostermanTable | None = None) -> ValueCensus:
    if table is None:
        table = kloosterman_table(p, 1)
    if table.m != 1:
        raise ValueError("census is defined for the 1-dimensional sum")
    counts: dict[int, int] = {}
    for v in table.values.values():
        counts[v] = counts.get(v, 0) + 1
    allowed = set(theoretical_range(p.q))
    bad = set(counts) - allowed
    if bad:
        raise AssertionError(f"values outside |t| < 2 sqrt(q), t = -1 mod 4: {sorted(bad)}")
    return ValueCensus(p, dict(sorted(counts.items())))


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """All reduced positive definite forms (a, b, c) with b^2 - 4ac = disc.

    Imprimitive forms are included.  Reduced means |b| <= a <= c, with
    b >= 0 whenever |b| == a or a == c.
    """
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"not a negative discriminant: {disc}")
    forms = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def class_number_primitive(disc: int) -> int:
    """Number of reduced primitive forms of discriminant disc (unweighted)."""
    return sum(1 for a, b, c in reduced_forms(disc) if math.gcd(math.gcd(a, b), c) == 1)


def kronecker_class_number(d: int) -> int:
    """H(d) = sum of h(d/f^2) over f with f^2 | d and d/f^2 a discriminant.

    h counts primitive reduced forms, without the 1/2, 1/3 weights at
    discriminants -4 and -3.  Equivalently H(d) is the number of all reduced
    forms of discriminant d; tests check the two agree.
    """
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError(f"H(d) needs d < 0 with d = 0, 1 mod 4, got {d}")
    total = 0
    f = 1
    while f * f <= -d:
        if d % (f * f) == 0 and (d // (f * f)) % 4 in (0, 1):
            total += class_number_primitive(d // (f * f))
        f += 1
    return total


@dataclass(frozen=True)
class CensusComparison:
    """Census multiplicity vs H at both candidate discriminants, per t."""

    q: int
    rows: list[tuple[int, int, int | None, int | None]]

    @property
    def matches_4q(self) -> bool:
        return all(mult == h4 for _, mult, h4, _ in self.rows)

    @property
    def matches_q(self) -> bool:
        return all(mult == h1 for _, mult, _, h1 in self.rows)


def compare_census_with_class_numbers(census: ValueCensus) -> CensusComparison:
    """Tabulate (t, multiplicity, H(t^2 - 4q), H(t^2 - q)) over the range.

    A discriminant that is not a valid negative one gives None.
    """
    q = census.params.q

    def safe_h(d: int) -> int | None:
        if d >= 0 or d % 4 not in (0, 1):
            return None
        return kronecker_class_number(d)

    rows = [
        (t, census.multiplicity.get(t, 0), safe_h(t * t - 4 * q), safe_h(t * t - q))
        for t in theoretical_range(q)
    ]
    return CensusComparison(q, rows)


def twisted_character_sum(
    p: FieldParams, m: int, beta: int, table: KloostermanTable | None = None
) -> int:
    """Sum over a != 0 of lam(-a*beta) * K_m(lam; a), summed directly.

    In characteristic 2, -a*beta = a*beta.
    """
    p.check(beta)
    if table is None:
        table = kloosterman_table(p, m)
    elif table.m != m:
        raise ValueError("table dimension does not match m")
    return sum(int(p.char_table[p.mul(a, beta)]) * k for a, k in table.values.items())


def twisted_character_sum_closed_form(
    p: FieldParams, m: int, beta: int, lower: KloostermanTable | None = None
) -> int:
    """q K_{m-1}(lam; 1/beta) + (-1)^(m+1) for beta != 0, else (-1)^(m+1).

    K_0(lam; x) is lam(x).  ``lower`` is the (m-1)-dimensional table when
    m >= 2.
    """
    sign = 1 if m % 2 == 1 else -1
    if beta == 0:
        return sign
    binv = int(p.inv_table[beta])
    if m == 1:
        k_lower = int(p.char_table[binv])
    else:
        if lower is None:
            lower = kloosterman_table(p, m - 1)
        k_lower = lower[binv]
    return p.q * k_lower + sign

