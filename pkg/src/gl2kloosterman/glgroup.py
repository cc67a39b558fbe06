"""GL(2,q) over GF(2^r): enumeration, Kloosterman sums over GL(t,q), and
the fiber counts n(beta) = #{g : Tr g + Tr g^-1 = beta}.

Enumeration order (part of the external contract, it fixes the coordinate
order of the code): lexicographic on the tuple (a, b, c, d) of bitmask
values for the matrix [[a, b], [c, d]], singular tuples skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator, NamedTuple

import numpy as np

from gl2kloosterman.field import FieldParams
from gl2kloosterman.kloosterman import KloostermanTable, kloosterman_sum

# Direct enumeration is an oracle, not a scaling path: |GL(2,64)| ~ 1.6e7.
MAX_ENUM_Q = 64
MAX_RECURSION_T = 6


class GLMatrix(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    def det(self, p: FieldParams) -> int:
        return p.mul(self.a, self.d) ^ p.mul(self.b, self.c)

    def trace(self) -> int:
        return self.a ^ self.d

    def inverse(self, p: FieldParams) -> "GLMatrix":
        # adj([[a, b], [c, d]]) = [[d, b], [c, a]] in characteristic 2
        dinv = int(p.inv_table[self.det(p)])
        return GLMatrix(p.mul(dinv, self.d), p.mul(dinv, self.b),
                        p.mul(dinv, self.c), p.mul(dinv, self.a))


def gl_order(q: int, n: int) -> int:
    """|GL(n, q)| = q^C(n,2) * prod_{j=1..n} (q^j - 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    result = q ** comb(n, 2)
    for j in range(1, n + 1):
        result *= q**j - 1
    return result


def _check_enum(p: FieldParams) -> None:
    if p.q > MAX_ENUM_Q:
        raise ValueError(f"direct GL(2,q) enumeration is limited to q <= {MAX_ENUM_Q}")


def enumerate_gl2(p: FieldParams) -> Iterator[GLMatrix]:
    _check_enum(p)
    q = p.q
    for a in range(q):
        for b in range(q):
            for c in range(q):
                bc = p.mul(b, c)
                for d in range(q):
                    if p.mul(a, d) != bc:
                        yield GLMatrix(a, b, c, d)


@dataclass(frozen=True)
class GL2Arrays:
    """Columnar form of the enumeration, same order as :func:`enumerate_gl2`.

    ``trace`` is Tr g and ``trace_inv`` is Tr g^-1 = (a + d) / det.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    trace: np.ndarray
    trace_inv: np.ndarray

    def __len__(self) -> int:
        return len(self.a)


def _mul_table(p: FieldParams) -> np.ndarray:
    x = np.arange(p.q, dtype=np.int64)
    return p.mul_array(x[:, None], x[None, :])


@lru_cache(maxsize=4)
def gl2_arrays(p: FieldParams) -> GL2Arrays:
    _check_enum(p)
    q = p.q
    mul = _mul_table(p)
    cols: list[list[np.ndarray]] = [[] for _ in range(6)]
    # one slice per value of the top-left entry keeps peak memory at O(q^3)
    for a in range(q):
        det = mul[a][None, None, :] ^ mul[:, :, None]  # det[b, c, d]
        b, c, d = np.nonzero(det)
        dv = det[b, c, d]
        tr = a ^ d
        tr_inv = mul[p.inv_table[dv], tr]
        for col, arr in zip(cols, (np.full(len(b), a), b, c, d, tr, tr_inv)):
            col.append(arr.astype(np.uint8))
    out = GL2Arrays(*(np.concatenate(col) for col in cols))
    for arr in (out.a, out.b, out.c, out.d, out.trace, out.trace_inv):
        arr.flags.writeable = False
    return out


@lru_cache(maxsize=4)
def trace_pair_histogram(p: FieldParams) -> np.ndarray:
    """``hist[s, u]`` = #{g in GL(2,q) : Tr g = s, Tr g^-1 = u}."""
    g = gl2_arrays(p)
    q = p.q
    flat = g.trace.astype(np.int64) * q + g.trace_inv
    hist = np.bincount(flat, minlength=q * q).reshape(q, q)
    hist.flags.writeable = False
    return hist


def gl2_kloosterman_direct(p: FieldParams, a: int) -> int:
    """Sum of lam(Tr g + a Tr g^-1) over every g in GL(2,q)."""
    p.check(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    g = gl2_arrays(p)
    args = g.trace ^ p.scale_array(a, g.trace_inv)
    return int(p.char_table[args].sum())


def gl2_kloosterman_all(p: FieldParams) -> dict[int, int]:
    """K_GL(2,q)(lam; a) for every a != 0, summed over the enumeration
    grouped by the pair (Tr g, Tr g^-1)."""
    hist = trace_pair_histogram(p)
    s, u = np.nonzero(hist)
    w = hist[s, u]
    return {a: int((w * p.char_table[s ^ p.scale_array(a, u)]).sum()) for a in p.nonzero()}


def gl2_scaled_trace_sum(p: FieldParams, a: int) -> int:
    """Sum of lam(a (Tr g + Tr g^-1)) over GL(2,q), by enumeration."""
    p.check(a)
    g = gl2_arrays(p)
    return int(p.char_table[p.scale_array(a, g.trace ^ g.trace_inv)].sum())


def gl_kloosterman_recursive(p: FieldParams, t: int, a: int, k1: int | None = None) -> int:
    """K_GL(t,q)(lam; a) from the two-term recursion

        K_t = q^(t-1) K_(t-1) K + q^(2t-2) (q^(t-1) - 1) K_(t-2),

    with K_0 = 1 and K_1 = K(lam; a).  ``k1`` may supply K(lam; a).
    """
    p.check(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    if not 0 <= t <= MAX_RECURSION_T:
        raise ValueError(f"t must be in [0, {MAX_RECURSION_T}]")
    if t == 0:
        return 1
    q = p.q
    k = kloosterman_sum(p, a) if k1 is None else k1
    prev, cur = 1, k
    for s in range(2, t + 1):
        prev, cur = cur, q ** (s - 1) * cur * k + q ** (2 * s - 2) * (q ** (s - 1) - 1) * prev
    return cur


@dataclass(frozen=True)
class FiberCensus:
    params: FieldParams
    counts: tuple[int, ...]

    def __getitem__(self, beta: int) -> int:
        return self.counts[beta]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def weighted_sum(self) -> int:
        """Sum of n(beta) * beta in GF(q), i.e. XOR of beta over odd n(beta)."""
        acc = 0
        for beta, n in enumerate(self.counts):
            if n & 1:
                acc ^= beta
        return acc


def fiber_census_direct(p: FieldParams) -> FiberCensus:
    g = gl2_arrays(p)
    counts = np.bincount(g.trace ^ g.trace_inv, minlength=p.q)
    return FiberCensus(p, tuple(int(n) for n in counts))


def fiber_census_formula(p: FieldParams, ktable: KloostermanTable) -> FiberCensus:
    """n(0) = q(2q^2 - 2q - 1); n(beta) = q(q^2 - 2q - 1 + K(lam; 1/beta))."""
    if ktable.m != 1 or ktable.params != p:
        raise ValueError("need the 1-dimensional Kloosterman table of this field")
    q = p.q
    counts = [q * (2 * q * q - 2 * q - 1)]
    for beta in p.nonzero():
        counts.append(q * (q * q - 2 * q - 1 + ktable[int(p.inv_table[beta])]))
    return FiberCensus(p, tuple(counts))
