"""The binary code C(GL(2,q)) and its weight distribution.

C is the set of u in GF(2)^N with sum_i u_i v_i = 0 in GF(q), where
v_i = Tr g_i + Tr g_i^-1 runs over GL(2,q) in enumeration order.  Its dual
consists of the q words c(a) = (tr(a v_i))_i.

Coordinates are never materialised: every quantity depends on the
coordinates only through the fiber sizes n(beta).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import gmpy2

from gl2kloosterman.field import FieldParams
from gl2kloosterman.glgroup import (
    FiberCensus,
    fiber_census_direct,
    fiber_census_formula,
    gl2_arrays,
    gl_order,
)
from gl2kloosterman.kloosterman import KloostermanTable, kloosterman_table

MAX_DP_Q = 16


class InexactDivisionError(ArithmeticError):
    """An integer division that the mathematics guarantees to be exact was not."""


@dataclass(frozen=True)
class CodeContext:
    params: FieldParams
    N: int
    fiber: FiberCensus

    @property
    def dimension(self) -> int:
        return self.N - self.params.r

    @property
    def dual_dimension(self) -> int:
        return self.params.r


def build_code_context(p: FieldParams, fiber_method: str = "formula") -> CodeContext:
    """Set up C(GL(2,q)); q = 2 is refused since a -> c(a) then has a kernel."""
    if p.r < 2:
        raise ValueError("C(GL(2,q)) needs q >= 4")
    if fiber_method == "formula":
        fiber = fiber_census_formula(p, kloosterman_table(p, 1))
    elif fiber_method == "direct":
        fiber = fiber_census_direct(p)
    else:
        raise ValueError(f"unknown fiber method {fiber_method!r}")
    N = gl_order(p.q, 2)
    if fiber.total != N:
        raise AssertionError(f"fiber sizes sum to {fiber.total}, expected {N}")
    return CodeContext(p, N, fiber)


def dual_weight(ctx: CodeContext, ktable: KloostermanTable, a: int,
                k2table: KloostermanTable | None = None) -> int:
    """w(c(a)) = q (q^3 - 2q^2 + 1 - K(lam; a)^2) / 2.

    With ``k2table`` also checks the K_2 form
    q (q^3 - 2q^2 - q + 1 - K_2(lam; a)) / 2.
    """
    p = ctx.params
    p.check(a)
    if a == 0:
        return 0
    q = p.q
    k = ktable[a]
    twice = q * (q**3 - 2 * q * q + 1 - k * k)
    if twice % 2:
        raise InexactDivisionError("odd doubled weight")
    w = twice // 2
    if k2table is not None:
        alt = q * (q**3 - 2 * q * q - q + 1 - k2table[a])
        if alt != twice:
            raise AssertionError(f"weight forms disagree at a={a}: {w} vs {alt / 2}")
    return w


def dual_weight_direct(ctx: CodeContext, a: int) -> int:
    """Count coordinates i with tr(a v_i) = 1 over the GL(2,q) enumeration."""
    p = ctx.params
    p.check(a)
    g = gl2_arrays(p)
    return int(p.trace_table[p.scale_array(a, g.trace ^ g.trace_inv)].sum())


def dual_weight_grouped(ctx: CodeContext, a: int) -> int:
    """Sum of n(beta) over beta with tr(a beta) = 1."""
    p = ctx.params
    return sum(n for beta, n in enumerate(ctx.fiber.counts) if p.trace_table[p.mul(a, beta)])


@dataclass(frozen=True)
class DualWeightTable:
    weights: dict[int, int]

    def __getitem__(self, a: int) -> int:
        return self.weights[a]

    def frequencies(self) -> dict[int, int]:
        """B_w: number of dual codewords of each weight."""
        out: dict[int, int] = {}
        for w in self.weights.values():
            out[w] = out.get(w, 0) + 1
        return dict(sorted(out.items()))

    def power_sum(self, h: int) -> int:
        return sum(w**h for w in self.weights.values())


def dual_weight_table(ctx: CodeContext, ktable: KloostermanTable | None = None) -> DualWeightTable:
    if ktable is None:
        ktable = kloosterman_table(ctx.params, 1)
    return DualWeightTable({a: dual_weight(ctx, ktable, a) for a in ctx.params.elements()})


@dataclass(frozen=True)
class WeightDistribution:
    """C_0..C_J.  ``freqs`` has N + 1 entries unless it was truncated at
    ``max_weight`` = J < N."""

    N: int
    freqs: tuple[int, ...]

    @property
    def complete(self) -> bool:
        return len(self.freqs) == self.N + 1

    @property
    def max_weight(self) -> int:
        return len(self.freqs) - 1

    def __getitem__(self, j: int) -> int:
        if j < 0 or j > self.N:
            return 0
        if j > self.max_weight:
            raise IndexError(f"C_{j} not computed (truncated at {self.max_weight})")
        return self.freqs[j]

    def total(self) -> int:
        self._need_complete()
        return sum(self.freqs)

    def first_moment(self) -> int:
        self._need_complete()
        return sum(j * c for j, c in enumerate(self.freqs))

    def is_symmetric(self) -> bool:
        self._need_complete()
        return self.freqs == self.freqs[::-1]

    def _need_complete(self) -> None:
        if not self.complete:
            raise ValueError("operation needs the full distribution")


def _resolve_max_weight(N: int, max_weight: int | None) -> int:
    if max_weight is None or max_weight >= N:
        return N
    if max_weight < 0:
        raise ValueError("max_weight must be nonnegative")
    return max_weight


def _pack(coeffs, width_bytes: int) -> gmpy2.mpz:
    raw = b"".join(int(c).to_bytes(width_bytes, "little") for c in coeffs)
    return gmpy2.mpz(int.from_bytes(raw, "little"))


def _unpack(value, count: int, width_bytes: int) -> list[int]:
    raw = int(value).to_bytes(count * width_bytes, "little")
    return [int.from_bytes(raw[i * width_bytes:(i + 1) * width_bytes], "little")
            for i in range(count)]


def _binomial_row(n: int, upto: int) -> list[int]:
    row = [1]
    c = 1
    for k in range(1, min(n, upto) + 1):
        c = c * (n - k + 1) // k
        row.append(c)
    return row


def weight_distribution_dp(ctx: CodeContext, max_weight: int | None = None) -> WeightDistribution:
    """C_j as the sum over (nu_beta) with sum nu_beta = j and
    sum nu_beta * beta = 0 of prod_beta C(n(beta), nu_beta).

    Dynamic programming over the group algebra of (GF(q), +): for each
    group element s keep the polynomial P_s(x) whose x^j coefficient counts
    selections of weight j with GF(q)-sum s.  Fiber beta multiplies by
    (1 + x z^beta)^n(beta) = E(x) + O(x) z^beta, with E, O the even and odd
    parts of (1 + x)^n(beta).  Polynomials are packed into single big
    integers (Kronecker substitution); all coefficients are nonnegative and
    bounded, so slots never carry into each other.
    """
    p = ctx.params
    if p.q > MAX_DP_Q:
        raise ValueError(f"DP weight distribution is limited to q <= {MAX_DP_Q}")
    N = ctx.N
    J = _resolve_max_weight(N, max_weight)
    # every coefficient counts subsets of size <= J
    bound = sum(comb(N, j) for j in range(J + 1)) if J < N else 1 << N
    width = bound.bit_length() // 8 + 1
    shift = 8 * width
    mask = (gmpy2.mpz(1) << (shift * (J + 1))) - 1

    state = [gmpy2.mpz(0)] * p.q
    state[0] = gmpy2.mpz(1)
    for beta in p.elements():
        n = ctx.fiber[beta]
        row = _binomial_row(n, J)
        even = _pack([c if k % 2 == 0 else 0 for k, c in enumerate(row)], width)
        odd = _pack([c if k % 2 == 1 else 0 for k, c in enumerate(row)], width)
        if beta == 0:
            full = even + odd
            state = [(full * s) & mask for s in state]
        else:
            state = [(even * state[s] + odd * state[s ^ beta]) & mask for s in p.elements()]
    freqs = _unpack(state[0], J + 1, width)
    return WeightDistribution(N, tuple(freqs))


def krawtchouk_row(N: int, w: int, upto: int) -> list[int]:
    """Coefficients of x^0..x^upto in (1 + x)^(N - w) (1 - x)^w.

    Uses (j+1) K_(j+1) = (N - 2w) K_j - (N - j + 1) K_(j-1), which follows
    from (1 - x^2) G' = ((N - 2w) - N x) G.
    """
    out = [gmpy2.mpz(1)]
    if upto >= 1:
        out.append(gmpy2.mpz(N - 2 * w))
    for j in range(1, upto):
        num = (N - 2 * w) * out[j] - (N - j + 1) * out[j - 1]
        nxt, rem = gmpy2.f_divmod(num, j + 1)
        if rem:
            raise InexactDivisionError(f"Krawtchouk recurrence not exact at j={j}")
        out.append(nxt)
    return out[: upto + 1]


def weight_distribution_transform(ctx: CodeContext, dw: DualWeightTable,
                                  max_weight: int | None = None,
                                  threads: int = 1) -> WeightDistribution:
    """C_j = (1/q) sum_a [x^j] (1 + x)^(N - w(c(a))) (1 - x)^w(c(a)).

    u lies in C iff every dual word c(a) is orthogonal to u, so averaging
    (-1)^(c(a).u) over the q dual words is the indicator of C.  Words a
    with equal weight contribute equal rows and are merged.
    """
    p = ctx.params
    N = ctx.N
    J = _resolve_max_weight(N, max_weight)
    if set(dw.weights) != set(p.elements()):
        raise ValueError("dual weight table must cover every a in GF(q)")
    freq = dw.frequencies()

    def row(w: int) -> list:
        return krawtchouk_row(N, w, J)

    weights = list(freq)
    if threads > 1 and len(weights) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, weights))
    else:
        rows = [row(w) for w in weights]
    out = []
    for j in range(J + 1):
        total = sum(freq[w] * r[j] for w, r in zip(weights, rows))
        value, rem = gmpy2.f_divmod(total, p.q)
        if rem:
            raise InexactDivisionError(f"sum for C_{j} not divisible by q")
        out.append(int(value))
    return WeightDistribution(N, tuple(out))

