"""Stirling numbers, the Pless power moment identity for C(GL(2,q))^perp,
and the recursions that produce MK_2^h and MK^(2h) from the weight
distribution {C_j}.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from gl2kloosterman.code import CodeContext, DualWeightTable, InexactDivisionError, WeightDistribution


def binom(b: int, a: int) -> int:
    """C(b, a), taken to be 0 when a > b or a < 0."""
    if a < 0 or b < 0 or a > b:
        return 0
    return comb(b, a)


@lru_cache(maxsize=None)
def stirling(h: int, t: int) -> int:
    """S(h, t) by S(h, t) = t S(h-1, t) + S(h-1, t-1)."""
    if h < 0 or t < 0:
        raise ValueError("Stirling numbers need nonnegative arguments")
    if t > h:
        return 0
    if h == 0:
        return 1
    if t == 0:
        return 0
    return t * stirling(h - 1, t) + stirling(h - 1, t - 1)


def stirling_alternating(h: int, t: int) -> int:
    """S(h, t) = (1/t!) sum_j (-1)^(t-j) C(t, j) j^h."""
    total = sum((-1) ** (t - j) * comb(t, j) * j**h for j in range(t + 1))
    value, rem = divmod(total, factorial(t))
    if rem:
        raise InexactDivisionError(f"alternating sum for S({h},{t}) not divisible by {t}!")
    return value


def stirling_table(h_max: int) -> list[list[int]]:
    """Rows 0..h_max of S(h, t), t = 0..h."""
    return [[stirling(h, t) for t in range(h + 1)] for h in range(h_max + 1)]


def _inner(N: int, h: int, j: int, base: int, scale_exp: int) -> int:
    """sum_{t=j..h} t! S(h,t) base^(scale_exp - t) C(N-j, N-t); scale_exp >= h."""
    return sum(factorial(t) * stirling(h, t) * base ** (scale_exp - t) * binom(N - j, N - t)
               for t in range(j, h + 1))


def pless_both_sides(ctx: CodeContext, dw: DualWeightTable, wd: WeightDistribution,
                     h: int) -> tuple[int, int]:
    """Both sides of the Pless identity for B = C^perp (binary, length N,
    dimension r), whose dual is C.

    lhs = sum_a w(c(a))^h
    rhs = sum_{j <= min(N, h)} (-1)^j C_j sum_{t=j..h} t! S(h,t) 2^(r-t) C(N-j, N-t)

    2^(r-t) can be fractional for t > r, so rhs is formed as an integer
    scaled by 2^h and divided back exactly.
    """
    if h < 0:
        raise ValueError("h must be nonnegative")
    N = ctx.N
    r = ctx.params.r
    lhs = dw.power_sum(h)
    scaled = sum((-1) ** j * wd[j] * _inner(N, h, j, 2, h) for j in range(min(N, h) + 1))
    # scaled = rhs * 2^(h - r)
    if h >= r:
        rhs, rem = divmod(scaled, 2 ** (h - r))
        if rem:
            raise InexactDivisionError(f"Pless right side not integral at h={h}")
    else:
        rhs = scaled * 2 ** (r - h)
    return lhs, rhs


def _second_sum(ctx: CodeContext, wd: WeightDistribution, h: int) -> int:
    """q^(1-h) sum_j (-1)^(h+j) C_j sum_t t! S(h,t) 2^(h-t) C(N-j, N-t), exactly."""
    N = ctx.N
    q = ctx.params.q
    total = sum((-1) ** (h + j) * wd[j] * _inner(N, h, j, 2, h) for j in range(min(N, h) + 1))
    value, rem = divmod(total, q ** (h - 1))
    if rem:
        raise InexactDivisionError(f"second sum not divisible by q^{h - 1} at h={h}")
    return value


def _recursion(base: int, ctx: CodeContext, wd: WeightDistribution, h: int,
               history: list[int]) -> int:
    if h < 1:
        raise ValueError("recursion starts at h = 1")
    if len(history) < h:
        raise ValueError(f"need {h} earlier moments, got {len(history)}")
    first = sum((-1) ** (h + l + 1) * comb(h, l) * base ** (h - l) * history[l] for l in range(h))
    return first + _second_sum(ctx, wd, h)


def mk2_recursion(ctx: CodeContext, wd: WeightDistribution, h: int, history: list[int]) -> int:
    """MK_2^h from MK_2^0..MK_2^(h-1) and C_0..C_min(N,h).

    history[l] = MK_2^l; history[0] = q - 1.
    """
    q = ctx.params.q
    return _recursion(q**3 - 2 * q * q - q + 1, ctx, wd, h, history)


def mk_even_recursion(ctx: CodeContext, wd: WeightDistribution, h: int, history: list[int]) -> int:
    """MK^(2h) from MK^0, MK^2, ..., MK^(2h-2) and the weight distribution.

    history[l] = MK^(2l); history[0] = q - 1.
    """
    q = ctx.params.q
    return _recursion(q**3 - 2 * q * q + 1, ctx, wd, h, history)


def generate_moments(ctx: CodeContext, wd: WeightDistribution, h_max: int,
                     kind: str = "mk2") -> list[int]:
    """Run a recursion on its own output: [M^0, M^1, ..., M^h_max]."""
    step = {"mk2": mk2_recursion, "mk_even": mk_even_recursion}[kind]
    seq = [ctx.params.q - 1]
    for h in range(1, h_max + 1):
        seq.append(step(ctx, wd, h, seq))
    return seq


def even_moments_from_mk2(q: int, mk2: list[int]) -> list[int]:
    """MK^(2h) = sum_l C(h,l) q^(h-l) MK_2^l, since K^2 = K_2 + q."""
    return [sum(comb(h, l) * q ** (h - l) * mk2[l] for l in range(h + 1)) for h in range(len(mk2))]
