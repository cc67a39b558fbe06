"""Arithmetic in the binary field GF(2^r).

Elements are plain ints in [0, q): bit i is the coefficient of x^i of the
residue polynomial.  Addition is XOR.  A FieldParams instance carries the
modulus and a few lookup tables (trace bits, inverses, discrete logs) that
the summation engines use in their inner loops; scalar helpers below never
depend on those tables except where noted.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MIN_DEGREE = 2
MAX_DEGREE = 12

# Lowest weight, then smallest integer value, per degree.
DEFAULT_MODULI = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
}


class FieldError(ValueError):
    pass


def _degree(poly: int) -> int:
    return poly.bit_length() - 1


def _polymod(a: int, b: int) -> int:
    db = _degree(b)
    while a and _degree(a) >= db:
        a ^= b << (_degree(a) - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2 over GF(2)."""
    d = _degree(poly)
    if d < 1:
        return False
    for f in range(2, 1 << (d // 2 + 1)):
        if _polymod(poly, f) == 0:
            return False
    return True


def clmul_reduce(x: int, y: int, modulus: int, r: int) -> int:
    """Carry-less product of x and y reduced modulo `modulus` (degree r)."""
    result = 0
    while y:
        if y & 1:
            result ^= x
        y >>= 1
        x <<= 1
        if x >> r & 1:
            x ^= modulus
    return result


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


class FieldParams:
    """GF(2^r) defined by an irreducible modulus.

    Immutable after construction.  Use :func:`make_field` to get a cached
    instance.

    Attributes
    ----------
    r, q, modulus
        Degree, order and defining polynomial (bitmask).
    trace_table
        ``trace_table[x]`` is tr(x) in {0, 1}, built from :meth:`trace_slow`.
    char_table
        ``char_table[x]`` is the canonical character value (-1)^tr(x).
    inv_table
        ``inv_table[x]`` for x != 0; entry 0 is 0 and meaningless.
    exp_table, log_table
        Discrete log tables for a primitive element ``generator``;
        ``exp_table`` has length q - 1, ``log_table[0]`` is -1.
    """

    def __init__(self, r: int, modulus: int | None = None):
        if not isinstance(r, int) or r < MIN_DEGREE or r > MAX_DEGREE:
            raise FieldError(f"field degree must be in [{MIN_DEGREE}, {MAX_DEGREE}], got {r!r}")
        if modulus is None:
            modulus = DEFAULT_MODULI[r]
        if _degree(modulus) != r:
            raise FieldError(f"modulus {modulus:#x} does not have degree {r}")
        if not is_irreducible(modulus):
            raise FieldError(f"modulus {modulus:#x} is reducible over GF(2)")
        self.r = r
        self.q = 1 << r
        self.modulus = modulus
        self._build_tables()

    def __repr__(self) -> str:
        return f"FieldParams(r={self.r}, modulus={self.modulus:#x})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldParams):
            return NotImplemented
        return (self.r, self.modulus) == (other.r, other.modulus)

    def __hash__(self) -> int:
        return hash((self.r, self.modulus))

    def _build_tables(self) -> None:
        q = self.q
        self.generator = self._find_generator()
        exp = np.empty(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            exp[k] = x
            log[x] = k
            x = self.mul(x, self.generator)
        assert x == 1
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(-log[1:]) % (q - 1)]
        tr = np.array([self.trace_slow(v) for v in range(q)], dtype=np.int64)
        self.exp_table = exp
        self.log_table = log
        self.inv_table = inv
        self.trace_table = tr
        self.char_table = 1 - 2 * tr
        for arr in (exp, log, inv, tr, self.char_table):
            arr.flags.writeable = False

    def _find_generator(self) -> int:
        order = self.q - 1
        factors = _prime_factors(order)
        for g in range(2, self.q):
            if all(self.pow(g, order // p) != 1 for p in factors):
                return g
        return 1  # q - 1 == 1 never happens for r >= 2

    def check(self, x: int) -> None:
        if not 0 <= x < self.q:
            raise FieldError(f"{x!r} is not an element of GF({self.q})")

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    def mul(self, x: int, y: int) -> int:
        return clmul_reduce(x, y, self.modulus, self.r)

    def pow(self, x: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def trace_slow(self, x: int) -> int:
        """tr(x) = x + x^2 + ... + x^(2^(r-1)), by r-1 squarings."""
        total = x
        y = x
        for _ in range(self.r - 1):
            y = self.mul(y, y)
            total ^= y
        assert total in (0, 1), total
        return total

    def mul_array(self, x, y) -> np.ndarray:
        """Elementwise product of integer arrays via the log tables."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        zero = (x == 0) | (y == 0)
        idx = (self.log_table[x] + self.log_table[y]) % (self.q - 1)
        return np.where(zero, 0, self.exp_table[idx])

    def scale_array(self, a: int, x) -> np.ndarray:
        """a * x elementwise for a scalar a, via a lookup row."""
        row = self.mul_array(a, np.arange(self.q))
        return row[np.asarray(x)]


@lru_cache(maxsize=None)
def make_field(r: int, modulus: int | None = None) -> FieldParams:
    return FieldParams(r, modulus)


def fmul(p: FieldParams, x: int, y: int) -> int:
    p.check(x)
    p.check(y)
    return p.mul(x, y)


def finv(p: FieldParams, x: int) -> int:
    p.check(x)
    if x == 0:
        raise ZeroDivisionError("0 has no inverse in a field")
    return int(p.inv_table[x])


def trace(p: FieldParams, x: int) -> int:
    p.check(x)
    return p.trace_slow(x)


def canon_char(p: FieldParams, x: int) -> int:
    """The canonical additive character (-1)^tr(x)."""
    return -1 if trace(p, x) else 1


def field_table_rows(p: FieldParams):
    """Yield (value, inverse, trace, character) for every element.

    The inverse of 0 is reported as None.
    """
    for x in p.elements():
        inv = finv(p, x) if x else None
        t = trace(p, x)
        yield x, inv, t, 1 - 2 * t
