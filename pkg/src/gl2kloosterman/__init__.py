"""Kloosterman sums over GF(2^r) and GL(2,q), the binary code C(GL(2,q)),
its weight distribution, and recursive power-moment formulas.

Everything is exact integer arithmetic.
"""

from gl2kloosterman.field import FieldParams, make_field

__all__ = ["FieldParams", "make_field"]
__version__ = "0.1.0"
