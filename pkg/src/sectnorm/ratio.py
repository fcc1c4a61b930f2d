"""Exact rational arithmetic backend.

All norm computations are exact; coefficients are arbitrary-precision
rationals.  gmpy2's mpq is used when available (noticeably faster on the
big coefficient blow-ups produced by spectral powering), with
fractions.Fraction as the drop-in fallback.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as Rat

    RAT_BACKEND = "gmpy2"
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Rat = Fraction
    RAT_BACKEND = "fractions"

RAT_ZERO = Rat(0)
RAT_ONE = Rat(1)


def rat(value):
    """Coerce ints, Fractions, mpqs or 'num/den' strings to the backend type."""
    if isinstance(value, str):
        return Rat(Fraction(value))
    return Rat(value)


def rat_str(value) -> str:
    """Render a rational as 'num' or 'num/den' (canonical, reduced)."""
    f = Fraction(value.numerator, value.denominator)
    return str(f)
