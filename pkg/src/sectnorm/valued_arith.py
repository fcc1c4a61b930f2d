"""Exact arithmetic in (Q, p-adic absolute value) and in the ordered value group.

Norm values never touch floating point.  A norm is represented by a
GammaValue g, meaning norm = p**(-g.primary) times an infinitesimal
perturbation factor; comparisons of norms are therefore *reversed*
comparisons of GammaValues.  The perturbation coordinates are formal
symbols, Q-linearly independent from log p and from each other, ordered
lexicographically after the primary coordinate.
"""

import math

from .ratio import rat, rat_str

INF = math.inf

try:
    from gmpy2 import remove as _gmp_remove
except ImportError:  # pragma: no cover
    _gmp_remove = None


class ArityMismatch(ValueError):
    """Raised when GammaValues of different perturbation arity are combined."""


class NotPrimeError(ValueError):
    pass


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    # deterministic Miller-Rabin, valid far beyond any prime used here
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Prime:
    """A verified prime p, fixing the absolute value |x| = p**(-v_p(x)) on Q."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not _is_prime(p):
            raise NotPrimeError(f"{p} is not prime")
        self.p = p

    def __repr__(self):
        return f"Prime({self.p})"

    def __eq__(self, other):
        return isinstance(other, Prime) and self.p == other.p

    def __hash__(self):
        return hash(("Prime", self.p))


def _int_valuation(n: int, p: int) -> int:
    if _gmp_remove is not None:
        _, v = _gmp_remove(n, p)
        return int(v)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(a, p: Prime):
    """v_p(a) for a rational a; +inf iff a == 0."""
    a = rat(a)
    if a == 0:
        return INF
    return _int_valuation(int(a.numerator), p.p) - _int_valuation(
        int(a.denominator), p.p
    )


class GammaValue:
    """Element of the lexicographically ordered value group.

    primary is the coefficient of log p (norm = p**(-primary) up to
    perturbation); pert holds the coefficients of the infinitesimal
    perturbation symbols.  Addition is componentwise and the lex order is
    translation invariant.
    """

    __slots__ = ("primary", "pert")

    def __init__(self, primary, pert=()):
        self.primary = rat(primary)
        self.pert = tuple(rat(x) for x in pert)

    @property
    def arity(self) -> int:
        return len(self.pert)

    @staticmethod
    def zero(arity: int = 0) -> "GammaValue":
        return GammaValue(0, (0,) * arity)

    def _key(self):
        return (self.primary,) + self.pert

    def _check(self, other: "GammaValue"):
        if self.arity != other.arity:
            raise ArityMismatch(
                f"perturbation arity {self.arity} != {other.arity}"
            )

    def __eq__(self, other):
        if not isinstance(other, GammaValue):
            return NotImplemented
        self._check(other)
        return self._key() == other._key()

    def __lt__(self, other):
        self._check(other)
        return self._key() < other._key()

    def __le__(self, other):
        self._check(other)
        return self._key() <= other._key()

    def __gt__(self, other):
        return not self.__le__(other)

    def __ge__(self, other):
        return not self.__lt__(other)

    def __hash__(self):
        return hash(self._key())

    def __add__(self, other):
        self._check(other)
        return GammaValue(
            self.primary + other.primary,
            tuple(a + b for a, b in zip(self.pert, other.pert)),
        )

    def __sub__(self, other):
        self._check(other)
        return GammaValue(
            self.primary - other.primary,
            tuple(a - b for a, b in zip(self.pert, other.pert)),
        )

    def __neg__(self):
        return GammaValue(-self.primary, tuple(-x for x in self.pert))

    def shift(self, v) -> "GammaValue":
        """Add a rational to the primary coordinate (coefficient valuations)."""
        return GammaValue(self.primary + rat(v), self.pert)

    def scale(self, c) -> "GammaValue":
        """Multiply all coordinates by an exact rational scalar."""
        c = rat(c)
        return GammaValue(self.primary * c, tuple(x * c for x in self.pert))

    def __abs__(self):
        return -self if self._key() < GammaValue.zero(self.arity)._key() else self

    def project_primary(self) -> "GammaValue":
        """Monotone projection killing the perturbation coordinates."""
        return GammaValue(self.primary)

    def __repr__(self):
        if self.pert:
            return f"GammaValue({rat_str(self.primary)}; {', '.join(rat_str(x) for x in self.pert)})"
        return f"GammaValue({rat_str(self.primary)})"


def gamma_compare(x: GammaValue, y: GammaValue) -> int:
    """Total lexicographic order: -1, 0 or 1.  Reversed order of norms."""
    x._check(y)
    kx, ky = x._key(), y._key()
    return -1 if kx < ky else (0 if kx == ky else 1)


# Norm-scale helpers.  A value of None stands for the zero norm (the bottom
# of the norm order, the top of the valuation order).


def norm_max(*values):
    """Largest norm among GammaValues/None = smallest value; None if all None."""
    best = None
    for v in values:
        if v is None:
            continue
        if best is None or v < best:
            best = v
    return best


def norm_min(*values):
    """Smallest norm among GammaValues (None = zero norm wins immediately)."""
    best = None
    for v in values:
        if v is None:
            return None
        if best is None or v > best:
            best = v
    return best


def q_independent(values) -> bool:
    """Whether the perturbation vectors are Q-linearly independent.

    The primary coordinates live in the value group of k and are quotiented
    away; independence is decided by exact rational elimination on the
    perturbation coordinates alone.
    """
    rows = [list(v.pert) for v in values]
    if not rows:
        return True
    arity = len(rows[0])
    if any(len(r) != arity for r in rows):
        raise ArityMismatch("mixed perturbation arity")
    rank = 0
    for col in range(arity):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank == len(rows)


def gamma_to_json(g: GammaValue):
    """JSON form: [primary, [pert...]] with 'num/den' strings."""
    return [rat_str(g.primary), [rat_str(x) for x in g.pert]]


def gamma_from_json(obj) -> GammaValue:
    if isinstance(obj, (str, int)):
        return GammaValue(rat(obj))
    primary, pert = obj
    return GammaValue(rat(primary), tuple(rat(x) for x in pert))
