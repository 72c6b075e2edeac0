"""Arithmetic in the prime field F_q and q-combinatorial counting functions.

Counting functions (`gl_order`, `pgl_order`, `gaussian_binomial`) return
Python ints, so they are arbitrary precision by construction.  Extension
fields are intentionally not supported: q must be prime.
"""

from __future__ import annotations

from .errors import InvalidInputError

_PRIME_CACHE: dict[int, bool] = {}


def is_prime(n: int) -> bool:
    """Trial-division primality test, cached (q stays small in practice)."""
    if n in _PRIME_CACHE:
        return _PRIME_CACHE[n]
    if n < 2:
        result = False
    else:
        result = all(n % k for k in range(2, int(n**0.5) + 1))
    _PRIME_CACHE[n] = result
    return result


def check_prime(q: int) -> int:
    if not isinstance(q, int) or not is_prime(q):
        raise InvalidInputError(f"q must be a prime integer, got {q!r}")
    return q


class FqElem:
    """An element of the prime field F_q, stored as a reduced residue.

    Immutable; arithmetic operators are overloaded and require matching
    moduli.  Division by zero raises ZeroDivisionError.
    """

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        check_prime(modulus)
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "value", value % modulus)

    def __setattr__(self, name, value):
        raise AttributeError("FqElem is immutable")

    def _coerce(self, other) -> "FqElem":
        if isinstance(other, FqElem):
            if other.modulus != self.modulus:
                raise InvalidInputError("mixed moduli in F_q arithmetic")
            return other
        if isinstance(other, int):
            return FqElem(other, self.modulus)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FqElem(self.value + other.value, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return FqElem(-self.value, self.modulus)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FqElem(self.value - other.value, self.modulus)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FqElem(self.value * other.value, self.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "FqElem":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_q")
        return FqElem(pow(self.value, self.modulus - 2, self.modulus), self.modulus)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.modulus
        return (
            isinstance(other, FqElem)
            and self.modulus == other.modulus
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FqElem({self.value}, q={self.modulus})"


def inv_mod(a: int, q: int) -> int:
    """Inverse of a nonzero residue mod prime q (internal int fast path)."""
    a %= q
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in F_q")
    return pow(a, q - 2, q)


def gl_order(m: int, q: int) -> int:
    """Order of GL_m(F_q): prod_{i=0}^{m-1} (q^m - q^i)."""
    check_prime(q)
    if not isinstance(m, int) or m < 1:
        raise InvalidInputError(f"matrix size must be a positive integer, got {m!r}")
    qm = q**m
    order = 1
    for i in range(m):
        order *= qm - q**i
    return order


def pgl_order(d: int, q: int) -> int:
    """Order of PGL_d(F_q) = |GL_d(F_q)| / (q - 1)."""
    if not isinstance(d, int) or d < 2:
        raise InvalidInputError(f"d must be an integer >= 2, got {d!r}")
    return gl_order(d, q) // (q - 1)


def gaussian_binomial(d: int, k: int, q: int) -> int:
    """q-binomial coefficient [d choose k]_q.

    Counts k-dimensional (equivalently codimension-k) subspaces of F_q^d.
    """
    check_prime(q)
    if not isinstance(d, int) or d < 1:
        raise InvalidInputError(f"d must be a positive integer, got {d!r}")
    if not isinstance(k, int) or k < 0 or k > d:
        raise InvalidInputError(f"k must lie in [0, {d}], got {k!r}")
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (d - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
