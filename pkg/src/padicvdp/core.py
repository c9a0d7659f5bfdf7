"""Fixed-precision arithmetic on p-adic integers and tuples of them.

A value of Z_p is modeled by its first N base-p digits, i.e. by a residue
mod p^N together with the count N of digits actually known. Operations
follow a "known digits" discipline: a result never claims more precision
than its inputs justify, and exact division by p consumes precision.
Norms and orders are exact (powers of p as Fractions, never floats).

Everything in this module is immutable and pure; values can be shared
freely across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "PadicError",
    "InvalidPrimeError",
    "PrimeMismatchError",
    "InexactDivisionError",
    "PrecisionExhaustedError",
    "MStarUndefinedError",
    "EnumerationBudgetError",
    "PadicInt",
    "PadicPoint",
    "from_integer",
    "from_rational",
    "initial_part",
    "m_star",
    "floor_log_p",
    "digit_length",
    "is_prime",
]


class PadicError(Exception):
    """Base class for every error raised by this package."""


class InvalidPrimeError(PadicError):
    """The digit base is not a prime number."""


class PrimeMismatchError(PadicError):
    """Two values with different primes were combined."""


class InexactDivisionError(PadicError):
    """Division by a power of p was applied to a value it does not divide."""


class PrecisionExhaustedError(PadicError):
    """Not enough known digits to carry out the operation."""


class MStarUndefinedError(PadicError):
    """Top-digit removal is only defined for indices m >= p."""


class EnumerationBudgetError(PadicError):
    """An exhaustive enumeration would exceed the configured budget."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Trial-division primality test, meant for machine-word sized n."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise InvalidPrimeError(f"not a prime: {p!r}")


def digit_length(m: int, p: int) -> int:
    """Number of base-p digits of m >= 0; zero has length 1."""
    if m < 0:
        raise ValueError(f"digit_length needs m >= 0, got {m}")
    length = 1
    while m >= p:
        m //= p
        length += 1
    return length


def floor_log_p(m: int, p: int) -> int:
    """Position of the top nonzero base-p digit of m, defined for m >= 1."""
    if m < 1:
        raise ValueError(f"floor_log_p is undefined for m = {m}")
    return digit_length(m, p) - 1


def m_star(m: int, p: int) -> int:
    """Strip the top base-p digit of m; defined only for m >= p."""
    _require_prime(p)
    if m < p:
        raise MStarUndefinedError(f"m* needs m >= p, got m={m} with p={p}")
    return m % p ** floor_log_p(m, p)


def _digits_of(value: int, p: int, count: int) -> tuple[int, ...]:
    """First `count` base-p digits of a non-negative integer, low first."""
    digits = []
    for _ in range(count):
        value, d = divmod(value, p)
        digits.append(d)
    return tuple(digits)


@dataclass(frozen=True, slots=True)
class PadicInt:
    """A p-adic integer known through its first len(digits) digits.

    digits[i] is the coefficient of p^i. Two values are equal only when
    prime, precision, and every digit agree; a value known to 3 digits is
    a different object of knowledge than one known to 4.
    """

    prime: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        _require_prime(self.prime)
        if not isinstance(self.digits, tuple):
            object.__setattr__(self, "digits", tuple(self.digits))
        if len(self.digits) < 1:
            raise PrecisionExhaustedError("a value needs at least one digit")
        for d in self.digits:
            if not isinstance(d, int) or not 0 <= d < self.prime:
                raise ValueError(f"digit {d!r} out of range for p={self.prime}")

    @property
    def precision(self) -> int:
        return len(self.digits)

    def to_integer(self) -> int:
        """The standard representative in [0, p^N)."""
        value = 0
        for d in reversed(self.digits):
            value = value * self.prime + d
        return value

    def ord(self) -> int | float:
        """Index of the first nonzero digit; math.inf when all known digits vanish."""
        for i, d in enumerate(self.digits):
            if d:
                return i
        return math.inf

    def is_zero(self) -> bool:
        """True when every known digit is zero."""
        return all(d == 0 for d in self.digits)

    def norm(self) -> Fraction:
        """Exact p-adic absolute value p^(-ord); 0 when no digit is nonzero."""
        k = self.ord()
        if k == math.inf:
            return Fraction(0)
        return Fraction(1, self.prime**k)

    def standard_seq(self, k: int) -> int:
        """Partial sum x_0 + x_1 p + ... + x_k p^k as an exact integer."""
        if not 0 <= k < self.precision:
            raise PrecisionExhaustedError(
                f"standard sequence index {k} outside known precision {self.precision}"
            )
        value = 0
        for d in reversed(self.digits[: k + 1]):
            value = value * self.prime + d
        return value

    def divisible_by_p_power(self, e: int) -> bool:
        """Whether the first e known digits are all zero."""
        return all(d == 0 for d in self.digits[: min(e, self.precision)])

    def exact_div_p(self, e: int) -> PadicInt:
        """Divide by p^e exactly; shifts digits down and costs e digits of precision."""
        if e < 0:
            raise ValueError(f"exponent must be >= 0, got {e}")
        if e == 0:
            return self
        for d in self.digits[: min(e, self.precision)]:
            if d:
                raise InexactDivisionError(
                    f"value is not divisible by p^{e} (p={self.prime})"
                )
        if self.precision - e < 1:
            raise PrecisionExhaustedError(
                f"dividing by p^{e} leaves no known digits (precision {self.precision})"
            )
        return PadicInt(self.prime, self.digits[e:])

    def mul_pow_p(self, e: int) -> PadicInt:
        """Multiply by p^e; shifts digits up, gaining e digits of precision."""
        if e < 0:
            raise ValueError(f"exponent must be >= 0, got {e}")
        if e == 0:
            return self
        return PadicInt(self.prime, (0,) * e + self.digits)

    def truncate(self, n: int) -> PadicInt:
        """Forget digits beyond the first n."""
        if not 1 <= n <= self.precision:
            raise PrecisionExhaustedError(
                f"cannot truncate precision {self.precision} to {n}"
            )
        return PadicInt(self.prime, self.digits[:n])

    def _binop_precision(self, other: PadicInt) -> int:
        if not isinstance(other, PadicInt):
            raise TypeError(f"expected PadicInt, got {type(other).__name__}")
        if self.prime != other.prime:
            raise PrimeMismatchError(f"prime mismatch: {self.prime} vs {other.prime}")
        return min(self.precision, other.precision)

    def __add__(self, other: PadicInt) -> PadicInt:
        n = self._binop_precision(other)
        return _from_residue(self.to_integer() + other.to_integer(), self.prime, n)

    def __sub__(self, other: PadicInt) -> PadicInt:
        n = self._binop_precision(other)
        return _from_residue(self.to_integer() - other.to_integer(), self.prime, n)

    def __mul__(self, other: PadicInt) -> PadicInt:
        n = self._binop_precision(other)
        return _from_residue(self.to_integer() * other.to_integer(), self.prime, n)

    def __neg__(self) -> PadicInt:
        return _from_residue(-self.to_integer(), self.prime, self.precision)

    def __str__(self) -> str:
        body = " ".join(str(d) for d in self.digits)
        return f"{body} | p={self.prime} N={self.precision}"

    def to_json(self) -> dict:
        return {
            "p": self.prime,
            "precision": self.precision,
            "digits": list(self.digits),
        }

    @classmethod
    def from_json(cls, data: dict) -> PadicInt:
        digits = tuple(data["digits"])
        if len(digits) != data.get("precision", len(digits)):
            raise ValueError("digit count does not match declared precision")
        return cls(data["p"], digits)


def _from_residue(value: int, p: int, precision: int) -> PadicInt:
    """PadicInt for value mod p^precision."""
    return PadicInt(p, _digits_of(value % p**precision, p, precision))


def from_integer(k: int, p: int, precision: int) -> PadicInt:
    """Canonical image of a non-negative integer, truncated to N digits."""
    _require_prime(p)
    if k < 0:
        raise ValueError(f"from_integer needs k >= 0, got {k}; use from_rational")
    if precision < 1:
        raise ValueError(f"precision must be >= 1, got {precision}")
    return PadicInt(p, _digits_of(k, p, precision))


def from_rational(num: int, den: int, p: int, precision: int) -> PadicInt:
    """Image of num/den mod p^N; den must be a p-adic unit."""
    _require_prime(p)
    if precision < 1:
        raise ValueError(f"precision must be >= 1, got {precision}")
    if den == 0:
        raise ZeroDivisionError("rational constant with zero denominator")
    if den % p == 0:
        raise InexactDivisionError(
            f"denominator {den} is divisible by p={p}, not a p-adic unit"
        )
    modulus = p**precision
    inv = pow(den, -1, modulus)
    return _from_residue(num * inv, p, precision)


def initial_part(m: int, x: PadicInt) -> bool:
    """Whether m occurs in x's standard sequence x^(0), x^(1), ...

    Equivalent to x lying in the ball of radius p^-(s+1) around m, where
    s+1 is the base-p digit length of m.
    """
    if m < 0:
        raise ValueError(f"initial parts are non-negative, got {m}")
    length = digit_length(m, x.prime)
    if length > x.precision:
        raise PrecisionExhaustedError(
            f"deciding initial part of {m} needs {length} digits, "
            f"value has {x.precision}"
        )
    return x.to_integer() % x.prime**length == m


@dataclass(frozen=True, slots=True)
class PadicPoint:
    """An element of Z_p^n; all coordinates share one prime and precision."""

    coords: tuple[PadicInt, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.coords, tuple):
            object.__setattr__(self, "coords", tuple(self.coords))
        if len(self.coords) < 1:
            raise ValueError("a point needs at least one coordinate")
        p = self.coords[0].prime
        n = self.coords[0].precision
        for c in self.coords:
            if c.prime != p:
                raise PrimeMismatchError("coordinates with mixed primes")
            if c.precision != n:
                raise PrecisionExhaustedError("coordinates with mixed precisions")

    @property
    def arity(self) -> int:
        return len(self.coords)

    @property
    def prime(self) -> int:
        return self.coords[0].prime

    @property
    def precision(self) -> int:
        return self.coords[0].precision

    def ord(self) -> int | float:
        return min(c.ord() for c in self.coords)

    def norm(self) -> Fraction:
        """Max of the coordinate norms (the sup norm on Z_p^n)."""
        return max(c.norm() for c in self.coords)

    def to_integers(self) -> tuple[int, ...]:
        return tuple(c.to_integer() for c in self.coords)

    @classmethod
    def from_integers(cls, values, p: int, precision: int) -> PadicPoint:
        return cls(tuple(from_integer(v, p, precision) for v in values))

    def __str__(self) -> str:
        return "(" + "; ".join(str(c) for c in self.coords) + ")"

    def to_json(self) -> dict:
        return {"coords": [c.to_json() for c in self.coords]}

    @classmethod
    def from_json(cls, data: dict) -> PadicPoint:
        return cls(tuple(PadicInt.from_json(c) for c in data["coords"]))
