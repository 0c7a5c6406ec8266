"""
Exact p-adic plumbing shared by every other module.

Rationals are ``fractions.Fraction`` values (always reduced, positive
denominator). Valuations are read as :class:`ValueV`, which distinguishes an
exact reading from the infinite valuation of zero and from a lower bound
imposed by a precision cutoff.
"""

import math
from collections import Counter
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from typing import TypeAlias

from sympy import isprime, multiplicity
from sympy.ntheory.digits import digits

from .enums import ValueKind
from .exceptions import ConfigurationError

Rational: TypeAlias = Fraction
IndexVector: TypeAlias = tuple[int, ...]


@dataclass(frozen=True)
class Params:
    """The prime p together with q = p**2, the residue cardinality of Q_{p^2}."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise ConfigurationError(f"p={self.p} is not a prime.")
        if self.q != self.p * self.p:
            raise ConfigurationError(f"q={self.q} must equal p**2={self.p * self.p}.")

    @classmethod
    def for_prime(cls, p: int) -> "Params":
        return cls(p=p, q=p * p)

    @property
    def omega_valuation(self) -> Fraction:
        """val_p of the period: 1/(p-1) - 1/(q-1) = p/(q-1)."""
        return Fraction(self.p, self.q - 1)


@dataclass(frozen=True)
class ValueV:
    """A p-adic valuation reading: exact, infinite (zero) or bounded below by a cutoff."""

    kind: ValueKind
    value: Fraction | None = None

    @classmethod
    def finite(cls, value: Fraction | int) -> "ValueV":
        return cls(ValueKind.FINITE, Fraction(value))

    @classmethod
    def infinite(cls) -> "ValueV":
        return cls(ValueKind.INFINITE)

    @classmethod
    def bounded_below(cls, cutoff: Fraction | int) -> "ValueV":
        return cls(ValueKind.BOUNDED_BELOW, Fraction(cutoff))

    @property
    def is_exact(self) -> bool:
        return self.kind is ValueKind.FINITE

    def __add__(self, other: "ValueV") -> "ValueV":
        if ValueKind.INFINITE in (self.kind, other.kind):
            return ValueV.infinite()
        assert self.value is not None and other.value is not None
        total = self.value + other.value
        if self.kind is ValueKind.FINITE and other.kind is ValueKind.FINITE:
            return ValueV.finite(total)
        return ValueV.bounded_below(total)

    def shifted(self, amount: Fraction | int) -> "ValueV":
        """Reading of the same element multiplied by something of valuation ``amount``."""
        if self.kind is ValueKind.INFINITE:
            return self
        assert self.value is not None
        return ValueV(self.kind, self.value + amount)

    def capped(self, cutoff: Fraction) -> "ValueV":
        """Demote readings at or above ``cutoff`` to a lower bound at ``cutoff``."""
        if self.kind is ValueKind.FINITE and self.value is not None and self.value < cutoff:
            return self
        if self.kind is ValueKind.BOUNDED_BELOW and self.value is not None:
            return ValueV.bounded_below(min(self.value, cutoff))
        return ValueV.bounded_below(cutoff)

    def greater_than(self, threshold: Fraction | int) -> bool | None:
        """Decide ``val > threshold``; None when a lower bound cannot decide it."""
        match self.kind:
            case ValueKind.INFINITE:
                return True
            case ValueKind.FINITE:
                assert self.value is not None
                return self.value > threshold
            case _:
                assert self.value is not None
                return True if self.value > threshold else None

    def at_least(self, threshold: Fraction | int) -> bool | None:
        """Decide ``val >= threshold``; None when a lower bound cannot decide it."""
        match self.kind:
            case ValueKind.INFINITE:
                return True
            case ValueKind.FINITE:
                assert self.value is not None
                return self.value >= threshold
            case _:
                assert self.value is not None
                return True if self.value >= threshold else None

    def equals(self, expected: Fraction | int) -> bool | None:
        """Decide ``val == expected``; None when a lower bound cannot decide it."""
        match self.kind:
            case ValueKind.INFINITE:
                return False
            case ValueKind.FINITE:
                return self.value == expected
            case _:
                assert self.value is not None
                return False if self.value > expected else None

    def __str__(self) -> str:
        match self.kind:
            case ValueKind.INFINITE:
                return "inf"
            case ValueKind.FINITE:
                assert self.value is not None
                return format_rational(self.value)
            case _:
                assert self.value is not None
                return f">={format_rational(self.value)}"


def format_rational(x: Fraction | int) -> str:
    """Serialize a rational as a ``num/den`` string (integers keep ``/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


def val_p_rat(x: Fraction | int, p: int) -> ValueV:
    """Exact p-adic valuation of a rational number; infinite for zero."""
    x = Fraction(x)
    if x == 0:
        return ValueV.infinite()
    return ValueV.finite(
        multiplicity(p, abs(x.numerator)) - multiplicity(p, x.denominator)
    )


def val_p_int(x: Fraction | int, p: int) -> int:
    """Valuation of a nonzero rational as a plain integer."""
    value = val_p_rat(x, p)
    if not value.is_exact:
        raise ValueError("val_p_int() requires a nonzero argument.")
    assert value.value is not None
    return int(value.value)


def digits_p(n: int, p: int) -> list[int]:
    """Little-endian base-p digits of n; ``[0]`` for n = 0."""
    if n < 0:
        raise ValueError(f"digits_p() requires n >= 0, got {n}.")
    return digits(n, p)[1:][::-1]


def sp_digit_sum(n: int, p: int) -> int:
    return sum(digits_p(n, p))


def val_factorial(n: int, p: int) -> int:
    """val_p(n!) by Legendre's formula (n - s_p(n)) / (p - 1)."""
    return (n - sp_digit_sum(n, p)) // (p - 1)


def binom_mod_p(n: int, k: int, p: int) -> int:
    """Binomial coefficient modulo p by Lucas' theorem."""
    if not 0 <= k <= n:
        raise ValueError(f"binom_mod_p() requires 0 <= k <= n, got n={n}, k={k}.")
    n_digits = digits_p(n, p)
    k_digits = digits_p(k, p) + [0] * len(n_digits)
    residue = 1
    for n_i, k_i in zip(n_digits, k_digits):
        residue = residue * math.comb(n_i, k_i) % p
    return residue


def is_power_of_p(k: int, p: int) -> bool:
    if k < 1:
        return False
    while k % p == 0:
        k //= p
    return k == 1


def orbit_size(k: IndexVector) -> int:
    """Size of the orbit of ``k`` under permutation of its entries."""
    size = math.factorial(len(k))
    for multiplicity_ in Counter(k).values():
        size //= math.factorial(multiplicity_)
    return size


def enumerate_reps(total: int, parts: int) -> Iterator[IndexVector]:
    """
    One representative per orbit of ``parts``-tuples of naturals summing to ``total``.

    Representatives are non-increasing and emitted in lexicographically
    decreasing order, e.g. ``(4, 0), (3, 1), (2, 2)`` for total 4 and 2 parts.
    """
    if total < 0 or parts < 1:
        raise ValueError("enumerate_reps() requires total >= 0 and parts >= 1.")

    def _reps(remaining: int, slots: int, ceiling: int) -> Iterator[IndexVector]:
        if slots == 1:
            if remaining <= ceiling:
                yield (remaining,)
            return
        lowest = -(-remaining // slots)
        for head in range(min(remaining, ceiling), lowest - 1, -1):
            for tail in _reps(remaining - head, slots - 1, head):
                yield (head, *tail)

    yield from _reps(total, parts, total)
