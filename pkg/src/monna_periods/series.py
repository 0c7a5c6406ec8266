"""
Truncated power series in Z over an abstract coefficient ring, and sparse
polynomials in the formal variable Y.

A :class:`ZSeries` is exact modulo ``Z**cap``; every operation returns a result
whose cap is the minimum of the caps of its inputs. Coefficients only need the
arithmetic operators, truthiness for "is zero", and (for ``series_exp``)
division by a Python integer.
"""

import logging
import math
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Generic, TypeVar

from .exceptions import SeriesDomainError
from .padic_core import format_rational

logger = logging.getLogger(__name__)

C = TypeVar("C")


class YPoly:
    """Sparse polynomial in Y with rational coefficients; zero coefficients are never stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Fraction | int] | None = None) -> None:
        cleaned: dict[int, Fraction] = {}
        for exponent, coefficient in (terms or {}).items():
            if exponent < 0:
                raise ValueError(f"Negative Y-exponent {exponent}.")
            if coefficient:
                cleaned[exponent] = Fraction(coefficient)
        self._terms = cleaned

    @classmethod
    def zero(cls) -> "YPoly":
        return cls()

    @classmethod
    def one(cls) -> "YPoly":
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent: int, coefficient: Fraction | int = 1) -> "YPoly":
        return cls({exponent: coefficient})

    @property
    def degree(self) -> int:
        return max(self._terms, default=-1)

    def items(self) -> list[tuple[int, Fraction]]:
        """Terms sorted by increasing Y-exponent."""
        return sorted(self._terms.items())

    def coefficient(self, exponent: int) -> Fraction:
        return self._terms.get(exponent, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, YPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == YPoly({0: other})._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __neg__(self) -> "YPoly":
        return YPoly({j: -c for j, c in self._terms.items()})

    def __add__(self, other: "YPoly | Fraction | int") -> "YPoly":
        other = _as_ypoly(other)
        terms = dict(self._terms)
        for j, c in other._terms.items():
            terms[j] = terms.get(j, 0) + c
        return YPoly(terms)

    __radd__ = __add__

    def __sub__(self, other: "YPoly | Fraction | int") -> "YPoly":
        return self + (-_as_ypoly(other))

    def __rsub__(self, other: "YPoly | Fraction | int") -> "YPoly":
        return _as_ypoly(other) - self

    def __mul__(self, other: "YPoly | Fraction | int") -> "YPoly":
        if isinstance(other, (int, Fraction)):
            return YPoly({j: c * other for j, c in self._terms.items()})
        if not isinstance(other, YPoly):
            return NotImplemented
        terms: dict[int, Fraction] = {}
        for i, a in self._terms.items():
            for j, b in other._terms.items():
                terms[i + j] = terms.get(i + j, 0) + a * b
        return YPoly(terms)

    __rmul__ = __mul__

    def __truediv__(self, other: Fraction | int) -> "YPoly":
        return YPoly({j: c / other for j, c in self._terms.items()})

    def derivative(self) -> "YPoly":
        return YPoly({j - 1: j * c for j, c in self._terms.items() if j})

    def to_json(self) -> dict[str, str]:
        return {str(j): format_rational(c) for j, c in self.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "YPoly":
        return cls({int(j): Fraction(c) for j, c in data.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exponent, coefficient in sorted(self._terms.items(), reverse=True):
            sign = "-" if coefficient < 0 else "+"
            magnitude = abs(coefficient)
            if exponent == 0:
                body = str(magnitude)
            else:
                power = "Y" if exponent == 1 else f"Y^{exponent}"
                body = power if magnitude.numerator == 1 else f"{magnitude.numerator}*{power}"
                if magnitude.denominator != 1:
                    body = f"{body}/{magnitude.denominator}"
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        text = first_body if first_sign == "+" else f"-{first_body}"
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"YPoly({self})"


def _as_ypoly(value: "YPoly | Fraction | int") -> YPoly:
    if isinstance(value, YPoly):
        return value
    return YPoly({0: value})


@dataclass(frozen=True)
class CoefficientRing(Generic[C]):
    """The operations a coefficient ring has to supply beyond the arithmetic operators."""

    name: str
    zero: Callable[[], C]
    one: Callable[[], C]
    inverse: Callable[[C], C] | None = None


def _ypoly_inverse(value: YPoly) -> YPoly:
    if value.degree != 0:
        raise SeriesDomainError(f"{value} is not a unit in Q[Y].")
    return YPoly({0: 1 / value.coefficient(0)})


RATIONALS: CoefficientRing[Fraction] = CoefficientRing(
    "rational", lambda: Fraction(0), lambda: Fraction(1), lambda x: 1 / x
)
YPOLYS: CoefficientRing[YPoly] = CoefficientRing(
    "ypoly", YPoly.zero, YPoly.one, _ypoly_inverse
)


class ZSeries(Generic[C]):
    """Dense power series c_0 + c_1 Z + ... known exactly modulo Z**cap."""

    __slots__ = ("cap", "coefficients", "ring")

    def __init__(
        self, coefficients: Iterable[C], cap: int, ring: CoefficientRing[C]
    ) -> None:
        if cap < 0:
            raise ValueError(f"Series cap must be non-negative, got {cap}.")
        values = list(coefficients)[:cap]
        values.extend(ring.zero() for _ in range(cap - len(values)))
        self.cap = cap
        self.coefficients = values
        self.ring = ring

    @classmethod
    def from_terms(
        cls, terms: Mapping[int, C], cap: int, ring: CoefficientRing[C]
    ) -> "ZSeries[C]":
        values = [ring.zero() for _ in range(cap)]
        for n, coefficient in terms.items():
            if n < cap:
                values[n] = coefficient
        return cls(values, cap, ring)

    @classmethod
    def variable(cls, cap: int, ring: CoefficientRing[C]) -> "ZSeries[C]":
        return cls.from_terms({1: ring.one()}, cap, ring)

    @classmethod
    def constant(cls, value: C, cap: int, ring: CoefficientRing[C]) -> "ZSeries[C]":
        return cls.from_terms({0: value}, cap, ring)

    def __getitem__(self, n: int) -> C:
        if not 0 <= n < self.cap:
            raise IndexError(f"Coefficient Z^{n} is not known modulo Z^{self.cap}.")
        return self.coefficients[n]

    def nonzero(self) -> Iterator[tuple[int, C]]:
        return ((n, c) for n, c in enumerate(self.coefficients) if c)

    @property
    def order(self) -> int:
        """Index of the first nonzero coefficient; ``cap`` for the zero series."""
        return next((n for n, _ in self.nonzero()), self.cap)

    def truncate(self, cap: int) -> "ZSeries[C]":
        return ZSeries(self.coefficients, min(cap, self.cap), self.ring)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZSeries):
            return NotImplemented
        return self.cap == other.cap and all(
            a == b for a, b in zip(self.coefficients, other.coefficients)
        )

    def __hash__(self) -> int:
        return hash((self.cap, tuple(map(str, self.coefficients))))

    def __neg__(self) -> "ZSeries[C]":
        return ZSeries((-c for c in self.coefficients), self.cap, self.ring)

    def __add__(self, other: "ZSeries[Any]") -> "ZSeries[C]":
        cap = min(self.cap, other.cap)
        return ZSeries(
            (a + b for a, b in zip(self.coefficients[:cap], other.coefficients[:cap])),
            cap,
            self.ring,
        )

    def __sub__(self, other: "ZSeries[Any]") -> "ZSeries[C]":
        return self + (-other)

    def __mul__(self, other: "ZSeries[Any]") -> "ZSeries[C]":
        return series_mul(self, other)

    def scale(self, factor: Any) -> "ZSeries[C]":
        """Multiply every coefficient by ``factor`` (on the left)."""
        return ZSeries((factor * c for c in self.coefficients), self.cap, self.ring)

    def derivative(self) -> "ZSeries[C]":
        """d/dZ; the result is exact modulo Z**(cap-1)."""
        return ZSeries(
            (n * c for n, c in enumerate(self.coefficients) if n), max(self.cap - 1, 0), self.ring
        )

    def map(self, func: Callable[[C], Any], ring: CoefficientRing[Any]) -> "ZSeries[Any]":
        return ZSeries((func(c) for c in self.coefficients), self.cap, ring)

    def __repr__(self) -> str:
        shown = ", ".join(f"{n}: {c}" for n, c in self.nonzero())
        return f"ZSeries({{{shown}}}, cap={self.cap}, ring={self.ring.name})"


def series_mul(a: ZSeries[C], b: ZSeries[Any]) -> ZSeries[C]:
    """Cauchy product modulo Z**min(caps); zero coefficients are skipped."""
    cap = min(a.cap, b.cap)
    result = [a.ring.zero() for _ in range(cap)]
    right = [(j, c) for j, c in b.nonzero() if j < cap]
    for i, left in a.nonzero():
        if i >= cap:
            break
        for j, coefficient in right:
            if i + j >= cap:
                break
            result[i + j] = result[i + j] + left * coefficient
    return ZSeries(result, cap, a.ring)


def series_pow(f: ZSeries[C], n: int) -> ZSeries[C]:
    """f**n by repeated squaring."""
    if n < 0:
        raise SeriesDomainError(f"Negative power {n} of a series.")
    result = ZSeries.constant(f.ring.one(), f.cap, f.ring)
    base = f
    while n:
        if n & 1:
            result = series_mul(result, base)
        n >>= 1
        if n:
            base = series_mul(base, base)
    return result


def series_compose(f: ZSeries[C], g: ZSeries[Any]) -> ZSeries[C]:
    """
    f(g(Z)) modulo Z**min(caps); g must have zero constant term.

    Sparse f (few nonzero coefficients compared to its length) is summed from
    powers of g; dense f goes through Horner's scheme.
    """
    if g.cap and g[0]:
        raise SeriesDomainError("Cannot compose with a series that has a nonzero constant term.")
    cap = min(f.cap, g.cap)
    terms = [(k, c) for k, c in f.nonzero() if k < cap]
    if not terms:
        return ZSeries([], cap, f.ring)
    g = g.truncate(cap)
    top = terms[-1][0]
    if len(terms) * max(top.bit_length(), 1) < top:
        result = [f.ring.zero() for _ in range(cap)]
        for k, coefficient in terms:
            for n, value in series_pow(g, k).nonzero():
                result[n] = result[n] + coefficient * value
        return ZSeries(result, cap, f.ring)

    result_series = ZSeries.constant(f[top], cap, f.ring)
    for k in range(top - 1, -1, -1):
        result_series = series_mul(result_series, g)
        if f[k]:
            result_series.coefficients[0] = result_series.coefficients[0] + f[k]
    return result_series


def series_inverse(f: ZSeries[C]) -> ZSeries[C]:
    """Multiplicative inverse of a series whose constant term is a unit of the ring."""
    if f.ring.inverse is None:
        raise SeriesDomainError(f"Ring {f.ring.name} does not provide inverses.")
    if not f.cap:
        return f
    try:
        head = f.ring.inverse(f[0])
    except ZeroDivisionError as e:
        raise SeriesDomainError("Constant term is not invertible.") from e
    result = [head]
    for n in range(1, f.cap):
        total = f.ring.zero()
        for i in range(1, n + 1):
            if f[i]:
                total = total + f[i] * result[n - i]
        result.append(-(head * total))
    return ZSeries(result, f.cap, f.ring)


def series_reversion(f: ZSeries[C]) -> ZSeries[C]:
    """
    Compositional inverse g of f, so that f(g(Z)) = Z = g(f(Z)) modulo Z**cap.

    Newton iteration g <- g - (f(g) - Z) / f'(g); every step doubles the number
    of correct coefficients.
    """
    if f.cap < 2:
        raise SeriesDomainError("Reversion needs at least the linear coefficient.")
    if f[0]:
        raise SeriesDomainError("Reversion needs f(0) = 0.")
    if f.ring.inverse is None or not f[1]:
        raise SeriesDomainError("Reversion needs an invertible linear coefficient.")
    try:
        linear_inverse = f.ring.inverse(f[1])
    except (ZeroDivisionError, SeriesDomainError) as e:
        raise SeriesDomainError("Reversion needs an invertible linear coefficient.") from e

    cap = f.cap
    identity = ZSeries.variable(cap, f.ring)
    g = identity.scale(linear_inverse)
    derivative = f.derivative()
    correct = 2
    while correct < cap:
        residual = series_compose(f, g) - identity
        slope = series_compose(derivative, g)
        # f' has cap-1 known coefficients; its constant term alone keeps the step exact
        slope = ZSeries(slope.coefficients, cap, f.ring)
        g = g - series_mul(residual, series_inverse(slope))
        correct *= 2
        logger.debug("Reversion: %s coefficients fixed out of %s.", min(correct, cap), cap)
    return g


def series_exp(f: ZSeries[C]) -> ZSeries[C]:
    """exp(f) for f with zero constant term, from n E_n = sum_k k f_k E_{n-k}."""
    if f.cap and f[0]:
        raise SeriesDomainError("exp() needs a series without constant term.")
    result = [f.ring.one()]
    terms = list(f.nonzero())
    for n in range(1, f.cap):
        total = f.ring.zero()
        for k, coefficient in terms:
            if k > n:
                break
            total = total + result[n - k] * (coefficient * k)
        result.append(total / n)
    return ZSeries(result, f.cap, f.ring)


def ypoly_eval(poly: YPoly, x: Any) -> Any:
    """
    Evaluate ``poly`` at ``x`` by sparse Horner steps.

    ``x`` can be any ring element supporting ``*``, ``+`` with rationals and
    ``**`` with a non-negative integer exponent.
    """
    terms = poly.items()
    if not terms:
        return x**0 * 0
    exponent, accumulator = terms[-1]
    accumulator = x**0 * accumulator
    for lower, coefficient in reversed(terms[:-1]):
        accumulator = accumulator * x ** (exponent - lower) + coefficient
        exponent = lower
    return accumulator * x**exponent if exponent else accumulator


def factorial_inverse(n: int) -> Fraction:
    return Fraction(1, math.factorial(n))
