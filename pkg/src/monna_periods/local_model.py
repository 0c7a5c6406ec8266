"""
Finite-precision model of the local field housing the period.

The field is the totally ramified extension of the unramified degree-f
extension of Q_p cut out by the Eisenstein polynomial

    E_n(x) = ([p]^{n-1}(x))^{q-1} + p,    [p](x) = x^q + p x,

whose root x = t_n is a primitive p^n-torsion point of the polynomial
Lubin-Tate coordinate. The ring of integers is free over Z_p[w] on
1, x, ..., x^{e-1} with e = (q-1) q^{n-1}; coordinates are held modulo
p^W where W is the target precision plus guard digits. The field contains
the p^n-th roots of unity, so the cyclotomic layer is a root of
Phi_{p^n}(1 + y) found inside the same ring.
"""

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, TypeAlias

from sympy import Poly, cyclotomic_poly, factorint, multiplicity, primitive_root, symbols
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_pow_mod

from .exceptions import (
    ConfigurationError,
    MonnaPeriodsError,
    NewtonDivergenceError,
    PrecisionExhaustedError,
    TowerBudgetError,
)
from .padic_core import Params, ValueV, val_p_int
from .series import CoefficientRing

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 500_000
DEFAULT_GUARD = 2

# Primitive polynomials (low degree first) whose root generates F_{p^2}^x.
DEFAULT_UNRAMIFIED = {
    2: (1, 1, 1),
    3: (2, 1, 1),
}

_X = symbols("x")

Scalar: TypeAlias = int | Fraction


def _to_gf(coefficients: Sequence[int], p: int) -> list[int]:
    """Little-endian integer coefficients -> sympy's dense big-endian GF(p) list."""
    dense = [c % p for c in reversed(coefficients)]
    while dense and not dense[0]:
        dense.pop(0)
    return dense


def _from_gf(dense: Sequence[int], length: int) -> list[int]:
    values = [int(c) for c in reversed(dense)]
    return values + [0] * (length - len(values))


def is_primitive(unramified: Sequence[int], p: int) -> bool:
    """Monic, irreducible over F_p, and its root generates the multiplicative group."""
    f = len(unramified) - 1
    if f < 1 or unramified[-1] != 1:
        return False
    modulus = _to_gf(unramified, p)
    if len(modulus) != f + 1 or not gf_irreducible_p(modulus, p, ZZ):
        return False
    order = p**f - 1
    generator = _to_gf([0, 1], p) if f > 1 else _to_gf([-unramified[0]], p)
    if not generator:
        return False
    return all(
        gf_pow_mod(generator, order // prime, modulus, p, ZZ) != [1]
        for prime in factorint(order)
    )


def default_unramified(p: int, f: int) -> tuple[int, ...]:
    """A fixed primitive polynomial of degree f over F_p (first in lexicographic search)."""
    if f == 1:
        return (-primitive_root(p) % p, 1)
    if f == 2 and p in DEFAULT_UNRAMIFIED:
        return DEFAULT_UNRAMIFIED[p]

    def _candidates() -> Iterator[tuple[int, ...]]:
        for index in range(p**f):
            low = []
            for _ in range(f):
                index, digit = divmod(index, p)
                low.append(digit)
            yield (*low, 1)

    for candidate in _candidates():
        if candidate[0] and is_primitive(candidate, p):
            return candidate
    raise ConfigurationError(f"No primitive polynomial of degree {f} over F_{p}.")


def eisenstein_polynomial(params: Params, n: int) -> tuple[int, ...]:
    """Little-endian coefficients of ([p]^{n-1}(x))^{q-1} + p."""
    step = Poly(_X**params.q + params.p * _X, _X)
    composite = Poly(_X, _X)
    for _ in range(n - 1):
        composite = step.compose(composite)
    eisenstein = composite ** (params.q - 1) + params.p
    return tuple(int(c) for c in reversed(eisenstein.all_coeffs()))


def cyclotomic_shifted(p: int, n: int) -> tuple[int, ...]:
    """Little-endian coefficients of Phi_{p^n}(1 + y)."""
    shifted = Poly(cyclotomic_poly(p**n, _X), _X).compose(Poly(_X + 1, _X))
    return tuple(int(c) for c in reversed(shifted.all_coeffs()))


@dataclass(frozen=True)
class TowerSpec:
    params: Params
    f: int
    n: int
    precision: int
    guard: int
    unramified: tuple[int, ...]
    eisenstein: tuple[int, ...]
    cyclotomic: tuple[int, ...]
    budget: int = DEFAULT_BUDGET

    @property
    def ramification(self) -> int:
        """e = (q-1) q^{n-1}, the degree of the Eisenstein layer."""
        return (self.params.q - 1) * self.params.q ** (self.n - 1)

    @property
    def dimension(self) -> int:
        return self.f * self.ramification

    @property
    def working_precision(self) -> int:
        return self.precision + self.guard

    @property
    def modulus(self) -> int:
        return self.params.p**self.working_precision

    @property
    def psi(self) -> list[str]:
        """The layer polynomials t_1^{q-1} + p and t_j^q + p t_j - t_{j-1}."""
        p, q = self.params.p, self.params.q
        layers = [f"x^{q - 1} + {p}"]
        layers += [f"x^{q} + {p}*x - t_{j - 1}" for j in range(2, self.n + 1)]
        return layers

    @cached_property
    def kernel(self) -> "RingKernel":
        return RingKernel(self)

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.params.p,
            "q": self.params.q,
            "f": self.f,
            "n": self.n,
            "precision": self.precision,
            "guard": self.guard,
            "budget": self.budget,
            "unramified": list(self.unramified),
            "eisenstein": [str(c) for c in self.eisenstein],
            "cyclotomic": [str(c) for c in self.cyclotomic],
            "psi": self.psi,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "TowerSpec":
        tower = tower_build(
            Params(p=data["p"], q=data["q"]),
            f=data["f"],
            n=data["n"],
            precision=data["precision"],
            guard=data["guard"],
            budget=data["budget"],
            unramified=tuple(data["unramified"]),
        )
        if [str(c) for c in tower.eisenstein] != data["eisenstein"]:
            raise ConfigurationError("Stored Eisenstein polynomial does not match its parameters.")
        return tower


def tower_build(
    params: Params,
    f: int,
    n: int,
    precision: int,
    *,
    guard: int = DEFAULT_GUARD,
    budget: int = DEFAULT_BUDGET,
    unramified: tuple[int, ...] | None = None,
) -> TowerSpec:
    """
    Build the tower K_n = K_0(t_n) over the degree-f unramified extension of Q_p.

    The dimension is f * (q - 1) * q^(n - 1), so the p = 2 defaults need 96
    coordinates rather than 384: zeta_{p^n} is found inside the Eisenstein
    ring by digit search and Newton iteration, so it needs no layer of its own.

    Args:
        params (Params): Prime and its derived constants.
        f (int): Inertia degree of the unramified base.
        n (int): Torsion level, the number of Eisenstein layers.
        precision (int): Requested p-adic digits.
        guard (int, optional): Extra digits carried for cancellation. Defaults to DEFAULT_GUARD.
        budget (int, optional): Largest allowed dimension. Defaults to DEFAULT_BUDGET.
        unramified (tuple[int, ...] | None, optional): Coefficients of a primitive polynomial
            over F_p, constant term first. Defaults to the first primitive one found.

    Raises:
        ConfigurationError: If a parameter is out of range or the polynomial is not primitive.
        TowerBudgetError: If the dimension exceeds ``budget``.
    """
    if precision < 2:
        raise ConfigurationError(f"Precision must be at least 2, got {precision}.")
    if n < 1:
        raise ConfigurationError(f"Torsion level must be at least 1, got {n}.")
    if f < 1:
        raise ConfigurationError(f"Inertia degree must be at least 1, got {f}.")
    if guard < 0:
        raise ConfigurationError(f"Guard digits must be non-negative, got {guard}.")

    dimension = f * (params.q - 1) * params.q ** (n - 1)
    if dimension > budget:
        raise TowerBudgetError(dimension, budget)

    if unramified is None:
        unramified = default_unramified(params.p, f)
    elif len(unramified) != f + 1 or not is_primitive(unramified, params.p):
        raise ConfigurationError(
            f"Unramified polynomial {list(unramified)} is not a primitive polynomial "
            f"of degree {f} over F_{params.p}."
        )

    tower = TowerSpec(
        params=params,
        f=f,
        n=n,
        precision=precision,
        guard=guard,
        unramified=tuple(unramified),
        eisenstein=eisenstein_polynomial(params, n),
        cyclotomic=cyclotomic_shifted(params.p, n),
        budget=budget,
    )
    logger.info(
        "Built tower p=%s f=%s n=%s: %s coordinates modulo p^%s.",
        params.p,
        f,
        n,
        tower.dimension,
        tower.working_precision,
    )
    return tower


def _byte_width(bound: int) -> int:
    return bound.bit_length() // 8 + 1


def _pack(values: Sequence[int], width: int) -> int:
    return int.from_bytes(b"".join(v.to_bytes(width, "little") for v in values), "little")


def _unpack(number: int, width: int, count: int) -> list[int]:
    number &= (1 << (8 * width * count)) - 1
    raw = number.to_bytes(width * count, "little")
    return [int.from_bytes(raw[i : i + width], "little") for i in range(0, width * count, width)]


class RingKernel:
    """
    Coordinate arithmetic of the ring of integers modulo p^W.

    Products use Kronecker substitution: the bivariate coordinates are packed
    into one integer, multiplied, unpacked, reduced modulo the unramified
    polynomial and then modulo E_n through a precomputed reversed inverse.
    """

    def __init__(self, tower: TowerSpec) -> None:
        self.p = tower.params.p
        self.e = tower.ramification
        self.f = tower.f
        self.modulus = tower.modulus
        self.working_precision = tower.working_precision
        self.unramified = tower.unramified
        self.eisenstein = [c % self.modulus for c in tower.eisenstein]
        self.stride = 2 * self.f - 1
        self.product_width = _byte_width(self.modulus**2 * self.e * self.f)
        self.reduce_width = _byte_width(self.modulus**2 * self.e)
        self._zero_row = [0] * (self.stride - self.f)
        self._quotient_inverse = self._reversed_inverse()

    def _reversed_inverse(self) -> list[int]:
        """Inverse of x^e E_n(1/x) modulo (x^{e-1}, p^W)."""
        e, modulus = self.e, self.modulus
        reversed_e = self.eisenstein[::-1]
        inverse = [1]
        for k in range(1, e - 1):
            total = sum(reversed_e[i] * inverse[k - i] for i in range(1, k + 1))
            inverse.append(-total % modulus)
        return inverse

    def _reduce_unramified(self, row: list[int]) -> list[int]:
        f, g = self.f, self.unramified
        for degree in range(len(row) - 1, f - 1, -1):
            top = row[degree]
            if top:
                for i in range(f):
                    row[degree - f + i] -= top * g[i]
        return [c % self.modulus for c in row[:f]]

    def unramified_mul(self, u: Sequence[int], v: Sequence[int]) -> list[int]:
        """Product of two length-f coordinate vectors of Z_p[w] modulo p^W."""
        row = [0] * self.stride
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    row[i + j] += a * b
        return self._reduce_unramified(row)

    def mul(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        e, f, stride, width = self.e, self.f, self.stride, self.product_width
        modulus = self.modulus

        def _spread(values: Sequence[int]) -> list[int]:
            spread: list[int] = []
            for b in range(e):
                spread.extend(values[b * f : (b + 1) * f])
                spread.extend(self._zero_row)
            return spread

        product = _pack(_spread(u), width) * _pack(_spread(v), width)
        slots = _unpack(product, width, (2 * e - 1) * stride)
        rows = [
            self._reduce_unramified(slots[b * stride : (b + 1) * stride])
            for b in range(2 * e - 1)
        ]

        # x-reduction modulo E_n: quotient from the reversed inverse, then A - Q*E
        width = self.reduce_width
        top = [c for row in reversed(rows[e:]) for c in row]
        inverse = [c for coefficient in self._quotient_inverse for c in (coefficient, *[0] * (f - 1))]
        reversed_quotient = _unpack(_pack(top, width) * _pack(inverse, width), width, (e - 1) * f)
        quotient = [
            c % modulus
            for b in range(e - 2, -1, -1)
            for c in reversed_quotient[b * f : (b + 1) * f]
        ]
        low_e = [c for coefficient in self.eisenstein[:e] for c in (coefficient, *[0] * (f - 1))]
        correction = _unpack(_pack(quotient, width) * _pack(low_e, width), width, e * f)
        return tuple(
            (rows[b][a] - correction[b * f + a]) % modulus for b in range(e) for a in range(f)
        )

    def scale(self, u: Sequence[int], factor: int) -> tuple[int, ...]:
        modulus = self.modulus
        return tuple(c * factor % modulus for c in u)

    def add(self, u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        modulus = self.modulus
        return tuple((a + b) % modulus for a, b in zip(u, v))

    def x_order(self, u: Sequence[int]) -> int:
        """
        Largest m with u in x^m times the ring, capped at e * W for zero.

        The block of x^b contributes b + e * v_p(block); these are distinct
        modulo e, so the minimum is the order of the sum.
        """
        e, f = self.e, self.f
        order = e * self.working_precision
        for b in range(e):
            common = math.gcd(*u[b * f : (b + 1) * f])
            if common:
                order = min(order, b + e * multiplicity(self.p, common))
        return order


class LocalNum:
    """
    p^{-shift} * payload, with payload coordinates over Z/p^W on x^b w^a (index b*f + a).

    ``absprec`` counts the known digits in units of the uniformizer x: the
    value is known modulo x^absprec times the ring of integers. It never
    exceeds the e * (W - shift) digits the payload can hold. Common factors
    of p are moved from the payload into the shift on construction, so an
    integral value always has shift 0.
    """

    __slots__ = ("_order", "absprec", "payload", "shift", "tower")

    def __init__(
        self,
        tower: TowerSpec,
        payload: Sequence[int],
        shift: int = 0,
        absprec: int | None = None,
    ) -> None:
        kernel = tower.kernel
        if len(payload) != tower.dimension:
            raise ValueError(
                f"Payload has {len(payload)} coordinates, tower needs {tower.dimension}."
            )
        p = tower.params.p
        if shift < 0:
            payload = kernel.scale(payload, p**-shift)
            shift = 0
        else:
            payload = tuple(c % kernel.modulus for c in payload)
        if shift >= tower.working_precision:
            raise PrecisionExhaustedError(shift, tower.working_precision)
        capacity = tower.ramification * (tower.working_precision - shift)
        absprec = capacity if absprec is None else min(absprec, capacity)
        while shift and all(c % p == 0 for c in payload):
            payload = tuple(c // p for c in payload)
            shift -= 1
        self.tower = tower
        self.payload = payload
        self.shift = shift
        self.absprec = absprec
        self._order: int | None = None

    @classmethod
    def zero(cls, tower: TowerSpec) -> "LocalNum":
        return cls(tower, (0,) * tower.dimension)

    @classmethod
    def one(cls, tower: TowerSpec) -> "LocalNum":
        return cls.from_rational(tower, 1)

    @classmethod
    def from_rational(cls, tower: TowerSpec, value: Scalar) -> "LocalNum":
        value = Fraction(value)
        if not value:
            return cls.zero(tower)
        unit, exponent = _split_rational(value, tower)
        payload = [0] * tower.dimension
        payload[0] = unit
        return cls(tower, payload, -exponent)

    @classmethod
    def monomial(cls, tower: TowerSpec, b: int, unramified: Sequence[int] = (1,), p_power: int = 0) -> "LocalNum":
        """p^{p_power} * x^b * (unramified element given by its w-coordinates), for b < e."""
        payload = [0] * tower.dimension
        for a, c in enumerate(unramified):
            payload[b * tower.f + a] = c * tower.params.p**p_power
        return cls(tower, payload)

    @property
    def effective_precision(self) -> Fraction:
        """The value is known modulo p^effective_precision."""
        return Fraction(self.absprec, self.tower.ramification)

    @property
    def order(self) -> int:
        """x-adic order of the stored value; at or above ``absprec`` it carries no information."""
        if self._order is None:
            self._order = (
                self.tower.kernel.x_order(self.payload) - self.tower.ramification * self.shift
            )
        return self._order

    def _order_bound(self) -> int:
        return min(self.order, self.absprec)

    def _coerce(self, other: "LocalNum | Scalar") -> "LocalNum":
        if isinstance(other, LocalNum):
            if other.tower is not self.tower and other.tower != self.tower:
                raise ValueError("LocalNum operands belong to different towers.")
            return other
        return LocalNum.from_rational(self.tower, other)

    def __bool__(self) -> bool:
        return self.order < self.absprec

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (LocalNum, int, Fraction)):
            return NotImplemented
        return not (self - other)

    # equality holds within the known digits of both sides, which no hash can respect
    __hash__ = None  # type: ignore[assignment]

    def __neg__(self) -> "LocalNum":
        return LocalNum(
            self.tower, self.tower.kernel.scale(self.payload, -1), self.shift, self.absprec
        )

    def __add__(self, other: "LocalNum | Scalar") -> "LocalNum":
        other = self._coerce(other)
        p, kernel = self.tower.params.p, self.tower.kernel
        shift = max(self.shift, other.shift)
        left = self.payload if self.shift == shift else kernel.scale(self.payload, p ** (shift - self.shift))
        right = other.payload if other.shift == shift else kernel.scale(other.payload, p ** (shift - other.shift))
        return LocalNum(self.tower, kernel.add(left, right), shift, min(self.absprec, other.absprec))

    __radd__ = __add__

    def __sub__(self, other: "LocalNum | Scalar") -> "LocalNum":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "LocalNum | Scalar") -> "LocalNum":
        return self._coerce(other) - self

    def __mul__(self, other: "LocalNum | Scalar") -> "LocalNum":
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        if not isinstance(other, LocalNum):
            return NotImplemented
        other = self._coerce(other)
        payload = self.tower.kernel.mul(self.payload, other.payload)
        absprec = min(
            self.absprec + other._order_bound(), other.absprec + self._order_bound()
        )
        return LocalNum(self.tower, payload, self.shift + other.shift, absprec)

    __rmul__ = __mul__

    def scaled(self, factor: Scalar) -> "LocalNum":
        factor = Fraction(factor)
        if not factor:
            return LocalNum.zero(self.tower)
        unit, exponent = _split_rational(factor, self.tower)
        return LocalNum(
            self.tower,
            self.tower.kernel.scale(self.payload, unit),
            self.shift - exponent,
            self.absprec + self.tower.ramification * exponent,
        )

    def __truediv__(self, other: "LocalNum | Scalar") -> "LocalNum":
        if isinstance(other, (int, Fraction)):
            return self.scaled(1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: Scalar) -> "LocalNum":
        return self.inverse() * other

    def __pow__(self, exponent: int) -> "LocalNum":
        if exponent < 0:
            return (self**-exponent).inverse()
        result = LocalNum.one(self.tower)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def renormalized(self) -> "LocalNum":
        """
        The same payload with every digit it can hold declared known.

        Only sound inside self-correcting iterations such as Newton steps,
        where the next residual measures the true error.
        """
        return LocalNum(self.tower, self.payload, self.shift)

    def residue(self) -> list[int]:
        """Reduction of an integral unit into F_{p^f} as w-coordinates."""
        p, f = self.tower.params.p, self.tower.f
        if self.shift:
            raise ValueError("residue() requires an integral element with shift 0.")
        return [c % p for c in self.payload[:f]]

    def inverse(self) -> "LocalNum":
        """
        Multiplicative inverse.

        The payload is moved to an exact p-power by x^{e-b}, divided by it, and
        the resulting unit is inverted by Newton iteration from the inverse of
        its residue. The inverse keeps the relative precision of ``self``,
        less the top digits the division by the p-power pushed out.
        """
        if not self:
            raise ZeroDivisionError("Inverse of a LocalNum that is zero at its known precision.")
        tower, kernel = self.tower, self.tower.kernel
        e, p = tower.ramification, tower.params.p
        j, b = divmod(kernel.x_order(self.payload), e)
        x_complement = LocalNum.monomial(tower, e - b).payload if b else None
        lifted = kernel.mul(self.payload, x_complement) if x_complement else self.payload
        exponent = j + 1 if b else j
        relative = min(self.absprec - self.order, e * (tower.working_precision - exponent))
        unit = LocalNum(tower, tuple(c // p**exponent for c in lifted), absprec=relative)

        residue_inverse = _residue_inverse(unit.residue(), tower)
        approximation = LocalNum.monomial(tower, 0, residue_inverse)
        for step in range(2 * (e * tower.working_precision).bit_length() + 2):
            error = LocalNum.one(tower) - unit * approximation
            if not error:
                break
            approximation = approximation + approximation * error
        else:
            raise NewtonDivergenceError(step, "unit inverse did not converge")
        payload = approximation.payload
        if x_complement:
            payload = kernel.mul(payload, x_complement)
        # 1/self = unit^{-1} * x^{e-b} * p^{shift - exponent}
        return LocalNum(tower, payload, exponent - self.shift, relative - self.order)

    def to_json(self) -> dict[str, Any]:
        return {
            "shift": self.shift,
            "absprec": self.absprec,
            "payload": [str(c) for c in self.payload],
        }

    @classmethod
    def from_json(cls, tower: TowerSpec, data: dict[str, Any]) -> "LocalNum":
        absprec = data.get("absprec")
        return cls(
            tower,
            [int(c) for c in data["payload"]],
            int(data["shift"]),
            None if absprec is None else int(absprec),
        )

    def __repr__(self) -> str:
        nonzero = sum(1 for c in self.payload if c)
        return (
            f"LocalNum(shift={self.shift}, absprec={self.absprec}, "
            f"nonzero_coordinates={nonzero}, val={ring_val(self)})"
        )


def _split_rational(value: Fraction, tower: TowerSpec) -> tuple[int, int]:
    """value = unit * p^exponent with the unit reduced modulo p^W."""
    p, modulus = tower.params.p, tower.modulus
    exponent = val_p_int(value, p)
    unit = value / Fraction(p) ** exponent
    return unit.numerator * pow(unit.denominator, -1, modulus) % modulus, exponent


def _residue_inverse(residue: Sequence[int], tower: TowerSpec) -> list[int]:
    p, f = tower.params.p, tower.f
    dense = _to_gf(residue, p)
    if not dense:
        raise ZeroDivisionError("Residue of a unit is zero.")
    inverse = gf_pow_mod(dense, p**f - 2, _to_gf(tower.unramified, p), p, ZZ)
    return _from_gf(inverse, f)


def ring_val(a: LocalNum) -> ValueV:
    """
    Valuation reading of ``a``.

    The x-adic order m of the value gives the exact reading m/e whenever it
    lies below the known precision; anything that vanishes to its known
    precision reads as bounded below by it.
    """
    if not a:
        return ValueV.bounded_below(a.effective_precision)
    return ValueV.finite(Fraction(a.order, a.tower.ramification))


def teichmuller(tower: TowerSpec, residue: Sequence[int] | None = None) -> LocalNum:
    """
    Multiplicative lift of a residue (w-coordinates over F_p, defaults to the generator).

    Iterates z -> z^{p^f}; each step fixes one more p-adic digit.
    """
    p, f, kernel = tower.params.p, tower.f, tower.kernel
    if residue is None:
        residue = _from_gf(_to_gf([0, 1], p), f) if f > 1 else [-tower.unramified[0] % p]
    value = [c % p for c in residue] + [0] * (f - len(residue))
    if not any(value):
        return LocalNum.zero(tower)
    for _ in range(tower.working_precision + 1):
        result = [1] + [0] * (f - 1)
        base, exponent = value, p**f
        while exponent:
            if exponent & 1:
                result = kernel.unramified_mul(result, base)
            exponent >>= 1
            if exponent:
                base = kernel.unramified_mul(base, base)
        if result == value:
            break
        value = result
    return LocalNum.monomial(tower, 0, value)


def teichmuller_digits(tower: TowerSpec) -> list[LocalNum]:
    """Zero followed by the powers 1, tau, tau^2, ... of the generator's lift."""
    generator = teichmuller(tower)
    digits = [LocalNum.zero(tower), LocalNum.one(tower)]
    power = LocalNum.one(tower)
    for _ in range(tower.params.p**tower.f - 2):
        power = power * generator
        digits.append(power)
    return digits


def _reading_rank(value: ValueV) -> Fraction:
    """Order key for readings; zero and lower bounds rank at their cutoff or beyond."""
    if value.value is None:
        return Fraction(10**9)
    return value.value


def cyclotomic_eval(tower: TowerSpec, y: LocalNum, derivative: bool = False) -> LocalNum:
    coefficients = list(tower.cyclotomic)
    if derivative:
        coefficients = [i * c for i, c in enumerate(coefficients)][1:]
    result = LocalNum.from_rational(tower, coefficients[-1])
    for coefficient in reversed(coefficients[:-1]):
        result = result * y + coefficient
    return result


def cyclotomic_root(tower: TowerSpec) -> LocalNum:
    """
    A root y of Phi_{p^n}(1 + y), i.e. zeta - 1 for a primitive p^n-th root of unity.

    Digits are chosen greedily to maximise val Phi(1 + y) until the Newton
    basin (val Phi > 2 val Phi'), then Newton iteration finishes the root.
    """
    p, n, e = tower.params.p, tower.n, tower.ramification
    different = n - Fraction(1, p - 1)
    digits = teichmuller_digits(tower)
    start = (p + 1) * p ** (n - 1)
    y = LocalNum.zero(tower)
    reading = ring_val(cyclotomic_eval(tower, y))
    position = start
    while reading.greater_than(2 * different) is not True:
        if position >= e * tower.working_precision:
            raise MonnaPeriodsError("Cyclotomic root search ran out of digits.")
        power, b = divmod(position, e)
        best: tuple[Fraction, LocalNum, ValueV] | None = None
        choices = digits[1:] if position == start else digits
        for digit in choices:
            candidate = y + LocalNum.monomial(tower, b, digit.payload[: tower.f], power)
            candidate_reading = ring_val(cyclotomic_eval(tower, candidate))
            rank = _reading_rank(candidate_reading)
            if best is None or rank > best[0]:
                best = (rank, candidate, candidate_reading)
        assert best is not None
        _, y, reading = best
        position += 1
    logger.debug("Cyclotomic digit search reached position %s with val %s.", position, reading)

    # stop once the residual is zero or no longer improves: renormalization
    # leaves an error of a few digits below working precision
    best_rank = _reading_rank(reading)
    for step in range(2 * (e * tower.working_precision).bit_length() + 4):
        residual = cyclotomic_eval(tower, y)
        if not residual:
            break
        candidate = (y - residual / cyclotomic_eval(tower, y, derivative=True)).renormalized()
        rank = _reading_rank(ring_val(cyclotomic_eval(tower, candidate)))
        if rank <= best_rank:
            break
        y, best_rank = candidate, rank
    else:
        raise NewtonDivergenceError(step, str(ring_val(cyclotomic_eval(tower, y))))
    return y


def zeta_power(tower: TowerSpec, zeta_minus_one: LocalNum, choice: int) -> LocalNum:
    """zeta^j - 1 for the choice-th unit j modulo p^n (in increasing order)."""
    p, n = tower.params.p, tower.n
    units = [j for j in range(1, p**n) if j % p]
    exponent = units[choice % len(units)]
    return (zeta_minus_one + 1) ** exponent - 1


def uniformizer_find(
    tower: TowerSpec, zeta_minus_one: LocalNum | None = None
) -> tuple[LocalNum, int]:
    """
    An element of minimal positive valuation and the ramification index e_K.

    Monomials t_n^a (zeta - 1)^b p^c over a small box are read and the first
    one of valuation 1/e is returned.
    """
    e = tower.ramification
    t_n = LocalNum.monomial(tower, 1)
    factors = [t_n]
    if zeta_minus_one is not None:
        factors.append(zeta_minus_one)
    target = Fraction(1, e)
    for a in range(3):
        for b in range(2 if zeta_minus_one is not None else 1):
            for c in range(2):
                if a == b == c == 0:
                    continue
                candidate = LocalNum.one(tower).scaled(tower.params.p**c)
                if a:
                    candidate = candidate * t_n**a
                if b:
                    candidate = candidate * zeta_minus_one ** b  # type: ignore[operator]
                if ring_val(candidate).equals(target):
                    return candidate, e
    raise MonnaPeriodsError("No uniformizer found; the tower is mis-specified.")


def local_ring(tower: TowerSpec) -> CoefficientRing[LocalNum]:
    """The model ring as a coefficient ring for :class:`~monna_periods.series.ZSeries`."""
    return CoefficientRing(
        f"local(p={tower.params.p}, n={tower.n})",
        lambda: LocalNum.zero(tower),
        lambda: LocalNum.one(tower),
        LocalNum.inverse,
    )
