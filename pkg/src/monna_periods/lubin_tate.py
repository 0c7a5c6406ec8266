"""
The two Lubin-Tate coordinates over Q_{p^2} with uniformizer p, and the
coefficient polynomials P_m(Y) of exp(Y * log(Z)).

The special coordinate has log(Z) = sum Z^{q^k}/p^k in closed form; the
polynomial coordinate has [p](Z) = Z^q + pZ in closed form. Both logs have
derivative 1 at the origin.
"""

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .enums import ModelKind
from .padic_core import Params, format_rational, val_p_rat
from .series import (
    RATIONALS,
    YPOLYS,
    YPoly,
    ZSeries,
    series_compose,
    series_exp,
    series_mul,
    series_pow,
    series_reversion,
)
from .structures import CheckResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LTModel:
    kind: ModelKind
    params: Params
    cap: int

    def log(self) -> ZSeries[Fraction]:
        if self.kind is ModelKind.SPECIAL:
            return log_special(self.params, self.cap)
        return log_polynomial_model(self.params, self.cap)

    def mul_p(self) -> ZSeries[Fraction]:
        return mul_p(self, self.cap)


@dataclass(frozen=True)
class GaussProfile:
    """Term valuations val_p(c_j) + j*p/(q-1) of a polynomial in Y."""

    entries: list[tuple[int, Fraction]]
    min_value: Fraction
    tie_count: int

    def to_json(self) -> dict[str, Any]:
        return {
            "entries": [[j, format_rational(value)] for j, value in self.entries],
            "min": format_rational(self.min_value),
            "tie_count": self.tie_count,
        }


def _require_cap(cap: int, minimum: int, what: str) -> None:
    if cap < minimum:
        raise ValueError(f"{what} requires cap >= {minimum}, got {cap}.")


def log_special(params: Params, cap: int) -> ZSeries[Fraction]:
    """
    Z + Z^q/p + Z^{q^2}/p^2 + ... modulo Z**cap.

    Args:
        params (Params): Prime and its derived constants.
        cap (int): Truncation order, at least 2.

    Raises:
        ValueError: If cap < 2.
    """
    _require_cap(cap, 2, "log_special()")
    terms: dict[int, Fraction] = {}
    k = 0
    while params.q**k < cap:
        terms[params.q**k] = Fraction(1, params.p**k)
        k += 1
    return ZSeries.from_terms(terms, cap, RATIONALS)


def exp_special(params: Params, cap: int) -> ZSeries[Fraction]:
    """
    Compositional inverse of :func:`log_special`.

    Args:
        params (Params): Prime and its derived constants.
        cap (int): Truncation order, at least 2.
    """
    _require_cap(cap, 2, "exp_special()")
    return series_reversion(log_special(params, cap))


def log_polynomial_model(params: Params, cap: int) -> ZSeries[Fraction]:
    """
    The logarithm of the coordinate with [p](Z) = pZ + Z^q.

    Coefficients are solved degree by degree from log(pZ + Z^q) = p * log(Z):
    the Z^N coefficient of (pZ + Z^q)^n is C(n, a) p^{n-a} with
    a = (N - n)/(q - 1), so c_N (p^N - p) = -sum_{n<N} c_n C(n, a) p^{n-a}.

    Args:
        params (Params): Prime and its derived constants.
        cap (int): Truncation order, at least 2.
    """
    _require_cap(cap, 2, "log_polynomial_model()")
    p, q = params.p, params.q
    coefficients = [Fraction(0)] * cap
    coefficients[1] = Fraction(1)
    for degree in range(2, cap):
        if (degree - 1) % (q - 1):
            continue
        rest = Fraction(0)
        for n in range(1, degree):
            a, remainder = divmod(degree - n, q - 1)
            if remainder or a > n or not coefficients[n]:
                continue
            rest += coefficients[n] * math.comb(n, a) * p ** (n - a)
        coefficients[degree] = -rest / (p**degree - p)
    return ZSeries(coefficients, cap, RATIONALS)


def mul_p(model: LTModel, cap: int) -> ZSeries[Fraction]:
    """
    [p](Z) in the given coordinate, modulo Z**cap.

    Args:
        model (LTModel): Coordinate and prime.
        cap (int): Truncation order, above q.

    Raises:
        ValueError: If cap <= q.
    """
    params = model.params
    _require_cap(cap, params.q + 1, "mul_p()")
    if model.kind is ModelKind.POLYNOMIAL:
        return ZSeries.from_terms(
            {1: Fraction(params.p), params.q: Fraction(1)}, cap, RATIONALS
        )
    log = log_special(params, cap)
    return series_compose(series_reversion(log), log.scale(params.p))


def check_lemma35(params: Params, cap: int) -> CheckResult:
    """
    ([p](Z) - Z^q - pZ)/p^2 in the special coordinate is p-integral of order >= 2.

    The extracted s(Z) is returned in ``data["s"]`` as exponent -> "num/den".

    Args:
        params (Params): Prime and its derived constants.
        cap (int): Truncation order, above q.
    """
    p, q = params.p, params.q
    special = mul_p(LTModel(ModelKind.SPECIAL, params, cap), cap)
    remainder = special - ZSeries.from_terms(
        {1: Fraction(p), q: Fraction(1)}, cap, RATIONALS
    )
    s = remainder.scale(Fraction(1, p * p))
    s_terms = {str(n): format_rational(c) for n, c in s.nonzero()}
    checked = f"coefficients of Z^0..Z^{cap - 1}, p={p}"
    for n, coefficient in s.nonzero():
        if n < 2:
            return CheckResult(
                "lemma3.5", False, checked, f"s has a Z^{n} term", {"s": s_terms}
            )
        valuation = val_p_rat(coefficient, p)
        if valuation.at_least(0) is not True:
            return CheckResult(
                "lemma3.5",
                False,
                checked,
                f"Z^{n} coefficient {format_rational(coefficient)} is not p-integral",
                {"s": s_terms},
            )
    return CheckResult("lemma3.5", True, checked, None, {"s": s_terms})


def _representations(m: int, q: int, level: int) -> Iterator[tuple[int, ...]]:
    """All (m_0, ..., m_level) with sum q^i m_i = m."""
    if level == 0:
        yield (m,)
        return
    block = q**level
    for top in range(m // block, -1, -1):
        for lower in _representations(m - top * block, q, level - 1):
            yield (*lower, top)


def pk_combinatorial(m: int, params: Params) -> YPoly:
    """
    P_m(Y) = sum over m = sum q^i m_i of Y^{sum m_i} / (prod m_i! * p^{sum i m_i}).

    Args:
        m (int): Index of the polynomial.
        params (Params): Prime and its derived constants.

    Raises:
        ValueError: If m is negative.
    """
    if m < 0:
        raise ValueError(f"pk_combinatorial() requires m >= 0, got {m}.")
    q = params.q
    level = 0
    while q ** (level + 1) <= m:
        level += 1
    terms: dict[int, Fraction] = {}
    for parts in _representations(m, q, level):
        denominator = params.p ** sum(i * part for i, part in enumerate(parts))
        for part in parts:
            denominator *= math.factorial(part)
        degree = sum(parts)
        terms[degree] = terms.get(degree, Fraction(0)) + Fraction(1, denominator)
    return YPoly(terms)


def _exp_factor(params: Params, k: int, cap: int) -> ZSeries[YPoly]:
    """exp(Y Z^{q^k} / p^k) modulo Z**cap."""
    step = params.q**k
    scale = Fraction(1, params.p**k)
    terms = {
        j * step: YPoly.monomial(j, scale**j / math.factorial(j))
        for j in range((cap - 1) // step + 1)
    }
    return ZSeries.from_terms(terms, cap, YPOLYS)


def pk_series(mmax: int, params: Params, model: LTModel) -> list[YPoly]:
    """
    P_0, ..., P_mmax as the Z-coefficients of exp(Y * log(Z)).

    The special coordinate multiplies the factors exp(Y Z^{q^k}/p^k); the
    polynomial coordinate exponentiates Y times its solved logarithm.

    Args:
        mmax (int): Last index, at least 1.
        params (Params): Prime and its derived constants.
        model (LTModel): Coordinate to expand in.

    Raises:
        ValueError: If mmax < 1 or ``model`` was built for another prime.
    """
    if mmax < 1:
        raise ValueError(f"pk_series() requires mmax >= 1, got {mmax}.")
    if model.params != params:
        raise ValueError("pk_series() model belongs to different parameters.")
    cap = mmax + 1
    if model.kind is ModelKind.SPECIAL:
        product = _exp_factor(params, 0, cap)
        k = 1
        while params.q**k < cap:
            product = series_mul(product, _exp_factor(params, k, cap))
            k += 1
    else:
        log = log_polynomial_model(params, cap)
        product = series_exp(log.map(lambda c: YPoly.monomial(1, c), YPOLYS))
    logger.debug("Computed P_0..P_%s in the %s coordinate.", mmax, model.kind)
    return list(product.coefficients)


def gauss_profile(poly: YPoly, params: Params) -> GaussProfile:
    """
    Term valuations of ``poly`` with weight p/(q-1) on Y.

    Args:
        poly (YPoly): A nonzero polynomial with rational coefficients.
        params (Params): Prime and its derived constants.

    Raises:
        ValueError: If ``poly`` is zero.
    """
    if not poly:
        raise ValueError("gauss_profile() requires a nonzero polynomial.")
    weight = params.omega_valuation
    entries = []
    for j, coefficient in poly.items():
        valuation = val_p_rat(coefficient, params.p).value
        assert valuation is not None
        entries.append((j, valuation + j * weight))
    min_value = min(value for _, value in entries)
    return GaussProfile(
        entries=entries,
        min_value=min_value,
        tie_count=sum(1 for _, value in entries if value == min_value),
    )


def identity_divbyu1(
    kmax: int, params: Params, polys: Sequence[YPoly] | None = None
) -> CheckResult:
    """
    k * P_k(Y) = Y * sum_r p^r P_{k - q^r}(Y) for 1 <= k <= kmax.

    Args:
        kmax (int): Last k, at least 1.
        params (Params): Prime and its derived constants.
        polys (Sequence[YPoly] | None, optional): P_0..P_kmax. Defaults to the series expansion.

    Raises:
        ValueError: If kmax < 1.
    """
    if kmax < 1:
        raise ValueError(f"identity_divbyu1() requires kmax >= 1, got {kmax}.")
    if polys is None:
        polys = pk_series(kmax, params, LTModel(ModelKind.SPECIAL, params, kmax + 1))
    y = YPoly.monomial(1)
    checked = f"1 <= k <= {kmax}, p={params.p}"
    for k in range(1, kmax + 1):
        total = YPoly.zero()
        r = 0
        while params.q**r <= k:
            total = total + polys[k - params.q**r] * params.p**r
            r += 1
        if polys[k] * k != y * total:
            return CheckResult("prop3.7", False, checked, f"k={k}")
    return CheckResult("prop3.7", True, checked)


def composed_with_mul_p(params: Params, zcap: int) -> tuple[ZSeries[YPoly], ZSeries[YPoly]]:
    """
    Both sides of G([p](Z)) = (1 + G(Z))^p - 1 with G = exp(Y log Z) - 1 over Q[Y].

    Both sides are computed in the special coordinate modulo Z**zcap.

    Args:
        params (Params): Prime and its derived constants.
        zcap (int): Truncation order, above q.
    """
    _require_cap(zcap, params.q + 1, "composed_with_mul_p()")
    model = LTModel(ModelKind.SPECIAL, params, zcap)
    polys = pk_series(zcap - 1, params, model)
    one = ZSeries.constant(YPoly.one(), zcap, YPOLYS)
    g = ZSeries(polys, zcap, YPOLYS) - one
    left = series_compose(g, mul_p(model, zcap))
    right = series_pow(one + g, params.p) - one
    return left, right


def identity_functional_eq(params: Params, zcap: int) -> CheckResult:
    """
    G([p](Z)) and (1 + G(Z))^p - 1 agree coefficient by coefficient modulo Z**zcap.

    Args:
        params (Params): Prime and its derived constants.
        zcap (int): Truncation order, above q.
    """
    left, right = composed_with_mul_p(params, zcap)
    checked = f"Z^0..Z^{zcap - 1}, p={params.p}"
    for n in range(zcap):
        if left[n] != right[n]:
            return CheckResult(
                "functional-equation",
                False,
                checked,
                f"Z^{n}: {left[n]} != {right[n]}",
            )
    return CheckResult("functional-equation", True, checked)


def pk_table_json(polys: Sequence[YPoly]) -> dict[str, dict[str, str]]:
    """
    P_m table as m -> (Y-exponent -> "num/den").

    Args:
        polys (Sequence[YPoly]): P_0, P_1, ... in order.
    """
    return {str(m): poly.to_json() for m, poly in enumerate(polys)}
