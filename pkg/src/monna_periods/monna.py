"""
The weight map w and the classical Monna map.

For k = (k_h ... k_0)_p the weight is w(k) = p/(q-1) * sum k_i p^{-i} and the
Monna map is M(k) = sum k_i p^{-i-1}, so w = p^2/(q-1) * M.
"""

import logging
from collections import defaultdict
from fractions import Fraction
from typing import TypeAlias

from .padic_core import Params, digits_p, format_rational
from .structures import CheckResult, PropertyReport

logger = logging.getLogger(__name__)

WeightValue: TypeAlias = Fraction


def w(k: int, params: Params) -> WeightValue:
    """Weight of k: p/(q-1) times the digit sum of k read after reversing across the radix point."""
    p = params.p
    k_digits = digits_p(k, p)
    scaled = 0
    for digit in k_digits:
        scaled = scaled * p + digit
    # scaled = sum k_i p^{h-i}
    h = len(k_digits) - 1
    return Fraction(p * scaled, (params.q - 1) * p**h)


def monna(k: int, p: int) -> Fraction:
    """Classical Monna map: sum k_i p^{-(i+1)}."""
    return sum(
        (Fraction(digit, p ** (i + 1)) for i, digit in enumerate(digits_p(k, p))),
        start=Fraction(0),
    )


def _scaled_weights(limit: int, p: int) -> tuple[list[int], int]:
    """Integers s(k) with w(k) = p * s(k) / ((q-1) * p**depth) for all k <= limit."""
    depth = len(digits_p(limit, p))
    scaled = []
    for k in range(limit + 1):
        scaled.append(
            sum(digit * p ** (depth - i) for i, digit in enumerate(digits_p(k, p)))
        )
    return scaled, depth


def _first(
    name: str, checked: str, counterexample: str | None, **data: object
) -> CheckResult:
    return CheckResult(
        name=name,
        passed=counterexample is None,
        checked=checked,
        counterexample=counterexample,
        data=dict(data),
    )


def check_bound(params: Params, kmax: int) -> CheckResult:
    """w(k) < 1 + 1/(q-1) for all k <= kmax."""
    bound = 1 + Fraction(1, params.q - 1)
    bad = next((k for k in range(kmax + 1) if w(k, params) >= bound), None)
    return _first(
        "prop2.1(1)", f"0 <= k <= {kmax}", None if bad is None else f"k={bad}"
    )


def check_large_weights(params: Params, kmax: int) -> CheckResult:
    """w(k) >= 1 iff k = -1 mod q, with w(k) = 1 only at k = q-1."""
    q = params.q
    for k in range(kmax + 1):
        value = w(k, params)
        if (value >= 1) != (k % q == q - 1):
            return _first("prop2.1(2)", f"0 <= k <= {kmax}", f"k={k}, w={format_rational(value)}")
        if value == 1 and k != q - 1:
            return _first("prop2.1(2)", f"0 <= k <= {kmax}", f"k={k} has w=1")
    return _first("prop2.1(2)", f"0 <= k <= {kmax}", None)


def check_integral_differences(params: Params, limit: int) -> CheckResult:
    """
    w(l) - w(k) is an integer for k < l <= limit only when (k, l) = (qj, qj+q-1).

    Pairs with an integral difference are exactly pairs sharing the fractional
    part of w, so grouping by fractional part covers every pair.
    """
    q = params.q
    groups: dict[Fraction, list[int]] = defaultdict(list)
    for k in range(limit + 1):
        value = w(k, params)
        groups[value - (value.numerator // value.denominator)].append(k)

    witnesses = 0
    for members in groups.values():
        for index, k in enumerate(members):
            for ell in members[index + 1 :]:
                if not (k % q == 0 and ell == k + q - 1):
                    return _first(
                        "prop2.1(3)",
                        f"all pairs k < l <= {limit}",
                        f"k={k}, l={ell}",
                    )
                witnesses += 1
    expected = (limit - (q - 1)) // q + 1 if limit >= q - 1 else 0
    if witnesses != expected:
        return _first(
            "prop2.1(3)",
            f"all pairs k < l <= {limit}",
            f"found {witnesses} integral pairs, expected {expected}",
        )
    return _first("prop2.1(3)", f"all pairs k < l <= {limit}", None, witnesses=witnesses)


def check_scaling(params: Params, kmax: int) -> CheckResult:
    """w(pk) = w(k)/p whenever pk <= kmax."""
    p = params.p
    bad = next(
        (k for k in range(kmax // p + 1) if w(p * k, params) != w(k, params) / p), None
    )
    return _first("prop2.1(4)", f"0 <= pk <= {kmax}", None if bad is None else f"k={bad}")


def check_digit_append(params: Params, kmax: int) -> CheckResult:
    """w(p^n k + i) = w(p^n k) + w(i) for 0 <= i < p^n and p^n k + i <= kmax."""
    p = params.p
    count = 0
    n = 1
    while p**n <= kmax:
        block = p**n
        for k in range(kmax // block + 1):
            base = w(block * k, params)
            for i in range(min(block, kmax - block * k + 1)):
                count += 1
                if w(block * k + i, params) != base + w(i, params):
                    return _first(
                        "prop2.1(5)",
                        f"p^n k + i <= {kmax}",
                        f"n={n}, k={k}, i={i}",
                    )
        n += 1
    return _first("prop2.1(5)", f"p^n k + i <= {kmax}", None, instances=count)


def check_subadditivity(params: Params, limit: int) -> CheckResult:
    """w(a+b) <= w(a) + w(b) for all a, b <= limit, compared on scaled integers."""
    scaled, _ = _scaled_weights(2 * limit, params.p)
    for a in range(limit + 1):
        s_a = scaled[a]
        for b in range(a, limit + 1):
            if scaled[a + b] > s_a + scaled[b]:
                return _first(
                    "prop2.1(6)", f"all a, b <= {limit}", f"a={a}, b={b}"
                )
    return _first("prop2.1(6)", f"all a, b <= {limit}", None)


def check_small_index_closed_form(params: Params) -> CheckResult:
    """For i = a*p + b <= q-1, w(i) = (a + b*p)/(q-1)."""
    p, q = params.p, params.q
    for i in range(q):
        a, b = divmod(i, p)
        if w(i, params) != Fraction(a + b * p, q - 1):
            return _first("lemma1.2", f"0 <= i <= {q - 1}", f"i={i}")
    return _first("lemma1.2", f"0 <= i <= {q - 1}", None)


def check_w_props(
    params: Params,
    kmax: int,
    pair_budget: int,
    subadditive_budget: int | None = None,
) -> PropertyReport:
    """
    Run the six weight properties and the small-index closed form.

    Items (1), (2), (4) and (5) are exhaustive up to ``kmax``; item (3) covers
    all pairs up to ``pair_budget`` and item (6) all pairs up to
    ``subadditive_budget`` (defaults to ``pair_budget``).
    """
    if kmax < params.q:
        raise ValueError(f"check_w_props() requires kmax >= q={params.q}.")
    subadditive_budget = pair_budget if subadditive_budget is None else subadditive_budget
    logger.info(
        "Checking weight properties for p=%s up to k=%s (pairs up to %s).",
        params.p,
        kmax,
        pair_budget,
    )
    items = [
        check_bound(params, kmax),
        check_large_weights(params, kmax),
        check_integral_differences(params, pair_budget),
        check_scaling(params, kmax),
        check_digit_append(params, kmax),
        check_subadditivity(params, subadditive_budget),
        check_small_index_closed_form(params),
    ]
    for item in items:
        if not item.passed:
            logger.warning("%s failed: %s", item.name, item.counterexample)
    return PropertyReport(title=f"weight properties p={params.p}", items=items)
