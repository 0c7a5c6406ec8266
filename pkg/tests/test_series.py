import math
import random
from fractions import Fraction

import pytest

from src.monna_periods.exceptions import SeriesDomainError
from src.monna_periods.series import (
    RATIONALS,
    YPOLYS,
    YPoly,
    ZSeries,
    factorial_inverse,
    series_compose,
    series_exp,
    series_inverse,
    series_mul,
    series_pow,
    series_reversion,
    ypoly_eval,
)

# pylint: disable=missing-function-docstring


def _random_series(rng: random.Random, cap: int, constant: bool = False) -> ZSeries[Fraction]:
    coefficients = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(cap)]
    if not constant:
        coefficients[0] = Fraction(0)
    return ZSeries(coefficients, cap, RATIONALS)


# ----- YPoly -----


def test_ypoly_drops_zero_coefficients() -> None:
    poly = YPoly({0: 0, 2: Fraction(1, 8), 5: 0})
    assert len(poly) == 1
    assert poly.degree == 2
    assert YPoly.zero().degree == -1
    assert not YPoly.zero()


def test_ypoly_arithmetic() -> None:
    y = YPoly.monomial(1)
    square = (y + 1) * (y - 1)
    assert square == YPoly({2: 1, 0: -1})
    assert square + 1 == y * y
    assert 2 * y / 4 == YPoly.monomial(1, Fraction(1, 2))
    assert (y * y * y).derivative() == YPoly.monomial(2, 3)
    assert YPoly.one() == 1


def test_ypoly_str() -> None:
    poly = YPoly({8: Fraction(1, 40320), 5: Fraction(1, 48), 2: Fraction(1, 8)})
    assert str(poly) == "Y^8/40320 + Y^5/48 + Y^2/8"
    assert str(YPoly({1: 1})) == "Y"
    assert str(YPoly({3: Fraction(-3, 4), 0: 2})) == "-3*Y^3/4 + 2"
    assert str(YPoly.zero()) == "0"


def test_ypoly_json() -> None:
    poly = YPoly({2: Fraction(1, 8), 5: Fraction(-1, 48)})
    assert poly.to_json() == {"2": "1/8", "5": "-1/48"}
    assert YPoly.from_json(poly.to_json()) == poly


def test_ypoly_rejects_negative_exponent() -> None:
    with pytest.raises(ValueError, match="Negative Y-exponent"):
        YPoly({-1: 1})


def test_ypoly_eval_matches_dense_evaluation() -> None:
    poly = YPoly({0: 3, 4: Fraction(1, 24), 9: Fraction(-2, 7)})
    x = Fraction(3, 5)
    assert ypoly_eval(poly, x) == 3 + x**4 / 24 - Fraction(2, 7) * x**9
    assert ypoly_eval(YPoly.zero(), x) == 0


# ----- ZSeries -----


def test_zseries_cap_and_indexing() -> None:
    series = ZSeries.from_terms({1: Fraction(1), 7: Fraction(2)}, 5, RATIONALS)
    assert series.cap == 5
    assert series[1] == 1
    assert series.order == 1
    with pytest.raises(IndexError, match="Z\\^5"):
        _ = series[5]


def test_series_mul_truncates_to_smaller_cap() -> None:
    a = ZSeries([Fraction(1), Fraction(1)], 6, RATIONALS)
    b = ZSeries([Fraction(1), Fraction(-1)], 4, RATIONALS)
    product = series_mul(a, b)
    assert product.cap == 4
    assert product == ZSeries([Fraction(1), 0, Fraction(-1)], 4, RATIONALS)


def test_series_pow_binomial() -> None:
    base = ZSeries([Fraction(1), Fraction(1)], 10, RATIONALS)
    power = series_pow(base, 7)
    assert [power[n] for n in range(10)] == [math.comb(7, n) for n in range(10)]
    with pytest.raises(SeriesDomainError):
        series_pow(base, -1)


def test_series_inverse_geometric() -> None:
    one_minus_z = ZSeries([Fraction(1), Fraction(-1)], 12, RATIONALS)
    inverse = series_inverse(one_minus_z)
    assert all(inverse[n] == 1 for n in range(12))


def test_series_compose_is_associative() -> None:
    rng = random.Random(7)
    f, g, h = (_random_series(rng, 9) for _ in range(3))
    assert series_compose(series_compose(f, g), h) == series_compose(f, series_compose(g, h))


def test_series_compose_sparse_and_dense_agree() -> None:
    rng = random.Random(11)
    g = _random_series(rng, 40)
    sparse = ZSeries.from_terms({1: Fraction(1), 16: Fraction(1, 2), 32: Fraction(1, 4)}, 40, RATIONALS)
    via_sparse = series_compose(sparse, g)
    # reference: plain Horner over every coefficient
    horner = ZSeries.constant(Fraction(0), 40, RATIONALS)
    for k in range(39, -1, -1):
        horner = series_mul(horner, g)
        horner.coefficients[0] += sparse[k]
    assert via_sparse == horner


def test_series_compose_rejects_constant_term() -> None:
    f = ZSeries.variable(5, RATIONALS)
    g = ZSeries([Fraction(1), Fraction(1)], 5, RATIONALS)
    with pytest.raises(SeriesDomainError, match="nonzero constant term"):
        series_compose(f, g)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_series_reversion_round_trip(seed: int) -> None:
    rng = random.Random(seed)
    f = _random_series(rng, 16)
    f.coefficients[1] = Fraction(rng.randint(1, 9), rng.randint(1, 4))
    g = series_reversion(f)
    identity = ZSeries.variable(16, RATIONALS)
    assert series_compose(f, g) == identity
    assert series_compose(g, f) == identity


def test_series_reversion_domain_errors() -> None:
    with pytest.raises(SeriesDomainError, match="f\\(0\\) = 0"):
        series_reversion(ZSeries([Fraction(1), Fraction(1)], 4, RATIONALS))
    with pytest.raises(SeriesDomainError, match="invertible linear"):
        series_reversion(ZSeries.from_terms({2: Fraction(1)}, 4, RATIONALS))


def test_series_exp_of_z_is_exponential() -> None:
    exp = series_exp(ZSeries.variable(12, RATIONALS))
    assert [exp[n] for n in range(12)] == [factorial_inverse(n) for n in range(12)]


def test_series_exp_over_ypoly() -> None:
    # exp(Y Z) has Z^n coefficient Y^n / n!
    f = ZSeries.from_terms({1: YPoly.monomial(1)}, 8, YPOLYS)
    exp = series_exp(f)
    assert all(exp[n] == YPoly.monomial(n, factorial_inverse(n)) for n in range(8))


def test_series_exp_rejects_constant_term() -> None:
    with pytest.raises(SeriesDomainError):
        series_exp(ZSeries([Fraction(1)], 3, RATIONALS))
