from fractions import Fraction

import pytest

from src.monna_periods.monna import (
    check_bound,
    check_digit_append,
    check_integral_differences,
    check_large_weights,
    check_scaling,
    check_small_index_closed_form,
    check_subadditivity,
    check_w_props,
    monna,
    w,
)
from src.monna_periods.padic_core import Params

# pylint: disable=missing-function-docstring

P2 = Params.for_prime(2)
P3 = Params.for_prime(3)


@pytest.mark.parametrize(
    "k, expected",
    [
        (0, Fraction(0)),
        (1, Fraction(2, 3)),
        (2, Fraction(1, 3)),
        (3, Fraction(1)),
        (4, Fraction(1, 6)),
        (7, Fraction(7, 6)),
        (12, Fraction(1, 4)),
    ],
)
def test_w_values_p2(k: int, expected: Fraction) -> None:
    assert w(k, P2) == expected


@pytest.mark.parametrize(
    "k, expected", [(1, Fraction(3, 8)), (3, Fraction(1, 8)), (8, Fraction(1)), (9, Fraction(1, 24))]
)
def test_w_values_p3(k: int, expected: Fraction) -> None:
    assert w(k, P3) == expected


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_w_is_scaled_monna(p: int) -> None:
    params = Params.for_prime(p)
    for k in range(500):
        assert w(k, params) == Fraction(p * p, params.q - 1) * monna(k, p)


def test_monna_values() -> None:
    assert monna(1, 2) == Fraction(1, 2)
    assert monna(6, 2) == Fraction(3, 8)
    assert monna(0, 5) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_q_minus_one_has_weight_one(p: int) -> None:
    params = Params.for_prime(p)
    assert w(params.q - 1, params) == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_individual_properties_pass(p: int) -> None:
    params = Params.for_prime(p)
    assert check_bound(params, 3000).passed
    assert check_large_weights(params, 3000).passed
    assert check_scaling(params, 3000).passed
    assert check_digit_append(params, 3000).passed
    assert check_subadditivity(params, 300).passed
    assert check_small_index_closed_form(params).passed


def test_integral_differences_counts_witnesses() -> None:
    result = check_integral_differences(P2, 100)
    assert result.passed
    # pairs (4j, 4j + 3) with 4j + 3 <= 100
    assert result.data["witnesses"] == 25


@pytest.mark.parametrize("p", [2, 3, 5])
def test_check_w_props_report(p: int) -> None:
    report = check_w_props(Params.for_prime(p), 2000, 500)
    assert report.passed
    assert [item.name for item in report.items] == [
        "prop2.1(1)",
        "prop2.1(2)",
        "prop2.1(3)",
        "prop2.1(4)",
        "prop2.1(5)",
        "prop2.1(6)",
        "lemma1.2",
    ]
    assert report.to_json()["passed"] is True


def test_check_w_props_rejects_small_bound() -> None:
    with pytest.raises(ValueError, match="kmax >= q=9"):
        check_w_props(P3, 5, 5)


@pytest.mark.slow
def test_check_w_props_full_range() -> None:
    for p in (2, 3, 5):
        assert check_w_props(Params.for_prime(p), 10_000, 2_000, 1_500).passed
