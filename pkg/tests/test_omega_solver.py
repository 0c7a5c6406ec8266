from fractions import Fraction
from unittest.mock import Mock

import pytest

from src.monna_periods.config import RunConfig, tail_bound
from src.monna_periods.exceptions import CertificateFormatError, TailBoundError
from src.monna_periods.local_model import LocalNum, TowerSpec, cyclotomic_root, ring_val, tower_build
from src.monna_periods.lubin_tate import log_polynomial_model, pk_combinatorial
from src.monna_periods.omega_solver import (
    CERTIFICATE_SCHEMA,
    OmegaCert,
    SolverEquation,
    _selfchecks,
    accuracy,
    floor_log,
    guard_digits,
    integrality,
    reading_cutoff,
    residue_search,
    solve_omega,
    solver_equation,
    special_values,
    torsion_points,
    valuation_table,
)
from src.monna_periods.padic_core import Params, ValueV
from src.monna_periods.series import YPoly, ypoly_eval
from src.monna_periods.structures import SelfCheck

# pylint: disable=missing-function-docstring

P2 = Params.for_prime(2)
P3 = Params.for_prime(3)


@pytest.fixture(name="tower")
def tower_fixture() -> TowerSpec:
    return tower_build(P2, f=2, n=1, precision=10, guard=2)


def _certificate(tower: TowerSpec) -> OmegaCert:
    return OmegaCert(
        tower=tower,
        omega=LocalNum.monomial(tower, 2) / 2,
        torsion_level=tower.n,
        truncation=31,
        zeta_choice=0,
        residue_branch=1,
        selfchecks=[SelfCheck("valuation", True, {"measured": "2/3"})],
        config={"p": 2},
    )


# ----- Precision bookkeeping -----


@pytest.mark.parametrize("k, base, expected", [(1, 4, 0), (15, 4, 1), (16, 4, 2), (64, 4, 3), (80, 9, 1)])
def test_floor_log(k: int, base: int, expected: int) -> None:
    assert floor_log(k, base) == expected


def test_accuracy_and_reading_cutoff(tower: TowerSpec) -> None:
    assert accuracy(P2, 160) == Fraction(11, 3)
    assert accuracy(P3, 145) == Fraction(3, 8) + 2
    one = LocalNum.one(tower)
    assert reading_cutoff(P2, 160, 1, one) == Fraction(11, 3)
    assert reading_cutoff(P2, 160, 16, one) == Fraction(5, 3)
    # the effective precision caps the cutoff when it is smaller
    small = LocalNum.from_rational(tower, Fraction(1, 2**11))
    assert reading_cutoff(P2, 160, 1, small) == 1


def test_guard_digits_counts_denominators() -> None:
    table = [YPoly.one(), YPoly({2: Fraction(1, 8)}), YPoly({3: Fraction(5, 3)})]
    assert guard_digits(P2, 2, [table]) == 5
    assert guard_digits(P3, 1, [table]) == 2
    assert guard_digits(P3, 5, [table]) == 3


# ----- Torsion points and special values -----


def test_torsion_points_satisfy_layer_equations() -> None:
    tower = tower_build(P2, f=2, n=2, precision=3, guard=1)
    t_1, t_2 = torsion_points(tower)
    assert t_2 == LocalNum.monomial(tower, 1)
    assert t_1 == t_2**4 + t_2 * 2
    assert t_1**3 == -2
    assert ring_val(t_1) == ValueV.finite(Fraction(1, 3))
    assert ring_val(t_2) == ValueV.finite(Fraction(1, 12))


def test_special_values_match_polynomial_evaluation(tower: TowerSpec) -> None:
    omega = LocalNum.monomial(tower, 2, (1, 1))
    values = special_values(omega, 8)
    assert values[0] == 1
    assert values[1] == omega
    for k in range(9):
        assert values[k] == ypoly_eval(pk_combinatorial(k, P2), omega)


def test_integrality_reads_worst_denominator(tower: TowerSpec) -> None:
    one = LocalNum.one(tower)
    # P_2(1) = 1/2, P_4(1) = 13/24
    assert integrality(one, 1) == 0
    assert integrality(one, 3) == -1
    assert integrality(one, 4) == -3
    assert integrality(LocalNum.monomial(tower, 2) * 4, 6) == 0


def test_valuation_table_caps_high_readings(tower: TowerSpec) -> None:
    omega = LocalNum.monomial(tower, 2)
    table = valuation_table(omega, 15, 3)
    assert table[0] == ValueV.finite(0)
    assert table[1] == ValueV.finite(Fraction(2, 3))
    # accuracy is 2/3 + 1 for K = 15, so u_2 of valuation 1/3 is still exact
    assert table[2] == ValueV.finite(Fraction(1, 3))
    assert all(reading.value is not None and reading.value <= Fraction(5, 3) for reading in table)


# ----- Torsion equation -----


def test_solver_equation_enforces_tail_bound(tower: TowerSpec) -> None:
    zeta = cyclotomic_root(tower)
    bound = tail_bound(P2, 1, tower.precision)
    assert bound == 30
    with pytest.raises(TailBoundError) as excinfo:
        solver_equation(tower, bound, zeta)
    assert excinfo.value.truncation == 30


def test_solver_equation_linear_term_is_truncated_log() -> None:
    tower = tower_build(P2, f=2, n=1, precision=2, guard=6)
    equation = solver_equation(tower, 7, cyclotomic_root(tower))
    zero = LocalNum.zero(tower)
    assert equation.torsion_image(zero) == 0
    # the Y-linear part of P0_k is the k-th log coefficient
    log = log_polynomial_model(P2, 8)
    t = LocalNum.monomial(tower, 1)
    expected = sum((t**k * log[k] for k in range(1, 8)), zero)
    assert equation.derivative(zero) == expected


def test_residue_search_needs_f_divisible_by_two() -> None:
    tower = tower_build(P2, f=1, n=1, precision=2, guard=6)
    equation = solver_equation(tower, 7, cyclotomic_root(tower))
    assert not residue_search(tower, equation)


def test_residue_search_candidates_have_leading_valuation() -> None:
    tower = tower_build(P2, f=2, n=1, precision=2, guard=6)
    equation = solver_equation(tower, 7, cyclotomic_root(tower))
    candidates = residue_search(tower, equation)
    assert 1 <= len(candidates) <= 3
    assert all(ring_val(c) == ValueV.finite(Fraction(2, 3)) for c in candidates)


# ----- Certificates -----


def test_certificate_json_round_trip(tower: TowerSpec) -> None:
    cert = _certificate(tower)
    data = cert.to_json()
    assert data["schema"] == CERTIFICATE_SCHEMA
    assert data["valid"] is True
    loaded = OmegaCert.from_json(data)
    assert loaded.tower == tower
    assert loaded.omega == cert.omega
    assert loaded.residue_branch == 1
    assert loaded.selfchecks == cert.selfchecks


def test_certificate_rejects_unknown_schema(tower: TowerSpec) -> None:
    data = _certificate(tower).to_json() | {"schema": "other/1"}
    with pytest.raises(CertificateFormatError, match="unknown schema"):
        OmegaCert.from_json(data, "cert.json")


def test_certificate_rejects_missing_fields(tower: TowerSpec) -> None:
    data = _certificate(tower).to_json()
    del data["omega"]
    with pytest.raises(CertificateFormatError) as excinfo:
        OmegaCert.from_json(data, "cert.json")
    assert excinfo.value.path == "cert.json"


def test_solve_omega_rejects_foreign_config() -> None:
    with pytest.raises(ValueError, match="different parameters"):
        solve_omega(P3, RunConfig.defaults(2))


# ----- Acceptance at the default towers -----


@pytest.mark.slow
@pytest.mark.parametrize("p", [2, 3])
def test_solve_omega_defaults(p: int) -> None:
    params = Params.for_prime(p)
    cert = solve_omega(params, RunConfig.defaults(p))
    assert cert.valid
    assert ring_val(cert.omega) == ValueV.finite(params.omega_valuation)
    assert integrality(cert.omega, cert.truncation) >= 0
    assert {check.name for check in cert.selfchecks} >= {"valuation", "integrality", "torsion", "stability"}


# ----- Self-checks at the edge of the working precision -----


def test_selfchecks_report_exhausted_precision_as_failures() -> None:
    tower = tower_build(P2, f=2, n=1, precision=2, guard=0)
    half = LocalNum.from_rational(tower, Fraction(1, 2))
    # (1 + 1/2)^2 needs p^-2, one digit more than the window holds
    equation = Mock(spec=SolverEquation)
    equation.torsion_image.return_value = half
    config = RunConfig.defaults(2, n=1)
    checks = {check.name: check for check in _selfchecks(config, tower, equation, half)}
    assert checks["valuation"].passed is False
    assert checks["integrality"].passed is False
    assert "Precision exhausted" in checks["integrality"].data["error"]
    assert checks["torsion"].passed is False
    assert checks["torsion"].data["required"] == 3


@pytest.mark.slow
def test_torsion_selfcheck_at_the_default_tower_p2() -> None:
    cert = solve_omega(P2, RunConfig.defaults(2))
    torsion = next(check for check in cert.selfchecks if check.name == "torsion")
    assert torsion.passed
    assert "error" not in torsion.data


@pytest.mark.slow
@pytest.mark.parametrize("unramified", [(2, 1, 1), (2, 2, 1)])
def test_valuation_table_does_not_depend_on_the_branch_p3(unramified: tuple[int, ...]) -> None:
    reference = solve_omega(P3, RunConfig.defaults(3))
    other = solve_omega(P3, RunConfig.defaults(3, unramified=unramified, zeta_choice=1, residue_branch=1))
    assert other.valid
    tables = [valuation_table(cert.omega, cert.truncation, 27) for cert in (reference, other)]
    assert all(reading.is_exact for table in tables for reading in table)
    assert [str(reading) for reading in tables[0]] == [str(reading) for reading in tables[1]]
