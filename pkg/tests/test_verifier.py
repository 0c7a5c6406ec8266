from fractions import Fraction

import pytest

from src.monna_periods.config import RunConfig
from src.monna_periods.enums import Status
from src.monna_periods.exceptions import ConfigurationError
from src.monna_periods.local_model import LocalNum, TowerSpec, tower_build
from src.monna_periods.omega_solver import OmegaCert, solve_omega
from src.monna_periods.padic_core import Params
from src.monna_periods.structures import SelfCheck, VerdictRecord
from src.monna_periods.verifier import (
    ExactLimits,
    PeriodData,
    audit_certificate,
    certificate_batches,
    check_congruences_s3,
    check_prop39,
    check_section4,
    exit_status,
    period_data,
    run_exact_suite,
    summarize,
    summary_lines,
    theoremA_table,
    zeta_table,
)

# pylint: disable=missing-function-docstring

P2 = Params.for_prime(2)
P3 = Params.for_prime(3)

SMALL_LIMITS = ExactLimits(
    pk_max=20,
    w_kmax=200,
    pair_budget=50,
    subadditive_budget=50,
    identity_kmax=30,
    zcap=12,
    lemma35_cap=20,
    zeta_mmax=30,
    lucas_mmax=20,
    orbit_total=12,
)


@pytest.fixture(name="tower", scope="module")
def tower_fixture() -> TowerSpec:
    # u_8^2 carries 2^-14, so W = 18 leaves room
    return tower_build(P2, f=2, n=1, precision=16, guard=2)


@pytest.fixture(name="cert")
def cert_fixture(tower: TowerSpec) -> OmegaCert:
    # not the period: a fixed element of the right valuation, enough for bookkeeping checks
    return OmegaCert(
        tower=tower,
        omega=LocalNum.monomial(tower, 2, (1, 1)),
        torsion_level=1,
        truncation=16,
        zeta_choice=0,
        residue_branch=0,
        selfchecks=[SelfCheck("valuation", True)],
    )


def _records(*statuses: Status) -> list[VerdictRecord]:
    return [
        VerdictRecord(f"fam{i % 2}:x={i}", "claim", status, "m", "e") for i, status in enumerate(statuses)
    ]


# ----- zeta table -----


def test_zeta_table_values_p3() -> None:
    table = zeta_table(P3, 3)
    assert table[(0, 3)] == 0
    assert table[(1, 3)] == Fraction(1, 5)
    assert table[(2, 3)] == Fraction(18, 55)
    assert table.violations == []
    assert table.to_json()["values"]["2,3"] == "18/55"


@pytest.mark.parametrize("p", [2, 3, 5])
def test_zeta_table_last_column_divisible_by_p(p: int) -> None:
    assert not zeta_table(Params.for_prime(p), 300).violations


def test_zeta_table_rejects_negative_range() -> None:
    with pytest.raises(ValueError, match="mmax >= 0"):
        zeta_table(P2, -1)


# ----- Exact suite -----


@pytest.mark.parametrize("params", [P2, P3])
def test_run_exact_suite_small_limits(params: Params) -> None:
    records = run_exact_suite(params, SMALL_LIMITS)
    assert [record.status for record in records] == [Status.PASS] * len(records)
    ids = [record.check_id for record in records]
    assert ids[0] == "prop1.1"
    assert ids[-3:] == ["lemma3.10", "lucas", "lemma4.4"]
    assert {"lemma3.5", "prop3.7", "functional-equation", "prop2.1(3)"} <= set(ids)


@pytest.mark.slow
@pytest.mark.parametrize("params", [P2, P3])
def test_run_exact_suite_default_limits(params: Params) -> None:
    assert exit_status(run_exact_suite(params)) == 0


# ----- Period data -----


def test_period_data_bounds(cert: OmegaCert) -> None:
    data = period_data(cert, 8)
    assert data.kmax == 8
    assert data.u(1) == cert.omega
    assert data.product([0, 1, 1]) == cert.omega * cert.omega
    for bad in (0, 17):
        with pytest.raises(ConfigurationError, match="kmax must lie"):
            period_data(cert, bad)


def test_reading_is_capped_by_the_smallest_cutoff(cert: OmegaCert) -> None:
    data = period_data(cert, 16)
    # accuracy 2/3 + floor(log_4 16) less floor(log_4 16)
    assert data.cutoffs[16] == Fraction(2, 3)
    reading = data.reading(LocalNum.from_rational(cert.tower, 4), [1, 16])
    assert reading.is_exact is False
    assert reading.value == Fraction(2, 3)


# ----- Row layout at a fixed element -----


def test_theorem_a_table_rows(cert: OmegaCert) -> None:
    records = theoremA_table(cert, 8)
    ids = [record.check_id for record in records]
    assert ids[:8] == [f"thmA:k={k}" for k in range(1, 9)]
    assert ids[8:12] == [f"thmA-pow:j={j}" for j in range(4)]
    assert ids[12:] == [f"thmA-strong:n={n}" for n in range(1, 5)]
    first = records[0]
    assert first.expected == "2/3"
    assert first.status is Status.PASS
    assert first.data["gauss_ties"] == 1


def test_congruence_rows(cert: OmegaCert) -> None:
    records = check_congruences_s3(cert, 8)
    families = summarize(records)["families"]
    assert {family: counts["total"] for family, counts in families.items()} == {
        "prop3.1": 8,
        "cor3.2": 4,
        "cor3.3": 4,
        "cor3.4": 4,
        "cor3.6": 2,
        "cor3.8": 7,
    }


def test_prop39_rows(cert: OmegaCert) -> None:
    assert not check_prop39(cert, [0, 1])
    data = period_data(cert, 8)
    records = check_prop39(cert, range(2, 4), data)
    assert [record.check_id for record in records] == [
        "prop3.9:m=2,i=0",
        "prop3.9:m=2,i=1",
        "prop3.9:m=3,i=0",
        "prop3.9:m=3,i=1",
    ]
    assert records[1].data["zeta"] == "2/5"
    assert records[3].data["zeta"] == "4/7"
    with pytest.raises(ConfigurationError, match="u_9"):
        check_prop39(cert, [4], data)


def test_orbit_sum_matches_series_power(cert: OmegaCert) -> None:
    records = check_section4(cert, 2)
    orbit_rows = [record for record in records if record.check_id.startswith("lemma4.3")]
    assert len(orbit_rows) == 2
    assert all(record.status is Status.PASS for record in orbit_rows)
    first_level = [record.check_id for record in records if ":n=1" in record.check_id]
    assert first_level == [
        "s4-star:n=1,k=(4,0)",
        "s4-star:n=1,k=(3,1)",
        "lemma4.5:n=1,k=(3,1)",
        "lemma4.5:n=1,k=(2,2)",
        "lemma4.3:n=1",
        "s4-diamond:n=1",
        "s4-pu:n=1",
        "s4-final:n=1",
    ]


@pytest.mark.parametrize("nmax", [0, 8])
def test_section4_range_is_checked(cert: OmegaCert, nmax: int) -> None:
    with pytest.raises(ConfigurationError, match="nmax"):
        check_section4(cert, nmax)


def test_certificate_batches_defaults(cert: OmegaCert) -> None:
    batches = certificate_batches(cert, 8)
    assert len(batches) == 4
    assert len(certificate_batches(cert, 3)) == 3


@pytest.mark.parametrize("m_range, nmax, match", [(range(2, 5), None, "u_9"), (None, 3, "nmax=3")])
def test_certificate_batches_reject_ranges_beyond_kmax(
    cert: OmegaCert, m_range: range | None, nmax: int | None, match: str
) -> None:
    with pytest.raises(ConfigurationError, match=match):
        certificate_batches(cert, 8, m_range, nmax)


def test_section4_rows_turn_inconclusive_when_precision_runs_out() -> None:
    tower = tower_build(P2, f=2, n=1, precision=2, guard=0)
    half = LocalNum.from_rational(tower, Fraction(1, 2))
    cert = OmegaCert(
        tower=tower,
        omega=half,
        torsion_level=1,
        truncation=4,
        zeta_choice=0,
        residue_branch=0,
    )
    # any product of two values needs p^-2, beyond the two digits of the window
    data = PeriodData(cert, [LocalNum.one(tower), *[half] * 4], [Fraction(2)] * 5)
    records = {record.check_id: record for record in check_section4(cert, 1, data)}
    exhausted = [
        "s4-star:n=1,k=(3,1)",
        "lemma4.5:n=1,k=(3,1)",
        "lemma4.5:n=1,k=(2,2)",
        "lemma4.3:n=1",
        "s4-diamond:n=1",
        "s4-final:n=1",
    ]
    for check_id in exhausted:
        assert records[check_id].status is Status.INCONCLUSIVE
        assert records[check_id].measured == "precision exhausted"
    assert records["s4-star:n=1,k=(4,0)"].measured == "0"
    assert records["s4-pu:n=1"].status is not Status.INCONCLUSIVE


def test_congruence_rows_turn_inconclusive_when_precision_runs_out() -> None:
    tower = tower_build(P2, f=2, n=1, precision=2, guard=0)
    half = LocalNum.from_rational(tower, Fraction(1, 2))
    cert = OmegaCert(
        tower=tower,
        omega=half,
        torsion_level=1,
        truncation=5,
        zeta_choice=0,
        residue_branch=0,
    )
    data = PeriodData(cert, [LocalNum.one(tower), *[half] * 5], [Fraction(2)] * 6)
    records = {record.check_id: record for record in check_congruences_s3(cert, 4, data)}
    records |= {record.check_id: record for record in check_prop39(cert, [2], data)}
    exhausted = ["prop3.1:j=2", "cor3.3:m=1", "cor3.8:k=2", "cor3.8:k=4", "prop3.9:m=2,i=1"]
    for check_id in exhausted:
        assert records[check_id].status is Status.INCONCLUSIVE
        assert records[check_id].measured == "precision exhausted"
    assert records["prop3.9:m=2,i=0"].measured != "precision exhausted"


# ----- Audit -----


def test_audit_flags_tampered_period(cert: OmegaCert) -> None:
    cert.omega = cert.omega * 2
    cert.selfchecks.append(SelfCheck("torsion", False))
    records = {record.check_id: record for record in audit_certificate(cert)}
    assert records["audit:valuation"].status is Status.FAIL
    assert records["audit:valuation"].measured == "5/3"
    assert records["audit:selfchecks"].status is Status.FAIL
    assert records["audit:selfchecks"].measured == "torsion"


# ----- Summaries -----


def test_summarize_counts_families() -> None:
    records = _records(Status.PASS, Status.PASS, Status.FAIL, Status.INCONCLUSIVE)
    summary = summarize(records)
    assert (summary["total"], summary["pass"], summary["fail"], summary["inconclusive"]) == (4, 2, 1, 1)
    assert summary["families"]["fam0"] == {"pass": 1, "fail": 1, "inconclusive": 0, "total": 2}
    assert summary_lines(summary) == ["fam0: 1/2 pass, 1 fail", "fam1: 1/2 pass, 1 inconclusive"]


@pytest.mark.parametrize(
    "statuses, expected",
    [
        ((Status.PASS, Status.PASS), 0),
        ((Status.PASS, Status.INCONCLUSIVE), 2),
        ((Status.INCONCLUSIVE, Status.FAIL), 1),
        ((), 0),
    ],
)
def test_exit_status(statuses: tuple[Status, ...], expected: int) -> None:
    assert exit_status(_records(*statuses)) == expected


# ----- Acceptance at the default tower -----


@pytest.mark.slow
def test_theorem_a_at_the_period_p2() -> None:
    cert = solve_omega(P2, RunConfig.defaults(2))
    records = theoremA_table(cert, 64)
    rows = [record for record in records if record.check_id.startswith("thmA:")]
    assert len(rows) == 64
    assert all(record.status is Status.PASS for record in rows)
    assert exit_status(audit_certificate(cert)) == 0


@pytest.mark.slow
def test_theorem_a_at_the_period_p3() -> None:
    cert = solve_omega(P3, RunConfig.defaults(3))
    records = theoremA_table(cert, 27)
    rows = [record for record in records if record.check_id.startswith("thmA:")]
    assert len(rows) == 27
    assert rows[0].expected == "3/8"
    assert all(record.status is Status.PASS for record in records)


@pytest.mark.slow
@pytest.mark.parametrize("p, kmax", [(2, 15), (3, 8)])
def test_congruences_at_the_period(p: int, kmax: int) -> None:
    # below q^2 every mod p^2 reading of the default tower is decided
    params = Params.for_prime(p)
    cert = solve_omega(params, RunConfig.defaults(p))
    records = [record for batch in certificate_batches(cert, kmax) for record in batch()]
    families = summarize(records)["families"]
    assert {"prop3.1", "cor3.3", "cor3.8"} <= families.keys()
    if p == 2:
        assert {"prop3.9", "lemma4.3", "s4-diamond", "s4-final"} <= families.keys()
    assert exit_status(records) == 0
