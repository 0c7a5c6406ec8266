"""
Valuation table and congruence checks evaluated at a certified period.

Every statement instance becomes a :class:`VerdictRecord`. A reading of
val(x) is only trusted below the cutoff of the indices it was built from;
above it the reading is a lower bound and a statement it cannot decide is
reported as ``inconclusive-precision`` rather than guessed.
"""

import logging
import math
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from operator import methodcaller, mul
from typing import Any

from .enums import ModelKind, Status
from .exceptions import ConfigurationError, PrecisionExhaustedError
from .local_model import LocalNum, local_ring, ring_val
from .lubin_tate import (
    LTModel,
    check_lemma35,
    composed_with_mul_p,
    gauss_profile,
    identity_divbyu1,
    identity_functional_eq,
    pk_combinatorial,
    pk_series,
)
from .monna import check_w_props, w
from .omega_solver import OmegaCert, integrality, reading_cutoff, special_values
from .padic_core import (
    Params,
    ValueV,
    binom_mod_p,
    enumerate_reps,
    format_rational,
    orbit_size,
    val_p_int,
    val_p_rat,
)
from .series import ZSeries, series_pow, ypoly_eval
from .structures import CheckResult, VerdictRecord

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "monna-periods/report/1"

RecordBatch = Callable[[], list[VerdictRecord]]


@dataclass(frozen=True)
class ExactLimits:
    """Ranges of the checks that need no period approximation."""

    pk_max: int = 200
    w_kmax: int = 10_000
    pair_budget: int = 2_000
    subadditive_budget: int = 1_500
    identity_kmax: int = 200
    zcap: int = 20
    lemma35_cap: int = 50
    zeta_mmax: int = 500
    lucas_mmax: int = 200
    orbit_total: int = 30


@dataclass
class PeriodData:
    """u_0..u_kmax at the certified period together with their reading cutoffs."""

    cert: OmegaCert
    values: list[LocalNum]
    cutoffs: list[Fraction]

    @property
    def params(self) -> Params:
        return self.cert.params

    @property
    def kmax(self) -> int:
        return len(self.values) - 1

    def u(self, k: int) -> LocalNum:
        return self.values[k]

    def product(self, indices: Iterable[int]) -> LocalNum:
        result = LocalNum.one(self.cert.tower)
        for k in indices:
            if k:
                result = result * self.values[k]
        return result

    def reading(self, element: LocalNum, indices: Iterable[int]) -> ValueV:
        """val(element), trusted only below the smallest cutoff among ``indices``."""
        cutoff = min((self.cutoffs[k] for k in indices), default=Fraction(element.effective_precision))
        return ring_val(element).capped(min(cutoff, Fraction(element.effective_precision)))


def period_data(cert: OmegaCert, kmax: int) -> PeriodData:
    """
    Evaluate u_0..u_kmax at the certified period.

    Args:
        cert (OmegaCert): The certificate.
        kmax (int): Last index, at most the certificate's truncation K.

    Raises:
        ConfigurationError: If kmax lies outside [1, K].
    """
    if not 1 <= kmax <= cert.truncation:
        raise ConfigurationError(
            f"kmax must lie in [1, K={cert.truncation}] for this certificate, got {kmax}."
        )
    values = special_values(cert.omega, kmax)
    cutoffs = [
        reading_cutoff(cert.params, cert.truncation, k, value) for k, value in enumerate(values)
    ]
    logger.info("Evaluated u_0..u_%s at the certified period.", kmax)
    return PeriodData(cert, values, cutoffs)


def _status(decision: bool | None) -> Status:
    if decision is None:
        return Status.INCONCLUSIVE
    return Status.PASS if decision else Status.FAIL


def _combine(*decisions: bool | None) -> bool | None:
    if any(decision is False for decision in decisions):
        return False
    if any(decision is None for decision in decisions):
        return None
    return True


def _vector(k: Sequence[int]) -> str:
    return "(" + ",".join(str(entry) for entry in k) + ")"


def _record(
    check_id: str,
    claim: str,
    decision: bool | None,
    measured: ValueV | str,
    expected: str,
    **data: Any,
) -> VerdictRecord:
    return VerdictRecord(
        check_id=check_id,
        claim=claim,
        status=_status(decision),
        measured=str(measured),
        expected=expected,
        data=data,
    )


EXHAUSTED = "precision exhausted"


def _guarded(compute: Callable[..., LocalNum], *args: Any) -> LocalNum | None:
    """compute(*args), or None when it runs out of working precision."""
    try:
        return compute(*args)
    except PrecisionExhaustedError as e:
        logger.debug("Computation gave up: %s", e)
        return None


def _reading_record(
    check_id: str,
    claim: str,
    reading: ValueV | None,
    decide: Callable[[ValueV], bool | None],
    expected: str,
    **data: Any,
) -> VerdictRecord:
    """A record decided by ``decide``; a missing reading is inconclusive."""
    if reading is None:
        return _record(check_id, claim, None, EXHAUSTED, expected, **data)
    return _record(check_id, claim, decide(reading), reading, expected, **data)


def theoremA_table(cert: OmegaCert, kmax: int, data: PeriodData | None = None) -> list[VerdictRecord]:
    """
    val u_k = w(k) for 1 <= k <= kmax, with the Gauss profile of P_k on every row.

    Rows tagged ``thmA-pow`` repeat the check for k = p^j (j <= 5), and
    ``thmA-strong`` rows check val u_n = w(n) = p * val u_{pn}.

    Args:
        cert (OmegaCert): The certificate.
        kmax (int): Last row of the table.
        data (PeriodData | None, optional): Values already evaluated. Defaults to evaluating them.
    """
    data = data or period_data(cert, kmax)
    params = cert.params
    polys = pk_series(kmax, params, LTModel(ModelKind.SPECIAL, params, kmax + 1))
    readings = [data.reading(data.u(k), [k]) for k in range(kmax + 1)]
    records = []
    for k in range(1, kmax + 1):
        expected = w(k, params)
        profile = gauss_profile(polys[k], params)
        records.append(
            _record(
                f"thmA:k={k}",
                f"val_p(P_{k}(Omega)) = w({k})",
                readings[k].equals(expected),
                readings[k],
                format_rational(expected),
                gauss_min=format_rational(profile.min_value),
                gauss_ties=profile.tie_count,
                cutoff=format_rational(data.cutoffs[k]),
            )
        )

    j = 0
    while params.p**j <= kmax and j <= 5:
        k = params.p**j
        expected = params.omega_valuation / params.p**j
        records.append(
            _record(
                f"thmA-pow:j={j}",
                f"val_p(u_{k}) = (p/(q-1)) p^-{j}",
                readings[k].equals(expected),
                readings[k],
                format_rational(expected),
            )
        )
        j += 1

    for n in range(1, kmax // params.p + 1):
        expected = w(n, params)
        upper = readings[params.p * n]
        decision = _combine(readings[n].equals(expected), upper.equals(expected / params.p))
        records.append(
            _record(
                f"thmA-strong:n={n}",
                f"val_p(u_{n}) = w({n}) = p val_p(u_{params.p * n})",
                decision,
                f"{readings[n]}; {upper}",
                f"{format_rational(expected)}; {format_rational(expected / params.p)}",
            )
        )
    return records


def check_congruences_s3(
    cert: OmegaCert, kmax: int, data: PeriodData | None = None
) -> list[VerdictRecord]:
    """
    Coefficientwise congruence of sum u_m Z^{qm} with sum u_k^p Z^{kp} and its consequences.

    Congruences modulo p times the maximal ideal are strict (val > 1), those
    modulo p^2 are weak (val >= 2).

    Args:
        cert (OmegaCert): The certificate.
        kmax (int): Largest index of u_k involved.
        data (PeriodData | None, optional): Values already evaluated. Defaults to evaluating them.
    """
    data = data or period_data(cert, kmax)
    params = cert.params
    p, q = params.p, params.q
    u = data.u
    records = []

    powers = {k: _guarded(pow, u(k), p) for k in range(1, kmax + 1)}
    for j in range(p, p * kmax + 1, p):
        k = j // p
        power = powers[k]
        if j % q == 0:
            m = j // q
            element = None if power is None else u(m) - power
            indices = [m, k]
            claim = f"u_{m} = u_{k}^{p} mod p*m"
        else:
            element, indices = power, [k]
            claim = f"u_{k}^{p} = 0 mod p*m"
        records.append(
            _reading_record(
                f"prop3.1:j={j}",
                claim,
                None if element is None else data.reading(element, indices),
                methodcaller("greater_than", 1),
                "> 1",
            )
        )

    for k in range(1, kmax + 1):
        if k % p:
            reading = data.reading(u(k), [k])
            bound = Fraction(1, p)
            records.append(
                _record(
                    f"cor3.2:k={k}",
                    f"val_p(u_{k}) > 1/{p}",
                    reading.greater_than(bound),
                    reading,
                    f"> {format_rational(bound)}",
                )
            )

    for m in range(1, kmax // p + 1):
        power = powers[p * m]
        records.append(
            _reading_record(
                f"cor3.3:m={m}",
                f"u_{p * m}^{p} = u_{m} mod p*m",
                None if power is None else data.reading(power - u(m), [m, p * m]),
                methodcaller("greater_than", 1),
                "> 1",
            )
        )
        records.append(_cor34_record(data, m))

    nmax = kmax // q
    if nmax:
        left, _ = composed_with_mul_p(params, q * nmax + 1)
        for n in range(1, nmax + 1):
            coefficient = _guarded(ypoly_eval, left[q * n], cert.omega)
            records.append(
                _reading_record(
                    f"cor3.6:n={n}",
                    f"[Z^{q * n}] G([p](Z)) = u_{n} mod p^2",
                    None if coefficient is None else data.reading(coefficient - u(n), range(1, q * n + 1)),
                    methodcaller("at_least", 2),
                    ">= 2",
                )
            )

    for k in range(2, kmax + 1):
        product = _guarded(mul, u(1), u(k - 1))
        records.append(
            _reading_record(
                f"cor3.8:k={k}",
                f"u_1 u_{k - 1} = {k} u_{k} mod p",
                None if product is None else data.reading(product - u(k).scaled(k), [1, k - 1, k]),
                methodcaller("at_least", 1),
                ">= 1",
            )
        )
    return records


def _cor34_record(data: PeriodData, m: int) -> VerdictRecord:
    p = data.params.p
    base = data.reading(data.u(m), [m])
    lifted = data.reading(data.u(p * m), [p * m])
    above_one = base.greater_than(1)
    check_id = f"cor3.4:m={m}"
    measured = f"{base}; {lifted}"
    if above_one is None:
        return _record(check_id, f"val_p(u_{m}) decides the case", None, measured, "decidable case")
    if above_one:
        bound = Fraction(1, p)
        return _record(
            check_id,
            f"val_p(u_{m}) > 1 implies val_p(u_{p * m}) > 1/{p}",
            lifted.greater_than(bound),
            measured,
            f"> {format_rational(bound)}",
        )
    assert base.value is not None
    expected = base.value / p
    return _record(
        check_id,
        f"val_p(u_{p * m}) = val_p(u_{m})/{p}",
        lifted.equals(expected),
        measured,
        format_rational(expected),
    )


@dataclass
class ZetaTable:
    """zeta_{i,m} for 0 <= i <= p-1 and 0 <= m <= mmax."""

    params: Params
    mmax: int
    values: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.values[key]

    @property
    def violations(self) -> list[int]:
        """Every m with val_p(zeta_{p-1,m}) < 1."""
        p = self.params.p
        return [
            m
            for m in range(self.mmax + 1)
            if val_p_rat(self.values[(p - 1, m)], p).at_least(1) is not True
        ]

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.params.p,
            "mmax": self.mmax,
            "values": {f"{i},{m}": format_rational(v) for (i, m), v in sorted(self.values.items())},
            "violations": self.violations,
        }


def zeta_table(params: Params, mmax: int) -> ZetaTable:
    """
    zeta_{0,m} = 0 and zeta_{i,m} = ((k-q+1)/k)(zeta_{i-1,m} + 1) with k = mp + i.

    Args:
        params (Params): Prime and its derived constants.
        mmax (int): Last m.

    Raises:
        ValueError: If mmax is negative.
    """
    if mmax < 0:
        raise ValueError(f"zeta_table() requires mmax >= 0, got {mmax}.")
    p, q = params.p, params.q
    table = ZetaTable(params, mmax)
    for m in range(mmax + 1):
        table.values[(0, m)] = Fraction(0)
        for i in range(1, p):
            k = m * p + i
            table.values[(i, m)] = Fraction(k - q + 1, k) * (table.values[(i - 1, m)] + 1)
    return table


def check_prop39(
    cert: OmegaCert, m_range: Iterable[int], data: PeriodData | None = None
) -> list[VerdictRecord]:
    """
    u_{mp+i} = C(mp+i, i)^{-1} u_{mp} u_i + p zeta_{i,m} u_{p(m-p)+i+1} mod p^2, for m >= p.

    Args:
        cert (OmegaCert): The certificate.
        m_range (Iterable[int]): Values of m; those below p are skipped.
        data (PeriodData | None, optional): Values already evaluated. Defaults to evaluating them.

    Raises:
        ConfigurationError: If ``data`` stops before u_{mp+p-1} for the largest m.
    """
    params = cert.params
    p, q = params.p, params.q
    ms = sorted(m for m in m_range if m >= p)
    if not ms:
        return []
    top = ms[-1] * p + p - 1
    data = data or period_data(cert, top)
    if top > data.kmax:
        raise ConfigurationError(f"The m range needs u_{top}, only u_{data.kmax} available.")
    zetas = zeta_table(params, ms[-1])
    u = data.u
    records = []
    for m in ms:
        for i in range(p):
            k = m * p + i
            tail = k - q + 1
            zeta = zetas[(i, m)]
            approximation = _guarded(_prop39_approximation, data, m, i, zeta)
            records.append(
                _reading_record(
                    f"prop3.9:m={m},i={i}",
                    f"u_{k} = C({k},{i})^-1 u_{m * p} u_{i} + p zeta_{i},{m} u_{tail} mod p^2",
                    None if approximation is None else data.reading(u(k) - approximation, [k, m * p, i, tail]),
                    methodcaller("at_least", 2),
                    ">= 2",
                    zeta=format_rational(zeta),
                )
            )
    return records


def _prop39_approximation(data: PeriodData, m: int, i: int, zeta: Fraction) -> LocalNum:
    p = data.params.p
    k = m * p + i
    approximation = (data.u(m * p) * data.u(i)).scaled(Fraction(1, math.comb(k, i)))
    if zeta:
        approximation = approximation + data.u(k - data.params.q + 1).scaled(p * zeta)
    return approximation


def check_section4(
    cert: OmegaCert, nmax: int, data: PeriodData | None = None
) -> list[VerdictRecord]:
    """
    Orbit expansion of C_n = [Z^{qn}] (1 + G)^p and the inequalities built on it.

    C_n is assembled from orbit representatives and, independently, read off
    the p-th power of the series at the period; the two must agree exactly.
    A term that runs out of working precision leaves its rows inconclusive.

    Args:
        cert (OmegaCert): The certificate.
        nmax (int): Last n; needs u_{q*nmax}.
        data (PeriodData | None, optional): Values already evaluated. Defaults to evaluating them.

    Raises:
        ConfigurationError: If q*nmax exceeds the truncation or the evaluated values.
    """
    params = cert.params
    p, q = params.p, params.q
    if nmax < 1 or q * nmax > cert.truncation:
        raise ConfigurationError(
            f"nmax must satisfy 1 <= q*nmax <= K={cert.truncation}, got nmax={nmax}."
        )
    data = data or period_data(cert, q * nmax)
    if q * nmax > data.kmax:
        raise ConfigurationError(f"nmax={nmax} needs u_{q * nmax}, only u_{data.kmax} available.")
    u = data.u
    cap = q * nmax + 1
    ring = local_ring(cert.tower)
    g = ZSeries([LocalNum.one(cert.tower), *data.values[1:cap]], cap, ring)
    try:
        power: ZSeries[LocalNum] | None = series_pow(g, p)
    except PrecisionExhaustedError as e:
        logger.debug("p-th power of the series at the period gave up: %s", e)
        power = None

    records = []
    for n in range(1, nmax + 1):
        weight = w(n, params)
        indices = range(1, q * n + 1)
        diagonal = (p * n,) * p
        orbit_sum: LocalNum | None = LocalNum.zero(cert.tower)
        for rep in enumerate_reps(q * n, p):
            size = orbit_size(rep)
            term = _guarded(data.product, rep)
            weighted = None if term is None else term.scaled(size)
            if orbit_sum is not None:
                orbit_sum = None if weighted is None else orbit_sum + weighted
            support = [k for k in rep if k]
            if rep != diagonal:
                records.append(
                    _reading_record(
                        f"s4-star:n={n},k={_vector(rep)}",
                        f"val_p(|S_p.k| u_k) > w({n})",
                        None if weighted is None else data.reading(weighted, support),
                        methodcaller("greater_than", weight),
                        f"> {format_rational(weight)}",
                        orbit_size=size,
                        orbit_size_valuation=val_p_int(size, p),
                    )
                )
            if any(k % q for k in rep):
                bound = weight - 1
                records.append(
                    _reading_record(
                        f"lemma4.5:n={n},k={_vector(rep)}",
                        f"val_p(u_k) > w({n}) - 1",
                        None if term is None else data.reading(term, support),
                        methodcaller("greater_than", bound),
                        f"> {format_rational(bound)}",
                    )
                )

        claim = f"orbit sum over X_{q * n} = [Z^{q * n}] (1 + G)^p"
        if orbit_sum is None or power is None:
            records.append(_record(f"lemma4.3:n={n}", claim, None, EXHAUSTED, "equal"))
        else:
            agree = not (orbit_sum - power[q * n])
            records.append(
                _record(f"lemma4.3:n={n}", claim, agree, "equal" if agree else "differ", "equal")
            )
        reading = None if orbit_sum is None else data.reading(u(n) - orbit_sum, indices)
        records.append(
            _reading_record(
                f"s4-diamond:n={n}",
                f"u_{n} = C_{n} mod p^2",
                reading,
                methodcaller("at_least", 2),
                ">= 2",
            )
        )

        top = u(q * n)
        records.append(
            _reading_record(
                f"s4-pu:n={n}",
                f"val_p(p u_{q * n}) > w({n})",
                data.reading(top.scaled(p), [q * n]),
                methodcaller("greater_than", weight),
                f"> {format_rational(weight)}",
            )
        )
        top_power = _guarded(pow, top, q)
        chain = None if top_power is None else u(n) - (top_power + top.scaled(p))
        records.append(
            _reading_record(
                f"s4-final:n={n}",
                f"val_p(u_{n} - u_{q * n}^{q} - p u_{q * n}) > w({n})",
                None if chain is None else data.reading(chain, [n, q * n]),
                methodcaller("greater_than", weight),
                f"> {format_rational(weight)}",
            )
        )
    return records


def _from_check(check: CheckResult, claim: str) -> VerdictRecord:
    return VerdictRecord(
        check_id=check.name,
        claim=claim,
        status=Status.PASS if check.passed else Status.FAIL,
        measured=check.counterexample or "no counterexample",
        expected=check.checked,
        data=check.data,
    )


def _dual_path(params: Params, limits: ExactLimits) -> list[VerdictRecord]:
    series = pk_series(limits.pk_max, params, LTModel(ModelKind.SPECIAL, params, limits.pk_max + 1))
    mismatch = next(
        (m for m in range(limits.pk_max + 1) if pk_combinatorial(m, params) != series[m]), None
    )
    return [
        _record(
            "prop1.1",
            "combinatorial P_m equals the Z^m coefficient of exp(Y log Z)",
            mismatch is None,
            "no counterexample" if mismatch is None else f"m={mismatch}",
            f"0 <= m <= {limits.pk_max}",
        )
    ]


def _weights(params: Params, limits: ExactLimits) -> list[VerdictRecord]:
    report = check_w_props(params, limits.w_kmax, limits.pair_budget, limits.subadditive_budget)
    return [_from_check(item, f"weight property {item.name}") for item in report.items]


def _zeta(params: Params, limits: ExactLimits) -> list[VerdictRecord]:
    table = zeta_table(params, limits.zeta_mmax)
    violations = table.violations
    return [
        _record(
            "lemma3.10",
            "zeta_{p-1,m} = 0 mod p",
            not violations,
            "no counterexample" if not violations else f"m={violations[0]}",
            f"0 <= m <= {limits.zeta_mmax}",
        )
    ]


def _lucas(params: Params, limits: ExactLimits) -> list[VerdictRecord]:
    p = params.p
    failure = next(
        (
            (m, i)
            for m in range(limits.lucas_mmax + 1)
            for i in range(p)
            if binom_mod_p(m * p + i, i, p) != 1 or math.comb(m * p + i, i) % p != 1
        ),
        None,
    )
    return [
        _record(
            "lucas",
            "C(mp+i, i) = 1 mod p",
            failure is None,
            "no counterexample" if failure is None else f"(m, i)={failure}",
            f"0 <= m <= {limits.lucas_mmax}, 0 <= i < {p}",
        )
    ]


def _orbits(params: Params, limits: ExactLimits) -> list[VerdictRecord]:
    p = params.p
    failure = next(
        (
            rep
            for total in range(limits.orbit_total + 1)
            for rep in enumerate_reps(total, p)
            if len(set(rep)) > 1 and val_p_int(orbit_size(rep), p) != 1
        ),
        None,
    )
    return [
        _record(
            "lemma4.4",
            "val_p(|S_p.k|) = 1 for non-constant k",
            failure is None,
            "no counterexample" if failure is None else f"k={_vector(failure)}",
            f"|k| <= {limits.orbit_total}",
        )
    ]


def identity_checks(params: Params, kmax: int, zcap: int, cap: int) -> list[RecordBatch]:
    """
    Exact identities among the P_k and [p](Z), one batch each.

    Args:
        params (Params): Prime and its derived constants.
        kmax (int): Last k of the division-by-u_1 recursion.
        zcap (int): The functional equation is compared modulo Z^zcap.
        cap (int): Series cap for s(Z).
    """
    return [
        lambda: [_from_check(check_lemma35(params, cap), "s(Z) = ([p]Z - Z^q - pZ)/p^2 is integral")],
        lambda: [_from_check(identity_divbyu1(kmax, params), "k P_k = Y sum_r p^r P_{k-q^r}")],
        lambda: [_from_check(identity_functional_eq(params, zcap), "G([p]Z) = (1 + G)^p - 1")],
    ]


def exact_batches(params: Params, limits: ExactLimits | None = None) -> list[RecordBatch]:
    """
    Independent groups of exact checks, in report order.

    Args:
        params (Params): Prime and its derived constants.
        limits (ExactLimits | None, optional): Ranges of the checks. Defaults to ExactLimits().
    """
    limits = limits or ExactLimits()
    return [
        lambda: _dual_path(params, limits),
        lambda: _weights(params, limits),
        *identity_checks(params, limits.identity_kmax, limits.zcap, limits.lemma35_cap),
        lambda: _zeta(params, limits),
        lambda: _lucas(params, limits),
        lambda: _orbits(params, limits),
    ]


def run_exact_suite(params: Params, limits: ExactLimits | None = None) -> list[VerdictRecord]:
    """
    Every exact batch, run in order on the calling thread.

    Args:
        params (Params): Prime and its derived constants.
        limits (ExactLimits | None, optional): Ranges of the checks. Defaults to ExactLimits().
    """
    records = []
    for batch in exact_batches(params, limits):
        records.extend(batch())
    return records


def audit_certificate(cert: OmegaCert) -> list[VerdictRecord]:
    """
    Recompute the certificate's own claims instead of trusting its stored self-checks.

    A tampered period shows up as a wrong valuation or a non-integral u_k.

    Args:
        cert (OmegaCert): The certificate.
    """
    params = cert.params
    valuation = ring_val(cert.omega)
    claim = f"u_k integral for k <= {cert.truncation}"
    try:
        worst = integrality(cert.omega, cert.truncation)
    except PrecisionExhaustedError as e:
        logger.debug("Integrality audit gave up: %s", e)
        integral = _record("audit:integrality", claim, None, EXHAUSTED, ">= 0")
    else:
        integral = _record("audit:integrality", claim, worst >= 0, format_rational(worst), ">= 0")
    stored = [check.name for check in cert.selfchecks if not check.passed]
    return [
        _record(
            "audit:valuation",
            "val_p(Omega-hat) = p/(q-1)",
            valuation.equals(params.omega_valuation),
            valuation,
            format_rational(params.omega_valuation),
        ),
        integral,
        _record(
            "audit:selfchecks",
            "stored self-checks all passed",
            not stored,
            ", ".join(stored) or "all passed",
            "all passed",
        ),
    ]


def certificate_batches(
    cert: OmegaCert,
    kmax: int,
    m_range: Iterable[int] | None = None,
    nmax: int | None = None,
) -> list[RecordBatch]:
    """
    Independent groups of checks at the period, sharing one table of u_k.

    Args:
        cert (OmegaCert): The certificate.
        kmax (int): Last index of u_k evaluated.
        m_range (Iterable[int] | None, optional): Values of m for the mod p^2 formula.
            Defaults to p <= m with mp + p - 1 <= kmax.
        nmax (int | None, optional): Last n of the orbit checks. Defaults to kmax // q.

    Raises:
        ConfigurationError: If a range needs an index above kmax.
    """
    params = cert.params
    p, q = params.p, params.q
    if m_range is None:
        m_range = range(p, (kmax - p + 1) // p + 1)
    if nmax is None:
        nmax = kmax // q
    m_values = list(m_range)
    top = max((m * p + p - 1 for m in m_values if m >= p), default=0)
    if top > kmax:
        raise ConfigurationError(f"The m range needs u_{top}, above kmax={kmax}.")
    if q * nmax > kmax:
        raise ConfigurationError(f"nmax={nmax} needs u_{q * nmax}, above kmax={kmax}.")
    data = period_data(cert, kmax)
    batches: list[RecordBatch] = [
        lambda: theoremA_table(cert, kmax, data),
        lambda: check_congruences_s3(cert, kmax, data),
        lambda: check_prop39(cert, m_values, data),
    ]
    if nmax:
        batches.append(lambda: check_section4(cert, nmax, data))
    return batches


def summarize(records: Sequence[VerdictRecord]) -> dict[str, Any]:
    """
    Counts per family (the part of check_id before ':') and overall.

    Args:
        records (Sequence[VerdictRecord]): Records in report order.
    """
    families: dict[str, Counter[str]] = {}
    for record in records:
        family = record.check_id.split(":", 1)[0]
        families.setdefault(family, Counter())[str(record.status)] += 1
    totals = Counter(str(record.status) for record in records)
    return {
        "total": len(records),
        "pass": totals[Status.PASS],
        "fail": totals[Status.FAIL],
        "inconclusive": totals[Status.INCONCLUSIVE],
        "families": {
            family: {
                "pass": counts[Status.PASS],
                "fail": counts[Status.FAIL],
                "inconclusive": counts[Status.INCONCLUSIVE],
                "total": sum(counts.values()),
            }
            for family, counts in families.items()
        },
    }


def summary_lines(summary: dict[str, Any]) -> list[str]:
    """Human-readable lines such as ``thmA: 64/64 pass``."""
    lines = []
    for family, counts in summary["families"].items():
        line = f"{family}: {counts['pass']}/{counts['total']} pass"
        if counts["fail"]:
            line += f", {counts['fail']} fail"
        if counts["inconclusive"]:
            line += f", {counts['inconclusive']} inconclusive"
        lines.append(line)
    return lines


def exit_status(records: Sequence[VerdictRecord]) -> int:
    """
    0 when everything passes, 1 on any failure, 2 when only precision held results back.

    Args:
        records (Sequence[VerdictRecord]): Records of one run.
    """
    statuses = {record.status for record in records}
    if Status.FAIL in statuses:
        return 1
    if Status.INCONCLUSIVE in statuses:
        return 2
    return 0
