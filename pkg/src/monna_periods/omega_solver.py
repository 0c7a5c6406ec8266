"""
Finite-precision approximation of the period Omega.

Omega is characterised by the integrality of exp(Omega * log(Z)) together with
the requirement that the resulting homomorphism sends the torsion point t_n
to a fixed primitive p^n-th root of unity. Because log(t_n) = 0, the torsion
equation is flat to first order along Omega * (1 + p^n o_L), so Omega-hat is
lifted one digit at a time: the integrality of u_k = P_k(Y) decides each
digit, the torsion equation breaks ties, and Newton refinement is attempted
afterwards.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Protocol

from .config import RunConfig, tail_bound
from .enums import ModelKind
from .exceptions import (
    CertificateFormatError,
    InsufficientResidueFieldError,
    NewtonDivergenceError,
    OmegaSolveError,
    PrecisionExhaustedError,
    TailBoundError,
    TowerBudgetError,
)
from .local_model import (
    LocalNum,
    TowerSpec,
    cyclotomic_root,
    ring_val,
    teichmuller_digits,
    tower_build,
    zeta_power,
)
from .lubin_tate import LTModel, pk_series
from .padic_core import Params, ValueV, val_p_rat
from .series import YPoly
from .structures import SelfCheck

logger = logging.getLogger(__name__)

CERTIFICATE_SCHEMA = "monna-periods/certificate/1"


def floor_log(k: int, base: int) -> int:
    """
    floor(log_base k) for k >= 1.

    Args:
        k (int): A positive integer.
        base (int): Logarithm base, at least 2.
    """
    exponent = 0
    while base ** (exponent + 1) <= k:
        exponent += 1
    return exponent


def accuracy(params: Params, truncation: int) -> Fraction:
    """
    Valuation up to which integrality of u_1..u_K pins Omega-hat to a generator.

    Args:
        params (Params): Prime and its derived constants.
        truncation (int): The truncation K.
    """
    return params.omega_valuation + floor_log(truncation, params.q)


def reading_cutoff(params: Params, truncation: int, k: int, value: LocalNum) -> Fraction:
    """
    Readings of u_k at or above this valuation are not decided by the approximation.

    Args:
        params (Params): Prime and its derived constants.
        truncation (int): The truncation K the period was solved at.
        k (int): Index of u_k.
        value (LocalNum): The computed u_k, whose own precision also caps the cutoff.
    """
    return min(
        Fraction(value.effective_precision),
        accuracy(params, truncation) - floor_log(max(k, 1), params.q),
    )


def _rank(value: ValueV) -> Fraction:
    if value.value is None:
        return Fraction(10**9)
    return value.value


def guard_digits(params: Params, truncation: int, tables: Sequence[Sequence[YPoly]]) -> int:
    """
    Largest p-power in a denominator of P_k, k <= K, in any table, plus two.

    Args:
        params (Params): Prime and its derived constants.
        truncation (int): Only P_0..P_K are inspected.
        tables (Sequence[Sequence[YPoly]]): Polynomial tables, one per coordinate.
    """
    largest = 0
    for table in tables:
        for poly in table[: truncation + 1]:
            for _, coefficient in poly.items():
                valuation = val_p_rat(coefficient, params.p).value
                assert valuation is not None
                largest = max(largest, int(-valuation))
    return largest + 2


def torsion_points(tower: TowerSpec) -> list[LocalNum]:
    """
    t_1, ..., t_n with t_n the tower generator and t_{j-1} = t_j^q + p t_j.

    Args:
        tower (TowerSpec): The tower whose generator is t_n.
    """
    p, q = tower.params.p, tower.params.q
    points = [LocalNum.monomial(tower, 1)]
    for _ in range(tower.n - 1):
        t = points[0]
        points.insert(0, t**q + t * p)
    return points


def special_values(omega: LocalNum, kmax: int) -> list[LocalNum]:
    """
    u_0, ..., u_kmax with u_k = P_k(Omega) in the special coordinate.

    Uses k u_k = u_1 * sum_r p^r u_{k - q^r}, one ring product per index.

    Args:
        omega (LocalNum): The point Y = Omega.
        kmax (int): Last index.

    Raises:
        PrecisionExhaustedError: If a denominator outgrows the working precision.
    """
    params = omega.tower.params
    values = [LocalNum.one(omega.tower)]
    for k in range(1, kmax + 1):
        total = values[k - 1]
        r = 1
        while params.q**r <= k:
            total = total + values[k - params.q**r] * params.p**r
            r += 1
        values.append((omega * total).scaled(Fraction(1, k)))
    return values


def integrality(omega: LocalNum, kmax: int) -> Fraction:
    """
    min(0, min_{k <= kmax} val u_k); zero means every u_k reads integral.

    Args:
        omega (LocalNum): The point Y = Omega.
        kmax (int): Last index inspected.

    Raises:
        PrecisionExhaustedError: If a denominator outgrows the working precision.
    """
    worst = Fraction(0)
    for value in special_values(omega, kmax)[1:]:
        worst = min(worst, _rank(ring_val(value)))
    return worst


class Equation(Protocol):
    """Anything Newton refinement can iterate on."""

    def value(self, y: LocalNum) -> LocalNum: ...

    def derivative(self, y: LocalNum) -> LocalNum: ...


@dataclass
class SolverEquation:
    """
    F(Y) = sum_{1 <= k <= K} P0_k(Y) t_n^k - (zeta - 1) in the polynomial coordinate.

    The inner sum is regrouped as sum_j a_j Y^j with a_j = sum_k c_{k,j} t_n^k.
    """

    tower: TowerSpec
    truncation: int
    zeta_minus_one: LocalNum
    coefficients: list[LocalNum]

    def torsion_image(self, y: LocalNum) -> LocalNum:
        """sum_{k <= K} P0_k(Y) t_n^k."""
        result = LocalNum.zero(self.tower)
        for coefficient in reversed(self.coefficients):
            result = result * y + coefficient
        return result

    def value(self, y: LocalNum) -> LocalNum:
        return self.torsion_image(y) - self.zeta_minus_one

    def derivative(self, y: LocalNum) -> LocalNum:
        result = LocalNum.zero(self.tower)
        for j in range(len(self.coefficients) - 1, 0, -1):
            result = result * y + self.coefficients[j] * j
        return result


def solver_equation(
    tower: TowerSpec,
    truncation: int,
    zeta_minus_one: LocalNum,
    polynomial_table: Sequence[YPoly] | None = None,
) -> SolverEquation:
    """
    Precompute the t_n-power combinations of the torsion equation.

    Args:
        tower (TowerSpec): Tower holding t_n and the period.
        truncation (int): The truncation K.
        zeta_minus_one (LocalNum): zeta - 1 for the chosen p^n-th root of unity.
        polynomial_table (Sequence[YPoly] | None, optional): P_0..P_K in the polynomial
            coordinate. Defaults to expanding them here.

    Raises:
        TailBoundError: If K does not exceed the tail bound of the tower.
    """
    bound = tail_bound(tower.params, tower.n, tower.precision)
    if truncation <= bound:
        raise TailBoundError(truncation, bound)
    params = tower.params
    if polynomial_table is None:
        polynomial_table = pk_series(
            truncation, params, LTModel(ModelKind.POLYNOMIAL, params, truncation + 1)
        )
    t_n = LocalNum.monomial(tower, 1)
    powers = [LocalNum.one(tower)]
    for _ in range(truncation):
        powers.append(powers[-1] * t_n)

    coefficients = [LocalNum.zero(tower) for _ in range(truncation + 1)]
    for k in range(1, truncation + 1):
        for j, c in polynomial_table[k].items():
            coefficients[j] = coefficients[j] + powers[k].scaled(c)
    while len(coefficients) > 1 and not coefficients[-1]:
        coefficients.pop()
    return SolverEquation(tower, truncation, zeta_minus_one, coefficients)


def residue_search(tower: TowerSpec, equation: SolverEquation) -> list[LocalNum]:
    """
    Starting points c * t_n^{p q^{n-1}} with c in the Teichmüller lifts of F_q^x.

    Only the candidates with the largest val F(Y_0) are kept, in the order of
    the Teichmüller powers; an empty list means f is too small.

    Args:
        tower (TowerSpec): Tower the candidates live in.
        equation (SolverEquation): Equation that ranks the candidates.
    """
    p, q, f = tower.params.p, tower.params.q, tower.f
    if (p**f - 1) % (q - 1):
        return []
    digits = teichmuller_digits(tower)[1:]
    step = (p**f - 1) // (q - 1)
    leading = LocalNum.monomial(tower, 1) ** (p * q ** (tower.n - 1))
    candidates = [digits[i * step] * leading for i in range(q - 1)]
    ranks = [_rank(ring_val(equation.value(candidate))) for candidate in candidates]
    best = max(ranks)
    kept = [candidate for candidate, rank in zip(candidates, ranks) if rank == best]
    logger.debug("Residue search kept %s of %s candidates.", len(kept), len(candidates))
    return kept


def lift_digits(equation: SolverEquation, start: LocalNum) -> LocalNum:
    """
    Extend ``start`` digit by digit up to the accuracy integrality can certify.

    A perturbation of valuation v only breaks integrality at indices
    k >= q^{floor(v)+1}, so each position only evaluates u_k up to that range.

    Args:
        equation (SolverEquation): Equation that breaks ties between digits.
        start (LocalNum): A residue candidate.
    """
    tower = equation.tower
    params, e = tower.params, tower.ramification
    digits = teichmuller_digits(tower)
    first = params.p * params.q ** (tower.n - 1) + 1
    last = min(
        int(accuracy(params, equation.truncation) * e),
        e * tower.working_precision - 1,
    )
    y = start
    for position in range(first, last + 1):
        power, b = divmod(position, e)
        window = min(equation.truncation, params.p * params.q ** (power + 1))
        scored = []
        for digit in digits:
            candidate = y + LocalNum.monomial(tower, b, digit.payload[: tower.f], power) if digit else y
            scored.append((integrality(candidate, window), candidate))
        top = max(score for score, _ in scored)
        tied = [candidate for score, candidate in scored if score == top]
        if len(tied) > 1:
            y = max(tied, key=lambda candidate: _rank(ring_val(equation.value(candidate))))
        else:
            y = tied[0]
        logger.debug("Digit position %s/%s fixed (integrality %s).", position, last, top)
    return y


def newton_refine(equation: Equation, y0: LocalNum, max_iter: int = 8) -> LocalNum:
    """
    Y <- Y - F(Y)/F'(Y) while val F strictly improves.

    Args:
        equation (Equation): Supplies F and F'.
        y0 (LocalNum): Starting point.
        max_iter (int, optional): Largest number of steps. Defaults to 8.

    Raises:
        NewtonDivergenceError: If a step does not improve val F or F' is not invertible.
    """
    y = y0
    current = _rank(ring_val(equation.value(y)))
    for step in range(max_iter):
        residual = equation.value(y)
        if not residual:
            return y
        try:
            candidate = (y - residual / equation.derivative(y)).renormalized()
        except (ZeroDivisionError, PrecisionExhaustedError) as e:
            raise NewtonDivergenceError(step, str(ring_val(residual))) from e
        improved = _rank(ring_val(equation.value(candidate)))
        if improved <= current:
            raise NewtonDivergenceError(step, str(ring_val(residual)))
        y, current = candidate, improved
    return y


@dataclass
class OmegaCert:
    tower: TowerSpec
    omega: LocalNum
    torsion_level: int
    truncation: int
    zeta_choice: int
    residue_branch: int
    selfchecks: list[SelfCheck] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def params(self) -> Params:
        return self.tower.params

    @property
    def valid(self) -> bool:
        return all(check.passed for check in self.selfchecks)

    def to_json(self) -> dict[str, Any]:
        return {
            "schema": CERTIFICATE_SCHEMA,
            "tower": self.tower.to_json(),
            "omega": self.omega.to_json(),
            "torsion_level": self.torsion_level,
            "truncation": self.truncation,
            "zeta_choice": self.zeta_choice,
            "residue_branch": self.residue_branch,
            "selfchecks": [check.to_json() for check in self.selfchecks],
            "valid": self.valid,
            "config": self.config,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any], path: str = "<memory>") -> "OmegaCert":
        if data.get("schema") != CERTIFICATE_SCHEMA:
            raise CertificateFormatError(path, f"unknown schema {data.get('schema')!r}")
        try:
            tower = TowerSpec.from_json(data["tower"])
            return cls(
                tower=tower,
                omega=LocalNum.from_json(tower, data["omega"]),
                torsion_level=int(data["torsion_level"]),
                truncation=int(data["truncation"]),
                zeta_choice=int(data["zeta_choice"]),
                residue_branch=int(data["residue_branch"]),
                selfchecks=[
                    SelfCheck(item["name"], bool(item["passed"]), item.get("data", {}))
                    for item in data["selfchecks"]
                ],
                config=dict(data.get("config", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CertificateFormatError(path, str(e)) from e


def valuation_table(omega: LocalNum, truncation: int, kmax: int) -> list[ValueV]:
    """
    Readings of val u_k for k <= kmax, demoted to lower bounds above their cutoff.

    Args:
        omega (LocalNum): The period.
        truncation (int): The truncation K it was solved at.
        kmax (int): Last index.
    """
    params = omega.tower.params
    table = []
    for k, value in enumerate(special_values(omega, kmax)):
        table.append(ring_val(value).capped(reading_cutoff(params, truncation, k, value)))
    return table


def _tables_agree(lower: Sequence[ValueV], upper: Sequence[ValueV]) -> tuple[bool, list[int]]:
    compared = []
    for k, (a, b) in enumerate(zip(lower, upper)):
        if a.is_exact and b.is_exact:
            compared.append(k)
            if a.value != b.value:
                return False, compared
    return True, compared


def _solve_at(config: RunConfig, stability: bool) -> OmegaCert:
    params = config.params
    special = pk_series(config.truncation, params, LTModel(ModelKind.SPECIAL, params, config.truncation + 1))
    polynomial = pk_series(
        config.truncation, params, LTModel(ModelKind.POLYNOMIAL, params, config.truncation + 1)
    )
    guard = config.guard
    if guard is None:
        guard = guard_digits(params, config.truncation, [special, polynomial])
    tower = tower_build(
        params,
        config.f,
        config.n,
        config.precision,
        guard=guard,
        budget=config.budget,
        unramified=config.unramified,
    )
    zeta = zeta_power(tower, cyclotomic_root(tower), config.zeta_choice)
    equation = solver_equation(tower, config.truncation, zeta, polynomial)
    candidates = residue_search(tower, equation)
    if not candidates:
        raise InsufficientResidueFieldError(config.f, params.q)

    order = candidates[config.residue_branch % len(candidates) :] + candidates[
        : config.residue_branch % len(candidates)
    ]
    for offset, start in enumerate(order):
        omega = lift_digits(equation, start)
        newton_note = "converged"
        try:
            refined = newton_refine(equation, omega)
            if integrality(refined, config.truncation) >= integrality(omega, config.truncation):
                omega = refined
        except NewtonDivergenceError as e:
            newton_note = str(e)
            logger.debug("Newton refinement not used: %s", e)

        checks = _selfchecks(config, tower, equation, omega)
        checks.append(SelfCheck("newton", True, {"status": newton_note}))
        if all(check.passed for check in checks[:3]):
            break
        logger.info("Residue branch %s failed its self-checks, trying the next one.", offset)
    else:
        raise OmegaSolveError("Every residue candidate failed the period self-checks.")

    cert = OmegaCert(
        tower=tower,
        omega=omega,
        torsion_level=config.n,
        truncation=config.truncation,
        zeta_choice=config.zeta_choice,
        residue_branch=(config.residue_branch + offset) % len(candidates),
        selfchecks=checks,
        config=config.to_json(),
    )
    if stability:
        cert.selfchecks.append(_stability_check(config, omega))
    return cert


def _selfchecks(
    config: RunConfig, tower: TowerSpec, equation: SolverEquation, omega: LocalNum
) -> list[SelfCheck]:
    params = config.params
    valuation = ring_val(omega)
    checks = [
        SelfCheck(
            "valuation",
            valuation.equals(params.omega_valuation) is True,
            {"measured": str(valuation), "expected": str(ValueV.finite(params.omega_valuation))},
        )
    ]
    try:
        worst = integrality(omega, config.truncation)
    except PrecisionExhaustedError as e:
        checks.append(SelfCheck("integrality", False, {"error": str(e), "K": config.truncation}))
    else:
        checks.append(
            SelfCheck("integrality", worst >= 0, {"min_valuation": str(worst), "K": config.truncation})
        )

    try:
        root = equation.torsion_image(omega) + 1
        defect = ring_val(root ** (params.p**config.n) - 1)
    except PrecisionExhaustedError as e:
        checks.append(SelfCheck("torsion", False, {"error": str(e), "required": config.precision}))
    else:
        checks.append(
            SelfCheck(
                "torsion",
                defect.at_least(config.precision) is True,
                {"defect_valuation": str(defect), "required": config.precision},
            )
        )
    return checks


def _stability_check(config: RunConfig, omega: LocalNum) -> SelfCheck:
    params = config.params
    kmax = min(params.q**2, config.truncation)
    if config.n == 1:
        return SelfCheck("stability", True, {"note": "level 1 has no lower level"})
    lower_n = config.n - 1
    lower_config = replace(
        config,
        n=lower_n,
        truncation=max(tail_bound(params, lower_n, config.precision) + 1, kmax),
        kmax=kmax,
        guard=None,
    )
    lower = _solve_at(lower_config, stability=False)
    lower_table = valuation_table(lower.omega, lower_config.truncation, kmax)
    upper_table = valuation_table(omega, config.truncation, kmax)
    agree, compared = _tables_agree(lower_table, upper_table)
    return SelfCheck(
        "stability",
        agree,
        {"levels": [lower_n, config.n], "compared": len(compared), "kmax": kmax},
    )


def solve_omega(params: Params, config: RunConfig) -> OmegaCert:
    """
    Approximate Omega and certify it.

    Self-checks: val Omega-hat = p/(q-1); u_k integral for k <= K; the torsion
    image is a p^n-th root of unity at target precision; the valuation table up
    to q^2 agrees with the one solved at level n-1. A failed stability check
    escalates to level n+1, a residue field without F_q enlarges f, both
    within the coordinate budget and the escalation limit.

    Args:
        params (Params): Prime and its derived constants.
        config (RunConfig): Tower, truncation and branch choices.

    Raises:
        ValueError: If ``config`` was built for another prime.
        ConfigurationError: If ``config`` fails validation.
        InsufficientResidueFieldError: If no f within the escalation limit contains F_q.
        OmegaSolveError: If every residue candidate fails the self-checks.
    """
    if config.params != params:
        raise ValueError("solve_omega() configuration belongs to different parameters.")
    config.validate()
    escalations = 0
    while True:
        try:
            cert = _solve_at(config, stability=True)
        except InsufficientResidueFieldError:
            if escalations >= config.max_escalations:
                raise
            config = replace(config, f=config.f + 1)
            escalations += 1
            logger.info("Residue field too small, enlarging to f=%s.", config.f)
            continue
        if cert.valid or escalations >= config.max_escalations:
            break
        n = config.n + 1
        try:
            config = replace(
                config,
                n=n,
                truncation=max(config.truncation, tail_bound(params, n, config.precision) + 1),
                guard=None,
            ).validate()
        except TowerBudgetError:
            logger.warning("Escalation to level %s exceeds the budget; keeping level %s.", n, n - 1)
            break
        escalations += 1
        logger.info("Stability check failed, escalating to torsion level %s.", n)

    logger.info(
        "Solved Omega for p=%s at level %s: valid=%s, val=%s.",
        params.p,
        cert.torsion_level,
        cert.valid,
        ring_val(cert.omega),
    )
    return cert
