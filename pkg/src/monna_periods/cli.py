"""
CLI Module for the Monna periods toolkit.

This module provides a command-line interface for the weight map, the P_m
polynomials, the exact identities, the period solver and the verifier of
the valuation table and congruences at the period.
"""

import json
import logging
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any, NoReturn

import anyio
import asyncclick as click

from . import exceptions, exporters
from .cli_types import INDEX_RANGE, PRIME, read_config_file
from .config import RunConfig
from .enums import ModelKind, PkMethod, Status, TableFormat
from .logging.config import DEFAULT_LOG_PATH, setup_cli_logging
from .lubin_tate import LTModel, check_lemma35, mul_p, pk_combinatorial, pk_series, pk_table_json
from .monna import check_w_props, monna, w
from .omega_solver import OmegaCert, solve_omega
from .padic_core import Params, digits_p, format_rational
from .series import ZSeries
from .structures import VerdictRecord
from .verifier import (
    ExactLimits,
    RecordBatch,
    audit_certificate,
    certificate_batches,
    exact_batches,
    exit_status,
    identity_checks,
    summarize,
    summary_lines,
)

logger = logging.getLogger("main_cli")

EXIT_FAIL = 1
EXIT_USAGE = 3

# Largest k whose valuation is decidable at the default configuration of each prime.
DEFAULT_VERIFY_KMAX = {2: 64, 3: 27}


class ExitCodeGroup(click.Group):
    """Group that reports usage and configuration errors with exit status 3."""

    async def main(self, *args: Any, standalone_mode: bool = True, **kwargs: Any) -> Any:
        if not standalone_mode:
            return await super().main(*args, standalone_mode=False, **kwargs)
        try:
            return await super().main(*args, standalone_mode=False, **kwargs)
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_FAIL)


@click.group(
    cls=ExitCodeGroup,
    help="Weights, Lubin-Tate periods and the valuation of P_k at the period.",
)
def cli() -> None:
    """CLI entry point for the Monna periods toolkit."""


def _fail(message: str, code: int) -> NoReturn:
    logger.error(message)
    click.secho(message, fg="red", err=True)
    sys.exit(code)


def log_path_option(func: Any) -> Any:
    return click.option(
        "--log-path",
        "-l",
        type=click.Path(exists=False, file_okay=True, dir_okay=False),
        required=False,
        show_default=True,
        default=DEFAULT_LOG_PATH,
        help="Path to the log file for the command output.",
    )(func)


def config_option(func: Any) -> Any:
    return click.option(
        "--config",
        type=click.Path(exists=True, file_okay=True, dir_okay=False),
        is_eager=True,
        expose_value=False,
        callback=read_config_file,
        help="File of key=value lines used as defaults for this command's options.",
    )(func)


def prime_option(func: Any) -> Any:
    return click.option(
        "--prime", "-p", type=PRIME, default=2, show_default=True, help="The prime p (q = p^2)."
    )(func)


def jobs_option(func: Any) -> Any:
    return click.option(
        "--jobs",
        "-j",
        type=click.IntRange(min=1),
        default=1,
        show_default=True,
        help="Number of worker threads for independent check groups.",
    )(func)


def tower_options(func: Any) -> Any:
    """Options overriding the per-prime defaults of the period computation."""
    options = [
        click.option("--f", "f", type=click.IntRange(min=1), help="Degree of the unramified base."),
        click.option("--n", "n", type=click.IntRange(min=1), help="Torsion level of the tower."),
        click.option("--precision", "-A", type=click.IntRange(min=2), help="Target precision A (digits of p)."),
        click.option("--truncation", "-K", type=click.IntRange(min=1), help="Truncation K of the period equation."),
        click.option("--zeta-choice", type=click.IntRange(min=0), help="Which primitive p^n-th root of unity."),
        click.option("--residue-branch", type=click.IntRange(min=0), help="Which residue candidate to lift first."),
        click.option("--guard", type=click.IntRange(min=0), help="Guard digits (default: from P_k denominators)."),
        click.option("--budget", type=click.IntRange(min=1), help="Largest allowed coordinate dimension."),
        click.option("--max-escalations", type=click.IntRange(min=0), help="Automatic n/f escalations."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _run_config(prime: int, **overrides: Any) -> RunConfig:
    try:
        return RunConfig.defaults(prime, **overrides).validate()
    except exceptions.ConfigurationError as e:
        _fail(str(e), EXIT_USAGE)


async def _run_batches(batches: Sequence[RecordBatch], jobs: int) -> list[VerdictRecord]:
    """Run independent check groups on worker threads; records keep the batch order."""
    limiter = anyio.CapacityLimiter(jobs)
    results: list[list[VerdictRecord]] = [[] for _ in batches]

    async def _run(index: int, batch: RecordBatch) -> None:
        results[index] = await anyio.to_thread.run_sync(batch, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, batch in enumerate(batches):
            tg.start_soon(_run, index, batch)
    return [record for chunk in results for record in chunk]


def _echo_summary(records: Sequence[VerdictRecord]) -> int:
    status = exit_status(records)
    colour = {0: "green", 1: "red", 2: "yellow"}[status]
    for line in summary_lines(summarize(records)):
        click.secho(line, fg=colour)
    for record in records:
        if record.status is Status.FAIL:
            click.secho(f"{record.check_id}: measured {record.measured}, expected {record.expected}", fg="red")
    return status


def _format_series(series: ZSeries[Any], variable: str = "Z") -> str:
    terms = []
    for n, coefficient in series.nonzero():
        monomial = variable if n == 1 else f"{variable}^{n}"
        terms.append(monomial if coefficient == 1 else f"{Fraction(coefficient)}*{monomial}")
    return " + ".join(terms) or "0"


@click.command(name="w-table", help="Print or save the table of k, its digits, w(k) and the Monna map.")
@config_option
@prime_option
@click.option("--max", "kmax", type=click.IntRange(min=0), default=64, show_default=True, help="Largest k.")
@click.option(
    "--format",
    "table_format",
    type=click.Choice([str(item) for item in TableFormat], case_sensitive=False),
    default=str(TableFormat.CSV),
    show_default=True,
    help="Output format.",
)
@click.option(
    "--output",
    "-o",
    type=click.Path(exists=False, file_okay=True, dir_okay=False),
    help="Write the table to this file instead of standard output.",
)
@log_path_option
@setup_cli_logging(logging.INFO)
async def w_table(prime: int, kmax: int, table_format: str, output: str | None = None) -> None:
    """
    Tabulate the weight map next to the Monna map for 0 <= k <= kmax.

    Args:
        prime (int): The prime p.
        kmax (int): Largest k in the table.
        table_format (str): ``csv`` or ``json``.
        output (str | None, optional): File to write instead of standard output. Defaults to None.
    """
    params = Params.for_prime(prime)
    header = ["k", "digits", "w", "monna"]
    rows = [
        [
            k,
            "".join(str(d) for d in reversed(digits_p(k, prime))) or "0",
            format_rational(w(k, params)),
            format_rational(monna(k, prime)),
        ]
        for k in range(kmax + 1)
    ]
    if TableFormat(table_format) is TableFormat.JSON:
        data = [dict(zip(header, map(str, row))) for row in rows]
        if output is None:
            click.echo(json.dumps(data, indent=4))
        else:
            await exporters.export_to_json(Path(output), data)
    elif output is None:
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join(str(cell) for cell in row))
    else:
        await exporters.export_table(Path(output), header, rows)
    logger.info("Weight table for p=%s up to k=%s produced.", prime, kmax)


@click.command(name="props-w", help="Check the properties of the weight map up to a bound.")
@config_option
@prime_option
@click.option("--kmax", type=click.IntRange(min=4), default=10_000, show_default=True, help="Exhaustive bound.")
@click.option("--pair-budget", type=click.IntRange(min=1), default=2_000, show_default=True, help="Bound for pairwise properties.")
@click.option("--subadditive-budget", type=click.IntRange(min=1), help="Bound for subadditivity (default: pair budget).")
@log_path_option
@setup_cli_logging(logging.INFO)
async def props_w(prime: int, kmax: int, pair_budget: int, subadditive_budget: int | None = None) -> None:
    """
    Check the closed forms, symmetries and inequalities of the weight map.

    Args:
        prime (int): The prime p.
        kmax (int): Exhaustive bound for the single-index properties.
        pair_budget (int): Bound for the properties quantified over pairs.
        subadditive_budget (int | None, optional): Bound for subadditivity. Defaults to the pair budget.

    Raises:
        SystemExit: With code 3 if kmax < q, with code 1 if any property fails.
    """
    params = Params.for_prime(prime)
    if kmax < params.q:
        _fail(f"--kmax must be at least q={params.q}.", EXIT_USAGE)
    report = await anyio.to_thread.run_sync(
        check_w_props, params, kmax, pair_budget, subadditive_budget
    )
    for item in report.items:
        if item.passed:
            click.secho(f"{item.name}: pass ({item.checked})", fg="green")
        else:
            click.secho(f"{item.name}: FAIL at {item.counterexample} ({item.checked})", fg="red")
    if not report.passed:
        sys.exit(EXIT_FAIL)


@click.command(help="Print P_k(Y), or the table P_0..P_k as JSON.")
@config_option
@prime_option
@click.option("--k", "k", type=click.IntRange(min=0), required=True, help="Index of the polynomial.")
@click.option(
    "--method",
    type=click.Choice([str(item) for item in PkMethod], case_sensitive=False),
    default=str(PkMethod.COMB),
    show_default=True,
    help="Combinatorial sum or series expansion.",
)
@click.option("--json", "as_json", is_flag=True, help="Print the whole table P_0..P_k as JSON.")
@log_path_option
@setup_cli_logging(logging.INFO)
async def pk(prime: int, k: int, method: str, as_json: bool = False) -> None:
    """
    Print P_k(Y) with exact rational coefficients.

    Args:
        prime (int): The prime p.
        k (int): Index of the polynomial.
        method (str): ``comb`` for the combinatorial sum, ``series`` for the series expansion.
        as_json (bool, optional): Print P_0..P_k as a JSON table. Defaults to False.
    """
    params = Params.for_prime(prime)
    if PkMethod(method) is PkMethod.COMB:
        polys = [pk_combinatorial(m, params) for m in (range(k + 1) if as_json else [k])]
    else:
        table = pk_series(max(k, 1), params, LTModel(ModelKind.SPECIAL, params, max(k, 1) + 1))
        polys = table[: k + 1] if as_json else [table[k]]
    if as_json:
        click.echo(json.dumps(pk_table_json(polys), indent=4, sort_keys=True))
    else:
        click.echo(str(polys[0]))


@click.command(help="Print [p](Z) in both coordinates and s(Z) = ([p]Z - Z^q - pZ)/p^2.")
@config_option
@prime_option
@click.option("--cap", type=click.IntRange(min=2), default=20, show_default=True, help="Work modulo Z^cap.")
@log_path_option
@setup_cli_logging(logging.INFO)
async def mulp(prime: int, cap: int) -> None:
    """
    Print [p](Z) in the special and polynomial coordinates, and s(Z).

    Args:
        prime (int): The prime p.
        cap (int): Series are computed modulo Z^cap.

    Raises:
        SystemExit: With code 3 if cap <= q, with code 1 if s(Z) is not integral of order >= 2.
    """
    params = Params.for_prime(prime)
    if cap <= params.q:
        _fail(f"--cap must exceed q={params.q}.", EXIT_USAGE)
    for kind in ModelKind:
        series = mul_p(LTModel(kind, params, cap), cap)
        click.echo(f"[p]_{kind}(Z) = {_format_series(series)} + O(Z^{cap})")
    lemma = check_lemma35(params, cap)
    s_terms = " + ".join(f"{c}*Z^{n}" for n, c in lemma.data["s"].items()) or "0"
    click.echo(f"s(Z) = {s_terms} + O(Z^{cap})")
    if not lemma.passed:
        click.secho(f"s(Z) is not integral of order >= 2: {lemma.counterexample}", fg="red")
        sys.exit(EXIT_FAIL)


@click.command(help="Check the exact identities satisfied by the P_k polynomials.")
@config_option
@prime_option
@click.option("--kmax", type=click.IntRange(min=1), default=200, show_default=True, help="Range of k P_k = Y sum p^r P_{k-q^r}.")
@click.option("--zcap", type=click.IntRange(min=2), default=20, show_default=True, help="Check G([p]Z) = (1+G)^p - 1 modulo Z^zcap.")
@click.option("--cap", type=click.IntRange(min=2), default=50, show_default=True, help="Series cap for s(Z).")
@log_path_option
@setup_cli_logging(logging.INFO)
async def identities(prime: int, kmax: int, zcap: int, cap: int) -> None:
    """
    Check the recursion, the functional equation and the integrality of s(Z).

    Args:
        prime (int): The prime p.
        kmax (int): Largest k for the division-by-u_1 recursion.
        zcap (int): The functional equation is checked modulo Z^zcap.
        cap (int): Series cap for s(Z).

    Raises:
        SystemExit: With code 3 if zcap or cap <= q, with code 1 if an identity fails.
    """
    params = Params.for_prime(prime)
    if min(zcap, cap) <= params.q:
        _fail(f"--zcap and --cap must exceed q={params.q}.", EXIT_USAGE)
    records = await _run_batches(identity_checks(params, kmax, zcap, cap), 1)
    if _echo_summary(records):
        sys.exit(EXIT_FAIL)


@click.command(name="solve-omega", help="Approximate the period and write its certificate.")
@config_option
@prime_option
@tower_options
@click.option(
    "--output",
    "-o",
    type=click.Path(exists=False, file_okay=True, dir_okay=False),
    default="certificate.json",
    show_default=True,
    help="Certificate file.",
)
@log_path_option
@setup_cli_logging(logging.INFO)
async def solve_omega_command(prime: int, output: str, **overrides: Any) -> None:
    """
    Solve for the period, run its self-checks and write the certificate.

    Args:
        prime (int): The prime p.
        output (str): Certificate file.
        **overrides (Any): Tower and truncation options that replace the defaults for p.

    Raises:
        SystemExit: With code 3 on a bad configuration, with code 1 if the solve
            fails or the certificate's self-checks do not pass.
    """
    config = _run_config(prime, **overrides)
    cert = await _solve(config)
    await exporters.export_certificate(Path(output), cert)
    for check in cert.selfchecks:
        click.secho(f"{check.name}: {'pass' if check.passed else 'FAIL'}", fg="green" if check.passed else "red")
    if not cert.valid:
        _fail(f"Certificate written to '{output}' but its self-checks failed.", EXIT_FAIL)
    click.secho(f"Certificate written to '{output}'.", fg="green")


async def _solve(config: RunConfig) -> OmegaCert:
    try:
        return await anyio.to_thread.run_sync(solve_omega, config.params, config)
    except exceptions.ConfigurationError as e:
        _fail(str(e), EXIT_USAGE)
    except (exceptions.MonnaPeriodsError, ArithmeticError) as e:
        _fail(f"Period solve failed: {e}", EXIT_FAIL)


async def _verify(
    cert: OmegaCert,
    kmax: int | None,
    m_range: range | None,
    nmax: int | None,
    jobs: int,
) -> list[VerdictRecord]:
    if kmax is None:
        kmax = min(DEFAULT_VERIFY_KMAX.get(cert.params.p, cert.params.q**2), cert.truncation)
    if kmax > cert.truncation:
        _fail(f"--kmax {kmax} exceeds the certificate truncation K={cert.truncation}.", EXIT_USAGE)
    try:
        batches = [lambda: audit_certificate(cert)]
        batches += certificate_batches(cert, kmax, m_range, nmax)
        return await _run_batches(batches, jobs)
    except exceptions.ConfigurationError as e:
        _fail(str(e), EXIT_USAGE)


def verify_options(func: Any) -> Any:
    options = [
        click.option("--kmax", type=click.IntRange(min=1), help="Largest k in the valuation table."),
        click.option("--m-range", type=INDEX_RANGE, help="Range of m for the mod p^2 formula, e.g. 2-12."),
        click.option("--nmax", type=click.IntRange(min=1), help="Largest n in the orbit expansion checks."),
        jobs_option,
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.command(help="Check the valuation table and the congruences at a certified period.")
@config_option
@click.option(
    "--certificate",
    "-c",
    type=click.Path(exists=True, file_okay=True, dir_okay=False),
    required=True,
    help="Certificate written by solve-omega.",
)
@verify_options
@click.option(
    "--output",
    "-o",
    type=click.Path(exists=False, file_okay=True, dir_okay=False),
    default="report.jsonl",
    show_default=True,
    help="JSON-lines report file.",
)
@log_path_option
@setup_cli_logging(logging.INFO)
async def verify(
    certificate: str,
    output: str,
    jobs: int,
    kmax: int | None = None,
    m_range: range | None = None,
    nmax: int | None = None,
) -> None:
    """
    Verify a certificate and write the JSON-lines report.

    Args:
        certificate (str): Certificate file written by solve-omega.
        output (str): Report file.
        jobs (int): Number of worker threads.
        kmax (int | None, optional): Largest k of the valuation table. Defaults to a per-prime value.
        m_range (range | None, optional): Range of m for the mod p^2 formula.
            Defaults to every m >= p whose formula fits below kmax.
        nmax (int | None, optional): Largest n of the orbit checks. Defaults to kmax/q.

    Raises:
        SystemExit: Always; with code 0 if every row passes, 1 on a failed row,
            2 when rows are only inconclusive and 3 on a malformed certificate or range.
    """
    try:
        cert = await exporters.load_certificate(Path(certificate))
    except exceptions.MonnaPeriodsError as e:
        _fail(str(e), EXIT_USAGE)
    records = await _verify(cert, kmax, m_range, nmax, jobs)
    config = RunConfig.from_json(cert.config) if cert.config else None
    await exporters.export_report(Path(output), records, config, certificate)
    status = _echo_summary(records)
    logger.info("Verification of '%s' finished with status %s.", certificate, status)
    sys.exit(status)


@click.command(name="all", help="Exact suite, period solve and verification in one run.")
@config_option
@prime_option
@tower_options
@verify_options
@click.option(
    "--output-dir",
    "-o",
    type=click.Path(exists=False, file_okay=False, dir_okay=True),
    default=".",
    show_default=True,
    help="Directory for certificate.json and report.jsonl.",
)
@click.option("--w-kmax", type=click.IntRange(min=4), default=10_000, show_default=True, help="Bound of the weight checks.")
@log_path_option
@setup_cli_logging(logging.INFO)
async def run_all(
    prime: int,
    output_dir: str,
    jobs: int,
    w_kmax: int,
    kmax: int | None = None,
    m_range: range | None = None,
    nmax: int | None = None,
    **overrides: Any,
) -> None:
    """
    Run the exact suite, solve for the period and verify it.

    Args:
        prime (int): The prime p.
        output_dir (str): Directory for certificate.json and report.jsonl.
        jobs (int): Number of worker threads.
        w_kmax (int): Bound of the weight checks.
        kmax (int | None, optional): Largest k of the valuation table. Defaults to a per-prime value.
        m_range (range | None, optional): Range of m for the mod p^2 formula.
            Defaults to every m >= p whose formula fits below kmax.
        nmax (int | None, optional): Largest n of the orbit checks. Defaults to kmax/q.
        **overrides (Any): Tower and truncation options that replace the defaults for p.

    Raises:
        SystemExit: Always, with the exit code of the combined report.
    """
    config = _run_config(prime, jobs=jobs, **overrides)
    directory = Path(output_dir)
    records = await _run_batches(exact_batches(config.params, ExactLimits(w_kmax=w_kmax)), jobs)
    cert = await _solve(config)
    await exporters.export_certificate(directory / "certificate.json", cert)
    records += await _verify(cert, kmax, m_range, nmax, jobs)
    await exporters.export_report(directory / "report.jsonl", records, config, "certificate.json")
    sys.exit(_echo_summary(records))


cli.add_command(w_table)
cli.add_command(props_w)
cli.add_command(pk)
cli.add_command(mulp)
cli.add_command(identities)
cli.add_command(solve_omega_command)
cli.add_command(verify)
cli.add_command(run_all)


def main() -> None:
    anyio.run(cli.main)


if __name__ == "__main__":
    main()
