import csv
import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Mapping, TypeAlias

import aiofiles

from .config import RunConfig
from .exceptions import CertificateFormatError
from .omega_solver import OmegaCert
from .structures import VerdictRecord
from .verifier import REPORT_SCHEMA, summarize

logger = logging.getLogger(__name__)

JsonType: TypeAlias = (
    Mapping[str, "JsonType"] | list["JsonType"] | str | int | float | bool | None
)


async def export_to_json(export_path: Path, data: JsonType) -> None:
    """
    Save JSON data asynchronously, with sorted keys so equal data gives equal bytes.

    Args:
        export_path (Path): Target file; missing parent directories are created.
        data (JsonType): Data to serialize and save.
    """
    export_path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(export_path, "w", encoding="utf-8") as fp:
        await fp.write(json.dumps(data, indent=4, sort_keys=True) + "\n")


async def export_certificate(export_path: Path, cert: OmegaCert) -> None:
    await export_to_json(export_path, cert.to_json())
    logger.info("Certificate written to %s.", export_path)


async def load_json(path: Path) -> Any:
    async with aiofiles.open(path, "r", encoding="utf-8") as fp:
        return json.loads(await fp.read())


async def load_certificate(path: Path) -> OmegaCert:
    try:
        data = await load_json(path)
    except json.JSONDecodeError as e:
        raise CertificateFormatError(str(path), f"invalid JSON ({e})") from e
    return OmegaCert.from_json(data, str(path))


def report_summary(
    records: Sequence[VerdictRecord],
    config: RunConfig | None = None,
    certificate: str | None = None,
) -> dict[str, Any]:
    """The trailing line of a report: counts, config hash and certificate reference."""
    return {
        "schema": REPORT_SCHEMA,
        "summary": summarize(records),
        "config_hash": config.config_hash() if config is not None else None,
        "certificate": certificate,
    }


async def export_report(
    export_path: Path,
    records: Sequence[VerdictRecord],
    config: RunConfig | None = None,
    certificate: str | None = None,
) -> dict[str, Any]:
    """
    Write one JSON object per verdict, then the summary object.

    Returns:
        dict: The summary line as written.
    """
    summary = report_summary(records, config, certificate)
    export_path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(export_path, "w", encoding="utf-8") as fp:
        for record in records:
            await fp.write(json.dumps({"schema": REPORT_SCHEMA, **record.to_json()}, sort_keys=True) + "\n")
        await fp.write(json.dumps(summary, sort_keys=True) + "\n")
    logger.info("Report with %s records written to %s.", len(records), export_path)
    return summary


async def export_table(
    export_path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]
) -> None:
    """Write a CSV table; cells are written with ``str`` so rationals stay "num/den"."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([[str(cell) for cell in row] for row in rows])
    export_path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(export_path, "w", encoding="utf-8", newline="") as fp:
        await fp.write(buffer.getvalue())
