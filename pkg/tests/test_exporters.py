import json
from pathlib import Path

import pytest

from src.monna_periods.config import RunConfig
from src.monna_periods.enums import Status
from src.monna_periods.exceptions import CertificateFormatError
from src.monna_periods.exporters import (
    export_certificate,
    export_report,
    export_table,
    export_to_json,
    load_certificate,
    load_json,
)
from src.monna_periods.local_model import LocalNum, tower_build
from src.monna_periods.omega_solver import OmegaCert
from src.monna_periods.padic_core import Params
from src.monna_periods.structures import SelfCheck, VerdictRecord
from src.monna_periods.verifier import REPORT_SCHEMA

# pylint: disable=missing-function-docstring


def _certificate() -> OmegaCert:
    tower = tower_build(Params.for_prime(2), f=2, n=1, precision=3, guard=2)
    return OmegaCert(
        tower=tower,
        omega=LocalNum.monomial(tower, 2, (1, 1)),
        torsion_level=1,
        truncation=10,
        zeta_choice=0,
        residue_branch=0,
        selfchecks=[SelfCheck("valuation", True, {"measured": "2/3"})],
    )


@pytest.mark.asyncio
async def test_export_to_json_is_deterministic(tmp_path: Path) -> None:
    first, second = tmp_path / "a" / "out.json", tmp_path / "b" / "out.json"
    await export_to_json(first, {"b": [1, 2], "a": "7/6"})
    await export_to_json(second, {"a": "7/6", "b": [1, 2]})
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text(encoding="utf-8").endswith("}\n")
    assert await load_json(first) == {"a": "7/6", "b": [1, 2]}


@pytest.mark.asyncio
async def test_certificate_round_trip(tmp_path: Path) -> None:
    path = tmp_path / "certificate.json"
    cert = _certificate()
    await export_certificate(path, cert)
    loaded = await load_certificate(path)
    assert loaded.omega == cert.omega
    assert loaded.tower == cert.tower
    assert loaded.selfchecks == cert.selfchecks


@pytest.mark.asyncio
async def test_load_certificate_rejects_invalid_json(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(CertificateFormatError, match="invalid JSON"):
        await load_certificate(path)


@pytest.mark.asyncio
async def test_export_report_lines(tmp_path: Path) -> None:
    records = [
        VerdictRecord("thmA:k=1", "val_p(P_1(Omega)) = w(1)", Status.PASS, "2/3", "2/3"),
        VerdictRecord("thmA:k=2", "val_p(P_2(Omega)) = w(2)", Status.INCONCLUSIVE, ">=1/3", "1/3"),
    ]
    config = RunConfig.defaults(2)
    path = tmp_path / "report.jsonl"
    summary = await export_report(path, records, config, "certificate.json")

    lines = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    assert len(lines) == 3
    assert lines[0]["schema"] == REPORT_SCHEMA
    assert lines[0]["check_id"] == "thmA:k=1"
    assert lines[1]["status"] == "inconclusive-precision"
    assert lines[2] == summary
    assert summary["config_hash"] == config.config_hash()
    assert summary["certificate"] == "certificate.json"
    assert summary["summary"]["families"]["thmA"]["inconclusive"] == 1


@pytest.mark.asyncio
async def test_export_table_writes_csv(tmp_path: Path) -> None:
    path = tmp_path / "w.csv"
    await export_table(path, ["k", "w"], [[1, "2/3"], [7, "7/6"]])
    assert path.read_text(encoding="utf-8") == "k,w\n1,2/3\n7,7/6\n"
