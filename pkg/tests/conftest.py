import logging
from collections.abc import Iterator
from pathlib import Path

import pytest

from src.monna_periods.logging.config import PACKAGE_LOGGER

# pylint: disable=missing-function-docstring


@pytest.fixture(autouse=True)
def detach_log_handlers() -> Iterator[None]:
    """CLI commands attach file handlers; drop them so log files do not leak between tests."""
    loggers = [logging.root, logging.getLogger(PACKAGE_LOGGER)]
    before = {id(logger): list(logger.handlers) for logger in loggers}
    yield
    for logger in loggers:
        for handler in logger.handlers[:]:
            if handler not in before[id(logger)]:
                logger.removeHandler(handler)
                handler.close()


@pytest.fixture(name="log_args")
def log_args_fixture(tmp_path: Path) -> list[str]:
    return ["--log-path", str(tmp_path / "logs" / "run.log")]
