import inspect
import logging
from functools import wraps
from pathlib import Path
from typing import Any, Callable

DEFAULT_LOG_PATH = Path.home() / ".monna_periods" / "run.log"
LOG_FORMAT = "[%(levelname)s - %(asctime)s] - %(name)s - [%(message)s]"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

PACKAGE_LOGGER = "monna_periods"


def _ensure_log_file(log_path: Path) -> Path:
    log_path = Path(log_path).expanduser()
    if not log_path.exists():
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_path.touch()
    return log_path


def _attach_file_handler(target: logging.Logger, log_path: Path) -> None:
    """Add a file handler for ``log_path`` unless ``target`` already writes there."""
    filename = str(log_path.resolve())
    if any(
        isinstance(handler, logging.FileHandler) and handler.baseFilename == filename
        for handler in target.handlers
    ):
        return
    handler = logging.FileHandler(filename, encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT, style="%"))
    target.addHandler(handler)


def setup_cli_logging(
    level: int, propagate: bool = True, logger: logging.Logger | None = None
) -> Callable[..., Callable[..., Any]]:
    """
    Decorator factory that sends a CLI command's log records to a file.

    The decorated command must receive a ``log_path`` keyword argument (the
    ``--log-path`` option); it is consumed here and not passed on. Records go
    to the root logger unless ``propagate`` is False, in which case only the
    given ``logger`` (the package logger by default) writes to the file.

    Args:
        level (int): Logging level (e.g., logging.INFO).
        propagate (bool, optional): Whether package records also reach the root logger.
        logger (logging.Logger | None, optional): Logger receiving the handler when not propagating.
    """

    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(func)
        async def wrapper(*args, **kwargs) -> Any | None:
            log_path = kwargs.pop("log_path", None)
            if log_path is None:
                raise TypeError(
                    f"Missing required 'log_path' keyword argument in '{func.__name__}' command. "
                    "Make sure the command declares a '--log-path' option as Path type."
                )
            log_path = _ensure_log_file(log_path)

            if propagate:
                target = logging.root
            else:
                target = logger or logging.getLogger(PACKAGE_LOGGER)
                target.propagate = False
            _attach_file_handler(target, log_path)
            target.setLevel(level)

            if inspect.iscoroutinefunction(func):
                return await func(*args, **kwargs)
            return func(*args, **kwargs)

        return wrapper

    return decorator
