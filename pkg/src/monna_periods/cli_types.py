from pathlib import Path

import asyncclick as click
from sympy import isprime

from .config import load_config_file
from .exceptions import ConfigurationError


class PrimeParamType(click.ParamType):
    """
    Custom click parameter that represents a prime p.
    Examples: `2`, `3`, `5`.
    """

    name = "prime"

    def convert(
        self, value: str | int, param: click.Parameter | None, ctx: click.Context | None
    ) -> int:
        try:
            number = int(value)
        except (TypeError, ValueError):
            self.fail(f"{value!r} is not an integer.", param, ctx)
        if isprime(number):
            return number
        self.fail(f"{number} is not a prime.", param, ctx)


class IndexRangeParamType(click.ParamType):
    """
    Custom click parameter for an inclusive index range written ``low-high``.
    Examples: `2-12`, `5-5`.
    """

    name = "range"

    def convert(
        self, value: str | range, param: click.Parameter | None, ctx: click.Context | None
    ) -> range:
        if isinstance(value, range):
            return value
        low, separator, high = str(value).partition("-")
        try:
            start, stop = int(low), int(high)
        except ValueError:
            start = stop = -1
        if not separator or start < 0 or stop < start:
            self.fail(f"{value!r} is not a range of the form 'low-high'.", param, ctx)
        return range(start, stop + 1)


PRIME = PrimeParamType()
INDEX_RANGE = IndexRangeParamType()


def read_config_file(ctx: click.Context, param: click.Parameter, value: str | None) -> str | None:
    """Eager ``--config`` callback: the file's ``key=value`` lines become the command's defaults."""
    if value is None:
        return None
    try:
        defaults = load_config_file(Path(value))
    except (OSError, ConfigurationError) as e:
        raise click.BadParameter(str(e), ctx=ctx, param=param) from e
    ctx.default_map = {**(ctx.default_map or {}), **defaults}
    return value
