from enum import StrEnum


class ValueKind(StrEnum):
    """Kind of a valuation reading."""

    FINITE = "finite"
    INFINITE = "infinite"
    BOUNDED_BELOW = "bounded-below"


class ModelKind(StrEnum):
    """Coordinate on the Lubin-Tate group."""

    SPECIAL = "special"
    POLYNOMIAL = "polynomial"


class Status(StrEnum):
    """Outcome of a single verification instance."""

    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive-precision"


class PkMethod(StrEnum):
    """Computation path for the P_m polynomials."""

    COMB = "comb"
    SERIES = "series"


class TableFormat(StrEnum):
    """Output format of tables written by the CLI."""

    CSV = "csv"
    JSON = "json"
