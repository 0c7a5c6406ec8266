class MonnaPeriodsError(Exception):
    """Base class for all exceptions raised by this package."""


class ConfigurationError(MonnaPeriodsError):
    """Raised when a run configuration violates a precondition of the pipeline."""


class TailBoundError(ConfigurationError):
    """Raised when the truncation K is too small for the requested precision."""

    def __init__(self, truncation: int, bound: int) -> None:
        self.truncation = truncation
        self.bound = bound
        super().__init__(
            f"Truncation K={truncation} is below the tail bound: K must exceed {bound} "
            "so that the neglected tail has valuation above the target precision."
        )


class TowerBudgetError(ConfigurationError):
    """Raised when a tower would need more coordinates than the configured budget."""

    def __init__(self, dimension: int, budget: int) -> None:
        self.dimension = dimension
        self.budget = budget
        super().__init__(
            f"Tower dimension {dimension} exceeds the coordinate budget {budget}."
        )


class PrecisionExhaustedError(ArithmeticError):
    """Raised when an operation would leave a local number without effective precision."""

    def __init__(self, shift: int, precision: int) -> None:
        self.shift = shift
        self.precision = precision
        super().__init__(
            f"Precision exhausted: shift {shift} leaves nothing of the p^{precision} window."
        )


class SeriesDomainError(ValueError):
    """Raised when a series operation is applied outside its domain."""


class InsufficientResidueFieldError(MonnaPeriodsError):
    """Raised when the residue field of the tower cannot hold the Teichmüller digits needed."""

    def __init__(self, f: int, q: int) -> None:
        self.f = f
        self.q = q
        super().__init__(
            f"Residue field of degree f={f} does not contain F_{q}; enlarge f."
        )


class NewtonDivergenceError(ArithmeticError):
    """Raised when a Newton iteration stops improving the residual."""

    def __init__(self, step: int, residual: str) -> None:
        self.step = step
        self.residual = residual
        super().__init__(
            f"Newton iteration diverged at step {step} (residual valuation {residual})."
        )


class OmegaSolveError(MonnaPeriodsError):
    """Raised when no residue candidate produces a usable period approximation."""


class CertificateFormatError(MonnaPeriodsError):
    """Raised when a certificate file cannot be parsed back into a certificate."""

    def __init__(self, path: str, reason: str) -> None:
        self.path = path
        self.reason = reason
        super().__init__(f"Certificate '{path}' is malformed: {reason}.")
