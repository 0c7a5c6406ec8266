import hashlib
import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

from .exceptions import ConfigurationError, TailBoundError, TowerBudgetError
from .local_model import DEFAULT_BUDGET
from .padic_core import Params

# (f, n, precision, truncation) per prime
DEFAULT_TOWERS = {
    2: (2, 3, 3, 160),
    3: (2, 2, 2, 145),
}


def tail_bound(params: Params, n: int, precision: int) -> int:
    """K must exceed A (q-1) q^{n-1} for the neglected tail to vanish modulo p^A."""
    return precision * (params.q - 1) * params.q ** (n - 1)


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a run; ``validate()`` checks the cross-module preconditions."""

    p: int
    f: int
    n: int
    precision: int
    truncation: int
    kmax: int
    zeta_choice: int = 0
    residue_branch: int = 0
    guard: int | None = None
    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    max_escalations: int = 1
    unramified: tuple[int, ...] | None = None

    @classmethod
    def defaults(cls, p: int, **overrides: Any) -> "RunConfig":
        """Defaults for p, with any non-None override applied on top."""
        params = Params.for_prime(p)
        if p in DEFAULT_TOWERS:
            f, n, precision, truncation = DEFAULT_TOWERS[p]
        else:
            f, n, precision = 2, 1, 2
            truncation = tail_bound(params, n, precision) + 1
        values = {k: v for k, v in overrides.items() if v is not None}
        if "truncation" not in values and {"n", "precision"} & values.keys():
            truncation = (
                tail_bound(params, values.get("n", n), values.get("precision", precision)) + 1
            )
        config = cls(
            p=p,
            f=f,
            n=n,
            precision=precision,
            truncation=truncation,
            kmax=values.get("truncation", truncation),
        )
        return replace(config, **values)

    @property
    def params(self) -> Params:
        return Params.for_prime(self.p)

    @property
    def dimension(self) -> int:
        return self.f * (self.params.q - 1) * self.params.q ** (self.n - 1)

    def validate(self) -> "RunConfig":
        params = self.params
        if self.f < 1 or self.n < 1:
            raise ConfigurationError(f"f and n must be at least 1, got f={self.f}, n={self.n}.")
        if self.precision < 2:
            raise ConfigurationError(f"Precision must be at least 2, got {self.precision}.")
        bound = tail_bound(params, self.n, self.precision)
        if self.truncation <= bound:
            raise TailBoundError(self.truncation, bound)
        if not 1 <= self.kmax <= self.truncation:
            raise ConfigurationError(
                f"kmax must lie in [1, K={self.truncation}], got {self.kmax}."
            )
        if self.dimension > self.budget:
            raise TowerBudgetError(self.dimension, self.budget)
        if self.jobs < 1:
            raise ConfigurationError(f"jobs must be at least 1, got {self.jobs}.")
        if self.guard is not None and self.guard < 0:
            raise ConfigurationError(f"guard must be non-negative, got {self.guard}.")
        return self

    def to_json(self) -> dict[str, Any]:
        data = asdict(self)
        data["unramified"] = list(self.unramified) if self.unramified else None
        return data

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "RunConfig":
        values = dict(data)
        if values.get("unramified") is not None:
            values["unramified"] = tuple(values["unramified"])
        return cls(**values)

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form (jobs excluded: it does not change results)."""
        data = self.to_json()
        data.pop("jobs")
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config_file(path: str | Path) -> dict[str, str]:
    """
    Read a ``key=value`` file into a click default map.

    Blank lines and ``#`` comments are ignored; keys may use the flag spelling
    (``residue-branch``) or the parameter spelling (``residue_branch``).
    """
    defaults: dict[str, str] = {}
    for number, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        if not separator or not key.strip():
            raise ConfigurationError(f"{path}:{number}: expected 'key=value', got {raw!r}.")
        defaults[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return defaults
