"""
Run configuration for training and estimation.

RunConfig is a single source of truth for every numeric knob of a run. It is
immutable; `merged` returns an updated copy, which is how a JSON config file is
layered under command-line flags.
"""

import json
from dataclasses import dataclass, field, fields, asdict, replace
from enum import Enum


class ConfigError(Exception):
    """Exception raised for invalid run configurations."""
    pass


class LambdaKind(str, Enum):
    """Time weighting used by the score matching risks."""

    CONSTANT = "constant"
    ENDPOINT_VANISHING = "endpoint-vanishing"


SOLVERS = ("closed_form", "adam")
MODELS = ("linear", "mlp")
BOUNDARY_MODES = ("endpoint", "truncated")
BREGMAN_KINDS = ("quadratic", "quartic")


@dataclass(frozen=True)
class RunConfig:
    """Validated settings shared by training, quadrature and cross fitting."""

    seed: int = 0
    batch_size: int = 512
    steps: int = 2000
    learning_rate: float = 1e-3
    t_truncation: float = 0.01
    quadrature_points: int = 129
    folds: int = 5
    lambda_kind: LambdaKind = LambdaKind.CONSTANT
    sigma_min: float = 0.05
    sigma_max: float = 0.5
    ridge: float = 1e-6
    solver: str = "closed_form"
    model: str = "linear"
    hidden: tuple = field(default=(32, 32))
    feature_degree: int = 3
    fit_batch: int = 200_000
    boundary: str = "endpoint"
    ame_half_width: float = 0.25
    outcome_degree: int = 2
    n_jobs: int = 1
    bregman: str = "quadratic"

    def __post_init__(self):
        object.__setattr__(self, "lambda_kind", self._lambda_kind(self.lambda_kind))
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        self._validate()

    @staticmethod
    def _lambda_kind(value):
        try:
            return LambdaKind(value)
        except ValueError:
            raise ConfigError(f"Unknown lambda kind: {value}")

    def _validate(self):
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be an unsigned integer, got {self.seed}")
        for name in ("batch_size", "steps", "fit_batch", "n_jobs"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 < self.t_truncation < 0.5:
            raise ConfigError(f"t_truncation must lie in (0, 0.5), got {self.t_truncation}")
        k = self.quadrature_points
        if not isinstance(k, int) or k < 3 or k % 2 == 0:
            raise ConfigError(f"quadrature_points must be an odd integer >= 3, got {k}")
        if not isinstance(self.folds, int) or self.folds < 2:
            raise ConfigError(f"folds must be an integer >= 2, got {self.folds}")
        if not (self.sigma_min > 0 and self.sigma_max > 0):
            raise ConfigError("sigma_min and sigma_max must be positive")
        if self.sigma_min > self.sigma_max:
            raise ConfigError(
                f"sigma_min ({self.sigma_min}) exceeds sigma_max ({self.sigma_max})")
        if self.ridge < 0:
            raise ConfigError(f"ridge must be non-negative, got {self.ridge}")
        if not 0.0 < self.ame_half_width <= 1.0:
            raise ConfigError(f"ame_half_width must lie in (0, 1], got {self.ame_half_width}")
        if self.feature_degree < 1 or self.feature_degree > 3:
            raise ConfigError(f"feature_degree must be 1, 2 or 3, got {self.feature_degree}")
        if self.outcome_degree < 1 or self.outcome_degree > 3:
            raise ConfigError(f"outcome_degree must be 1, 2 or 3, got {self.outcome_degree}")
        if not self.hidden or min(self.hidden) < 1:
            raise ConfigError(f"hidden widths must be positive, got {self.hidden}")
        for name, allowed in (("solver", SOLVERS), ("model", MODELS),
                              ("boundary", BOUNDARY_MODES), ("bregman", BREGMAN_KINDS)):
            if getattr(self, name) not in allowed:
                raise ConfigError(
                    f"{name} must be one of {', '.join(allowed)}, got {getattr(self, name)}")

    @classmethod
    def from_dict(cls, values):
        """Build a config from a plain mapping, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**values)
        except TypeError as e:
            raise ConfigError(f"Failed to build config: {e}") from e

    @classmethod
    def from_json(cls, path):
        """Load a config from a JSON file."""
        try:
            with open(path, "r", encoding="utf-8") as handle:
                values = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to read config {path}: {e}") from e
        if not isinstance(values, dict):
            raise ConfigError(f"Config {path} must contain a JSON object")
        return cls.from_dict(values)

    def merged(self, **overrides):
        """Return a copy with every non-None override applied."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        known = {f.name for f in fields(self)}
        unknown = set(updates) - known
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        return replace(self, **updates)

    def to_dict(self):
        values = asdict(self)
        values["lambda_kind"] = self.lambda_kind.value
        values["hidden"] = list(self.hidden)
        return values
