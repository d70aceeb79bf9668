"""Configuration management for HNRank."""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

DAMPING_CAP = 0.99


class LossKind(str, Enum):
    """Calibration loss functions."""

    L1 = "L1"
    L2 = "L2"
    NEG_SPEARMAN = "NEG_SPEARMAN"


class OptimizerKind(str, Enum):
    """Evolutionary search backends."""

    GA = "ga"
    DE = "de"


class Variant(str, Enum):
    """Which HNR parameters are calibrated.

    el: local damping and attribute weights, e: one shared damping with
    attribute weights, l: local damping with uniform teleportation.
    """

    EL = "el"
    E = "e"
    L = "l"


class PartitionOn(str, Enum):
    """Quantity head/tail breaks is applied to in ht-level reports."""

    LABELS = "labels"
    SCORES = "scores"


class RankingConfig(BaseModel):
    """Fixed-point and baseline ranker settings."""

    damping: float = 0.85
    tol: float = 1e-9
    # Unset: 1000, raised for damping close to 1.
    max_iter: Optional[int] = None
    attrirank_gamma: Optional[float] = None
    attrirank_samples: int = 64
    attrirank_seed: int = 0
    attrirank_damping: Optional[float] = None

    @field_validator('damping')
    @classmethod
    def check_damping(cls, v: float) -> float:
        if not 0.0 <= v <= DAMPING_CAP:
            raise ValueError(f"damping must lie in [0, {DAMPING_CAP}], got {v}")
        return v

    @field_validator('attrirank_damping')
    @classmethod
    def check_attrirank_damping(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f"attrirank_damping must lie in [0, 1], got {v}")
        return v

    @field_validator('tol', 'attrirank_gamma')
    @classmethod
    def check_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v <= 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator('max_iter', 'attrirank_samples')
    @classmethod
    def check_count(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v


class CalibrationConfig(BaseModel):
    """Evolutionary calibration settings (GA defaults, DE rates, bootstrap budget)."""

    population: int = 50
    generations: int = 100
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_sigma: float = 0.1
    mutation_rate: Optional[float] = None
    elitism: int = 1
    target_loss: float = 0.0
    loss: LossKind = LossKind.NEG_SPEARMAN
    optimizer: OptimizerKind = OptimizerKind.GA
    variant: Variant = Variant.EL
    de_weight: float = 0.7
    de_crossover: float = 0.9
    seed: int = 0
    tol: float = 1e-9
    max_iter: Optional[int] = None
    bootstrap_population: int = 24
    bootstrap_generations: int = 40
    bootstrap_full_budget: bool = False
    threads: int = 1

    @field_validator('population', 'bootstrap_population')
    @classmethod
    def check_population(cls, v: int) -> int:
        if v < 4:
            raise ValueError(f"population must be at least 4, got {v}")
        return v

    @field_validator('generations', 'bootstrap_generations', 'tournament_size', 'threads', 'max_iter')
    @classmethod
    def check_at_least_one(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v

    @field_validator('crossover_rate', 'de_crossover', 'mutation_rate')
    @classmethod
    def check_rate(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not 0.0 <= v <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {v}")
        return v

    @field_validator('mutation_sigma', 'de_weight', 'tol')
    @classmethod
    def check_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError(f"must be positive, got {v}")
        return v

    @field_validator('target_loss')
    @classmethod
    def check_target(cls, v: float) -> float:
        if v < 0:
            raise ValueError(f"target_loss must be non-negative, got {v}")
        return v

    @model_validator(mode='after')
    def check_elitism(self) -> 'CalibrationConfig':
        if not 0 <= self.elitism < self.population:
            raise ValueError(
                f"elitism must lie in [0, population), got {self.elitism}"
            )
        return self

    def reduced(self) -> 'CalibrationConfig':
        """Budget used for each bootstrap recalibration."""
        if self.bootstrap_full_budget:
            return self.model_copy()
        return self.model_copy(update={
            'population': self.bootstrap_population,
            'generations': self.bootstrap_generations,
            'elitism': min(self.elitism, self.bootstrap_population - 1),
        })


class EvaluationConfig(BaseModel):
    """Head/tail breaks and experiment protocol settings."""

    head_fraction_cap: float = 0.4
    min_head_size: int = 2
    partition_on: PartitionOn = PartitionOn.LABELS
    train_fraction: float = 0.3
    repeats: int = 10
    fractions: List[float] = Field(
        default_factory=lambda: [round(0.1 * i, 1) for i in range(1, 10)]
    )
    stratify: bool = False
    max_levels: int = 3

    @field_validator('head_fraction_cap', 'train_fraction')
    @classmethod
    def check_fraction(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"fraction must lie in (0, 1), got {v}")
        return v

    @field_validator('fractions')
    @classmethod
    def check_fractions(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one fraction is required")
        for fraction in v:
            if not 0.0 < fraction < 1.0:
                raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
        return v

    @field_validator('repeats', 'max_levels', 'min_head_size')
    @classmethod
    def check_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be at least 1, got {v}")
        return v


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = "INFO"
    file: Optional[str] = None


class Config(BaseModel):
    """Main configuration."""

    ranking: RankingConfig = Field(default_factory=RankingConfig)
    calibration: CalibrationConfig = Field(default_factory=CalibrationConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @model_validator(mode='before')
    @classmethod
    def fold_flat_calibration_keys(cls, data: Any) -> Any:
        # Flat key-value files carry only calibration keys at the top level.
        if not isinstance(data, dict):
            return data
        flat_keys = set(CalibrationConfig.model_fields) & set(data)
        if not flat_keys:
            return data
        data = dict(data)
        calibration = dict(data.get('calibration') or {})
        for key in flat_keys:
            calibration[key] = data.pop(key)
        data['calibration'] = calibration
        return data


def load_config(config_path: Optional[str] = None) -> Config:
    """Load configuration from a YAML file, or defaults when no file is given."""
    data: Dict[str, Any] = {}

    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Configuration file {path} is not valid YAML: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Configuration file {path} must contain a mapping")

    try:
        return Config(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


def save_config(config: Config, config_path: str) -> None:
    """Save configuration to a YAML file."""
    path = Path(config_path)
    path.parent.mkdir(parents=True, exist_ok=True)

    data = config.model_dump(mode='json', exclude_none=True)

    with open(path, 'w', encoding='utf-8') as f:
        yaml.dump(data, f, default_flow_style=False, sort_keys=False)
