"""
Configuration settings for the Unitary Constellation Designer
"""

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Type, TypeVar

from dotenv import load_dotenv

from ..utils.exceptions import ValidationError

load_dotenv()


class Config:
    """Main configuration class"""

    # Application settings
    APP_NAME = "Unitary Constellation Designer"
    APP_VERSION = "1.0.0"

    # Unitarity handling
    UNITARITY_TOLERANCE = 1e-10
    REPROJECTION_LIMIT = 1e-6
    CAYLEY_CONDITION_LIMIT = 1e12
    CAYLEY_RETRY_LIMIT = 100

    # One-sided Jacobi SVD
    JACOBI_TOLERANCE = 1e-13
    JACOBI_MAX_SWEEPS = 100

    # Annealing schedules never cool below this
    MIN_TEMPERATURE = 1e-300

    # Adaptive Simpson quadrature
    QUADRATURE_TOLERANCE = 1e-10
    QUADRATURE_MAX_DEPTH = 40

    # Metric values this close outside [0, 1] are clamped
    CLAMP_TOLERANCE = 1e-9

    # Pairwise evaluation is chunked to bound memory
    PAIR_CHUNK_SIZE = 200_000

    # Channel defaults
    DEFAULT_RECEIVE_ANTENNAS = 2
    EXACT_OBJECTIVE_MAX_SIZE = 8

    # Grid search sizing
    GRID_MAX_POINTS = 50_000_000
    GRID_BATCH_SIZE = 2048

    # Monte-Carlo trials share a random substream per block
    SIM_BLOCK_SIZE = 500

    # Output formatting
    SIGNIFICANT_DIGITS = 12
    FLOAT_FORMAT = "%.12g"

    # Bounds verification
    F_RESTARTS = 32
    SINE_PRODUCT_STARTS = 64


class DatabaseConfig:
    """Run archive database configuration"""

    DATABASE_PATH = os.getenv("RUNS_DATABASE_PATH", "runs.db")

    TABLES = {
        "optimization_runs": {
            "name": "optimization_runs",
            "schema": """
                CREATE TABLE IF NOT EXISTS optimization_runs
                (id INTEGER PRIMARY KEY AUTOINCREMENT, created_at TEXT, method TEXT,
                 objective TEXT, goal TEXT, structure TEXT, size INTEGER, dim INTEGER,
                 seed TEXT, best_value REAL, iterations INTEGER,
                 elapsed_seconds REAL, constellation TEXT)
            """
        },
        "simulation_runs": {
            "name": "simulation_runs",
            "schema": """
                CREATE TABLE IF NOT EXISTS simulation_runs
                (id INTEGER PRIMARY KEY AUTOINCREMENT, created_at TEXT, label TEXT,
                 seed TEXT, receive_antennas INTEGER, rho_db REAL, trials INTEGER,
                 errors INTEGER, bler REAL, wilson_lo REAL, wilson_hi REAL)
            """
        }
    }


# Environment-specific configurations
class DevelopmentConfig(Config):
    """Development environment configuration"""
    DEBUG = True
    LOG_LEVEL = "DEBUG"


class ProductionConfig(Config):
    """Production environment configuration"""
    DEBUG = False
    LOG_LEVEL = "INFO"


# Configuration factory
def get_config(env: Optional[str] = None) -> Config:
    """Get configuration based on environment"""
    if env is None:
        env = os.getenv("ENVIRONMENT", "production")

    config_map = {
        "development": DevelopmentConfig,
        "production": ProductionConfig
    }

    return config_map.get(env, ProductionConfig)()


def _require(condition: bool, field_name: str, message: str):
    if not condition:
        raise ValidationError(f"{field_name}: {message}")


@dataclass(frozen=True)
class SAConfig:
    """Simulated annealing run configuration"""

    seed: int = 0
    initial_temperature: Optional[float] = None  # None -> 0.1 * |initial objective|
    cooling_factor: float = 0.95
    steps_per_temperature: int = 200
    initial_sigma: float = 0.1
    sigma_decay: float = 0.98
    min_sigma: float = 1e-5
    max_iterations: int = 100_000
    stall_limit: int = 20_000
    metropolis: bool = True
    budget_seconds: Optional[float] = None

    def __post_init__(self):
        _require(0 <= self.seed < 2 ** 64, "seed", "must be a 64-bit unsigned integer")
        _require(self.initial_temperature is None or self.initial_temperature > 0,
                 "initial_temperature", "must be positive")
        _require(0 < self.cooling_factor < 1, "cooling_factor", "must lie in (0, 1)")
        _require(self.steps_per_temperature >= 1, "steps_per_temperature", "must be positive")
        _require(self.initial_sigma > 0, "initial_sigma", "must be positive")
        _require(0 < self.sigma_decay <= 1, "sigma_decay", "must lie in (0, 1]")
        _require(self.min_sigma >= 0, "min_sigma", "must be nonnegative")
        _require(self.max_iterations >= 1, "max_iterations", "must be positive")
        _require(self.stall_limit >= 1, "stall_limit", "must be positive")
        _require(self.budget_seconds is None or self.budget_seconds > 0,
                 "budget_seconds", "must be positive")


@dataclass(frozen=True)
class GAConfig:
    """Genetic algorithm run configuration"""

    seed: int = 0
    population_size: int = 4
    replace_count: int = 1
    mutation_rate: float = 0.5
    mutation_sigma: float = 0.1
    mutation_sigma_decay: float = 0.9995
    min_sigma: float = 1e-5
    max_iterations: int = 20_000
    stall_limit: int = 5_000
    budget_seconds: Optional[float] = None

    def __post_init__(self):
        _require(0 <= self.seed < 2 ** 64, "seed", "must be a 64-bit unsigned integer")
        _require(self.population_size >= 2, "population_size", "must be at least 2")
        _require(1 <= self.replace_count < self.population_size,
                 "replace_count", "must satisfy 1 <= replace_count < population_size")
        _require(0 <= self.mutation_rate <= 1, "mutation_rate", "must lie in [0, 1]")
        _require(self.mutation_sigma > 0, "mutation_sigma", "must be positive")
        _require(0 < self.mutation_sigma_decay <= 1, "mutation_sigma_decay", "must lie in (0, 1]")
        _require(self.max_iterations >= 1, "max_iterations", "must be positive")
        _require(self.stall_limit >= 1, "stall_limit", "must be positive")
        _require(self.budget_seconds is None or self.budget_seconds > 0,
                 "budget_seconds", "must be positive")


@dataclass(frozen=True)
class SimConfig:
    """Monte-Carlo block error simulation configuration"""

    rho_db: Tuple[float, ...] = (0.0,)
    receive_antennas: int = Config.DEFAULT_RECEIVE_ANTENNAS
    trials_per_point: int = 10_000
    seed: int = 0
    max_errors: Optional[int] = None

    def __post_init__(self):
        _require(len(self.rho_db) >= 1, "rho_db", "grid must not be empty")
        _require(all(b > a for a, b in zip(self.rho_db, self.rho_db[1:])),
                 "rho_db", "grid must be strictly increasing")
        _require(self.receive_antennas >= 1, "receive_antennas", "must be positive")
        _require(self.trials_per_point >= 1, "trials_per_point", "must be positive")
        _require(0 <= self.seed < 2 ** 64, "seed", "must be a 64-bit unsigned integer")
        _require(self.max_errors is None or self.max_errors >= 1, "max_errors", "must be positive")


RunConfig = TypeVar("RunConfig", SAConfig, GAConfig, SimConfig)


def load_run_config(path: str, config_class: Type[RunConfig],
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load a run configuration from a JSON file mirroring the dataclass fields.

    Args:
        path: JSON file path
        config_class: SAConfig, GAConfig or SimConfig
        overrides: values taking precedence over the file (e.g. a CLI seed)

    Returns:
        Validated configuration instance
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path}: top level must be an object")

    known = {f.name for f in fields(config_class)}
    for key in data:
        if key not in known:
            raise ValidationError(f"{key}: unknown field for {config_class.__name__}")
    if "rho_db" in data:
        data["rho_db"] = tuple(float(x) for x in data["rho_db"])
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return config_class(**data)
    except TypeError as e:
        raise ValidationError(f"config file {path}: {e}") from e
