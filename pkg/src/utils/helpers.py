"""
Utility functions and helpers for the Unitary Constellation Designer
"""

import logging
import math
import sys
import time as time_mod
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import Config, get_config
from .exceptions import ClampError, ValidationError

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
_configured = False


def get_logger(name: str) -> logging.Logger:
    """Get a package logger, configuring the root handler on first use"""
    global _configured
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        root = logging.getLogger("src")
        root.addHandler(handler)
        root.setLevel(get_config().LOG_LEVEL)
        root.propagate = False
        _configured = True
    return logging.getLogger(name)


class FormatUtils:
    """Numeric output formatting"""

    @staticmethod
    def format_value(value: float) -> str:
        """Format a real with the configured significant digits"""
        return f"{value:.{Config.SIGNIFICANT_DIGITS}g}"

    @staticmethod
    def format_pair(pair: Tuple[int, int]) -> str:
        """Format an element index pair"""
        return f"({pair[0]}, {pair[1]})"

    @staticmethod
    def format_duration(seconds: float) -> str:
        """Format elapsed seconds"""
        if seconds < 60:
            return f"{seconds:.1f}s"
        return f"{int(seconds // 60)}m{seconds % 60:04.1f}s"


class SnrUtils:
    """SNR unit conversion and grid parsing"""

    @staticmethod
    def db_to_linear(rho_db: float) -> float:
        """Convert dB to linear SNR"""
        return 10.0 ** (rho_db / 10.0)

    @staticmethod
    def linear_to_db(rho: float) -> float:
        """Convert linear SNR to dB"""
        return 10.0 * math.log10(rho)

    @staticmethod
    def parse_db_range(text: str) -> Tuple[float, ...]:
        """
        Parse an SNR grid given as LO:HI:STEP (inclusive) or a single value.

        Args:
            text: e.g. "0:20:2" or "5"

        Returns:
            Strictly increasing tuple of dB values
        """
        parts = text.split(":")
        try:
            values = [float(p) for p in parts]
        except ValueError as e:
            raise ValidationError(f"snr-db: cannot parse '{text}'") from e
        if len(values) == 1:
            return (values[0],)
        if len(values) != 3:
            raise ValidationError(f"snr-db: expected LO:HI:STEP, got '{text}'")
        lo, hi, step = values
        if step <= 0 or hi < lo:
            raise ValidationError(f"snr-db: need STEP > 0 and HI >= LO, got '{text}'")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(round(lo + i * step, 10) for i in range(count))


class StatsUtils:
    """Binomial statistics"""

    @staticmethod
    def wilson_interval(successes: int, trials: int, z: float = 1.96) -> Tuple[float, float]:
        """95% Wilson score interval for a binomial proportion"""
        if trials == 0:
            return (0.0, 1.0)
        p = successes / trials
        denom = 1 + z * z / trials
        center = (p + z * z / (2 * trials)) / denom
        half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
        return (max(0.0, center - half), min(1.0, center + half))

    @staticmethod
    def binomial_standard_error(p: float, trials: int) -> float:
        """Standard error of a binomial proportion estimate"""
        return math.sqrt(max(p * (1 - p), 0.0) / trials)


class SeedUtils:
    """Seed handling and derived random streams"""

    @staticmethod
    def resolve_seed(seed: Optional[int]) -> Tuple[int, bool]:
        """Return (seed, drawn) where drawn tells whether it came from entropy"""
        if seed is not None:
            return int(seed), False
        return int(np.random.SeedSequence().entropy % (2 ** 64)), True

    @staticmethod
    def spawn_seeds(seed: int, count: int) -> List[int]:
        """Derive independent 64-bit seeds from a master seed"""
        children = np.random.SeedSequence(seed).spawn(count)
        return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]

    @staticmethod
    def substream(seed: int, *keys: int) -> np.random.Generator:
        """Random stream keyed on (seed, keys...), independent of call order"""
        return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


class ValidationUtils:
    """Numeric validation utilities"""

    @staticmethod
    def clamp_unit(values: np.ndarray, what: str) -> np.ndarray:
        """Clamp values into [0, 1], rejecting excursions beyond the tolerance"""
        tol = Config.CLAMP_TOLERANCE
        arr = np.asarray(values, dtype=float)
        if arr.size and (np.min(arr) < -tol or np.max(arr) > 1 + tol):
            raise ClampError(f"{what} outside [0, 1]: range [{np.min(arr):.3e}, {np.max(arr):.3e}]")
        return np.clip(arr, 0.0, 1.0)

    @staticmethod
    def require_increasing(grid: Sequence[float], field_name: str):
        """Require a non-empty strictly increasing grid"""
        if len(grid) == 0:
            raise ValidationError(f"{field_name}: grid must not be empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError(f"{field_name}: grid must be strictly increasing")


class Stopwatch:
    """Wall-clock budget tracking"""

    def __init__(self, budget_seconds: Optional[float] = None):
        self.start = time_mod.monotonic()
        self.budget_seconds = budget_seconds

    def elapsed(self) -> float:
        """Seconds since start"""
        return time_mod.monotonic() - self.start

    def expired(self) -> bool:
        """True once the budget is used up"""
        return self.budget_seconds is not None and self.elapsed() >= self.budget_seconds


# Global utility instances
format_utils = FormatUtils()
snr_utils = SnrUtils()
stats_utils = StatsUtils()
seed_utils = SeedUtils()
validation_utils = ValidationUtils()
