"""
Test suite for configuration and shared utilities
"""

import sys
import os
import json
import math
import unittest
import tempfile

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config.settings import (
    Config,
    DevelopmentConfig,
    GAConfig,
    ProductionConfig,
    SAConfig,
    SimConfig,
    get_config,
    load_run_config,
)
from src.utils.exceptions import ClampError, ConstellationError, NumericError, ValidationError
from src.utils.helpers import FormatUtils, SeedUtils, SnrUtils, StatsUtils, Stopwatch, ValidationUtils


class TestConfig(unittest.TestCase):
    """Test configuration settings"""

    def test_config_initialization(self):
        """Test config initialization"""
        config = get_config()
        self.assertIsInstance(config, Config)
        self.assertEqual(config.APP_NAME, "Unitary Constellation Designer")

    def test_environment_levels(self):
        """Development logs at DEBUG, unknown environments fall back to production"""
        self.assertIsInstance(get_config("development"), DevelopmentConfig)
        self.assertEqual(get_config("development").LOG_LEVEL, "DEBUG")
        self.assertIsInstance(get_config("staging"), ProductionConfig)
        self.assertEqual(get_config("production").LOG_LEVEL, "INFO")

    def test_run_config_validation(self):
        """Out-of-range fields name themselves"""
        with self.assertRaisesRegex(ValidationError, "cooling_factor"):
            SAConfig(cooling_factor=1.5)
        with self.assertRaisesRegex(ValidationError, "replace_count"):
            GAConfig(population_size=4, replace_count=4)
        with self.assertRaisesRegex(ValidationError, "rho_db"):
            SimConfig(rho_db=(5.0, 0.0))
        with self.assertRaisesRegex(ValidationError, "seed"):
            SAConfig(seed=-1)


class TestLoadRunConfig(unittest.TestCase):
    """Test JSON run configuration files"""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, data) -> str:
        path = os.path.join(self.tmp.name, "run.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return path

    def test_load_with_overrides(self):
        """File values load and overrides take precedence, None overrides are ignored"""
        path = self._write({"max_iterations": 500, "seed": 3})
        cfg = load_run_config(path, SAConfig, {"seed": 9, "budget_seconds": None})
        self.assertEqual(cfg.max_iterations, 500)
        self.assertEqual(cfg.seed, 9)
        self.assertIsNone(cfg.budget_seconds)

    def test_sim_grid_as_list(self):
        """JSON lists become SNR tuples"""
        cfg = load_run_config(self._write({"rho_db": [0, 10]}), SimConfig)
        self.assertEqual(cfg.rho_db, (0.0, 10.0))

    def test_unknown_field(self):
        """Unknown keys are rejected by name"""
        with self.assertRaisesRegex(ValidationError, "cooling"):
            load_run_config(self._write({"cooling": 0.9}), SAConfig)

    def test_bad_files(self):
        """Missing files and non-object JSON are validation errors"""
        with self.assertRaises(ValidationError):
            load_run_config(os.path.join(self.tmp.name, "missing.json"), SAConfig)
        with self.assertRaises(ValidationError):
            load_run_config(self._write([1, 2]), GAConfig)


class TestSnrUtils(unittest.TestCase):
    """Test SNR utilities"""

    def test_parse_db_range(self):
        """LO:HI:STEP is inclusive"""
        self.assertEqual(SnrUtils.parse_db_range("0:20:5"), (0.0, 5.0, 10.0, 15.0, 20.0))
        self.assertEqual(SnrUtils.parse_db_range("7.5"), (7.5,))
        self.assertEqual(SnrUtils.parse_db_range("0:1:0.1")[-1], 1.0)

    def test_parse_db_range_errors(self):
        """Malformed grids are rejected"""
        for text in ("a:b:c", "0:10", "10:0:1", "0:10:0"):
            with self.assertRaises(ValidationError):
                SnrUtils.parse_db_range(text)

    def test_db_conversion(self):
        """dB conversion round trip"""
        self.assertAlmostEqual(SnrUtils.db_to_linear(20.0), 100.0)
        self.assertAlmostEqual(SnrUtils.linear_to_db(SnrUtils.db_to_linear(3.0)), 3.0)


class TestStatsUtils(unittest.TestCase):
    """Test binomial statistics"""

    def test_wilson_interval(self):
        """Interval contains the estimate and stays in [0, 1]"""
        lo, hi = StatsUtils.wilson_interval(10, 100)
        self.assertLess(lo, 0.1)
        self.assertGreater(hi, 0.1)
        self.assertEqual(StatsUtils.wilson_interval(0, 50)[0], 0.0)
        self.assertEqual(StatsUtils.wilson_interval(0, 0), (0.0, 1.0))
        self.assertLessEqual(StatsUtils.wilson_interval(50, 50)[1], 1.0)

    def test_standard_error(self):
        """sqrt(p(1-p)/n)"""
        self.assertAlmostEqual(StatsUtils.binomial_standard_error(0.5, 100), 0.05)


class TestSeedUtils(unittest.TestCase):
    """Test seed handling"""

    def test_resolve_seed(self):
        """Given seeds pass through, missing seeds are drawn"""
        self.assertEqual(SeedUtils.resolve_seed(5), (5, False))
        seed, drawn = SeedUtils.resolve_seed(None)
        self.assertTrue(drawn)
        self.assertTrue(0 <= seed < 2 ** 64)

    def test_spawn_seeds(self):
        """Spawned seeds are reproducible and distinct"""
        a = SeedUtils.spawn_seeds(42, 5)
        self.assertEqual(a, SeedUtils.spawn_seeds(42, 5))
        self.assertEqual(len(set(a)), 5)

    def test_substream(self):
        """Substreams depend only on their keys"""
        a = SeedUtils.substream(1, 2, 3).random(4)
        b = SeedUtils.substream(1, 2, 3).random(4)
        c = SeedUtils.substream(1, 3, 2).random(4)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))


class TestValidationUtils(unittest.TestCase):
    """Test validation utilities"""

    def test_clamp_unit(self):
        """Small excursions are clamped, large ones raise"""
        np.testing.assert_array_equal(ValidationUtils.clamp_unit(np.array([-1e-12, 0.5, 1 + 1e-12]), "x"),
                                      [0.0, 0.5, 1.0])
        with self.assertRaises(ClampError):
            ValidationUtils.clamp_unit(np.array([1.1]), "x")

    def test_require_increasing(self):
        """Grids must be non-empty and strictly increasing"""
        ValidationUtils.require_increasing([1.0, 2.0], "grid")
        with self.assertRaises(ValidationError):
            ValidationUtils.require_increasing([], "grid")
        with self.assertRaises(ValidationError):
            ValidationUtils.require_increasing([1.0, 1.0], "grid")


class TestFormatting(unittest.TestCase):
    """Test output formatting and timing helpers"""

    def test_format_value(self):
        """Twelve significant digits"""
        self.assertEqual(FormatUtils.format_value(math.pi), "3.14159265359")
        self.assertEqual(FormatUtils.format_pair((0, 3)), "(0, 3)")
        self.assertEqual(FormatUtils.format_duration(75.0), "1m15.0s")

    def test_stopwatch(self):
        """Without a budget the stopwatch never expires"""
        self.assertFalse(Stopwatch().expired())
        self.assertGreaterEqual(Stopwatch(1e-9).elapsed(), 0.0)


class TestExceptions(unittest.TestCase):
    """Test the error hierarchy"""

    def test_hierarchy(self):
        """Numeric and validation errors share the package base"""
        self.assertTrue(issubclass(ValidationError, ConstellationError))
        self.assertTrue(issubclass(ClampError, NumericError))
        self.assertFalse(issubclass(NumericError, ValidationError))


if __name__ == '__main__':
    unittest.main()
