"""
Long-running checks of optimizer floors, Monte-Carlo agreement and the bounds

Run with RUN_SLOW_TESTS=1; each optimizer case takes up to three minutes.
"""

import sys
import os
import math
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.bounds.appendix_bounds import THREE_ELEMENT_OPTIMUM, AppendixBounds
from src.config.settings import GAConfig, SAConfig, SimConfig
from src.constellation.builtins import builtin, builtin_structure
from src.constellation.structures import GeneratorStructure, StructureKind, TargetKind
from src.diversity.diversity import ChannelConfig, PairMetrics
from src.linalg.matrix_core import random_unitary
from src.optimize.annealing import SimulatedAnnealingOptimizer
from src.optimize.genetic import GeneticOptimizer
from src.optimize.objective import Objective
from src.simulation.channel_sim import ChannelSimulator

SLOW = os.getenv("RUN_SLOW_TESTS") == "1"
BUDGET = 180.0


def _long_sa(seed: int) -> SAConfig:
    return SAConfig(seed=seed, budget_seconds=BUDGET, max_iterations=10 ** 9, stall_limit=10 ** 9)


def _long_ga(seed: int, size: int) -> GAConfig:
    return GAConfig(seed=seed, population_size=size, budget_seconds=BUDGET,
                    max_iterations=10 ** 9, stall_limit=10 ** 9)


@unittest.skipUnless(SLOW, "set RUN_SLOW_TESTS=1")
class TestOptimizerFloors(unittest.TestCase):
    """Optimizer results at a three-minute budget"""

    def test_sa_akbl_121_sum(self):
        """A^k B^l with 121 elements reaches diversity sum 0.37"""
        template = GeneratorStructure.template(StructureKind.POWERS_AB, 2, p=10, q=10)
        self.assertGreaterEqual(SimulatedAnnealingOptimizer.run(template, Objective.max_sum(), _long_sa(1)).best_value,
                                0.37)

    def test_sa_akbl_36_sum(self):
        """A^k B^l with 36 elements reaches diversity sum 0.49"""
        template = GeneratorStructure.template(StructureKind.POWERS_AB, 2, p=5, q=5)
        self.assertGreaterEqual(SimulatedAnnealingOptimizer.run(template, Objective.max_sum(), _long_sa(2)).best_value,
                                0.49)

    def test_ga_three_elements_product(self):
        """Three free elements approach sqrt(3)/2"""
        trace = GeneticOptimizer.run(2, 3, Objective.max_product(), _long_ga(3, 3))
        self.assertGreaterEqual(trace.best_value, 0.85)
        self.assertLessEqual(trace.best_value, THREE_ELEMENT_OPTIMUM + 1e-9)

    def test_ga_four_elements_sum(self):
        """Four free elements approach sqrt(2/3) in diversity sum"""
        trace = GeneticOptimizer.run(2, 4, Objective.max_sum(), _long_ga(4, 4))
        self.assertGreaterEqual(trace.best_value, 0.79)
        self.assertLessEqual(trace.best_value, math.sqrt(2.0 / 3.0) + 1e-6)

    def test_refine_g214(self):
        """Refining G(21, 4) never drops below its product"""
        trace = SimulatedAnnealingOptimizer.refine_from(builtin_structure("g214"), Objective.max_product(),
                                                        _long_sa(5))
        self.assertGreaterEqual(trace.best_value, 0.3851 - 1e-4)


@unittest.skipUnless(SLOW, "set RUN_SLOW_TESTS=1")
class TestMonteCarloAgreement(unittest.TestCase):
    """Simulation against the quadrature and between constellations"""

    def test_pairwise_estimate_matches_integral(self):
        """Random frame pairs agree with the exact integral within three standard errors"""
        rng = np.random.default_rng(6)
        trials = 100_000
        for _ in range(5):
            frames = [random_unitary(4, rng).mat[:, :2] for _ in range(2)]
            gram = np.conj(frames[0].T) @ frames[1]
            attenuation = PairMetrics.attenuations(TargetKind.GRAM, gram[None], 2)
            for rho_db in (0.0, 10.0, 20.0):
                cfg = ChannelConfig(T=4, M=2, N=2, rho=10 ** (rho_db / 10))
                exact = PairMetrics.exact_value(attenuation[0], cfg)
                chernoff = float(PairMetrics.chernoff_values(attenuation, cfg)[0])
                estimate = ChannelSimulator.pairwise_error_estimate(frames[0], frames[1], cfg, trials, rng)
                sigma = math.sqrt(exact * (1 - exact) / trials)
                self.assertLess(abs(estimate - exact), 3 * sigma + 1e-4)
                self.assertLessEqual(exact, chernoff + 1e-12)

    def test_large_sum_wins_at_low_snr(self):
        """numderived121 beats orthogonal121 at 0 dB"""
        sim = SimConfig(rho_db=(0.0,), receive_antennas=2, trials_per_point=20_000, seed=7)
        numerical = ChannelSimulator.simulate_bler(builtin("numderived121"), sim).points[0]
        orthogonal = ChannelSimulator.simulate_bler(builtin("orthogonal121"), sim).points[0]
        self.assertLess(numerical.wilson_hi, orthogonal.wilson_lo)


@unittest.skipUnless(SLOW, "set RUN_SLOW_TESTS=1")
class TestBoundsAtScale(unittest.TestCase):
    """Three-element and sine-product checks at full sample sizes"""

    def test_three_element_sampling(self):
        """10^5 random triples stay within sqrt(3)/2"""
        report = AppendixBounds.verify_three_element_bounds(12, np.random.default_rng(8), samples=100_000)
        self.assertTrue(report.within_bound())

    def test_sine_products(self):
        """The symmetric angles maximize the minimum sine product"""
        for m, n in ((1, 3), (2, 3), (2, 4)):
            self.assertTrue(AppendixBounds.sine_product_check(m, n, np.random.default_rng(9)).confirmed)

    def test_F2(self):
        """F(2) = 1"""
        self.assertAlmostEqual(AppendixBounds.estimate_F(2, 200, np.random.default_rng(10)).F_estimate,
                               1.0, delta=1e-6)


if __name__ == '__main__':
    unittest.main()
