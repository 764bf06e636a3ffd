"""
Tests for the Rayleigh block-fading Monte-Carlo simulator
"""

import sys
import os
import math
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config.settings import SimConfig
from src.constellation.builtins import builtin
from src.constellation.constellation import Constellation
from src.constellation.structures import TargetKind
from src.diversity.diversity import ChannelConfig, PairMetrics
from src.linalg.matrix_core import random_unitary
from src.simulation.channel_sim import ChannelSimulator
from src.utils.exceptions import ValidationError


class TestDecoding(unittest.TestCase):
    """Test ML decoding"""

    def test_noiseless_decoding_is_correct(self):
        """Without noise the sent codeword is always recovered"""
        c = builtin("sl2f5")
        cfg = ChannelConfig(T=4, M=2, N=2, rho=1.0)
        rng = np.random.default_rng(1)
        for _ in range(25):
            sent, decoded = ChannelSimulator.transmit_decode_trial(c, cfg, rng, noise=False)
            self.assertEqual(sent, decoded)

    def test_channel_shape_mismatch(self):
        """T, M of the channel must match the constellation"""
        with self.assertRaises(ValidationError):
            ChannelSimulator.transmit_decode_trial(builtin("sl2f5"), ChannelConfig(T=6, M=3, N=1, rho=1.0),
                                                   np.random.default_rng(0))

    def test_single_codeword(self):
        """With one codeword nothing can go wrong"""
        c = Constellation.special(np.eye(2, dtype=complex)[None])
        cfg = ChannelConfig(T=4, M=2, N=2, rho=0.1)
        self.assertEqual(ChannelSimulator.transmit_decode_trial(c, cfg, np.random.default_rng(2)), (0, 0))
        point = ChannelSimulator.simulate_bler(c, SimConfig(rho_db=(-10.0,), trials_per_point=300, seed=2)).points[0]
        self.assertEqual((point.errors, point.bler), (0, 0.0))

    def test_duplicated_codeword_pair(self):
        """Two equal codewords are confused half the time"""
        u = random_unitary(2, np.random.default_rng(3)).mat
        c = Constellation.special(np.stack([u, u]))
        point = ChannelSimulator.simulate_bler(c, SimConfig(rho_db=(30.0,), trials_per_point=4000, seed=3)).points[0]
        self.assertAlmostEqual(point.bler, 0.5, delta=0.05)


class TestBlockErrorRate(unittest.TestCase):
    """Test block error rate curves"""

    def setUp(self):
        self.c = builtin("exact3dim2")

    def test_deterministic(self):
        """Equal seeds give identical curves"""
        sim = SimConfig(rho_db=(0.0, 5.0), trials_per_point=1200, seed=11)
        a = ChannelSimulator.simulate_bler(self.c, sim).to_frame()
        b = ChannelSimulator.simulate_bler(self.c, sim).to_frame()
        self.assertTrue(a.equals(b))

    def test_wilson_interval_contains_estimate(self):
        """Each point lies inside its Wilson interval"""
        sim = SimConfig(rho_db=(0.0, 10.0), trials_per_point=1000, seed=3)
        frame = ChannelSimulator.simulate_bler(self.c, sim, label="exact3dim2").to_frame()
        self.assertEqual(list(frame.columns), ["rho_db", "trials", "errors", "bler", "wilson_lo", "wilson_hi"])
        for _, row in frame.iterrows():
            self.assertLessEqual(row["wilson_lo"], row["bler"])
            self.assertLessEqual(row["bler"], row["wilson_hi"])
            self.assertEqual(row["trials"], 1000)

    def test_max_errors_truncates(self):
        """Counting stops at the trial producing the max_errors-th error"""
        sim = SimConfig(rho_db=(-20.0,), trials_per_point=10_000, seed=4, max_errors=10)
        point = ChannelSimulator.simulate_bler(builtin("sl2f5"), sim).points[0]
        self.assertEqual(point.errors, 10)
        self.assertLess(point.trials, 10_000)
        self.assertAlmostEqual(point.bler, 10 / point.trials)

    def test_errors_fall_with_snr(self):
        """Higher SNR does not give more errors on a well-separated set"""
        sim = SimConfig(rho_db=(0.0, 20.0), trials_per_point=2000, seed=5)
        points = ChannelSimulator.simulate_bler(self.c, sim).points
        self.assertGreater(points[0].errors, points[1].errors)

    def test_left_unitary_invariance(self):
        """Rotating every frame by one unitary P leaves the error rate unchanged"""
        frames = self.c.frames()
        p = random_unitary(frames.shape[1], np.random.default_rng(9)).mat
        rotated = Constellation.general(p @ frames)
        sim = SimConfig(rho_db=(0.0,), trials_per_point=10_000, seed=21)
        a = ChannelSimulator.simulate_bler(self.c, sim).points[0]
        b = ChannelSimulator.simulate_bler(rotated, sim).points[0]
        self.assertLessEqual(a.wilson_lo, b.wilson_hi)
        self.assertLessEqual(b.wilson_lo, a.wilson_hi)


class TestPairwiseEstimate(unittest.TestCase):
    """Test the two-codeword Monte-Carlo estimate against the exact integral"""

    def test_agrees_with_exact_value(self):
        """Estimate lies within five standard errors of the exact probability"""
        frames = builtin("exact3dim2").frames()
        cfg = ChannelConfig(T=4, M=2, N=1, rho=1.0)
        gram = np.conj(frames[0].T) @ frames[1]
        attenuation = PairMetrics.attenuations(TargetKind.GRAM, gram[None], 2)[0]
        exact = PairMetrics.exact_value(attenuation, cfg)
        trials = 40_000
        estimate = ChannelSimulator.pairwise_error_estimate(frames[0], frames[1], cfg, trials,
                                                            np.random.default_rng(6))
        sigma = math.sqrt(exact * (1 - exact) / trials)
        self.assertLess(abs(estimate - exact), 5 * sigma + 1e-3)

    def test_rejects_bad_input(self):
        """Frame shapes and trial counts are validated"""
        frames = builtin("exact3dim2").frames()
        rng = np.random.default_rng(0)
        with self.assertRaises(ValidationError):
            ChannelSimulator.pairwise_error_estimate(frames[0], frames[1], ChannelConfig(T=6, M=2, N=1, rho=1.0),
                                                     10, rng)
        with self.assertRaises(ValidationError):
            ChannelSimulator.pairwise_error_estimate(frames[0], frames[1], ChannelConfig(T=4, M=2, N=1, rho=1.0),
                                                     0, rng)


if __name__ == '__main__':
    unittest.main()
