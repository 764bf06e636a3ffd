"""
Tests for the small-constellation optimality checks
"""

import sys
import os
import math
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.bounds.appendix_bounds import (
    THREE_ELEMENT_OPTIMUM,
    AppendixBounds,
    ThreeElementForm,
)
from src.constellation.constellation import Constellation
from src.diversity.diversity import DiversityCalculator
from src.linalg.matrix_core import random_unitary
from src.utils.exceptions import ValidationError


class TestPermanentSum(unittest.TestCase):
    """Test the permutation sum of absolute entries"""

    def test_identity(self):
        """Only the identity permutation contributes for I"""
        self.assertAlmostEqual(AppendixBounds.permanent_abs_sum(np.eye(4)), 1.0, places=14)

    def test_fourier(self):
        """Every permutation contributes n^(-n/2) for the DFT"""
        for n in (2, 3, 4):
            expected = math.factorial(n) * n ** (-n / 2)
            self.assertAlmostEqual(AppendixBounds.permanent_abs_sum(AppendixBounds.fourier_matrix(n)),
                                   expected, places=12)

    def test_non_square(self):
        """Non-square input is rejected"""
        with self.assertRaises(ValidationError):
            AppendixBounds.permanent_abs_sum(np.ones((2, 3)))


class TestEstimateF(unittest.TestCase):
    """Test the F(n) estimate"""

    def test_n2_is_one(self):
        """|a||d| + |b||c| = 1 on U(2)"""
        report = AppendixBounds.estimate_F(2, 20, np.random.default_rng(1), restarts=2)
        self.assertAlmostEqual(report.F_estimate, 1.0, places=9)
        self.assertAlmostEqual(report.product_bound, THREE_ELEMENT_OPTIMUM, places=9)
        self.assertTrue(report.achieved_by_construction)

    def test_n3_at_least_fourier(self):
        """The estimate never falls below its Fourier start"""
        report = AppendixBounds.estimate_F(3, 50, np.random.default_rng(2), restarts=2)
        self.assertGreaterEqual(report.F_estimate, 2.0 / math.sqrt(3.0) - 1e-12)
        self.assertEqual(list(report.to_frame().columns),
                         ["n", "F_estimate", "product_bound", "conjectured_floor", "achieved_by_construction"])

    def test_n_range(self):
        """n outside 2..5 is rejected"""
        with self.assertRaises(ValidationError):
            AppendixBounds.estimate_F(6, 10, np.random.default_rng(0))


class TestThreeElement(unittest.TestCase):
    """Test the three-element constructions and the sampling check"""

    def test_all_forms_reach_optimum(self):
        """Every construction has product and sum sqrt(3)/2"""
        rng = np.random.default_rng(3)
        a, c = random_unitary(2, rng).mat, random_unitary(2, rng).mat
        for form in ThreeElementForm:
            triple = AppendixBounds.optimal_three_element(form, a, c=c)
            report = DiversityCalculator.report(triple)
            self.assertAlmostEqual(report.product, THREE_ELEMENT_OPTIMUM, delta=1e-9)
            self.assertAlmostEqual(report.sum, THREE_ELEMENT_OPTIMUM, delta=1e-9)
            self.assertTrue(AppendixBounds.is_optimal_triple(triple))

    def test_diagonal_b_keeps_optimum(self):
        """B = A times a diagonal unitary is still optimal"""
        rng = np.random.default_rng(4)
        a = random_unitary(2, rng).mat
        b = a @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 2)))
        triple = AppendixBounds.optimal_three_element(ThreeElementForm.LEFT_DE, a, b)
        self.assertTrue(AppendixBounds.is_optimal_triple(triple))

    def test_random_triple_not_optimal(self):
        """A Haar-random triple falls short of sqrt(3)/2"""
        rng = np.random.default_rng(7)
        triple = Constellation.special(np.stack([random_unitary(2, rng).mat for _ in range(3)]))
        self.assertFalse(AppendixBounds.is_optimal_triple(triple))

    def test_sampling_stays_within_bound(self):
        """No sampled triple beats sqrt(3)/2"""
        report = AppendixBounds.verify_three_element_bounds(
            3, np.random.default_rng(5), samples=2000, refine_top=2, refine_steps=50)
        self.assertTrue(report.within_bound())
        self.assertAlmostEqual(report.constructed_product, THREE_ELEMENT_OPTIMUM, delta=1e-9)
        self.assertEqual(len(report.to_frame()), 4)

    def test_haar_u2_unitary(self):
        """Quaternion draws are unitary"""
        draws = AppendixBounds.haar_u2(np.random.default_rng(6), 50)
        grams = np.conj(np.swapaxes(draws, -1, -2)) @ draws
        np.testing.assert_allclose(grams, np.broadcast_to(np.eye(2), grams.shape), atol=1e-12)


class TestSineProduct(unittest.TestCase):
    """Test the sine-product maximization"""

    def test_symmetric_maximum(self):
        """max min_i prod_j sin = sin(pi/n)^m at Phi = pi/n"""
        report = AppendixBounds.sine_product_check(2, 3, np.random.default_rng(7), starts=4)
        self.assertAlmostEqual(report.expected, math.sin(math.pi / 3) ** 2, places=14)
        self.assertTrue(report.confirmed)

    def test_range(self):
        """Dimensions are validated"""
        with self.assertRaises(ValidationError):
            AppendixBounds.sine_product_check(1, 1)


if __name__ == '__main__':
    unittest.main()
