"""
Tests for diversity metrics, diversity functions and the quadrature
"""

import sys
import os
import math
import unittest

import numpy as np
from scipy.integrate import trapezoid

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.constellation.builtins import builtin
from src.constellation.constellation import Constellation
from src.constellation.structures import TargetKind
from src.diversity.diversity import ChannelConfig, DiversityCalculator, PairMetrics
from src.diversity.quadrature import adaptive_simpson
from src.linalg.matrix_core import determinant_abs, random_unitary
from src.utils.exceptions import QuadratureError, ValidationError

SL2F5_VALUE = 0.5 * math.sqrt((3.0 - math.sqrt(5.0)) / 2.0)


def _random_constellation(rng, size, dim=2):
    return Constellation.special(np.stack([random_unitary(dim, rng).mat for _ in range(size)]))


def _random_su2(rng, size):
    q = rng.standard_normal((size, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a, b = q[:, 0] + 1j * q[:, 1], q[:, 2] + 1j * q[:, 3]
    return np.stack([np.array([[x, y], [-np.conj(y), np.conj(x)]]) for x, y in zip(a, b)])


class TestBuiltinMetrics(unittest.TestCase):
    """Test published diversity values of the builtins"""

    def test_sl2f5(self):
        """sl2f5 product and sum equal (1/2) sqrt((3 - sqrt 5)/2)"""
        report = DiversityCalculator.report(builtin("sl2f5"))
        self.assertAlmostEqual(report.product, SL2F5_VALUE, delta=1e-9)
        self.assertAlmostEqual(report.sum, SL2F5_VALUE, delta=1e-9)

    def test_orthogonal121(self):
        """Orthogonal design product = sum ~ 0.1992"""
        report = DiversityCalculator.report(builtin("orthogonal121"))
        self.assertAlmostEqual(report.product, 0.1992, delta=1e-3)
        self.assertAlmostEqual(report.sum, 0.1992, delta=1e-3)

    def test_numderived121(self):
        """Numerically derived set: large sum, small product"""
        c = builtin("numderived121")
        report = DiversityCalculator.report(c)
        self.assertAlmostEqual(report.sum, 0.3886, delta=1e-3)
        self.assertAlmostEqual(report.product, 0.0834, delta=1e-3)

    def test_numderived121_min_determinant(self):
        """Smallest |det(Psi - Psi')| is (2 * product)^M ~ 0.0278"""
        c = builtin("numderived121")
        i, j = np.triu_indices(c.L, 1)
        smallest = float(np.min(determinant_abs(c.elements[i] - c.elements[j])))
        self.assertAlmostEqual(smallest, 0.0278, delta=1e-3)
        product = DiversityCalculator.diversity_product(c).value
        self.assertAlmostEqual(smallest, (2.0 * product) ** c.M, delta=1e-12)

    def test_g214(self):
        """G(21, 4) product ~ 0.3851"""
        report = DiversityCalculator.report(builtin("g214"))
        self.assertAlmostEqual(report.product, 0.3851, delta=1e-3)

    def test_optimal3dim2(self):
        """{I, D, D^2} reaches sqrt(3)/2"""
        report = DiversityCalculator.report(builtin("optimal3dim2"))
        self.assertAlmostEqual(report.product, math.sqrt(3) / 2, delta=1e-12)
        self.assertAlmostEqual(report.sum, math.sqrt(3) / 2, delta=1e-12)

    def test_argmin_pair_is_lexicographic(self):
        """The reported pair is ordered and attains the minimum"""
        c = builtin("optimal3dim2")
        pair = DiversityCalculator.diversity_product(c).pair
        self.assertEqual(pair, (0, 1))


class TestMetricProperties(unittest.TestCase):
    """Test invariants of the diversity metrics"""

    def test_product_at_most_sum(self):
        """Diversity product never exceeds diversity sum"""
        rng = np.random.default_rng(1)
        for dim in (2, 3):
            c = _random_constellation(rng, 12, dim)
            report = DiversityCalculator.report(c)
            self.assertLessEqual(report.product, report.sum + 1e-12)

    def test_su2_product_equals_sum(self):
        """In SU(2) product and sum coincide"""
        c = Constellation.special(_random_su2(np.random.default_rng(2), 10))
        report = DiversityCalculator.report(c)
        self.assertAlmostEqual(report.product, report.sum, delta=1e-12)

    def test_special_general_consistency(self):
        """Special form and its embedded frames give the same metrics"""
        c = _random_constellation(np.random.default_rng(3), 8)
        special = DiversityCalculator.report(c)
        general = DiversityCalculator.report(c.to_general())
        self.assertAlmostEqual(special.product, general.product, delta=1e-9)
        self.assertAlmostEqual(special.sum, general.sum, delta=1e-9)

    def test_unitary_invariance(self):
        """Metrics are unchanged by Psi -> U Psi V"""
        rng = np.random.default_rng(4)
        c = _random_constellation(rng, 9)
        u, v = random_unitary(2, rng).mat, random_unitary(2, rng).mat
        moved = Constellation.special(u @ c.elements @ v)
        cfg = ChannelConfig(T=4, M=2, N=2, rho=10.0)
        a, b = DiversityCalculator.report(c), DiversityCalculator.report(moved)
        self.assertAlmostEqual(a.product, b.product, delta=1e-12)
        self.assertAlmostEqual(a.sum, b.sum, delta=1e-12)
        self.assertAlmostEqual(DiversityCalculator.chernoff_diversity(c, cfg),
                               DiversityCalculator.chernoff_diversity(moved, cfg), delta=1e-12)

    def test_identical_elements(self):
        """Repeated elements give zero product and sum"""
        u = random_unitary(2, np.random.default_rng(5)).mat
        report = DiversityCalculator.report(Constellation.special(np.stack([u, u, np.eye(2)])))
        self.assertEqual(report.product, 0.0)
        self.assertEqual(report.sum, 0.0)
        self.assertEqual(report.argmin_product, (0, 1))

    def test_single_element(self):
        """A single element has no pairs"""
        with self.assertRaises(ValidationError):
            DiversityCalculator.diversity_product(Constellation.special(np.eye(2)[None]))


class TestDiversityFunctions(unittest.TestCase):
    """Test the Chernoff and exact diversity functions"""

    def setUp(self):
        self.c = builtin("exact3dim2")

    def test_channel_for_constellation(self):
        """Channel picks up T and M from the constellation"""
        cfg = ChannelConfig.for_constellation(builtin("sl2f5"), 3, 2.0)
        self.assertEqual((cfg.T, cfg.M, cfg.N, cfg.rho), (4, 2, 3, 2.0))

    def test_exact_value_matches_trapezoid(self):
        """Adaptive quadrature agrees with a dense trapezoid rule on random attenuations"""
        rng = np.random.default_rng(8)
        theta = np.linspace(-math.pi / 2, math.pi / 2, 200_001)
        c2 = np.cos(theta) ** 2
        for N, rho in ((1, 1.0), (2, 10.0), (3, 100.0)):
            cfg = ChannelConfig(T=4, M=2, N=N, rho=rho)
            for _ in range(4):
                attenuation = rng.uniform(0.05, 1.0, 2)
                ratios = c2[:, None] / (c2[:, None] + cfg.rho_tilde * attenuation[None, :])
                reference = trapezoid(np.prod(ratios ** N, axis=-1), theta) / (2 * math.pi)
                self.assertAlmostEqual(PairMetrics.exact_value(attenuation, cfg), reference, delta=1e-9)

    def test_rho_tilde(self):
        """rho~ = (rho T/M)^2 / (4 (1 + rho T/M))"""
        self.assertAlmostEqual(ChannelConfig(T=4, M=2, N=2, rho=1.0).rho_tilde, 1.0 / 3.0, places=14)

    def test_channel_validation(self):
        """Channel parameters are validated"""
        with self.assertRaises(ValidationError):
            ChannelConfig(T=4, M=2, N=0, rho=1.0)
        with self.assertRaises(ValidationError):
            ChannelConfig(T=4, M=2, N=2, rho=0.0)

    def test_chernoff_bounds_exact(self):
        """Chernoff value is at least the exact value at every SNR"""
        for rho_db in (0.0, 5.0, 10.0, 20.0):
            cfg = ChannelConfig(T=4, M=2, N=2, rho=10 ** (rho_db / 10))
            chernoff = DiversityCalculator.chernoff_diversity(self.c, cfg)
            exact = DiversityCalculator.exact_diversity(self.c, cfg)
            self.assertLessEqual(exact, chernoff + 1e-12)
            self.assertGreater(exact, 0.0)

    def test_chernoff_decreasing_in_rho(self):
        """Chernoff diversity falls as SNR grows"""
        configs = ChannelConfig.sweep(4, 2, 2, [0.0, 5.0, 10.0, 15.0, 20.0])
        values = [v for _, v in DiversityCalculator.diversity_function_curve(self.c, configs)]
        self.assertTrue(all(b < a for a, b in zip(values, values[1:])))

    def test_zero_attenuation(self):
        """Coinciding codewords are confused half the time"""
        cfg = ChannelConfig(T=4, M=2, N=2, rho=100.0)
        self.assertAlmostEqual(PairMetrics.exact_value(np.zeros(2), cfg), 0.5, places=9)
        self.assertAlmostEqual(float(PairMetrics.chernoff_values(np.zeros((1, 2)), cfg)[0]), 0.5)

    def test_channel_must_match(self):
        """Channel T, M must match the constellation"""
        with self.assertRaises(ValidationError):
            DiversityCalculator.chernoff_diversity(self.c, ChannelConfig(T=6, M=3, N=2, rho=1.0))

    def test_curve_grid_must_increase(self):
        """Curve SNR grids must be strictly increasing"""
        with self.assertRaises(ValidationError):
            ChannelConfig.sweep(4, 2, 2, [10.0, 5.0])

    def test_attenuations_by_target_kind(self):
        """Difference and Gram targets give the same attenuations"""
        rng = np.random.default_rng(6)
        psi, psi2 = random_unitary(2, rng).mat, random_unitary(2, rng).mat
        general = Constellation.special(np.stack([psi, psi2])).to_general().elements
        gram = np.conj(general[0].T) @ general[1]
        a = PairMetrics.attenuations(TargetKind.DIFFERENCE, (psi - psi2)[None], 2)
        b = PairMetrics.attenuations(TargetKind.GRAM, gram[None], 2)
        np.testing.assert_allclose(np.sort(a), np.sort(b), atol=1e-12)


class TestQuadrature(unittest.TestCase):
    """Test adaptive Simpson"""

    def test_cosine(self):
        """Integral of cos over [0, pi/2] is 1"""
        value, error, evaluations = adaptive_simpson(np.cos, 0.0, math.pi / 2)
        self.assertAlmostEqual(value, 1.0, delta=1e-10)
        self.assertGreater(evaluations, 0)

    def test_empty_interval(self):
        """A zero-width interval integrates to zero"""
        self.assertEqual(adaptive_simpson(np.cos, 1.0, 1.0)[0], 0.0)

    def test_depth_cap(self):
        """Unmet tolerance at the depth cap raises"""
        with self.assertRaises(QuadratureError):
            adaptive_simpson(lambda x: np.exp(10 * x), 0.0, 1.0, tol=1e-14, max_depth=1)


if __name__ == '__main__':
    unittest.main()
