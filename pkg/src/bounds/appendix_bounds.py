"""
Optimality bounds for small constellations: F(n), three-element optima, the sine-product lemma
"""

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from ..config.settings import Config
from ..constellation.constellation import Constellation
from ..constellation.structures import TargetKind
from ..diversity.diversity import DiversityCalculator, PairMetrics
from ..linalg.matrix_core import CMatrix, perturb_unitary, random_unitary
from ..utils.exceptions import ValidationError
from ..utils.helpers import format_utils, get_logger

logger = get_logger(__name__)

THREE_ELEMENT_OPTIMUM = math.sqrt(3.0) / 2.0
_CUBE_ROOT = np.exp(2j * np.pi / 3)

# D = diag(w, w^-1), E = diag(w^2, w^-2); F = diag(w, w^2) and G = diag(w^2, w) coincide with them
D_MATRIX = np.diag([_CUBE_ROOT, np.conj(_CUBE_ROOT)])
E_MATRIX = np.diag([_CUBE_ROOT ** 2, np.conj(_CUBE_ROOT) ** 2])
F_MATRIX = np.diag([_CUBE_ROOT, _CUBE_ROOT ** 2])
G_MATRIX = np.diag([_CUBE_ROOT ** 2, _CUBE_ROOT])


class ThreeElementForm(str, Enum):
    """Optimal three-element shapes {C, C A X A^-1, C B Y B^-1} and their right-multiplied mirrors"""
    LEFT_DE = "C,CADA^-1,CBEB^-1"
    LEFT_FG = "C,CAFA^-1,CBGB^-1"
    RIGHT_DE = "C,ADA^-1C,BEB^-1C"
    RIGHT_FG = "C,AFA^-1C,BGB^-1C"


@dataclass
class BoundReport:
    """Estimate of F(n) and the resulting three-element product bound F^(1/n) sqrt(3)/2"""
    n: int
    F_estimate: float
    product_bound: float
    witnesses: List[CMatrix] = field(default_factory=list)
    conjectured_floor: float = 0.0
    achieved_by_construction: bool = False

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{
            "n": self.n,
            "F_estimate": self.F_estimate,
            "product_bound": self.product_bound,
            "conjectured_floor": self.conjectured_floor,
            "achieved_by_construction": self.achieved_by_construction,
        }])


@dataclass
class ThreeElementReport:
    """Largest three-element product and sum seen by sampling, refinement and the diagonal grid"""
    samples: int
    sampled_max_product: float
    sampled_max_sum: float
    refined_max_product: float
    refined_max_sum: float
    diagonal_max_sum: float
    constructed_product: float
    constructed_sum: float

    @property
    def max_product(self) -> float:
        return max(self.sampled_max_product, self.refined_max_product, self.constructed_product)

    @property
    def max_sum(self) -> float:
        return max(self.sampled_max_sum, self.refined_max_sum, self.diagonal_max_sum, self.constructed_sum)

    def within_bound(self, slack: float = 1e-6) -> bool:
        return max(self.max_product, self.max_sum) <= THREE_ELEMENT_OPTIMUM + slack

    def to_frame(self) -> pd.DataFrame:
        rows = [
            ("random samples", self.sampled_max_product, self.sampled_max_sum),
            ("local refinement", self.refined_max_product, self.refined_max_sum),
            ("diagonal grid", float("nan"), self.diagonal_max_sum),
            ("construction", self.constructed_product, self.constructed_sum),
        ]
        return pd.DataFrame(rows, columns=["source", "max_product", "max_sum"])


@dataclass(frozen=True)
class SineProductReport:
    """Numerical maximum of min_i prod_j sin(Phi_ij) over column sums equal to pi"""
    m: int
    n: int
    maximum: float
    expected: float
    max_angle_deviation: float
    starts: int

    @property
    def confirmed(self) -> bool:
        return abs(self.maximum - self.expected) <= 1e-6 and self.max_angle_deviation <= 1e-4


class AppendixBounds:
    """Numerical checks of the three-element optimality results"""

    @staticmethod
    def permanent_abs_sum(u: CMatrix) -> float:
        """Sum over permutations sigma of prod_i |u[i, sigma(i)]|"""
        a = np.abs(np.asarray(u))
        n = a.shape[0]
        if a.ndim != 2 or a.shape[1] != n:
            raise ValidationError(f"u: expected a square matrix, got shape {a.shape}")
        if n > 8:
            raise ValidationError(f"u: permutation enumeration is limited to n <= 8, got {n}")
        perms = np.array(list(itertools.permutations(range(n))))
        return float(np.sum(np.prod(a[np.arange(n), perms], axis=1)))

    @staticmethod
    def fourier_matrix(n: int) -> CMatrix:
        """Unitary DFT matrix; every entry has modulus 1/sqrt(n)"""
        k = np.arange(n)
        return np.exp(2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)

    @staticmethod
    def estimate_F(n: int, budget: int, rng: np.random.Generator,
                   restarts: int = Config.F_RESTARTS) -> BoundReport:
        """
        Multi-start annealing of permanent_abs_sum over U(n).

        Restart 0 starts at the Fourier matrix, the rest at Haar draws.
        Each restart runs `budget` Cayley-chart steps.
        """
        if not 2 <= n <= 5:
            raise ValidationError(f"n: F(n) is estimated for 2 <= n <= 5, got {n}")
        if budget < 1:
            raise ValidationError(f"budget: must be positive, got {budget}")

        best_value, best_u = -math.inf, None
        for restart in range(restarts):
            u = AppendixBounds.fourier_matrix(n) if restart == 0 else random_unitary(n, rng).mat
            value = AppendixBounds.permanent_abs_sum(u)
            local_best, local_u = value, u
            t0 = 0.05 * value
            for it in range(budget):
                sigma = max(0.3 * 0.995 ** it, 1e-4)
                temperature = max(t0 * 0.99 ** it, Config.MIN_TEMPERATURE)
                candidate = perturb_unitary(u, sigma, rng)
                cand_value = AppendixBounds.permanent_abs_sum(candidate)
                if cand_value >= value or rng.random() < math.exp((cand_value - value) / temperature):
                    u, value = candidate, cand_value
                    if value > local_best:
                        local_best, local_u = value, u
            logger.debug(f"F({n}) restart {restart}: {format_utils.format_value(local_best)}")
            if local_best > best_value:
                best_value, best_u = local_best, local_u

        report = BoundReport(
            n=n,
            F_estimate=best_value,
            product_bound=best_value ** (1.0 / n) * THREE_ELEMENT_OPTIMUM,
            witnesses=[best_u],
            conjectured_floor=(2.0 / math.sqrt(3.0)) ** n,
            achieved_by_construction=(n == 2),
        )
        logger.info(f"F({n}) ~ {format_utils.format_value(best_value)}, "
                    f"bound {format_utils.format_value(report.product_bound)}")
        return report

    @staticmethod
    def optimal_three_element(form: ThreeElementForm, a: CMatrix, b: Optional[CMatrix] = None,
                              c: Optional[CMatrix] = None) -> Constellation:
        """
        Three-element set of the given optimal shape.

        Product and sum equal sqrt(3)/2 when B E B^-1 = A E A^-1, for
        instance when B is A times a diagonal unitary; `b` defaults to `a`.
        """
        eye = np.eye(2, dtype=complex)
        a = np.asarray(a, dtype=complex)
        b = a if b is None else np.asarray(b, dtype=complex)
        c = eye if c is None else np.asarray(c, dtype=complex)
        form = ThreeElementForm(form)
        x, y = (D_MATRIX, E_MATRIX) if form in (ThreeElementForm.LEFT_DE, ThreeElementForm.RIGHT_DE) \
            else (F_MATRIX, G_MATRIX)
        first = a @ x @ np.conj(a.T)
        second = b @ y @ np.conj(b.T)
        if form in (ThreeElementForm.LEFT_DE, ThreeElementForm.LEFT_FG):
            elements = [c, c @ first, c @ second]
        else:
            elements = [c, first @ c, second @ c]
        return Constellation.special(np.stack(elements))

    @staticmethod
    def is_optimal_triple(constellation: Constellation, tol: float = 1e-9) -> bool:
        """Product reaches sqrt(3)/2"""
        return DiversityCalculator.diversity_product(constellation).value >= THREE_ELEMENT_OPTIMUM - tol

    @staticmethod
    def haar_u2(rng: np.random.Generator, count: int) -> CMatrix:
        """Haar unitaries as a global phase times a uniformly drawn unit quaternion"""
        q = rng.standard_normal((count, 4))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        a = q[:, 0] + 1j * q[:, 1]
        b = q[:, 2] + 1j * q[:, 3]
        su2 = np.stack([np.stack([a, b], axis=-1), np.stack([-np.conj(b), np.conj(a)], axis=-1)], axis=1)
        phase = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, count))
        return phase[:, None, None] * su2

    @staticmethod
    def _triple_metrics(x: CMatrix, y: CMatrix) -> Tuple[np.ndarray, np.ndarray]:
        """(product, sum) of each triple {I, X, Y}"""
        eye = np.eye(2, dtype=complex)
        diffs = np.stack([eye - x, eye - y, x - y], axis=1)
        flat = diffs.reshape(-1, 2, 2)
        product = PairMetrics.product_values(TargetKind.DIFFERENCE, flat, 2).reshape(-1, 3).min(axis=1)
        total = PairMetrics.sum_values(TargetKind.DIFFERENCE, flat, 2).reshape(-1, 3).min(axis=1)
        return product, total

    @staticmethod
    def _refine(x: CMatrix, y: CMatrix, metric: int, rng: np.random.Generator, steps: int) -> float:
        """Hill climbing from one triple on product (metric 0) or sum (metric 1)"""
        best = AppendixBounds._triple_metrics(x[None], y[None])[metric][0]
        for it in range(steps):
            sigma = max(0.1 * 0.99 ** it, 1e-6)
            cx, cy = perturb_unitary(x, sigma, rng), perturb_unitary(y, sigma, rng)
            value = AppendixBounds._triple_metrics(cx[None], cy[None])[metric][0]
            if value > best:
                x, y, best = cx, cy, value
        return float(best)

    @staticmethod
    def verify_three_element_bounds(grid_density: int, rng: np.random.Generator,
                                    samples: int = 100_000, refine_top: int = 10,
                                    refine_steps: int = 400) -> ThreeElementReport:
        """
        Search for three-element U(2) sets beating sqrt(3)/2.

        Sets are normalized to {I, X, Y} (left translation keeps both
        metrics). Random Haar pairs are scored, the best ones are refined
        by hill climbing, diagonal pairs are scanned on a 4-angle grid and
        the constructed optimum is evaluated.
        """
        if grid_density < 1:
            raise ValidationError(f"grid_density: must be positive, got {grid_density}")
        if samples < 1:
            raise ValidationError(f"samples: must be positive, got {samples}")
        products, sums, xs, ys = [], [], [], []
        for start in range(0, samples, 20_000):
            count = min(20_000, samples - start)
            x, y = AppendixBounds.haar_u2(rng, count), AppendixBounds.haar_u2(rng, count)
            p, s = AppendixBounds._triple_metrics(x, y)
            products.append(p)
            sums.append(s)
            xs.append(x)
            ys.append(y)
        products, sums = np.concatenate(products), np.concatenate(sums)
        xs, ys = np.concatenate(xs), np.concatenate(ys)

        refined = [0.0, 0.0]
        for metric, values in enumerate((products, sums)):
            for k in np.argsort(-values, kind="stable")[:refine_top]:
                refined[metric] = max(refined[metric],
                                      AppendixBounds._refine(xs[k], ys[k], metric, rng, refine_steps))

        angles = 2.0 * np.pi * np.arange(grid_density) / grid_density
        grid = np.array(list(itertools.product(angles, repeat=4)))
        dx = np.zeros((len(grid), 2, 2), dtype=complex)
        dy = np.zeros_like(dx)
        dx[:, 0, 0], dx[:, 1, 1] = np.exp(1j * grid[:, 0]), np.exp(1j * grid[:, 1])
        dy[:, 0, 0], dy[:, 1, 1] = np.exp(1j * grid[:, 2]), np.exp(1j * grid[:, 3])
        diagonal_sum = float(AppendixBounds._triple_metrics(dx, dy)[1].max())

        optimum = AppendixBounds.optimal_three_element(ThreeElementForm.LEFT_DE, np.eye(2))
        report = DiversityCalculator.report(optimum)
        result = ThreeElementReport(
            samples=samples,
            sampled_max_product=float(products.max()),
            sampled_max_sum=float(sums.max()),
            refined_max_product=refined[0],
            refined_max_sum=refined[1],
            diagonal_max_sum=diagonal_sum,
            constructed_product=report.product,
            constructed_sum=report.sum,
        )
        logger.info(f"three-element check: max product {format_utils.format_value(result.max_product)}, "
                    f"max sum {format_utils.format_value(result.max_sum)}")
        return result

    @staticmethod
    def _project_columns(phi: np.ndarray, total: float, floor: float) -> np.ndarray:
        """Euclidean projection of each column onto {x >= floor, sum x = total}"""
        n = phi.shape[0]
        budget = total - n * floor
        shifted = phi - floor
        out = np.empty_like(phi)
        for j in range(phi.shape[1]):
            v = shifted[:, j]
            u = np.sort(v)[::-1]
            css = np.cumsum(u) - budget
            ks = np.arange(1, n + 1)
            rho = np.nonzero(u - css / ks > 0)[0][-1]
            tau = css[rho] / (rho + 1)
            out[:, j] = np.maximum(v - tau, 0.0)
        return out + floor

    @staticmethod
    def sine_product_check(m: int, n: int, rng: Optional[np.random.Generator] = None,
                           starts: int = Config.SINE_PRODUCT_STARTS, tau: float = 0.05,
                           max_steps: int = 20_000) -> SineProductReport:
        """
        Maximize min_i prod_j sin(Phi_ij) over n x m angle matrices whose columns sum to pi.

        Runs projected gradient ascent with backtracking on a softmin of
        log d_i from random simplex starts. The log-sine rows are concave,
        so the symmetric point Phi_ij = pi/n is the unique maximizer of the
        softmin as well.
        """
        if not (1 <= m <= 6 and 2 <= n <= 6):
            raise ValidationError(f"m, n: need 1 <= m <= 6 and 2 <= n <= 6, got m={m}, n={n}")
        rng = rng or np.random.default_rng(0)
        floor = 1e-9

        def softmin(phi):
            g = np.sum(np.log(np.sin(phi)), axis=1)
            shift = g.min()
            weights = np.exp(-(g - shift) / tau)
            value = shift - tau * math.log(weights.sum())
            return value, weights / weights.sum()

        best_value, best_phi = -math.inf, None
        for _ in range(starts):
            phi = AppendixBounds._project_columns(math.pi * rng.dirichlet(np.ones(n), size=m).T, math.pi, floor)
            value, weights = softmin(phi)
            step = 0.1
            for _ in range(max_steps):
                grad = weights[:, None] / np.tan(phi)
                while True:
                    trial = AppendixBounds._project_columns(phi + step * grad, math.pi, floor)
                    trial_value, trial_weights = softmin(trial)
                    if trial_value >= value or step < 1e-16:
                        break
                    step *= 0.5
                moved = np.max(np.abs(trial - phi))
                phi, value, weights = trial, trial_value, trial_weights
                step = min(step * 1.5, 1.0)
                if moved < 1e-14:
                    break
            true_value = float(np.min(np.prod(np.sin(phi), axis=1)))
            if true_value > best_value:
                best_value, best_phi = true_value, phi

        return SineProductReport(
            m=m,
            n=n,
            maximum=best_value,
            expected=math.sin(math.pi / n) ** m,
            max_angle_deviation=float(np.max(np.abs(best_phi - math.pi / n))),
            starts=starts,
        )


def permanent_abs_sum(u: CMatrix) -> float:
    """Permutation sum of absolute entry products"""
    return AppendixBounds.permanent_abs_sum(u)


def estimate_F(n: int, budget: int, rng: np.random.Generator) -> BoundReport:
    """Estimate F(n) by multi-start annealing"""
    return AppendixBounds.estimate_F(n, budget, rng)


def optimal_three_element(form: ThreeElementForm, a: CMatrix, b: Optional[CMatrix] = None,
                          c: Optional[CMatrix] = None) -> Constellation:
    """Constructed three-element optimum"""
    return AppendixBounds.optimal_three_element(form, a, b, c)


def verify_three_element_bounds(grid_density: int, rng: np.random.Generator,
                                samples: int = 100_000) -> ThreeElementReport:
    """Sampling check of the three-element optimum"""
    return AppendixBounds.verify_three_element_bounds(grid_density, rng, samples)


def sine_product_check(m: int, n: int, rng: Optional[np.random.Generator] = None) -> SineProductReport:
    """Numerical check of max min_i prod_j sin(Phi_ij) = sin(pi/n)^m"""
    return AppendixBounds.sine_product_check(m, n, rng)


# Global bounds instance
appendix_bounds = AppendixBounds()
