"""
Exhaustive search over a regular grid of the explicit U(2) parameterization
"""

import itertools
import math
from typing import Optional, Sequence

import numpy as np

from ..config.settings import Config
from ..constellation.constellation import ConstellationForm
from ..constellation.structures import GeneratorStructure, expand
from ..diversity.diversity import DiversityCalculator
from ..utils.exceptions import ValidationError
from ..utils.helpers import Stopwatch, format_utils, get_logger
from .objective import Objective, ObjectiveEvaluator, OptimizerTrace

logger = get_logger(__name__)


class GridSearchOptimizer:
    """Brute force over (phi, alpha, beta, theta) per generator"""

    @staticmethod
    def u2_element(phi: float, alpha: float, beta: float, theta: float) -> np.ndarray:
        """[[a, b e^{i theta}], [-conj(b), conj(a) e^{i theta}]] with a = cos(phi) e^{i alpha}, b = sin(phi) e^{i beta}"""
        a = math.cos(phi) * np.exp(1j * alpha)
        b = math.sin(phi) * np.exp(1j * beta)
        phase = np.exp(1j * theta)
        return np.array([[a, b * phase], [-np.conj(b), np.conj(a) * phase]])

    @staticmethod
    def grid_points(density: int) -> np.ndarray:
        """density^4 matrices: phi_k = (pi/2) k/d, angles 2 pi k/d"""
        if density < 1:
            raise ValidationError(f"grid_density: must be positive, got {density}")
        phis = [0.5 * math.pi * k / density for k in range(density)]
        angles = [2.0 * math.pi * k / density for k in range(density)]
        return np.stack([
            GridSearchOptimizer.u2_element(phi, alpha, beta, theta)
            for phi, alpha, beta, theta in itertools.product(phis, angles, angles, angles)
        ])

    @staticmethod
    def cost(template: GeneratorStructure, density: int) -> int:
        """Number of generator tuples the search evaluates"""
        return (density ** 4) ** len(template.generators)

    @staticmethod
    def run(template: GeneratorStructure, objective: Objective, density: int,
            generator_order: Optional[Sequence[int]] = None,
            max_points: int = Config.GRID_MAX_POINTS,
            budget_seconds: Optional[float] = None) -> OptimizerTrace:
        """
        Evaluate every grid tuple and keep the best (first found on ties).

        Args:
            template: structure with at most two 2x2 generators
            objective: what to improve
            density: grid points per angle
            generator_order: order in which generators take the grid axes
                (outer loop first); the best value does not depend on it
            max_points: evaluation cap; larger grids are refused
            budget_seconds: optional wall-clock limit, stops on a partial grid

        Returns:
            OptimizerTrace whose iterations record each improvement
        """
        if template.M != 2 or template.form != ConstellationForm.SPECIAL:
            raise ValidationError(f"structure: grid search needs 2x2 special-form generators, got M={template.M}")
        n_gen = len(template.generators)
        if n_gen > 2:
            raise ValidationError(f"structure: grid search supports at most 2 generators, got {n_gen}")
        order = list(range(n_gen)) if generator_order is None else list(generator_order)
        if sorted(order) != list(range(n_gen)):
            raise ValidationError(f"generator_order: must be a permutation of 0..{n_gen - 1}, got {order}")
        total = GridSearchOptimizer.cost(template, density)
        if total > max_points:
            raise ValidationError(
                f"grid_density: {density} needs {total:.3g} evaluations over {n_gen} generator(s), "
                f"cap is {max_points:.3g}; lower the density"
            )

        evaluator = ObjectiveEvaluator(template, objective)
        grid = GridSearchOptimizer.grid_points(density)
        watch = Stopwatch(budget_seconds)
        logger.info(f"grid: {total} points at density {density}, objective {objective.label()}")

        best_score = -math.inf
        best_gens = None
        iterations = []
        evaluated = 0
        generators = [None] * n_gen
        for index in itertools.product(range(grid.shape[0]), repeat=n_gen):
            for axis, gen_pos in enumerate(order):
                generators[gen_pos] = grid[index[axis]]
            score = evaluator.score(generators)
            if score > best_score:
                best_score, best_gens = score, list(generators)
                iterations.append((evaluated, objective.value_from_score(best_score)))
            evaluated += 1
            if evaluated % Config.GRID_BATCH_SIZE == 0 and watch.expired():
                logger.info(f"grid: budget reached after {evaluated} of {total} points")
                break

        if iterations[-1][0] != evaluated - 1:
            iterations.append((evaluated - 1, objective.value_from_score(best_score)))
        structure = template.with_generators(best_gens)
        final = expand(structure)
        best_value = objective.value_from_score(best_score)
        logger.info(f"grid: best {format_utils.format_value(best_value)} in {format_utils.format_duration(watch.elapsed())}")
        return OptimizerTrace(
            method="grid",
            objective=objective,
            iterations=iterations,
            final=final,
            final_report=DiversityCalculator.report(final),
            accepted_count=len(iterations),
            rejected_count=evaluated - len(iterations),
            best_value=best_value,
            seed=0,
            elapsed_seconds=watch.elapsed(),
            final_structure=structure,
            notes=[f"{evaluated} of {total} grid points evaluated"],
        )


def grid_search_u2(structure: GeneratorStructure, obj: Objective, grid_density: int) -> OptimizerTrace:
    """Brute-force grid over the explicit U(2) form of each generator"""
    return GridSearchOptimizer.run(structure, obj, grid_density)


# Global optimizer instance
grid_optimizer = GridSearchOptimizer()
