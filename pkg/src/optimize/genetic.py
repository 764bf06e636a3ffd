"""
Genetic search over free constellations of unitaries
"""

import numpy as np

from ..config.settings import GAConfig
from ..constellation.constellation import Constellation, ConstellationForm
from ..constellation.structures import GeneratorStructure
from ..diversity.diversity import DiversityCalculator
from ..linalg.matrix_core import CMatrix, perturb_unitary, random_unitary
from ..utils.exceptions import ValidationError
from ..utils.helpers import Stopwatch, format_utils, get_logger
from .objective import Objective, OptimizerTrace, all_pair_targets

logger = get_logger(__name__)


class GeneticOptimizer:
    """Replace-worst and mutate moves on a population of L unitaries, kept only when they help"""

    @staticmethod
    def pair_matrix(population: CMatrix, objective: Objective) -> np.ndarray:
        """Symmetric L x L pair goodness with +inf on the diagonal"""
        L, M = population.shape[0], population.shape[-1]
        kind, mats = all_pair_targets(population, ConstellationForm.SPECIAL)
        values = objective.pair_goodness(kind, mats, M)
        table = np.full((L, L), np.inf)
        ii, jj = np.triu_indices(L, k=1)
        table[ii, jj] = values
        table[jj, ii] = values
        return table

    @staticmethod
    def fitness(table: np.ndarray) -> np.ndarray:
        """Each individual's distance to its nearest neighbour in the objective's metric"""
        return table.min(axis=1)

    @staticmethod
    def run(dim: int, size: int, objective: Objective, cfg: GAConfig) -> OptimizerTrace:
        """
        Genetic search for a size-L constellation in U(dim).

        Each round tries two moves in turn, each kept only if the
        constellation score (the smallest pairwise goodness) strictly
        improves: replacing the replace_count least fit individuals with
        fresh Haar draws, then Cayley-space noise on every individual
        selected with probability mutation_rate.
        """
        if size < 2:
            raise ValidationError(f"size: need at least 2 individuals, got {size}")
        if dim < 1:
            raise ValidationError(f"dim: must be positive, got {dim}")
        if cfg.population_size != size:
            raise ValidationError(
                f"population_size: config says {cfg.population_size} but size is {size}"
            )
        objective.check_dimensions(2 * dim, dim, size)

        rng = np.random.default_rng(cfg.seed)
        watch = Stopwatch(cfg.budget_seconds)
        population = np.stack([random_unitary(dim, rng).mat for _ in range(size)])
        table = GeneticOptimizer.pair_matrix(population, objective)
        score = float(table.min())
        logger.info(f"ga: L={size}, M={dim}, objective {objective.label()}")

        iterations = []
        accepted = rejected = 0
        stall = 0
        for iteration in range(cfg.max_iterations):
            sigma = max(cfg.mutation_sigma * cfg.mutation_sigma_decay ** iteration, cfg.min_sigma)
            improved = False

            worst = np.argsort(GeneticOptimizer.fitness(table), kind="stable")[:cfg.replace_count]
            candidate = population.copy()
            for idx in worst:
                candidate[idx] = random_unitary(dim, rng).mat
            candidate_table = GeneticOptimizer.pair_matrix(candidate, objective)
            candidate_score = float(candidate_table.min())
            if candidate_score > score:
                population, table, score = candidate, candidate_table, candidate_score
                accepted += 1
                improved = True
            else:
                rejected += 1

            chosen = np.flatnonzero(rng.random(size) < cfg.mutation_rate)
            if chosen.size:
                candidate = population.copy()
                for idx in chosen:
                    candidate[idx] = perturb_unitary(population[idx], sigma, rng)
                candidate_table = GeneticOptimizer.pair_matrix(candidate, objective)
                candidate_score = float(candidate_table.min())
                if candidate_score > score:
                    population, table, score = candidate, candidate_table, candidate_score
                    accepted += 1
                    improved = True
                else:
                    rejected += 1

            stall = 0 if improved else stall + 1
            iterations.append((iteration, objective.value_from_score(score)))
            if iteration % 1000 == 0:
                logger.debug(f"round {iteration}: sigma={sigma:.3e} best={format_utils.format_value(iterations[-1][1])}")
            if stall >= cfg.stall_limit or watch.expired():
                break

        final = Constellation.special(population)
        best_value = objective.value_from_score(score)
        logger.info(
            f"ga: best {format_utils.format_value(best_value)} after {len(iterations)} rounds "
            f"in {format_utils.format_duration(watch.elapsed())}"
        )
        return OptimizerTrace(
            method="ga",
            objective=objective,
            iterations=iterations,
            final=final,
            final_report=DiversityCalculator.report(final),
            accepted_count=accepted,
            rejected_count=rejected,
            best_value=best_value,
            seed=cfg.seed,
            elapsed_seconds=watch.elapsed(),
            final_structure=GeneratorStructure.free(final.elements),
        )


def genetic_algorithm(dim: int, size: int, obj: Objective, cfg: GAConfig) -> OptimizerTrace:
    """Genetic search for a free constellation of `size` unitaries in U(dim)"""
    return GeneticOptimizer.run(dim, size, obj, cfg)


# Global optimizer instance
genetic_optimizer = GeneticOptimizer()
