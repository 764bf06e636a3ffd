"""
Simulated annealing over Cayley-parameterized generators
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Optional, Sequence, Union

import numpy as np

from ..config.settings import Config, SAConfig
from ..constellation.constellation import Constellation, ConstellationForm, parameter_count
from ..constellation.structures import GeneratorStructure, expand
from ..diversity.diversity import DiversityCalculator
from ..linalg.matrix_core import CMatrix, perturb_unitary, random_unitary
from ..utils.exceptions import ValidationError
from ..utils.helpers import Stopwatch, format_utils, get_logger, seed_utils
from .objective import (
    Objective,
    ObjectiveEvaluator,
    OptimizerTrace,
    initial_temperature,
    metropolis_accepts,
)

logger = get_logger(__name__)


class SimulatedAnnealingOptimizer:
    """Annealing on generator values of a fixed word structure"""

    @staticmethod
    def run(template: GeneratorStructure, objective: Objective, cfg: SAConfig,
            initial: Optional[Sequence[CMatrix]] = None,
            use_reduction: bool = True, method: str = "sa") -> OptimizerTrace:
        """
        Anneal the generators of a structure.

        Args:
            template: structure fixing kind and exponent bounds; its generator
                values are only used when `initial` is given
            objective: what to improve
            cfg: schedule, seed and stopping rules
            initial: starting generators, random Haar draws when None
            use_reduction: evaluate through reduced targets when the kind supports it

        Returns:
            OptimizerTrace of the best-ever generators
        """
        evaluator = ObjectiveEvaluator(template, objective, use_reduction)
        rng = np.random.default_rng(cfg.seed)
        watch = Stopwatch(cfg.budget_seconds)

        if initial is None:
            current = [random_unitary(g.shape[0], rng).mat for g in template.generators]
        else:
            current = [np.asarray(g, dtype=complex) for g in initial]
        current_score = evaluator.score(current)
        best, best_score = current, current_score

        t0 = cfg.initial_temperature or initial_temperature(current_score)
        logger.info(
            f"{method}: {template.describe()}, L={template.size()}, "
            f"{len(current)} generator(s), objective {objective.label()}, "
            f"reduced targets {'on' if evaluator.use_reduction else 'off'}, T0={t0:.3g}"
        )

        iterations = []
        accepted = rejected = 0
        stall = 0
        stage = -1
        for iteration in range(cfg.max_iterations):
            if iteration // cfg.steps_per_temperature != stage:
                stage = iteration // cfg.steps_per_temperature
                temperature = max(t0 * cfg.cooling_factor ** stage, Config.MIN_TEMPERATURE)
                sigma = max(cfg.initial_sigma * cfg.sigma_decay ** stage, cfg.min_sigma)
                logger.debug(
                    f"stage {stage}: T={temperature:.3e} sigma={sigma:.3e} "
                    f"best={format_utils.format_value(objective.value_from_score(best_score))}"
                )

            candidate = [perturb_unitary(g, sigma, rng) for g in current]
            candidate_score = evaluator.score(candidate)
            if candidate_score >= current_score:
                accept = True
            elif cfg.metropolis:
                accept = metropolis_accepts(current_score - candidate_score, temperature, rng.random())
            else:
                accept = False

            if accept:
                current, current_score = candidate, candidate_score
                accepted += 1
            else:
                rejected += 1

            if current_score > best_score:
                best, best_score = current, current_score
                stall = 0
            else:
                stall += 1
            iterations.append((iteration, objective.value_from_score(best_score)))

            if stall >= cfg.stall_limit:
                logger.debug(f"stall limit reached at iteration {iteration}")
                break
            if watch.expired():
                logger.debug(f"time budget reached at iteration {iteration}")
                break

        structure = template.with_generators(best)
        final = expand(structure)
        best_value = objective.value_from_score(best_score)
        logger.info(
            f"{method}: best {format_utils.format_value(best_value)} after {len(iterations)} iterations "
            f"({accepted} accepted, {rejected} rejected) in {format_utils.format_duration(watch.elapsed())}"
        )
        return OptimizerTrace(
            method=method,
            objective=objective,
            iterations=iterations,
            final=final,
            final_report=DiversityCalculator.report(final),
            accepted_count=accepted,
            rejected_count=rejected,
            best_value=best_value,
            seed=cfg.seed,
            elapsed_seconds=watch.elapsed(),
            final_structure=structure,
        )

    @staticmethod
    def multi_start(template: GeneratorStructure, objective: Objective, cfg: SAConfig,
                    restarts: int, workers: int = 1) -> OptimizerTrace:
        """
        Independent restarts with seeds spawned from cfg.seed.

        The best restart wins; equal values go to the lowest restart index,
        so the outcome does not depend on the number of workers.
        """
        if restarts < 1:
            raise ValidationError(f"restarts: must be positive, got {restarts}")
        configs = [replace(cfg, seed=s) for s in seed_utils.spawn_seeds(cfg.seed, restarts)]
        jobs = [(template, objective, c) for c in configs]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                traces = list(pool.map(_run_restart, jobs))
        else:
            traces = [_run_restart(job) for job in jobs]

        winner = 0
        for k, trace in enumerate(traces):
            if objective.is_better(trace.best_value, traces[winner].best_value):
                winner = k
        best = traces[winner]
        best.notes.append(f"restart {winner} of {restarts} (seed {configs[winner].seed})")
        best.seed = cfg.seed
        return best

    @staticmethod
    def refine_from(seed: Union[Constellation, GeneratorStructure], objective: Objective,
                    cfg: SAConfig, use_reduction: bool = True) -> OptimizerTrace:
        """Annealing started at an existing design; best-ever keeps the seed's value as a floor"""
        if isinstance(seed, GeneratorStructure):
            template = seed
        else:
            if seed.form != ConstellationForm.SPECIAL:
                raise ValidationError("seed: general-form constellations need a GeneratorStructure to refine")
            template = GeneratorStructure.free(seed.elements)
            logger.debug(f"refining a free constellation with {parameter_count(seed)} real parameters")
        return SimulatedAnnealingOptimizer.run(
            template, objective, cfg, initial=template.generators,
            use_reduction=use_reduction, method="refine",
        )


def _run_restart(job) -> OptimizerTrace:
    template, objective, cfg = job
    return SimulatedAnnealingOptimizer.run(template, objective, cfg)


def simulated_annealing(structure: GeneratorStructure, obj: Objective, cfg: SAConfig) -> OptimizerTrace:
    """Simulated annealing from random generators"""
    return SimulatedAnnealingOptimizer.run(structure, obj, cfg)


def refine_from(seed: Union[Constellation, GeneratorStructure], obj: Objective, cfg: SAConfig) -> OptimizerTrace:
    """Simulated annealing from an existing constellation or structure"""
    return SimulatedAnnealingOptimizer.refine_from(seed, obj, cfg)


# Global optimizer instance
annealing_optimizer = SimulatedAnnealingOptimizer()
