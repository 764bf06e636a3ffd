"""
Optimization objectives, their evaluation on generator structures, and run traces
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config.settings import Config
from ..constellation.constellation import Constellation, ConstellationForm
from ..constellation.structures import (
    GeneratorStructure,
    TargetKind,
    element_matrices,
    reduced_targets,
)
from ..diversity.diversity import ChannelConfig, DiversityReport, PairMetrics
from ..linalg.matrix_core import CMatrix
from ..utils.exceptions import ValidationError
from ..utils.helpers import validation_utils


class ObjectiveKind(str, Enum):
    """What an optimizer improves"""
    MAX_PRODUCT = "product"
    MAX_SUM = "sum"
    MIN_CHERNOFF = "chernoff"
    MIN_EXACT = "exact"
    MIN_CHERNOFF_INTERVAL = "chernoff-interval"


@dataclass(frozen=True)
class Objective:
    """
    Optimization objective.

    Every objective is handled internally as a score to maximize: the
    minimum over pairs of a per-pair goodness. For the diversity-function
    objectives the goodness is minus the pairwise error bound, so the
    score is minus the worst pair's value.
    """

    kind: ObjectiveKind
    channel: Optional[ChannelConfig] = None
    rho_grid: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind in (ObjectiveKind.MIN_CHERNOFF, ObjectiveKind.MIN_EXACT,
                         ObjectiveKind.MIN_CHERNOFF_INTERVAL) and self.channel is None:
            raise ValidationError(f"objective: {self.kind.value} needs a channel configuration")
        if self.kind == ObjectiveKind.MIN_CHERNOFF_INTERVAL:
            validation_utils.require_increasing(list(self.rho_grid), "rho_grid")
            if min(self.rho_grid) <= 0:
                raise ValidationError("rho_grid: SNR values must be positive")

    @classmethod
    def max_product(cls) -> "Objective":
        return cls(ObjectiveKind.MAX_PRODUCT)

    @classmethod
    def max_sum(cls) -> "Objective":
        return cls(ObjectiveKind.MAX_SUM)

    @classmethod
    def min_chernoff_at(cls, channel: ChannelConfig) -> "Objective":
        return cls(ObjectiveKind.MIN_CHERNOFF, channel)

    @classmethod
    def min_exact_at(cls, channel: ChannelConfig) -> "Objective":
        return cls(ObjectiveKind.MIN_EXACT, channel)

    @classmethod
    def min_chernoff_over(cls, channel: ChannelConfig, rho_grid: Sequence[float]) -> "Objective":
        """Worst pair's geometric-mean Chernoff value across a linear SNR grid"""
        return cls(ObjectiveKind.MIN_CHERNOFF_INTERVAL, channel, tuple(rho_grid))

    @property
    def maximizes(self) -> bool:
        return self.kind in (ObjectiveKind.MAX_PRODUCT, ObjectiveKind.MAX_SUM)

    def label(self) -> str:
        if self.channel is None:
            return self.kind.value
        return f"{self.kind.value}(rho={self.channel.rho:.6g}, N={self.channel.N})"

    def check_dimensions(self, T: int, M: int, L: int):
        """Reject objectives that cannot be evaluated for this constellation shape"""
        if L < 2:
            raise ValidationError(f"structure: expansion has L={L}, need at least 2")
        if self.channel is not None and (self.channel.T, self.channel.M) != (T, M):
            raise ValidationError(
                f"objective: channel T={self.channel.T}, M={self.channel.M} "
                f"does not match constellation T={T}, M={M}"
            )
        if self.kind == ObjectiveKind.MIN_EXACT and L > Config.EXACT_OBJECTIVE_MAX_SIZE:
            raise ValidationError(
                f"objective: exact diversity is limited to L <= {Config.EXACT_OBJECTIVE_MAX_SIZE}, got {L}"
            )

    def pair_goodness(self, kind: TargetKind, mats: CMatrix, M: int) -> np.ndarray:
        """Per-pair goodness (higher is better)"""
        if self.kind == ObjectiveKind.MAX_PRODUCT:
            return PairMetrics.product_values(kind, mats, M)
        if self.kind == ObjectiveKind.MAX_SUM:
            return PairMetrics.sum_values(kind, mats, M)
        a = PairMetrics.attenuations(kind, mats, M)
        if self.kind == ObjectiveKind.MIN_CHERNOFF:
            return -PairMetrics.chernoff_values(a, self.channel)
        if self.kind == ObjectiveKind.MIN_EXACT:
            return -np.array([PairMetrics.exact_value(row, self.channel) for row in a])
        logs = [np.log(PairMetrics.chernoff_values(a, self.channel.with_rho(rho))) for rho in self.rho_grid]
        return -np.exp(np.mean(logs, axis=0))

    def score(self, kind: TargetKind, mats: CMatrix, M: int) -> float:
        """Minimum pair goodness"""
        if self.kind == ObjectiveKind.MIN_EXACT:
            # only pairs whose Chernoff bound exceeds the running worst need the integral
            a = PairMetrics.attenuations(kind, mats, M)
            bounds = PairMetrics.chernoff_values(a, self.channel)
            worst = 0.0
            for k in np.argsort(-bounds, kind="stable"):
                if bounds[k] <= worst:
                    break
                worst = max(worst, PairMetrics.exact_value(a[k], self.channel))
            return -worst
        return float(np.min(self.pair_goodness(kind, mats, M)))

    def value_from_score(self, score: float) -> float:
        """Objective value in natural units (diversity, or error probability)"""
        return score if self.maximizes else -score

    def is_better(self, value: float, other: float) -> bool:
        return value > other if self.maximizes else value < other


def all_pair_targets(elements: CMatrix, form: ConstellationForm) -> Tuple[TargetKind, CMatrix]:
    """Targets of every unordered pair in lexicographic order"""
    ii, jj = np.triu_indices(elements.shape[0], k=1)
    if form == ConstellationForm.SPECIAL:
        return TargetKind.DIFFERENCE, elements[ii] - elements[jj]
    return TargetKind.GRAM, np.conj(np.swapaxes(elements[ii], -1, -2)) @ elements[jj]


class ObjectiveEvaluator:
    """Scores generator values of a fixed structure, through reduced targets when available"""

    def __init__(self, template: GeneratorStructure, objective: Objective, use_reduction: bool = True):
        self.template = template
        self.objective = objective
        self.use_reduction = use_reduction and template.supports_reduction()
        objective.check_dimensions(template.T, template.M, template.size())

    def targets(self, generators: Sequence[CMatrix]) -> Tuple[TargetKind, CMatrix]:
        structure = self.template.with_generators(generators)
        if self.use_reduction:
            target_set = reduced_targets(structure)
            return target_set.kind, target_set.matrices
        return all_pair_targets(element_matrices(structure), structure.form)

    def score(self, generators: Sequence[CMatrix]) -> float:
        kind, mats = self.targets(generators)
        return self.objective.score(kind, mats, self.template.M)


@dataclass
class OptimizerTrace:
    """Best-so-far history and outcome of one optimizer run"""

    method: str
    objective: Objective
    iterations: List[Tuple[int, float]]
    final: Constellation
    final_report: DiversityReport
    accepted_count: int
    rejected_count: int
    best_value: float
    seed: int
    elapsed_seconds: float
    final_structure: Optional[GeneratorStructure] = None
    notes: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """Trace rows (iteration, best_value)"""
        return pd.DataFrame(self.iterations, columns=["iteration", "best_value"])

    def is_monotone(self) -> bool:
        """Best value never gets worse along the trace"""
        values = [v for _, v in self.iterations]
        if self.objective.maximizes:
            return all(b >= a for a, b in zip(values, values[1:]))
        return all(b <= a for a, b in zip(values, values[1:]))


def initial_temperature(score: float) -> float:
    """Default starting temperature: a tenth of the initial objective magnitude"""
    magnitude = abs(score)
    return 0.1 * magnitude if magnitude > 0 else 1e-3


def metropolis_accepts(delta: float, temperature: float, draw: float) -> bool:
    """Accept a worsening of size delta > 0 with probability exp(-delta / T); a frozen chain accepts none"""
    if temperature <= 0.0:
        return False
    return draw < math.exp(-delta / temperature)
