"""
Diversity metrics: diversity product, diversity sum, Chernoff and exact diversity functions
"""

import math
from dataclasses import dataclass, replace
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from ..config.settings import Config
from ..constellation.constellation import Constellation, ConstellationForm
from ..constellation.structures import TargetKind
from ..linalg.matrix_core import CMatrix, frobenius_norm, singular_values
from ..utils.exceptions import ValidationError
from ..utils.helpers import snr_utils, validation_utils
from .quadrature import adaptive_simpson

Pair = Tuple[int, int]


@dataclass(frozen=True)
class ChannelConfig:
    """Rayleigh block-fading channel: block length T, M transmit, N receive antennas, linear SNR rho"""
    T: int
    M: int
    N: int
    rho: float

    def __post_init__(self):
        if not (self.T >= self.M >= 1):
            raise ValidationError(f"T, M: need T >= M >= 1, got T={self.T}, M={self.M}")
        if self.N < 1:
            raise ValidationError(f"N: must be positive, got {self.N}")
        if not self.rho > 0:
            raise ValidationError(f"rho: must be positive, got {self.rho}")

    @property
    def rho_tilde(self) -> float:
        """(rho T/M)^2 / (4 (1 + rho T/M))"""
        x = self.rho * self.T / self.M
        return x * x / (4.0 * (1.0 + x))

    def with_rho(self, rho: float) -> "ChannelConfig":
        return replace(self, rho=rho)

    @classmethod
    def for_constellation(cls, c: Constellation, N: int, rho: float) -> "ChannelConfig":
        """Channel matching the constellation's T and M"""
        return cls(T=c.T, M=c.M, N=N, rho=rho)

    @classmethod
    def sweep(cls, T: int, M: int, N: int, rho_db: Sequence[float]) -> List["ChannelConfig"]:
        """One configuration per dB grid point"""
        validation_utils.require_increasing(list(rho_db), "rho_db")
        return [cls(T=T, M=M, N=N, rho=snr_utils.db_to_linear(x)) for x in rho_db]


@dataclass(frozen=True)
class PairExtremum:
    """Extremal pairwise value and the lexicographically smallest pair attaining it"""
    value: float
    pair: Pair


@dataclass(frozen=True)
class DiversityReport:
    """Diversity product and sum with their minimizing pairs"""
    product: float
    sum: float
    argmin_product: Pair
    argmin_sum: Pair
    pairwise_count: int


class PairMetrics:
    """Per-pair metric kernels on stacks of difference or Gram targets"""

    @staticmethod
    def attenuations(kind: TargetKind, mats: CMatrix, M: int) -> np.ndarray:
        """1 - delta_m^2 per pair (K, M); delta_m are singular values of Phi* Phi'"""
        sv = singular_values(mats)
        if kind == TargetKind.DIFFERENCE:
            values = sv ** 2 / 4.0
        else:
            values = 1.0 - sv ** 2
        return validation_utils.clamp_unit(values, "1 - delta^2")

    @staticmethod
    def product_values(kind: TargetKind, mats: CMatrix, M: int) -> np.ndarray:
        """Pairwise diversity product: 0.5 |det(Psi - Psi')|^(1/M) or prod(1 - delta^2)^(1/2M)"""
        if kind == TargetKind.DIFFERENCE:
            values = 0.5 * np.abs(np.linalg.det(mats)) ** (1.0 / M)
        else:
            a = PairMetrics.attenuations(kind, mats, M)
            values = np.prod(a, axis=-1) ** (1.0 / (2 * M))
        return validation_utils.clamp_unit(values, "diversity product")

    @staticmethod
    def sum_values(kind: TargetKind, mats: CMatrix, M: int) -> np.ndarray:
        """Pairwise diversity sum: ||Psi - Psi'||_F / (2 sqrt M) or sqrt(1 - ||Phi* Phi'||_F^2 / M)"""
        norms = np.atleast_1d(frobenius_norm(mats))
        if kind == TargetKind.DIFFERENCE:
            values = norms / (2.0 * math.sqrt(M))
        else:
            radicand = validation_utils.clamp_unit(1.0 - norms ** 2 / M, "diversity sum radicand")
            values = np.sqrt(radicand)
        return validation_utils.clamp_unit(values, "diversity sum")

    @staticmethod
    def chernoff_values(attenuations: np.ndarray, cfg: ChannelConfig) -> np.ndarray:
        """0.5 prod_m (1 + rho~ (1 - delta_m^2))^(-N) per pair"""
        return 0.5 * np.prod((1.0 + cfg.rho_tilde * attenuations) ** (-float(cfg.N)), axis=-1)

    @staticmethod
    def exact_value(attenuation: np.ndarray, cfg: ChannelConfig) -> float:
        """
        Pairwise error probability as a finite integral.

        With w = tan(theta)/2 the weight 4/(4w^2 + 1) dw becomes 2 dtheta and
        P = (1/2pi) int_{-pi/2}^{pi/2} prod_m [cos^2 / (cos^2 + rho~ a_m)]^N dtheta.
        """
        scaled = cfg.rho_tilde * np.asarray(attenuation, dtype=float)
        n = float(cfg.N)

        def integrand(theta: np.ndarray) -> np.ndarray:
            c2 = np.cos(theta) ** 2
            denom = c2[:, None] + scaled[None, :]
            ratio = np.where(denom > 0, c2[:, None] / np.where(denom > 0, denom, 1.0), 1.0)
            return np.prod(ratio ** n, axis=-1)

        integral, _, _ = adaptive_simpson(integrand, -math.pi / 2, math.pi / 2)
        return min(max(integral / (2.0 * math.pi), 0.0), 0.5)


class DiversityCalculator:
    """Constellation-level diversity evaluation over all unordered pairs"""

    @staticmethod
    def _require_pairs(c: Constellation):
        if c.L < 2:
            raise ValidationError(f"elements: diversity needs at least 2 elements, got {c.L}")

    @staticmethod
    def target_kind(c: Constellation) -> TargetKind:
        return TargetKind.DIFFERENCE if c.form == ConstellationForm.SPECIAL else TargetKind.GRAM

    @staticmethod
    def pair_chunks(c: Constellation) -> Iterator[Tuple[np.ndarray, np.ndarray, CMatrix]]:
        """Unordered pairs (i < j) in lexicographic order, chunked, with their targets"""
        L = c.L
        elements = c.elements
        special = c.form == ConstellationForm.SPECIAL
        adjoint = None if special else np.conj(np.swapaxes(elements, -1, -2))
        rows_i: List[np.ndarray] = []
        rows_j: List[np.ndarray] = []
        pending = 0
        for i in range(L - 1):
            rows_i.append(np.full(L - i - 1, i))
            rows_j.append(np.arange(i + 1, L))
            pending += L - i - 1
            if pending >= Config.PAIR_CHUNK_SIZE or i == L - 2:
                ii = np.concatenate(rows_i)
                jj = np.concatenate(rows_j)
                if special:
                    mats = elements[ii] - elements[jj]
                else:
                    mats = adjoint[ii] @ elements[jj]
                yield ii, jj, mats
                rows_i, rows_j, pending = [], [], 0

    @staticmethod
    def _argmin(c: Constellation, metric) -> PairExtremum:
        DiversityCalculator._require_pairs(c)
        kind = DiversityCalculator.target_kind(c)
        best = PairExtremum(math.inf, (0, 1))
        for ii, jj, mats in DiversityCalculator.pair_chunks(c):
            values = metric(kind, mats, c.M)
            k = int(np.argmin(values))
            if values[k] < best.value:
                best = PairExtremum(float(values[k]), (int(ii[k]), int(jj[k])))
        return best

    @staticmethod
    def diversity_product(c: Constellation) -> PairExtremum:
        """Minimum pairwise diversity product and its pair"""
        return DiversityCalculator._argmin(c, PairMetrics.product_values)

    @staticmethod
    def diversity_sum(c: Constellation) -> PairExtremum:
        """Minimum pairwise diversity sum and its pair"""
        return DiversityCalculator._argmin(c, PairMetrics.sum_values)

    @staticmethod
    def report(c: Constellation) -> DiversityReport:
        """Diversity product and sum in one report"""
        product = DiversityCalculator.diversity_product(c)
        total = DiversityCalculator.diversity_sum(c)
        return DiversityReport(
            product=product.value,
            sum=total.value,
            argmin_product=product.pair,
            argmin_sum=total.pair,
            pairwise_count=c.L * (c.L - 1) // 2,
        )

    @staticmethod
    def _check_channel(c: Constellation, cfg: ChannelConfig):
        if (cfg.T, cfg.M) != (c.T, c.M):
            raise ValidationError(
                f"cfg: channel T={cfg.T}, M={cfg.M} does not match constellation T={c.T}, M={c.M}"
            )

    @staticmethod
    def chernoff_diversity(c: Constellation, cfg: ChannelConfig) -> float:
        """Maximum pairwise Chernoff bound D(V, rho)"""
        DiversityCalculator._require_pairs(c)
        DiversityCalculator._check_channel(c, cfg)
        kind = DiversityCalculator.target_kind(c)
        worst = 0.0
        for _, _, mats in DiversityCalculator.pair_chunks(c):
            a = PairMetrics.attenuations(kind, mats, c.M)
            worst = max(worst, float(np.max(PairMetrics.chernoff_values(a, cfg))))
        return worst

    @staticmethod
    def exact_diversity(c: Constellation, cfg: ChannelConfig) -> float:
        """
        Maximum pairwise error probability D_e(V, rho).

        Pairs are visited in decreasing Chernoff order; since the Chernoff
        value bounds the exact one, the scan stops once it falls below the
        best exact value found.
        """
        DiversityCalculator._require_pairs(c)
        DiversityCalculator._check_channel(c, cfg)
        kind = DiversityCalculator.target_kind(c)
        best = 0.0
        for _, _, mats in DiversityCalculator.pair_chunks(c):
            a = PairMetrics.attenuations(kind, mats, c.M)
            bounds = PairMetrics.chernoff_values(a, cfg)
            for k in np.argsort(-bounds, kind="stable"):
                if bounds[k] <= best:
                    break
                best = max(best, PairMetrics.exact_value(a[k], cfg))
        return best

    @staticmethod
    def diversity_function_curve(c: Constellation, configs: Sequence[ChannelConfig],
                                 exact: bool = False) -> List[Tuple[float, float]]:
        """(rho, D(V, rho)) per configuration, exact or Chernoff"""
        validation_utils.require_increasing([cfg.rho for cfg in configs], "rho")
        evaluate = DiversityCalculator.exact_diversity if exact else DiversityCalculator.chernoff_diversity
        return [(cfg.rho, evaluate(c, cfg)) for cfg in configs]


def diversity_product(c: Constellation) -> PairExtremum:
    """Diversity product of a constellation"""
    return DiversityCalculator.diversity_product(c)


def diversity_sum(c: Constellation) -> PairExtremum:
    """Diversity sum of a constellation"""
    return DiversityCalculator.diversity_sum(c)


def chernoff_diversity(c: Constellation, cfg: ChannelConfig) -> float:
    """Chernoff diversity function of a constellation"""
    return DiversityCalculator.chernoff_diversity(c, cfg)


def exact_diversity(c: Constellation, cfg: ChannelConfig) -> float:
    """Exact diversity function of a constellation"""
    return DiversityCalculator.exact_diversity(c, cfg)


# Global calculator instance
diversity_calculator = DiversityCalculator()
