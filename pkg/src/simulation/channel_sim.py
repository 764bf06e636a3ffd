"""
Monte-Carlo simulation of the non-coherent Rayleigh block-fading channel with ML decoding
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from ..config.settings import Config, SimConfig
from ..constellation.constellation import Constellation
from ..diversity.diversity import ChannelConfig
from ..linalg.matrix_core import CMatrix
from ..utils.exceptions import ValidationError
from ..utils.helpers import get_logger, seed_utils, snr_utils, stats_utils

logger = get_logger(__name__)


@dataclass(frozen=True)
class SimulationPoint:
    """Block error estimate at one SNR"""
    rho_db: float
    trials: int
    errors: int
    bler: float
    wilson_lo: float
    wilson_hi: float


@dataclass
class SimulationResult:
    """Block error rate curve of one constellation"""
    label: str
    receive_antennas: int
    seed: int
    points: List[SimulationPoint] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        """Rows (rho_db, trials, errors, bler, wilson_lo, wilson_hi)"""
        columns = ["rho_db", "trials", "errors", "bler", "wilson_lo", "wilson_hi"]
        return pd.DataFrame([[getattr(p, c) for c in columns] for p in self.points], columns=columns)


class ChannelSimulator:
    """R = sqrt(rho T/M) Phi H + W with CN(0, 1) entries in H and W, decoded by argmax ||R* Phi_l||_F"""

    @staticmethod
    def complex_gaussian(rng: np.random.Generator, shape: Tuple[int, ...]) -> CMatrix:
        """Independent CN(0, 1) entries"""
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)

    @staticmethod
    def decode(frames: CMatrix, received: CMatrix) -> np.ndarray:
        """ML decisions for a batch of received blocks (B, T, N); ties go to the lowest index"""
        projections = np.einsum("ltm,btn->blmn", np.conj(frames), received)
        metrics = np.sum(np.abs(projections) ** 2, axis=(-2, -1))
        return np.argmax(metrics, axis=1)

    @staticmethod
    def run_block(frames: CMatrix, cfg: ChannelConfig, rng: np.random.Generator,
                  trials: int, noise: bool = True) -> Tuple[np.ndarray, np.ndarray]:
        """Send `trials` uniformly drawn codewords; returns (sent, decoded)"""
        L, T, M = frames.shape
        sent = rng.integers(0, L, size=trials)
        h = ChannelSimulator.complex_gaussian(rng, (trials, M, cfg.N))
        w = ChannelSimulator.complex_gaussian(rng, (trials, T, cfg.N))
        if not noise:
            w = np.zeros_like(w)
        received = math.sqrt(cfg.rho * T / M) * (frames[sent] @ h) + w
        return sent, ChannelSimulator.decode(frames, received)

    @staticmethod
    def _frames_for(c: Constellation, cfg: ChannelConfig) -> CMatrix:
        if (cfg.T, cfg.M) != (c.T, c.M):
            raise ValidationError(
                f"cfg: channel T={cfg.T}, M={cfg.M} does not match constellation T={c.T}, M={c.M}"
            )
        return c.frames()

    @staticmethod
    def transmit_decode_trial(c: Constellation, cfg: ChannelConfig, rng: np.random.Generator,
                              noise: bool = True) -> Tuple[int, int]:
        """One transmission: (sent index, decoded index)"""
        frames = ChannelSimulator._frames_for(c, cfg)
        sent, decoded = ChannelSimulator.run_block(frames, cfg, rng, 1, noise)
        return int(sent[0]), int(decoded[0])

    @staticmethod
    def simulate_bler(c: Constellation, sim: SimConfig, label: str = "") -> SimulationResult:
        """
        Block error rate per SNR point.

        Trials run in fixed blocks; block b at SNR index i draws from the
        stream keyed (seed, i, b), so the estimate does not depend on how
        blocks are scheduled. With max_errors set, counting stops at the
        trial producing the max_errors-th error.
        """
        result = SimulationResult(label=label, receive_antennas=sim.receive_antennas, seed=sim.seed)
        block_size = Config.SIM_BLOCK_SIZE
        for i, rho_db in enumerate(sim.rho_db):
            cfg = ChannelConfig.for_constellation(c, sim.receive_antennas, snr_utils.db_to_linear(rho_db))
            frames = ChannelSimulator._frames_for(c, cfg)
            trials = errors = 0
            block = 0
            while trials < sim.trials_per_point:
                n = min(block_size, sim.trials_per_point - trials)
                rng = seed_utils.substream(sim.seed, i, block)
                sent, decoded = ChannelSimulator.run_block(frames, cfg, rng, n)
                wrong = sent != decoded
                if sim.max_errors is not None and errors + int(wrong.sum()) >= sim.max_errors:
                    cut = int(np.flatnonzero(np.cumsum(wrong) == sim.max_errors - errors)[0]) + 1
                    trials += cut
                    errors = sim.max_errors
                    break
                trials += n
                errors += int(wrong.sum())
                block += 1

            bler = errors / trials
            lo, hi = stats_utils.wilson_interval(errors, trials)
            result.points.append(SimulationPoint(
                rho_db=float(rho_db), trials=trials, errors=errors, bler=bler,
                wilson_lo=min(lo, bler), wilson_hi=max(hi, bler),
            ))
            logger.info(f"{label or 'constellation'} at {rho_db:g} dB: {errors}/{trials} block errors")
        return result

    @staticmethod
    def pairwise_error_estimate(phi_l: CMatrix, phi_l2: CMatrix, cfg: ChannelConfig,
                                trials: int, rng: np.random.Generator) -> float:
        """Monte-Carlo two-codeword ML error probability; the sent codeword is drawn uniformly"""
        frames = np.stack([np.asarray(phi_l, dtype=complex), np.asarray(phi_l2, dtype=complex)])
        if frames.shape[1:] != (cfg.T, cfg.M):
            raise ValidationError(f"phi: expected {cfg.T}x{cfg.M} frames, got {frames.shape[1]}x{frames.shape[2]}")
        if trials < 1:
            raise ValidationError(f"trials: must be positive, got {trials}")
        errors = 0
        done = 0
        while done < trials:
            n = min(Config.SIM_BLOCK_SIZE * 20, trials - done)
            sent, decoded = ChannelSimulator.run_block(frames, cfg, rng, n)
            errors += int(np.count_nonzero(sent != decoded))
            done += n
        return errors / trials


def transmit_decode_trial(c: Constellation, cfg: ChannelConfig, rng: np.random.Generator) -> Tuple[int, int]:
    """One transmit/decode trial"""
    return ChannelSimulator.transmit_decode_trial(c, cfg, rng)


def simulate_bler(c: Constellation, sim: SimConfig, label: Optional[str] = None) -> SimulationResult:
    """Block error rate curve"""
    return ChannelSimulator.simulate_bler(c, sim, label or "")


def pairwise_error_estimate(phi_l: CMatrix, phi_l2: CMatrix, cfg: ChannelConfig,
                            trials: int, rng: np.random.Generator) -> float:
    """Monte-Carlo pairwise error probability"""
    return ChannelSimulator.pairwise_error_estimate(phi_l, phi_l2, cfg, trials, rng)


# Global simulator instance
channel_simulator = ChannelSimulator()
