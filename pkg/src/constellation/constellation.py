"""
Constellation types: special form (unitary Psi_k), general form (T x M frames)
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..config.settings import Config
from ..linalg.matrix_core import CMatrix, nearest_frame
from ..utils.exceptions import ValidationError


class ConstellationForm(str, Enum):
    """Representation of the constellation elements"""
    SPECIAL = "special"
    GENERAL = "general"


@dataclass(frozen=True, eq=False)
class Constellation:
    """
    A unitary space-time constellation.

    Special form stores L unitary M x M matrices Psi_k and has T = 2M; the
    transmitted frames are (sqrt(2)/2)(I; Psi_k). General form stores L
    T x M orthonormal frames Phi_k directly.
    """

    form: ConstellationForm
    T: int
    M: int
    elements: CMatrix

    def __post_init__(self):
        elements = np.array(self.elements, dtype=complex)
        if elements.ndim != 3 or elements.shape[0] == 0:
            raise ValidationError("elements: empty element list")
        L, rows, cols = elements.shape
        if self.form == ConstellationForm.SPECIAL:
            if rows != cols or cols != self.M:
                raise ValidationError(f"elements: special form needs {self.M}x{self.M} matrices, got {rows}x{cols}")
            if self.T != 2 * self.M:
                raise ValidationError(f"T: special form requires T = 2M = {2 * self.M}, got {self.T}")
        else:
            if rows != self.T or cols != self.M:
                raise ValidationError(f"elements: general form needs {self.T}x{self.M} frames, got {rows}x{cols}")
            if not 1 <= self.M <= self.T:
                raise ValidationError(f"M: need 1 <= M <= T, got M={self.M}, T={self.T}")

        grams = np.conj(np.swapaxes(elements, -1, -2)) @ elements
        defects = np.linalg.norm(grams - np.eye(cols), axis=(-2, -1))
        bad = np.nonzero(defects > Config.REPROJECTION_LIMIT)[0]
        if bad.size:
            idx = int(bad[0])
            raise ValidationError(f"elements[{idx}]: not unitary (defect {defects[idx]:.3e})")
        for idx in np.nonzero(defects > Config.UNITARITY_TOLERANCE)[0]:
            elements[idx] = nearest_frame(elements[idx])

        elements.setflags(write=False)
        object.__setattr__(self, "elements", elements)

    @classmethod
    def special(cls, elements: CMatrix) -> "Constellation":
        """Special-form constellation from a stack of M x M unitaries"""
        elements = np.asarray(elements, dtype=complex)
        if elements.ndim != 3:
            raise ValidationError("elements: expected a stack of matrices")
        m = elements.shape[-1]
        return cls(ConstellationForm.SPECIAL, 2 * m, m, elements)

    @classmethod
    def general(cls, frames: CMatrix) -> "Constellation":
        """General-form constellation from a stack of T x M frames"""
        frames = np.asarray(frames, dtype=complex)
        if frames.ndim != 3:
            raise ValidationError("elements: expected a stack of matrices")
        return cls(ConstellationForm.GENERAL, frames.shape[1], frames.shape[2], frames)

    @property
    def L(self) -> int:
        return self.elements.shape[0]

    def frames(self) -> CMatrix:
        """Transmitted T x M frames; special form is embedded as (sqrt(2)/2)(I; Psi)"""
        if self.form == ConstellationForm.GENERAL:
            return self.elements
        top = np.broadcast_to(np.eye(self.M, dtype=complex), self.elements.shape)
        return np.concatenate([top, self.elements], axis=1) / np.sqrt(2.0)

    def to_general(self) -> "Constellation":
        """Same constellation in general form"""
        if self.form == ConstellationForm.GENERAL:
            return self
        return Constellation.general(self.frames())


@dataclass(frozen=True)
class RateReport:
    """Transmission rate in bits per channel use"""
    L: int
    T: int
    rate: float


def rate(c: Constellation) -> RateReport:
    """log2(L)/T for general form, log2(L)/M for special form (differential use)"""
    channel_uses = c.M if c.form == ConstellationForm.SPECIAL else c.T
    return RateReport(L=c.L, T=c.T, rate=math.log2(c.L) / channel_uses)


def stiefel_dimension(T: int, M: int) -> int:
    """Real dimension 2TM - M^2 of the Stiefel manifold of T x M frames"""
    return 2 * T * M - M * M


def parameter_count(c: Constellation) -> int:
    """Free real parameters of the constellation: L*M^2 (special) or L*(2TM - M^2) (general)"""
    if c.form == ConstellationForm.SPECIAL:
        return c.L * c.M * c.M
    return c.L * stiefel_dimension(c.T, c.M)
