"""
Complex matrix primitives: norms, singular values, Cayley transform,
Haar sampling and projection onto the unitary group
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import linalg as sla

from ..config.settings import Config
from ..utils.exceptions import (
    CayleySingularError,
    ProjectionFailedError,
    SvdNotConvergedError,
    ValidationError,
)

# Complex matrices are numpy arrays of complex128; stacks carry leading batch axes
CMatrix = np.ndarray


def frobenius_norm(m: CMatrix) -> Union[float, np.ndarray]:
    """Frobenius norm of a matrix, or of each matrix in a stack"""
    norms = np.sqrt(np.sum(np.abs(m) ** 2, axis=(-2, -1)))
    return float(norms) if np.ndim(norms) == 0 else norms


def singular_values(m: CMatrix) -> np.ndarray:
    """
    Singular values by complex one-sided (Hestenes) Jacobi iteration.

    Works on a single matrix or a stack; values are sorted descending along
    the last axis, min(rows, cols) of them per matrix.

    Args:
        m: complex matrix (..., rows, cols)

    Returns:
        Array (..., min(rows, cols)) of nonnegative reals
    """
    a = np.array(m, dtype=complex, copy=True)
    if a.shape[-2] < a.shape[-1]:
        a = np.conj(np.swapaxes(a, -1, -2)).copy()
    n = a.shape[-1]
    tol = Config.JACOBI_TOLERANCE

    for _ in range(Config.JACOBI_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = a[..., :, p]
                aq = a[..., :, q]
                alpha = np.sum(np.abs(ap) ** 2, axis=-1)
                beta = np.sum(np.abs(aq) ** 2, axis=-1)
                gamma = np.sum(np.conj(ap) * aq, axis=-1)
                g = np.abs(gamma)
                scale = np.sqrt(alpha * beta)
                rel = np.where(scale > 0, g / np.where(scale > 0, scale, 1.0), 0.0)
                if rel.size:
                    off = max(off, float(np.max(rel)))
                active = rel > tol
                if not np.any(active):
                    continue

                safe_g = np.where(active, g, 1.0)
                zeta = (beta - alpha) / (2.0 * safe_g)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta ** 2))
                c = np.where(active, 1.0 / np.sqrt(1.0 + t ** 2), 1.0)
                s = np.where(active, c * t, 0.0)
                phase = np.where(active, gamma / safe_g, 1.0)

                bq = aq * np.conj(phase)[..., None]
                new_p = c[..., None] * ap - s[..., None] * bq
                new_q = s[..., None] * ap + c[..., None] * bq
                a[..., :, p] = new_p
                a[..., :, q] = new_q
        if off <= tol:
            break
    else:
        raise SvdNotConvergedError(
            f"Jacobi SVD did not converge in {Config.JACOBI_MAX_SWEEPS} sweeps"
        )

    values = np.sqrt(np.sum(np.abs(a) ** 2, axis=-2))
    return -np.sort(-values, axis=-1)


def determinant_abs(m: CMatrix) -> Union[float, np.ndarray]:
    """|det m| for a square matrix or a stack of them"""
    dets = np.abs(np.linalg.det(m))
    return float(dets) if np.ndim(dets) == 0 else dets


def cayley(x: CMatrix) -> CMatrix:
    """Cayley transform (I + X)^-1 (I - X); an involution mapping skew-Hermitian to unitary"""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValidationError(f"cayley: expected a square matrix, got shape {x.shape}")
    eye = np.eye(x.shape[0], dtype=complex)
    lhs = eye + x
    condition = float(np.linalg.cond(lhs))
    if not np.isfinite(condition) or condition > Config.CAYLEY_CONDITION_LIMIT:
        raise CayleySingularError(condition)
    return np.linalg.solve(lhs, eye - x)


def unitarity_defect(m: CMatrix) -> float:
    """||m* m - I||_F; zero for unitaries and orthonormal frames"""
    m = np.asarray(m, dtype=complex)
    gram = np.conj(m.T) @ m
    return float(np.linalg.norm(gram - np.eye(m.shape[1])))


def nearest_frame(m: CMatrix) -> CMatrix:
    """Polar factor of a full-column-rank T x M matrix (nearest orthonormal frame)"""
    m = np.asarray(m, dtype=complex)
    sv = singular_values(m)
    if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
        raise ProjectionFailedError(
            f"matrix is singular (smallest singular value {sv[-1]:.3e})"
        )
    u, _ = sla.polar(m, side="right")
    return u


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """M x M unitary matrix"""

    mat: CMatrix

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_array(cls, arr: CMatrix, label: str = "matrix") -> "UnitaryMatrix":
        """Validate a square array, re-projecting small unitarity defects"""
        arr = np.array(arr, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"{label}: expected a square matrix, got shape {arr.shape}")
        defect = unitarity_defect(arr)
        if defect > Config.REPROJECTION_LIMIT:
            raise ValidationError(f"{label}: not unitary (defect {defect:.3e})")
        if defect > Config.UNITARITY_TOLERANCE:
            arr = nearest_frame(arr)
        arr.setflags(write=False)
        return cls(arr)


@dataclass(frozen=True, eq=False)
class SkewHermitian:
    """M x M skew-Hermitian matrix (Lie algebra of U(M)), M^2 real parameters"""

    mat: CMatrix

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @staticmethod
    def param_count(dim: int) -> int:
        """Real dimension of the free-parameter vector"""
        return dim * dim

    @classmethod
    def from_params(cls, params: np.ndarray, dim: int) -> "SkewHermitian":
        """Diagonal imaginary parts first, then (re, im) of each strictly-upper entry"""
        params = np.asarray(params, dtype=float)
        if params.shape != (dim * dim,):
            raise ValidationError(f"params: expected {dim * dim} values, got {params.shape}")
        upper = np.zeros((dim, dim), dtype=complex)
        iu = np.triu_indices(dim, k=1)
        upper[iu] = params[dim::2] + 1j * params[dim + 1::2]
        mat = upper - np.conj(upper.T) + np.diag(1j * params[:dim])
        return cls(mat)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, sigma: float = 1.0) -> "SkewHermitian":
        """Independent Gaussian free parameters with standard deviation sigma"""
        return cls.from_params(sigma * rng.standard_normal(dim * dim), dim)


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with phase-fixed R"""
    if dim < 1:
        raise ValidationError(f"dim: must be positive, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = sla.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    q.setflags(write=False)
    return UnitaryMatrix(q)


def project_to_unitary(m: CMatrix) -> UnitaryMatrix:
    """Nearest unitary in Frobenius norm (unitary polar factor)"""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"project_to_unitary: expected a square matrix, got shape {m.shape}")
    u = nearest_frame(m)
    u.setflags(write=False)
    return UnitaryMatrix(u)


def perturb_unitary(g: CMatrix, sigma: float, rng: np.random.Generator) -> CMatrix:
    """
    Random neighbour of a unitary in Cayley coordinates: cayley(cayley(G) + sigma Z).

    G is nudged by a random global phase while cayley(G) is singular; a
    singular perturbed point is retried with fresh noise, halving sigma
    after each run of retries.
    """
    g = np.asarray(g, dtype=complex)
    dim = g.shape[0]
    base = g
    for _ in range(Config.CAYLEY_RETRY_LIMIT):
        try:
            chart = cayley(base)
            break
        except CayleySingularError:
            base = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)) * g
    else:
        raise CayleySingularError(float("inf"))

    for _ in range(64):
        for _ in range(Config.CAYLEY_RETRY_LIMIT):
            z = SkewHermitian.random(dim, rng, sigma).mat
            try:
                candidate = cayley(chart + z)
            except CayleySingularError:
                continue
            if unitarity_defect(candidate) > Config.UNITARITY_TOLERANCE:
                candidate = nearest_frame(candidate)
            return candidate
        sigma /= 2.0
    raise CayleySingularError(float("inf"))
