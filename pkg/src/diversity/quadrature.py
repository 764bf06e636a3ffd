"""
Adaptive Simpson quadrature reusing the previous level's points
"""

from typing import Callable, Optional, Tuple

import numpy as np

from ..config.settings import Config
from ..utils.exceptions import QuadratureError

Integrand = Callable[[np.ndarray], np.ndarray]


def _integrate(fun: Integrand, a: float, b: float, tol: float, depth: int,
               max_depth: int, ys: Optional[np.ndarray]) -> Tuple[float, float, int]:
    x = np.linspace(a, b, 5)
    if ys is None:
        y = fun(x)
        neval = 5
    else:
        y = np.array([ys[0], fun(x[1:2])[0], ys[1], fun(x[3:4])[0], ys[2]])
        neval = 2

    coarse = (y[0] + 4 * y[2] + y[4]) / 6.0 * (b - a)
    fine = (y[0] + 4 * y[1] + 2 * y[2] + 4 * y[3] + y[4]) / 12.0 * (b - a)
    err = abs(fine - coarse)
    if err < tol:
        return (16.0 * fine - coarse) / 15.0, err, neval
    if depth >= max_depth:
        raise QuadratureError(
            f"tolerance {tol:.1e} not met on [{a:.6g}, {b:.6g}] at depth {depth}"
        )

    mid = 0.5 * (a + b)
    left, err_l, neval_l = _integrate(fun, a, mid, tol / 2.0, depth + 1, max_depth, y[0:3])
    right, err_r, neval_r = _integrate(fun, mid, b, tol / 2.0, depth + 1, max_depth, y[2:])
    return left + right, err_l + err_r, neval + neval_l + neval_r


def adaptive_simpson(fun: Integrand, a: float, b: float,
                     tol: float = Config.QUADRATURE_TOLERANCE,
                     max_depth: int = Config.QUADRATURE_MAX_DEPTH) -> Tuple[float, float, int]:
    """
    Integrate fun over [a, b] to absolute tolerance tol.

    Args:
        fun: vectorized integrand
        a, b: interval
        tol: absolute tolerance, halved on each split
        max_depth: subdivision cap; exceeding it raises QuadratureError

    Returns:
        (integral, error estimate, function evaluations)
    """
    if a == b:
        return 0.0, 0.0, 0
    return _integrate(fun, a, b, tol, 0, max_depth, None)
