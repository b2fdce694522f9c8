"""Small shared numerics: checked adaptive quadrature and deterministic sums."""

from __future__ import annotations

import math
from math import fsum
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import quad


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to meet the requested error targets."""


def quad_checked(f: Callable[[float], float], a: float, b: float,
                 abs_tol: float = 1e-13, rel_tol: float = 1e-10,
                 limit: int = 200) -> float:
    """scipy quad with the error estimate actually enforced.

    The returned estimate must be below abs_tol or rel_tol * |value|;
    otherwise we raise instead of silently returning a sloppy number.
    """
    val, err = quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit)
    if err > abs_tol and err > rel_tol * max(abs(val), 1e-300):
        raise QuadratureError(
            f"quadrature error {err:.3e} on [{a}, {b}] exceeds targets "
            f"(value {val:.6e})")
    return val


def quad_pieces(f: Callable[[float], float], points: Sequence[float],
                abs_tol: float = 1e-13, rel_tol: float = 1e-10,
                limit: int = 200) -> float:
    """Integrate f over consecutive [points[i], points[i+1]] segments.

    Splitting at known kinks keeps the adaptive rule honest; the pieces are
    combined with fsum so the result does not depend on segment count
    rebalancing.
    """
    pts = sorted(points)
    parts = [quad_checked(f, lo, hi, abs_tol=abs_tol, rel_tol=rel_tol,
                          limit=limit)
             for lo, hi in zip(pts[:-1], pts[1:]) if hi > lo]
    return fsum(parts)


def chunked_dot(x: np.ndarray, y: np.ndarray, chunk: int = 1 << 15) -> float:
    """Deterministic dot product: fixed-size chunks, partials fsum-combined.

    The chunking order is fixed by the array order, so the result is
    bit-stable across thread counts (threads may compute chunks, but the
    combination order never changes).
    """
    n = x.shape[0]
    parts = [float(np.dot(x[i:i + chunk], y[i:i + chunk]))
             for i in range(0, n, chunk)]
    return fsum(parts)


def chunked_sum(x: np.ndarray, chunk: int = 1 << 15) -> float:
    n = x.shape[0]
    parts = [float(np.add.reduce(x[i:i + chunk]))
             for i in range(0, n, chunk)]
    return fsum(parts)
