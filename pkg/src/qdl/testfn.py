"""Even test kernels with compactly supported Fourier transforms.

Convention: phi_hat(u) = int phi(x) exp(-2 pi i x u) dx, so phi(0) equals the
full integral of phi_hat and vice versa.  Both kernels here are nonnegative
with phi_hat supported exactly in [-sigma, sigma]:

 * fejer(sigma): phi_hat is the triangle 1 - |u|/sigma; phi is the squared
   sinc, decaying like x^-2.  phi_hat has corners at u = 0 and |u| = sigma.
 * fejer_squared(sigma): phi_hat is the normalized self-convolution of the
   half-width triangle (a C^2 piecewise cubic); phi is sinc^4 with x^-4
   decay, which is what zero-sum truncation error budgets want.

Derivatives of phi_hat are analytic piecewise formulas; at u = 0 odd orders
are returned as 0 (even function), and orders where a one-sided jump makes
the classical derivative undefined raise ValueError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .numutil import quad_pieces


@dataclass
class TestFunction:
    __test__ = False  # not a pytest suite, despite the name

    name: str
    sigma: float
    phi: Callable           # even, real, vectorized in x
    phi_hat: Callable        # even, supported in [-sigma, sigma], vectorized
    phi_hat_deriv: Callable  # (u, order) -> float, analytic piecewise
    decay_exponent: int      # |phi(x)| <= decay_constant * |x|^-decay_exponent
    decay_constant: float
    hat_knots: tuple         # nonnegative u where phi_hat smoothness degrades


def fejer(sigma: float) -> TestFunction:
    """Fejer kernel scaled so phi_hat(0) = 1 with support sigma."""
    if sigma <= 0:
        raise ValueError("support must be positive")

    def phi(x):
        return sigma * np.sinc(sigma * np.asarray(x, dtype=float)) ** 2

    def phi_hat(u):
        u = np.asarray(u, dtype=float)
        return np.maximum(0.0, 1.0 - np.abs(u) / sigma)

    def deriv(u: float, order: int) -> float:
        au = abs(u)
        if order == 0:
            return float(phi_hat(u))
        if au == 0.0:
            if order % 2 == 1:
                return 0.0
            raise ValueError("triangle kernel has a corner at u = 0")
        if au == sigma:
            raise ValueError("triangle kernel has a corner at |u| = sigma")
        if au > sigma:
            return 0.0
        if order == 1:
            return -math.copysign(1.0, u) / sigma
        return 0.0

    return TestFunction(
        name="fejer", sigma=sigma, phi=phi, phi_hat=phi_hat,
        phi_hat_deriv=deriv, decay_exponent=2,
        decay_constant=1.0 / (math.pi ** 2 * sigma),
        hat_knots=(0.0, sigma),
    )


def fejer_squared(sigma: float) -> TestFunction:
    """Self-convolved triangle on the Fourier side, sinc^4 on the x side."""
    if sigma <= 0:
        raise ValueError("support must be positive")

    def phi(x):
        return 0.75 * sigma * np.sinc(0.5 * sigma
                                      * np.asarray(x, dtype=float)) ** 4

    def phi_hat(u):
        v = 2.0 * np.abs(np.asarray(u, dtype=float)) / sigma
        inner = 1.0 - 1.5 * v ** 2 + 0.75 * v ** 3
        outer = 0.25 * (2.0 - v) ** 3
        out = np.where(v <= 1.0, inner, np.where(v <= 2.0, outer, 0.0))
        return out

    # d^m/dv^m of the two cubic pieces, v = 2|u|/sigma in [0,1] and [1,2]
    def piece_dv(v: float, order: int) -> float:
        if v <= 1.0:
            return {0: 1.0 - 1.5 * v * v + 0.75 * v ** 3,
                    1: -3.0 * v + 2.25 * v * v,
                    2: -3.0 + 4.5 * v,
                    3: 4.5}.get(order, 0.0)
        return {0: 0.25 * (2.0 - v) ** 3,
                1: -0.75 * (2.0 - v) ** 2,
                2: 1.5 * (2.0 - v),
                3: -1.5}.get(order, 0.0)

    def deriv(u: float, order: int) -> float:
        au = abs(u)
        v = 2.0 * au / sigma
        if order == 0:
            return float(phi_hat(u))
        if v > 2.0:
            return 0.0
        scale = (2.0 / sigma) ** order
        if au == 0.0:
            # even function: odd orders vanish in the symmetric sense;
            # even orders >= 4 hit the |u|^3 term and do not exist
            if order % 2 == 1:
                return 0.0
            if order >= 4:
                raise ValueError("derivative of this order fails at u = 0")
            return scale * piece_dv(0.0, order)
        # C^2 everywhere, but the third derivative jumps at the knots
        if order >= 3 and v in (1.0, 2.0):
            raise ValueError("third derivative jumps at the spline knots")
        val = scale * piece_dv(v, order)
        if order % 2 == 1:
            val *= math.copysign(1.0, u)
        return val

    return TestFunction(
        name="fejer_squared", sigma=sigma, phi=phi, phi_hat=phi_hat,
        phi_hat_deriv=deriv, decay_exponent=4,
        decay_constant=12.0 / (math.pi ** 4 * sigma ** 3),
        hat_knots=(0.0, 0.5 * sigma, sigma),
    )


def hat_breakpoints(phi: TestFunction) -> list:
    """Symmetric list of phi_hat kink locations for piecewise quadrature."""
    ks = sorted(set(phi.hat_knots) | {0.0, phi.sigma})
    return [-k for k in reversed(ks) if k > 0] + list(ks)


def phi_at_imaginary(phi: TestFunction, L: float) -> float:
    """phi evaluated at x = i L / (4 pi), via int phi_hat(u) e^{L u / 2} du.

    This is the analytic continuation picking up the pole contribution of
    the degenerate family member; the integral form is exact because
    phi_hat is compactly supported.
    """
    f = phi.phi_hat

    def g(u):
        return float(f(u)) * math.exp(0.5 * L * u)

    return quad_pieces(g, hat_breakpoints(phi), abs_tol=1e-12,
                       rel_tol=1e-11)


def taylor_at(phi: TestFunction, u0: float, K: int) -> tuple:
    """(phi_hat(u0), phi_hat'(u0), ..., phi_hat^{(K)}(u0)); raises where a
    requested order does not classically exist."""
    if K < 0:
        raise ValueError("order must be nonnegative")
    return tuple(phi.phi_hat_deriv(u0, k) for k in range(K + 1))
