"""Quadrature check of the correlation and marginal integrals.

The integrand ``A(x) B(x) P(x)`` only has kinks at the zeros of
``cos(x - theta_a)`` and ``cos(x - theta_b)``. Between consecutive zeros it
is a single branch of ``+-|cos|/4``, so fixed-order Gauss-Legendre on each
piece is accurate to rounding. Nothing here touches the random streams.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

from .angles import TAU, Angle, measure_A, measure_B, target_density

GAUSS_ORDER = 24


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def sign_change_points(*thetas: float) -> list[float]:
    """Zeros of ``cos(x - theta)`` in ``[0, 2*pi)`` for each theta, sorted."""
    pts = {float(Angle(t + s * math.pi / 2)) for t in thetas for s in (1, -1)}
    return sorted(pts)


def integrate_piecewise(
    func: Callable,
    lo: float,
    hi: float,
    breakpoints=(),
    order: int = GAUSS_ORDER,
) -> float:
    """Composite Gauss-Legendre over ``[lo, hi]`` split at ``breakpoints``.

    ``func`` must be vectorized and smooth between breakpoints.
    """
    nodes, weights = _gauss_legendre(order)
    edges = sorted({lo, hi, *(b for b in breakpoints if lo < b < hi)})
    parts = []
    for left, right in zip(edges[:-1], edges[1:]):
        half = 0.5 * (right - left)
        x = left + half * (nodes + 1.0)
        parts.extend(half * weights * func(x))
    return math.fsum(parts)


def quadrature_correlation(theta_a: float, theta_b: float, b_rule: Callable = measure_B) -> float:
    """``integral of A(x, theta_a) B(x, theta_b) P(x, theta_a) dx`` over the circle."""
    theta_a, theta_b = Angle(theta_a), Angle(theta_b)

    def integrand(x):
        return measure_A(x, theta_a) * b_rule(x, theta_b) * target_density(x, theta_a)

    return integrate_piecewise(integrand, 0.0, TAU, sign_change_points(theta_a, theta_b))


def quadrature_marginal(which: str, theta_a: float, theta_b: float) -> float:
    """``E(A)`` or ``E(B)`` under the hidden-variable density for ``theta_a``."""
    theta_a, theta_b = Angle(theta_a), Angle(theta_b)
    if which == "A":
        def outcome(x):
            return measure_A(x, theta_a)
    elif which == "B":
        def outcome(x):
            return measure_B(x, theta_b)
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")

    def integrand(x):
        return outcome(x) * target_density(x, theta_a)

    return integrate_piecewise(integrand, 0.0, TAU, sign_change_points(theta_a, theta_b))


def quadrature_mass(theta_a: float, lo: float = 0.0, hi: float = TAU) -> float:
    """Probability that the hidden variable lands in ``[lo, hi]``."""
    theta_a = Angle(theta_a)
    return integrate_piecewise(
        lambda x: target_density(x, theta_a), lo, hi, sign_change_points(theta_a)
    )
