"""Communication-free local hidden variable baseline and the CHSH combination.

The baseline shares ``x`` uniformly on the circle and applies the same
measurement rules as the protocol, but nothing is sent, so ``x`` cannot
depend on ``theta_a``. Its correlation is the saw-tooth
``-(1 - 2|d|/pi)`` (``d`` the setting difference folded into
``[0, pi]``), which never beats ``|S| = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import TAU, Angle, Spin, measure_A, measure_B
from .rng import TrialStream, stream_keys, uniform_at


@dataclass(frozen=True)
class ChshAngles:
    a: Angle
    a_prime: Angle
    b: Angle
    b_prime: Angle

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, Angle(getattr(self, name)))

    def pairs(self) -> tuple[tuple[Angle, Angle], ...]:
        """Setting pairs in the order ``(a,b), (a,b'), (a',b), (a',b')``."""
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )


STANDARD_CHSH = ChshAngles(0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)


def lhv_trial(stream: TrialStream, theta_a: float, theta_b: float) -> tuple[Spin, Spin]:
    x = float(np.multiply(stream.next_uniform(), TAU))
    return measure_A(x, Angle(theta_a)), measure_B(x, Angle(theta_b))


def lhv_batch(
    seed: int, theta_a: float, theta_b: float, trials: int, start: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(start, start + trials, dtype=np.uint64)
    x = np.multiply(uniform_at(stream_keys(seed, idx), 0), TAU)
    return measure_A(x, Angle(theta_a)), measure_B(x, Angle(theta_b))


def lhv_correlation(theta_a: float, theta_b: float) -> float:
    d = float(Angle(theta_a - theta_b))
    if d > math.pi:
        d = TAU - d
    return -(1.0 - 2.0 * d / math.pi)


def chsh_value(e_ab: float, e_ab_prime: float, e_a_prime_b: float, e_a_prime_b_prime: float) -> float:
    """``S = E(a,b) - E(a,b') + E(a',b) + E(a',b')``."""
    for e in (e_ab, e_ab_prime, e_a_prime_b, e_a_prime_b_prime):
        if not -1.0 <= e <= 1.0:
            raise ValueError(f"correlators lie in [-1, 1], got {e!r}")
    return e_ab - e_ab_prime + e_a_prime_b + e_a_prime_b_prime
