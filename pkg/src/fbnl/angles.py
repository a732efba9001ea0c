"""Angles, singlet measurement rules and the hidden-variable density.

Every function here accepts either Python scalars or numpy arrays so the
same code path serves the per-trial protocol and the vectorized batch
engine. Scalar inputs give scalar outputs.
"""

from __future__ import annotations

import math
from enum import IntEnum

import numpy as np

TAU = 2.0 * math.pi


class Spin(IntEnum):
    DOWN = -1
    UP = 1


class Angle(float):
    """A float in radians, canonicalized to ``[0, 2*pi)`` on construction."""

    def __new__(cls, value: float) -> "Angle":
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"angle must be finite, got {value!r}")
        r = math.fmod(value, TAU)
        if r < 0.0:
            r += TAU
        # -tiny + TAU can round up to TAU itself
        if r >= TAU:
            r = 0.0
        return super().__new__(cls, r)

    def __repr__(self) -> str:
        return f"Angle({float(self)!r})"


def normalize_angle(x: float) -> Angle:
    return Angle(x)


def target_density(x, theta_a):
    """Density ``|cos(x - theta_a)| / 4`` of the shared hidden variable.

    Integrates to one over any period and is bounded by 1/4.
    """
    return 0.25 * np.abs(np.cos(np.subtract(x, theta_a)))


def _sign(c):
    # sign(0) := +1 so Alice and Bob agree bit-for-bit on the tie
    scalar = np.ndim(c) == 0
    s = np.where(c >= 0.0, 1, -1).astype(np.int8)
    if scalar:
        return Spin(int(s))
    return s


def measure_A(x, theta_a):
    """Alice's outcome: ``sign(cos(x - theta_a))``."""
    return _sign(np.cos(np.subtract(x, theta_a)))


def measure_B(x, theta_b):
    """Bob's outcome: ``-sign(cos(x - theta_b))``."""
    s = _sign(np.cos(np.subtract(x, theta_b)))
    if isinstance(s, Spin):
        return Spin(-s)
    return -s
