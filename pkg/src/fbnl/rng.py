"""Shared randomness for the two parties.

Each trial owns an independent SplitMix64 stream. The stream key for trial
``i`` under master seed ``s`` is the ``i``-th SplitMix64 output of a
generator whose state starts at ``mix64(s)``:

    key(s, i) = mix64(mix64(s) + GOLDEN * (i + 1))        (mod 2**64)

and draw ``n`` (0-based) of that stream is

    z(s, i, n) = mix64(key(s, i) + GOLDEN * (n + 1))      (mod 2**64)
    u(s, i, n) = (z >> 11) * 2**-53                        in [0, 1)

``mix64`` is the SplitMix64 output finalizer, a bijection on 64-bit words,
so distinct trial indices under one seed always get distinct keys. Because
every draw is addressable by ``(seed, trial, n)`` trials can be computed in
any order, in parallel, or in bulk with numpy, and Bob can replay Alice's
stream exactly.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 2.0**-53

_U_GOLDEN = np.uint64(GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U1 = np.uint64(1)
_U11 = np.uint64(11)
_U27 = np.uint64(27)
_U30 = np.uint64(30)
_U31 = np.uint64(31)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64`; ``z`` must be a uint64 array (wraps mod 2**64)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U30)) * _U_M1
        z = (z ^ (z >> _U27)) * _U_M2
    return z ^ (z >> _U31)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"master seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream_key(seed: int, trial_index: int) -> int:
    seed = _check_seed(seed)
    if trial_index < 0:
        raise ValueError(f"trial_index must be nonnegative, got {trial_index}")
    return mix64(mix64(seed) + GOLDEN * (trial_index + 1))


class TrialStream:
    """Replayable uniform stream for one trial.

    ``draw_count`` is the number of values consumed so far; the next value
    returned is draw number ``draw_count``.
    """

    __slots__ = ("seed", "trial_index", "key", "draw_count")

    def __init__(self, seed: int, trial_index: int):
        self.seed = _check_seed(seed)
        self.trial_index = int(trial_index)
        self.key = stream_key(self.seed, self.trial_index)
        self.draw_count = 0

    def next_uint64(self) -> int:
        self.draw_count += 1
        return mix64(self.key + GOLDEN * self.draw_count)

    def next_uniform(self) -> float:
        return (self.next_uint64() >> 11) * _TO_UNIT

    def __repr__(self) -> str:
        return (
            f"TrialStream(seed={self.seed}, trial_index={self.trial_index}, "
            f"draw_count={self.draw_count})"
        )


def derive_trial_stream(seed: int, trial_index: int) -> TrialStream:
    return TrialStream(seed, trial_index)


def next_uniform(stream: TrialStream) -> float:
    return stream.next_uniform()


def stream_keys(seed: int, trial_indices) -> np.ndarray:
    """Keys of many trial streams at once, as a uint64 array."""
    base = np.uint64(mix64(_check_seed(seed)))
    idx = np.atleast_1d(np.asarray(trial_indices, dtype=np.uint64))
    with np.errstate(over="ignore"):
        return mix64_array(base + _U_GOLDEN * (idx + _U1))


def uint64_at(keys: np.ndarray, draw_index) -> np.ndarray:
    """Raw 64-bit draw number ``draw_index`` (scalar or per-key array) of each stream."""
    n = np.asarray(draw_index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_array(keys + _U_GOLDEN * (n + _U1))


def uniform_at(keys: np.ndarray, draw_index) -> np.ndarray:
    """Uniform draw number ``draw_index`` of each stream; matches :meth:`TrialStream.next_uniform`."""
    return (uint64_at(keys, draw_index) >> _U11).astype(np.float64) * _TO_UNIT
