"""The finite-bit protocol for one singlet pair.

Alice rejection-samples the hidden variable ``x`` from
``|cos(x - theta_a)| / 4`` using the uniform envelope with ``c = pi/2``,
records ``A = sign(cos(x - theta_a))`` and sends the iteration count ``K``.
Bob knows only the seed, the trial index, his own setting and ``K``. He
replays the stream, takes the candidate of iteration ``K`` as ``x`` and
outputs ``B = -sign(cos(x - theta_b))``. The product then averages to
``-cos(theta_a - theta_b)`` and both marginals vanish.

The message ``K`` is geometric with success probability ``2/pi`` whatever
the settings are, so it reveals nothing about ``theta_a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .angles import Angle, Spin, measure_A, measure_B, target_density
from .rejection import (
    DEFAULT_MAX_ITERATIONS,
    DRAWS_PER_ITERATION,
    rejection_sample,
    rejection_sample_batch,
    uniform_circle_envelope,
)
from .rng import TrialStream, derive_trial_stream, stream_keys, uniform_at

ENVELOPE_C = 2.0 * math.pi / 4.0
ACCEPT_PROBABILITY = 1.0 / ENVELOPE_C

BELL_ENVELOPE = uniform_circle_envelope(ENVELOPE_C)
# shift covariance makes theta_a = 0 representative; max f = 1/4 = c/(2*pi)
BELL_ENVELOPE.validate(partial(target_density, theta_a=0.0), sup_f=0.25)


@dataclass(frozen=True)
class AliceResult:
    outcome: Spin
    message: int
    hidden_x: float = field(repr=False)


@dataclass(frozen=True)
class TrialOutcome:
    a: Spin
    b: Spin
    k: int
    hidden_x: float = field(repr=False)


def alice_run(
    stream: TrialStream,
    theta_a: float,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> AliceResult:
    if stream.draw_count != 0:
        raise ValueError(f"alice_run needs a fresh stream, got {stream!r}")
    theta_a = Angle(theta_a)
    res = rejection_sample(
        stream, partial(target_density, theta_a=theta_a), BELL_ENVELOPE, max_iterations
    )
    return AliceResult(measure_A(res.sample, theta_a), res.iterations, res.sample)


def bob_replay(seed: int, trial_index: int, message: int) -> float:
    """Reconstruct Alice's accepted sample from the seed and her message."""
    if int(message) != message or message < 1:
        raise ValueError(f"message must be a positive integer, got {message!r}")
    stream = derive_trial_stream(seed, trial_index)
    w = None
    for _ in range(message):
        w = BELL_ENVELOPE.g_transform(stream.next_uniform())
        stream.next_uniform()
    return float(w)


def bob_run(seed: int, trial_index: int, theta_b: float, message: int) -> Spin:
    x = bob_replay(seed, trial_index, message)
    return measure_B(x, Angle(theta_b))


def run_trial(
    seed: int,
    trial_index: int,
    theta_a: float,
    theta_b: float,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> TrialOutcome:
    alice = alice_run(derive_trial_stream(seed, trial_index), theta_a, max_iterations)
    b = bob_run(seed, trial_index, theta_b, alice.message)
    return TrialOutcome(alice.outcome, b, alice.message, alice.hidden_x)


# Bulk versions. Each element equals the scalar functions above bit-for-bit.

@dataclass(frozen=True)
class TrialBatch:
    trial_indices: np.ndarray
    a: np.ndarray
    b: np.ndarray
    k: np.ndarray
    hidden_x: np.ndarray = field(repr=False)


def alice_batch(
    seed: int,
    trial_indices,
    theta_a: float,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(outcomes, messages, hidden_x)`` for every trial index."""
    theta_a = Angle(theta_a)
    x, k = rejection_sample_batch(
        seed,
        trial_indices,
        partial(target_density, theta_a=theta_a),
        BELL_ENVELOPE,
        max_iterations,
    )
    return measure_A(x, theta_a), k, x


def bob_batch(seed: int, trial_indices, theta_b: float, messages) -> np.ndarray:
    """Bob's outcomes from ``(seed, trial index, theta_b, K)`` alone.

    Jumps straight to the candidate draw of iteration ``K``; the scalar
    :func:`bob_run` reaches the same draw by replaying.
    """
    messages = np.asarray(messages, dtype=np.int64)
    if messages.size and messages.min() < 1:
        raise ValueError("messages must be positive integers")
    keys = stream_keys(seed, trial_indices)
    x = BELL_ENVELOPE.g_transform(uniform_at(keys, DRAWS_PER_ITERATION * (messages - 1)))
    return measure_B(x, Angle(theta_b))


def run_trials(
    seed: int,
    theta_a: float,
    theta_b: float,
    trials: int,
    start: int = 0,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> TrialBatch:
    idx = np.arange(start, start + trials, dtype=np.uint64)
    a, k, x = alice_batch(seed, idx, theta_a, max_iterations)
    b = bob_batch(seed, idx, theta_b, k)
    return TrialBatch(idx, a, b, k, x)
