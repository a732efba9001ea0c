"""Exact rejection sampling that reports how many iterations it took.

One iteration always consumes exactly two uniforms from the trial stream,
in a fixed order: first the one mapped to the candidate ``w`` through the
envelope's transform, then the acceptance uniform ``u``. The candidate is
accepted when ``u * c * g(w) <= f(w)``. That is the ratio test
``u * c * g(w) / f(w) <= 1`` without the division, so a zero of ``f`` is
just a rejection.

Whoever knows the seed and the iteration count ``K`` can reconstruct the
accepted sample without knowing ``f``: it is the candidate drawn at
iteration ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .angles import TAU
from .rng import TrialStream, stream_keys, uniform_at

DEFAULT_MAX_ITERATIONS = 10**6
DRAWS_PER_ITERATION = 2


class EnvelopeError(ValueError):
    """The envelope does not dominate the target density."""


class IterationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Envelope:
    """Dominating density ``g`` scaled by ``c >= 1``.

    ``g_transform`` maps one uniform in ``[0, 1)`` to a variate with density
    ``g_density``. Both callables must accept scalars and numpy arrays.
    """

    c: float
    g_density: Callable
    g_transform: Callable
    domain: tuple[float, float] = (0.0, TAU)
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 1.0):
            raise EnvelopeError(f"envelope constant must satisfy c >= 1, got {self.c!r}")

    def g_sampler(self, stream: TrialStream) -> float:
        return float(self.g_transform(stream.next_uniform()))

    def validate(
        self,
        f: Callable,
        grid_points: int = 4096,
        sup_f: float | None = None,
        rtol: float = 1e-12,
    ) -> None:
        """Check ``f <= c * g`` on a dense grid, and ``sup_f <= c * sup g`` if given.

        Raises :class:`EnvelopeError` on failure. ``rtol`` absorbs rounding
        in ``c * g`` when the bound is tight.
        """
        lo, hi = self.domain
        x = lo + (hi - lo) * np.arange(grid_points) / grid_points
        fx = np.asarray(f(x), dtype=float)
        cg = self.c * np.broadcast_to(np.asarray(self.g_density(x), dtype=float), x.shape)
        bad = fx > cg * (1.0 + rtol)
        if np.any(fx < 0.0):
            raise EnvelopeError("target density is negative somewhere on the grid")
        if np.any(bad):
            i = int(np.argmax(bad))
            raise EnvelopeError(
                f"f({x[i]!r}) = {fx[i]!r} exceeds c*g = {cg[i]!r}"
            )
        if sup_f is not None and sup_f > float(np.max(cg)) * (1.0 + rtol):
            raise EnvelopeError(f"analytic bound sup f = {sup_f!r} exceeds max c*g")


def _uniform_circle_density(x):
    return np.where((np.asarray(x) >= 0.0) & (np.asarray(x) < TAU), 1.0 / TAU, 0.0)


def _uniform_circle_transform(u):
    # u < 1 - 2**-53 guarantees u * TAU < TAU after rounding
    return np.multiply(u, TAU)


def uniform_circle_envelope(c: float) -> Envelope:
    """Uniform ``g = 1/(2*pi)`` on ``[0, 2*pi)`` with constant ``c``."""
    return Envelope(
        c=c,
        g_density=_uniform_circle_density,
        g_transform=_uniform_circle_transform,
        name="uniform-circle",
    )


@dataclass(frozen=True)
class RejectionResult:
    sample: float
    iterations: int
    draws_consumed: int


def _accepts(u, w, f, env: Envelope):
    return u * env.c * env.g_density(w) <= f(w)


def rejection_sample(
    stream: TrialStream,
    f: Callable,
    env: Envelope,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> RejectionResult:
    start = stream.draw_count
    for k in range(1, max_iterations + 1):
        w = env.g_transform(stream.next_uniform())
        u = stream.next_uniform()
        if _accepts(u, w, f, env):
            return RejectionResult(float(w), k, stream.draw_count - start)
    raise IterationCapExceeded(
        f"no acceptance within {max_iterations} iterations on {stream!r} "
        f"(envelope c={env.c!r}); the envelope or generator is broken"
    )


def rejection_sample_batch(
    seed: int,
    trial_indices,
    f: Callable,
    env: Envelope,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> tuple[np.ndarray, np.ndarray]:
    """Run :func:`rejection_sample` on a fresh stream for every trial index.

    Returns ``(samples, iterations)``; element ``j`` is bit-identical to the
    scalar sampler on ``TrialStream(seed, trial_indices[j])``.
    """
    keys = stream_keys(seed, trial_indices)
    n = keys.shape[0]
    samples = np.empty(n, dtype=np.float64)
    iterations = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    k = 0
    while active.size:
        if k >= max_iterations:
            raise IterationCapExceeded(
                f"{active.size} trial(s) did not accept within {max_iterations} iterations"
            )
        sub = keys[active]
        w = env.g_transform(uniform_at(sub, DRAWS_PER_ITERATION * k))
        u = uniform_at(sub, DRAWS_PER_ITERATION * k + 1)
        k += 1
        ok = _accepts(u, w, f, env)
        done = active[ok]
        samples[done] = w[ok]
        iterations[done] = k
        active = active[~ok]
    return samples, iterations


def geometric_pmf(p: float, k: int) -> float:
    """``P(K = k) = (1 - p)**(k - 1) * p`` for the first-success count ``K``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return (1.0 - p) ** (k - 1) * p
