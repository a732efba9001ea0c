import math
from functools import partial

import numpy as np
import pytest
from scipy import stats

from fbnl.angles import TAU, target_density
from fbnl.oracle import quadrature_mass
from fbnl.protocol import BELL_ENVELOPE
from fbnl.rejection import (
    Envelope,
    EnvelopeError,
    IterationCapExceeded,
    geometric_pmf,
    rejection_sample,
    rejection_sample_batch,
    uniform_circle_envelope,
)
from fbnl.rng import TrialStream
from oracles import quadrature_cdf

P_BELL = 2 / math.pi


def uniform_g(x):
    return np.where((np.asarray(x) >= 0) & (np.asarray(x) < TAU), 1 / TAU, 0.0)


def cardioid(x):
    return (1.0 + np.cos(x)) / TAU


def test_envelope_constant_must_be_at_least_one():
    with pytest.raises(EnvelopeError):
        uniform_circle_envelope(0.9)


def test_envelope_validation_catches_non_dominating_envelope():
    with pytest.raises(EnvelopeError):
        uniform_circle_envelope(1.5).validate(cardioid)  # cardioid peaks at 2/(2*pi)
    uniform_circle_envelope(2.0).validate(cardioid, sup_f=2 / TAU)


def test_bell_envelope_is_tight_and_valid():
    assert BELL_ENVELOPE.c == math.pi / 2
    for theta in np.linspace(0, TAU, 9):
        BELL_ENVELOPE.validate(partial(target_density, theta_a=theta), sup_f=0.25)


def test_f_equal_to_g_always_accepts_first_time():
    env = uniform_circle_envelope(1.0)
    for i in range(200):
        res = rejection_sample(TrialStream(3, i), uniform_g, env)
        assert res.iterations == 1
        assert res.draws_consumed == 2


def test_draws_consumed_is_twice_iterations():
    f = partial(target_density, theta_a=0.3)
    for i in range(500):
        s = TrialStream(11, i)
        res = rejection_sample(s, f, BELL_ENVELOPE)
        assert res.draws_consumed == 2 * res.iterations == s.draw_count


def test_draw_order_is_candidate_then_acceptance():
    f = partial(target_density, theta_a=1.0)
    for i in range(200):
        res = rejection_sample(TrialStream(8, i), f, BELL_ENVELOPE)
        replay = TrialStream(8, i)
        for _ in range(res.iterations - 1):
            replay.next_uniform()
            replay.next_uniform()
        assert res.sample == replay.next_uniform() * TAU


def test_zero_density_point_is_a_rejection_not_an_error():
    # f vanishes on half the circle; division-based tests would blow up there
    def half(x):
        return np.where(np.cos(x) > 0, 1 / math.pi, 0.0)

    env = uniform_circle_envelope(2.0)
    for i in range(300):
        res = rejection_sample(TrialStream(4, i), half, env)
        assert math.cos(res.sample) > 0


def test_iteration_cap():
    def never(x):
        return 0.0 * np.asarray(x)

    with pytest.raises(IterationCapExceeded):
        rejection_sample(TrialStream(1, 0), never, uniform_circle_envelope(1.0), max_iterations=50)
    with pytest.raises(IterationCapExceeded):
        rejection_sample_batch(1, np.arange(10), never, uniform_circle_envelope(1.0), max_iterations=50)


def test_batch_matches_scalar_bit_for_bit():
    f = partial(target_density, theta_a=2.2)
    x, k = rejection_sample_batch(5, np.arange(3000), f, BELL_ENVELOPE)
    for i in range(3000):
        res = rejection_sample(TrialStream(5, i), f, BELL_ENVELOPE)
        assert (res.sample, res.iterations) == (x[i], k[i])


@pytest.fixture(scope="module")
def bell_million():
    return rejection_sample_batch(42, np.arange(10**6), partial(target_density, theta_a=0.0), BELL_ENVELOPE)


def test_first_iteration_acceptance_rate(bell_million):
    _, k = bell_million
    assert abs(np.mean(k == 1) - P_BELL) <= 0.002


def test_binned_samples_match_quadrature_bin_masses(bell_million):
    x, _ = bell_million
    edges = np.linspace(0, TAU, 65)
    masses = np.array([quadrature_mass(0.0, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])])
    observed, _ = np.histogram(x, bins=edges)
    expected = masses * x.size
    assert stats.chisquare(observed, expected * observed.sum() / expected.sum()).pvalue >= 0.01


@pytest.mark.parametrize(
    "f, c, kinks",
    [
        (partial(target_density, theta_a=0.9), math.pi / 2, [0.9 + math.pi / 2, 0.9 + 3 * math.pi / 2]),
        (cardioid, 2.0, []),
    ],
    ids=["bell", "cardioid"],
)
def test_exact_distribution_ks(f, c, kinks):
    x, _ = rejection_sample_batch(7, np.arange(10**5), f, uniform_circle_envelope(c))
    kinks = [k % TAU for k in kinks]
    res = stats.kstest(x, lambda t: quadrature_cdf(f, t, kinks))
    assert res.pvalue >= 0.01


def test_iteration_counts_fit_geometric(bell_million):
    _, k = bell_million
    n = k.size
    k_max = int(math.log(5 / n) / math.log(1 - P_BELL))
    observed = [np.sum(k == j) for j in range(1, k_max)] + [np.sum(k >= k_max)]
    probs = [geometric_pmf(P_BELL, j) for j in range(1, k_max)] + [(1 - P_BELL) ** (k_max - 1)]
    assert stats.chisquare(observed, n * np.array(probs)).pvalue >= 0.01


def test_cardioid_counts_fit_geometric_half():
    _, k = rejection_sample_batch(9, np.arange(10**5), cardioid, uniform_circle_envelope(2.0))
    assert abs(k.mean() - 2.0) <= 0.03


def test_tail_bound(bell_million):
    _, k = bell_million
    n = k.size
    for j in range(1, 21):
        tail = np.mean(k > j)
        se = math.sqrt(max(tail * (1 - tail), 1 / n) / n)
        assert tail <= math.exp(-j / (math.pi / 2)) + 3 * se


def test_geometric_pmf_examples():
    assert geometric_pmf(1.0, 1) == 1.0
    assert geometric_pmf(P_BELL, 1) == pytest.approx(0.63662, abs=5e-6)
    assert math.fsum(geometric_pmf(P_BELL, k) for k in range(1, 1001)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p, k", [(0.0, 1), (1.5, 1), (0.5, 0), (0.5, 1.5)])
def test_geometric_pmf_domain(p, k):
    with pytest.raises(ValueError):
        geometric_pmf(p, k)


def test_custom_envelope_sampler_uses_one_draw():
    env = Envelope(c=1.0, g_density=uniform_g, g_transform=lambda u: np.multiply(u, TAU))
    s = TrialStream(0, 0)
    env.g_sampler(s)
    assert s.draw_count == 1
