import math

import numpy as np
import pytest
from scipy import integrate

from fbnl.angles import TAU, measure_A, measure_B, target_density
from fbnl.experiment import simulate_protocol
from fbnl.oracle import (
    integrate_piecewise,
    quadrature_correlation,
    quadrature_marginal,
    quadrature_mass,
    sign_change_points,
)

GRID = [TAU * i / 64 for i in range(64)]


def test_equal_angles():
    assert quadrature_correlation(0.8, 0.8) == pytest.approx(-1.0, abs=1e-9)


def test_pi_over_three():
    assert quadrature_correlation(1.0 + math.pi / 3, 1.0) == pytest.approx(-0.5, abs=1e-9)


def test_grid_matches_cosine():
    assert max(abs(quadrature_correlation(2.0 + d, 2.0) + math.cos(d)) for d in GRID) <= 1e-9


def test_agrees_with_adaptive_quadrature():
    for ta, tb in [(0.1, 2.9), (4.0, 1.0), (5.5, 5.4)]:
        ref, _ = integrate.quad(
            lambda x: measure_A(x, ta) * measure_B(x, tb) * target_density(x, ta),
            0.0, TAU, points=sign_change_points(ta, tb), epsabs=1e-13, limit=200,
        )
        assert quadrature_correlation(ta, tb) == pytest.approx(ref, abs=1e-10)


def test_marginals_vanish():
    assert abs(quadrature_marginal("A", 0.7, 1.234)) <= 1e-9
    assert abs(quadrature_marginal("B", 0.7, 2.1)) <= 1e-9
    for ta in np.linspace(0, TAU, 8, endpoint=False):
        assert abs(quadrature_marginal("B", ta, 2.1)) <= 1e-9
    with pytest.raises(ValueError):
        quadrature_marginal("C", 0.0, 0.0)


def test_mass_is_one():
    assert all(abs(quadrature_mass(t) - 1.0) <= 1e-9 for t in GRID)


def test_minus_sign_convention_is_the_one_that_gives_minus_cosine():
    flipped = lambda x, t: -measure_B(x, t)  # B = +sign(cos(x - theta_b))
    for d in GRID[::8]:
        assert quadrature_correlation(d, 0.0, b_rule=flipped) == pytest.approx(math.cos(d), abs=1e-9)
        assert quadrature_correlation(d, 0.0) == pytest.approx(-math.cos(d), abs=1e-9)


def test_integrate_piecewise_polynomial_exact():
    assert integrate_piecewise(lambda x: x**3, 0.0, 2.0, [0.5, 1.7]) == pytest.approx(4.0, abs=1e-14)


@pytest.mark.parametrize("i", range(0, 16, 3))
def test_monte_carlo_within_five_stderr_of_oracle(i):
    d = TAU * i / 16
    est = simulate_protocol(42, d, 0.0, 10**6, start=i * 10**6).estimate
    ref = quadrature_correlation(d, 0.0)
    assert abs(est.e_ab - ref) <= max(5 * est.stderr_ab, 1e-9)
