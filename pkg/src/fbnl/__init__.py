"""Finite-bit simulation of the singlet cosine correlation.

Alice and Bob share a seed. Alice rejection-samples a hidden angle whose
law depends on her setting and sends Bob only the number of iterations it
took. That message has finite entropy, about 1.485 bits on average, and it
is enough for Bob to reproduce ``E(AB) = -cos(theta_a - theta_b)`` exactly.
"""

from .angles import TAU, Angle, Spin, measure_A, measure_B, normalize_angle, target_density
from .coding import (
    CommunicationStats,
    communication_stats,
    empirical_entropy_bits,
    expected_code_length_bits,
    geometric_entropy_bits,
    golomb_decode,
    golomb_encode,
    golomb_param,
    unary_decode,
    unary_encode,
)
from .experiment import CorrelationEstimate, ExperimentConfig
from .lhv import STANDARD_CHSH, ChshAngles, chsh_value, lhv_trial
from .oracle import quadrature_correlation, quadrature_marginal
from .protocol import (
    ACCEPT_PROBABILITY,
    ENVELOPE_C,
    AliceResult,
    TrialOutcome,
    alice_run,
    bob_run,
    run_trial,
    run_trials,
)
from .rejection import Envelope, RejectionResult, geometric_pmf, rejection_sample
from .rng import TrialStream, derive_trial_stream, next_uniform

__version__ = "0.1.0"
