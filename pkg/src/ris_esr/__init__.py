"""Ergodic secrecy rate toolkit for RIS-assisted wiretap links.

Closed-form and asymptotic secrecy-rate expressions for a reflecting surface
with discrete phase shifts and multiple (colluding or non-colluding)
eavesdroppers, a seeded Monte Carlo engine that serves as the empirical
oracle for every closed form, and a statistical validation suite for the
distributional assumptions behind the approximations.
"""

from .analytic import (
    AnalyticConstants,
    EsrResult,
    baseline_no_ris,
    constants,
    esr_asymptotic,
    esr_colluding,
    esr_largek_colluding,
    esr_noncolluding,
    hypoexp_cdf,
    hypoexp_pdf,
    rate_d,
    rate_e_colluding,
    rate_e_noncolluding,
)
from .channel import (
    ChannelRealization,
    DistanceSet,
    PhaseConfig,
    Scenario,
    derive_phases,
    distances,
    eavesdropper_phases,
    load_scenario,
    optimal_phases,
    quantize_phase,
    reference_scenario,
    sample_channels,
    spread_eve_positions,
    trial_rng,
)
from .monte_carlo import McConfig, collect_gamma_samples, estimate_esr
from .numerics import (
    EULER_GAMMA,
    GoodnessOfFit,
    euler_gamma,
    expint_ei,
    ks_test,
    pearson_correlation,
    scaled_neg_ei,
)
from .snr import SnrSample, gamma_d, gamma_d_direct, gamma_eves, gamma_eves_direct, snr_sample
from .validation import (
    CheckResult,
    ValidationReport,
    run_validation_suite,
    validate_closed_forms,
    validate_exponential_limit,
    validate_phase_statistics,
    validate_snr_independence,
)

__version__ = "0.1.0"
