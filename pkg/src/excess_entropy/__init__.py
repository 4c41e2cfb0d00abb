"""Excess entropy of stationary processes: exact and empirical estimators."""

__version__ = "0.1.0"

from .entropy import (  # noqa: E402
    ConvergencePolicy,
    EntropyCurve,
    Estimate,
    EstimatorSeries,
    F_diagnostic,
    SymbolSequence,
    block_entropy_empirical,
    block_entropy_exact,
    entropy_curve,
    estimator_series,
    excess_entropy_estimate,
    relabel,
)
from .markov import (  # noqa: E402
    MarkovModel,
    markov_entropy_curve,
    markov_entropy_rate,
    markov_excess_entropy,
    stationary_distribution,
)
from .gaussian import (  # noqa: E402
    GaussianModel,
    cepstrum_coefficients,
    covariance_summability_report,
    gaussian_entropy_curve,
    kolmogorov_entropy_rate,
    mutual_info_cepstrum,
)
from .fgn import (  # noqa: E402
    fgn_autocovariance,
    fgn_divergence_demo,
    fgn_gamma_asymptotics,
    sinai_spectral_density,
)
