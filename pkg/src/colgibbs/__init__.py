"""Bayesian identification of MISO linear systems under collinear inputs.

Stable-spline priors over FIR coefficients, six blocked Gibbs sampling
schemes (including random sweeps with overlapping, collinearity-driven
blocks), and the exact autoregressive convergence-rate analysis that
ranks them.
"""
__version__ = "0.1.0"

from .backend import available_backends, default_backend
from .collinearity import (
    BlockDistribution,
    CollinearityMatrix,
    PairProbabilities,
    block_distribution,
    correlation_index,
    pair_probabilities,
    sample_block,
)
from .conditionals import (
    GaussianBlockLaw,
    InverseGammaLaw,
    draw_gaussian,
    draw_inverse_gamma,
    lambda_common_conditional,
    lambda_k_conditional,
    sigma2_conditional,
    theta_ij_conditional,
    theta_k_conditional,
)
from .convergence import (
    ConvergenceReport,
    UpdateMatrix,
    build_pair_update,
    build_single_update,
    mixture_matrix,
    scheme_rates,
    spectral_radius,
)
from .datagen import (
    Dataset,
    collinear_input_chain,
    impulse_response,
    load_dataset,
    make_dataset,
    noise_variance_from_snr,
    random_common_denominator_tfs,
)
from .diagnostics import (
    FitReport,
    RunLengthReport,
    autocovariance,
    fit,
    fit_report,
    max_run_length,
    raftery_lewis,
)
from .kernel import StableSplineKernel, build_kernel
from .problem import (
    ImpulseResponseSet,
    RegressionProblem,
    build_regression_problem,
    build_regressors,
    simulate_output,
    toeplitz_regressor,
)
from .samplers import (
    SCHEMES,
    ChainConfig,
    ChainState,
    ChainTrace,
    PosteriorSummary,
    mean_hyperparameters,
    posterior_summary,
    run_chain,
)
