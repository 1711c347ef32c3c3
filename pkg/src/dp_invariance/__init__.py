"""Scale-invariance diagnostics for simplex priors and a posterior
resampling engine for nonparametric one- and two-arm inference.

Layers, bottom up: simplex points and the rescale-renormalize group
(:mod:`.simplex`), the invariant reference density and its stability
theory (:mod:`.density`), the Dirichlet distribution in
(concentration, mean) form (:mod:`.dirichlet`), Dirichlet-process
conjugacy and samplers (:mod:`.process`), posterior functional inference
(:mod:`.inference`), the executable check suite (:mod:`.verify`), and
the CLI (:mod:`.cli`). Hot draw loops run on a compiled kernel when
available (``KERNEL_BACKEND``), with a numpy fallback drawing the
identical random stream.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .density import (
    GeneralizedDensity,
    StabilityReport,
    check_stability,
    dir0_density,
    dir0_log_density,
    functional_eq_log_residual,
    stability_envelope,
    uniform_density,
)
from .dirichlet import (
    DirichletParams,
    DirichletSample,
    EpsInvarianceMargin,
    eps_invariance_margin,
    log_c_eps,
    log_pdf,
    sample,
)
from .inference import (
    CdfAt,
    Mean,
    PosteriorSummary,
    Quantile,
    TwoArmData,
    analyze_two_arm,
    bootstrap_equivalence,
    frequentist_bootstrap,
    functional_of_draw,
    parse_functional,
    posterior_functional_draws,
)
from .process import (
    BaseCDF,
    DiscreteCDFDraw,
    DPParams,
    EmpiricalCDF,
    GaussianCDF,
    MixtureCDF,
    UniformCDF,
    bayesian_bootstrap_draw,
    empirical_cdf,
    finite_marginal,
    posterior_update,
    process_invariance_bound,
    sample_stick_breaking,
)
from .simplex import (
    GroupElement,
    ProbVector,
    apply,
    compose,
    identity_element,
    inverse,
    log_rn_derivative,
    make_group_element,
    make_prob_vector,
    numerical_log_jacobian,
)
from .verify import CheckConfig, CheckResult, VerificationReport, run_all

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # simplex
    "ProbVector",
    "GroupElement",
    "make_prob_vector",
    "make_group_element",
    "identity_element",
    "apply",
    "compose",
    "inverse",
    "log_rn_derivative",
    "numerical_log_jacobian",
    # density
    "GeneralizedDensity",
    "StabilityReport",
    "dir0_density",
    "dir0_log_density",
    "uniform_density",
    "functional_eq_log_residual",
    "stability_envelope",
    "check_stability",
    # dirichlet
    "DirichletParams",
    "DirichletSample",
    "EpsInvarianceMargin",
    "log_c_eps",
    "log_pdf",
    "sample",
    "eps_invariance_margin",
    # process
    "BaseCDF",
    "UniformCDF",
    "GaussianCDF",
    "EmpiricalCDF",
    "MixtureCDF",
    "DPParams",
    "DiscreteCDFDraw",
    "empirical_cdf",
    "posterior_update",
    "finite_marginal",
    "sample_stick_breaking",
    "bayesian_bootstrap_draw",
    "process_invariance_bound",
    # inference
    "Mean",
    "Quantile",
    "CdfAt",
    "TwoArmData",
    "PosteriorSummary",
    "parse_functional",
    "functional_of_draw",
    "posterior_functional_draws",
    "analyze_two_arm",
    "frequentist_bootstrap",
    "bootstrap_equivalence",
    # verify
    "CheckConfig",
    "CheckResult",
    "VerificationReport",
    "run_all",
]
