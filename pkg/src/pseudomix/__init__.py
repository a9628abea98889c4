"""Maximum pseudo-likelihood estimation for univariate Gaussian mixtures.

The kernel density estimate fixes the mixture weights for any candidate set
of components (an L2 projection onto the simplex); the pseudo-likelihood is
the ordinary likelihood evaluated with those weights and is maximised over
means and standard deviations only.
"""

from .baselines import EMConfig, em_fit, l2_fit
from .errors import ConditioningError, DomainError, OptimizationError, UnsupportedSizeError
from .experiments import (
    ReplicateRecord,
    Scenario,
    default_scenario,
    density_l2_error,
    run_scenario,
    sample_mixture,
    summarize,
)
from .gmx import (
    Component,
    MixtureDensity,
    ParamVector,
    WeightVector,
    canonicalize,
    gauss_logpdf,
    gram_matrix,
    hausdorff,
    inner_product,
    mixture_logpdf,
)
from .kde import (
    KernelEstimate,
    bandwidth_default,
    kde_component_inner,
    kde_l2_norm_sq,
    kde_logpdf,
    kde_sup_norm,
)
from .kernels import BACKEND
from .optim import FitResult, OptimizerConfig
from .plk import Objective, maximize, plain_loglik, pseudo_loglik
from .simplex import (
    QuadraticProjection,
    projection_distance,
    solve_simplex,
    weights_for,
    weights_unconstrained,
)

__version__ = "0.1.0"

__all__ = [
    "EMConfig",
    "em_fit",
    "l2_fit",
    "ConditioningError",
    "DomainError",
    "OptimizationError",
    "UnsupportedSizeError",
    "ReplicateRecord",
    "Scenario",
    "default_scenario",
    "density_l2_error",
    "run_scenario",
    "sample_mixture",
    "summarize",
    "Component",
    "MixtureDensity",
    "ParamVector",
    "WeightVector",
    "canonicalize",
    "gauss_logpdf",
    "gram_matrix",
    "hausdorff",
    "inner_product",
    "mixture_logpdf",
    "KernelEstimate",
    "bandwidth_default",
    "kde_component_inner",
    "kde_l2_norm_sq",
    "kde_logpdf",
    "kde_sup_norm",
    "BACKEND",
    "FitResult",
    "OptimizerConfig",
    "Objective",
    "maximize",
    "plain_loglik",
    "pseudo_loglik",
    "QuadraticProjection",
    "projection_distance",
    "solve_simplex",
    "weights_for",
    "weights_unconstrained",
    "__version__",
]
