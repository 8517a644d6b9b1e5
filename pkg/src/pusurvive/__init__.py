"""Positive-unlabeled survival analysis.

Likelihood-based estimation of survival-time and censoring-time regression
parameters when event labels are only partially observed, plus the Monte
Carlo machinery demonstrating the conventional estimator's bias.
"""

from .model_core import (
    ALL_VARIANTS,
    CONVENTIONAL_C_OBSERVED,
    CONVENTIONAL_C_UNOBSERVED,
    PUSA_C_OBSERVED,
    PUSA_C_UNOBSERVED,
    CensoringMode,
    Dataset,
    Estimator,
    ModelVariant,
    SubjectRecord,
    link_rate,
    validate_dataset,
)
from .distributions import DistributionSpec, Family, QuadratureConfig, event_probability
from .estimator import FitOptions, FitResult, fit_alternating
from .simulation import DgpConfig, generate
from .experiments import ExperimentConfig, run_monte_carlo
from .sklearn_api import PUSurvivalEstimator

__version__ = "0.1.0"

__all__ = [
    "ALL_VARIANTS",
    "CONVENTIONAL_C_OBSERVED",
    "CONVENTIONAL_C_UNOBSERVED",
    "PUSA_C_OBSERVED",
    "PUSA_C_UNOBSERVED",
    "CensoringMode",
    "Dataset",
    "DgpConfig",
    "DistributionSpec",
    "Estimator",
    "ExperimentConfig",
    "Family",
    "FitOptions",
    "FitResult",
    "ModelVariant",
    "PUSurvivalEstimator",
    "QuadratureConfig",
    "SubjectRecord",
    "event_probability",
    "fit_alternating",
    "generate",
    "link_rate",
    "run_monte_carlo",
    "validate_dataset",
]
