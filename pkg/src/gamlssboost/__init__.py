"""Componentwise gradient boosting for Gaussian location-scale regression
with fixed and adaptive step-lengths."""
from ._jit import BACKEND
from .baselearner import LearnerFit, fit_ols, select_best
from .core import Dataset, GaussianLocScale, PredictorPair, grad_mu, grad_sigma, loss
from .engine import (
    BoostModel,
    Trace,
    TraceRecord,
    boost_cyclical,
    boost_noncyclical,
    init_offsets,
    predict,
    risk_path,
)
from .errors import (
    DegenerateDataError,
    DegenerateLearnerError,
    DimensionError,
    GamlssBoostError,
    NumericError,
    UsageError,
)
from .simulate import CvSettings, SimDesign, SimMetrics, evaluate, generate, run_study
from .stepsize import (
    StepKind,
    StepPolicy,
    StepResult,
    analytic_nu_mu,
    line_search,
    nu_sigma_foc_residual,
    step_for,
)
from .tuning import CvResult, kfold_cv

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoostModel",
    "CvResult",
    "CvSettings",
    "Dataset",
    "DegenerateDataError",
    "DegenerateLearnerError",
    "DimensionError",
    "GamlssBoostError",
    "GaussianLocScale",
    "LearnerFit",
    "NumericError",
    "PredictorPair",
    "SimDesign",
    "SimMetrics",
    "StepKind",
    "StepPolicy",
    "StepResult",
    "Trace",
    "TraceRecord",
    "UsageError",
    "analytic_nu_mu",
    "boost_cyclical",
    "boost_noncyclical",
    "evaluate",
    "fit_ols",
    "generate",
    "grad_mu",
    "grad_sigma",
    "init_offsets",
    "kfold_cv",
    "line_search",
    "loss",
    "nu_sigma_foc_residual",
    "predict",
    "risk_path",
    "run_study",
    "select_best",
    "step_for",
]
