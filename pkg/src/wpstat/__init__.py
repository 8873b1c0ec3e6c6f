"""Smooth linear spectral statistics of random hyperbolic surfaces and their GOE limit."""

from .fourier_pairs import FAMILIES, TestFunctionPair, eval_f, eval_fhat, scale_support
from .goe_reference import GOEMCConfig, GOEMCResult, sample_goe_variance, sigma2_goe_closed_form
from .kernels import KernelParams, eval_F, eval_GL, eval_HL
from .trace_stats import (
    EigenvalueList,
    LengthSpectrum,
    n_osc_from_spectrum,
    statistic_from_eigenvalues,
    weyl_main_term,
)
from .wp_asymptotics import (
    I_L_pair,
    I_f,
    VarianceBreakdown,
    decay_study_If,
    expectation_sns_finite_g,
    limiting_variance,
    variance_tau0,
)

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "TestFunctionPair",
    "eval_f",
    "eval_fhat",
    "scale_support",
    "KernelParams",
    "eval_F",
    "eval_HL",
    "eval_GL",
    "GOEMCConfig",
    "GOEMCResult",
    "sample_goe_variance",
    "sigma2_goe_closed_form",
    "LengthSpectrum",
    "EigenvalueList",
    "weyl_main_term",
    "n_osc_from_spectrum",
    "statistic_from_eigenvalues",
    "I_f",
    "I_L_pair",
    "expectation_sns_finite_g",
    "limiting_variance",
    "variance_tau0",
    "decay_study_If",
    "VarianceBreakdown",
    "__version__",
]
