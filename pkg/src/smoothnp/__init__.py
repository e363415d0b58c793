"""Kernel-smoothed sign and Wilcoxon signed-rank tests for a location shift,
with Edgeworth p-values, Cornish-Fisher critical values and confidence
intervals."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .classical import (
    ExactDistribution,
    exact_sign_distribution,
    exact_wilcoxon_distribution,
    sign_statistic,
    wilcoxon_statistic,
)
from .distributions import DistributionModel, norm_cdf, norm_ppf
from .edgeworth import (
    cornish_fisher_sign,
    cornish_fisher_wilcoxon,
    edgeworth_cdf_sign,
    edgeworth_cdf_wilcoxon,
    pvalue_smoothed_sign,
    pvalue_smoothed_wilcoxon,
)
from .inference import ConfidenceInterval, TestOutcome, confidence_interval, decide, t_statistic
from .kernels import BandwidthRule, Kernel, bandwidth, get_kernel, kernel_moment
from .rng import RandomStream, derive
from .sample import Sample
from .smoothed import ApproximationWarning, SmoothedConfig, smoothed_sign, smoothed_wilcoxon

__all__ = [
    "BACKEND", "ApproximationWarning", "BandwidthRule", "ConfidenceInterval",
    "DistributionModel", "ExactDistribution", "Kernel", "RandomStream", "Sample",
    "SmoothedConfig", "TestOutcome", "bandwidth", "confidence_interval",
    "cornish_fisher_sign", "cornish_fisher_wilcoxon", "decide", "derive",
    "edgeworth_cdf_sign", "edgeworth_cdf_wilcoxon", "exact_sign_distribution",
    "exact_wilcoxon_distribution", "get_kernel", "kernel_moment", "norm_cdf", "norm_ppf",
    "pvalue_smoothed_sign", "pvalue_smoothed_wilcoxon", "sign_statistic", "smoothed_sign",
    "smoothed_wilcoxon", "t_statistic", "wilcoxon_statistic",
]
