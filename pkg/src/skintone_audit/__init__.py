"""Skin tone estimation and per-tone classifier evaluation for dermatology
image datasets.

The tone measure is the individual typology angle (ITA), computed in CIELab
from non-diseased skin pixels under an exclusion mask. On top of it the
package provides dataset tone-distribution audits, segmentation-mask quality
scoring, per-tone-bin classifier accuracy with trend analysis, and a
synthetic-data oracle for validating every statistic against planted truth.
"""

__version__ = "0.1.0"

from .colorimetry import grayscale, lab_to_srgb, srgb_to_lab
from .fairness import (
    DEFAULT_MIDPOINTS,
    PerBinAccuracy,
    PredictionRecord,
    TrendFit,
    balanced_accuracy,
    overall_accuracy,
    pearson,
    per_bin_accuracy,
    trend_fit,
)
from .ita import (
    ItaConfig,
    ItaEstimate,
    SkinToneCategory,
    categorize,
    compute_ita,
    extract_nondiseased,
    ita_from_lab,
    trim_one_sigma,
)
from .seg_eval import SegQualityReport, evaluate_segmentation, ita_mae, mask_pixel_metrics

__all__ = [
    "__version__",
    "srgb_to_lab",
    "lab_to_srgb",
    "grayscale",
    "ItaConfig",
    "ItaEstimate",
    "SkinToneCategory",
    "categorize",
    "compute_ita",
    "extract_nondiseased",
    "ita_from_lab",
    "trim_one_sigma",
    "mask_pixel_metrics",
    "ita_mae",
    "evaluate_segmentation",
    "SegQualityReport",
    "PredictionRecord",
    "PerBinAccuracy",
    "TrendFit",
    "DEFAULT_MIDPOINTS",
    "overall_accuracy",
    "balanced_accuracy",
    "per_bin_accuracy",
    "trend_fit",
    "pearson",
]
