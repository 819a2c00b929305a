"""Classifier metrics per skin tone bin, trend fitting, and correlations.

Inputs are prediction records from an external classifier (one row per image
per validation split) plus per-image tone estimates. Per-bin accuracy is
plain accuracy; the overall score is also available as balanced accuracy
(mean per-class recall). The accuracy-vs-tone trend is an unweighted OLS fit
of per-bin mean accuracy against the bin midpoint angle, with a t-based 95%
confidence interval on the slope.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _stats

from .errors import MissingItaError, UnknownLabelError, ZeroVarianceError
from .ita import CATEGORY_ORDER, ItaEstimate, SkinToneCategory, categorize

log = logging.getLogger(__name__)

# Bin midpoint angles used for the trend fit. Bounded bins use the arithmetic
# midpoint; the open-ended bins extend the neighboring bin width symmetrically
# (very_lt: 55 + 3.5, dark: 10 - 5... capped at half the tan1 width below 10).
DEFAULT_MIDPOINTS = {
    SkinToneCategory.VERY_LIGHT: 58.5,
    SkinToneCategory.LIGHT_2: 51.5,
    SkinToneCategory.LIGHT_1: 44.5,
    SkinToneCategory.INTERMEDIATE_2: 37.75,
    SkinToneCategory.INTERMEDIATE_1: 31.25,
    SkinToneCategory.TANNED_2: 23.5,
    SkinToneCategory.TANNED_1: 14.5,
    SkinToneCategory.DARK: 5.0,
}


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    image_id: str
    split_id: str
    true_label: str
    predicted_label: str


@dataclass
class PerBinAccuracy:
    category: SkinToneCategory
    n: int
    mean_accuracy: float | None
    std_error: float | None
    per_split: list[tuple[str, float, int]] = field(default_factory=list)


@dataclass
class TrendFit:
    slope: float
    intercept: float
    ci95_low: float
    ci95_high: float
    n_points: int
    midpoints_used: list[float] = field(default_factory=list)


def overall_accuracy(preds) -> float:
    """Fraction of records whose predicted label equals the true label."""
    preds = list(preds)
    if not preds:
        raise ValueError("empty prediction set")
    return sum(p.predicted_label == p.true_label for p in preds) / len(preds)


def balanced_accuracy(preds, label_set) -> float:
    """Mean per-class recall over the declared label set.

    Classes with no records are excluded from the mean with a warning; a true
    label outside the set is an error.
    """
    preds = list(preds)
    label_set = set(label_set)
    totals = {c: 0 for c in label_set}
    correct = {c: 0 for c in label_set}
    for p in preds:
        if p.true_label not in label_set:
            raise UnknownLabelError(f"true label {p.true_label!r} not in label set")
        totals[p.true_label] += 1
        if p.predicted_label == p.true_label:
            correct[p.true_label] += 1
    recalls = []
    for c in sorted(label_set):
        if totals[c] == 0:
            log.warning("class %r has no records; excluded from balanced accuracy", c)
            continue
        recalls.append(correct[c] / totals[c])
    if not recalls:
        raise ValueError("no classes with records")
    return float(np.mean(recalls))


def _ita_degrees(value) -> float:
    return value.ita_degrees if isinstance(value, ItaEstimate) else float(value)


def per_bin_accuracy(preds, ita_results) -> list[PerBinAccuracy]:
    """Accuracy per tone bin, with mean and standard error across splits.

    ``ita_results`` maps image_id to a tone angle (or ItaEstimate). Records
    are bucketed by the categorized angle, then by split; per-bin mean is the
    unweighted mean of per-split accuracies and the standard error is the
    sample standard deviation across splits divided by sqrt(#splits). Bins
    with no records are reported with n=0 and null statistics.
    """
    preds = list(preds)
    missing = {p.image_id for p in preds if p.image_id not in ita_results}
    if missing:
        raise MissingItaError(missing)

    cat_of = {
        iid: categorize(_ita_degrees(ita_results[iid]))
        for iid in {p.image_id for p in preds}
    }
    # bin -> split -> [n_correct, n_total]
    buckets: dict[SkinToneCategory, dict[str, list[int]]] = {
        c: {} for c in CATEGORY_ORDER
    }
    for p in preds:
        cell = buckets[cat_of[p.image_id]].setdefault(p.split_id, [0, 0])
        cell[0] += p.predicted_label == p.true_label
        cell[1] += 1

    out = []
    for cat in CATEGORY_ORDER:
        splits = buckets[cat]
        if not splits:
            out.append(PerBinAccuracy(cat, 0, None, None, []))
            continue
        per_split = [
            (sid, c / n, n) for sid, (c, n) in sorted(splits.items())
        ]
        accs = np.array([a for _, a, _ in per_split])
        se = float(accs.std(ddof=1) / np.sqrt(len(accs))) if len(accs) > 1 else 0.0
        out.append(
            PerBinAccuracy(
                category=cat,
                n=sum(n for _, _, n in per_split),
                mean_accuracy=float(accs.mean()),
                std_error=se,
                per_split=per_split,
            )
        )
    return out


def trend_fit(points, weights=None) -> TrendFit:
    """OLS fit of accuracy against bin midpoint angle.

    ``points`` is a sequence of (midpoint_degrees, mean_accuracy). The 95%
    confidence interval is slope +/- t(0.975, n-2) * SE(slope) with SE from
    the residual variance. Optional ``weights`` (bin counts) switch to
    weighted least squares for sensitivity analysis.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points for a trend fit")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if len(set(x.tolist())) < 2:
        raise ValueError("midpoints are degenerate (no spread in x)")
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != x.shape or np.any(w <= 0):
        raise ValueError("weights must be positive and match points")

    wsum = w.sum()
    xbar = (w * x).sum() / wsum
    ybar = (w * y).sum() / wsum
    sxx = (w * (x - xbar) ** 2).sum()
    slope = (w * (x - xbar) * (y - ybar)).sum() / sxx
    intercept = ybar - slope * xbar

    n = len(pts)
    resid = y - (intercept + slope * x)
    s2 = (w * resid**2).sum() / (n - 2)
    se_slope = float(np.sqrt(s2 / sxx))
    t = float(_stats.t.ppf(0.975, n - 2))
    return TrendFit(
        slope=float(slope),
        intercept=float(intercept),
        ci95_low=float(slope - t * se_slope),
        ci95_high=float(slope + t * se_slope),
        n_points=n,
        midpoints_used=x.tolist(),
    )


def trend_points(per_bin, midpoints=None):
    """(midpoint, mean accuracy) pairs for the bins that have data."""
    midpoints = DEFAULT_MIDPOINTS if midpoints is None else midpoints
    return [
        (midpoints[b.category], b.mean_accuracy)
        for b in per_bin
        if b.mean_accuracy is not None
    ]


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ValueError("need at least 2 points")
    xd = x - x.mean()
    yd = y - y.mean()
    denom = np.sqrt((xd**2).sum() * (yd**2).sum())
    if denom == 0.0:
        raise ZeroVarianceError("an input has zero variance")
    return float(np.clip((xd * yd).sum() / denom, -1.0, 1.0))
