"""Segmentation-mask quality: pixel accuracy, false negative rate, and the
mean absolute difference of tone angles induced by predicted vs ground-truth
masks.

The positive class is "excluded/diseased": a false negative is a truly
diseased pixel that a predicted mask labels non-diseased. Aggregates are
unweighted per-image means, not pixel-pooled.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, EmptyRegionError
from .ita import ItaConfig, compute_ita

log = logging.getLogger(__name__)


@dataclass
class PerImageSeg:
    image_id: str
    accuracy: float
    fnr: float
    ita_abs_error: float | None  # None when ITA undefined (all-excluded gt)


@dataclass
class SegQualityReport:
    pixel_accuracy: float
    false_negative_rate: float
    ita_mae_degrees: float
    n_images: int
    per_image: list[PerImageSeg] = field(default_factory=list)


def mask_pixel_metrics(pred: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    """(accuracy, false negative rate) of a predicted exclusion mask.

    Both masks are boolean arrays, True = excluded. FNR is 0 when the ground
    truth excludes nothing.
    """
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"mask shapes differ: {pred.shape} vs {gt.shape}")
    accuracy = float((pred == gt).mean())
    n_pos = int(gt.sum())
    fnr = float((gt & ~pred).sum() / n_pos) if n_pos else 0.0
    return accuracy, fnr


def ita_mae(images, preds, gts, cfg: ItaConfig | None = None) -> float:
    """Mean over images of |ITA under predicted mask - ITA under gt mask|."""
    errors = []
    for i, (image, pred, gt) in enumerate(zip(images, preds, gts)):
        try:
            ita_pred = compute_ita(image, pred, cfg).ita_degrees
            ita_gt = compute_ita(image, gt, cfg).ita_degrees
        except EmptyRegionError as exc:
            raise EmptyRegionError(f"image index {i}: {exc}") from exc
        errors.append(abs(ita_pred - ita_gt))
    if not errors:
        raise ValueError("no images to evaluate")
    return float(np.mean(errors))


def evaluate_segmentation(triples, cfg: ItaConfig | None = None) -> SegQualityReport:
    """Score (image_id, image, pred_mask, gt_mask) tuples.

    Images whose gt mask excludes everything still count toward the pixel
    metrics but are skipped (with a warning) in the tone-angle error, which
    is undefined there.
    """
    per_image = []
    for image_id, image, pred, gt in triples:
        accuracy, fnr = mask_pixel_metrics(pred, gt)
        err = None
        if gt.all():
            log.warning("%s: gt mask excludes everything; skipping ITA error", image_id)
        else:
            try:
                ita_pred = compute_ita(image, pred, cfg).ita_degrees
                ita_gt = compute_ita(image, gt, cfg).ita_degrees
                err = abs(ita_pred - ita_gt)
            except EmptyRegionError:
                log.warning(
                    "%s: predicted mask excludes everything; skipping ITA error",
                    image_id,
                )
        per_image.append(PerImageSeg(image_id, accuracy, fnr, err))
    if not per_image:
        raise ValueError("no evaluable pairs")
    errs = [p.ita_abs_error for p in per_image if p.ita_abs_error is not None]
    return SegQualityReport(
        pixel_accuracy=float(np.mean([p.accuracy for p in per_image])),
        false_negative_rate=float(np.mean([p.fnr for p in per_image])),
        ita_mae_degrees=float(np.mean(errs)) if errs else 0.0,
        n_images=len(per_image),
        per_image=per_image,
    )
