"""Batch tone audit over a dataset described by a manifest CSV.

The manifest lists one image per row (header
``image_id,image_path,mask_path,gt_mask_path,label``; optional columns may be
empty). Per-image failures are recorded as skips with a reason and never
abort the batch. Output ordering always equals manifest ordering regardless
of worker count.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import __version__
from .colorimetry import COLOR_PIPELINE_ID
from .errors import (
    DecodeError,
    DegeneratePointError,
    DimensionMismatchError,
    EmptyRegionError,
    SkinToneAuditError,
)
from .fairness import pearson
from .ita import CATEGORY_ORDER, ItaConfig, ItaEstimate, compute_ita, threshold_mask
from .svg import histogram_svg

ITA_CSV_HEADER = (
    "image_id,ita_degrees,category,n_total,n_retained,"
    "mean_l,mean_b,std_l,std_b,mean_gray,median_gray,flags"
)


@dataclass
class ManifestEntry:
    image_id: str
    image_path: str
    mask_path: str | None = None
    gt_mask_path: str | None = None
    label: str | None = None


@dataclass
class DistributionReport:
    counts: dict  # abbreviation -> count, in lightest-first order
    fractions: dict
    total: int
    skipped: list  # (image_id, reason)
    config: dict


def read_manifest(path) -> list[ManifestEntry]:
    entries = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(row for row in f if not row.startswith("#"))
        if reader.fieldnames is None or "image_id" not in reader.fieldnames:
            raise SkinToneAuditError(f"{path}: not a manifest CSV (missing header)")
        for row in reader:
            entries.append(
                ManifestEntry(
                    image_id=row["image_id"],
                    image_path=row.get("image_path") or "",
                    mask_path=row.get("mask_path") or None,
                    gt_mask_path=row.get("gt_mask_path") or None,
                    label=row.get("label") or None,
                )
            )
    seen = set()
    for e in entries:
        if e.image_id in seen:
            raise SkinToneAuditError(f"duplicate image_id in manifest: {e.image_id}")
        seen.add(e.image_id)
    return entries


def load_image(path) -> np.ndarray:
    """Decode an 8-bit PNG or JPEG as an (H, W, 3) uint8 array."""
    try:
        with Image.open(path) as img:
            if img.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{path}: unsupported format {img.format}")
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def load_mask(path, cfg: ItaConfig) -> np.ndarray:
    """Decode an 8-bit grayscale PNG mask as a boolean exclusion array."""
    try:
        with Image.open(path) as img:
            if img.format != "PNG":
                raise DecodeError(f"{path}: mask must be PNG, got {img.format}")
            values = np.asarray(img.convert("L"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    return threshold_mask(values, cfg)


def config_echo(cfg: ItaConfig, midpoints=None) -> dict:
    from .fairness import DEFAULT_MIDPOINTS

    mp = DEFAULT_MIDPOINTS if midpoints is None else midpoints
    return {
        "version": __version__,
        "color_pipeline": COLOR_PIPELINE_ID,
        "trim_mode": cfg.trim_mode,
        "trim_sigma": cfg.trim_sigma,
        "mask_threshold": cfg.mask_threshold,
        "mask_polarity": cfg.mask_polarity,
        "grayscale_mode": cfg.grayscale_mode,
        "midpoints": {c.value: mp[c] for c in CATEGORY_ORDER},
    }


def _audit_one(entry: ManifestEntry, cfg: ItaConfig):
    """Returns (image_id, ItaEstimate | None, reason | None)."""
    try:
        image = load_image(entry.image_path)
        if entry.mask_path:
            mask = load_mask(entry.mask_path, cfg)
            if mask.shape != image.shape[:2]:
                raise DimensionMismatchError(
                    f"mask {mask.shape} vs image {image.shape[:2]}"
                )
            flags = []
        else:
            mask = np.zeros(image.shape[:2], dtype=bool)
            flags = ["no_mask"]
        est = compute_ita(image, mask, cfg)
        est.flags = flags
        return entry.image_id, est, None
    except (DecodeError, DimensionMismatchError, EmptyRegionError,
            DegeneratePointError) as exc:
        return entry.image_id, None, str(exc)


def run_audit(
    manifest: list[ManifestEntry], cfg: ItaConfig | None = None, workers: int = 1
):
    """Compute a tone estimate per manifest entry plus a distribution report.

    Returns (ordered dict image_id -> ItaEstimate, DistributionReport).
    """
    if cfg is None:
        cfg = ItaConfig()
    if workers > 1 and manifest:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda e: _audit_one(e, cfg), manifest))
    else:
        results = [_audit_one(e, cfg) for e in manifest]

    estimates: dict[str, ItaEstimate] = {}
    skipped = []
    counts = {c.value: 0 for c in CATEGORY_ORDER}
    for image_id, est, reason in results:
        if est is None:
            skipped.append((image_id, reason))
        else:
            estimates[image_id] = est
            counts[est.category.value] += 1
    n_ok = len(estimates)
    fractions = {
        k: (v / n_ok if n_ok else 0.0) for k, v in counts.items()
    }
    report = DistributionReport(
        counts=counts,
        fractions=fractions,
        total=len(manifest),
        skipped=skipped,
        config=config_echo(cfg),
    )
    return estimates, report


def correlation_report(estimates) -> tuple[float, float]:
    """Pearson r of tone angle vs mean grayscale and vs median grayscale."""
    ests = list(estimates.values()) if isinstance(estimates, dict) else list(estimates)
    if len(ests) < 2:
        raise ValueError("need at least 2 estimates")
    ita = [e.ita_degrees for e in ests]
    r_mean = pearson(ita, [e.mean_gray for e in ests])
    r_median = pearson(ita, [e.median_gray for e in ests])
    return r_mean, r_median


def _config_comment(cfg_dict: dict) -> str:
    return "# config " + json.dumps(cfg_dict, sort_keys=True)


def write_ita_csv(estimates: dict, path, cfg: ItaConfig) -> None:
    """One row per image; floats at 6 decimal places; leading ``#`` comment
    line carries the effective config and version."""
    buf = io.StringIO()
    buf.write(_config_comment(config_echo(cfg)) + "\n")
    buf.write(ITA_CSV_HEADER + "\n")
    for image_id, e in estimates.items():
        fields = [
            image_id,
            f"{e.ita_degrees:.6f}",
            e.category.value,
            str(e.n_total),
            str(e.n_retained),
            f"{e.mean_l:.6f}",
            f"{e.mean_b:.6f}",
            f"{e.std_l:.6f}",
            f"{e.std_b:.6f}",
            f"{e.mean_gray:.6f}",
            f"{e.median_gray:.6f}",
            ";".join(e.flags),
        ]
        buf.write(",".join(fields) + "\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_ita_csv(path) -> dict[str, float]:
    """image_id -> tone angle from a results CSV (comments skipped)."""
    out = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(row for row in f if not row.startswith("#"))
        for row in reader:
            out[row["image_id"]] = float(row["ita_degrees"])
    return out


def report_to_json(report: DistributionReport) -> str:
    """Fixed-key-order JSON for a distribution report."""
    doc = {
        "total": report.total,
        "counts": report.counts,
        "fractions": report.fractions,
        "skipped": [{"image_id": i, "reason": r} for i, r in report.skipped],
        "config": report.config,
    }
    return json.dumps(doc, indent=2) + "\n"


def write_report_json(report: DistributionReport, path) -> None:
    Path(path).write_text(report_to_json(report), encoding="utf-8")


def emit_histogram_svg(report: DistributionReport, path) -> None:
    svg = histogram_svg(
        report.counts,
        title="Skin tone distribution",
        comment=json.dumps(report.config, sort_keys=True),
    )
    Path(path).write_text(svg, encoding="utf-8")
