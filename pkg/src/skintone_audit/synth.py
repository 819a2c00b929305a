"""Synthetic skin-like datasets with planted ground truth.

Images are a constant base color (chosen in Lab, snapped to the nearest
representable 8-bit sRGB value) plus optional i.i.d. Lab-space Gaussian
noise and an optional elliptical lesion; the ground-truth mask excludes
exactly the lesion. Noise is applied in Lab space so the induced tone-angle
noise is approximately unbiased.

Everything is seed-deterministic: per-image generators are derived from
(seed, image index), so results do not depend on scheduling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .colorimetry import lab_to_srgb, srgb_to_lab
from .errors import UnrepresentableColorError
from .fairness import PredictionRecord
from .ita import SkinToneCategory, categorize, ita_from_lab


@dataclass
class LesionSpec:
    color: tuple = (90, 45, 40)  # sRGB lesion fill
    min_axis_frac: float = 0.1  # ellipse semi-axes as fraction of image size
    max_axis_frac: float = 0.3


@dataclass
class AccuracyModel:
    """Probability that the planted classifier is correct, as a function of
    tone: either a per-bin table or linear in the angle (clamped to [0, 1])."""

    per_bin: dict | None = None  # SkinToneCategory -> probability
    slope: float | None = None  # probability per degree
    intercept: float | None = None

    def prob_correct(self, ita_degrees: float) -> float:
        if self.per_bin is not None:
            return float(np.clip(self.per_bin[categorize(ita_degrees)], 0.0, 1.0))
        return float(np.clip(self.intercept + self.slope * ita_degrees, 0.0, 1.0))


@dataclass
class SynthSpec:
    n_images: int
    base_lab_choices: list  # (L, b) or (L, b, weight) tuples
    a_const: float = 12.0
    noise_sigma_lab: float = 0.0
    image_size: tuple = (32, 32)  # (height, width)
    lesion: LesionSpec | None = None
    label_set: list = field(default_factory=lambda: ["benign", "malignant"])
    seed: int = 0


@dataclass
class TruthRecord:
    image_id: str
    ita_degrees: float
    category: SkinToneCategory
    base_l: float
    base_b: float
    label: str


def snap_base_color(l: float, b: float, a_const: float):
    """Nearest representable 8-bit sRGB color for a requested Lab base.

    Returns (rgb uint8 triple, effective Lab triple). Raises when the
    requested color falls outside the sRGB gamut.
    """
    rgb, in_gamut = lab_to_srgb([l, a_const, b])
    if not bool(in_gamut):
        raise UnrepresentableColorError(
            f"Lab ({l}, {a_const}, {b}) is outside the sRGB gamut"
        )
    rgb = rgb.astype(np.uint8)
    return tuple(int(v) for v in rgb), tuple(float(v) for v in srgb_to_lab(rgb))


def _base_weights(spec: SynthSpec) -> np.ndarray:
    w = np.array([c[2] if len(c) > 2 else 1.0 for c in spec.base_lab_choices])
    return w / w.sum()


def generate_image(spec: SynthSpec, index: int):
    """One synthetic (image, exclusion mask, TruthRecord) triple."""
    rng = np.random.default_rng([spec.seed, index])
    h, w = spec.image_size

    choice = rng.choice(len(spec.base_lab_choices), p=_base_weights(spec))
    l_req, b_req = spec.base_lab_choices[choice][:2]
    base_rgb, (l_eff, _, b_eff) = snap_base_color(l_req, b_req, spec.a_const)

    if spec.noise_sigma_lab > 0:
        lab = np.empty((h, w, 3))
        lab[:] = srgb_to_lab(np.array(base_rgb))
        lab += rng.normal(0.0, spec.noise_sigma_lab, size=(h, w, 3))
        image, _ = lab_to_srgb(lab)
        image = image.astype(np.uint8)
    else:
        image = np.empty((h, w, 3), dtype=np.uint8)
        image[:] = base_rgb

    mask = np.zeros((h, w), dtype=bool)
    if spec.lesion is not None:
        les = spec.lesion
        cy = rng.uniform(0.3, 0.7) * h
        cx = rng.uniform(0.3, 0.7) * w
        ry = rng.uniform(les.min_axis_frac, les.max_axis_frac) * h
        rx = rng.uniform(les.min_axis_frac, les.max_axis_frac) * w
        yy, xx = np.mgrid[0:h, 0:w]
        mask = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
        image[mask] = les.color

    label = spec.label_set[rng.integers(len(spec.label_set))]
    ita = ita_from_lab(l_eff, b_eff)
    truth = TruthRecord(
        image_id=f"synth_{index:05d}",
        ita_degrees=ita,
        category=categorize(ita),
        base_l=l_eff,
        base_b=b_eff,
        label=label,
    )
    return image, mask, truth


def generate_dataset(spec: SynthSpec, out_dir=None):
    """All images/masks/truths for a spec; optionally persisted to disk.

    When ``out_dir`` is given, writes ``images/<id>.png``, ``masks/<id>.png``
    (excluded pixels white), ``manifest.csv`` and ``truth.csv``.
    """
    images, masks, truths = [], [], []
    for i in range(spec.n_images):
        image, mask, truth = generate_image(spec, i)
        images.append(image)
        masks.append(mask)
        truths.append(truth)

    if out_dir is not None:
        out = Path(out_dir)
        (out / "images").mkdir(parents=True, exist_ok=True)
        (out / "masks").mkdir(parents=True, exist_ok=True)
        rows = []
        for image, mask, truth in zip(images, masks, truths):
            img_path = out / "images" / f"{truth.image_id}.png"
            mask_path = out / "masks" / f"{truth.image_id}.png"
            Image.fromarray(image).save(img_path)
            Image.fromarray(mask.astype(np.uint8) * 255).save(mask_path)
            rows.append(
                (truth.image_id, str(img_path), str(mask_path), "", truth.label)
            )
        with open(out / "manifest.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["image_id", "image_path", "mask_path", "gt_mask_path", "label"])
            writer.writerows(rows)
        with open(out / "truth.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["image_id", "ita_degrees", "category", "base_l", "base_b", "label"])
            for t in truths:
                writer.writerow(
                    [t.image_id, f"{t.ita_degrees:.6f}", t.category.value,
                     f"{t.base_l:.6f}", f"{t.base_b:.6f}", t.label]
                )
    return images, masks, truths


def generate_predictions(
    truths, model: AccuracyModel, n_splits: int, label_set, seed: int = 0
) -> list[PredictionRecord]:
    """Planted classifier outputs: correct with probability p(tone angle),
    otherwise a uniformly random wrong label."""
    if n_splits < 1:
        raise ValueError("n_splits must be >= 1")
    label_set = list(label_set)
    rng = np.random.default_rng([seed, 7])
    probs = np.array([model.prob_correct(t.ita_degrees) for t in truths])
    correct = rng.random((len(truths), n_splits)) < probs[:, None]
    wrong_pick = rng.integers(0, max(len(label_set) - 1, 1), size=(len(truths), n_splits))

    records = []
    label_index = {lbl: i for i, lbl in enumerate(label_set)}
    for i, t in enumerate(truths):
        if t.label not in label_index:
            raise ValueError(f"truth label {t.label!r} not in the declared label set")
        true_idx = label_index[t.label]
        others = [lbl for j, lbl in enumerate(label_set) if j != true_idx]
        for s in range(n_splits):
            if correct[i, s] or not others:
                pred = t.label
            else:
                pred = others[wrong_pick[i, s] % len(others)]
            records.append(
                PredictionRecord(
                    image_id=t.image_id,
                    split_id=f"split_{s:02d}",
                    true_label=t.label,
                    predicted_label=pred,
                )
            )
    return records
