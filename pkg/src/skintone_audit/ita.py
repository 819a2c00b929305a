"""Per-image skin tone angle (ITA) estimation and categorization.

The tone angle of a pixel or region is atan2(L - 50, b) in degrees, where L
and b are CIELab coordinates. Per image, non-excluded pixels are converted to
Lab, trimmed to within ``trim_sigma`` standard deviations on L and b jointly,
and reduced to a single angle either from the trimmed channel means
(``mean_of_means``, default) or as the mean of per-pixel angles
(``mean_of_pixel_itas``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .colorimetry import grayscale, srgb_to_lab
from .errors import DegeneratePointError, DimensionMismatchError, EmptyRegionError


class SkinToneCategory(enum.Enum):
    """The eight tone bins, lightest first."""

    VERY_LIGHT = "very_lt"
    LIGHT_2 = "lt2"
    LIGHT_1 = "lt1"
    INTERMEDIATE_2 = "int2"
    INTERMEDIATE_1 = "int1"
    TANNED_2 = "tan2"
    TANNED_1 = "tan1"
    DARK = "dark"


CATEGORY_ORDER = list(SkinToneCategory)

# Upper bound of each bounded bin; lower bounds exclusive, upper inclusive.
# very_lt is everything above 55, dark everything at or below 10.
_BIN_UPPER = [55.0, 48.0, 41.0, 34.5, 28.0, 19.0, 10.0]


def categorize(ita_degrees: float) -> SkinToneCategory:
    """Map a finite tone angle to its category.

    Bin edges belong to the lower bin: 55 -> lt2, 48 -> lt1, ..., 10 -> dark.
    """
    if not math.isfinite(ita_degrees):
        raise ValueError("ita_degrees must be finite")
    for upper, cat in zip(_BIN_UPPER, CATEGORY_ORDER):
        if ita_degrees > upper:
            return cat
    return SkinToneCategory.DARK


def ita_from_lab(l: float, b: float) -> float:
    """Tone angle in degrees from Lab lightness and yellow component.

    Uses the two-argument arctangent so b <= 0 is well defined; the result
    lies in (-180, 180] and equals atan((l-50)/b) * 180/pi whenever b > 0.
    """
    if l == 50.0 and b == 0.0:
        raise DegeneratePointError("ITA undefined at L=50, b=0")
    return math.degrees(math.atan2(l - 50.0, b))


@dataclass
class ItaConfig:
    """Knobs for per-image tone estimation.

    mask_polarity: under ``white_excluded`` (the common public-dataset mask
    convention, lesion painted white) mask values >= ``mask_threshold`` mark
    excluded pixels; ``black_excluded`` flips that.
    """

    trim_mode: str = "mean_of_means"  # or "mean_of_pixel_itas"
    trim_sigma: float = 1.0
    mask_threshold: int = 128
    mask_polarity: str = "white_excluded"  # or "black_excluded"
    grayscale_mode: str = "rec601"  # or "mean"

    def __post_init__(self):
        if self.trim_mode not in ("mean_of_means", "mean_of_pixel_itas"):
            raise ValueError(f"unknown trim_mode: {self.trim_mode!r}")
        if self.trim_sigma <= 0:
            raise ValueError("trim_sigma must be positive")
        if self.mask_polarity not in ("white_excluded", "black_excluded"):
            raise ValueError(f"unknown mask_polarity: {self.mask_polarity!r}")
        if not 0 <= self.mask_threshold <= 255:
            raise ValueError("mask_threshold must be in [0, 255]")


@dataclass
class ItaEstimate:
    """Tone estimate for one image.

    Channel and grayscale statistics are over the untrimmed non-excluded
    pixels; only the angle itself uses the trimmed subset.
    """

    ita_degrees: float
    category: SkinToneCategory
    n_total: int
    n_retained: int
    mean_l: float
    mean_b: float
    std_l: float
    std_b: float
    mean_gray: float
    median_gray: float
    flags: list = field(default_factory=list)


def extract_nondiseased(image: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Pixels where the exclusion mask is False, in row-major order.

    ``image`` is (H, W, 3); ``mask`` is (H, W) boolean with True = excluded.
    """
    image = np.asarray(image)
    mask = np.asarray(mask, dtype=bool)
    if image.ndim != 3 or image.shape[-1] != 3:
        raise ValueError("image must have shape (H, W, 3)")
    if mask.shape != image.shape[:2]:
        raise DimensionMismatchError(
            f"mask shape {mask.shape} != image shape {image.shape[:2]}"
        )
    pixels = image.reshape(-1, 3)[~mask.reshape(-1)]
    if pixels.shape[0] == 0:
        raise EmptyRegionError("mask excludes every pixel")
    return pixels


def trim_mask(lab: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """Boolean retention mask of the one-sigma trimming rule.

    Pixel i is kept iff |L_i - mean_L| <= sigma * std_L and
    |b_i - mean_b| <= sigma * std_b, with mean and population standard
    deviation taken over the full input. A zero-variance channel imposes no
    condition. If the joint condition rejects everything (possible since the
    two channel conditions need not overlap), the single pixel with the
    smallest worst-channel normalized deviation is kept.
    """
    lab = np.asarray(lab, dtype=np.float64)
    if lab.ndim != 2 or lab.shape[0] == 0:
        raise ValueError("lab must be a nonempty (N, C) array")
    l = lab[:, 0]
    b = lab[:, -1]
    keep = np.ones(lab.shape[0], dtype=bool)
    dev = np.zeros(lab.shape[0], dtype=np.float64)
    # Inclusive boundary: a deviation mathematically equal to sigma*std must
    # be retained even when rounding lands it a few ulps above the threshold
    # (with two pixels every deviation sits exactly on the boundary).
    slack = 1.0 + 1e-12
    for chan in (l, b):
        std = chan.std()
        if std > 0.0:
            d = np.abs(chan - chan.mean())
            keep &= d <= sigma * std * slack
            dev = np.maximum(dev, d / (sigma * std))
    if not keep.any():
        keep[int(np.argmin(dev))] = True
    return keep


def trim_one_sigma(lab: np.ndarray, sigma: float = 1.0) -> np.ndarray:
    """Rows of ``lab`` retained by :func:`trim_mask`."""
    lab = np.asarray(lab, dtype=np.float64)
    return lab[trim_mask(lab, sigma)]


def threshold_mask(mask_values: np.ndarray, cfg: ItaConfig) -> np.ndarray:
    """8-bit grayscale mask values -> boolean exclusion mask."""
    mask_values = np.asarray(mask_values)
    excluded = mask_values >= cfg.mask_threshold
    if cfg.mask_polarity == "black_excluded":
        excluded = ~excluded
    return excluded


def compute_ita(
    image: np.ndarray, mask: np.ndarray, cfg: ItaConfig | None = None
) -> ItaEstimate:
    """Tone estimate of the non-excluded region of one image.

    ``mask`` is a boolean (H, W) array, True = excluded. Raises
    EmptyRegionError when everything is excluded and DegeneratePointError
    when the angle is undefined.
    """
    if cfg is None:
        cfg = ItaConfig()
    pixels = extract_nondiseased(image, mask)
    lab = srgb_to_lab(pixels)
    keep = trim_mask(lab, cfg.trim_sigma)
    trimmed = lab[keep]

    if cfg.trim_mode == "mean_of_means":
        ita = ita_from_lab(trimmed[:, 0].mean(), trimmed[:, 2].mean())
    else:
        ita = float(
            np.mean([ita_from_lab(l, b) for l, b in zip(trimmed[:, 0], trimmed[:, 2])])
        )

    gray = grayscale(pixels, cfg.grayscale_mode)
    return ItaEstimate(
        ita_degrees=ita,
        category=categorize(ita),
        n_total=int(pixels.shape[0]),
        n_retained=int(keep.sum()),
        mean_l=float(lab[:, 0].mean()),
        mean_b=float(lab[:, 2].mean()),
        std_l=float(lab[:, 0].std()),
        std_b=float(lab[:, 2].std()),
        mean_gray=float(gray.mean()),
        median_gray=float(np.median(gray)),
    )
