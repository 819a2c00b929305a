"""sRGB to CIELab and grayscale conversion.

Fixed pipeline: sRGB decode per IEC 61966-2-1 (piecewise gamma, exponent 2.4,
threshold 0.04045), linear RGB -> XYZ under the D65 white point
(Xn=0.95047, Yn=1.0, Zn=1.08883), then the standard CIE f(t) with delta=6/29.
All math is double precision.

Every function accepts either a single (r, g, b) triple or an array whose
last axis has length 3, and vectorizes over leading axes.
"""

from __future__ import annotations

import numpy as np

# Linear sRGB -> XYZ (D65), IEC 61966-2-1
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)

# Row sums equal (0.95047, 1.0, 1.08883) up to 1e-7; normalizing the white
# point to the matrix keeps the gray axis exactly neutral (a = b = 0).
D65_WHITE = _RGB_TO_XYZ.sum(axis=1)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)

_DELTA = 6.0 / 29.0

REC601_WEIGHTS = np.array([0.299, 0.587, 0.114])

COLOR_PIPELINE_ID = "srgb-iec61966/d65/cielab"


def _srgb_decode(v):
    """Gamma-encoded channel in [0, 1] -> linear-light value."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def _srgb_encode(v):
    """Linear-light channel -> gamma-encoded value in [0, 1]."""
    v = np.asarray(v, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1.0 / 2.4) - 0.055)


def _lab_f(t):
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3.0 * _DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(ft):
    return np.where(ft > _DELTA, ft**3, 3.0 * _DELTA**2 * (ft - 4.0 / 29.0))


def srgb_to_lab(rgb):
    """Convert 8-bit sRGB values to CIELab (D65).

    Parameters
    ----------
    rgb : array_like, shape (..., 3)
        Channel values in [0, 255].

    Returns
    -------
    ndarray, shape (..., 3)
        L in [0, 100], a and b opponent values.
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ValueError("last axis must have length 3")
    linear = _srgb_decode(rgb / 255.0)
    xyz = linear @ _RGB_TO_XYZ.T
    f = _lab_f(xyz / D65_WHITE)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_srgb(lab, clip: bool = True):
    """Invert :func:`srgb_to_lab`.

    Returns
    -------
    rgb : ndarray, shape (..., 3)
        Real-valued channels; rounded and clipped to [0, 255] when ``clip``.
    in_gamut : ndarray of bool, shape (...)
        True where the unclipped result lies within [0, 255] on all channels
        (half-unit rounding slack).
    """
    lab = np.asarray(lab, dtype=np.float64)
    if lab.shape[-1] != 3:
        raise ValueError("last axis must have length 3")
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    xyz = np.stack([_lab_f_inv(fx), _lab_f_inv(fy), _lab_f_inv(fz)], axis=-1)
    xyz = xyz * D65_WHITE
    linear = xyz @ _XYZ_TO_RGB.T
    rgb = _srgb_encode(linear) * 255.0
    in_gamut = np.all((rgb > -0.5) & (rgb < 255.5) & np.isfinite(rgb), axis=-1)
    if clip:
        rgb = np.clip(np.rint(np.nan_to_num(rgb)), 0.0, 255.0)
    return rgb, in_gamut


def grayscale(rgb, mode: str = "rec601"):
    """Grayscale value of 8-bit sRGB pixels, in [0, 255].

    ``mode`` is ``"rec601"`` (luma 0.299 r + 0.587 g + 0.114 b, the default)
    or ``"mean"`` (plain channel mean).
    """
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.shape[-1] != 3:
        raise ValueError("last axis must have length 3")
    if mode == "rec601":
        return rgb @ REC601_WEIGHTS
    if mode == "mean":
        return rgb.mean(axis=-1)
    raise ValueError(f"unknown grayscale mode: {mode!r}")
