"""Walkthrough: from sRGB pixels to a skin tone category.

Run: python3 demos/01_tone_estimation.py
"""

import numpy as np

from skintone_audit import ItaConfig, compute_ita, ita_from_lab, srgb_to_lab

# A single pixel: convert to CIELab, then take the tone angle from the
# lightness (L) and yellow (b) coordinates.
pixel = (224, 172, 148)  # a light skin-like color
l, a, b = srgb_to_lab(pixel)
print(f"sRGB {pixel} -> Lab L={l:.2f} a={a:.2f} b={b:.2f}")
print(f"tone angle = atan2(L-50, b) = {ita_from_lab(l, b):.2f} degrees")

# A whole image: a skin-colored background with a dark lesion blob. The
# exclusion mask marks the lesion so only non-diseased skin is measured.
image = np.full((64, 64, 3), pixel, dtype=np.uint8)
image[20:40, 20:44] = (95, 52, 46)
mask = np.zeros((64, 64), dtype=bool)
mask[20:40, 20:44] = True

with_mask = compute_ita(image, mask)
without_mask = compute_ita(image, np.zeros_like(mask))
print(f"\nwith lesion masked out : {with_mask.ita_degrees:7.2f} deg "
      f"-> {with_mask.category.value}")
# Without a mask the one-sigma trim still rejects the lesion pixels here,
# because they sit far from the mean on both L and b.
print(f"no mask, trim rescues  : {without_mask.ita_degrees:7.2f} deg "
      f"-> {without_mask.category.value} "
      f"(kept {without_mask.n_retained} of {without_mask.n_total} pixels)")

# The two reductions supported: angle of the trimmed channel means (default)
# versus mean of per-pixel angles. They agree exactly on uniform regions.
for mode in ("mean_of_means", "mean_of_pixel_itas"):
    est = compute_ita(image, mask, ItaConfig(trim_mode=mode))
    print(f"{mode:>20}: {est.ita_degrees:.4f} deg")
