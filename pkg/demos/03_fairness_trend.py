"""Walkthrough: per-tone-bin classifier accuracy and the trend line.

Plants a classifier whose accuracy degrades linearly with tone angle, then
shows the per-bin accuracy table recovering the planted rates and the OLS
trend fit recovering the planted slope with its 95% confidence interval.

Run: python3 demos/03_fairness_trend.py
"""

from skintone_audit.fairness import (
    DEFAULT_MIDPOINTS,
    overall_accuracy,
    per_bin_accuracy,
    trend_fit,
    trend_points,
)
from skintone_audit.ita import CATEGORY_ORDER, categorize
from skintone_audit.synth import AccuracyModel, TruthRecord, generate_predictions

PLANTED_SLOPE = -0.002  # accuracy per degree: darker bins do slightly better
INTERCEPT = 0.75

# 500 images per bin, pinned at the bin midpoints
truths = []
for cat in CATEGORY_ORDER:
    mid = DEFAULT_MIDPOINTS[cat]
    for k in range(500):
        truths.append(
            TruthRecord(f"{cat.value}_{k:04d}", mid, categorize(mid), 0, 0, "nevus")
        )

model = AccuracyModel(slope=PLANTED_SLOPE, intercept=INTERCEPT)
records = generate_predictions(
    truths, model, n_splits=10, label_set=["nevus", "melanoma", "bcc"], seed=7
)
print(f"{len(records)} prediction records, "
      f"overall accuracy {overall_accuracy(records):.3f}")

itas = {t.image_id: t.ita_degrees for t in truths}
per_bin = per_bin_accuracy(records, itas)
print("\n  bin      midpoint  planted  measured  std err")
for b in per_bin:
    mid = DEFAULT_MIDPOINTS[b.category]
    planted = INTERCEPT + PLANTED_SLOPE * mid
    print(f"  {b.category.value:>8} {mid:7.2f}  {planted:.3f}    "
          f"{b.mean_accuracy:.3f}    {b.std_error:.4f}")

fit = trend_fit(trend_points(per_bin))
print(f"\nfitted slope {fit.slope:+.5f}/deg "
      f"(planted {PLANTED_SLOPE:+.5f}), "
      f"95% CI [{fit.ci95_low:+.5f}, {fit.ci95_high:+.5f}]")
