"""Walkthrough: audit the tone distribution of a synthetic dataset.

Generates a small dataset with a planted mix of skin tones, runs the batch
audit, and writes the distribution report plus the histogram SVG.

Run: python3 demos/02_dataset_audit.py  (outputs under ./demo_out/audit)
"""

from pathlib import Path

from skintone_audit.audit import (
    correlation_report,
    emit_histogram_svg,
    read_manifest,
    run_audit,
    write_ita_csv,
    write_report_json,
)
from skintone_audit.ita import ItaConfig
from skintone_audit.synth import LesionSpec, SynthSpec, generate_dataset

out = Path("demo_out/audit")
out.mkdir(parents=True, exist_ok=True)

spec = SynthSpec(
    n_images=120,
    # (L, b, weight): mostly light tones, a darker minority - the shape of
    # mix the audit is meant to expose
    base_lab_choices=[(72.0, 12.0, 0.5), (62.0, 22.0, 0.3), (52.0, 30.0, 0.2)],
    noise_sigma_lab=1.5,
    lesion=LesionSpec(),
    image_size=(48, 48),
    seed=2024,
)
generate_dataset(spec, out / "dataset")

manifest = read_manifest(out / "dataset" / "manifest.csv")
estimates, report = run_audit(manifest, ItaConfig(), workers=4)

print(f"audited {len(estimates)} images; per-category counts:")
for cat, count in report.counts.items():
    bar = "#" * count
    print(f"  {cat:>8} {count:4d} {bar}")

r_mean, r_median = correlation_report(estimates)
print(f"\ntone angle vs grayscale: r(mean)={r_mean:.3f} r(median)={r_median:.3f}")

write_ita_csv(estimates, out / "ita_results.csv", ItaConfig())
write_report_json(report, out / "distribution.json")
emit_histogram_svg(report, out / "distribution.svg")
print(f"\nwrote ita_results.csv, distribution.json, distribution.svg to {out}")
