"""Command-line entry point.

Subcommands: ``ita`` (dataset tone audit), ``segeval`` (mask quality),
``fairness`` (per-bin classifier accuracy + trend), ``synth`` (synthetic
dataset generation), ``correlate`` (tone vs grayscale correlation).

Exit codes: 0 success (warnings allowed), 1 usage error, 2 data error,
3 internal error. Fatal errors print a machine-readable JSON object to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .audit import (
    config_echo,
    emit_histogram_svg,
    read_ita_csv,
    read_manifest,
    load_image,
    load_mask,
    run_audit,
    write_ita_csv,
    write_report_json,
)
from .config import load_run_config, parse_kv_file
from .errors import SkinToneAuditError
from .fairness import (
    PredictionRecord,
    overall_accuracy,
    per_bin_accuracy,
    pearson,
    trend_fit,
    trend_points,
)
from .ita import SkinToneCategory
from .seg_eval import evaluate_segmentation
from .svg import accuracy_vs_ita_svg
from .synth import AccuracyModel, LesionSpec, SynthSpec, generate_dataset, generate_predictions

PREDICTIONS_HEADER = "image_id,split_id,true_label,predicted_label"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"usage error: {message}\n")


def _read_predictions(path) -> list[PredictionRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(row for row in f if not row.startswith("#"))
        required = {"image_id", "split_id", "true_label", "predicted_label"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise SkinToneAuditError(f"{path}: expected header {PREDICTIONS_HEADER}")
        for row in reader:
            records.append(
                PredictionRecord(
                    row["image_id"], row["split_id"],
                    row["true_label"], row["predicted_label"],
                )
            )
    return records


def _overrides(args) -> dict:
    return {
        "trim_mode": args.trim_mode,
        "mask_polarity": args.mask_polarity,
        "out_dir": args.out_dir,
        "workers": args.workers,
        "seed": args.seed,
    }


def cmd_ita(args) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    manifest = read_manifest(args.manifest)
    estimates, report = run_audit(manifest, cfg.ita_config(), workers=cfg.workers)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_ita_csv(estimates, out / "ita_results.csv", cfg.ita_config())
    write_report_json(report, out / "distribution.json")
    emit_histogram_svg(report, out / "distribution.svg")
    for image_id, reason in report.skipped:
        print(f"warning: skipped {image_id}: {reason}", file=sys.stderr)
    print(f"audited {len(estimates)} images ({len(report.skipped)} skipped)")
    return 0


def cmd_segeval(args) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    ita_cfg = cfg.ita_config()
    manifest = read_manifest(args.manifest)
    triples = []
    for e in manifest:
        if not e.mask_path or not e.gt_mask_path:
            continue
        image = load_image(e.image_path)
        triples.append(
            (e.image_id, image, load_mask(e.mask_path, ita_cfg),
             load_mask(e.gt_mask_path, ita_cfg))
        )
    if not triples:
        raise SkinToneAuditError("no evaluable pairs")
    report = evaluate_segmentation(triples, ita_cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "pixel_accuracy": report.pixel_accuracy,
        "false_negative_rate": report.false_negative_rate,
        "ita_mae_degrees": report.ita_mae_degrees,
        "n_images": report.n_images,
        "aggregation": "per_image_mean",
        "config": config_echo(ita_cfg, cfg.midpoints),
    }
    (out / "seg_quality.json").write_text(json.dumps(doc, indent=2) + "\n")
    lines = ["# config " + json.dumps(config_echo(ita_cfg, cfg.midpoints), sort_keys=True),
             "image_id,accuracy,fnr,ita_abs_error"]
    for p in report.per_image:
        err = "" if p.ita_abs_error is None else f"{p.ita_abs_error:.6f}"
        lines.append(f"{p.image_id},{p.accuracy:.6f},{p.fnr:.6f},{err}")
    (out / "seg_per_image.csv").write_text("\n".join(lines) + "\n")
    print(
        f"accuracy {report.pixel_accuracy:.4f}  fnr {report.false_negative_rate:.4f}  "
        f"ita_mae {report.ita_mae_degrees:.4f} deg over {report.n_images} images"
    )
    return 0


def cmd_fairness(args) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    preds = _read_predictions(args.predictions)
    ita_by_image = read_ita_csv(args.ita_results)
    per_bin = per_bin_accuracy(preds, ita_by_image)
    points = trend_points(per_bin, cfg.midpoints)
    weights = None
    if cfg.weighted_trend:
        weights = [b.n for b in per_bin if b.mean_accuracy is not None]
    fit = trend_fit(points, weights=weights)
    echo = config_echo(cfg.ita_config(), cfg.midpoints)

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["# config " + json.dumps(echo, sort_keys=True),
             "category,n,mean_accuracy,std_error,n_splits"]
    for b in per_bin:
        if b.mean_accuracy is None:
            lines.append(f"{b.category.value},0,,,0")
        else:
            lines.append(
                f"{b.category.value},{b.n},{b.mean_accuracy:.6f},"
                f"{b.std_error:.6f},{len(b.per_split)}"
            )
    (out / "per_bin_accuracy.csv").write_text("\n".join(lines) + "\n")

    doc = {
        "overall_accuracy": overall_accuracy(preds),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "ci95_low": fit.ci95_low,
        "ci95_high": fit.ci95_high,
        "n_points": fit.n_points,
        "midpoints_used": fit.midpoints_used,
        "weighted": cfg.weighted_trend,
        "config": echo,
    }
    (out / "trend.json").write_text(json.dumps(doc, indent=2) + "\n")

    errors = [b.std_error for b in per_bin if b.mean_accuracy is not None]
    svg = accuracy_vs_ita_svg(
        points, errors=errors, fit=fit,
        comment=json.dumps(echo, sort_keys=True),
    )
    (out / "accuracy_vs_ita.svg").write_text(svg)
    print(f"slope {fit.slope:+.6f}/deg  ci95 [{fit.ci95_low:+.6f}, {fit.ci95_high:+.6f}]")
    return 0


def cmd_correlate(args) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    rows = []
    with open(args.ita_results, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(r for r in f if not r.startswith("#"))
        for row in reader:
            rows.append(row)
    if len(rows) < 2:
        raise SkinToneAuditError("need at least 2 estimates to correlate")
    ita = [float(r["ita_degrees"]) for r in rows]
    r_mean = pearson(ita, [float(r["mean_gray"]) for r in rows])
    r_median = pearson(ita, [float(r["median_gray"]) for r in rows])
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "r_mean_gray": r_mean,
        "r_median_gray": r_median,
        "n_images": len(rows),
        "config": config_echo(cfg.ita_config(), cfg.midpoints),
    }
    (out / "correlation.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"r(ita, mean gray) {r_mean:.4f}  r(ita, median gray) {r_median:.4f}")
    return 0


def _synth_spec_from_file(path, seed_override=None) -> tuple[SynthSpec, dict]:
    kv = parse_kv_file(path)
    base = []
    for part in kv.get("base_lab", "65:15").split(";"):
        nums = [float(v) for v in part.split(":")]
        base.append(tuple(nums))
    lesion = None
    if kv.get("lesion", "false").lower() in ("1", "true", "yes"):
        color = tuple(int(v) for v in kv.get("lesion_color", "90,45,40").split(","))
        lesion = LesionSpec(color=color)
    spec = SynthSpec(
        n_images=int(kv.get("n_images", "10")),
        base_lab_choices=base,
        a_const=float(kv.get("a_const", "12.0")),
        noise_sigma_lab=float(kv.get("noise_sigma_lab", "0.0")),
        image_size=(int(kv.get("image_height", "32")), int(kv.get("image_width", "32"))),
        lesion=lesion,
        label_set=[s.strip() for s in kv.get("labels", "benign,malignant").split(",")],
        seed=int(kv["seed"]) if "seed" in kv else 0,
    )
    if seed_override is not None:
        spec.seed = seed_override
    return spec, kv


def cmd_synth(args) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    spec, kv = _synth_spec_from_file(args.spec, args.seed)
    out = Path(cfg.out_dir)
    _, _, truths = generate_dataset(spec, out)
    if "accuracy_slope" in kv or "accuracy_per_bin" in kv:
        if "accuracy_per_bin" in kv:
            table = {}
            for part in kv["accuracy_per_bin"].split(";"):
                name, p = part.split(":")
                table[SkinToneCategory(name.strip())] = float(p)
            model = AccuracyModel(per_bin=table)
        else:
            model = AccuracyModel(
                slope=float(kv["accuracy_slope"]),
                intercept=float(kv.get("accuracy_intercept", "0.7")),
            )
        records = generate_predictions(
            truths, model, int(kv.get("n_splits", "1")), spec.label_set, seed=spec.seed
        )
        lines = [PREDICTIONS_HEADER]
        lines += [
            f"{r.image_id},{r.split_id},{r.true_label},{r.predicted_label}"
            for r in records
        ]
        (out / "predictions.csv").write_text("\n".join(lines) + "\n")
    print(f"generated {len(truths)} synthetic images in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skintone-audit", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out-dir", default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--trim-mode", choices=["mean_of_means", "mean_of_pixel_itas"])
        p.add_argument("--mask-polarity", choices=["white_excluded", "black_excluded"])
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("ita", help="tone audit over a manifest")
    p.add_argument("--manifest", required=True)
    common(p)
    p.set_defaults(func=cmd_ita)

    p = sub.add_parser("segeval", help="score predicted masks against ground truth")
    p.add_argument("--manifest", required=True)
    common(p)
    p.set_defaults(func=cmd_segeval)

    p = sub.add_parser("fairness", help="per-bin classifier accuracy and trend")
    p.add_argument("--predictions", required=True)
    p.add_argument("--ita-results", required=True)
    common(p)
    p.set_defaults(func=cmd_fairness)

    p = sub.add_parser("correlate", help="tone vs grayscale correlation")
    p.add_argument("--ita-results", required=True)
    common(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--spec", required=True, help="flat key = value synth spec")
    common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SkinToneAuditError, FileNotFoundError, ValueError) as exc:
        print(
            json.dumps({"error": str(exc), "type": type(exc).__name__}),
            file=sys.stderr,
        )
        return 2
    except Exception as exc:  # pragma: no cover
        print(
            json.dumps({"error": str(exc), "type": type(exc).__name__}),
            file=sys.stderr,
        )
        return 3


if __name__ == "__main__":
    sys.exit(main())
