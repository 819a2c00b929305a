"""Acceptance suite: one test per release criterion, each printing a
PASS line when it completes (run with ``pytest -s`` to see them inline).
"""

import json
import math

import numpy as np
import pytest
from scipy import stats

from skintone_audit.cli import main as cli_main
from skintone_audit.colorimetry import lab_to_srgb, srgb_to_lab
from skintone_audit.fairness import (
    DEFAULT_MIDPOINTS,
    PredictionRecord,
    balanced_accuracy,
    overall_accuracy,
    pearson,
    per_bin_accuracy,
    trend_fit,
    trend_points,
)
from skintone_audit.ita import (
    CATEGORY_ORDER,
    ItaConfig,
    categorize,
    compute_ita,
    ita_from_lab,
)
from skintone_audit.seg_eval import ita_mae, mask_pixel_metrics
from skintone_audit.synth import (
    AccuracyModel,
    LesionSpec,
    SynthSpec,
    TruthRecord,
    generate_dataset,
    generate_predictions,
)

from oracles import compute_ita_scalar


def _ok(n, text):
    print(f"ACCEPTANCE {n}: PASS - {text}")


def test_criterion_1_ita_formula_and_boundaries():
    assert ita_from_lab(50.0, 7.0) == pytest.approx(0.0, abs=1e-9)
    assert ita_from_lab(60.0, 10.0) == pytest.approx(45.0, abs=1e-9)
    assert ita_from_lab(70.0, 0.0) == pytest.approx(90.0, abs=1e-9)
    boundaries = [
        (56.0, "very_lt"), (55.0, "lt2"), (48.0, "lt1"), (41.0, "int2"),
        (34.5, "int1"), (28.0, "tan2"), (19.0, "tan1"), (10.0, "dark"),
    ]
    for angle, want in boundaries:
        assert categorize(angle).value == want, (angle, want)
    _ok(1, "ITA formula unit suite and all 8 bin boundaries")


def test_criterion_2_colorimetry():
    l, a, b = srgb_to_lab((255, 255, 255))
    assert l == pytest.approx(100.0, abs=1e-6)
    assert abs(a) < 0.01 and abs(b) < 0.01
    assert np.allclose(srgb_to_lab((0, 0, 0)), 0.0)
    grays = np.stack([np.arange(256)] * 3, axis=-1)
    lab = srgb_to_lab(grays)
    assert np.all(np.abs(lab[:, 1]) < 0.01)
    assert np.all(np.abs(lab[:, 2]) < 0.01)
    back, in_gamut = lab_to_srgb(lab)
    assert in_gamut.all()
    assert np.max(np.abs(back - grays)) <= 1
    _ok(2, "white/black/gray-axis colorimetry and gray round-trip within 1 unit")


def test_criterion_3_brute_force_oracle_equivalence():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        h, w = rng.integers(1, 9, 2)
        img = rng.integers(0, 256, (h, w, 3)).astype(np.uint8)
        mask = rng.random((h, w)) < 0.4
        if mask.all():
            mask[0, 0] = False
        pixels = [tuple(int(v) for v in p)
                  for p in img.reshape(-1, 3)[~mask.reshape(-1)]]
        for mode in ("mean_of_means", "mean_of_pixel_itas"):
            est = compute_ita(img, mask, ItaConfig(trim_mode=mode))
            okeep, oita = compute_ita_scalar(pixels, 1.0, mode)
            assert est.n_retained == sum(okeep)
            assert math.isclose(est.ita_degrees, oita, abs_tol=1e-9)
    _ok(3, "1000 random small images match the scalar oracle in both trim modes")


def test_criterion_4_synthetic_end_to_end_recovery():
    bases = [(70.0, 10.0, 0.5), (60.0, 25.0, 0.3), (55.0, 30.0, 0.2)]
    spec = SynthSpec(
        n_images=200,
        base_lab_choices=bases,
        noise_sigma_lab=2.0,
        lesion=LesionSpec(),
        image_size=(32, 32),
        seed=314,
    )
    images, masks, truths = generate_dataset(spec)
    planted_counts = {}
    for image, mask, truth in zip(images, masks, truths):
        est = compute_ita(image, mask)
        assert abs(est.ita_degrees - truth.ita_degrees) < 1.0, truth.image_id
        planted_counts[truth.category] = planted_counts.get(truth.category, 0) + 1

    # report proportions within 3-sigma multinomial bounds of the planted mix
    cat_prob = {}
    for l, b, w in bases:
        from skintone_audit.synth import snap_base_color
        _, (le, _, be) = snap_base_color(l, b, spec.a_const)
        cat = categorize(ita_from_lab(le, be))
        cat_prob[cat] = cat_prob.get(cat, 0.0) + w
    n = spec.n_images
    for cat, p in cat_prob.items():
        got = planted_counts.get(cat, 0)
        bound = 3.0 * math.sqrt(n * p * (1.0 - p))
        assert abs(got - n * p) <= bound, (cat, got, n * p, bound)
    _ok(4, "200 noisy synthetic images: per-image ITA within 1 degree, "
           "distribution within 3-sigma multinomial bounds")


def test_criterion_5_trend_consistency_with_published_bin_means():
    mids = [DEFAULT_MIDPOINTS[c] for c in CATEGORY_ORDER]
    flat = [0.94, 0.86, 0.87, 0.87, 0.86, 0.95, 0.83, 0.92]
    fit = trend_fit(list(zip(mids, flat)))
    assert abs(fit.slope) < 0.001
    sloped = [0.50, 0.57, 0.58, 0.60, 0.62, 0.66, 0.67, 0.72]
    fit2 = trend_fit(list(zip(mids, sloped)))
    assert -0.004 <= fit2.slope <= -0.001
    _ok(5, f"published bin means: flat slope {fit.slope:+.5f}, "
           f"sloped slope {fit2.slope:+.5f}")


def _planted_truths():
    truths = []
    i = 0
    for cat in CATEGORY_ORDER:
        mid = DEFAULT_MIDPOINTS[cat]
        for _ in range(2000):
            truths.append(
                TruthRecord(f"img{i:06d}", mid, categorize(mid), 0.0, 0.0, "a")
            )
            i += 1
    return truths


def _fitted(truths, slope, seed):
    model = AccuracyModel(slope=slope, intercept=0.7)
    recs = generate_predictions(truths, model, 10, ["a", "b", "c"], seed=seed)
    itas = {t.image_id: t.ita_degrees for t in truths}
    return trend_fit(trend_points(per_bin_accuracy(recs, itas)))


def test_criterion_6_planted_gradient_recovery():
    truths = _planted_truths()
    fit = _fitted(truths, -0.002, seed=1)
    t975 = stats.t.ppf(0.975, fit.n_points - 2)
    se = (fit.ci95_high - fit.slope) / t975
    assert abs(fit.slope - (-0.002)) < 2.0 * se, (fit.slope, se)

    covered = 0
    for rep in range(50):
        f = _fitted(truths, 0.0, seed=1000 + rep)
        if f.ci95_low <= 0.0 <= f.ci95_high:
            covered += 1
    assert covered >= 45, covered
    _ok(6, f"planted slope recovered within 2 SE; zero-gradient CI coverage "
           f"{covered}/50")


def test_criterion_7_segmentation_metrics():
    gt = np.zeros((4, 4), bool)
    gt[1:3, 1:3] = True
    acc, fnr = mask_pixel_metrics(gt, gt)
    assert (acc, fnr) == (1.0, 0.0)

    pred = np.zeros((4, 4), bool)
    pred[1, 1:3] = True  # finds 2 of 4 excluded pixels, nothing else
    acc, fnr = mask_pixel_metrics(pred, gt)
    assert acc == pytest.approx(14 / 16)
    assert fnr == pytest.approx(0.5)

    img = np.full((4, 4, 3), (205, 165, 145), np.uint8)
    m1 = np.zeros((4, 4), bool)
    m1[0] = True
    assert ita_mae([img], [m1], [gt]) == pytest.approx(0.0, abs=1e-12)
    assert ita_mae([img], [gt], [gt]) == 0.0
    _ok(7, "identity masks, hand-counted 4x4 confusion, uniform-image MAE 0")


def test_criterion_8_statistics_identities():
    rng = np.random.default_rng(88)
    labels = ["a", "b", "c", "d"]
    for _ in range(100):
        preds = []
        i = 0
        for lbl in labels:
            for _ in range(10):
                preds.append(
                    PredictionRecord(f"i{i}", "s0", lbl, rng.choice(labels))
                )
                i += 1
        assert balanced_accuracy(preds, labels) == pytest.approx(
            overall_accuracy(preds), abs=1e-12
        )

    # count-weighted recombination of per-bin accuracies is exact per split
    preds, itas = [], {}
    for i in range(300):
        itas[f"i{i}"] = float(rng.uniform(-20, 80))
        for s in range(4):
            preds.append(
                PredictionRecord(
                    f"i{i}", f"s{s}", "a", "a" if rng.random() < 0.6 else "b"
                )
            )
    per_bin = per_bin_accuracy(preds, itas)
    for s in range(4):
        split = f"s{s}"
        want = overall_accuracy([p for p in preds if p.split_id == split])
        num = den = 0.0
        for b in per_bin:
            for sid, acc, n in b.per_split:
                if sid == split:
                    num += acc * n
                    den += n
        assert num / den == pytest.approx(want, abs=1e-12)

    x = rng.normal(size=40)
    y = rng.normal(size=40)
    r = pearson(x, y)
    assert pearson(3.0 * x + 11.0, 0.5 * y - 4.0) == pytest.approx(r, abs=1e-12)
    _ok(8, "balanced=plain accuracy at equal counts, exact recombination, "
           "Pearson affine invariance")


def test_criterion_9_cli_determinism(tmp_path):
    spec = tmp_path / "synth.cfg"
    spec.write_text(
        "n_images = 8\n"
        "base_lab = 70:10;58:26;50:32\n"
        "image_height = 12\nimage_width = 12\n"
        "seed = 5\nlesion = true\n"
        "accuracy_slope = -0.002\naccuracy_intercept = 0.7\nn_splits = 3\n"
    )

    def run_all(root, workers):
        ds = root / "ds"
        assert cli_main(["synth", "--spec", str(spec), "--out-dir", str(ds)]) == 0
        ita = root / "ita"
        assert cli_main([
            "ita", "--manifest", str(ds / "manifest.csv"),
            "--out-dir", str(ita), "--workers", str(workers),
        ]) == 0
        seg_manifest = root / "seg.csv"
        rows = (ds / "manifest.csv").read_text().splitlines()
        fixed = [rows[0]]
        for row in rows[1:]:
            iid, ipath, mpath, _, lbl = row.split(",")
            fixed.append(f"{iid},{ipath},{mpath},{mpath},{lbl}")
        seg_manifest.write_text("\n".join(fixed) + "\n")
        seg = root / "seg"
        assert cli_main([
            "segeval", "--manifest", str(seg_manifest), "--out-dir", str(seg),
        ]) == 0
        fair = root / "fair"
        assert cli_main([
            "fairness", "--predictions", str(ds / "predictions.csv"),
            "--ita-results", str(ita / "ita_results.csv"),
            "--out-dir", str(fair),
        ]) == 0
        cor = root / "cor"
        assert cli_main([
            "correlate", "--ita-results", str(ita / "ita_results.csv"),
            "--out-dir", str(cor),
        ]) == 0
        return [
            ds / "manifest.csv", ds / "truth.csv", ds / "predictions.csv",
            ds / "images" / "synth_00000.png", ds / "masks" / "synth_00000.png",
            ita / "ita_results.csv", ita / "distribution.json",
            ita / "distribution.svg",
            seg / "seg_quality.json", seg / "seg_per_image.csv",
            fair / "per_bin_accuracy.csv", fair / "trend.json",
            fair / "accuracy_vs_ita.svg",
            cor / "correlation.json",
        ]

    files_a = run_all(tmp_path / "a", workers=1)
    files_b = run_all(tmp_path / "b", workers=4)
    for fa, fb in zip(files_a, files_b):
        ca = fa.read_bytes()
        cb = fb.read_bytes()
        # manifests embed absolute paths; compare with roots normalized
        ca = ca.replace(str(tmp_path / "a").encode(), b"ROOT")
        cb = cb.replace(str(tmp_path / "b").encode(), b"ROOT")
        assert ca == cb, fa.name
    # artifacts embed config + version
    doc = json.loads(files_a[6].read_text())
    assert doc["config"]["version"]
    _ok(9, "all five CLI commands byte-identical across reruns and worker counts")
