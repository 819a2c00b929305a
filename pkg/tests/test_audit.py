import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from PIL import Image

from skintone_audit.audit import (
    DistributionReport,
    correlation_report,
    emit_histogram_svg,
    load_image,
    load_mask,
    read_ita_csv,
    read_manifest,
    report_to_json,
    run_audit,
    write_ita_csv,
)
from skintone_audit.errors import DecodeError, SkinToneAuditError
from skintone_audit.ita import ItaConfig, SkinToneCategory, categorize, ita_from_lab
from skintone_audit.colorimetry import srgb_to_lab
from skintone_audit.synth import LesionSpec, SynthSpec, generate_dataset


@pytest.fixture
def small_dataset(tmp_path):
    s = SynthSpec(
        n_images=6,
        base_lab_choices=[(70.0, 10.0), (60.0, 25.0), (40.0, 30.0)],
        lesion=LesionSpec(),
        image_size=(16, 16),
        seed=21,
    )
    _, _, truths = generate_dataset(s, tmp_path)
    return tmp_path, truths


def test_read_manifest(small_dataset):
    root, truths = small_dataset
    entries = read_manifest(root / "manifest.csv")
    assert [e.image_id for e in entries] == [t.image_id for t in truths]
    assert all(e.mask_path for e in entries)
    assert all(e.gt_mask_path is None for e in entries)


def test_manifest_duplicate_id(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("image_id,image_path,mask_path,gt_mask_path,label\na,x,,,\na,y,,,\n")
    with pytest.raises(SkinToneAuditError, match="duplicate"):
        read_manifest(p)


def test_load_image_formats(tmp_path):
    arr = np.zeros((4, 4, 3), np.uint8)
    Image.fromarray(arr).save(tmp_path / "ok.png")
    np.testing.assert_array_equal(load_image(tmp_path / "ok.png"), arr)
    Image.fromarray(arr).save(tmp_path / "ok.jpg")
    assert load_image(tmp_path / "ok.jpg").shape == (4, 4, 3)
    Image.fromarray(arr).save(tmp_path / "bad.bmp")
    with pytest.raises(DecodeError):
        load_image(tmp_path / "bad.bmp")
    (tmp_path / "junk.png").write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        load_image(tmp_path / "junk.png")


def test_load_mask_polarity(tmp_path):
    values = np.array([[0, 255]], np.uint8)
    Image.fromarray(values).save(tmp_path / "m.png")
    white = load_mask(tmp_path / "m.png", ItaConfig())
    np.testing.assert_array_equal(white, [[False, True]])
    black = load_mask(tmp_path / "m.png", ItaConfig(mask_polarity="black_excluded"))
    np.testing.assert_array_equal(black, [[True, False]])


def test_run_audit_recovers_truth(small_dataset):
    root, truths = small_dataset
    manifest = read_manifest(root / "manifest.csv")
    estimates, report = run_audit(manifest)
    assert len(estimates) == len(truths)
    assert report.total == len(truths)
    assert not report.skipped
    for t in truths:
        assert estimates[t.image_id].ita_degrees == pytest.approx(
            t.ita_degrees, abs=1e-6
        )
    assert sum(report.counts.values()) == len(truths)
    assert sum(report.fractions.values()) == pytest.approx(1.0, abs=1e-9)


def test_run_audit_empty_manifest():
    estimates, report = run_audit([])
    assert estimates == {}
    assert report.total == 0
    assert sum(report.counts.values()) == 0


def test_run_audit_missing_file_is_skip(small_dataset):
    root, truths = small_dataset
    manifest = read_manifest(root / "manifest.csv")
    manifest[0].image_path = str(root / "nope.png")
    estimates, report = run_audit(manifest)
    assert len(estimates) == len(truths) - 1
    assert len(report.skipped) == 1
    assert report.skipped[0][0] == truths[0].image_id


def test_run_audit_missing_mask_flagged(small_dataset):
    root, truths = small_dataset
    manifest = read_manifest(root / "manifest.csv")
    manifest[0].mask_path = None
    estimates, _ = run_audit(manifest)
    assert estimates[truths[0].image_id].flags == ["no_mask"]
    assert estimates[truths[1].image_id].flags == []


def test_run_audit_worker_invariance(small_dataset):
    root, _ = small_dataset
    manifest = read_manifest(root / "manifest.csv")
    cfg = ItaConfig()
    est1, rep1 = run_audit(manifest, cfg, workers=1)
    est4, rep4 = run_audit(manifest, cfg, workers=4)
    assert list(est1) == list(est4)
    for k in est1:
        assert est1[k].ita_degrees == est4[k].ita_degrees
    assert rep1.counts == rep4.counts


def test_uniform_color_manifest_bins(tmp_path):
    colors = [(240, 200, 180), (180, 120, 90), (90, 60, 50)]
    rows = ["image_id,image_path,mask_path,gt_mask_path,label"]
    for i, c in enumerate(colors):
        p = tmp_path / f"u{i}.png"
        Image.fromarray(np.full((4, 4, 3), c, np.uint8)).save(p)
        rows.append(f"u{i},{p},,,")
    mpath = tmp_path / "manifest.csv"
    mpath.write_text("\n".join(rows) + "\n")
    estimates, report = run_audit(read_manifest(mpath))
    for i, c in enumerate(colors):
        lab = srgb_to_lab(np.array(c))
        want = categorize(ita_from_lab(lab[0], lab[2]))
        assert estimates[f"u{i}"].category == want
    assert report.counts[SkinToneCategory.DARK.value] == sum(
        1 for e in estimates.values() if e.category is SkinToneCategory.DARK
    )


def test_ita_csv_round_trip(small_dataset, tmp_path):
    root, truths = small_dataset
    estimates, _ = run_audit(read_manifest(root / "manifest.csv"))
    out = tmp_path / "ita.csv"
    write_ita_csv(estimates, out, ItaConfig())
    text = out.read_text()
    assert text.startswith("# config ")
    header = text.splitlines()[1]
    assert header == (
        "image_id,ita_degrees,category,n_total,n_retained,"
        "mean_l,mean_b,std_l,std_b,mean_gray,median_gray,flags"
    )
    back = read_ita_csv(out)
    for t in truths:
        assert back[t.image_id] == pytest.approx(
            estimates[t.image_id].ita_degrees, abs=1e-6
        )


def test_correlation_report_affine():
    from skintone_audit.ita import ItaEstimate

    def est(ita, gray):
        return ItaEstimate(ita, categorize(ita), 1, 1, 0, 0, 0, 0, gray, gray)

    ests = {f"i{k}": est(10.0 * k, 5.0 + 2.0 * k) for k in range(5)}
    r_mean, r_median = correlation_report(ests)
    assert r_mean == pytest.approx(1.0)
    assert r_median == pytest.approx(1.0)
    with pytest.raises(ValueError):
        correlation_report({"a": est(1.0, 2.0)})


def test_report_json_fixed_order(small_dataset):
    root, _ = small_dataset
    _, report = run_audit(read_manifest(root / "manifest.csv"))
    doc = report_to_json(report)
    parsed = json.loads(doc)
    assert list(parsed) == ["total", "counts", "fractions", "skipped", "config"]
    assert list(parsed["counts"]) == [
        "very_lt", "lt2", "lt1", "int2", "int1", "tan2", "tan1", "dark",
    ]
    assert parsed["config"]["trim_mode"] == "mean_of_means"


def test_histogram_svg_deterministic_and_valid(tmp_path):
    report = DistributionReport(
        counts={c.value: 0 for c in SkinToneCategory},
        fractions={c.value: 0.0 for c in SkinToneCategory},
        total=0,
        skipped=[],
        config={"trim_mode": "mean_of_means"},
    )
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_histogram_svg(report, p1)
    emit_histogram_svg(report, p2)
    assert p1.read_bytes() == p2.read_bytes()
    root = ET.fromstring(p1.read_text())
    assert root.tag.endswith("svg")
    rects = [el for el in root.iter() if el.tag.endswith("rect")]
    assert len(rects) == 8
    assert all(float(r.get("height")) == 0.0 for r in rects)


def test_histogram_svg_single_bin(tmp_path):
    counts = {c.value: 0 for c in SkinToneCategory}
    counts["lt1"] = 7
    report = DistributionReport(
        counts=counts, fractions={}, total=7, skipped=[], config={}
    )
    p = tmp_path / "one.svg"
    emit_histogram_svg(report, p)
    root = ET.fromstring(p.read_text())
    heights = [float(r.get("height")) for r in root.iter() if r.tag.endswith("rect")]
    assert max(heights) > 0
    assert sum(1 for h in heights if h > 0) == 1
