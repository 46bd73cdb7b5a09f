import json

from gamegen.curation import CurationConfig, curate_corpus
from gamegen.curation.pipeline import MANIFEST_NAME, SUMMARY_NAME
from gamegen.curation.scorers import default_image_scorers


def test_fixture_corpus_layout(fixture_corpus):
    images = sorted((fixture_corpus / "images").glob("*.png"))
    videos = sorted(p for p in (fixture_corpus / "videos").iterdir() if p.is_dir())
    assert len(images) == 40
    assert len(videos) == 20
    assert all(p.with_suffix(".json").exists() for p in images)


def test_pipeline_summary_and_funnel(fixture_corpus, tmp_path):
    summary = curate_corpus(fixture_corpus, tmp_path / "out", CurationConfig())
    funnel = summary["tier_funnel"]
    assert funnel["premium"] <= funnel["gold"] <= funnel["bronze"]
    assert funnel["premium"] >= 1
    assert summary["tier_counts"]["rejected"] >= 1
    assert 0.48 <= summary["style_ratio_2d"] <= 0.52
    assert abs(summary["balanced_2d"] - summary["balanced_3d"]) <= 1


def test_manifest_partitions_and_selection(fixture_corpus, tmp_path):
    curate_corpus(fixture_corpus, tmp_path / "out", CurationConfig())
    lines = (tmp_path / "out" / MANIFEST_NAME).read_text().splitlines()
    records = [json.loads(line) for line in lines]
    assert len(records) >= 60
    ids = [r["asset_id"] for r in records]
    assert ids == sorted(ids)
    by_video = {}
    for r in records:
        if r["kind"] != "clip":
            assert r["tier"] in ("rejected", "bronze", "gold", "premium")
            continue
        video, span = r["asset_id"].split("#")
        start, end = (int(v) for v in span.split("-"))
        assert (start, end) == tuple(r["clip_bounds"])
        by_video.setdefault(video, []).append((start, end))
    for spans in by_video.values():
        spans.sort()
        assert spans[0][0] == 0
        assert all(b0 == a1 for (_, b0), (a1, _) in zip(spans, spans[1:]))
    # the under-lit fixture is present but filtered
    dark = [r for r in records if r["kind"] == "clip" and r["scores"]["luminance"] == 0.0]
    assert dark and all(not r["selected"] for r in dark)


def test_pipeline_rerun_byte_identical(fixture_corpus, tmp_path):
    curate_corpus(fixture_corpus, tmp_path / "a", CurationConfig())
    curate_corpus(fixture_corpus, tmp_path / "b", CurationConfig())
    for name in (MANIFEST_NAME, SUMMARY_NAME):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_scorers_deterministic_and_ranged(fixture_corpus):
    from gamegen.core import load_png

    image = load_png(sorted((fixture_corpus / "images").glob("*.png"))[0])
    for scorer in default_image_scorers():
        a = scorer.score(image.pixels)
        b = scorer.score(image.pixels)
        assert a == b
        assert scorer.low <= a <= scorer.high
