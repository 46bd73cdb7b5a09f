"""Acceptance suite: one test per criterion, each printing a PASS line
(visible with `pytest -s`). Run standalone via `python tests/test_acceptance.py`
to get one PASS/FAIL line per criterion and a nonzero exit on any failure."""

import itertools
import random
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np

from gamegen.camera import (
    ActionKey,
    CameraPose,
    MotionParams,
    fold_actions,
    pluecker_field,
)
from gamegen.core import BinaryMask, LatentVolume, Rgba8Image, encode
from gamegen.curation import (
    AnnotationTask,
    CaptionSet,
    CurationConfig,
    acceptance_check,
    aggregate_annotation,
    curate_corpus,
    sample_caption,
    split_scenes,
)
from gamegen.curation.fixtures import build_cut_video_frames
from gamegen.denoise import (
    ConditionBundle,
    Schedule,
    ToyDenoiser,
    sample,
    sample_inpaint,
)
from gamegen.extend import (
    FullClip,
    PreviousLatents,
    RepeatLastFrameDenoiser,
    SessionConfig,
    SingleFrame,
    build_hybrid_input,
    extend,
    head_length,
    make_loop,
    save_session,
    start_session,
)
from gamegen.seamless import (
    AXIS_WIDTH,
    SeamDirection,
    SeamSpec,
    make_seamless,
    seam_region,
    swap_halves,
)
from gamegen.tiled_sr import (
    ConditionTargetDenoiser,
    TileWindow,
    average_tiles,
    plan_axis,
    upsample,
    upscale_video,
)

GOLDEN_MANIFEST = Path(__file__).parent / "data" / "golden_manifest.jsonl"


def _pass(tag: str) -> None:
    print(f"ACCEPTANCE {tag}: PASS")


def criterion_01_toy_exactness():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    for case in range(100):
        shape = (
            int(rng.integers(1, 5)),
            int(rng.integers(1, 4)),
            int(rng.integers(2, 10)),
            int(rng.integers(2, 10)),
        )
        target = LatentVolume(rng.standard_normal(shape).astype(np.float32))
        for steps in (1, 2, 4, 8, 16):
            out = sample(ToyDenoiser(target), Schedule.uniform(steps), shape, seed=case)
            assert np.abs(out.data - target.data).max() <= 1e-5
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, f"toy exactness took {elapsed:.2f}s"
    _pass("01 toy-denoiser exactness (100 targets x N in 1..16, <5s)")


def criterion_02_inpaint_preservation():
    rng = np.random.default_rng(202)
    for case in range(200):
        shape = (
            int(rng.integers(1, 4)),
            int(rng.integers(1, 4)),
            int(rng.integers(2, 8)),
            int(rng.integers(2, 8)),
        )
        known = LatentVolume(rng.standard_normal(shape).astype(np.float32))
        mask = BinaryMask(rng.integers(0, 2, shape[1:], dtype=np.uint8))
        target = LatentVolume(rng.standard_normal(shape).astype(np.float32))
        out = sample_inpaint(
            ToyDenoiser(target), Schedule.uniform(int(rng.integers(1, 7))),
            known, mask, seed=case,
        )
        keep = np.broadcast_to(mask.bits[None] == 0, shape)
        assert np.array_equal(out.data[keep], known.data[keep])
    _pass("02 inpaint preservation (200 random cases, bit-exact)")


def criterion_03_seamless():
    rng = np.random.default_rng(303)
    # (a) outside-band preservation, bit-exact
    img = Rgba8Image(rng.integers(0, 256, (16, 16, 4), dtype=np.uint8))
    spec = SeamSpec(SeamDirection.HORIZONTAL, 4)
    black = LatentVolume(np.zeros((4, 1, 16, 16), dtype=np.float32))
    out = make_seamless(img, spec, ToyDenoiser(black), Schedule.uniform(6), seed=1)
    outside = seam_region(16, 16, spec).bits[0] == 0
    assert np.array_equal(out.pixels[outside], img.pixels[outside])

    # (b) periodic-target wrap continuity measured on the decoded output
    w, h = 16, 8
    xs = np.arange(w)
    wave = (127.5 + 100.0 * np.sin(2 * np.pi * xs / w)).round().astype(np.uint8)
    pixels = np.zeros((h, w, 4), dtype=np.uint8)
    pixels[:, :, 0] = wave[None, :]
    pixels[:, :, 1] = np.roll(wave, 5)[None, :]
    pixels[:, :, 2] = 90
    pixels[:, :, 3] = 255
    periodic = Rgba8Image(pixels)
    spec_b = SeamSpec(SeamDirection.HORIZONTAL, 4)
    target = swap_halves(encode(periodic), AXIS_WIDTH)
    tiled_out = make_seamless(
        periodic, spec_b, ToyDenoiser(target), Schedule.uniform(8), seed=2
    )
    latent = encode(tiled_out).data[:, 0]  # (4, h, w) floats in [0,1]
    doubled = np.concatenate([latent, latent], axis=2)
    diffs = np.abs(np.diff(doubled, axis=2))
    junction = diffs[:, :, w - 1].max()
    interior = diffs[:, :, : w - 1].max()
    assert junction <= interior + 1e-4

    # (c) swap involution on 500 random volumes
    for _ in range(500):
        shape = (
            int(rng.integers(1, 4)),
            int(rng.integers(1, 3)),
            2 * int(rng.integers(1, 6)),
            2 * int(rng.integers(1, 6)),
        )
        vol = LatentVolume(rng.standard_normal(shape).astype(np.float32))
        axis = int(rng.integers(2, 4))
        assert np.array_equal(swap_halves(swap_halves(vol, axis), axis).data, vol.data)
    _pass("03 seamless: preservation bit-exact, wrap continuity, 500 involutions")


def criterion_04_tile_planning():
    assert plan_axis(1536, 768, 256) == [0, 512, 768]
    rng = np.random.default_rng(404)
    for _ in range(1000):
        length = int(rng.integers(1, 2000))
        tile = int(rng.integers(1, 900))
        overlap = int(rng.integers(0, tile))
        starts = plan_axis(length, tile, overlap)
        counts = np.zeros(length, dtype=np.int64)
        span = min(tile, length)
        for s in starts:
            assert 0 <= s and s + span <= length, "window out of bounds"
            counts[s : s + span] += 1
        assert counts.min() >= 1, "uncovered cell"
    _pass("04 tile planning (1000 random triples covered, worked case [0,512,768])")


def criterion_05_tiled_idempotence():
    rng = np.random.default_rng(505)
    schedule = Schedule.uniform(4)
    configs = [((4, 5, 56, 64), (9, 96, 96), (1, 24, 24))]  # scaled default tile
    while len(configs) < 20:
        shape = (
            int(rng.integers(1, 5)),
            int(rng.integers(1, 6)),
            int(rng.integers(4, 20)),
            int(rng.integers(4, 20)),
        )
        tile = (
            int(rng.integers(1, 8)),
            int(rng.integers(2, 16)),
            int(rng.integers(2, 16)),
        )
        overlap = tuple(int(rng.integers(0, t)) for t in tile)
        configs.append((shape, tile, overlap))
    for seed, (lr_shape, tile, overlap) in enumerate(configs):
        lr = LatentVolume(rng.standard_normal(lr_shape).astype(np.float32))
        tiled = upscale_video(
            lr, 2, ConditionTargetDenoiser(), schedule, seed=seed,
            tile=tile, overlap=overlap,
        )
        hr_cond = upsample(lr, 2, 2)
        untiled = sample(
            ConditionTargetDenoiser(), schedule, hr_cond.shape, seed=seed,
            cond=ConditionBundle(extra_channels=hr_cond),
        )
        assert np.abs(tiled.data - untiled.data).max() <= 1e-4

    a = np.full((1, 2, 2, 3), 0.2, dtype=np.float32)
    b = np.full((1, 2, 2, 3), 0.6, dtype=np.float32)
    merged = average_tiles(
        (1, 2, 2, 5),
        [(TileWindow(0, 0, 0, 2, 2, 3), a), (TileWindow(0, 0, 2, 2, 2, 3), b)],
    )
    assert np.abs(merged.data[0, :, :, 2] - 0.4).max() <= 1e-6
    _pass("05 tiled idempotence (20 configs incl. default tile; overlap avg exact)")


def criterion_06_pluecker_invariants():
    rng = np.random.default_rng(606)
    for _ in range(1000):
        pose = CameraPose.looking(
            yaw=float(rng.uniform(-np.pi, np.pi)),
            pitch=float(rng.uniform(-1.5, 1.5)),
            center=rng.uniform(-10, 10, 3),
            intrinsics=(48.0, 48.0, 16.0, 16.0),
        )
        field = pluecker_field(pose, 32, 32)
        m, d = field[:3], field[3:]
        assert np.abs(np.linalg.norm(d, axis=0) - 1.0).max() <= 1e-6
        assert np.abs((m * d).sum(axis=0)).max() <= 1e-6
    pose = CameraPose.looking(yaw=0.4, pitch=0.2, center=(1.0, 2.0, 3.0),
                              intrinsics=(48.0, 48.0, 16.5, 16.5))
    field = pluecker_field(pose, 32, 32)
    d_central = field[3:, 16, 16].astype(np.float64)
    moved = CameraPose(pose.rotation, pose.center + 3.3 * d_central, pose.intrinsics)
    field2 = pluecker_field(moved, 32, 32)
    assert np.abs(field[:, 16, 16] - field2[:, 16, 16]).max() <= 1e-5
    _pass("06 pluecker invariants (1000 poses x 32x32; ray-translation invariance)")


def criterion_07_camera_algebra():
    params = MotionParams(speed=0.25, segment_frames=4)
    for pair in ([ActionKey.W, ActionKey.S], [ActionKey.A, ActionKey.D],
                 [ActionKey.S, ActionKey.W], [ActionKey.D, ActionKey.A]):
        traj = fold_actions(CameraPose.looking(yaw=0.9, pitch=0.3), pair, params)
        assert np.abs(traj.poses[-1].center - traj.poses[0].center).max() <= 1e-6
    traj = fold_actions(CameraPose.looking(), [ActionKey.LEFT, ActionKey.RIGHT], params)
    yaw, pitch = traj.poses[-1].yaw_pitch()
    assert abs(yaw) <= 1e-6 and abs(pitch) <= 1e-6

    f = 8
    turn = MotionParams(speed=0.1, yaw_rate=np.pi / 2 / f, segment_frames=f)
    traj = fold_actions(CameraPose.looking(), [ActionKey.LEFT, ActionKey.W], turn)
    disp = traj.poses[-1].center - traj.poses[f].center
    oracle = f * 0.1 * np.array([-1.0, 0.0, 0.0])  # pi/2 left of -z is -x
    assert np.abs(disp - oracle).max() <= 1e-6

    rng = np.random.default_rng(707)
    clampy = MotionParams(pitch_rate=0.5, segment_frames=2)
    keys = list(ActionKey)
    for _ in range(10_000):
        stream = [keys[i] for i in rng.integers(0, len(keys), 3)]
        traj = fold_actions(CameraPose.looking(pitch=1.0), stream, clampy)
        for pose in traj.poses:
            assert abs(pose.yaw_pitch()[1]) < np.pi / 2
    _pass("07 camera algebra (cancellation, rotated-forward oracle, pitch clamp x1e4)")


def criterion_08_extension_history():
    rng = np.random.default_rng(808)
    kinds = [SingleFrame(), PreviousLatents(1), FullClip()]
    for case in range(100):
        image = Rgba8Image(rng.integers(0, 256, (8, 8, 4), dtype=np.uint8))
        config = SessionConfig(
            motion=MotionParams(segment_frames=2), steps=2, seed=case
        )
        pose = CameraPose.looking(center=(0, 1, 4), intrinsics=(8.0, 8.0, 4.0, 4.0))
        session = start_session(image, pose, config)
        denoiser = RepeatLastFrameDenoiser()
        for seg in range(int(rng.integers(2, 4))):
            kind = kinds[int(rng.integers(0, len(kinds)))]
            key = ActionKey(list(ActionKey)[int(rng.integers(0, 9))])
            before = session.timeline.data.copy()
            session = extend(session, [key], kind, denoiser)
            assert np.array_equal(session.timeline.data[:, : before.shape[1]], before)
            hybrid = build_hybrid_input(session, kind, 2)
            head = head_length(kind, session.frame_count)
            per_frame = hybrid.mask.bits.reshape(hybrid.mask.frames, -1)
            assert per_frame[:head].min() == 1 and per_frame[head:].max() == 0

    def scripted(tmp: Path):
        image = Rgba8Image(
            np.random.default_rng(5).integers(0, 256, (8, 8, 4), dtype=np.uint8)
        )
        config = SessionConfig(motion=MotionParams(segment_frames=2), steps=2, seed=9)
        pose = CameraPose.looking(center=(0, 1, 4), intrinsics=(8.0, 8.0, 4.0, 4.0))
        session = start_session(image, pose, config)
        for key, kind in ((ActionKey.W, SingleFrame()), (ActionKey.LEFT, FullClip())):
            session = extend(session, [key], kind, RepeatLastFrameDenoiser())
        save_session(session, tmp)

    import tempfile

    with tempfile.TemporaryDirectory() as td:
        scripted(Path(td) / "a")
        scripted(Path(td) / "b")
        for name in ("timeline.fglv", "trajectory.txt", "manifest.json"):
            assert (Path(td) / "a" / name).read_bytes() == (
                Path(td) / "b" / name
            ).read_bytes()
    _pass("08 extension (history bit-identical x100, mask discipline, replay)")


def criterion_09_loop_closure():
    rng = np.random.default_rng(909)
    for t in (3, 9, 33):
        image = Rgba8Image(rng.integers(0, 256, (8, 8, 4), dtype=np.uint8))
        clip = make_loop(
            image, t, RepeatLastFrameDenoiser(), Schedule.uniform(4), seed=t
        )
        assert np.array_equal(clip.data[:, 0], clip.data[:, t - 1])
        assert np.array_equal(clip.data[:, 0], encode(image).data[:, 0])
    _pass("09 loop closure (frame[0] == frame[T-1] bit-exact for T in 3,9,33)")


def criterion_10_annotation_aggregation():
    for tup in itertools.product(range(1, 6), repeat=5):
        task = AnnotationTask("a", "structural_rationality", tup)
        value, count = Counter(tup).most_common(1)[0]
        expected = value if count >= 4 else None
        assert aggregate_annotation(task) == expected
    pairs = [(3, 3)] * 70 + [(3, 4)] * 25 + [(3, 5)] * 5
    assert acceptance_check(pairs, sample_rate=1.0).passed
    pairs = [(3, 3)] * 69 + [(3, 4)] * 31
    assert not acceptance_check(pairs, sample_rate=1.0).passed
    _pass("10 annotation aggregation (3125-tuple oracle; 0.70/0.95 boundaries)")


def criterion_11_caption_sampling():
    captions = CaptionSet(short="s", medium="m", detailed="d", comprehensive="c")
    rng = random.Random(1111)
    counts = Counter(sample_caption(captions, rng) for _ in range(100_000))
    fraction = counts["c"] / 100_000
    assert 0.69 <= fraction <= 0.71, fraction
    _pass(f"11 caption sampling (comprehensive fraction {fraction:.4f} in [0.69,0.71])")


def criterion_12_curation_fixtures(corpus_root: Path, workdir: Path):
    frames = build_cut_video_frames()
    scenes = split_scenes(frames)
    assert [s for s, _ in scenes[1:]] == [40, 90]

    summary = curate_corpus(corpus_root, workdir / "run1", CurationConfig())
    funnel = summary["tier_funnel"]
    assert funnel["premium"] <= funnel["gold"] <= funnel["bronze"]
    assert funnel["premium"] >= 1
    assert 0.48 <= summary["style_ratio_2d"] <= 0.52

    curate_corpus(corpus_root, workdir / "run2", CurationConfig())
    first = (workdir / "run1" / "manifest.jsonl").read_bytes()
    assert first == (workdir / "run2" / "manifest.jsonl").read_bytes()
    assert first == GOLDEN_MANIFEST.read_bytes(), "manifest deviates from golden copy"
    _pass("12 curation fixtures (cuts {40,90}; funnel monotone; ratio; golden manifest)")


def criterion_13_budget():
    rng = np.random.default_rng(1313)
    image = Rgba8Image(rng.integers(0, 256, (64, 64, 4), dtype=np.uint8))
    config = SessionConfig(motion=MotionParams(segment_frames=8), steps=8, seed=0)
    pose = CameraPose.looking(center=(0, 1.2, 6.0), intrinsics=(64.0, 64.0, 32.0, 32.0))
    session = start_session(image, pose, config)
    denoiser = RepeatLastFrameDenoiser()
    t0 = time.perf_counter()
    session = extend(session, [ActionKey.W], SingleFrame(), denoiser)
    elapsed = time.perf_counter() - t0
    assert session.frame_count == 9
    assert elapsed < 1.0, f"single-key extension took {elapsed:.3f}s"
    _pass(f"13 latency budget (one key, F=8, 64x64, 8 steps: {elapsed * 1000:.0f} ms < 1 s)")


# -- pytest wrappers -------------------------------------------------------

def test_criterion_01():
    criterion_01_toy_exactness()


def test_criterion_02():
    criterion_02_inpaint_preservation()


def test_criterion_03():
    criterion_03_seamless()


def test_criterion_04():
    criterion_04_tile_planning()


def test_criterion_05():
    criterion_05_tiled_idempotence()


def test_criterion_06():
    criterion_06_pluecker_invariants()


def test_criterion_07():
    criterion_07_camera_algebra()


def test_criterion_08():
    criterion_08_extension_history()


def test_criterion_09():
    criterion_09_loop_closure()


def test_criterion_10():
    criterion_10_annotation_aggregation()


def test_criterion_11():
    criterion_11_caption_sampling()


def test_criterion_12(fixture_corpus, tmp_path):
    criterion_12_curation_fixtures(fixture_corpus, tmp_path)


def test_criterion_13():
    criterion_13_budget()


def main() -> int:
    import tempfile

    from gamegen.curation import build_fixture_corpus

    failures = 0
    simple = [
        criterion_01_toy_exactness,
        criterion_02_inpaint_preservation,
        criterion_03_seamless,
        criterion_04_tile_planning,
        criterion_05_tiled_idempotence,
        criterion_06_pluecker_invariants,
        criterion_07_camera_algebra,
        criterion_08_extension_history,
        criterion_09_loop_closure,
        criterion_10_annotation_aggregation,
        criterion_11_caption_sampling,
    ]
    for fn in simple:
        try:
            fn()
        except Exception as exc:  # keep going so every criterion reports
            failures += 1
            print(f"ACCEPTANCE {fn.__name__}: FAIL ({exc})")
    with tempfile.TemporaryDirectory() as td:
        corpus = Path(td) / "corpus"
        build_fixture_corpus(corpus)
        try:
            criterion_12_curation_fixtures(corpus, Path(td))
        except Exception as exc:
            failures += 1
            print(f"ACCEPTANCE criterion_12: FAIL ({exc})")
    try:
        criterion_13_budget()
    except Exception as exc:
        failures += 1
        print(f"ACCEPTANCE criterion_13: FAIL ({exc})")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
