import numpy as np
import pytest

from gamegen.core import BinaryMask, LatentVolume
from gamegen.denoise import (
    BadSchedule,
    ConditionBundle,
    Schedule,
    SeededNoise,
    ShapeMismatch,
    SmoothTargetDenoiser,
    ToyDenoiser,
    derive_seed,
    sample,
    sample_inpaint,
)

from conftest import random_volume


class TestSchedule:
    def test_uniform_endpoints_exact(self):
        sched = Schedule.uniform(8)
        assert sched.times[0] == 1.0
        assert sched.times[-1] == 0.0
        assert sched.steps == 8

    def test_rejects_non_decreasing(self):
        with pytest.raises(BadSchedule):
            Schedule((1.0, 0.5, 0.5, 0.0))

    def test_rejects_bad_endpoints(self):
        with pytest.raises(BadSchedule):
            Schedule((0.9, 0.0))

    def test_custom_grid_accepted(self):
        sched = Schedule((1.0, 0.7, 0.2, 0.0))
        assert sched.steps == 3


class TestSeededNoise:
    def test_same_index_same_value_any_window(self):
        noise = SeededNoise(1234)
        full = noise.array((3, 4, 8, 8))
        window = noise.array((2, 2, 3, 5), origin=(1, 1, 2, 3))
        assert np.array_equal(window, full[1:3, 1:3, 2:5, 3:8])

    def test_different_seeds_differ(self):
        a = SeededNoise(1).array((2, 2, 4, 4))
        b = SeededNoise(2).array((2, 2, 4, 4))
        assert not np.array_equal(a, b)

    def test_roughly_standard_normal(self):
        z = SeededNoise(7).array((4, 4, 32, 32)).reshape(-1)
        assert abs(z.mean()) < 0.05
        assert abs(z.std() - 1.0) < 0.05

    def test_derive_seed_changes_stream(self):
        assert derive_seed(5, 1) != derive_seed(5, 2) != 5


class TestSample:
    def test_single_step_collapses_to_constant_target(self):
        target = LatentVolume(np.full((4, 1, 3, 3), 0.7, dtype=np.float32))
        out = sample(ToyDenoiser(target), Schedule.uniform(1), target.shape, seed=0)
        assert np.abs(out.data - 0.7).max() <= 1e-6

    @pytest.mark.parametrize("steps", [1, 2, 4, 8, 16])
    def test_toy_exactness(self, rng, steps):
        target = random_volume(rng)
        out = sample(ToyDenoiser(target), Schedule.uniform(steps), target.shape, seed=3)
        assert np.abs(out.data - target.data).max() <= 1e-5

    def test_identical_seeds_bit_identical(self, rng):
        target = random_volume(rng)
        args = (ToyDenoiser(target), Schedule.uniform(6), target.shape, 42)
        assert np.array_equal(sample(*args).data, sample(*args).data)

    def test_monotone_refinement(self, rng):
        target = random_volume(rng, (3, 2, 8, 8))
        start_err = {}
        seen = []

        def watch(t, state):
            seen.append((t, np.abs(state.data - target.data).max()))

        sample(
            ToyDenoiser(target),
            Schedule.uniform(10),
            target.shape,
            seed=5,
            on_step=watch,
        )
        x1 = SeededNoise(5).array(target.shape)
        base = np.abs(x1 - target.data).max()
        for t, err in seen:
            assert err <= t * base + 1e-5

    def test_velocity_shape_mismatch_raises(self, rng):
        target = random_volume(rng, (4, 1, 4, 4))

        class Bad:
            def velocity(self, x, t, cond=None):
                return LatentVolume(np.zeros((4, 1, 2, 2), dtype=np.float32))

        with pytest.raises(ShapeMismatch):
            sample(Bad(), Schedule.uniform(2), target.shape, seed=0)


class TestSampleInpaint:
    def test_mask_all_zeros_returns_known_bit_exact(self, rng):
        known = random_volume(rng)
        mask = BinaryMask(np.zeros(known.shape[1:], dtype=np.uint8))
        out = sample_inpaint(
            ToyDenoiser(known), Schedule.uniform(4), known, mask, seed=1
        )
        assert np.array_equal(out.data, known.data)

    def test_toy_target_equals_known_everywhere(self, rng):
        known = random_volume(rng)
        mask = BinaryMask(rng.integers(0, 2, known.shape[1:], dtype=np.uint8))
        out = sample_inpaint(
            ToyDenoiser(known), Schedule.uniform(6), known, mask, seed=2
        )
        assert np.abs(out.data - known.data).max() <= 1e-5

    def test_mask_all_ones_identical_to_plain_sample(self, rng):
        known = random_volume(rng)
        mask = BinaryMask(np.ones(known.shape[1:], dtype=np.uint8))
        target = random_volume(rng)
        inpainted = sample_inpaint(
            ToyDenoiser(target), Schedule.uniform(5), known, mask, seed=9
        )
        plain = sample(ToyDenoiser(target), Schedule.uniform(5), known.shape, seed=9)
        assert np.array_equal(inpainted.data, plain.data)

    def test_keep_cells_bit_equal_known(self, rng):
        for case in range(20):
            known = random_volume(rng, (2, 2, 5, 4))
            mask = BinaryMask(rng.integers(0, 2, known.shape[1:], dtype=np.uint8))
            target = random_volume(rng, known.shape)
            out = sample_inpaint(
                ToyDenoiser(target), Schedule.uniform(3), known, mask, seed=case
            )
            keep = np.broadcast_to(mask.bits[None] == 0, out.shape)
            assert np.array_equal(out.data[keep], known.data[keep])

    def test_mask_shape_mismatch(self, rng):
        known = random_volume(rng)
        mask = BinaryMask(np.zeros((1, 2, 2), dtype=np.uint8))
        with pytest.raises(ShapeMismatch):
            sample_inpaint(ToyDenoiser(known), Schedule.uniform(2), known, mask, seed=0)


class TestConditionBundle:
    def test_mask_requires_known(self, rng):
        mask = BinaryMask(np.ones((1, 2, 2), dtype=np.uint8))
        with pytest.raises(ShapeMismatch):
            ConditionBundle(mask=mask)

    def test_smooth_target_needs_known(self, rng):
        x = random_volume(rng)
        with pytest.raises(ShapeMismatch):
            SmoothTargetDenoiser().velocity(x, 1.0, None)

    def test_smooth_target_constant_fixed_point(self):
        known = LatentVolume(np.full((1, 1, 6, 6), 0.3, dtype=np.float32))
        mask = BinaryMask(np.ones((1, 6, 6), dtype=np.uint8))
        out = sample_inpaint(
            SmoothTargetDenoiser(radius=2), Schedule.uniform(4), known, mask, seed=0
        )
        # blurring a constant leaves it unchanged, so the fill converges to it
        assert np.abs(out.data - 0.3).max() <= 1e-5
