import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamegen.core import (
    BadMagic,
    BinaryMask,
    DimMismatch,
    LatentVolume,
    Rgba8Image,
    TruncatedPayload,
    WrongShape,
    decode,
    encode,
    load_volume,
    png_bytes,
    png_from_bytes,
    save_volume,
)


def test_encode_single_red_pixel():
    img = Rgba8Image(np.array([[[255, 0, 0, 255]]], dtype=np.uint8))
    vol = encode(img)
    assert vol.shape == (4, 1, 1, 1)
    assert list(vol.data.reshape(-1)) == [1.0, 0.0, 0.0, 1.0]


def test_encode_all_zero_image():
    img = Rgba8Image(np.zeros((2, 2, 4), dtype=np.uint8))
    vol = encode(img)
    assert vol.shape == (4, 1, 2, 2)
    assert not vol.data.any()


def test_codec_round_trip_100_random_images(rng):
    for _ in range(100):
        h, w = rng.integers(1, 12, 2)
        img = Rgba8Image(rng.integers(0, 256, (h, w, 4), dtype=np.uint8))
        assert np.array_equal(decode(encode(img)).pixels, img.pixels)


def test_decode_midpoint_rounds_to_128():
    vol = LatentVolume(np.full((4, 1, 1, 1), 0.5, dtype=np.float32))
    assert decode(vol).pixels[0, 0, 0] == 128


def test_decode_clamps_negative_values():
    vol = LatentVolume(np.full((4, 1, 1, 1), -0.2, dtype=np.float32))
    assert decode(vol).pixels[0, 0, 0] == 0


def test_decode_rejects_wrong_shape():
    with pytest.raises(WrongShape):
        decode(LatentVolume(np.zeros((3, 1, 2, 2), dtype=np.float32)))
    with pytest.raises(WrongShape):
        decode(LatentVolume(np.zeros((4, 2, 2, 2), dtype=np.float32)))


def test_volume_rejects_non_finite():
    bad = np.zeros((1, 1, 1, 2), dtype=np.float32)
    bad[0, 0, 0, 0] = np.nan
    with pytest.raises(WrongShape):
        LatentVolume(bad)


def test_volume_is_immutable(rng):
    vol = LatentVolume(rng.standard_normal((2, 1, 3, 3)).astype(np.float32))
    with pytest.raises(ValueError):
        vol.data[0, 0, 0, 0] = 1.0


def test_mask_requires_binary_entries():
    with pytest.raises(WrongShape):
        BinaryMask(np.full((1, 2, 2), 2, dtype=np.uint8))


def test_indexing_law_matches_nested_loop_oracle(rng):
    c, t, h, w = 3, 2, 4, 5
    vol = LatentVolume(rng.standard_normal((c, t, h, w)).astype(np.float32))
    flat = vol.data.reshape(-1)
    for ci in range(c):
        for ti in range(t):
            for hi in range(h):
                for wi in range(w):
                    idx = ((ci * t + ti) * h + hi) * w + wi
                    assert flat[idx] == vol.data[ci, ti, hi, wi]


def test_save_load_round_trip(tmp_path, rng):
    vol = LatentVolume(rng.standard_normal((4, 1, 2, 2)).astype(np.float32))
    path = tmp_path / "v.fglv"
    save_volume(vol, path)
    back = load_volume(path)
    assert np.array_equal(back.data, vol.data)
    assert back.data.dtype == np.float32


@settings(max_examples=25, deadline=None)
@given(
    shape=st.tuples(
        st.integers(1, 4), st.integers(1, 3), st.integers(1, 6), st.integers(1, 6)
    ),
    seed=st.integers(0, 2**32),
)
def test_save_load_round_trip_property(tmp_path_factory, shape, seed):
    rng = np.random.default_rng(seed)
    vol = LatentVolume(rng.standard_normal(shape).astype(np.float32))
    path = tmp_path_factory.mktemp("fglv") / "v.fglv"
    save_volume(vol, path)
    assert np.array_equal(load_volume(path).data, vol.data)


def test_load_rejects_bad_magic(tmp_path, rng):
    vol = LatentVolume(rng.standard_normal((1, 1, 2, 2)).astype(np.float32))
    path = tmp_path / "v.fglv"
    save_volume(vol, path)
    blob = bytearray(path.read_bytes())
    blob[:4] = b"XXXX"
    path.write_bytes(bytes(blob))
    with pytest.raises(BadMagic):
        load_volume(path)


def test_load_rejects_truncated_payload(tmp_path, rng):
    vol = LatentVolume(rng.standard_normal((4, 1, 2, 2)).astype(np.float32))
    path = tmp_path / "v.fglv"
    save_volume(vol, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-3])
    with pytest.raises(TruncatedPayload):
        load_volume(path)


def test_load_rejects_oversized_payload(tmp_path, rng):
    vol = LatentVolume(rng.standard_normal((4, 1, 2, 2)).astype(np.float32))
    path = tmp_path / "v.fglv"
    save_volume(vol, path)
    path.write_bytes(path.read_bytes() + b"\x00\x00\x00\x00")
    with pytest.raises(DimMismatch):
        load_volume(path)


def test_png_bytes_round_trip(random_image):
    back = png_from_bytes(png_bytes(random_image))
    assert np.array_equal(back.pixels, random_image.pixels)
