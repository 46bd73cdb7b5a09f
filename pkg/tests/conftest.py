import numpy as np
import pytest

from gamegen.core import LatentVolume, Rgba8Image


@pytest.fixture
def rng():
    return np.random.default_rng(20240612)


@pytest.fixture
def random_image(rng):
    return Rgba8Image(rng.integers(0, 256, (16, 16, 4), dtype=np.uint8))


def random_volume(rng, shape=(4, 2, 6, 5)) -> LatentVolume:
    return LatentVolume(rng.standard_normal(shape).astype(np.float32))


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    """The bundled 60-asset corpus, generated once per test session."""
    from gamegen.curation import build_fixture_corpus

    root = tmp_path_factory.mktemp("corpus")
    build_fixture_corpus(root)
    return root
