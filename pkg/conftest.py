import numpy as np
import pytest

from codec.wavelet import GroupOfFrames
from topology import complete_topology, grid_topology, load_topology, path_topology, star_topology


@pytest.fixture
def path_abc():
    return load_topology("a b\nb c\n")


@pytest.fixture
def path_abcd():
    return load_topology("a b\nb c\nc d\n")


@pytest.fixture
def path_abcde():
    return load_topology("a b\nb c\nc d\nd e\n")


@pytest.fixture
def k4():
    return complete_topology(4)


@pytest.fixture
def star4():
    return star_topology(4)


@pytest.fixture
def grid5():
    return grid_topology(5, 5)


@pytest.fixture
def path5():
    return path_topology(5)


def make_static_texture(frames=8, size=8, seed=0):
    rng = np.random.default_rng(seed)
    frame = rng.integers(60, 200, size=(size, size))
    return GroupOfFrames(np.repeat(frame[np.newaxis], frames, axis=0).astype(np.uint8))


def make_translating_dot(frames=4, size=8, background=100, value=200, column=3):
    """Точка в рядку t + 1 кадру t: зсув на один рядок за кадр, без дотику до країв."""
    samples = np.full((frames, size, size), background, dtype=np.uint8)
    for t in range(frames):
        samples[t, t + 1, column] = value
    return GroupOfFrames(samples)


def make_two_region(frames=8, size=8, seed=1):
    """Ліва половина статична; права - вікно, що ковзає вниз на один рядок за кадр."""
    rng = np.random.default_rng(seed)
    half = size // 2
    texture = rng.integers(80, 180, size=(size, half))
    tall = rng.integers(80, 180, size=(size + frames, size - half))
    samples = np.empty((frames, size, size), dtype=np.uint8)
    for t in range(frames):
        samples[t, :, :half] = texture
        samples[t, :, half:] = tall[frames - t:frames - t + size]
    return GroupOfFrames(samples)


def make_random_gof(shape=(4, 8, 8), seed=0, low=60, high=200):
    rng = np.random.default_rng(seed)
    return GroupOfFrames(rng.integers(low, high, size=shape).astype(np.uint8))


@pytest.fixture
def static_gof():
    return make_static_texture()


@pytest.fixture
def dot_gof():
    return make_translating_dot()


@pytest.fixture
def two_region_gof():
    return make_two_region()
