import numpy as np
import pytest


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_image(seed: int, w: int, h: int, channels: int = 3) -> np.ndarray:
    g = rng(seed)
    return g.integers(0, 256, size=(h, w, channels), dtype=np.uint8)


class ScriptedRNG:
    """Generator stand-in that returns queued values for random()/uniform()
    and falls back to a real PCG64 stream for everything else."""

    def __init__(self, random_values=(), uniform_values=(), seed=0):
        self._random = list(random_values)
        self._uniform = list(uniform_values)
        self._real = rng(seed)

    def random(self, *a, **k):
        if self._random:
            return self._random.pop(0)
        return self._real.random(*a, **k)

    def uniform(self, *a, **k):
        if self._uniform:
            return self._uniform.pop(0)
        return self._real.uniform(*a, **k)

    def integers(self, *a, **k):
        return self._real.integers(*a, **k)


@pytest.fixture
def tiny_rgb():
    return random_image(11, 8, 8)
