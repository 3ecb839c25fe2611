import numpy as np
import pytest

from paralog.grid import GridFunction, GridSpec
from paralog.kernels import backends


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_periodic():
    return GridSpec.box(32, 32, (0.0, 1.0), (0.0, 1.0))


@pytest.fixture
def unit_closed():
    return GridSpec(1, (33, 33), ((0.0, 1.0), (0.0, 1.0)), periodic=False)


@pytest.fixture(params=sorted(backends()))
def backend(request):
    return backends()[request.param]


def random_trig(spec, rng, modes=4, kmax=3):
    """Band-limited random trigonometric polynomial on a periodic spec."""
    X, T = spec.mesh()
    lx, lt = spec.lengths
    v = np.zeros(spec.shape)
    for _ in range(modes):
        k, q = rng.integers(0, kmax + 1, size=2)
        a = rng.uniform(-1, 1)
        px, pt = rng.uniform(0, 2 * np.pi, size=2)
        v += a * np.cos(2 * np.pi * k * X / lx + px) * np.cos(2 * np.pi * q * T / lt + pt)
    return GridFunction(spec, v, "trig")
