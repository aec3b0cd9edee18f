import numpy as np
import pytest

from dipolar_gpe import Couplings, Field, build_kernel, make_grid


def smooth_field(grid, rng, complex_=True, terms=3, width=(0.8, 2.0), spread=2.0):
    """Sum of a few randomly placed anisotropic Gaussians."""
    x1, x2, x3 = grid.coords
    out = np.zeros(grid.shape, dtype=complex if complex_ else float)
    for _ in range(terms):
        c = rng.uniform(-spread, spread, 3)
        s = rng.uniform(*width, 3)
        amp = rng.uniform(0.5, 1.5)
        if complex_:
            amp = amp * np.exp(2j * np.pi * rng.uniform())
        out = out + amp * np.exp(
            -((x1 - c[0]) ** 2 / (2 * s[0] ** 2) + (x2 - c[1]) ** 2 / (2 * s[1] ** 2) + (x3 - c[2]) ** 2 / (2 * s[2] ** 2))
        )
    return Field(grid, out)


@pytest.fixture(scope="session")
def grid32():
    return make_grid((32, 32, 32), (16.0, 16.0, 16.0))


@pytest.fixture(scope="session")
def kernel32(grid32):
    return build_kernel(grid32)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# couplings whose Weinstein denominator is positive for every field
SAFE_POSITIVE = Couplings(-5.0, 0.5)
SAFE_NEGATIVE = Couplings(-5.0, -0.5)
