import numpy as np
import pytest

from enpp.spectral import Field, VectorField, dealias, make_grid
from enpp.operators import leray_project


@pytest.fixture
def grid16():
    return make_grid(2, 16)


@pytest.fixture
def grid32():
    return make_grid(2, 32)


@pytest.fixture
def grid64():
    return make_grid(2, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_field(grid, rng, kcut=None):
    """Random band-limited scalar field (dealiased; optionally tighter cut)."""
    f = dealias(Field.from_real(grid, rng.standard_normal(grid.shape)))
    if kcut is not None:
        mask = np.ones(grid.shape, dtype=bool)
        for a in grid.k_int:
            mask &= np.abs(a) <= kcut
        f = Field(grid, coeffs=f.coeffs * mask)
    return f


def random_solenoidal(grid, rng, kcut=None):
    """Random divergence-free, band-limited vector field."""
    return leray_project(
        VectorField([random_field(grid, rng, kcut) for _ in range(grid.d)]))


def taylor_green(grid, amplitude=1.0):
    x = grid.coordinates()
    return VectorField([
        Field.from_real(grid, amplitude * np.sin(x[0]) * np.cos(x[1])),
        Field.from_real(grid, -amplitude * np.cos(x[0]) * np.sin(x[1])),
    ])


def rel_err(got, want):
    scale = np.abs(np.asarray(want)).max()
    return np.abs(np.asarray(got) - np.asarray(want)).max() / max(scale, 1e-300)
