"""Named initial-data presets.

Every preset is smooth, band-limited (dealiased at construction) and, with
default parameters, solenoidal, electroneutral and nonnegative in the
charges, so a fresh run satisfies every precondition of the solver.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .dynamics import SimState
from .operators import leray_project
from .spectral import Field, Grid, VectorField, dealias, mean

__all__ = ["PRESETS", "initial_state"]


def _field(grid: Grid, values) -> Field:
    return dealias(Field.from_real(grid, values))


def _taylor_green_velocity(grid: Grid, amplitude: float) -> VectorField:
    x = grid.coordinates()
    if grid.d == 2:
        comps = [amplitude * np.sin(x[0]) * np.cos(x[1]),
                 -amplitude * np.cos(x[0]) * np.sin(x[1])]
    else:
        comps = [amplitude * np.sin(x[0]) * np.cos(x[1]) * np.cos(x[2]),
                 -amplitude * np.cos(x[0]) * np.sin(x[1]) * np.cos(x[2]),
                 np.zeros(grid.shape)]
    return VectorField([_field(grid, c) for c in comps])


def _cosine_wave(grid: Grid) -> np.ndarray:
    x = grid.coordinates()
    return np.cos(x[0]) * np.cos(x[1])


def _periodic_blob(grid: Grid, width: float, shift: float) -> np.ndarray:
    x = grid.coordinates()
    phase = np.cos(x[0] - np.pi - shift) + sum(np.cos(xi - np.pi) for xi in x[1:])
    return np.exp(width * (phase - grid.d))


def _band_limited_noise(grid: Grid, rng, k_low: float, k_high: float) -> Field:
    raw = Field.from_real(grid, rng.standard_normal(grid.shape))
    mask = (grid.k_mag >= k_low) & (grid.k_mag <= k_high)
    return dealias(Field(grid, coeffs=raw.coeffs * mask))


def _normalized_noise(grid: Grid, rng, k_low=1.0, k_high=None) -> Field:
    if k_high is None:
        k_high = grid.N / 6.0
    f = _band_limited_noise(grid, rng, k_low, k_high)
    peak = float(np.abs(f.values).max())
    return f * (1.0 / peak) if peak > 0 else f


def taylor_green(grid, amplitude=1.0, **_):
    u = _taylor_green_velocity(grid, amplitude)
    return u, Field.zeros(grid), Field.zeros(grid)


def charged_taylor_green(grid, amplitude=1.0, charge_amplitude=0.1,
                         n_mean=1.0, p_mean=None, **_):
    if p_mean is None:
        p_mean = n_mean
    if not (0.0 <= charge_amplitude < min(n_mean, p_mean) or charge_amplitude == 0):
        raise ConfigError(
            "charge_amplitude must stay below the charge means to keep the "
            f"densities nonnegative (got {charge_amplitude})")
    u = _taylor_green_velocity(grid, amplitude)
    wave = _cosine_wave(grid)
    n = _field(grid, n_mean + charge_amplitude * wave)
    p = _field(grid, p_mean - charge_amplitude * wave)
    return u, n, p


def charged_blob(grid, amplitude=0.0, charge_amplitude=0.5, n_mean=1.0,
                 p_mean=None, width=2.0, **_):
    if p_mean is None:
        p_mean = n_mean
    u = (_taylor_green_velocity(grid, amplitude) if amplitude
         else VectorField.zeros(grid))
    blob_n = _periodic_blob(grid, width, 0.0)
    blob_p = _periodic_blob(grid, width, np.pi)
    n = _field(grid, n_mean + charge_amplitude * blob_n)
    p = _field(grid, p_mean + charge_amplitude * blob_p)
    return u, n, p


def random_solenoidal(grid, amplitude=1.0, charge_amplitude=0.0, n_mean=1.0,
                      p_mean=None, seed=0, **_):
    if p_mean is None:
        p_mean = n_mean
    if not (0.0 <= charge_amplitude < 1.0):
        raise ConfigError(
            f"charge_amplitude must lie in [0, 1), got {charge_amplitude}")
    rng = np.random.default_rng(seed)
    comps = [_band_limited_noise(grid, rng, 1.0, grid.N / 6.0)
             for _ in range(grid.d)]
    u = leray_project(VectorField(comps))
    peak = float(u.magnitude().max())
    if peak > 0:
        u = u * (amplitude / peak)
    noise_n = _normalized_noise(grid, rng)
    noise_p = _normalized_noise(grid, rng)
    n = _field(grid, n_mean * (1.0 + charge_amplitude * noise_n.values))
    p = _field(grid, p_mean * (1.0 + charge_amplitude * noise_p.values))
    return u, n, p


PRESETS = {
    "taylor-green": taylor_green,
    "charged-taylor-green": charged_taylor_green,
    "charged-blob": charged_blob,
    "random-solenoidal": random_solenoidal,
}


def initial_state(preset: str, grid: Grid, nu: float = 0.0, **params) -> SimState:
    """Build the initial state for a named preset."""
    try:
        builder = PRESETS[preset]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {preset!r}; choose one of {known}")
    u, n, p = builder(grid, **params)
    return SimState(u=u, n=n, p=p, t=0.0, nu=nu)
