"""Dyadic frequency decomposition and Besov norms.

A partition of unity ``chi + sum_j phi(2^-j .) = 1`` over the resolved
frequency lattice is built from a C-infinity radial bump: ``chi`` equals 1
inside radius 3/4, vanishes beyond 4/3, and ``phi(xi) = chi(xi/2) -
chi(xi)`` lives on the annulus ``3/4 <= |xi| <= 8/3``. Blocks beyond the
lattice's Nyquist annulus are dropped and the top block absorbs the
remainder, so the partition identity and block reconstruction are exact on
the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .errors import EnppError
from .spectral import (
    Field,
    Grid,
    VectorField,
    lp_norm,
    lp_norm_vector,
)

__all__ = [
    "DyadicPartition",
    "BesovSpec",
    "build_partition",
    "get_partition",
    "dyadic_block",
    "low_freq_cutoff",
    "block_lp_norms",
    "besov_norm",
    "timespace_besov_norm",
    "check_bernstein",
    "BernsteinReport",
]

CHI_FLAT_RADIUS = 0.75  # chi == 1 inside this radius
CHI_SUPPORT_RADIUS = 4.0 / 3.0  # chi == 0 beyond this radius
ANNULUS_INNER = 0.75  # inner support radius of phi, times 2^j
ANNULUS_OUTER = 8.0 / 3.0  # outer support radius of phi, times 2^j


def _bump_ramp(t: np.ndarray) -> np.ndarray:
    """Smooth ramp: 0 for t <= 0, 1 for t >= 1, C-infinity in between.

    Built from f(t) = exp(-1/t) as f(t) / (f(t) + f(1-t)).
    """
    t = np.asarray(t, dtype=float)
    lo = np.clip(t, 1e-300, None)
    hi = np.clip(1.0 - t, 1e-300, None)
    with np.errstate(over="ignore"):
        f_lo = np.where(t > 0.0, np.exp(-1.0 / lo), 0.0)
        f_hi = np.where(t < 1.0, np.exp(-1.0 / hi), 0.0)
    return f_lo / (f_lo + f_hi)


def chi_profile(r: np.ndarray) -> np.ndarray:
    """Radial low-pass profile: 1 inside 3/4, 0 beyond 4/3."""
    t = (np.asarray(r, dtype=float) - CHI_FLAT_RADIUS) / (
        CHI_SUPPORT_RADIUS - CHI_FLAT_RADIUS)
    return 1.0 - _bump_ramp(t)


@dataclass(frozen=True)
class BesovSpec:
    """Index triple (s, p, r) naming a Besov norm."""

    s: float
    p: float
    r: float

    def __post_init__(self):
        if not (self.p >= 1):
            raise ValueError(f"p must lie in [1, inf], got {self.p}")
        if not (self.r >= 1):
            raise ValueError(f"r must lie in [1, inf], got {self.r}")

    def shifted(self, ds: float) -> "BesovSpec":
        return BesovSpec(self.s + ds, self.p, self.r)


@dataclass(frozen=True)
class DyadicPartition:
    """Tabulated multiplier profiles of the dyadic partition on a lattice.

    ``chi`` is the low-frequency profile; ``phis[j]`` is the annulus
    profile for block ``j``. All arrays are read-only; instances are safe
    to share between threads.
    """

    grid: Grid
    chi: np.ndarray
    phis: tuple
    j_max: int

    def multiplier(self, j: int) -> np.ndarray:
        """Profile of block ``j`` (j = -1 selects chi)."""
        if j == -1:
            return self.chi
        if 0 <= j <= self.j_max:
            return self.phis[j]
        raise ValueError(f"block index {j} outside [-1, {self.j_max}]")

    @property
    def block_indices(self) -> range:
        return range(-1, self.j_max + 1)


def build_partition(grid: Grid) -> DyadicPartition:
    """Tabulate the partition profiles on the grid's frequency lattice.

    ``j_max`` is the smallest j with ``(8/3) * 2^j >=`` the largest lattice
    frequency magnitude; the top block absorbs the tail so the profiles sum
    to exactly 1 everywhere.
    """
    r = grid.k_mag
    r_max = float(r.max())
    j_max = 0
    while ANNULUS_OUTER * 2.0**j_max < r_max:
        j_max += 1

    chi = chi_profile(r)
    phis = []
    running = chi.copy()
    for j in range(j_max):
        phi_j = chi_profile(r / 2.0 ** (j + 1)) - chi_profile(r / 2.0**j)
        np.clip(phi_j, 0.0, 1.0, out=phi_j)
        phis.append(phi_j)
        running += phi_j
    top = 1.0 - running
    np.clip(top, 0.0, 1.0, out=top)
    phis.append(top)

    for arr in (chi, *phis):
        arr.setflags(write=False)
    return DyadicPartition(grid=grid, chi=chi, phis=tuple(phis), j_max=j_max)


@lru_cache(maxsize=32)
def _partition_for(d: int, N: int, L: float) -> DyadicPartition:
    from .spectral import make_grid

    return build_partition(make_grid(d, N, L))


def get_partition(grid: Grid) -> DyadicPartition:
    """Cached partition lookup; profiles depend only on (d, N, L)."""
    return _partition_for(grid.d, grid.N, grid.L)


def dyadic_block(f: Field, j: int, partition: DyadicPartition | None = None) -> Field:
    """Frequency block ``Delta_j f`` as a Fourier-multiplier application."""
    part = partition if partition is not None else get_partition(f.grid)
    return Field(f.grid, coeffs=f.coeffs * part.multiplier(j))


def low_freq_cutoff(f: Field, j: int, partition: DyadicPartition | None = None) -> Field:
    """Low-frequency cutoff ``S_j f``: the sum of blocks strictly below j."""
    if j < 0:
        raise ValueError(f"cutoff index must be >= 0, got {j}")
    part = partition if partition is not None else get_partition(f.grid)
    mult = part.chi.copy()
    for jp in range(0, min(j - 1, part.j_max) + 1):
        mult = mult + part.phis[jp]
    return Field(f.grid, coeffs=f.coeffs * mult)


def _block_norm(f, j: int, p: float, part: DyadicPartition) -> float:
    if isinstance(f, VectorField):
        blocks = VectorField([dyadic_block(c, j, part) for c in f])
        return lp_norm_vector(blocks, p)
    return lp_norm(dyadic_block(f, j, part), p)


def block_lp_norms(f, p: float, partition: DyadicPartition | None = None) -> np.ndarray:
    """Array of ``||Delta_j f||_{L^p}`` for j = -1 .. j_max.

    Accepts a scalar or vector field; vector blocks are measured through
    their pointwise Euclidean magnitude.
    """
    grid = f.grid
    part = partition if partition is not None else get_partition(grid)
    return np.array([_block_norm(f, j, p, part) for j in part.block_indices])


def _weighted_lr(values: np.ndarray, s: float, r: float, j_min: int = -1) -> float:
    js = np.arange(j_min, j_min + len(values))
    weighted = (2.0 ** (js * s)) * values
    if math.isinf(r):
        return float(weighted.max()) if len(weighted) else 0.0
    return float(np.sum(weighted**r) ** (1.0 / r))


def besov_norm(f, spec: BesovSpec, partition: DyadicPartition | None = None) -> float:
    """Besov norm: weighted l^r over blocks of the block L^p norms."""
    norms = block_lp_norms(f, spec.p, partition)
    return _weighted_lr(norms, spec.s, spec.r)


def timespace_besov_norm(series, dt: float, rho: float, spec: BesovSpec,
                         partition: DyadicPartition | None = None) -> float:
    """Mixed time-space norm: per block, the time-L^rho norm of the block's
    L^p norm, then the weighted l^r sum over blocks.

    ``series`` holds samples at uniform spacing ``dt``; for finite rho the
    time integral is a left-endpoint rectangle rule over the ``len - 1``
    gaps (a series sampling [0, T] inclusive integrates to T times the
    stationary value), while rho = inf takes the sup over all samples.
    """
    series = list(series)
    if not series:
        raise ValueError("time series must be nonempty")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    part = partition if partition is not None else get_partition(series[0].grid)
    per_sample = np.array([block_lp_norms(f, spec.p, part) for f in series])
    if math.isinf(rho):
        per_block = per_sample.max(axis=0)
    elif len(series) == 1:
        per_block = np.zeros(per_sample.shape[1])
    else:
        per_block = (np.sum(per_sample[:-1] ** rho, axis=0) * dt) ** (1.0 / rho)
    return _weighted_lr(per_block, spec.s, spec.r)


@dataclass(frozen=True)
class BernsteinReport:
    """Quantities behind the two band-limited derivative inequalities.

    ``derivative_ratio`` is ``sup_{|a|=k} ||d^a f||_p / (2^{jk} ||f||_p)``,
    bounded above and below by annulus constants. ``lower_lhs`` and
    ``lower_rhs`` are the two sides of the lower bound
    ``(R1^2 / p^2) int |f|^p <= int |grad f|^2 |f|^{p-2}`` with ``R1`` the
    annulus inner radius; callers assert the ordering with an empirically
    calibrated constant.
    """

    j: int
    k: int
    p: float
    derivative_ratio: float
    lower_lhs: float
    lower_rhs: float


def check_bernstein(f: Field, j: int, k: int = 1, p: float = 2.0,
                    partition: DyadicPartition | None = None) -> BernsteinReport:
    """Measure the derivative-vs-frequency ratios of an annulus-limited field."""
    grid = f.grid
    part = partition if partition is not None else get_partition(grid)
    if j < 0 or j > part.j_max:
        raise ValueError(f"block index {j} outside [0, {part.j_max}]")
    inner = ANNULUS_INNER * 2.0**j
    outer = ANNULUS_OUTER * 2.0**j
    r = grid.k_mag
    off_annulus = (r < inner) | (r > outer)
    energy = float(np.sum(np.abs(f.coeffs) ** 2))
    leak = float(np.sum(np.abs(f.coeffs[off_annulus]) ** 2))
    if energy == 0.0:
        raise EnppError("cannot check a zero field")
    if leak > 1e-20 * energy:
        raise EnppError(
            f"field is not band-limited to the block-{j} annulus "
            f"(off-annulus energy fraction {leak / energy:.2e})")

    base = lp_norm(f, p)
    deriv_max = 0.0
    for axes in combinations_with_replacement(range(grid.d), k):
        mult = np.ones(grid.shape, dtype=complex)
        for ax in axes:
            mult = mult * (1j * grid.k[ax])
        deriv_max = max(deriv_max, lp_norm(Field(grid, coeffs=f.coeffs * mult), p))
    ratio = deriv_max / (2.0 ** (j * k) * base)

    grad_sq = sum(
        Field(grid, coeffs=f.coeffs * (1j * grid.k[ax])).values ** 2
        for ax in range(grid.d))
    vals = np.abs(f.values)
    lhs = (inner**2 / p**2) * float(np.sum(vals**p)) * grid.cell_volume
    rhs = float(np.sum(grad_sq * vals ** (p - 2))) * grid.cell_volume
    return BernsteinReport(j=j, k=k, p=p, derivative_ratio=float(ratio),
                           lower_lhs=lhs, lower_rhs=rhs)
