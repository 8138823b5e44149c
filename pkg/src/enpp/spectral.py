"""Grids, fields and plain Fourier machinery on the periodic torus.

Everything downstream (dyadic blocks, projectors, the solver) is built on
the three types defined here: an immutable :class:`Grid`, a scalar
:class:`Field` carrying real-space samples and spectral coefficients in
sync, and a :class:`VectorField` bundling one field per space dimension.

Conventions
-----------
* The forward transform divides by ``N**d`` so the ``k = 0`` coefficient is
  the spatial mean of the field.
* The integer frequency lattice is ``{-N/2 < k_i <= N/2}``; wavenumbers are
  the integers scaled by ``2*pi/L``.
* Pointwise products of fields go through :func:`product`, which applies
  the 2/3-rule dealiasing mask (zero every mode with any ``|k_i| > N/3``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as _dc_field

import numpy as np

from .errors import GridError

__all__ = [
    "Grid",
    "Field",
    "VectorField",
    "make_grid",
    "transform",
    "lp_norm",
    "lp_norm_vector",
    "dealias",
    "product",
    "derivative",
    "gradient",
    "divergence",
    "laplacian",
    "apply_multiplier",
    "mean",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[0, L)^d`` with its frequency lattice.

    Derived arrays (wavenumbers, dealiasing mask) are precomputed once and
    marked read-only; two grids compare equal iff ``(d, N, L)`` agree.
    """

    d: int
    N: int
    L: float = 2.0 * math.pi

    # derived, excluded from equality/hash
    k: tuple = _dc_field(init=False, compare=False, repr=False)
    k_int: tuple = _dc_field(init=False, compare=False, repr=False)
    k_sq: np.ndarray = _dc_field(init=False, compare=False, repr=False)
    k_mag: np.ndarray = _dc_field(init=False, compare=False, repr=False)
    inv_k_sq: np.ndarray = _dc_field(init=False, compare=False, repr=False)
    dealias_mask: np.ndarray = _dc_field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.d not in (2, 3):
            raise GridError(f"dimension must be 2 or 3, got {self.d}")
        if self.N % 2 != 0:
            raise GridError(f"N must be even, got {self.N}")
        if self.N < 8:
            raise GridError(f"N must be at least 8, got {self.N}")
        if not self.L > 0:
            raise GridError(f"period L must be positive, got {self.L}")

        n = np.fft.fftfreq(self.N, d=1.0 / self.N)
        n[self.N // 2] = self.N // 2  # label the Nyquist index +N/2
        axes_int = np.meshgrid(*([n] * self.d), indexing="ij")
        scale = 2.0 * math.pi / self.L
        axes = tuple(a * scale for a in axes_int)
        k_sq = sum(a * a for a in axes)
        inv = np.zeros_like(k_sq)
        nz = k_sq > 0
        inv[nz] = 1.0 / k_sq[nz]
        cutoff = self.N / 3.0
        mask = np.ones(k_sq.shape, dtype=bool)
        for a in axes_int:
            mask &= np.abs(a) <= cutoff

        for arr in (*axes_int, *axes, k_sq, inv, mask):
            arr.setflags(write=False)
        object.__setattr__(self, "k_int", tuple(axes_int))
        object.__setattr__(self, "k", axes)
        object.__setattr__(self, "k_sq", k_sq)
        object.__setattr__(self, "k_mag", np.sqrt(k_sq))
        object.__setattr__(self, "inv_k_sq", inv)
        object.__setattr__(self, "dealias_mask", mask)

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @property
    def cell_volume(self) -> float:
        return (self.L / self.N) ** self.d

    @property
    def spacing(self) -> float:
        return self.L / self.N

    def coordinates(self) -> tuple:
        """Mesh of sample coordinates, one array per axis."""
        x = np.arange(self.N) * self.spacing
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))


def make_grid(d: int, N: int, L: float = 2.0 * math.pi) -> Grid:
    """Validated grid constructor; rejects odd ``N``, ``d`` outside {2, 3}
    and nonpositive ``L``."""
    return Grid(d=d, N=N, L=float(L))


class Field:
    """Scalar function on a grid, with lazily synchronized representations.

    Exactly one of ``values`` (real samples) or ``coeffs`` (normalized DFT
    coefficients) must be given; the other is computed on first access and
    cached. Instances are immutable: stored arrays are read-only copies.
    Lazy fills are idempotent, so racing reads from several threads are
    harmless.
    """

    __slots__ = ("grid", "_values", "_coeffs")

    def __init__(self, grid: Grid, values: np.ndarray | None = None,
                 coeffs: np.ndarray | None = None):
        if values is None and coeffs is None:
            raise GridError("Field needs real values or spectral coefficients")
        self.grid = grid
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.shape != grid.shape:
                raise GridError(
                    f"value array shape {values.shape} does not match grid {grid.shape}")
            values = values.copy()
            values.setflags(write=False)
        if coeffs is not None:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.shape != grid.shape:
                raise GridError(
                    f"coefficient array shape {coeffs.shape} does not match grid {grid.shape}")
            coeffs = coeffs.copy()
            coeffs.setflags(write=False)
        self._values = values
        self._coeffs = coeffs

    @classmethod
    def from_real(cls, grid: Grid, values: np.ndarray) -> "Field":
        return cls(grid, values=values)

    @classmethod
    def from_spectral(cls, grid: Grid, coeffs: np.ndarray) -> "Field":
        return cls(grid, coeffs=coeffs)

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, values=np.zeros(grid.shape))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = np.fft.ifftn(self._coeffs).real * self.grid.size
            v.setflags(write=False)
            self._values = v
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            c = np.fft.fftn(self._values) / self.grid.size
            c.setflags(write=False)
            self._coeffs = c
        return self._coeffs

    def _check_same_grid(self, other: "Field"):
        if self.grid != other.grid:
            raise GridError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, values=self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check_same_grid(other)
        return Field(self.grid, values=self.values - other.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, values=self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Field":
        return self * -1.0


class VectorField:
    """Tuple of ``d`` scalar fields sharing one grid."""

    __slots__ = ("components",)

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise GridError("vector field needs at least one component")
        grid = components[0].grid
        for c in components[1:]:
            if c.grid != grid:
                raise GridError("vector components live on different grids")
        if len(components) != grid.d:
            raise GridError(
                f"expected {grid.d} components, got {len(components)}")
        self.components = components

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    @classmethod
    def zeros(cls, grid: Grid) -> "VectorField":
        return cls([Field.zeros(grid) for _ in range(grid.d)])

    def __getitem__(self, i: int) -> Field:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __mul__(self, scalar: float) -> "VectorField":
        return VectorField([c * scalar for c in self.components])

    __rmul__ = __mul__

    def __neg__(self) -> "VectorField":
        return self * -1.0

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean magnitude on the grid."""
        return np.sqrt(sum(c.values**2 for c in self.components))


def transform(field: Field, direction: str) -> Field:
    """Materialize one representation of ``field`` from the other.

    ``forward`` fills spectral coefficients from real samples, ``inverse``
    the reverse; composing the two is the identity to 1e-12 relative.
    """
    if direction == "forward":
        out = Field(field.grid, values=field.values)
        out.coeffs  # force the forward DFT now
        return out
    if direction == "inverse":
        out = Field(field.grid, coeffs=field.coeffs)
        out.values  # force the inverse DFT now
        return out
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def lp_norm(field: Field, p: float) -> float:
    """Riemann-sum L^p norm with cell volume ``(L/N)**d``; grid max for p = inf."""
    if not (p >= 1):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    v = np.abs(field.values)
    if math.isinf(p):
        return float(v.max())
    return float((np.sum(v**p) * field.grid.cell_volume) ** (1.0 / p))


def lp_norm_vector(vf: VectorField, p: float) -> float:
    """L^p norm of the pointwise Euclidean magnitude of ``vf``."""
    if not (p >= 1):
        raise ValueError(f"p must lie in [1, inf], got {p}")
    m = vf.magnitude()
    if math.isinf(p):
        return float(m.max())
    return float((np.sum(m**p) * vf.grid.cell_volume) ** (1.0 / p))


def dealias(field: Field) -> Field:
    """Zero every coefficient with any ``|k_i| > N/3`` (2/3 rule)."""
    return Field(field.grid, coeffs=field.coeffs * field.grid.dealias_mask)


def product(f: Field, g: Field) -> Field:
    """Dealiased pointwise product of two fields."""
    f._check_same_grid(g)
    return dealias(Field(f.grid, values=f.values * g.values))


def apply_multiplier(field: Field, multiplier: np.ndarray) -> Field:
    """Apply a Fourier multiplier given as an array over the lattice."""
    return Field(field.grid, coeffs=field.coeffs * multiplier)


def derivative(field: Field, axis: int) -> Field:
    """Spectral partial derivative along ``axis``."""
    g = field.grid
    return Field(g, coeffs=field.coeffs * (1j * g.k[axis]))


def gradient(field: Field) -> VectorField:
    return VectorField([derivative(field, i) for i in range(field.grid.d)])


def divergence(vf: VectorField) -> Field:
    g = vf.grid
    c = sum((1j * g.k[i]) * vf[i].coeffs for i in range(g.d))
    return Field(g, coeffs=c)


def laplacian(field: Field) -> Field:
    g = field.grid
    return Field(g, coeffs=-g.k_sq * field.coeffs)


def mean(field: Field) -> float:
    """Spatial mean, read off the k = 0 coefficient."""
    return float(field.coeffs[(0,) * field.grid.d].real)
