"""Frequency-space operators: paraproducts, projections, potential solve.

All operators are exact Fourier multipliers on the torus combined with
block-wise dealiased physical-space products. Inverse-Laplacian multipliers
return zero at the mean mode; mean handling is owned by the dynamics layer.
"""

from __future__ import annotations

import numpy as np

from .errors import NonNeutralError, EnppError
from .littlewood_paley import DyadicPartition, dyadic_block, get_partition
from .spectral import (
    Field,
    VectorField,
    dealias,
    derivative,
    divergence,
    lp_norm,
    mean,
    product,
)

__all__ = [
    "paraproduct",
    "remainder",
    "bony_decompose",
    "leray_project",
    "pi_bilinear",
    "pi_divergence_identity",
    "commutator",
    "solve_potential",
    "grad_inv_laplacian",
]


def _blocks(f: Field, part: DyadicPartition):
    return [dyadic_block(f, j, part).values for j in part.block_indices]


def paraproduct(a: Field, b: Field, partition: DyadicPartition | None = None) -> Field:
    """Low-frequencies-of-a times blocks-of-b: ``sum_j S_{j-1} a . Delta_j b``.

    Only blocks j >= 1 contribute (the cutoff below j = 1 is empty), so the
    j = -1 block of ``b`` never enters.
    """
    a._check_same_grid(b)
    part = partition if partition is not None else get_partition(a.grid)
    blocks_a = _blocks(a, part)
    blocks_b = _blocks(b, part)
    # cumulative S_m a for m = j - 1 as j runs over 1 .. j_max
    acc = np.zeros(a.grid.shape)
    cutoff = blocks_a[0].copy()  # S_0 a = Delta_{-1} a
    for j in range(1, part.j_max + 1):
        acc += cutoff * blocks_b[j + 1]
        cutoff += blocks_a[j]  # now S_j a, ready for the next term
    return dealias(Field(a.grid, values=acc))


def remainder(a: Field, b: Field, partition: DyadicPartition | None = None) -> Field:
    """Comparable-frequency remainder: ``sum_{|k-j|<=1} Delta_k a . Delta_j b``."""
    a._check_same_grid(b)
    part = partition if partition is not None else get_partition(a.grid)
    blocks_a = _blocks(a, part)
    blocks_b = _blocks(b, part)
    acc = np.zeros(a.grid.shape)
    n = len(blocks_a)
    for i in range(n):
        for off in (-1, 0, 1):
            j = i + off
            if 0 <= j < n:
                acc += blocks_a[i] * blocks_b[j]
    return dealias(Field(a.grid, values=acc))


def bony_decompose(u: Field, v: Field, partition: DyadicPartition | None = None):
    """Split the product ``uv`` into ``(T_u v, T_v u, R(u, v))``.

    The three pieces are block-wise dealiased physical products; their sum
    reconstructs the dealiased product exactly (bilinearity).
    """
    u._check_same_grid(v)
    part = partition if partition is not None else get_partition(u.grid)
    return (
        paraproduct(u, v, part),
        paraproduct(v, u, part),
        remainder(u, v, part),
    )


def leray_project(f: VectorField) -> VectorField:
    """Projection onto divergence-free fields: ``delta_il - k_i k_l / |k|^2``
    per mode; the k = 0 mode passes through unchanged."""
    g = f.grid
    k_dot_f = sum(g.k[m] * f[m].coeffs for m in range(g.d))
    return VectorField(
        [Field(g, coeffs=f[i].coeffs - g.k[i] * g.inv_k_sq * k_dot_f)
         for i in range(g.d)])


def grad_inv_laplacian(a: Field) -> VectorField:
    """Gradient of the inverse (negative) Laplacian of a zero-mean field.

    Multiplier ``i k / |k|^2`` per mode, zero at k = 0; the divergence of
    the output is ``-a``. This helper owns the sign convention for the
    electric field: ``grad phi = grad_inv_laplacian(p - n)``.
    """
    scale = lp_norm(a, 2.0)
    if abs(mean(a)) > 1e-10 * max(scale, 1e-300):
        raise NonNeutralError(
            f"source has nonzero mean {mean(a):.3e}; inverse Laplacian undefined")
    g = a.grid
    coeffs = a.coeffs.copy()
    coeffs[(0,) * g.d] = 0.0
    return VectorField(
        [Field(g, coeffs=1j * g.k[i] * g.inv_k_sq * coeffs) for i in range(g.d)])


def solve_potential(n: Field, p: Field, renormalize: bool = False):
    """Solve ``laplacian(phi) = n - p`` on the torus.

    Returns ``(phi, grad_phi)`` with zero-mean ``phi`` and ``grad_phi =
    grad_inv_laplacian(p - n)``. Requires electroneutrality (equal means of
    n and p) unless ``renormalize`` is set, in which case the offending
    mean is subtracted from p.
    """
    n._check_same_grid(p)
    scale = lp_norm(n, 2.0) + lp_norm(p, 2.0)
    imbalance = mean(n) - mean(p)
    if abs(imbalance) > 1e-10 * max(scale, 1e-300):
        if not renormalize:
            raise NonNeutralError(
                f"mean(n) - mean(p) = {imbalance:.6e} exceeds neutrality "
                f"tolerance; pass renormalize to subtract it from p")
        p = Field(p.grid, values=p.values + imbalance)
    g = n.grid
    a = n.coeffs - p.coeffs
    a[(0,) * g.d] = 0.0
    phi = Field(g, coeffs=-a * g.inv_k_sq)
    grad_phi = grad_inv_laplacian(Field(g, coeffs=-a))  # grad of (-lap)^-1 (p - n)
    return phi, grad_phi


def _advection(w: VectorField, f: Field) -> Field:
    """Dealiased ``w . grad f``."""
    out = product(w[0], derivative(f, 0))
    for m in range(1, w.grid.d):
        out = out + product(w[m], derivative(f, m))
    return out


def advect(w: VectorField, u: VectorField) -> VectorField:
    """Dealiased ``(w . grad) u`` component by component."""
    return VectorField([_advection(w, u[i]) for i in range(u.grid.d)])


def pi_bilinear(u: VectorField, v: VectorField,
                partition: DyadicPartition | None = None) -> VectorField:
    """Bilinear operator encoding the pressure gradient of the projected
    momentum equation.

    Computes ``grad (-laplacian)^-1`` of the paraproduct splitting of
    ``sum_{i,j} d_i u^j d_j v^i``: two paraproduct pieces keep the
    derivatives on the factors, the remainder piece carries them outside as
    the multiplier ``d_i d_j`` applied to ``R(u^i, v^j)``. The k = 0 output
    mode is zero. For divergence-free u, ``u.grad u + pi_bilinear(u, u)``
    equals the Leray projection of ``u.grad u``.
    """
    if u.grid != v.grid:
        raise EnppError("vector fields live on different grids")
    g = u.grid
    part = partition if partition is not None else get_partition(g)

    du = [[derivative(u[j], i) for j in range(g.d)] for i in range(g.d)]
    dv = [[derivative(v[i], j) for i in range(g.d)] for j in range(g.d)]

    total = np.zeros(g.shape, dtype=complex)
    for i in range(g.d):
        for j in range(g.d):
            para1 = paraproduct(du[i][j], dv[j][i], part)
            para2 = paraproduct(dv[j][i], du[i][j], part)
            rem = remainder(u[i], v[j], part)
            total += para1.coeffs + para2.coeffs
            total += (1j * g.k[i]) * (1j * g.k[j]) * rem.coeffs
    total[(0,) * g.d] = 0.0
    return VectorField(
        [Field(g, coeffs=1j * g.k[m] * g.inv_k_sq * total) for m in range(g.d)])


def pi_divergence_identity(u: VectorField, v: VectorField,
                           partition: DyadicPartition | None = None) -> float:
    """L^2 residual of ``div pi_bilinear(u, v) + tr(Du Dv)``; inputs must be
    divergence-free."""
    for name, w in (("u", u), ("v", v)):
        d = lp_norm(divergence(w), 2.0)
        scale = max(lp_norm(divergence_scale(w), 2.0), 1e-300)
        if d > 1e-8 * scale:
            raise EnppError(f"{name} is not divergence-free (|div| = {d:.3e})")
    g = u.grid
    part = partition if partition is not None else get_partition(g)
    pi = pi_bilinear(u, v, part)
    trace = None
    for i in range(g.d):
        for j in range(g.d):
            term = product(derivative(u[j], i), derivative(v[i], j))
            trace = term if trace is None else trace + term
    return lp_norm(divergence(pi) + trace, 2.0)


def divergence_scale(w: VectorField) -> Field:
    """Magnitude reference for divergence tests: ``|grad| w`` in L^2."""
    g = w.grid
    coeffs = sum(np.abs(g.k_mag * w[i].coeffs) ** 2 for i in range(g.d))
    return Field(g, coeffs=np.sqrt(coeffs))


def commutator(v: VectorField, f: Field, j: int,
               partition: DyadicPartition | None = None) -> Field:
    """Transport commutator ``v . grad(Delta_j f) - Delta_j(v . grad f)``,
    dealiased."""
    part = partition if partition is not None else get_partition(f.grid)
    term1 = _advection(v, dyadic_block(f, j, part))
    term2 = dyadic_block(_advection(v, f), j, part)
    return term1 - term2
