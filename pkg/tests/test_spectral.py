import math

import numpy as np
import pytest

from enpp.errors import GridError
from enpp.spectral import (
    Field,
    VectorField,
    dealias,
    lp_norm,
    make_grid,
    mean,
    product,
    transform,
)

from conftest import random_field, rel_err
import oracles


class TestMakeGrid:
    def test_2d_lattice(self):
        g = make_grid(2, 8, 2 * math.pi)
        assert g.size == 64
        assert g.k_mag.max() == pytest.approx(4 * math.sqrt(2), rel=1e-14)

    def test_3d_lattice(self):
        g = make_grid(3, 16, 2 * math.pi)
        assert g.size == 4096

    @pytest.mark.parametrize("d,N,L", [
        (2, 7, 2 * math.pi),   # odd N
        (2, 6, 2 * math.pi),   # too small
        (4, 16, 2 * math.pi),  # bad dimension
        (1, 16, 2 * math.pi),
        (2, 16, 0.0),          # bad period
        (2, 16, -1.0),
    ])
    def test_rejects_bad_parameters(self, d, N, L):
        with pytest.raises(GridError):
            make_grid(d, N, L)

    def test_lattice_labels_follow_convention(self):
        # -N/2 < k_i <= N/2: the Nyquist entry carries the positive label
        g = make_grid(2, 8)
        axis = g.k_int[0][:, 0]
        assert axis.min() == -3
        assert axis.max() == 4

    def test_period_scales_wavenumbers(self):
        g = make_grid(2, 8, L=4 * math.pi)
        assert g.k[0].max() == pytest.approx(4 * (2 * math.pi / (4 * math.pi)))


class TestTransform:
    def test_constant_field_single_coefficient(self, grid16):
        c = 2.75
        f = transform(Field.from_real(grid16, np.full(grid16.shape, c)), "forward")
        assert f.coeffs[0, 0] == pytest.approx(c, rel=1e-14)
        off = f.coeffs.copy()
        off[0, 0] = 0.0
        assert np.abs(off).max() < 1e-14

    def test_single_mode_lands_on_lattice(self, grid16):
        x = grid16.coordinates()
        f = transform(Field.from_real(grid16, np.sin(x[0])), "forward")
        nonzero = np.argwhere(np.abs(f.coeffs) > 1e-13)
        assert sorted(map(tuple, nonzero)) == [(1, 0), (15, 0)]

    def test_round_trip(self, grid16, rng):
        f = Field.from_real(grid16, rng.standard_normal(grid16.shape))
        back = transform(transform(f, "forward"), "inverse")
        assert rel_err(back.values, f.values) < 1e-12

    def test_conjugate_symmetry(self, grid32, rng):
        f = Field.from_real(grid32, rng.standard_normal(grid32.shape))
        c = f.coeffs
        flipped = np.conj(np.roll(c[::-1, ::-1], shift=1, axis=(0, 1)))
        assert np.abs(c - flipped).max() < 1e-13

    def test_size_mismatch_rejected(self, grid16):
        with pytest.raises(GridError):
            Field.from_real(grid16, np.zeros((8, 8)))

    def test_bad_direction_rejected(self, grid16):
        f = Field.zeros(grid16)
        with pytest.raises(ValueError):
            transform(f, "sideways")

    def test_matches_direct_dft(self, grid16, rng):
        f = Field.from_real(grid16, rng.standard_normal(grid16.shape))
        direct = oracles.dft2(f.values)
        assert np.abs(f.coeffs - direct).max() < 1e-12


class TestLpNorm:
    def test_constant_l2(self, grid16):
        f = Field.from_real(grid16, np.ones(grid16.shape))
        assert lp_norm(f, 2.0) == pytest.approx(2 * math.pi, rel=1e-13)

    def test_sine_l2(self, grid16):
        x = grid16.coordinates()
        f = Field.from_real(grid16, np.sin(x[0]))
        assert lp_norm(f, 2.0) == pytest.approx(math.sqrt(2) * math.pi, rel=1e-13)

    def test_l4_against_refined_quadrature(self, grid32, rng):
        f = random_field(grid32, rng, kcut=grid32.N // 5)
        want = oracles.lp_norm_refined(f.values, 4.0)
        assert lp_norm(f, 4.0) == pytest.approx(want, rel=1e-10)

    def test_linf_is_grid_max(self, grid16, rng):
        f = Field.from_real(grid16, rng.standard_normal(grid16.shape))
        assert lp_norm(f, math.inf) == np.abs(f.values).max()

    def test_homogeneity(self, grid16, rng):
        f = random_field(grid16, rng)
        for p in (1.0, 2.0, 4.0, math.inf):
            assert lp_norm(3.5 * f, p) == pytest.approx(3.5 * lp_norm(f, p), rel=1e-12)

    def test_parseval(self, grid32, rng):
        f = Field.from_real(grid32, rng.standard_normal(grid32.shape))
        g = grid32
        spectral = g.L**g.d * np.sum(np.abs(f.coeffs) ** 2)
        assert lp_norm(f, 2.0) ** 2 == pytest.approx(spectral, rel=1e-10)

    def test_invalid_exponent(self, grid16):
        with pytest.raises(ValueError):
            lp_norm(Field.zeros(grid16), 0.5)


class TestDealias:
    def test_band_limited_unchanged(self, grid32, rng):
        f = random_field(grid32, rng)  # already inside |k_i| <= N/3
        assert rel_err(dealias(f).values, f.values) < 1e-14

    def test_near_nyquist_mode_zeroed(self, grid16):
        g = grid16
        coeffs = np.zeros(g.shape, dtype=complex)
        coeffs[g.N // 2 - 1, 0] = 1.0
        coeffs[-(g.N // 2 - 1), 0] = 1.0
        f = dealias(Field.from_spectral(g, coeffs))
        assert np.abs(f.values).max() < 1e-15

    def test_product_matches_fine_grid_oracle(self, grid32, rng):
        kcut = grid32.N // 3
        a = random_field(grid32, rng)
        b = random_field(grid32, rng)
        got = product(a, b)
        want = oracles.product_refined(a.values, b.values, kcut)
        assert rel_err(got.values, want) < 1e-10


class TestVectorField:
    def test_requires_shared_grid(self, grid16, grid32):
        with pytest.raises(GridError):
            VectorField([Field.zeros(grid16), Field.zeros(grid32)])

    def test_component_count_matches_dimension(self, grid16):
        with pytest.raises(GridError):
            VectorField([Field.zeros(grid16)])

    def test_mean_reads_zero_mode(self, grid16):
        f = Field.from_real(grid16, np.full(grid16.shape, 1.25))
        assert mean(f) == pytest.approx(1.25, rel=1e-14)
