import numpy as np
import pytest

from enpp.errors import ConfigError
from enpp.presets import initial_state
from enpp.spectral import divergence, lp_norm, lp_norm_vector, mean


@pytest.mark.parametrize("preset", ["taylor-green", "charged-taylor-green",
                                    "charged-blob", "random-solenoidal"])
def test_presets_satisfy_solver_preconditions(preset, grid32):
    st = initial_state(preset, grid32, seed=11)
    assert lp_norm(divergence(st.u), 2.0) <= 1e-10 * max(
        lp_norm_vector(st.u, 2.0), 1e-300)
    assert mean(st.n) == pytest.approx(mean(st.p), abs=1e-12)
    assert st.n.values.min() >= 0.0
    assert st.p.values.min() >= 0.0


def test_charged_taylor_green_structure(grid32):
    st = initial_state("charged-taylor-green", grid32, charge_amplitude=0.1)
    x = grid32.coordinates()
    assert np.allclose(st.n.values, 1.0 + 0.1 * np.cos(x[0]) * np.cos(x[1]),
                       atol=1e-13)
    assert np.allclose(st.p.values, 1.0 - 0.1 * np.cos(x[0]) * np.cos(x[1]),
                       atol=1e-13)
    assert st.u.magnitude().max() == pytest.approx(1.0, rel=1e-12)


def test_taylor_green_3d(rng):
    from enpp.spectral import make_grid

    g = make_grid(3, 16)
    st = initial_state("taylor-green", g)
    assert lp_norm(divergence(st.u), 2.0) < 1e-12


def test_random_solenoidal_seeded_determinism(grid32):
    a = initial_state("random-solenoidal", grid32, seed=4, charge_amplitude=0.2)
    b = initial_state("random-solenoidal", grid32, seed=4, charge_amplitude=0.2)
    assert np.array_equal(a.u[0].values, b.u[0].values)
    assert np.array_equal(a.n.values, b.n.values)
    c = initial_state("random-solenoidal", grid32, seed=5, charge_amplitude=0.2)
    assert not np.array_equal(a.u[0].values, c.u[0].values)


def test_charge_amplitude_range_enforced(grid32):
    with pytest.raises(ConfigError):
        initial_state("charged-taylor-green", grid32, charge_amplitude=1.5)


def test_unknown_preset(grid32):
    with pytest.raises(ConfigError, match="unknown preset"):
        initial_state("tailor-green", grid32)
