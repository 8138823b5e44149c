import numpy as np
import pytest

from enpp.cli import main
from enpp.littlewood_paley import BesovSpec, besov_norm
from enpp.snapshots import write_snapshot
from enpp.spectral import Field, make_grid

from conftest import random_field

CONFIG = """
[grid]
N = 16

[initial]
preset = charged-taylor-green

[run]
T = 0.1
dt = 0.005
cadence = 5
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG)
    return path


def test_simulate_exit_zero(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(config_file), "--out", str(out)]) == 0
    assert (out / "report.csv").exists()
    assert "simulate:" in capsys.readouterr().out


def test_config_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(CONFIG + "\n[run]\nviscocity = 1\n")
    code = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "viscosity" in err


def test_missing_config_exit_two(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.cfg")]) == 2


def test_numerical_failure_exit_three(tmp_path, capsys):
    bad = tmp_path / "imbalanced.cfg"
    bad.write_text("""
[grid]
N = 16
[initial]
preset = charged-blob
n_mean = 1.0
p_mean = 2.0
[run]
T = 0.05
dt = 0.005
cadence = 2
""")
    code = main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")])
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_renormalize_flag_rescues_imbalance(tmp_path):
    cfgp = tmp_path / "imbalanced.cfg"
    cfgp.write_text("""
[grid]
N = 16
[initial]
preset = charged-blob
n_mean = 1.0
p_mean = 2.0
[run]
T = 0.05
dt = 0.005
cadence = 2
""")
    code = main(["simulate", "--config", str(cfgp), "--out",
                 str(tmp_path / "o"), "--renormalize-charge"])
    assert code == 0


def test_besov_norm_prints_decimal(tmp_path, capsys):
    grid = make_grid(2, 16)
    rng = np.random.default_rng(5)
    f = random_field(grid, rng)
    snap = tmp_path / "field.bin"
    write_snapshot(snap, [f])
    code = main(["besov-norm", "--field", str(snap),
                 "--s", "1.5", "--p", "2", "--r", "2"])
    assert code == 0
    printed = float(capsys.readouterr().out.strip())
    want = besov_norm(f, BesovSpec(1.5, 2.0, 2.0))
    assert printed == pytest.approx(want, rel=1e-12)


def test_besov_norm_inf_exponents(tmp_path, capsys):
    grid = make_grid(2, 16)
    f = Field.from_real(grid, np.ones(grid.shape))
    snap = tmp_path / "field.bin"
    write_snapshot(snap, [f])
    code = main(["besov-norm", "--field", str(snap),
                 "--s", "0", "--p", "inf", "--r", "inf"])
    assert code == 0
    printed = float(capsys.readouterr().out.strip())
    assert printed == pytest.approx(1.0, rel=1e-12)


def test_besov_norm_bad_index(tmp_path):
    grid = make_grid(2, 16)
    snap = tmp_path / "field.bin"
    write_snapshot(snap, [Field.zeros(grid)])
    assert main(["besov-norm", "--field", str(snap),
                 "--s", "0", "--p", "2", "--r", "2", "--index", "4"]) == 2


def test_check_command(config_file, tmp_path, capsys):
    out = tmp_path / "out"
    main(["simulate", "--config", str(config_file), "--out", str(out)])
    code = main(["check", "--trajectory", str(out / "snapshots"),
                 "--out", str(tmp_path / "recheck.csv")])
    assert code == 0
    assert (tmp_path / "recheck.csv").exists()
    assert "violations = 0" in capsys.readouterr().out


def test_check_strict_flags_violations(tmp_path, capsys):
    # assemble a tiny trajectory with a manufactured mass jump
    from enpp.snapshots import snapshot_name, write_manifest

    grid = make_grid(2, 16)
    zeros = Field.zeros(grid)
    d = tmp_path / "snapshots"
    d.mkdir()
    good = Field.from_real(grid, np.full(grid.shape, 1.0))
    bumped = Field.from_real(grid, np.full(grid.shape, 1.5))
    write_snapshot(d / snapshot_name(0), [zeros, zeros, good, good])
    write_snapshot(d / snapshot_name(1), [zeros, zeros, bumped, bumped])
    write_manifest(d, [0.0, 0.1], 0.0)
    assert main(["check", "--trajectory", str(d)]) == 0  # warnings only
    assert main(["check", "--trajectory", str(d), "--strict"]) == 1
    assert "mass_n" in capsys.readouterr().err


def test_iterate_command(tmp_path, capsys):
    cfgp = tmp_path / "it.cfg"
    cfgp.write_text("""
[grid]
N = 16
[initial]
preset = charged-taylor-green
amplitude = 0.3
charge_amplitude = 0.05
[run]
T = 0.05
dt = 0.005
cadence = 1
[iterate]
m_max = 6
tol = 1e-6
""")
    code = main(["iterate", "--config", str(cfgp), "--out", str(tmp_path / "o")])
    assert code == 0
    out = capsys.readouterr().out
    assert "converged = True" in out
    assert (tmp_path / "o" / "iterations.csv").exists()


def test_invlimit_command(tmp_path, capsys):
    cfgp = tmp_path / "inv.cfg"
    cfgp.write_text("""
[grid]
N = 16
[initial]
preset = charged-taylor-green
[run]
T = 0.05
dt = 0.005
cadence = 2
[invlimit]
nu_list = 1e-1, 3e-2, 1e-2
""")
    code = main(["invlimit", "--config", str(cfgp), "--out", str(tmp_path / "o")])
    assert code == 0
    assert "slope" in capsys.readouterr().out
    assert (tmp_path / "o" / "rates.csv").exists()
    assert (tmp_path / "o" / "ratefit.txt").exists()
