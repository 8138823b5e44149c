import math

import pytest

from enpp.config import parse_config, parse_config_text
from enpp.errors import ConfigError
from enpp.littlewood_paley import BesovSpec

MINIMAL = """
[grid]
N = 32

[initial]
preset = taylor-green

[run]
T = 0.5
"""


def test_minimal_config_fills_defaults():
    cfg = parse_config_text(MINIMAL)
    assert cfg.N == 32
    assert cfg.preset == "taylor-green"
    assert cfg.T == 0.5
    assert cfg.d == 2
    assert cfg.L == pytest.approx(2 * math.pi)
    assert cfg.dt is None  # auto CFL
    assert cfg.cadence == 10
    assert cfg.driver == "enpp"
    assert cfg.mode == "simulate"
    assert cfg.besov_specs == (BesovSpec(2.6, 2, 2), BesovSpec(1.6, 2, 2))


def test_file_round_trip(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(MINIMAL)
    cfg = parse_config(path)
    assert cfg.N == 32


def test_missing_file():
    with pytest.raises(ConfigError, match="not found"):
        parse_config("/nonexistent/run.cfg")


def test_comments_and_blank_lines():
    text = MINIMAL + "\n# trailing comment\n\n[run]\nnu = 0.01  # inline\n"
    cfg = parse_config_text(text)
    assert cfg.nu == 0.01


def test_negative_horizon_names_field():
    bad = MINIMAL.replace("T = 0.5", "T = -1.0")
    with pytest.raises(ConfigError, match="'T'"):
        parse_config_text(bad)


def test_unknown_key_suggests_close_match():
    bad = MINIMAL + "\n[run]\nviscocity = 0.1\n"
    with pytest.raises(ConfigError) as err:
        parse_config_text(bad, source="run.cfg")
    message = str(err.value)
    assert "viscocity" in message
    assert "viscosity" in message  # suggestion
    assert "run.cfg:" in message  # line-numbered source


def test_unknown_section_rejected():
    bad = MINIMAL + "\n[grids]\nfoo = 1\n"
    with pytest.raises(ConfigError, match=r"unknown section"):
        parse_config_text(bad)


def test_syntax_error_carries_line_number():
    bad = MINIMAL + "\n[run]\nthis is not a key value line\n"
    with pytest.raises(ConfigError) as err:
        parse_config_text(bad, source="x.cfg")
    assert "x.cfg:" in str(err.value)


def test_cadence_zero_rejected():
    bad = MINIMAL + "\n[run]\ncadence = 0\n"
    with pytest.raises(ConfigError, match="cadence"):
        parse_config_text(bad)


def test_besov_spec_list_with_inf():
    text = MINIMAL + "\n[measure]\nbesov = 1.5,2,2; 0.5,inf,inf\n"
    cfg = parse_config_text(text)
    assert cfg.besov_specs == (BesovSpec(1.5, 2, 2),
                               BesovSpec(0.5, math.inf, math.inf))


def test_auto_dt_keyword():
    text = MINIMAL + "\n[run]\ndt = auto\n"
    assert parse_config_text(text).dt is None


def test_nu_list_must_decrease():
    bad = MINIMAL + "\n[invlimit]\nnu_list = 1e-3, 1e-2, 1e-1\n"
    with pytest.raises(ConfigError, match="decreasing"):
        parse_config_text(bad)


def test_nu_list_needs_three_entries():
    bad = MINIMAL + "\n[invlimit]\nnu_list = 1e-1, 1e-2\n"
    with pytest.raises(ConfigError, match="three"):
        parse_config_text(bad)


def test_bad_driver_rejected():
    bad = MINIMAL + "\n[run]\ndriver = spectralish\n"
    with pytest.raises(ConfigError, match="driver"):
        parse_config_text(bad)


def test_key_outside_section_rejected():
    with pytest.raises(ConfigError, match="outside"):
        parse_config_text("N = 32\n")


def test_required_keys_enforced():
    with pytest.raises(ConfigError, match="'N'"):
        parse_config_text("[initial]\npreset = taylor-green\n[run]\nT = 1\n")
    with pytest.raises(ConfigError, match="preset"):
        parse_config_text("[grid]\nN = 32\n[run]\nT = 1\n")
    with pytest.raises(ConfigError, match="'T'"):
        parse_config_text("[grid]\nN = 32\n[initial]\npreset = taylor-green\n")
