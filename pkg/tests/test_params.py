import dataclasses
import math

import pytest
from scipy.constants import Boltzmann, hbar

from src.core.errors import ConfigError, ValidationError
from src.core.param_config import ParamConfig, parse_override
from src.core.params import (
    Delta2Mode,
    collective_coupling,
    default_params,
    gamma_m_from_q,
    load_config,
    render_config,
    thermal_occupancy,
    thermal_phonons,
    validate,
    with_overrides,
)


def test_default_params():
    params = default_params()
    assert params.kappa1 == 0.1
    assert params.kappa2 == 3.0
    assert params.delta2 == 1.0
    assert params.delta2_mode is Delta2Mode.EFFECTIVE
    assert params.q_m == 8.0e4
    assert params.gamma_m == pytest.approx(1.0 / 8.0e4, rel=1e-15)
    assert params.omega_m == pytest.approx(2.0 * math.pi * 20.0e6)


def test_thermal_occupancy_at_300_mk():
    assert thermal_phonons(default_params()) == pytest.approx(312.0, abs=1.0)


def test_thermal_occupancy_limits():
    assert thermal_occupancy(1.0e8, 0.0) == 0.0
    with pytest.raises(ValidationError):
        thermal_occupancy(1.0e8, -1.0)
    with pytest.raises(ValidationError):
        thermal_occupancy(0.0, 1.0)


def test_thermal_occupancy_monotone():
    temperatures = [0.01, 0.1, 0.3, 1.0, 10.0]
    values = [thermal_occupancy(1.0e8, t) for t in temperatures]
    assert all(b > a for a, b in zip(values, values[1:]))
    frequencies = [1.0e6, 1.0e7, 1.0e8, 1.0e9]
    values = [thermal_occupancy(w, 0.3) for w in frequencies]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_thermal_occupancy_unit_at_log_two():
    omega = 1.0e8
    temperature = hbar * omega / (Boltzmann * math.log(2.0))
    assert thermal_occupancy(omega, temperature) == pytest.approx(1.0, rel=1e-12)


def test_gamma_m_from_q():
    assert gamma_m_from_q(8.0e4) == pytest.approx(1.25e-5)
    with pytest.raises(ValidationError):
        gamma_m_from_q(0.0)


def test_collective_coupling():
    params = with_overrides(default_params(), {"N": 200, "g_a": 0.1})
    coupling = collective_coupling(params)
    assert coupling.squared == pytest.approx(2.0, rel=1e-14)
    assert coupling.value == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_validate_reports_without_raising():
    params = dataclasses.replace(default_params(), kappa1=-0.1)
    report = validate(params)
    assert not report.ok
    assert any("negative decay rate" in v for v in report.violations)
    with pytest.raises(ValidationError):
        params.checked()


def test_validate_notes_inactive_channels():
    report = validate(default_params())
    assert report.ok
    assert "atomic channel inactive" in report.notes
    assert "auxiliary cavity decoupled" in report.notes

    report = validate(with_overrides(default_params(), {"J": 1.0, "g_a": 0.1}))
    assert report.notes == ()


@pytest.mark.parametrize("overrides", [
    {},
    {"J": 1.0, "g_a": 0.1},
    {"delta2": 0.3, "gamma_m": 2.5e-5, "epsilon_phase": 0.7},
    {"kappa1": 1.0 / 3.0, "N": 0, "temperature_k": 0.0},
])
def test_render_config_round_trip(overrides):
    params = with_overrides(default_params(), overrides)
    assert load_config(render_config(params)) == params


def test_load_config_with_comments_and_defaults():
    text = "# 腔耦合\nJ = 1.0\ng_a = 0.1  # 单原子耦合\n\ndelta2 = 0.5\n"
    params = load_config(text)
    assert params.J == 1.0
    assert params.g_a == 0.1
    assert params.delta2_mode is Delta2Mode.BARE
    assert params.delta2 == 0.5
    assert params.kappa2 == 3.0


def test_load_config_unknown_key_reports_line():
    with pytest.raises(ConfigError) as info:
        load_config("kappa1 = 0.1\nkappa3 = 2.0\n")
    assert info.value.line == 2


@pytest.mark.parametrize("text", [
    "kappa1 = = 3",
    "kappa1 = \"fast\"",
    "N = 200.5",
    "gamma_m = 1e-3\nq_m = 8e4",
    "delta2 = 1.0\ndelta2_effective = 1.0",
    "kappa2 = -3.0",
])
def test_load_config_rejects(text):
    with pytest.raises(ValidationError):
        load_config(text)


def test_consistent_gamma_m_and_q_m_allowed():
    params = load_config("gamma_m = 1.25e-5\nq_m = 8e4\n")
    assert params.gamma_m == 1.25e-5


def test_with_overrides_switches_detuning_mode():
    params = with_overrides(default_params(), {"delta2": 0.5})
    assert params.delta2_mode is Delta2Mode.BARE
    params = with_overrides(params, {"delta2_effective": -0.1})
    assert params.is_effective
    assert params.delta2 == -0.1


def test_with_overrides_unknown_key():
    with pytest.raises(ConfigError):
        with_overrides(default_params(), {"kappa3": 1.0})


def test_drive_phase():
    params = with_overrides(default_params(), {"epsilon_phase": math.pi / 2})
    assert params.drive == pytest.approx(6000.0j, abs=1e-9)


def test_parse_override():
    assert parse_override("J=1") == ("J", 1)
    assert parse_override(" g_a = 0.1 ") == ("g_a", 0.1)
    for bad in ("J", "=1", "J=", "J=[1"):
        with pytest.raises(ConfigError):
            parse_override(bad)


def test_param_config_applies_overrides_after_file(tmp_path):
    path = tmp_path / "params.toml"
    path.write_text("J = 0.5\nkappa1 = 1.0\n", encoding="utf-8")
    config = ParamConfig(str(path), ["J=1", "g_a=0.1"])
    assert config.params.J == 1.0
    assert config.params.kappa1 == 1.0
    assert config.params.g_a == 0.1
    assert config.describe_overrides() == "J=1, g_a=0.1"
    assert config.get_config_path() == path


def test_param_config_save_round_trip(tmp_path):
    config = ParamConfig(overrides=["N=100", "delta2_effective=-1.0"])
    saved = config.save_config(tmp_path / "out" / "params.toml")
    assert ParamConfig(str(saved)).params == config.params


def test_param_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ParamConfig(str(tmp_path / "missing.toml"))
