import pytest

from condenselab.config import CONFIG_ENV_VAR, DEFAULT, Config, config_from_mapping, load_config
from condenselab.errors import ConfigError


def test_load_config_defaults_without_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)

    config = load_config()
    assert config == DEFAULT
    assert config.dt_cap == 14
    assert config.enumeration_budget == 5_000_000


def test_load_config_overrides(tmp_path, monkeypatch):
    config_path = tmp_path / "config.yaml"
    config_path.write_text("output_root: /tmp/out\ncaps:\n  dt_cap: 10\ndefault_seed: 7\n", encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(config_path))

    config = load_config()
    assert config.output_root == "/tmp/out"
    assert config.dt_cap == 10
    assert config.bs_cap == 16
    assert config.default_seed == 7


def test_explicit_path_wins_over_environment(tmp_path, monkeypatch):
    env_path = tmp_path / "env.yaml"
    env_path.write_text("dt_cap: 3\n", encoding="utf-8")
    explicit = tmp_path / "explicit.yaml"
    explicit.write_text("dt_cap: 9\n", encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(env_path))

    assert load_config(explicit).dt_cap == 9


def test_flat_cap_keys_are_hoisted():
    assert config_from_mapping({"andtree_cap": 4}).andtree_cap == 4
    mixed = config_from_mapping({"dt_cap": 5, "caps": {"bs_cap": 8}})
    assert (mixed.dt_cap, mixed.bs_cap, mixed.cert_cap) == (5, 8, 20)


def test_zero_cap_is_rejected():
    with pytest.raises(ConfigError):
        config_from_mapping({"caps": {"dt_cap": 0}})
    with pytest.raises(ConfigError):
        Config(bs_cap=0)


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError):
        config_from_mapping({"dt_caps": 3})
    with pytest.raises(ConfigError):
        config_from_mapping({"caps": {"sparsity_cap": 3}})


def test_malformed_yaml_reports_line(tmp_path):
    config_path = tmp_path / "config.yaml"
    config_path.write_text("caps:\n  dt_cap: 10\n  bs_cap: [1,\n", encoding="utf-8")

    with pytest.raises(ConfigError) as info:
        load_config(config_path)
    assert info.value.line is not None
    assert "line" in str(info.value)


def test_missing_explicit_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_as_dict_echoes_every_field():
    data = DEFAULT.as_dict()
    assert data["dense_cap"] == 24
    assert set(data) == {
        "dense_cap", "bs_cap", "cert_cap", "dt_cap", "andtree_cap",
        "enumeration_budget", "default_seed", "output_root",
    }
