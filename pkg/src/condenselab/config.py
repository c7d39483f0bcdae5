from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from condenselab.errors import ConfigError

CONFIG_ENV_VAR = "CONDENSELAB_CONFIG"

DEFAULT_CONFIG: Dict[str, Any] = {
    "output_root": "./out",
    "caps": {
        "dense_cap": 24,
        "bs_cap": 16,
        "cert_cap": 20,
        "dt_cap": 14,
        "andtree_cap": 5,
    },
    "enumeration_budget": 5_000_000,
    "default_seed": 0,
}

_CAP_KEYS = tuple(DEFAULT_CONFIG["caps"])


@dataclass(frozen=True)
class Config:
    dense_cap: int = 24
    bs_cap: int = 16
    cert_cap: int = 20
    dt_cap: int = 14
    andtree_cap: int = 5
    enumeration_budget: int = 5_000_000
    default_seed: int = 0
    output_root: str = "./out"

    def __post_init__(self) -> None:
        for key in (*_CAP_KEYS, "enumeration_budget"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            if value < 1:
                raise ConfigError(f"{key} must be >= 1, got {value}")
        if isinstance(self.default_seed, bool) or not isinstance(self.default_seed, int):
            raise ConfigError(f"default_seed must be an integer, got {self.default_seed!r}")

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT = Config()


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Overlay ``override`` on ``base``; sections such as ``caps`` merge key by key,
    so a file naming one cap keeps the defaults for the others."""
    merged = dict(base)
    for key, value in override.items():
        current = merged.get(key)
        if isinstance(current, dict) and isinstance(value, dict):
            value = _deep_merge(current, value)
        merged[key] = value
    return merged


def _candidate_config_paths() -> list[Path]:
    env_path = os.environ.get(CONFIG_ENV_VAR)
    paths = []
    if env_path:
        paths.append(Path(env_path))
    paths.append(Path("config.yaml"))
    return paths


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with path.open("r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark is not None else None
        raise ConfigError(f"cannot parse {path}: {exc.problem}", line=line) from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at top level")
    return data


def _hoist_flat_caps(data: Dict[str, Any]) -> Dict[str, Any]:
    # "dt_cap: 10" at top level is shorthand for caps.dt_cap
    flat = {key: data[key] for key in _CAP_KEYS if key in data}
    if not flat:
        return data
    rest = {key: value for key, value in data.items() if key not in flat}
    caps = dict(rest.get("caps") or {})
    caps.update(flat)
    rest["caps"] = caps
    return rest


def config_from_mapping(data: Dict[str, Any]) -> Config:
    merged = _deep_merge(DEFAULT_CONFIG, _hoist_flat_caps(data))
    unknown = set(merged) - set(DEFAULT_CONFIG)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    caps = merged["caps"]
    if not isinstance(caps, dict):
        raise ConfigError("caps must be a mapping")
    unknown_caps = set(caps) - set(_CAP_KEYS)
    if unknown_caps:
        raise ConfigError(f"unknown caps: {', '.join(sorted(unknown_caps))}")
    return Config(
        **{key: caps[key] for key in _CAP_KEYS},
        enumeration_budget=merged["enumeration_budget"],
        default_seed=merged["default_seed"],
        output_root=str(merged["output_root"]),
    )


def load_config(path: Optional[Path] = None) -> Config:
    if path is not None:
        if not Path(path).exists():
            raise ConfigError(f"config file {path} does not exist")
        return config_from_mapping(_read_yaml(Path(path)))
    for candidate in _candidate_config_paths():
        if candidate.exists():
            return config_from_mapping(_read_yaml(candidate))
    return config_from_mapping({})
