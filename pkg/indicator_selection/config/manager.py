"""
Configuration Manager for experiment profiles.

Handles loading and merging configuration from multiple sources:
- Packaged YAML profiles (default, fast, full)
- A user experiment file (YAML or sectioned INI)
- Environment variables (INDSEL_ prefix)
- Explicit overrides from the command line
"""

import configparser
import os
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv

from indicator_selection.exceptions import ConfigError
from indicator_selection.utils.logger import get_logger

ENV_PREFIX = "INDSEL_"
PROFILES = ("default", "fast", "full")
YAML_SUFFIXES = (".yaml", ".yml")
INI_SUFFIXES = (".ini", ".cfg")


def _split_top_level(text: str) -> list:
    """Split on commas outside parentheses (``sma(length=5), bbands(length=20,std=2)``)."""
    items, depth, start = [], 0, 0
    for i, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char == "," and depth == 0:
            items.append(text[start:i])
            start = i + 1
    items.append(text[start:])
    return items


def packaged_config_dir() -> Path:
    return Path(str(resources.files("indicator_selection.config") / "environments"))


class ConfigManager:
    """
    Layered experiment configuration.

    Features:
    - Profile overlays on top of the packaged defaults
    - YAML and INI experiment files
    - Environment variable override with ``__`` nesting
    - Dot-notation access to the merged mapping
    """

    def __init__(
        self,
        profile: Optional[str] = None,
        config_file: Optional[Union[str, Path]] = None,
        config_dir: Optional[Union[str, Path]] = None,
    ):
        """
        Initialize configuration manager.

        Args:
            profile: Profile overlay (default/fast/full)
            config_file: Optional user experiment file
            config_dir: Directory holding the profile YAML files
        """
        self.logger = get_logger(self.__class__.__name__)

        load_dotenv()

        self.profile = profile or os.getenv(f"{ENV_PREFIX}PROFILE") or "default"
        if self.profile not in PROFILES:
            raise ConfigError(f"unknown profile {self.profile!r}; expected one of {', '.join(PROFILES)}")

        self.config_dir = Path(config_dir) if config_dir else packaged_config_dir()
        self.config_file = Path(config_file) if config_file else None

        self._config: Dict[str, Any] = {}
        self._load_configurations()

        self.logger.debug("configuration loaded", profile=self.profile, file=str(self.config_file or "-"))

    def _load_configurations(self) -> None:
        """Load configuration sources in order of precedence."""
        self._load_config_file(self.config_dir / "default.yaml")

        if self.profile != "default":
            self._load_config_file(self.config_dir / f"{self.profile}.yaml")

        if self.config_file is not None:
            self.load_experiment_file(self.config_file)

        self._apply_env_overrides()

    def _load_config_file(self, path: Path, required: bool = True) -> None:
        if not path.exists():
            if required:
                raise ConfigError(f"configuration file not found: {path}")
            return

        try:
            with open(path, "r", encoding="utf-8") as f:
                config_data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        if not isinstance(config_data, dict):
            raise ConfigError(f"{path} must hold a mapping at top level")

        self._merge_config(self._config, config_data)
        self.logger.debug("loaded configuration", path=str(path))

    def load_experiment_file(self, path: Union[str, Path]) -> None:
        """
        Merge a user experiment file.

        Args:
            path: ``.yaml``/``.yml`` or ``.ini``/``.cfg`` file

        Raises:
            ConfigError: missing file, unknown suffix or parse failure
        """
        path = Path(path)
        suffix = path.suffix.lower()
        if suffix in YAML_SUFFIXES:
            self._load_config_file(path)
        elif suffix in INI_SUFFIXES:
            if not path.exists():
                raise ConfigError(f"configuration file not found: {path}")
            self._merge_config(self._config, self._read_ini(path))
            self.logger.debug("loaded configuration", path=str(path))
        else:
            raise ConfigError(f"unsupported configuration format: {path.name}")

    def _read_ini(self, path: Path) -> Dict[str, Any]:
        """
        Read a sectioned key-value file into the nested layout.

        ``[regressors.MLP]`` becomes ``regressors.MLP``; ``[tuning.Ridge]``
        becomes ``tuning.grids.Ridge`` whose values are always lists.
        """
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str  # keep parameter case
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e

        data: Dict[str, Any] = {}
        for section in parser.sections():
            parts = [p.strip() for p in section.split(".")]
            is_grid = parts[0] == "tuning" and len(parts) == 2
            if is_grid:
                parts = ["tuning", "grids", parts[1]]
            target = data
            for part in parts:
                target = target.setdefault(part, {})
            for key, raw in parser.items(section):
                value = self._convert_value(raw)
                if is_grid and not isinstance(value, list):
                    value = [value]
                target[key] = value
        return data

    def _merge_config(self, base: Dict[str, Any], override: Dict[str, Any]) -> None:
        """
        Recursively merge configuration dictionaries.

        Args:
            base: Base configuration dictionary
            override: Override configuration dictionary
        """
        for key, value in override.items():
            if key in base and isinstance(base[key], dict) and isinstance(value, dict):
                self._merge_config(base[key], value)
            else:
                base[key] = value

    def _apply_env_overrides(self) -> None:
        """Apply INDSEL_ environment variables; ``__`` separates levels."""
        for key, value in sorted(os.environ.items()):
            if not key.startswith(ENV_PREFIX) or key == f"{ENV_PREFIX}PROFILE":
                continue
            # INDSEL_DATA__TRAIN_FRACTION -> data.train_fraction
            config_key = ".".join(part.lower() for part in key[len(ENV_PREFIX):].split("__"))
            self._set_nested_value(self._config, config_key, self._convert_value(value))
            self.logger.debug("environment override", key=config_key)

    def _set_nested_value(self, config: Dict[str, Any], key_path: str, value: Any) -> None:
        keys = key_path.split(".")
        current = config

        for key in keys[:-1]:
            if not isinstance(current.get(key), dict):
                current[key] = {}
            current = current[key]

        current[keys[-1]] = value

    def _convert_value(self, value: Any) -> Any:
        """
        Convert a string value to its natural type.

        Booleans, ``none``/``null``, ints, floats and comma-separated lists
        are recognised; anything else stays a string.
        """
        if not isinstance(value, str):
            return value

        text = value.strip()
        items = _split_top_level(text)
        if len(items) > 1:
            return [self._convert_value(item) for item in items if item.strip()]

        lowered = text.lower()
        if lowered in ("true", "yes", "on"):
            return True
        if lowered in ("false", "no", "off"):
            return False
        if lowered in ("none", "null", ""):
            return None

        try:
            return int(text)
        except ValueError:
            pass
        try:
            return float(text)
        except ValueError:
            pass

        return text

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get configuration value using dot notation.

        Args:
            key_path: Dot notation key path (e.g., 'selection.cv_folds')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        current: Any = self._config
        try:
            for key in key_path.split("."):
                current = current[key]
            return current
        except (KeyError, TypeError):
            return default

    def set(self, key_path: str, value: Any, convert: bool = True) -> None:
        """
        Set configuration value using dot notation.

        Args:
            key_path: Dot notation key path
            value: Value to set
            convert: Apply string conversion (off for literal paths)
        """
        self._set_nested_value(self._config, key_path, value if not convert else self._convert_value(value))

    def get_section(self, section: str) -> Dict[str, Any]:
        return self.get(section, {}) or {}

    def to_dict(self) -> Dict[str, Any]:
        """Deep copy of the merged configuration."""
        return yaml.safe_load(yaml.safe_dump(self._config))

    def __repr__(self) -> str:
        return f"ConfigManager(profile={self.profile}, file={self.config_file})"
