"""Configuration for certification runs.

Lookup order: built-in defaults, then one YAML file (``--config`` or the first
of :attr:`Config.SEARCH_PATHS` that exists), then ``OT_*`` environment
variables. Command-line flags are applied later by the runner.
"""

import copy
import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import yaml

from .exact.precision import PrecisionPolicy
from .logging_config import get_logger

logger = get_logger(__name__)


class ConfigError(Exception):
    """Raised for unreadable or invalid configuration."""
    pass


def _merged(base: Dict, update: Dict) -> Dict:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(merged.get(key), dict) and isinstance(value, dict):
            merged[key] = _merged(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Defaults, merged with a YAML file, then with environment overrides."""

    DEFAULT_CONFIG = {
        'precision': {
            'working_bits': 128,
        },
        'checks': {
            'seed': 0,
            'trials': 1000,
            'leaf_samples': 200,
            'invariance_words': 100,
            'semipositivity_samples': 1000,
            'ddc_points': 10,
            'ddc_bits': 256,
            'ddc_step_exponent': 40,
            'ddc_threshold_exponent': 30,
            'embedding_trials': 100,
            'inclusion_pairs': 200,
        },
        'search': {
            'coeff_bound': 5,
            'max_results': 24,
            'workers': 1,
        },
        'monitoring': {
            'log_level': 'WARNING',
            'json_logs': True,
            'log_file': None,
        },
    }

    SEARCH_PATHS = (
        Path.home() / '.config' / 'ot-manifolds' / 'config.yaml',
        Path('/etc/ot-manifolds/config.yaml'),
        Path('./config.yaml'),
    )

    ENV_MAPPINGS: Dict[str, Tuple[Tuple[str, str], Callable[[str], Any]]] = {
        'OT_WORKING_BITS': (('precision', 'working_bits'), int),
        'OT_SEED': (('checks', 'seed'), int),
        'OT_TRIALS': (('checks', 'trials'), int),
        'OT_COEFF_BOUND': (('search', 'coeff_bound'), int),
        'OT_WORKERS': (('search', 'workers'), int),
        'OT_LOG_LEVEL': (('monitoring', 'log_level'), str.upper),
    }

    def __init__(self, config_path: Optional[str] = None):
        """
        Args:
            config_path: explicit YAML file; it must exist when given
        """
        self.config_path = config_path
        self.config = self._apply_env_overrides(self._read_file(self._source()))

    def _source(self) -> Optional[Path]:
        if self.config_path:
            path = Path(self.config_path)
            if not path.exists():
                raise ConfigError(f"Configuration file not found: {self.config_path}")
            return path
        return next((path for path in self.SEARCH_PATHS if path.exists()), None)

    def _read_file(self, path: Optional[Path]) -> Dict:
        config = copy.deepcopy(self.DEFAULT_CONFIG)
        if path is None:
            return config
        try:
            loaded = yaml.safe_load(path.read_text())
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"Failed to load config from {path}: {e}")
        if not loaded:
            return config
        if not isinstance(loaded, dict):
            raise ConfigError(f"Config file {path} must contain a mapping")
        logger.debug("config_loaded", path=str(path))
        return _merged(config, loaded)

    def _apply_env_overrides(self, config: Dict) -> Dict:
        for variable, ((section, key), convert) in self.ENV_MAPPINGS.items():
            raw = os.environ.get(variable)
            if raw is None:
                continue
            try:
                config.setdefault(section, {})[key] = convert(raw)
            except ValueError:
                logger.warning("invalid_env_override", variable=variable, value=raw)
                continue
            logger.debug("env_override_applied", variable=variable, section=section, key=key)
        return config

    def get(self, *keys: str, default: Any = None) -> Any:
        """Value at a key path such as ``('checks', 'trials')``, or ``default``."""
        node = self.config
        for key in keys:
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return node

    def set(self, *keys: str, value: Any):
        if not keys:
            raise ConfigError("At least one key required")
        *parents, last = keys
        node = self.config
        for key in parents:
            node = node.setdefault(key, {})
        node[last] = value

    def validate(self) -> bool:
        """Check ranges and enumerations; raises ConfigError on the first problem."""
        from .validators import ValidationError, Validator

        try:
            return Validator.validate_config(self.config)
        except ValidationError as e:
            raise ConfigError(f"Configuration validation failed: {e}")

    def policy(self) -> PrecisionPolicy:
        return PrecisionPolicy(int(self.get('precision', 'working_bits')))

    def to_dict(self) -> Dict:
        return copy.deepcopy(self.config)


def load_config(config_path: Optional[str] = None) -> Config:
    """Load configuration from file or defaults."""
    return Config(config_path)
