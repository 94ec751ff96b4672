"""
Configuration management for prioritizer runs.
Reads GA defaults and runtime limits from the environment (optionally seeded
from a .env file) and validates every numeric value against its allowed range.
"""

from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

from .errors import ConfigurationError
from .run_utils import EnvironmentValidator

DEFAULT_ENV_VARS: Dict[str, str] = {
    "PRIORITIZER_LOG_LEVEL": "INFO",
    "PRIORITIZER_SEED": "0",
    "PRIORITIZER_POPULATION_SIZE": "4",
    "PRIORITIZER_MAX_ITERATIONS": "12",
    "PRIORITIZER_CROSSOVER_PROB": "0.8",
    "PRIORITIZER_MUTATION_PROB": "0.2",
    "PRIORITIZER_ORACLE_MAX_BITS": "24",
    "PRIORITIZER_WORKERS": "1",
}

LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


class RunConfigManager:
    """
    Centralized configuration for CLI runs and tests.
    """

    # (type, min, max)
    NUMERIC_VALIDATIONS: Dict[str, Tuple[type, float, float]] = {
        "PRIORITIZER_SEED": (int, 0, 2**63 - 1),
        "PRIORITIZER_POPULATION_SIZE": (int, 2, 10000),
        "PRIORITIZER_MAX_ITERATIONS": (int, 0, 100000),
        "PRIORITIZER_CROSSOVER_PROB": (float, 0.0, 1.0),
        "PRIORITIZER_MUTATION_PROB": (float, 0.0, 1.0),
        "PRIORITIZER_ORACLE_MAX_BITS": (int, 1, 24),
        "PRIORITIZER_WORKERS": (int, 1, 64),
    }

    @classmethod
    def load_config(
        cls,
        extra_vars: Optional[Dict[str, str]] = None,
        dotenv_path: Optional[str] = None,
    ) -> Dict[str, Any]:
        """
        Load, validate and convert configuration values.

        Variables already present in the environment win over the .env file.

        Args:
            extra_vars: Additional optional variables with defaults
            dotenv_path: Explicit .env location (default: search upwards)

        Returns:
            Dictionary of typed configuration values

        Raises:
            ConfigurationError: If a value is malformed or out of range
        """
        load_dotenv(dotenv_path=dotenv_path, override=False)

        optional_vars = dict(DEFAULT_ENV_VARS)
        optional_vars.update(extra_vars or {})
        raw = EnvironmentValidator.get_optional_vars(optional_vars)

        config = cls._validate_numeric_configs(raw)

        level = str(config["PRIORITIZER_LOG_LEVEL"]).upper()
        if level not in LOG_LEVELS:
            raise ConfigurationError(
                f"PRIORITIZER_LOG_LEVEL must be one of {sorted(LOG_LEVELS)}, got '{level}'"
            )
        config["PRIORITIZER_LOG_LEVEL"] = level

        return config

    @classmethod
    def _validate_numeric_configs(cls, raw: Dict[str, str]) -> Dict[str, Any]:
        """
        Convert and range-check numeric configuration values.

        Raises:
            ConfigurationError: If numeric values are invalid
        """
        config: Dict[str, Any] = dict(raw)

        for var, (kind, _, _) in cls.NUMERIC_VALIDATIONS.items():
            if var not in config:
                continue
            try:
                value = kind(str(config[var]).strip())
            except ValueError:
                raise ConfigurationError(
                    f"{var} must be a valid {kind.__name__}, got '{config[var]}'"
                )
            config[var] = cls.check_range(var, value)

        return config

    @classmethod
    def check_range(cls, var: str, value: Any) -> Any:
        """
        Range-check one value, e.g. a command-line flag overriding ``var``.

        Raises:
            ConfigurationError: If the value lies outside the allowed range
        """
        _, min_val, max_val = cls.NUMERIC_VALIDATIONS[var]
        if not (min_val <= value <= max_val):
            raise ConfigurationError(f"{var} must be between {min_val} and {max_val}, got {value}")
        return value

    @classmethod
    def summarize(cls, config: Dict[str, Any]) -> Dict[str, Any]:
        """Configuration subset that is safe and useful to log."""
        return {key: value for key, value in config.items() if key.startswith("PRIORITIZER_")}
