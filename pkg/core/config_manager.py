"""
Configuration Manager.

Handles loading application configuration from a TOML file.

The file is looked up in $SPANDIAG_CONFIG first, then in
~/.config/spandiag/config.toml. Missing files fall back to DEFAULTS;
nothing is ever written to the user's home directory.
"""

import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Optional
import logging


logger = logging.getLogger(__name__)


# =============================================================================
# Constants
# =============================================================================

APP_NAME = "spandiag"
USER_CONFIG_DIR = Path.home() / ".config" / APP_NAME
PROJECT_DIR = Path(__file__).parent.parent  # Go up from core/ to project root
CONFIG_ENV_VAR = "SPANDIAG_CONFIG"
THREADS_ENV_VAR = "SPANDIAG_THREADS"
DEFAULT_RULES_PATH = PROJECT_DIR / "templates" / "rules" / "es.toml"


# =============================================================================
# Default Configuration
# =============================================================================

DEFAULTS: dict[str, dict[str, Any]] = {
    "logging": {
        "enabled": True,
        "file": "",  # Empty string means no file logging
        "console": True,  # Console output goes to stderr
        "level": "WARNING",
    },
    "parsing": {
        "strict": False,
    },
    "scoring": {
        "average": "micro",
        "kappa_alphabet": "binary",
    },
    "prediction": {
        "policy": "backoff",
    },
    "rules": {
        "path": "",  # Empty string means the shipped Spanish example rules
    },
}


def _resolve_config_path() -> Path:
    """Pick the config file: environment override first, then user dir."""
    override = os.environ.get(CONFIG_ENV_VAR, "")
    if override:
        return Path(override).expanduser()
    return USER_CONFIG_DIR / "config.toml"


# =============================================================================
# Configuration Class
# =============================================================================

class Config:
    """Application configuration manager."""

    def __init__(self, config_path: Optional[Path] = None) -> None:
        """Initialize configuration.

        Args:
            config_path: Explicit TOML file; resolved from the environment if None
        """
        self._config: dict[str, dict[str, Any]] = {}
        self.reload(config_path)

    def _load(self) -> None:
        """Load configuration from TOML file."""
        if self._config_path.exists():
            try:
                with open(self._config_path, "rb") as f:
                    self._config = tomllib.load(f)
            except Exception as e:
                logger.warning(f"Could not load config {self._config_path}: {e}")
                self._config = {}
        else:
            self._config = {}

    def reload(self, config_path: Optional[Path] = None) -> None:
        """Re-read configuration, optionally from a different file."""
        self._config_path = Path(config_path) if config_path else _resolve_config_path()
        self._load()

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get a configuration value."""
        if section in self._config and key in self._config[section]:
            return self._config[section][key]

        if section in DEFAULTS and key in DEFAULTS[section]:
            return DEFAULTS[section][key]

        return default

    def get_path(self, section: str, key: str) -> Optional[Path]:
        """Get a configuration value as an expanded Path, None when unset."""
        value = self.get(section, key, "")
        if not value:
            return None
        return Path(value).expanduser()

    @property
    def config_path(self) -> Path:
        """Config file this instance was loaded from (may not exist)."""
        return self._config_path

    # =========================================================================
    # Parsing Properties
    # =========================================================================

    @property
    def strict_parsing(self) -> bool:
        """Whether orphan I- tags are errors instead of being repaired."""
        return bool(self.get("parsing", "strict", False))

    # =========================================================================
    # Scoring Properties
    # =========================================================================

    @property
    def average(self) -> str:
        """Score averaging mode (micro or macro)."""
        return self.get("scoring", "average", "micro")

    @property
    def kappa_alphabet(self) -> str:
        """Tag alphabet for Cohen's kappa (binary or full)."""
        return self.get("scoring", "kappa_alphabet", "binary")

    @property
    def prediction_policy(self) -> str:
        """Fallback policy for types missing from the benchmark."""
        return self.get("prediction", "policy", "backoff")

    @property
    def rules_path(self) -> Path:
        """Compliance rules file; the shipped Spanish example by default."""
        return self.get_path("rules", "path") or DEFAULT_RULES_PATH

    @property
    def threads(self) -> int:
        """Worker threads, from the environment only."""
        raw = os.environ.get(THREADS_ENV_VAR, "")
        try:
            return max(1, int(raw)) if raw else 1
        except ValueError:
            logger.warning(f"Ignoring non-integer {THREADS_ENV_VAR}={raw!r}")
            return 1

    # =========================================================================
    # Logging Properties
    # =========================================================================

    @property
    def logging_enabled(self) -> bool:
        """Whether logging is enabled."""
        return self.get("logging", "enabled", True)

    @property
    def logging_file(self) -> Optional[str]:
        """Log file path. None means no file logging."""
        value = self.get("logging", "file", "")
        if not value:
            return None
        path = Path(value).expanduser()
        return str(path)

    @property
    def logging_level(self) -> str:
        """Logging level (DEBUG, INFO, WARNING, ERROR)."""
        return self.get("logging", "level", "WARNING")

    @property
    def logging_console(self) -> bool:
        """Whether to log to the console (stderr)."""
        return self.get("logging", "console", True)


# =============================================================================
# Global Instance
# =============================================================================

config = Config()
