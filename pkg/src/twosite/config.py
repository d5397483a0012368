import os
import configparser
from pathlib import Path
from typing import Dict, Any, Optional, List, Mapping
import logging

logger = logging.getLogger(__name__)

# Define allowed values for configuration options
ALLOWED_LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
ALLOWED_OUTPUT_FORMATS = ['csv', 'json']

# Numeric settings and the (exclusive lower, inclusive upper) bounds they must respect
FLOAT_BOUNDS: Mapping[str, Mapping[str, tuple]] = {
    'NUMERICS': {
        'null_space_rtol': (0.0, 1e-3),
        'eigvec_cond_limit': (1.0, 1e16),
        'trace_tol': (0.0, 1e-3),
        'psd_tol': (0.0, 1e-3),
    },
}
INT_BOUNDS: Mapping[str, Mapping[str, tuple]] = {
    'SWEEP': {
        'workers': (1, 256),
        'default_points': (2, 1_000_000),
    },
    'OUTPUT': {
        'significant_digits': (1, 17),
    },
}

CONFIG_PATH_ENV_VAR = 'TWOSITE_CONFIG_PATH'


class TwoSiteConfig:
    """Application settings stored in an INI file (numerics, sweep workers, output)"""

    DEFAULT_CONFIG = {
        'DEFAULT': {
            'log_level': 'INFO',
            'output_dir': '~/twosite_runs',
        },
        'NUMERICS': {
            'null_space_rtol': '1e-12',
            'eigvec_cond_limit': '1e8',
            'trace_tol': '1e-12',
            'psd_tol': '1e-12',
        },
        'SWEEP': {
            'workers': '1',
            'default_points': '200',
        },
        'OUTPUT': {
            'format': 'csv',
            'significant_digits': '17',
        },
    }

    def __init__(self, config_path_override: Optional[str] = None):
        self.config = configparser.ConfigParser(
            defaults=self.DEFAULT_CONFIG['DEFAULT'],
            inline_comment_prefixes=('#', ';'),
            interpolation=None,
        )
        self.config_path = self._get_config_path(config_path_override)
        self._load_or_create_config()

    def _get_config_path(self, config_path_override: Optional[str] = None) -> Path:
        """Determines the configuration file path, prioritizing override, then env var, then default."""
        if config_path_override:
            path = Path(config_path_override).expanduser()
            logger.debug(f"Using specified config path: {path}")
            return path
        elif CONFIG_PATH_ENV_VAR in os.environ:
            path = Path(os.environ[CONFIG_PATH_ENV_VAR]).expanduser()
            logger.debug(f"Using config path from {CONFIG_PATH_ENV_VAR}: {path}")
            return path
        else:
            default_path = Path.home() / ".config" / "twosite" / "twosite.cfg"
            logger.debug(f"Using default config path: {default_path}")
            return default_path

    def _load_or_create_config(self):
        """Loads the config file or creates it with defaults if it doesn't exist."""
        if self.config_path.exists():
            logger.debug(f"Loading configuration from: {self.config_path}")
            self.config.read(self.config_path)
            self._ensure_defaults()
        else:
            logger.info(f"Configuration file not found at {self.config_path}. Creating default config.")
            self._create_default_config()
            self.save_config()

    def _ensure_defaults(self):
        """Ensures that all default sections and keys exist in the loaded config."""
        needs_save = False
        for key, value in self.DEFAULT_CONFIG['DEFAULT'].items():
            if key not in self.config.defaults():
                self.config.defaults()[key] = str(value)
                needs_save = True
                logger.info(f"Added missing default option: [DEFAULT] {key} = {value}")

        for section, defaults in self.DEFAULT_CONFIG.items():
            if section == 'DEFAULT':
                continue
            if not self.config.has_section(section):
                self.config.add_section(section)
                needs_save = True
                logger.info(f"Added missing default section: [{section}]")
            for key, value in defaults.items():
                if not self.config.has_option(section, key):
                    self.config.set(section, key, str(value))
                    needs_save = True
                    logger.info(f"Added missing default key: [{section}] {key} = {value}")

        if needs_save:
            logger.info("Saving configuration file with added default options.")
            self.save_config()

    def _create_default_config(self):
        """Populates the ConfigParser object with default settings for non-DEFAULT sections."""
        for section, defaults in self.DEFAULT_CONFIG.items():
            if section == 'DEFAULT':
                continue
            if not self.config.has_section(section):
                self.config.add_section(section)
            for key, value in defaults.items():
                self.config.set(section, key, str(value))

    def save_config(self):
        """Save the current configuration to file"""
        try:
            self.config_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_path, 'w') as configfile:
                self.config.write(configfile)
            logger.debug(f"Configuration saved to {self.config_path}")
        except IOError as e:
            logger.error(f"Failed to save configuration file {self.config_path}: {e}")

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get a configuration value; options missing from a section fall back to [DEFAULT]."""
        if section != 'DEFAULT' and not self.config.has_section(section):
            logger.warning(f"Config section [{section}] not found.")
            return default
        value = self.config.get(section, key, fallback=default)
        if key == 'output_dir' and isinstance(value, str) and value:
            return str(Path(value).expanduser())
        return value

    def getint(self, section: str, key: str, default: Optional[int] = None) -> Optional[int]:
        value = self.get(section, key, None)
        return default if value is None else int(value)

    def getfloat(self, section: str, key: str, default: Optional[float] = None) -> Optional[float]:
        value = self.get(section, key, None)
        return default if value is None else float(value)

    def _validate(self, section: str, key: str, str_value: str) -> Optional[str]:
        """Return an error message if the value is not allowed, else None."""
        if key == 'log_level' and str_value.upper() not in ALLOWED_LOG_LEVELS:
            return f"Invalid log_level '{str_value}'. Allowed: {', '.join(ALLOWED_LOG_LEVELS)}"
        if section == 'OUTPUT' and key == 'format' and str_value not in ALLOWED_OUTPUT_FORMATS:
            return f"Invalid format '{str_value}'. Allowed: {', '.join(ALLOWED_OUTPUT_FORMATS)}"

        if key in FLOAT_BOUNDS.get(section, {}):
            low, high = FLOAT_BOUNDS[section][key]
            try:
                number = float(str_value)
            except ValueError:
                return f"[{section}].{key} must be a number, got '{str_value}'"
            if not low < number <= high:
                return f"[{section}].{key} must be in ({low:g}, {high:g}], got {number:g}"

        if key in INT_BOUNDS.get(section, {}):
            low, high = INT_BOUNDS[section][key]
            try:
                number = int(str_value)
            except ValueError:
                return f"[{section}].{key} must be an integer, got '{str_value}'"
            if not low <= number <= high:
                return f"[{section}].{key} must be between {low} and {high}, got {number}"
        return None

    def set(self, section: str, key: str, value: Any):
        """Set a configuration value and save.

        Raises:
            ValueError: if the value fails validation.
        """
        str_value = str(value)
        validation_error = self._validate(section, key, str_value)
        if validation_error:
            logger.error(f"Config set validation failed for [{section}].{key}: {validation_error}")
            raise ValueError(validation_error)

        if section == 'DEFAULT':
            self.config.defaults()[key] = str_value
        else:
            if not self.config.has_section(section):
                self.config.add_section(section)
                logger.info(f"Created new config section: [{section}]")
            self.config[section][key] = str_value
        logger.info(f"Config set [{section}].{key} = {str_value}")
        self.save_config()

    def get_section(self, section_name: str) -> Optional[Dict[str, str]]:
        """Get all key-value pairs for a specific section (including inherited defaults)."""
        if section_name == 'DEFAULT':
            return {k: str(v) for k, v in self.config.defaults().items()}
        if not self.config.has_section(section_name):
            logger.warning(f"Configuration section [{section_name}] not found.")
            return None
        return {key: self.get(section_name, key) for key in self.config[section_name]}

    def get_all_config(self) -> Dict[str, Dict[str, str]]:
        """Get all configuration sections and their key-value pairs."""
        all_config_dict = {'DEFAULT': self.get_section('DEFAULT')}
        for section_name in self.config.sections():
            all_config_dict[section_name] = {
                key: self.config.get(section_name, key) for key in self.config.options(section_name)
                if key not in self.config.defaults()
            }
        return all_config_dict

    def get_available_sections(self) -> List[str]:
        """Returns a list of available section names, including DEFAULT."""
        return ['DEFAULT'] + self.config.sections()

    def get_log_level(self) -> int:
        level = str(self.get('DEFAULT', 'log_level', 'INFO')).upper()
        if level not in ALLOWED_LOG_LEVELS:
            logger.warning(f"Invalid log_level '{level}' in config. Falling back to INFO.")
            level = 'INFO'
        return getattr(logging, level)

    def get_numerics(self) -> Dict[str, float]:
        """Tolerances used by the steady-state solver, propagator and state checks."""
        return {key: self.getfloat('NUMERICS', key, float(default))
                for key, default in self.DEFAULT_CONFIG['NUMERICS'].items()}

    def get_output_format(self) -> str:
        fmt = self.get('OUTPUT', 'format', 'csv')
        if fmt not in ALLOWED_OUTPUT_FORMATS:
            logger.warning(f"Invalid output format '{fmt}' in config. Falling back to csv.")
            fmt = 'csv'
        return fmt


# Global config instance
config = TwoSiteConfig()
