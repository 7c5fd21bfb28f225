"""Configuration management for bridgecraft."""

import json
import logging
import os
from pathlib import Path
from typing import Dict, Any, Optional

from dotenv import load_dotenv

from bridgecraft.errors import ParameterError

logger = logging.getLogger("bridgecraft.config")

load_dotenv()

# Default configuration
DEFAULT_SEED = 0
GM_BITS = 512
SYY_ELL = 50  # the value used when timing the comparison circuit
CSGN_N = 256  # toy preset, not derived from a security level
CSGN_D = 16
CSGN_S = 32
GAME_TRIALS = 1000
KEYGEN_BLOCK = 100  # trials sharing one key in correctness checks
BENCH_REPS = 10
BENCH_SIZES = (4, 8, 16, 32)
SECURE_MIN_BITS = 1024
LOG_LEVEL = "WARNING"
LOG_FILE = ""

# Environment overrides
DEFAULT_SEED = int(os.getenv("BRIDGECRAFT_SEED", DEFAULT_SEED))
GM_BITS = int(os.getenv("BRIDGECRAFT_GM_BITS", GM_BITS))
SYY_ELL = int(os.getenv("BRIDGECRAFT_SYY_ELL", SYY_ELL))
LOG_LEVEL = os.getenv("BRIDGECRAFT_LOG_LEVEL", LOG_LEVEL)
LOG_FILE = os.getenv("BRIDGECRAFT_LOG_FILE", LOG_FILE)

# File paths
CONFIG_DIR = Path.home() / ".bridgecraft"
CONFIG_FILE = CONFIG_DIR / "config.json"

_INT_KEYS = {
    "default_seed": "DEFAULT_SEED",
    "gm_bits": "GM_BITS",
    "syy_ell": "SYY_ELL",
    "csgn_n": "CSGN_N",
    "csgn_d": "CSGN_D",
    "csgn_s": "CSGN_S",
    "game_trials": "GAME_TRIALS",
    "keygen_block": "KEYGEN_BLOCK",
    "bench_reps": "BENCH_REPS",
    "secure_min_bits": "SECURE_MIN_BITS",
}
_STR_KEYS = {
    "log_level": "LOG_LEVEL",
    "log_file": "LOG_FILE",
}


def update_config(config_dict: Dict[str, Any]) -> None:
    """Update global configuration with values from a params or config file."""
    module_globals = globals()

    for key, value in config_dict.items():
        if key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ParameterError(f"config key {key!r} expects an integer, got {value!r}")
            module_globals[_INT_KEYS[key]] = value
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ParameterError(f"config key {key!r} expects a string, got {value!r}")
            module_globals[_STR_KEYS[key]] = value
        elif key == "bench_sizes":
            if not isinstance(value, list) or not all(isinstance(v, int) for v in value):
                raise ParameterError("config key 'bench_sizes' expects a list of integers")
            module_globals["BENCH_SIZES"] = tuple(value)
        else:
            logger.debug(f"Ignoring unknown config key: {key}")


def load_config(path: Optional[Path] = None) -> Dict[str, Any]:
    """Load a JSON params file (the user config file by default) and apply it."""
    config_path = Path(path) if path is not None else CONFIG_FILE
    if not config_path.exists():
        if path is not None:
            raise ParameterError(f"params file not found: {config_path}")
        return {}

    try:
        with open(config_path, "r") as f:
            user_config = json.load(f)
    except json.JSONDecodeError as e:
        raise ParameterError(f"params file {config_path} is not valid JSON: {e}") from e

    if not isinstance(user_config, dict):
        raise ParameterError(f"params file {config_path} must hold a JSON object")

    update_config(user_config)
    logger.info(f"Loaded configuration from {config_path}")
    return user_config
