# config.py
import os
from pathlib import Path
from typing import Dict, List, Union

from errors import DomainError

# Try to load .env file if python-dotenv is available
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv not installed, will use system environment variables
    pass

# Runtime knobs (none of them is required; the master seed is never read from the environment)
LOG_LEVEL = os.getenv("DIRSPARSE_LOG_LEVEL", "INFO")
WORKERS = int(os.getenv("DIRSPARSE_WORKERS", str(min(8, os.cpu_count() or 1))))
OUTPUT_DIR = os.getenv("DIRSPARSE_OUTPUT_DIR", "results")

# Default simulation grid: powers of two for even log-spacing, 4 thresholds, 1000 trials
DEFAULT_N_GRID = [2 ** p for p in range(4, 13)]  # 16 .. 4096
DEFAULT_THRESHOLD_EXPONENTS = [1.0, 2.0, 3.0, 4.0]
DEFAULT_TRIALS = 1000
DEFAULT_MASTER_SEED = 0
DEFAULT_ALPHA_MODE = "inverse_n"

# Numeric contracts
NUMERIC_SLACK = 1e-9
IDENTITY_TOLERANCE = 1e-12
CONFIDENCE_LEVEL = 0.99
RERUN_TRIAL_FACTOR = 10

# Iteration limits for the special functions
SERIES_MAX_ITERATIONS = 10_000
CONTINUED_FRACTION_MAX_ITERATIONS = 10_000
ROOT_MAX_ITERATIONS = 5_000

# Keys accepted in a flat key-value experiment file
CONFIG_FILE_KEYS = {
    "alpha_mode": str,
    "alpha_value": float,
    "n_grid": int,
    "threshold_exponents": float,
    "trials": int,
    "master_seed": int,
    "workers": int,
    "output_dir": str,
    "format": str,
}
LIST_KEYS = {"n_grid", "threshold_exponents"}


def load_config_file(path: Union[str, Path]) -> Dict[str, Union[str, int, float, List]]:
    """
    Read a flat `key = value` experiment file.

    Blank lines and `#` comments are ignored; list values are comma separated.
    Unknown keys are rejected so a typo never silently falls back to a default.
    """
    path = Path(path)
    if not path.is_file():
        raise DomainError(f"Config file not found: {path}")

    values: Dict[str, Union[str, int, float, List]] = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")

        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_FILE_KEYS:
            raise DomainError(
                f"{path}:{line_no}: unknown key '{key}'. "
                f"Allowed keys: {', '.join(sorted(CONFIG_FILE_KEYS))}"
            )

        cast = CONFIG_FILE_KEYS[key]
        try:
            if key in LIST_KEYS:
                values[key] = [cast(item.strip()) for item in value.split(",") if item.strip()]
            else:
                values[key] = cast(value)
        except ValueError as e:
            raise DomainError(f"{path}:{line_no}: invalid value for '{key}': {e}") from e

    return values
