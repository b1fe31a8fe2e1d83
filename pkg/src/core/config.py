"""Configuration settings for the Liouville solver.

Environment-based defaults. Command-line flags override these, and these
override the built-in values below.
"""

import os
from typing import Literal

# Ensure environment variables are loaded
from . import env_loader  # noqa: F401


def get_bool_env(key: str, default: str = "false") -> bool:
    """Get boolean from environment variable.

    Args:
        key: Environment variable name
        default: Default value if not set ("true" or "false")

    Returns:
        Boolean value
    """
    return os.environ.get(key, default).lower() in ("true", "1", "yes")


def get_int_env(key: str, default: int) -> int:
    """Get integer from environment variable, falling back on parse errors.

    Args:
        key: Environment variable name
        default: Default value if not set or not an integer

    Returns:
        Integer value
    """
    raw = os.environ.get(key)
    if raw is None:
        return default
    try:
        return int(raw.strip())
    except ValueError:
        return default


def get_float_env(key: str, default: float) -> float:
    """Get float from environment variable, falling back on parse errors."""
    raw = os.environ.get(key)
    if raw is None:
        return default
    try:
        return float(raw.strip())
    except ValueError:
        return default


# ==================== ARITHMETIC ====================

# Mantissa bits of the working precision
PRECISION_BITS = get_int_env("LIOUVILLE_PRECISION_BITS", 256)

# Number of sequence entries generated for the recurrence kinds
SEQUENCE_LENGTH = get_int_env("LIOUVILLE_SEQUENCE_LENGTH", 16)

# Largest log2|a_i| that exact-rational mode will materialize as an integer
MATERIALIZE_CAP_BITS = 1 << 16


# ==================== TRACKER DEFAULTS ====================

D_MAX = get_int_env("LIOUVILLE_D_MAX", 8)
R_MAX = get_float_env("LIOUVILLE_R_MAX", 10.0)
MULTISTART_BUDGET = get_int_env("LIOUVILLE_MULTISTART_BUDGET", 200)
RNG_SEED = get_int_env("LIOUVILLE_RNG_SEED", 0)

# Total residual bound accepted by the stop rule, as a power of two
RESIDUAL_TOL_LOG2 = get_int_env("LIOUVILLE_RESIDUAL_TOL_LOG2", -100)

MAX_NEWTON_ITERS = 50
MAX_SUBSTEPS_PER_EPSILON = 64

# Number of terms inspected explicitly by the tail bound
TAIL_PROBE_COUNT = 3


# ==================== LOGGING ====================

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR"]

LOG_LEVEL: str = os.environ.get("LIOUVILLE_LOG_LEVEL", "WARNING").upper()

# Log every accepted substep at INFO instead of DEBUG
VERBOSE_TRACE = get_bool_env("LIOUVILLE_VERBOSE_TRACE", "false")


def get_log_level(quiet: bool = False, verbose: bool = False) -> LogLevel:
    """Resolve the effective log level from flags and environment.

    Args:
        quiet: Only report errors
        verbose: Report per-step detail

    Returns:
        "ERROR" if quiet, "DEBUG" if verbose, else LIOUVILLE_LOG_LEVEL
    """
    if quiet:
        return "ERROR"
    if verbose:
        return "DEBUG"
    if LOG_LEVEL in ("DEBUG", "INFO", "WARNING", "ERROR"):
        return LOG_LEVEL  # type: ignore[return-value]
    return "WARNING"
