"""Constants, defaults and environment configuration."""
import os

SPEED_OF_LIGHT = 299_792_458.0  # m/s

SCHEMA_VERSION = 1

DEFAULT_N_RAYS = 1000
DEFAULT_DELTA_PHI_DEG = 5.0
DEFAULT_DELTA_TAU_NS = 1.0
DEFAULT_COMBINING = "incoherent"

# Rays whose scattering pattern or reflection coefficient falls below this are dropped
NEGLIGIBLE = 1e-12

# Acceptance thresholds used by `compare`
MAX_AOA_ERROR_DEG = 1.0
MAX_MEAN_SPREAD_ERROR_DEG = 10.0
MAX_RMS_POWER_ERROR_DB = 2.5

# Command-line exit codes
EXIT_OK = 0
EXIT_INVALID_SCENARIO = 2
EXIT_RUNTIME_ERROR = 3
EXIT_THRESHOLD_EXCEEDED = 4


def get_thread_count() -> int:
    """
    Read RT_ICM_THREADS env var.

    Returns:
        Number of worker threads; unset, empty or 0 means one per CPU

    Raises:
        ValueError: If the variable is not a non-negative integer
    """
    raw = os.environ.get("RT_ICM_THREADS", "").strip()
    if not raw:
        return os.cpu_count() or 1

    try:
        threads = int(raw)
    except ValueError as e:
        raise ValueError(f"RT_ICM_THREADS must be an integer, got {raw!r}") from e

    if threads < 0:
        raise ValueError(f"RT_ICM_THREADS must be >= 0, got {threads}")

    return threads if threads > 0 else (os.cpu_count() or 1)
