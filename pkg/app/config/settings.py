import logging
import os
from dotenv import load_dotenv
from typing import Any, Callable, Dict, List, Optional

load_dotenv()


def parse_positive_int(v: Any, name: str) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        value = v
    elif isinstance(v, str):
        try:
            value = int(v.strip())
        except ValueError:
            raise ValueError(f"Invalid integer for {name}: {v}")
    else:
        raise ValueError(f"Invalid type for {name}: {type(v)}")
    if value < 1:
        raise ValueError(f"{name} must be at least 1, got {value}")
    return value


def parse_jobs(v: Optional[str]) -> int:
    """Worker count; unset or empty means one per logical CPU."""
    if v is None or not str(v).strip():
        return max(1, os.cpu_count() or 1)
    return parse_positive_int(v, "NASGRAPH_JOBS")


def parse_log_level(v: Optional[str]) -> str:
    level = (v or "INFO").strip().upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ValueError(f"Invalid log level for NASGRAPH_LOG_LEVEL: {v}")
    return level


def env_positive_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    if v is None or not v.strip():
        return default
    return parse_positive_int(v, name)


_READERS: Dict[str, Callable[[], Any]] = {
    "NASGRAPH_JOBS": lambda: parse_jobs(os.environ.get("NASGRAPH_JOBS")),
    "NASGRAPH_CHANNELS": lambda: env_positive_int("NASGRAPH_CHANNELS", 16),
    "NASGRAPH_CELLS": lambda: env_positive_int("NASGRAPH_CELLS", 1),
    "NASGRAPH_MODULES": lambda: env_positive_int("NASGRAPH_MODULES", 3),
    "NASGRAPH_PROBE_RESOLUTION": lambda: env_positive_int("NASGRAPH_PROBE_RESOLUTION", 32),
    "NASGRAPH_LOG_LEVEL": lambda: parse_log_level(os.environ.get("NASGRAPH_LOG_LEVEL")),
}


def setting_errors() -> List[str]:
    """Messages for every setting whose current environment value is invalid."""
    errors = []
    for read in _READERS.values():
        try:
            read()
        except ValueError as e:
            errors.append(str(e))
    return errors


def _setting(name: str, fallback: Any) -> Any:
    # the CLI reports invalid values through setting_errors()
    try:
        return _READERS[name]()
    except ValueError:
        return fallback


# Worker threads used to score architectures
NASGRAPH_JOBS: int = _setting("NASGRAPH_JOBS", parse_jobs(None))

# Surrogate model NASGraph(h, c, m)
DEFAULT_CHANNELS: int = _setting("NASGRAPH_CHANNELS", 16)
DEFAULT_CELLS: int = _setting("NASGRAPH_CELLS", 1)
DEFAULT_MODULES: int = _setting("NASGRAPH_MODULES", 3)
# spatial size of the probe input
DEFAULT_PROBE_RESOLUTION: int = _setting("NASGRAPH_PROBE_RESOLUTION", 32)

# One conversion per seed, measures averaged
DEFAULT_SEEDS = tuple(range(8))
DEFAULT_TOP_FRACTION: float = 0.10

LOG_LEVEL: str = _setting("NASGRAPH_LOG_LEVEL", "INFO")

# NAS-Bench-201 accuracy records in JSON-Lines form, not bundled
BENCHMARK_RECORDS_PATH = os.environ.get("NASGRAPH_NB201_RECORDS") or None
