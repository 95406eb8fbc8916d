import logging
import os
import sys
from typing import Any, Dict, Optional


logger = logging.getLogger(__name__)

FIT_METHODS = ("loglog-ols", "nonlinear-ls")

CONSTANTS: Dict[str, Any] = {
    "STORE_PATH": None,
    "LOG_LEVEL": "WARNING",
    "FIT_METHOD": "loglog-ols",
    # dataset defaults (Whisper encoder emits 50 frames/s)
    "FRAME_RATE": 50.0,
    "DOWNSAMPLE": 4,
    "TEXT_TOKENS_PER_SECOND": 3.0,
    "EPOCHS": 1.0,
    # adapter defaults
    "ADAPTER_RANK": 64,
    "ADAPTER_ALPHA": 16.0,
    # FLOPs per parameter per token
    "C_FWD": 2.0,
    "C_ACT_BWD": 2.0,
    "C_WGRAD": 2.0,
    # fitting
    "NONLINEAR_TOL": 1e-10,
    "NONLINEAR_MAX_ITER": 200,
    "GRID_SIZE": 1000,
    "GRID_EPSILON": 1e-3,
    # analysis
    "CONVERGENCE_WINDOW": 3,
    "PRELIMINARY_THRESHOLD": 0.05,
    "FULL_THRESHOLD": 0.01,
    # presentation
    "CER_DECIMALS": 2,
    "RATIO_DECIMALS": 1,
    "CHART_SAMPLES": 200,
    "KEEP_PUNCTUATION": True,
}

_store_env: Optional[str] = os.getenv("ASRSCALE_STORE")
if _store_env:
    CONSTANTS["STORE_PATH"] = _store_env

_level_env: Optional[str] = os.getenv("ASRSCALE_LOG_LEVEL")
if _level_env is not None:
    if isinstance(getattr(logging, _level_env.upper(), None), int):
        CONSTANTS["LOG_LEVEL"] = _level_env.upper()
    else:
        logger.warning(f"ASRSCALE_LOG_LEVEL value '{_level_env}' is invalid; reverting to {CONSTANTS['LOG_LEVEL']}")

_method_env: Optional[str] = os.getenv("ASRSCALE_FIT_METHOD")
if _method_env is not None:
    if _method_env in FIT_METHODS:
        CONSTANTS["FIT_METHOD"] = _method_env
    else:
        logger.warning(f"ASRSCALE_FIT_METHOD value '{_method_env}' is invalid; reverting to {CONSTANTS['FIT_METHOD']}")

_grid_env: Optional[str] = os.getenv("ASRSCALE_GRID_SIZE")
if _grid_env is not None:
    try:
        CONSTANTS["GRID_SIZE"] = max(2, int(_grid_env))
    except ValueError:
        logger.warning(f"ASRSCALE_GRID_SIZE value '{_grid_env}' is invalid; reverting to {CONSTANTS['GRID_SIZE']}")


def get(key: str) -> Any:
    """
    Look up a default by its CONSTANTS key

    :param key: the name of the default
    :returns: the current value
    """

    if key not in CONSTANTS:
        raise KeyError(f"Unknown setting {key}")

    return CONSTANTS[key]


def get_store_path() -> Optional[str]:
    """
    Get the run store path set through ASRSCALE_STORE or set_store_path()

    :returns: the path, or None when no store was configured
    """

    return CONSTANTS["STORE_PATH"]


def set_store_path(path: Optional[str]) -> None:
    CONSTANTS["STORE_PATH"] = path


def get_default_fit_method() -> str:
    """
    Get the default power-law fitting method

    :returns: "loglog-ols" or "nonlinear-ls"
    """

    return CONSTANTS["FIT_METHOD"]


def set_default_fit_method(method: str) -> None:
    """
    Set the default power-law fitting method

    :param method: the new default
    """

    if method not in FIT_METHODS:
        raise ValueError(f"Unknown fit method {method}; expected one of {FIT_METHODS}")

    CONSTANTS["FIT_METHOD"] = method


def get_log_level() -> str:
    return CONSTANTS["LOG_LEVEL"]


def configure_logging(level: Optional[str] = None, stream=None) -> None:
    """
    Configure the root logger for command-line use. Library code never
    calls this, so importing asrscale leaves logging untouched.

    :param level: a logging level name, defaults to ASRSCALE_LOG_LEVEL
    :param stream: the stream to log to, defaults to stderr
    """

    name: str = (level or get_log_level()).upper()
    numeric_level = getattr(logging, name, None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"Invalid log level {name}")

    logging.basicConfig(stream=stream or sys.stderr, level=numeric_level,
                        format="%(levelname)s:%(name)s:%(message)s")
