import json
import logging
import math
import os
import sys
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any
from typing import Mapping
from typing import Optional

import numpy as np
import pandas as pd
import toml

from ._typing import SeriesControl

logger = logging.getLogger(__name__)

ENV_MAX_TERMS = "QOSC_MAX_TERMS"

DEFAULTS: dict[str, Any] = {
    "tol": 1e-14,
    "max-terms": 512,
    "truncation": 16,
    "grid-points": 2048,
    "grid-length": 40.0,
    "seed": 0,
    "ledger": None,
}

_KEY_TYPES: dict[str, tuple[type, ...]] = {
    "tol": (float, int),
    "max-terms": (int,),
    "truncation": (int,),
    "grid-points": (int,),
    "grid-length": (float, int),
    "seed": (int,),
    "ledger": (str,),
}


@lru_cache
def load_config(proj_file: Path | str = "pyproject.toml") -> dict[str, Any]:
    """Load the tool.qosc table of a project file

    Args:
        proj_file:
            Local or absolute path to the toml file.  Relative paths are taken
            from the current working directory.  A missing file or table gives
            an empty configuration.
    Raises:
        RuntimeError if the file is not valid toml, or the table has unknown
        keys or values of the wrong type.
    """
    path = Path(proj_file).absolute()
    if not path.exists():
        logger.debug(f"No config file at {path}, using built-in defaults")
        return {}
    try:
        with open(path, "rt", encoding="utf-8") as f:
            config = toml.load(f)
    except toml.TomlDecodeError as exc:
        raise RuntimeError(f"{path} is not a valid toml file: {exc}")
    table = config.get("tool", {}).get("qosc", {})
    for key, value in table.items():
        if key not in _KEY_TYPES:
            raise RuntimeError(f"tool.qosc table in {path} has unknown key '{key}'")
        if isinstance(value, bool) or not isinstance(value, _KEY_TYPES[key]):
            raise RuntimeError(
                f"tool.qosc table is malformed: '{key}' = {value!r} is not "
                f"{' or '.join(t.__name__ for t in _KEY_TYPES[key])}"
            )
    return dict(table)


def resolve_settings(
    config: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None
) -> dict[str, Any]:
    """Merge settings: explicit overrides > environment > config > defaults

    Overrides whose value is None are ignored.
    """
    settings = dict(DEFAULTS)
    settings.update(config)
    env_terms = os.environ.get(ENV_MAX_TERMS)
    if env_terms:
        try:
            settings["max-terms"] = int(env_terms)
        except ValueError:
            raise RuntimeError(f"{ENV_MAX_TERMS}={env_terms!r} is not an integer")
    for key, value in (overrides or {}).items():
        if value is not None:
            settings[key] = value
    return settings


def default_control(config: Optional[Mapping[str, Any]] = None) -> SeriesControl:
    """Series truncation from the resolved settings"""
    settings = resolve_settings(config or {})
    return SeriesControl(float(settings["tol"]), int(settings["max-terms"]))


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _open_output(output: str):
    if output == "-":
        return sys.stdout
    return open(output, "w", encoding="utf-8", newline="")


def write_json(payload: Mapping[str, Any], output: str = "-") -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    stream = _open_output(output)
    try:
        stream.write(text + "\n")
    finally:
        if stream is not sys.stdout:
            stream.close()


def write_table(frame: pd.DataFrame, output: str = "-") -> None:
    stream = _open_output(output)
    try:
        frame.to_csv(stream, index=False, float_format="%.17g")
    finally:
        if stream is not sys.stdout:
            stream.close()
