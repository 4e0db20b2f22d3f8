import json
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from loguru import logger

from lib.models import LayoutConfig


def read_config_file(path: os.PathLike) -> Dict[str, Any]:
    "Raw key/value overrides from a TOML or JSON config file"
    path = Path(path)
    with open(path, "rb") as f:
        if path.suffix.lower() == ".toml":
            values = tomllib.load(f)
        else:
            values = json.load(f)
    if not isinstance(values, dict):
        raise ValueError(f"Config file '{path}' must hold a table of LayoutConfig fields")
    return values


def load_config(path: Optional[os.PathLike] = None, overrides: Optional[Dict[str, Any]] = None) -> LayoutConfig:
    """
    Build the layout config from defaults, a config file, the environment and explicit overrides.

    Args:
        path (os.PathLike, optional): TOML or JSON file whose keys mirror LayoutConfig fields.
        overrides (dict, optional): Values set on the command line; None values are ignored.

    Returns:
        LayoutConfig: The validated config.
    """
    values: Dict[str, Any] = {}
    if path is not None:
        values.update(read_config_file(path))
        logger.debug(f"Loaded {len(values)} config values from {path}")
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}

    load_dotenv()
    env_seed = os.getenv("ARCOL_SEED")
    if env_seed and "seed" not in values and "seed" not in overrides:
        values["seed"] = int(env_seed)
        logger.debug(f"Using seed {env_seed} from ARCOL_SEED")

    values.update(overrides)
    return LayoutConfig(**values)
