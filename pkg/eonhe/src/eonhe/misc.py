import json
from pathlib import Path
from typing import Union

import pandas as pd

from eonhe.units import Quantity

FLOAT_FORMAT = "%.8e"


def safe_mkdir(directory: Path) -> None:
    """Ask before using an existing directory."""
    if directory.exists():
        response = input(
            f"Directory '{str(directory)}' exists, continue? (y/n) "
        ).lower()
        if response not in ["yes", "y"]:
            exit()
    directory.mkdir(parents=True, exist_ok=True)


def write_config(config: dict, directory: Path) -> None:
    """Write config text file to specified directory."""
    with open(directory / "config.json", "w") as f:
        json.dump({key: str(value) for key, value in config.items()}, f)


def write_frame(frame: pd.DataFrame, path: Union[Path, str]) -> None:
    """CSV with a header row, LF line endings and 9 significant digits."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def format_report(entries: dict) -> str:
    """Aligned `key = value` lines."""
    width = max((len(key) for key in entries), default=0)
    lines = []
    for key, value in entries.items():
        if isinstance(value, Quantity):
            value = f"{FLOAT_FORMAT % value.value} {value.unit}"
        elif isinstance(value, float):
            value = FLOAT_FORMAT % value
        lines.append(f"{key:<{width}} = {value}")
    return "\n".join(lines) + "\n"
