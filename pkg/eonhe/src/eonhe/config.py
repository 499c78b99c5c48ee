"""
Line-oriented configuration files.

    [device]
    depth = 500 nm          # comment
    [sites]
    x = 0, 0.5 um           # comma lists share one trailing unit

Every value carries a unit that is checked against the key's dimension.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from eonhe.device import DeviceSpec
from eonhe.errors import ConfigError, GeometryError, InvalidMaterialError, UnitError
from eonhe.units import Constants, Quantity, derive_constants

# section -> key -> dimension; "flag" marks booleans
SCHEMA: dict[str, dict[str, str]] = {
    "constants": {"epsilon": "dimensionless"},
    "device": {
        "electrode_radius": "length",
        "depth": "length",
        "magnetic_field": "magnetic_field",
        "temperature": "energy",
        "electron_density": "density",
        "base_pressing_field": "field",
    },
    "sites": {"x": "length", "y": "length", "voltage": "voltage"},
    "simulation": {
        "rtol": "dimensionless",
        "atol": "dimensionless",
        "max_pure_sites": "dimensionless",
        "max_density_sites": "dimensionless",
    },
    "decoherence": {
        "delta_t": "length",
        "t1_prefactor": "energy",
        "t2_prefactor": "energy",
        "image_field": "field",
        "thermal_delta_t": "flag",
    },
}
LIST_KEYS = {("sites", "x"), ("sites", "y"), ("sites", "voltage")}
AUTO_KEYS = {("decoherence", "t1_prefactor"), ("decoherence", "t2_prefactor")}

# Physics defaults: h = d = 0.5 um, R_el = 100 nm, B = 1.5 T, T = 10 mK.
DEFAULTS: dict[str, dict[str, object]] = {
    "constants": {"epsilon": Quantity(1.057, "1")},
    "device": {
        "electrode_radius": Quantity(100, "nm"),
        "depth": Quantity(500, "nm"),
        "magnetic_field": Quantity(1.5, "T"),
        "temperature": Quantity(10, "mK"),
        "electron_density": Quantity(1e8, "cm^-2"),
        "base_pressing_field": Quantity(0, "V/cm"),
    },
    "sites": {
        "x": (Quantity(0, "um"), Quantity(0.5, "um")),
        "y": (Quantity(0, "um"), Quantity(0, "um")),
        "voltage": (Quantity(0, "mV"), Quantity(0, "mV")),
    },
    "simulation": {
        "rtol": Quantity(1e-9, "1"),
        "atol": Quantity(1e-11, "1"),
        "max_pure_sites": Quantity(10, "1"),
        "max_density_sites": Quantity(6, "1"),
    },
    "decoherence": {
        "delta_t": Quantity(2e-9, "cm"),
        "t1_prefactor": None,
        "t2_prefactor": None,
        "image_field": Quantity(100, "V/cm"),
        "thermal_delta_t": False,
    },
}

Value = Union[Quantity, tuple, bool, None]


def _quantity(text: str, dimension: str, default_unit: Optional[str] = None) -> Quantity:
    number, _, unit = text.strip().partition(" ")
    unit = unit.strip() or default_unit
    if unit is None:
        if dimension != "dimensionless":
            raise ConfigError(f"Value '{text.strip()}' needs a unit.")
        unit = "1"
    q = Quantity(float(number), unit)
    if q.dimension != dimension:
        raise ConfigError(f"Unit '{unit}' is not a {dimension}.")
    return q


def _parse_value(text: str, section: str, key: str) -> Value:
    dimension = SCHEMA[section][key]
    if dimension == "flag":
        if text.lower() in ("true", "yes", "on"):
            return True
        if text.lower() in ("false", "no", "off"):
            return False
        raise ConfigError(f"Expected true or false, got '{text}'.")
    if (section, key) in AUTO_KEYS and text.lower() == "auto":
        return None
    if (section, key) in LIST_KEYS:
        if not text:
            return ()
        parts = [part.strip() for part in text.split(",")]
        _, _, unit = parts[-1].partition(" ")
        return tuple(_quantity(part, dimension, unit.strip() or None) for part in parts)
    return _quantity(text, dimension)


def _format_number(value: float) -> str:
    return f"{value:.17g}"


def _format_value(value: Value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        if not value:
            return ""
        unit = value[-1].unit
        numbers = ", ".join(_format_number(q.to(unit).value) for q in value)
        return numbers if unit == "1" else f"{numbers} {unit}"
    return _format_number(value.value) if value.unit == "1" else f"{_format_number(value.value)} {value.unit}"


@dataclass(frozen=True, eq=False)
class Config:
    values: dict[str, dict[str, Value]] = field(default_factory=dict)
    path: Optional[Path] = None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Config) and self.resolved() == other.resolved()

    def resolved(self) -> dict[str, dict[str, Value]]:
        """All sections with defaults filled in. A given but empty [sites] means no sites."""
        resolved = {}
        for section, defaults in DEFAULTS.items():
            given = self.values.get(section)
            if section == "sites" and given is not None:
                x, y = given.get("x", ()), given.get("y", ())
                voltage = given.get("voltage", tuple(Quantity(0, "mV") for _ in x))
                resolved[section] = {"x": x, "y": y, "voltage": voltage}
            else:
                resolved[section] = {**defaults, **(given or {})}
        return resolved

    def get(self, section: str, key: str) -> Value:
        return self.resolved()[section][key]

    def constants(self) -> Constants:
        try:
            return derive_constants(self.get("constants", "epsilon").value)
        except InvalidMaterialError as e:
            raise ConfigError(str(e), path=self.path, key="epsilon") from e

    def device_spec(self) -> DeviceSpec:
        sites = self.resolved()["sites"]
        x = [q.to("um").value for q in sites["x"]]
        y = [q.to("um").value for q in sites["y"]]
        voltage = [q.to("mV").value for q in sites["voltage"]]
        if not len(x) == len(y) == len(voltage):
            raise ConfigError(
                "Site lists x, y and voltage differ in length.", path=self.path, key="x"
            )
        device = self.resolved()["device"]
        constants = self.constants()
        try:
            return DeviceSpec(
                electrode_radius=device["electrode_radius"].to("nm").value,
                depth=device["depth"].to("nm").value,
                sites=np.column_stack([x, y]) if x else np.zeros((0, 2)),
                voltages=np.array(voltage),
                magnetic_field=device["magnetic_field"].to("T").value,
                temperature=device["temperature"].to("K").value,
                electron_density=device["electron_density"].to("cm^-2").value,
                base_pressing_field=device["base_pressing_field"].to("V/cm").value,
                constants=constants,
            )
        except GeometryError as e:
            raise ConfigError(str(e), path=self.path, key="electrode_radius") from e

    def simulation(self) -> dict[str, float]:
        simulation = self.resolved()["simulation"]
        return {
            "rtol": simulation["rtol"].value,
            "atol": simulation["atol"].value,
            "max_pure_sites": int(simulation["max_pure_sites"].value),
            "max_density_sites": int(simulation["max_density_sites"].value),
        }

    def decoherence(self) -> dict[str, object]:
        """Keyword arguments for `decoherence.rate_budget`."""
        decoherence = self.resolved()["decoherence"]
        thermal = decoherence["thermal_delta_t"]
        prefactors = {
            key: None if decoherence[key] is None else decoherence[key].to("1/s").value
            for key in ("t1_prefactor", "t2_prefactor")
        }
        return {
            "delta_t": None if thermal else decoherence["delta_t"].to("cm").value,
            "image_field": decoherence["image_field"].to("V/cm").value,
            "thermal": thermal,
            **prefactors,
        }

    def dumps(self) -> str:
        lines = []
        for section, entries in self.resolved().items():
            lines.append(f"[{section}]")
            for key, value in entries.items():
                if section == "sites" and not entries["x"]:
                    continue
                text = _format_value(value)
                lines.append(f"{key} = {text}".rstrip())
            lines.append("")
        return "\n".join(lines)


def parse(text: str, path: Optional[Path] = None) -> Config:
    values: dict[str, dict[str, Value]] = {}
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("Unterminated section header.", path=path, line=number)
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"Unknown section [{section}].", path=path, line=number)
            values.setdefault(section, {})
            continue
        if section is None:
            raise ConfigError("Key outside of any section.", path=path, line=number)
        key, separator, rest = line.partition("=")
        key = key.strip()
        if not separator:
            raise ConfigError("Expected 'key = value unit'.", path=path, line=number, key=key)
        if key not in SCHEMA[section]:
            raise ConfigError(f"Unknown key in [{section}].", path=path, line=number, key=key)
        if key in values[section]:
            raise ConfigError("Duplicate key.", path=path, line=number, key=key)
        try:
            values[section][key] = _parse_value(rest.strip(), section, key)
        except (ConfigError, UnitError, ValueError) as e:
            message = e.message if isinstance(e, ConfigError) else str(e)
            raise ConfigError(message, path=path, line=number, key=key) from e
    return Config(values, path)


def load(path: Path) -> Config:
    """Parse a config file; a missing file raises FileNotFoundError."""
    path = Path(path)
    return parse(path.read_text(), path)
