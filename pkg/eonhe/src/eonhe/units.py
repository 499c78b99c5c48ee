"""
Internal unit system and physical constants.

Internal base units: length in nm, energy in GHz (E/h; angular frequencies in
rad/ns), time in ns, field in V/cm, voltage in mV, magnetic field in T,
areal density in cm^-2, wavevector in cm^-1. Temperatures are energies and are
converted through k_B. Microscopic derivations are done in Gaussian (CGS)
units inside the numerical kernels.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.constants as sc

from eonhe.errors import InvalidMaterialError, UnitError

HELIUM_EPSILON = 1.057
# low-temperature helium-4 literature values
HELIUM_SURFACE_TENSION = 0.378  # erg/cm^2
HELIUM_DENSITY = 0.145  # g/cm^3

# CGS values of the CODATA constants
ELECTRON_MASS = sc.m_e * 1e3  # g
ELEMENTARY_CHARGE = sc.e * sc.c * 10  # esu
HBAR = sc.hbar * 1e7  # erg s
PLANCK = sc.h * 1e7  # erg s
BOLTZMANN = sc.k * 1e7  # erg/K
SPEED_OF_LIGHT = sc.c * 1e2  # cm/s
STATVOLT = sc.c * 1e-6  # V per statvolt, 299.792458

_KELVIN_IN_GHZ = sc.k / sc.h * 1e-9
_EV_IN_GHZ = sc.e / sc.h * 1e-9
_RAD_PER_NS_IN_GHZ = 1 / (2 * np.pi)

# unit -> (dimension, factor to the internal base unit)
UNITS: dict[str, tuple[str, float]] = {
    # energy, frequency, angular frequency, rate and temperature
    "GHz": ("energy", 1.0),
    "MHz": ("energy", 1e-3),
    "kHz": ("energy", 1e-6),
    "Hz": ("energy", 1e-9),
    "rad/ns": ("energy", _RAD_PER_NS_IN_GHZ),
    "rad/s": ("energy", 1e-9 * _RAD_PER_NS_IN_GHZ),
    "1/s": ("energy", 1e-9 * _RAD_PER_NS_IN_GHZ),
    "K": ("energy", _KELVIN_IN_GHZ),
    "mK": ("energy", 1e-3 * _KELVIN_IN_GHZ),
    "eV": ("energy", _EV_IN_GHZ),
    "meV": ("energy", 1e-3 * _EV_IN_GHZ),
    "ueV": ("energy", 1e-6 * _EV_IN_GHZ),
    "erg": ("energy", 1e-9 / PLANCK),
    # length
    "nm": ("length", 1.0),
    "A": ("length", 0.1),
    "um": ("length", 1e3),
    "mm": ("length", 1e6),
    "cm": ("length", 1e7),
    "m": ("length", 1e9),
    # electric field
    "V/cm": ("field", 1.0),
    "mV/cm": ("field", 1e-3),
    "kV/cm": ("field", 1e3),
    "V/m": ("field", 1e-2),
    "statV/cm": ("field", STATVOLT),
    # time
    "ps": ("time", 1e-3),
    "ns": ("time", 1.0),
    "us": ("time", 1e3),
    "ms": ("time", 1e6),
    "s": ("time", 1e9),
    # voltage
    "uV": ("voltage", 1e-3),
    "mV": ("voltage", 1.0),
    "V": ("voltage", 1e3),
    # magnetic field
    "T": ("magnetic_field", 1.0),
    "mT": ("magnetic_field", 1e-3),
    "G": ("magnetic_field", 1e-4),
    # areal density
    "cm^-2": ("density", 1.0),
    "um^-2": ("density", 1e8),
    "m^-2": ("density", 1e-4),
    # wavevector
    "cm^-1": ("wavevector", 1.0),
    "um^-1": ("wavevector", 1e4),
    "nm^-1": ("wavevector", 1e7),
    "m^-1": ("wavevector", 1e-2),
    # Stark sensitivity
    "GHz/(V/cm)": ("stark", 1.0),
    "MHz/(V/cm)": ("stark", 1e-3),
    # dimensionless
    "1": ("dimensionless", 1.0),
}
UNIT_ALIASES = {"µm": "um", "Å": "A", "µs": "us", "µV": "uV", "s^-1": "1/s", "": "1"}

BASE_UNITS = {
    "energy": "GHz",
    "length": "nm",
    "field": "V/cm",
    "time": "ns",
    "voltage": "mV",
    "magnetic_field": "T",
    "density": "cm^-2",
    "wavevector": "cm^-1",
    "stark": "GHz/(V/cm)",
    "dimensionless": "1",
}


def canonical_unit(unit: str) -> str:
    """Resolve aliases and reject unknown units."""
    unit = UNIT_ALIASES.get(unit.strip(), unit.strip())
    if unit not in UNITS:
        raise UnitError(f"Unknown unit '{unit}'.")
    return unit


@dataclass(frozen=True)
class Quantity:
    """A value tagged with its unit."""

    value: float
    unit: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "unit", canonical_unit(self.unit))
        object.__setattr__(self, "value", float(self.value))

    @property
    def dimension(self) -> str:
        return UNITS[self.unit][0]

    def to_internal(self) -> float:
        return self.value * UNITS[self.unit][1]

    @classmethod
    def from_internal(cls, value: float, dimension: str) -> "Quantity":
        return cls(value, BASE_UNITS[dimension])

    def to(self, unit: str) -> "Quantity":
        return convert(self, unit)

    def __str__(self) -> str:
        return f"{self.value:.9g} {self.unit}"


def convert(q: Quantity, target: str) -> Quantity:
    """Rescale a quantity to a compatible unit."""
    target = canonical_unit(target)
    dimension, factor = UNITS[target]
    if dimension != q.dimension:
        raise UnitError(
            f"Cannot convert {q.unit} ({q.dimension}) to {target} ({dimension})."
        )
    if q.unit == target:
        return q
    return Quantity(q.to_internal() / factor, target)


def as_internal(x: Union[Quantity, float], dimension: str) -> float:
    """Accept a Quantity of the given dimension or a float in internal units."""
    if isinstance(x, Quantity):
        if x.dimension != dimension:
            raise UnitError(f"Expected a {dimension} quantity, got {x.unit}.")
        return x.to_internal()
    return float(x)


@dataclass(frozen=True)
class Constants:
    """
    Material and fundamental constants. Fundamental constants are in CGS;
    `rydberg_R` is in erg and `bohr_rB` in cm.
    """

    epsilon_helium: float
    lambda_image: float
    rydberg_R: float
    bohr_rB: float
    surface_tension_sigma: float = HELIUM_SURFACE_TENSION
    helium_density_rho: float = HELIUM_DENSITY
    electron_mass: float = ELECTRON_MASS
    elementary_charge: float = ELEMENTARY_CHARGE
    hbar: float = HBAR
    k_B: float = BOLTZMANN

    @property
    def rydberg_kelvin(self) -> float:
        return self.rydberg_R / self.k_B

    @property
    def rydberg_ghz(self) -> float:
        return self.rydberg_R / (2 * np.pi * self.hbar) * 1e-9

    @property
    def bohr_nm(self) -> float:
        return self.bohr_rB * 1e7

    @property
    def rydberg_rate(self) -> float:
        """R/hbar in s^-1."""
        return self.rydberg_R / self.hbar


def derive_constants(epsilon: float = HELIUM_EPSILON) -> Constants:
    """Derive the image-potential constants from the dielectric constant."""
    if not np.isfinite(epsilon) or epsilon <= 1:
        raise InvalidMaterialError(
            f"Dielectric constant must exceed 1 for an attractive image potential, got {epsilon}."
        )
    lambda_image = (epsilon - 1) / (4 * (epsilon + 1))
    e2 = ELEMENTARY_CHARGE**2
    rydberg = lambda_image**2 * e2**2 * ELECTRON_MASS / (2 * HBAR**2)
    bohr = HBAR**2 / (lambda_image * ELECTRON_MASS * e2)
    return Constants(
        epsilon_helium=epsilon,
        lambda_image=lambda_image,
        rydberg_R=rydberg,
        bohr_rB=bohr,
    )


CONSTANTS = derive_constants()


def field_to_statvolt(field: float) -> float:
    """V/cm -> statV/cm."""
    return field / STATVOLT


def dipole_energy_ghz(field: float, length: float) -> float:
    """e * field[V/cm] * length[nm] expressed in GHz."""
    # 1 V/cm across 1 nm is 1e-7 eV
    return field * length * 1e-7 * _EV_IN_GHZ


def ghz_to_rad_per_ns(frequency: float) -> float:
    return frequency / _RAD_PER_NS_IN_GHZ


def rad_per_ns_to_ghz(frequency: float) -> float:
    return frequency * _RAD_PER_NS_IN_GHZ
