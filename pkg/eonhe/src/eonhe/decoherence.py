"""
Order-of-magnitude relaxation and dephasing estimators for surface electrons
coupled to ripplons, and the rate budget built from them.

Rates are returned in s^-1, the displacement delta_T in cm.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from eonhe.device import DeviceSpec, QubitParams, inplane_spacing
from eonhe.errors import ParameterRangeError
from eonhe.units import CONSTANTS, Constants, Quantity, as_internal, field_to_statvolt

logger = logging.getLogger(__name__)

DEFAULT_DELTA_T = 2e-9  # cm, ripplon surface displacement at 10 mK
DEFAULT_IMAGE_FIELD = 100.0  # V/cm
RIPPLON_K_MIN = 1e2  # cm^-1
RIPPLON_K_MAX = 5e5  # cm^-1


@dataclass(frozen=True)
class RateBudget:
    tau_intra_inv: float
    t1_inv: float
    t2_inv: float
    delta_t: float
    working_frequency: float = 0.0  # rad/s

    def __post_init__(self) -> None:
        for name in ("tau_intra_inv", "t1_inv", "t2_inv", "delta_t", "working_frequency"):
            if getattr(self, name) < 0:
                raise ParameterRangeError(f"{name} must be non-negative.")

    @property
    def omega_t1(self) -> float:
        return self.working_frequency / self.t1_inv if self.t1_inv > 0 else np.inf

    @property
    def omega_t2(self) -> float:
        return self.working_frequency / self.t2_inv if self.t2_inv > 0 else np.inf

    def report(self) -> dict[str, Quantity]:
        return {
            "tau_intra_inv": Quantity(self.tau_intra_inv, "1/s"),
            "T1_inv": Quantity(self.t1_inv, "1/s"),
            "T2_inv": Quantity(self.t2_inv, "1/s"),
            "delta_T": Quantity(self.delta_t, "cm"),
            "working_frequency": Quantity(self.working_frequency, "rad/s"),
            "Omega_T1": Quantity(self.omega_t1, "1"),
            "Omega_T2": Quantity(self.omega_t2, "1"),
        }


def _cm(length: Union[Quantity, float]) -> float:
    if isinstance(length, Quantity):
        return length.to("cm").value
    return float(length)


def _per_second(rate: Union[Quantity, float, None], default: float) -> float:
    if rate is None:
        return default
    if isinstance(rate, Quantity):
        return rate.to("1/s").value
    return float(rate)


def ripplon_frequency(
    k: Union[Quantity, float], constants: Constants = CONSTANTS
) -> Quantity:
    """Capillary law omega_r = (sigma k^3 / rho)^1/2, in rad/s."""
    k = as_internal(k, "wavevector")
    if k < 0:
        raise ParameterRangeError("Wavevector must be non-negative.")
    omega = np.sqrt(
        constants.surface_tension_sigma * k**3 / constants.helium_density_rho
    )
    return Quantity(omega, "rad/s")


def ripplon_energy(
    k: Union[Quantity, float], constants: Constants = CONSTANTS
) -> Quantity:
    """hbar omega_r / k_B in K."""
    omega = ripplon_frequency(k, constants).value
    return Quantity(constants.hbar * omega / constants.k_B, "K")


def intraband_rate(
    effective_field: Union[Quantity, float], constants: Constants = CONSTANTS
) -> Quantity:
    """tau^-1 = e^2 E_eff^2 / (4 sigma hbar)."""
    effective_field = field_to_statvolt(as_internal(effective_field, "field"))
    rate = (
        constants.elementary_charge**2
        * effective_field**2
        / (4 * constants.surface_tension_sigma * constants.hbar)
    )
    return Quantity(rate, "1/s")


def t1_estimate(
    delta_t: Union[Quantity, float],
    bohr_radius: Union[Quantity, float],
    prefactor: Union[Quantity, float, None] = None,
    constants: Constants = CONSTANTS,
) -> Quantity:
    """
    T1^-1 ~ (R/hbar)(delta_T/r_B)^2. Lengths as Quantities or floats in cm;
    the prefactor defaults to R/hbar.
    """
    ratio = _cm(delta_t) / _cm(bohr_radius)
    prefactor = _per_second(prefactor, constants.rydberg_rate)
    return Quantity(prefactor * ratio**2, "1/s")


def t2_estimate(
    delta_t: Union[Quantity, float],
    bohr_radius: Union[Quantity, float],
    prefactor: Union[Quantity, float, None] = None,
    constants: Constants = CONSTANTS,
) -> Quantity:
    """Quasi-elastic dephasing, prefactor (default R/hbar) times (delta_T/r_B)^4."""
    ratio = _cm(delta_t) / _cm(bohr_radius)
    prefactor = _per_second(prefactor, constants.rydberg_rate)
    return Quantity(prefactor * ratio**4, "1/s")


def thermal_displacement(
    temperature: float,
    k_min: float = RIPPLON_K_MIN,
    k_max: float = RIPPLON_K_MAX,
    constants: Constants = CONSTANTS,
) -> Quantity:
    """
    Thermal-capillary surface displacement, delta_T^2 = k_B T / (4 pi sigma)
    ln(k_max / k_min). Temperature in K.
    """
    if temperature < 0:
        raise ParameterRangeError("Temperature must be non-negative.")
    if not 0 < k_min < k_max:
        raise ParameterRangeError("Need 0 < k_min < k_max.")
    variance = (
        constants.k_B
        * temperature
        / (4 * np.pi * constants.surface_tension_sigma)
        * np.log(k_max / k_min)
    )
    return Quantity(np.sqrt(variance), "cm")


def confinement_margin(spec: DeviceSpec, site: int, k_max: float = RIPPLON_K_MAX) -> float:
    """Ratio of the in-plane quantum to the largest ripplon quantum."""
    return (
        inplane_spacing(spec, site).value
        / ripplon_energy(k_max, spec.constants).value
    )


def rate_budget(
    params: QubitParams,
    temperature: float,
    working_frequency: Union[Quantity, float],
    delta_t: Union[Quantity, float, None] = None,
    image_field: float = DEFAULT_IMAGE_FIELD,
    t1_prefactor: Union[Quantity, float, None] = None,
    t2_prefactor: Union[Quantity, float, None] = None,
    thermal: bool = False,
    constants: Constants = CONSTANTS,
) -> RateBudget:
    """
    Compose the estimators. Working frequency as a Quantity or a float in
    rad/s. delta_T defaults to 2e-9 cm, or to the thermal-capillary value
    when `thermal` is set.

    The T1 prefactor defaults to the ripplon bandwidth omega_r(k_max); pass
    `constants.rydberg_rate` (R/hbar) for the bare estimate of `t1_estimate`.
    """
    if temperature <= 0:
        raise ParameterRangeError("Temperature must be positive.")
    if isinstance(working_frequency, Quantity):
        working_frequency = working_frequency.to("rad/s").value

    if delta_t is None:
        delta_t = (
            thermal_displacement(temperature, constants=constants).value
            if thermal
            else DEFAULT_DELTA_T
        )
    delta_t = _cm(delta_t)
    if t1_prefactor is None:
        t1_prefactor = ripplon_frequency(RIPPLON_K_MAX, constants)

    pressing = float(np.mean(params.pressing_field)) if params.n_sites else 0.0
    effective_field = abs(pressing) + image_field
    logger.debug(f"Effective field {effective_field} V/cm, delta_T {delta_t:.3e} cm")

    return RateBudget(
        tau_intra_inv=intraband_rate(effective_field, constants).value,
        t1_inv=t1_estimate(delta_t, constants.bohr_rB, t1_prefactor, constants).value,
        t2_inv=t2_estimate(delta_t, constants.bohr_rB, t2_prefactor, constants).value,
        delta_t=delta_t,
        working_frequency=working_frequency,
    )
