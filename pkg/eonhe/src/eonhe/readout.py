"""
State-selective tunneling readout. Under an extraction pulse the potential
-Lambda e^2/z - e E z forms a barrier, and each vertical level escapes with a
semiclassical rate.

In units of R and r_B the barrier is v(x) = -2/x - F x and the action of a
level eps < 0 is the integral of sqrt(v - eps) between the roots of
F x^2 + eps x + 2 = 0.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from eonhe.errors import ParameterRangeError
from eonhe.spectrum import VerticalPotential, VerticalSpectrum, solve_vertical
from eonhe.units import CONSTANTS, Constants, dipole_energy_ghz

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReadoutPulse:
    """Extraction field in V/cm (magnitude of the reversed field) and duration in ns."""

    extraction_field: float
    duration: float = 100.0

    def __post_init__(self) -> None:
        if not self.extraction_field > 0:
            raise ParameterRangeError("Extraction field must be positive.")
        if not self.duration > 0:
            raise ParameterRangeError("Pulse duration must be positive.")


@dataclass(frozen=True)
class ReadoutModel:
    pulse: ReadoutPulse
    log_rates: tuple[float, ...]
    over_barrier: tuple[bool, ...]

    @property
    def rates(self) -> np.ndarray:
        """Escape rates in s^-1."""
        return np.exp(np.asarray(self.log_rates))

    @property
    def gamma_1(self) -> float:
        return float(self.rates[0])

    @property
    def gamma_2(self) -> float:
        return float(self.rates[1])

    @property
    def log_ratio(self) -> float:
        return self.log_rates[1] - self.log_rates[0]

    @property
    def ratio(self) -> float:
        return float(np.exp(self.log_ratio))


def action(integrand: Callable[[float], float], lower: float, upper: float, **kwargs) -> float:
    """Integral of a barrier momentum between two turning points."""
    value, _ = quad(integrand, lower, upper, limit=200, **kwargs)
    return value


def transmission(integrand: Callable[[float], float], lower: float, upper: float) -> float:
    """Semiclassical penetration factor exp(-2 S)."""
    return float(np.exp(-2 * action(integrand, lower, upper)))


def turning_points(level: float, reduced_field: float) -> Optional[tuple[float, float]]:
    """Classically forbidden interval of a level, or None above the barrier."""
    discriminant = level**2 - 8 * reduced_field
    if discriminant <= 0:
        return None
    root = np.sqrt(discriminant)
    return (-level - root) / (2 * reduced_field), (-level + root) / (2 * reduced_field)


def level_action(level: float, reduced_field: float) -> Optional[float]:
    """Barrier action of a level (units of R) at extraction field F > 0."""
    points = turning_points(level, reduced_field)
    if points is None:
        return None
    inner, outer = points
    # sqrt(F (x - x1)(x2 - x) / x), the square roots go into the weight
    return action(
        lambda x: np.sqrt(reduced_field / x),
        inner,
        outer,
        weight="alg",
        wvar=(0.5, 0.5),
    )


def tunneling_rates(
    pulse: ReadoutPulse,
    constants: Constants = CONSTANTS,
    spectrum: Optional[VerticalSpectrum] = None,
) -> ReadoutModel:
    """
    Escape rates nu_m exp(-2 S_m) with attempt frequency nu_m = |E_m|/hbar.
    Levels come from the zero-field spectrum unless one is passed.
    """
    if spectrum is None:
        spectrum = solve_vertical(VerticalPotential(0.0, constants), n_levels=2)
    levels = spectrum.energies / constants.rydberg_ghz
    reduced_field = (
        dipole_energy_ghz(pulse.extraction_field, constants.bohr_nm)
        / constants.rydberg_ghz
    )

    log_rates, over_barrier = [], []
    for m, level in enumerate(levels, start=1):
        log_attempt = np.log(abs(level) * constants.rydberg_rate)
        s = level_action(level, reduced_field)
        if s is None:
            logger.info(f"Level {m} is above the barrier at {pulse.extraction_field} V/cm.")
            log_rates.append(log_attempt)
            over_barrier.append(True)
        else:
            log_rates.append(log_attempt - 2 * s)
            over_barrier.append(False)
    return ReadoutModel(pulse, tuple(log_rates), tuple(over_barrier))


def readout_fidelity(model: ReadoutModel, duration: Optional[float] = None) -> tuple[float, float]:
    """
    (p_detect_excited, p_false_ground) after `duration` ns, defaulting to the
    pulse duration.
    """
    if duration is None:
        duration = model.pulse.duration
    if duration < 0:
        raise ParameterRangeError("Duration must be non-negative.")
    seconds = duration * 1e-9
    return (
        float(-np.expm1(-model.gamma_2 * seconds)),
        float(-np.expm1(-model.gamma_1 * seconds)),
    )


def operating_field(
    duration: float = 100.0,
    false_probability: float = 1e-3,
    constants: Constants = CONSTANTS,
    spectrum: Optional[VerticalSpectrum] = None,
) -> float:
    """Extraction field (V/cm) at which Gamma_1 * duration equals `false_probability`."""
    if spectrum is None:
        spectrum = solve_vertical(VerticalPotential(0.0, constants), n_levels=2)
    ground = spectrum.energies[0] / constants.rydberg_ghz
    field_unit = dipole_energy_ghz(1.0, constants.bohr_nm) / constants.rydberg_ghz
    # ground level leaves the barrier at F = eps^2 / 8
    upper = 0.999 * ground**2 / 8 / field_unit
    target = np.log(false_probability / (duration * 1e-9))

    def mismatch(field: float) -> float:
        model = tunneling_rates(ReadoutPulse(field, duration), constants, spectrum)
        return model.log_rates[0] - target

    field = brentq(mismatch, 1e-2 * upper, upper, xtol=1e-6)
    logger.info(f"Readout operating field {field:.3f} V/cm for {duration} ns")
    return field
