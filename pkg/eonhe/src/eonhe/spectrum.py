"""Vertical (z-direction) one-electron problem in the image potential."""

import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import pandas as pd
from joblib.memory import Memory
from scipy.linalg import eigh_tridiagonal

from eonhe.errors import IndexRangeError, ResolutionError, SpectrumTruncatedError
from eonhe.units import (
    CONSTANTS,
    Constants,
    Quantity,
    as_internal,
    dipole_energy_ghz,
)

logger = logging.getLogger(__name__)

mem = Memory(location=os.environ.get("EONHE_CACHE", "cache"), verbose=0)

MIN_POINTS_PER_BOHR = 32
CONVERGENCE_TOLERANCE = 5e-3
TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class VerticalPotential:
    """
    V(z) = -Lambda e^2/z + e E z above a hard wall at z = 0.
    pressing_field in V/cm; positive values press the electron to the surface.
    """

    pressing_field: float = 0.0
    constants: Constants = CONSTANTS

    @property
    def lambda_image(self) -> float:
        return self.constants.lambda_image

    @property
    def reduced_field(self) -> float:
        """Field in units of R/(e r_B)."""
        return (
            dipole_energy_ghz(self.pressing_field, self.constants.bohr_nm)
            / self.constants.rydberg_ghz
        )

    def __call__(self, z: np.ndarray) -> np.ndarray:
        """Potential energy in GHz at heights z in nm."""
        z = np.asarray(z, dtype=float)
        return -2 * self.constants.rydberg_ghz * self.constants.bohr_nm / z + dipole_energy_ghz(
            self.pressing_field, z
        )


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on (0, z_max) with `points` interior nodes."""

    z_max: float = 640.0
    points: int = 8192

    @classmethod
    def for_levels(cls, n_levels: int, constants: Constants = CONSTANTS) -> "GridSpec":
        z_max = max(640.0, 5.5 * n_levels**2 * constants.bohr_nm)
        points = max(8192, int(np.ceil(z_max / constants.bohr_nm * 98)))
        return cls(z_max=z_max, points=points)

    def coarsened(self) -> "GridSpec":
        return GridSpec(z_max=self.z_max, points=self.points // 2)

    def refined(self) -> "GridSpec":
        return GridSpec(z_max=self.z_max, points=2 * self.points)


@dataclass(frozen=True, eq=False)
class VerticalSpectrum:
    """Lowest levels on a grid; energies in GHz, z in nm, wavefunctions in nm^-1/2."""

    potential: VerticalPotential
    grid: GridSpec
    z: np.ndarray
    energies: np.ndarray
    wavefunctions: np.ndarray
    metastable: bool = False
    barrier_top: float = field(default=np.inf)

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    @property
    def dz(self) -> float:
        return self.z[1] - self.z[0]

    def check_level(self, m: int) -> None:
        if not 1 <= m <= self.n_levels:
            raise IndexRangeError(
                f"Level {m} not solved, available levels are 1..{self.n_levels}."
            )

    def energy(self, m: int) -> float:
        self.check_level(m)
        return self.energies[m - 1]

    def wavefunction(self, m: int) -> np.ndarray:
        self.check_level(m)
        return self.wavefunctions[m - 1]

    def transition_frequency(self, m: int = 1, m_prime: int = 2) -> float:
        """(E_m' - E_m)/h in GHz."""
        return self.energy(m_prime) - self.energy(m)


@mem.cache
def _diagonalize(
    reduced_field: float, x_max: float, points: int, n_levels: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Three-point finite differences for -d^2/dx^2 - 2/x + F x in units of
    R and r_B, with Dirichlet walls at x = 0 and x = x_max.
    """
    h = x_max / (points + 1)
    x = h * np.arange(1, points + 1)
    diagonal = 2 / h**2 - 2 / x + reduced_field * x
    off_diagonal = np.full(points - 1, -1 / h**2)
    energies, vectors = eigh_tridiagonal(
        diagonal, off_diagonal, select="i", select_range=(0, n_levels - 1)
    )
    vectors = vectors.T / np.sqrt(h)
    vectors *= np.sign(vectors[:, :1])
    return energies, vectors


def _barrier_top(reduced_field: float, x_max: float) -> float:
    """Highest energy (units of R) still bound inside the box."""
    if reduced_field < 0:
        x_peak = np.sqrt(2 / -reduced_field)
        if x_peak < x_max:
            return -2 * np.sqrt(2 * -reduced_field)
    return -2 / x_max + reduced_field * x_max


def _solve(
    potential: VerticalPotential, n_levels: int, grid: GridSpec
) -> VerticalSpectrum:
    constants = potential.constants
    x_max = grid.z_max / constants.bohr_nm
    if grid.points / x_max < MIN_POINTS_PER_BOHR:
        raise ResolutionError(
            f"Grid has {grid.points / x_max:.1f} points per Bohr radius, at least {MIN_POINTS_PER_BOHR} are required."
        )
    reduced_field = potential.reduced_field
    if reduced_field <= 0 and x_max < 5 * n_levels**2:
        raise ResolutionError(
            f"z_max = {grid.z_max} nm is too short for {n_levels} levels, use at least {5 * n_levels**2 * constants.bohr_nm:.0f} nm."
        )

    energies, vectors = _diagonalize(reduced_field, x_max, grid.points, n_levels)
    top = _barrier_top(reduced_field, x_max)
    n_bound = int(np.sum(energies < top))
    if n_bound < n_levels:
        raise SpectrumTruncatedError(
            f"Only {n_bound} of {n_levels} requested levels are bound at {potential.pressing_field} V/cm."
        )

    # weight of the highest level in the outer tenth of the box
    tail = np.sum(vectors[-1, int(0.9 * grid.points) :] ** 2) * x_max / (grid.points + 1)
    if tail > TAIL_TOLERANCE:
        raise ResolutionError(
            f"Level {n_levels} reaches the far wall (tail weight {tail:.2e}), increase z_max."
        )

    metastable = reduced_field < 0
    if metastable:
        logger.debug(
            f"Extraction field {potential.pressing_field} V/cm: levels are box-quasibound."
        )

    h = grid.z_max / (grid.points + 1)
    return VerticalSpectrum(
        potential=potential,
        grid=grid,
        z=h * np.arange(1, grid.points + 1),
        energies=energies * constants.rydberg_ghz,
        wavefunctions=vectors / np.sqrt(constants.bohr_nm),
        metastable=metastable,
        barrier_top=top * constants.rydberg_ghz,
    )


def solve_vertical(
    potential: VerticalPotential,
    n_levels: int = 4,
    grid: Optional[GridSpec] = None,
    check_convergence: bool = True,
) -> VerticalSpectrum:
    """Solve for the lowest `n_levels` bound states."""
    if n_levels < 1:
        raise IndexRangeError("n_levels must be at least 1.")
    if grid is None:
        grid = GridSpec.for_levels(n_levels, potential.constants)

    spectrum = _solve(potential, n_levels, grid)

    if check_convergence:
        coarse = _solve(potential, n_levels, grid.coarsened())
        scale = np.maximum(
            np.abs(spectrum.energies),
            potential.constants.rydberg_ghz / np.arange(1, n_levels + 1) ** 2,
        )
        deviation = np.max(np.abs(spectrum.energies - coarse.energies) / scale)
        logger.debug(f"Two-resolution deviation: {deviation:.2e}")
        if deviation > CONVERGENCE_TOLERANCE:
            raise ResolutionError(
                f"Energies change by {deviation:.2%} between {grid.points} and {grid.points // 2} points."
            )

    if spectrum.metastable:
        warnings.warn(
            "Negative pressing field: reported levels are metastable box levels."
        )
    return spectrum


def _matrix_element(spectrum: VerticalSpectrum, m: int, m_prime: int) -> float:
    spectrum.check_level(m)
    spectrum.check_level(m_prime)
    i, j = sorted((m, m_prime))
    return float(
        spectrum.dz
        * np.sum(spectrum.wavefunction(i) * spectrum.z * spectrum.wavefunction(j))
    )


def dipole_matrix_element(spectrum: VerticalSpectrum, m: int, m_prime: int) -> Quantity:
    """<m|z|m'> in nm."""
    return Quantity(_matrix_element(spectrum, m, m_prime), "nm")


def hellmann_feynman_sensitivity(spectrum: VerticalSpectrum) -> Quantity:
    """e(<2|z|2> - <1|z|1>)/h."""
    shift = _matrix_element(spectrum, 2, 2) - _matrix_element(spectrum, 1, 1)
    return Quantity(dipole_energy_ghz(1.0, shift), "GHz/(V/cm)")


def stark_sensitivity(
    potential: VerticalPotential,
    probe: Union[Quantity, float] = 1.0,
    grid: Optional[GridSpec] = None,
) -> Quantity:
    """d[(E_2 - E_1)/h]/dE by centered finite difference."""
    probe = as_internal(probe, "field")
    frequencies = []
    for offset in (-probe, probe):
        shifted = VerticalPotential(potential.pressing_field + offset, potential.constants)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                spectrum = solve_vertical(
                    shifted, n_levels=2, grid=grid, check_convergence=False
                )
        except SpectrumTruncatedError as e:
            raise ResolutionError(f"Probe step {probe} V/cm loses a level: {e}") from e
        frequencies.append(spectrum.transition_frequency())
    return Quantity((frequencies[1] - frequencies[0]) / (2 * probe), "GHz/(V/cm)")


def levels_frame(spectrum: VerticalSpectrum) -> pd.DataFrame:
    """Level table with energies in GHz and K."""
    kelvin = spectrum.energies / Quantity(1.0, "K").to("GHz").value
    return pd.DataFrame(
        {
            "m": np.arange(1, spectrum.n_levels + 1),
            "energy_ghz": spectrum.energies,
            "energy_k": kelvin,
            "z_mean_nm": [
                _matrix_element(spectrum, m, m) for m in range(1, spectrum.n_levels + 1)
            ],
        }
    )


def wavefunctions_frame(spectrum: VerticalSpectrum, stride: int = 8) -> pd.DataFrame:
    """Grid samples of the potential and the wavefunctions."""
    z = spectrum.z[::stride]
    frame = {"z_nm": z}
    for m in range(1, spectrum.n_levels + 1):
        frame[f"psi_{m}"] = spectrum.wavefunction(m)[::stride]
    frame["potential_ghz"] = spectrum.potential(z)
    return pd.DataFrame(frame)
