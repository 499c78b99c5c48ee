"""
Electrode-geometry model of a qubit array: per-site pressing fields, in-plane
confinement, magnetic gaps, dipolar couplings and the QubitParams they compose.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from eonhe.errors import (
    GeometryError,
    IndexRangeError,
    ParameterRangeError,
    UnconfinedSiteError,
)
from eonhe.spectrum import (
    GridSpec,
    VerticalPotential,
    dipole_matrix_element,
    solve_vertical,
    stark_sensitivity,
)
from eonhe.units import (
    CONSTANTS,
    SPEED_OF_LIGHT,
    Constants,
    Quantity,
    as_internal,
    field_to_statvolt,
    ghz_to_rad_per_ns,
)

logger = logging.getLogger(__name__)

WIGNER_CRYSTAL_GAMMA = 130.0


class Phase(str, Enum):
    LIQUID = "liquid"
    CRYSTAL = "crystal"


def _default_sites() -> np.ndarray:
    return np.array([[0.0, 0.0], [0.5, 0.0]])


@dataclass(frozen=True, eq=False)
class DeviceSpec:
    """
    Submerged spherical electrodes below a helium surface, one per qubit site.

    Lengths of the electrode in nm, site positions in um, voltages in mV,
    magnetic field in T, temperature in K, electron density in cm^-2 and the
    uniform capacitor field in V/cm.
    """

    electrode_radius: float = 100.0
    depth: float = 500.0
    sites: np.ndarray = field(default_factory=_default_sites)
    voltages: Optional[np.ndarray] = None
    magnetic_field: float = 1.5
    temperature: float = 0.01
    electron_density: float = 1e8
    base_pressing_field: float = 0.0
    constants: Constants = CONSTANTS

    def __post_init__(self) -> None:
        sites = np.asarray(self.sites, dtype=float).reshape(-1, 2)
        voltages = (
            np.zeros(len(sites))
            if self.voltages is None
            else np.asarray(self.voltages, dtype=float).reshape(-1)
        )
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "voltages", voltages)
        if not 0 < self.electrode_radius < self.depth:
            raise GeometryError(
                f"Electrode radius {self.electrode_radius} nm must be positive and below the depth {self.depth} nm."
            )
        if len(voltages) != len(sites):
            raise GeometryError(
                f"Got {len(voltages)} voltages for {len(sites)} sites."
            )

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def field_per_millivolt(self) -> float:
        """Pressing field per electrode millivolt, R_el/h^2 in V/cm."""
        return self.electrode_radius / self.depth**2 * 1e4

    def check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise IndexRangeError(
                f"Site {site} out of range for a device with {self.n_sites} sites."
            )

    def with_voltage(self, site: int, voltage: float) -> "DeviceSpec":
        self.check_site(site)
        voltages = self.voltages.copy()
        voltages[site] = voltage
        return replace(self, voltages=voltages)


@dataclass(frozen=True, eq=False)
class QubitParams:
    """
    Per-site qubit parameters and the pairwise exchange matrix.

    Frequencies in GHz, fields in V/cm, matrix elements in nm, in-plane
    quanta in K, couplings in rad/ns.
    """

    bohr_frequency: np.ndarray
    pressing_field: np.ndarray
    stark_sensitivity: np.ndarray
    z11: np.ndarray
    z22: np.ndarray
    z12: np.ndarray
    inplane_spacing: np.ndarray
    coupling: np.ndarray
    field_per_millivolt: float = 4.0

    @property
    def n_sites(self) -> int:
        return len(self.bohr_frequency)

    def check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise IndexRangeError(
                f"Site {site} out of range for {self.n_sites} qubits."
            )

    def subset(self, sites: Sequence[int]) -> "QubitParams":
        """Parameters of the given sites only, in the given order."""
        for site in sites:
            self.check_site(site)
        index = np.asarray(sites, dtype=int)
        return QubitParams(
            bohr_frequency=self.bohr_frequency[index],
            pressing_field=self.pressing_field[index],
            stark_sensitivity=self.stark_sensitivity[index],
            z11=self.z11[index],
            z22=self.z22[index],
            z12=self.z12[index],
            inplane_spacing=self.inplane_spacing[index],
            coupling=self.coupling[np.ix_(index, index)],
            field_per_millivolt=self.field_per_millivolt,
        )

    def with_coupling(self, coupling: np.ndarray) -> "QubitParams":
        return replace(self, coupling=np.asarray(coupling, dtype=float))

    def detuning_to_millivolt(self, site: int, detuning: float) -> float:
        """Electrode voltage (mV) that shifts a site's Bohr frequency by `detuning` rad/ns."""
        self.check_site(site)
        shift_ghz = abs(detuning) / (2 * np.pi)
        return shift_ghz / abs(self.stark_sensitivity[site]) / self.field_per_millivolt


def pressing_field(spec: DeviceSpec, site: int) -> Quantity:
    """E_n = E_base + V_n R_el / h^2."""
    spec.check_site(site)
    return Quantity(
        spec.base_pressing_field + spec.voltages[site] * spec.field_per_millivolt,
        "V/cm",
    )


def voltage_increment(
    spec: DeviceSpec,
    site: int,
    shift: Union[Quantity, float],
    sensitivity: Union[Quantity, float],
) -> Quantity:
    """Electrode voltage change needed for a Bohr-frequency shift (GHz) at a Stark sensitivity (GHz/(V/cm))."""
    spec.check_site(site)
    shift = as_internal(shift, "energy")
    sensitivity = as_internal(sensitivity, "stark")
    return Quantity(shift / sensitivity / spec.field_per_millivolt, "mV")


def inplane_spacing(spec: DeviceSpec, site: int) -> Quantity:
    """hbar Omega_par from m Omega_par^2 = e^2 R (h^2 - R^2)^-2 + e R V h^-3, in K."""
    spec.check_site(site)
    c = spec.constants
    radius = spec.electrode_radius * 1e-7
    depth = spec.depth * 1e-7
    voltage = field_to_statvolt(spec.voltages[site] * 1e-3)
    stiffness = (
        c.elementary_charge**2 * radius / (depth**2 - radius**2) ** 2
        + c.elementary_charge * radius * voltage / depth**3
    )
    if stiffness <= 0:
        raise UnconfinedSiteError(
            f"Site {site} at {spec.voltages[site]} mV has no in-plane confinement."
        )
    omega = np.sqrt(stiffness / c.electron_mass)
    return Quantity(c.hbar * omega / c.k_B, "K")


def magnetic_gap(
    magnetic_field: Union[Quantity, float], constants: Constants = CONSTANTS
) -> Quantity:
    """Cyclotron gap hbar e B / (m c) in K."""
    magnetic_field = as_internal(magnetic_field, "magnetic_field")
    if magnetic_field < 0:
        raise ParameterRangeError("Magnetic field must be non-negative.")
    gauss = magnetic_field * 1e4
    gap = (
        constants.hbar
        * constants.elementary_charge
        * gauss
        / (constants.electron_mass * SPEED_OF_LIGHT)
    )
    return Quantity(gap / constants.k_B, "K")


def coulomb_coupling(
    electron_density: Union[Quantity, float],
    temperature: float,
    constants: Constants = CONSTANTS,
) -> tuple[float, Phase]:
    """
    Plasma parameter Gamma = e^2 (pi n_e)^1/2 / k_B T and the phase it implies.
    Temperature in K.
    """
    electron_density = as_internal(electron_density, "density")
    if electron_density <= 0 or temperature <= 0:
        raise ParameterRangeError("Electron density and temperature must be positive.")
    gamma = (
        constants.elementary_charge**2
        * np.sqrt(np.pi * electron_density)
        / (constants.k_B * temperature)
    )
    return gamma, Phase.CRYSTAL if gamma > WIGNER_CRYSTAL_GAMMA else Phase.LIQUID


def coupling_matrix(
    spec: DeviceSpec, z12: Union[np.ndarray, float]
) -> np.ndarray:
    """
    Omega_sw(n, m) = e^2 z12^2 / (hbar d_nm^3) in rad/ns.
    Per-site z12 (nm) enter as the geometric mean of each pair.
    """
    c = spec.constants
    n = spec.n_sites
    if n < 2:
        return np.zeros((n, n))
    distances = pdist(spec.sites) * 1e-4
    if np.any(distances <= 0):
        raise GeometryError("Two qubit sites coincide.")
    z12 = np.abs(np.broadcast_to(np.asarray(z12, dtype=float), (n,))) * 1e-7
    pair_z12_squared = np.outer(z12, z12)
    inverse_cube = squareform(distances**-3.0)
    # inverse_cube has a zero diagonal
    return c.elementary_charge**2 * pair_z12_squared * inverse_cube / c.hbar * 1e-9


def qubit_params(
    spec: DeviceSpec, grid: Optional[GridSpec] = None
) -> QubitParams:
    """Solve every site's vertical problem at its own pressing field."""
    fields = np.array([pressing_field(spec, n).value for n in range(spec.n_sites)])

    solved = {}
    for value in np.unique(fields):
        potential = VerticalPotential(value, spec.constants)
        spectrum = solve_vertical(potential, n_levels=2, grid=grid)
        solved[value] = (
            spectrum.transition_frequency(),
            stark_sensitivity(potential, grid=grid).value,
            dipole_matrix_element(spectrum, 1, 1).value,
            dipole_matrix_element(spectrum, 2, 2).value,
            dipole_matrix_element(spectrum, 1, 2).value,
        )
        logger.debug(f"Solved site field {value} V/cm: {solved[value]}")

    columns = np.array([solved[value] for value in fields]).reshape(-1, 5).T
    z12 = columns[4]
    return QubitParams(
        bohr_frequency=columns[0],
        pressing_field=fields,
        stark_sensitivity=columns[1],
        z11=columns[2],
        z22=columns[3],
        z12=z12,
        inplane_spacing=np.array(
            [inplane_spacing(spec, n).value for n in range(spec.n_sites)]
        ),
        coupling=coupling_matrix(spec, z12),
        field_per_millivolt=spec.field_per_millivolt,
    )


def square_lattice(rows: int, cols: int, spacing: float = 0.5) -> np.ndarray:
    """Site positions (um) of a rows x cols square array."""
    if rows < 0 or cols < 0 or spacing <= 0:
        raise GeometryError("Lattice needs non-negative dimensions and a positive spacing.")
    y, x = np.mgrid[0:rows, 0:cols]
    return spacing * np.column_stack([x.ravel(), y.ravel()]).astype(float)


def qubit_capacity(spacing: float = 0.5, area: float = 1.0) -> float:
    """Number of sites at `spacing` um that fit on `area` cm^2."""
    if spacing <= 0:
        raise GeometryError("Spacing must be positive.")
    return area / (spacing * 1e-4) ** 2


def transition_rate(params: QubitParams, site: int) -> float:
    """Angular Bohr frequency of a site in rad/ns."""
    params.check_site(site)
    return ghz_to_rad_per_ns(params.bohr_frequency[site])
