import numpy as np
import pytest

from eonhe.device import DeviceSpec, QubitParams, qubit_params
from eonhe.spectrum import VerticalPotential, solve_vertical

# zero-field values of the default material
Z12_NM = 4.268
SWAP_RATE = 0.319  # rad/ns at 0.5 um


def uniform_params(n_sites: int, coupling: float = SWAP_RATE) -> QubitParams:
    """Identical sites with all-to-all coupling, no eigenvalue solves."""
    couplings = np.full((n_sites, n_sites), coupling) - coupling * np.eye(n_sites)
    ones = np.ones(n_sites)
    return QubitParams(
        bohr_frequency=118.5 * ones,
        pressing_field=0.0 * ones,
        stark_sensitivity=0.83 * ones,
        z11=11.46 * ones,
        z22=45.83 * ones,
        z12=Z12_NM * ones,
        inplane_spacing=0.16 * ones,
        coupling=couplings,
        field_per_millivolt=4.0,
    )


@pytest.fixture(scope="session")
def make_params():
    return uniform_params


@pytest.fixture(scope="session")
def zero_field_spectrum():
    return solve_vertical(VerticalPotential(0.0), n_levels=4)


@pytest.fixture(scope="session")
def default_spec():
    return DeviceSpec()


@pytest.fixture(scope="session")
def default_params(default_spec):
    return qubit_params(default_spec)
