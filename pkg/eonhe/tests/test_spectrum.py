import numpy as np
import pytest

from eonhe.errors import IndexRangeError, ResolutionError
from eonhe.spectrum import (
    GridSpec,
    VerticalPotential,
    dipole_matrix_element,
    hellmann_feynman_sensitivity,
    levels_frame,
    solve_vertical,
    stark_sensitivity,
    wavefunctions_frame,
)
from eonhe.units import CONSTANTS, dipole_energy_ghz


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_zero_field_levels_are_hydrogenic(zero_field_spectrum, m):
    exact = -CONSTANTS.rydberg_ghz / m**2
    assert zero_field_spectrum.energy(m) == pytest.approx(exact, rel=1e-3)


def test_levels_ascending_and_normalized(zero_field_spectrum):
    assert np.all(np.diff(zero_field_spectrum.energies) > 0)
    for m in range(1, 5):
        psi = zero_field_spectrum.wavefunction(m)
        assert zero_field_spectrum.dz * np.sum(psi**2) == pytest.approx(1.0, abs=1e-8)
    assert not zero_field_spectrum.metastable


def test_transition_frequency(zero_field_spectrum):
    frequency = zero_field_spectrum.transition_frequency()
    assert frequency == pytest.approx(0.75 * CONSTANTS.rydberg_ghz, rel=2e-3)
    assert frequency == pytest.approx(120, rel=0.1)


def test_dipole_matrix_elements(zero_field_spectrum):
    r_b = CONSTANTS.bohr_nm
    z11 = dipole_matrix_element(zero_field_spectrum, 1, 1)
    z22 = dipole_matrix_element(zero_field_spectrum, 2, 2)
    z12 = dipole_matrix_element(zero_field_spectrum, 1, 2)
    assert z11.unit == "nm"
    assert z11.value == pytest.approx(1.5 * r_b, rel=3e-3)
    assert z22.value == pytest.approx(6 * r_b, rel=3e-3)
    assert abs(z12.value) == pytest.approx(96 * np.sqrt(2) / 243 * r_b, rel=1e-2)
    # orbit sizes quoted for the two qubit states
    assert z11.value == pytest.approx(11, rel=0.05)
    assert z22.value == pytest.approx(45, rel=0.03)


def test_matrix_element_symmetric(zero_field_spectrum):
    assert dipole_matrix_element(zero_field_spectrum, 1, 3) == dipole_matrix_element(
        zero_field_spectrum, 3, 1
    )


def test_stark_sensitivity_at_zero_field(zero_field_spectrum):
    stark = stark_sensitivity(VerticalPotential(0.0))
    assert stark.unit == "GHz/(V/cm)"
    assert 0.5 <= stark.value <= 1.5
    assert stark.value == pytest.approx(
        hellmann_feynman_sensitivity(zero_field_spectrum).value, rel=1e-2
    )
    # first-order perturbation theory, e (6 - 1.5) r_B / h
    assert stark.value == pytest.approx(0.83, rel=0.02)


@pytest.mark.parametrize("field", [0.0, 100.0, 500.0])
def test_stark_sensitivity_matches_hellmann_feynman(field):
    potential = VerticalPotential(field)
    spectrum = solve_vertical(potential, n_levels=2)
    assert stark_sensitivity(potential).value == pytest.approx(
        hellmann_feynman_sensitivity(spectrum).value, rel=1e-2
    )


def test_pressing_field_raises_transition_frequency(zero_field_spectrum):
    pressed = solve_vertical(VerticalPotential(100.0), n_levels=2)
    assert pressed.transition_frequency() > zero_field_spectrum.transition_frequency()


def test_grid_too_coarse():
    with pytest.raises(ResolutionError):
        solve_vertical(VerticalPotential(0.0), n_levels=2, grid=GridSpec(640.0, 1000))


def test_box_too_short():
    with pytest.raises(ResolutionError):
        solve_vertical(VerticalPotential(0.0), n_levels=4, grid=GridSpec(50.0, 10000))


def test_negative_field_is_metastable():
    with pytest.warns(UserWarning, match="metastable"):
        spectrum = solve_vertical(VerticalPotential(-0.1), n_levels=2)
    assert spectrum.metastable
    assert spectrum.energy(2) < spectrum.barrier_top


def test_level_range(zero_field_spectrum):
    with pytest.raises(IndexRangeError):
        zero_field_spectrum.energy(5)
    with pytest.raises(IndexRangeError):
        dipole_matrix_element(zero_field_spectrum, 0, 1)
    with pytest.raises(IndexRangeError):
        solve_vertical(VerticalPotential(0.0), n_levels=0)


def test_grid_for_levels_is_resolved():
    for n_levels in (1, 4, 6):
        grid = GridSpec.for_levels(n_levels)
        x_max = grid.z_max / CONSTANTS.bohr_nm
        assert x_max >= 5 * n_levels**2
        assert grid.coarsened().points / x_max >= 32


def test_frames(zero_field_spectrum):
    levels = levels_frame(zero_field_spectrum)
    assert list(levels.columns) == ["m", "energy_ghz", "energy_k", "z_mean_nm"]
    assert levels.energy_k.iloc[0] == pytest.approx(-CONSTANTS.rydberg_kelvin, rel=1e-3)
    waves = wavefunctions_frame(zero_field_spectrum)
    assert list(waves.columns) == ["z_nm", "psi_1", "psi_2", "psi_3", "psi_4", "potential_ghz"]
    assert len(waves) == int(np.ceil(len(zero_field_spectrum.z) / 8))


def test_doubling_grid_density_converges(zero_field_spectrum):
    finer = solve_vertical(
        VerticalPotential(0.0),
        n_levels=4,
        grid=zero_field_spectrum.grid.refined(),
        check_convergence=False,
    )
    shifts = np.abs(finer.energies / zero_field_spectrum.energies - 1)
    assert np.all(shifts < 5e-4)


def test_levels_are_orthonormal(zero_field_spectrum):
    psi = zero_field_spectrum.wavefunctions
    overlaps = zero_field_spectrum.dz * psi @ psi.T
    np.testing.assert_allclose(overlaps, np.eye(4), atol=1e-7)


def test_level_shift_is_mean_height():
    potential = VerticalPotential(50.0)
    spectrum = solve_vertical(potential, n_levels=3)
    lower = solve_vertical(VerticalPotential(49.0), n_levels=3)
    upper = solve_vertical(VerticalPotential(51.0), n_levels=3)
    for m in (1, 2, 3):
        slope = (upper.energy(m) - lower.energy(m)) / 2.0
        z_mm = dipole_matrix_element(spectrum, m, m).value
        assert slope == pytest.approx(dipole_energy_ghz(1.0, z_mm), rel=1e-2)


def test_transition_frequency_grows_with_pressing_field():
    fields = [0.0, 10.0, 25.0, 50.0, 75.0, 100.0]
    frequencies = [
        solve_vertical(VerticalPotential(field), n_levels=2).transition_frequency()
        for field in fields
    ]
    assert np.all(np.diff(frequencies) > 0)
