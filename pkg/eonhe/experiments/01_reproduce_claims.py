"""
Evaluate the headline figures of merit of the default device: constants,
vertical spectrum, electrode control, couplings, decoherence and readout.
"""

import argparse
from pathlib import Path

import numpy as np
import pandas as pd
from eonhe.config import Config, load
from eonhe.decoherence import (
    RIPPLON_K_MAX,
    confinement_margin,
    rate_budget,
    ripplon_energy,
)
from eonhe.device import (
    coulomb_coupling,
    inplane_spacing,
    magnetic_gap,
    qubit_params,
    voltage_increment,
)
from eonhe.dynamics import rabi_rate
from eonhe.misc import safe_mkdir, write_config, write_frame
from eonhe.readout import (
    ReadoutPulse,
    operating_field,
    readout_fidelity,
    tunneling_rates,
)
from eonhe.spectrum import (
    VerticalPotential,
    dipole_matrix_element,
    hellmann_feynman_sensitivity,
    levels_frame,
    solve_vertical,
    stark_sensitivity,
)
from eonhe.units import Quantity


def main(args):
    output_dir = Path("output/01") / args.experiment_id
    safe_mkdir(output_dir)
    write_config(vars(args), output_dir)

    config = load(args.config) if args.config is not None else Config()
    spec = config.device_spec()
    constants = spec.constants

    rows = []

    def record(name, value, unit="1"):
        if isinstance(value, Quantity):
            value, unit = value.value, value.unit
        rows.append({"quantity": name, "value": float(value), "unit": unit})

    # material constants
    record("lambda_image", constants.lambda_image)
    record("rydberg", constants.rydberg_kelvin, "K")
    record("bohr_radius", constants.bohr_nm * 10, "A")

    # vertical spectrum at zero pressing field
    potential = VerticalPotential(0.0, constants)
    spectrum = solve_vertical(potential, n_levels=args.levels)
    write_frame(levels_frame(spectrum), output_dir / "levels.csv")
    for m in range(1, args.levels + 1):
        exact = -constants.rydberg_ghz / m**2
        record(f"level_{m}_relative_error", spectrum.energy(m) / exact - 1)
    record("transition_frequency", spectrum.transition_frequency(), "GHz")
    record("z11", dipole_matrix_element(spectrum, 1, 1))
    record("z22", dipole_matrix_element(spectrum, 2, 2))
    record("z12", dipole_matrix_element(spectrum, 1, 2))
    stark = stark_sensitivity(potential)
    record("stark_sensitivity", stark)
    record("stark_hellmann_feynman", hellmann_feynman_sensitivity(spectrum))

    # electrode control and in-plane confinement
    record("voltage_per_ghz", voltage_increment(spec, 0, 1.0, stark))
    record("inplane_spacing", inplane_spacing(spec, 0))
    record("magnetic_gap", magnetic_gap(spec.magnetic_field, constants))
    gamma, _ = coulomb_coupling(spec.electron_density, args.plasma_temperature, constants)
    record("coulomb_gamma", gamma)

    # couplings and drive
    params = qubit_params(spec)
    if params.n_sites >= 2:
        omega_sw = params.coupling[0, 1]
        record("swap_rate", omega_sw * 1e9, "rad/s")
        record("swap_time", np.pi / omega_sw, "ns")
    if params.n_sites >= 1:
        record("rabi_rate", rabi_rate(params, 0, args.e_rf) * 1e9, "rad/s")
        record("confinement_margin", confinement_margin(spec, 0))

    # decoherence at the working frequency
    budget = rate_budget(
        params, spec.temperature, args.working_frequency, constants=constants, **config.decoherence()
    )
    for key, value in budget.report().items():
        record(key, value)
    record("ripplon_energy_kmax", ripplon_energy(RIPPLON_K_MAX, constants))
    record("delta_over_bohr_4", (budget.delta_t / constants.bohr_rB) ** 4)

    # readout at the operating point
    field = operating_field(args.readout_duration, args.false_probability, constants)
    model = tunneling_rates(ReadoutPulse(field, args.readout_duration), constants)
    p_detect, p_false = readout_fidelity(model)
    record("readout_field", field, "V/cm")
    record("readout_log_ratio", model.log_ratio)
    record("readout_p_detect", p_detect)
    record("readout_p_false", p_false)

    write_frame(pd.DataFrame(rows), output_dir / "claims.csv")
    print("Done!")


def parse_args():
    parser = argparse.ArgumentParser()
    parser.add_argument("--experiment-id", default="default")
    parser.add_argument("--config", type=Path)

    # spectrum
    parser.add_argument("--levels", type=int, default=4)

    # device and drive
    parser.add_argument("--plasma-temperature", type=float, default=1.3)
    parser.add_argument("--e-rf", type=float, default=1.0)

    # decoherence
    parser.add_argument("--working-frequency", type=float, default=1e9)

    # readout
    parser.add_argument("--readout-duration", type=float, default=100.0)
    parser.add_argument("--false-probability", type=float, default=1e-3)

    return parser.parse_args()


if __name__ == "__main__":
    main(parse_args())
