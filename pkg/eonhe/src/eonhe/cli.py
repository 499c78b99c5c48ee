"""
Command-line front end.

Exit codes: 0 success, 2 configuration error, 64 usage error (bad arguments
or missing files), 70 numerical failure.
"""

import argparse
import logging
import sys
import traceback
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from eonhe import config as config_module
from eonhe import control, decoherence, device, dynamics, readout, spectrum, sweeps
from eonhe.errors import (
    ConfigError,
    EonheError,
    GeometryError,
    InvalidMaterialError,
    ParameterRangeError,
    UnitError,
)
from eonhe.misc import format_report, write_frame
from eonhe.units import Quantity

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_USAGE = 64
EXIT_NUMERICAL = 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from e


def _emit(frame: pd.DataFrame, out: Optional[Path]) -> None:
    if out is None:
        write_frame(frame, sys.stdout)
    else:
        write_frame(frame, out)
        logger.info(f"Wrote {out}")


def _params(cfg: config_module.Config) -> device.QubitParams:
    return device.qubit_params(cfg.device_spec())


def cmd_params(args, cfg: config_module.Config) -> None:
    spec = cfg.device_spec()
    params = device.qubit_params(spec)
    gamma, phase = device.coulomb_coupling(spec.electron_density, spec.temperature, spec.constants)
    sys.stdout.write(
        format_report(
            {
                "n_qubits": params.n_sites,
                "magnetic_gap": device.magnetic_gap(spec.magnetic_field, spec.constants),
                "coulomb_gamma": float(gamma),
                "electron_phase": phase.value,
            }
        )
    )
    frame = pd.DataFrame(
        {
            "site": np.arange(params.n_sites),
            "x_um": spec.sites[:, 0],
            "y_um": spec.sites[:, 1],
            "voltage_mv": spec.voltages,
            "pressing_field_v_cm": params.pressing_field,
            "bohr_frequency_ghz": params.bohr_frequency,
            "stark_ghz_per_v_cm": params.stark_sensitivity,
            "z11_nm": params.z11,
            "z22_nm": params.z22,
            "z12_nm": params.z12,
            "inplane_spacing_k": params.inplane_spacing,
        }
    )
    _emit(frame, args.out)
    if args.couplings is not None:
        couplings = pd.DataFrame(
            params.coupling, columns=[f"site_{n}" for n in range(params.n_sites)]
        )
        write_frame(couplings, args.couplings)


def cmd_spectrum(args, cfg: config_module.Config) -> None:
    spec = cfg.device_spec()
    field = spec.base_pressing_field if args.field is None else args.field
    potential = spectrum.VerticalPotential(field, spec.constants)
    solved = spectrum.solve_vertical(potential, n_levels=args.levels)
    _emit(spectrum.levels_frame(solved), args.out)
    if args.wavefunctions is not None:
        write_frame(spectrum.wavefunctions_frame(solved), args.wavefunctions)


def cmd_rabi(args, cfg: config_module.Config) -> None:
    params = _params(cfg)
    omega, trajectory = dynamics.rabi_experiment(
        params,
        args.site,
        e_rf=args.e_rf,
        duration=args.duration,
        detuning=args.detuning,
        sampling=args.samples,
        rtol=cfg.simulation()["rtol"],
        atol=cfg.simulation()["atol"],
    )
    sys.stderr.write(format_report({"rabi_rate": Quantity(omega, "rad/ns")}))
    _emit(trajectory.to_frame(), args.out)


def cmd_lz_sweep(args, cfg: config_module.Config) -> None:
    params = _params(cfg)
    frame = sweeps.lz_sweep(
        params,
        args.g,
        samples=args.samples,
        span=args.span,
        num_workers=args.num_workers,
        rtol=cfg.simulation()["rtol"],
        atol=cfg.simulation()["atol"],
    )
    _emit(frame, args.out)


def _circuit(args, n_qubits: int) -> control.Circuit:
    if not args.circuit.exists():
        raise UsageError(f"circuit file {args.circuit} not found")
    return control.parse_circuit(args.circuit.read_text(), n_qubits, path=args.circuit)


def _compile_options(args) -> control.CompileOptions:
    return control.CompileOptions(
        e_rf=args.e_rf,
        parking_factor=args.parking_factor,
        voltage_bound=args.voltage_bound,
        envelope=args.envelope,
    )


def _budget(cfg: config_module.Config, params: device.QubitParams, frequency: float):
    spec = cfg.device_spec()
    return decoherence.rate_budget(
        params, spec.temperature, frequency, constants=spec.constants, **cfg.decoherence()
    )


def cmd_simulate(args, cfg: config_module.Config) -> None:
    params = _params(cfg)
    circuit = _circuit(args, params.n_sites)
    schedule, _ = control.compile(circuit, params, _compile_options(args))
    if args.initial is None:
        initial = dynamics.RegisterState.ground(params.n_sites)
    else:
        if len(args.initial) != params.n_sites or set(args.initial) - {"0", "1"}:
            raise UsageError(f"--initial needs {params.n_sites} bits, got '{args.initial}'")
        initial = dynamics.RegisterState.from_bits([int(b) for b in args.initial])
    rates = None
    if args.decoherence:
        rates = dynamics.DecoherenceRates.from_budget(_budget(cfg, params, 0.0))
    trajectory = dynamics.evolve(
        params, schedule, initial, decoherence=rates, sampling=args.samples, **cfg.simulation()
    )
    _emit(trajectory.to_frame(coherences=args.coherences), args.out)


def cmd_rates(args, cfg: config_module.Config) -> None:
    params = _params(cfg)
    budget = _budget(cfg, params, args.frequency)
    spec = cfg.device_spec()
    entries = dict(budget.report())
    entries["ripplon_energy_kmax"] = decoherence.ripplon_energy(
        decoherence.RIPPLON_K_MAX, spec.constants
    )
    sys.stdout.write(format_report(entries))


def cmd_compile(args, cfg: config_module.Config) -> None:
    params = _params(cfg)
    circuit = _circuit(args, params.n_sites)
    budget = _budget(cfg, params, 0.0)
    schedule, report = control.compile(circuit, params, _compile_options(args), budget)
    checked = control.validate(
        schedule, budget, control.HardwareLimits.from_params(params, voltage_bound=args.voltage_bound)
    )
    report.warnings.extend(checked.warnings)
    report.violations.extend(checked.violations)
    sys.stderr.write(format_report(report.summary()))
    _emit(schedule.to_frame(), args.out)


def cmd_readout(args, cfg: config_module.Config) -> None:
    constants = cfg.constants()
    field = args.field
    if field is None:
        field = readout.operating_field(args.duration, constants=constants)
    model = readout.tunneling_rates(readout.ReadoutPulse(field, args.duration), constants)
    p_detect, p_false = readout.readout_fidelity(model)
    sys.stdout.write(
        format_report(
            {
                "extraction_field": Quantity(field, "V/cm"),
                "duration": Quantity(args.duration, "ns"),
                "gamma_1": Quantity(model.gamma_1, "1/s"),
                "gamma_2": Quantity(model.gamma_2, "1/s"),
                "log_ratio": float(model.log_ratio),
                "over_barrier_2": str(model.over_barrier[1]).lower(),
                "p_detect_excited": p_detect,
                "p_false_ground": p_false,
            }
        )
    )


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="config file (defaults if omitted)")
    common.add_argument("--dump-config", action="store_true", help="print the parsed config and exit")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    common.add_argument("--out", type=Path, help="output CSV (stdout if omitted)")

    parser = _Parser(prog="eonhe", description="Electrons-on-helium qubit simulator.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("params", parents=[common], help="qubit parameters per site")
    p.add_argument("--couplings", type=Path, help="coupling matrix CSV (rad/ns)")
    p.set_defaults(func=cmd_params)

    p = subparsers.add_parser("spectrum", parents=[common], help="vertical levels and wavefunctions")
    p.add_argument("--field", type=float, help="pressing field in V/cm (device base field if omitted)")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--wavefunctions", type=Path, help="wavefunction CSV")
    p.set_defaults(func=cmd_spectrum)

    p = subparsers.add_parser("rabi", parents=[common], help="resonant Rabi oscillation")
    p.add_argument("--site", type=int, default=0)
    p.add_argument("--e-rf", type=float, default=1.0, help="drive field in V/cm")
    p.add_argument("--duration", type=float, help="ns, one Rabi period if omitted")
    p.add_argument("--detuning", type=float, default=0.0, help="rad/ns")
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(func=cmd_rabi)

    p = subparsers.add_parser("lz-sweep", parents=[common], help="Landau-Zener transfer kinetics")
    p.add_argument("--g", type=_float_list, default=[0.2, 0.45, 1.0], help="comma-separated g values")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--span", type=float, help="half width of the sqrt(alpha) t axis")
    p.add_argument("--num-workers", type=int, default=4)
    p.set_defaults(func=cmd_lz_sweep)

    for name, func, text in [
        ("simulate", cmd_simulate, "compile a circuit and simulate it"),
        ("compile", cmd_compile, "compile a circuit to a control schedule"),
    ]:
        p = subparsers.add_parser(name, parents=[common], help=text)
        p.add_argument("--circuit", type=Path, required=True)
        p.add_argument("--e-rf", type=float, default=1.0, help="drive field in V/cm")
        p.add_argument("--parking-factor", type=float, default=100.0)
        p.add_argument("--voltage-bound", type=float, default=20.0, help="mV")
        p.add_argument("--envelope", default="rectangular")
        if name == "simulate":
            p.add_argument("--initial", help="bit string, site 0 first")
            p.add_argument("--samples", type=int, default=201)
            p.add_argument("--decoherence", action="store_true")
            p.add_argument("--coherences", action="store_true")
        p.set_defaults(func=func)

    p = subparsers.add_parser("rates", parents=[common], help="decoherence rate budget")
    p.add_argument("--frequency", type=float, default=1e9, help="working frequency in rad/s")
    p.set_defaults(func=cmd_rates)

    p = subparsers.add_parser("readout", parents=[common], help="tunneling readout")
    p.add_argument("--field", type=float, help="extraction field in V/cm (operating point if omitted)")
    p.add_argument("--duration", type=float, default=100.0, help="ns")
    p.set_defaults(func=cmd_readout)

    return parser


def _failing_module(error: BaseException) -> str:
    frames = traceback.extract_tb(error.__traceback__)
    return Path(frames[-1].filename).stem if frames else "eonhe"


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"eonhe: usage error: {e}\n")
        return EXIT_USAGE
    except SystemExit as e:
        return e.code or EXIT_OK

    logging.basicConfig(
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        cfg = config_module.load(args.config) if args.config else config_module.Config()
        if args.dump_config:
            sys.stdout.write(cfg.dumps())
            return EXIT_OK
        args.func(args, cfg)
    except (UsageError, FileNotFoundError) as e:
        sys.stderr.write(f"eonhe: usage error: {e}\n")
        return EXIT_USAGE
    except (ConfigError, InvalidMaterialError, GeometryError, ParameterRangeError, UnitError) as e:
        sys.stderr.write(f"eonhe: config error: {e}\n")
        return EXIT_CONFIG
    except (EonheError, ArithmeticError, ValueError) as e:
        sys.stderr.write(f"eonhe: error in {_failing_module(e)}: {e}\n")
        return EXIT_NUMERICAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())
