"""
Excitation transfer between two coupled qubits swept through resonance:
population kinetics against sqrt(alpha) t for several g, and the final
survival against g with its fitted exponent.
"""

import argparse
from pathlib import Path

import numpy as np
import pandas as pd
from eonhe.config import Config, load
from eonhe.device import qubit_params
from eonhe.misc import safe_mkdir, write_config, write_frame
from eonhe.sweeps import lz_exponent_fit, lz_survival, lz_sweep


def main(args):
    output_dir = Path("output/02") / args.experiment_id
    safe_mkdir(output_dir)
    write_config(vars(args), output_dir)

    config = load(args.config) if args.config is not None else Config()
    params = qubit_params(config.device_spec())

    kinetics = lz_sweep(
        params,
        args.g,
        samples=args.samples,
        span=args.span,
        num_workers=args.num_workers,
        **config.simulation(),
    )
    write_frame(kinetics, output_dir / "kinetics.csv")

    survival = lz_survival(
        params,
        np.linspace(args.fit_min, args.fit_max, args.fit_points),
        num_workers=args.num_workers,
        tail_factor=args.tail_factor,
        **config.simulation(),
    )
    write_frame(survival, output_dir / "survival.csv")

    exponent, log_amplitude = lz_exponent_fit(survival.g, survival.survival)
    write_frame(
        pd.DataFrame(
            {
                "exponent": [exponent],
                "exponent_over_pi": [exponent / np.pi],
                "log_amplitude": [log_amplitude],
            }
        ),
        output_dir / "fit.csv",
    )
    print(f"Fitted exponent {exponent:.5f} ({exponent / np.pi:.4f} pi)")
    print("Done!")


def parse_args():
    parser = argparse.ArgumentParser()
    parser.add_argument("--experiment-id", default="default")
    parser.add_argument("--config", type=Path)

    # kinetics
    parser.add_argument("--g", type=float, nargs="+", default=[0.2, 0.45, 1.0])
    parser.add_argument("--samples", type=int, default=401)
    parser.add_argument("--span", type=float)

    # survival fit
    parser.add_argument("--fit-min", type=float, default=0.3)
    parser.add_argument("--fit-max", type=float, default=1.5)
    parser.add_argument("--fit-points", type=int, default=9)
    parser.add_argument("--tail-factor", type=float, default=40.0)

    # technical
    parser.add_argument("--num-workers", type=int, default=4)

    return parser.parse_args()


if __name__ == "__main__":
    main(parse_args())
