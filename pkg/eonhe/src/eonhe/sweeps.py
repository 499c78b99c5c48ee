"""Parameter sweeps over independent runs, collected into DataFrames."""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from eonhe.device import QubitParams
from eonhe.dynamics import lz_sweep_experiment, rabi_rate


def _pair_coupling(params: QubitParams, sites: tuple[int, int]) -> float:
    return params.subset(list(sites)).coupling[0, 1]


def _alpha(omega_sw: float, g: float) -> float:
    if g > 0:
        return (omega_sw / g) ** 2
    return omega_sw**2 if omega_sw > 0 else 1.0


def lz_sweep(
    params: QubitParams,
    g_values: Sequence[float],
    samples: int = 201,
    span: Optional[float] = None,
    sites: tuple[int, int] = (0, 1),
    num_workers: int = 4,
    **evolve_kwargs,
) -> pd.DataFrame:
    """
    Population transferred to the second site against the dimensionless time
    sqrt(alpha) t, crossing at 0, for each g on one common axis running over
    [-span, span]. The `alpha_t` column holds sqrt(alpha) t; repeated g values
    are run once.
    """
    g_values = list(dict.fromkeys(float(g) for g in g_values))
    if span is None:
        span = 20 * max(max(g_values, default=1.0), 1.0)
    axis = np.linspace(-span, span, samples)
    omega_sw = _pair_coupling(params, sites)

    def run(g: float) -> np.ndarray:
        half_span = span / np.sqrt(_alpha(omega_sw, g))
        _, trajectory = lz_sweep_experiment(
            params,
            g,
            half_span=half_span,
            sampling=np.linspace(0, 2 * half_span, samples),
            sites=sites,
            **evolve_kwargs,
        )
        return trajectory.populations()[:, 1]

    results = {}
    with ThreadPoolExecutor(max_workers=num_workers) as executor:
        futures = {executor.submit(run, g): g for g in g_values}
        for future in tqdm(as_completed(futures), total=len(futures), desc="Sweeping g"):
            results[futures[future]] = future.result()

    frame = {"alpha_t": axis}
    for g in g_values:
        frame[f"p2_g{g}"] = results[g]
    return pd.DataFrame(frame)


def lz_survival(
    params: QubitParams,
    g_values: Sequence[float],
    sites: tuple[int, int] = (0, 1),
    num_workers: int = 4,
    **kwargs,
) -> pd.DataFrame:
    """Final survival on the first site for each g next to exp(-pi g^2)."""
    g_values = list(dict.fromkeys(float(g) for g in g_values))
    results = {}
    with ThreadPoolExecutor(max_workers=num_workers) as executor:
        futures = {
            executor.submit(lz_sweep_experiment, params, g, sites=sites, sampling=2, **kwargs): g
            for g in g_values
        }
        for future in tqdm(as_completed(futures), total=len(futures), desc="Sweeping g"):
            results[futures[future]] = future.result()[0]
    return pd.DataFrame(
        {
            "g": g_values,
            "survival": [results[g] for g in g_values],
            "landau_zener": np.exp(-np.pi * np.square(g_values)),
        }
    )


def lz_exponent_fit(g_values: Sequence[float], survival: Sequence[float]) -> tuple[float, float]:
    """Fit survival = A exp(-c g^2); returns (c, log A)."""
    slope, intercept = np.polyfit(np.square(g_values), np.log(survival), 1)
    return -slope, intercept


def rabi_rate_sweep(
    params: QubitParams, site: int, fields: Sequence[float]
) -> pd.DataFrame:
    """Rabi rate and period over drive amplitudes in V/cm."""
    rates = np.array([rabi_rate(params, site, field) for field in fields])
    return pd.DataFrame(
        {
            "e_rf": np.asarray(fields, dtype=float),
            "rabi_rate_rad_per_ns": rates,
            "rabi_rate_per_s": rates * 1e9,
            "period_ns": 2 * np.pi / rates,
        }
    )
