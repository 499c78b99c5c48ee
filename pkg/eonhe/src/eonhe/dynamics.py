"""
Register dynamics in the rotating frame.

H(t)/hbar = sum_n Delta_n(t)/2 Z_n
          + sum_n Omega_R(t)/2 (cos phi X_n + sin phi Y_n)
          + sum_{n<m} EXCHANGE_SCALE Omega_sw(n, m)/2 (s+_n s-_m + s-_n s+_m)

|0> is the lower vertical level, Z|0> = |0>. Basis index = sum_n b_n 2^n, so
site 0 is the least significant bit. Times in ns, rates in rad/ns.
"""

import logging
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.linalg import eigh, sqrtm

from eonhe.device import QubitParams
from eonhe.errors import (
    IndexRangeError,
    RateConsistencyError,
    SchedulingError,
    SpanError,
    StiffnessError,
)
from eonhe.units import dipole_energy_ghz, ghz_to_rad_per_ns

logger = logging.getLogger(__name__)

# With this factor the off-diagonal element between |01> and |10> is Omega_sw,
# the relative diagonal drift of an opposite sweep is 2 alpha, and the
# Landau-Zener survival is exp(-2 pi Omega_sw^2 / (2 alpha)) = exp(-pi g^2).
EXCHANGE_SCALE = 2.0

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-11
MAX_PURE_SITES = 10
MAX_DENSITY_SITES = 6
DRIFT_TOLERANCE = 1e-7

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
RAISING = np.array([[0, 0], [1, 0]], dtype=complex)
LOWERING = np.array([[0, 1], [0, 0]], dtype=complex)


class Envelope(ABC):
    """Normalized pulse shape on [start, stop]."""

    name: str
    area_factor: float

    @abstractmethod
    def __call__(self, t: float, start: float, stop: float) -> float:
        pass


@dataclass(frozen=True)
class Rectangular(Envelope):
    name = "rectangular"
    area_factor = 1.0

    def __call__(self, t: float, start: float, stop: float) -> float:
        return 1.0


@dataclass(frozen=True)
class RaisedCosine(Envelope):
    name = "raised_cosine"
    area_factor = 0.5

    def __call__(self, t: float, start: float, stop: float) -> float:
        return 0.5 * (1 - np.cos(2 * np.pi * (t - start) / (stop - start)))


def envelope_from_config(config: str) -> Envelope:
    """Parse envelope name and return matching shape."""
    name = config.lower().replace("-", "_")
    for envelope in [Rectangular, RaisedCosine]:
        if name == envelope.name:
            return envelope()
    else:
        raise NotImplementedError(f"No matching envelope for {config}.")


@dataclass(frozen=True, eq=False)
class Channel:
    """
    Piecewise-linear detuning in rad/ns. A repeated time marks a jump; the
    end values are held outside the breakpoints.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float).reshape(-1)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if len(times) != len(values):
            raise SchedulingError("Channel needs one value per breakpoint.")
        if np.any(np.diff(times) < 0):
            raise SchedulingError("Channel breakpoints must be sorted.")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise SchedulingError("Channel breakpoints must be finite.")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value: float, duration: float) -> "Channel":
        return cls(np.array([0.0, duration]), np.array([value, value]))

    def __call__(self, t: float) -> float:
        """Value at t, right limit at jumps."""
        if len(self.times) == 0:
            return 0.0
        if t < self.times[0]:
            return self.values[0]
        if t >= self.times[-1]:
            return self.values[-1]
        i = np.searchsorted(self.times, t, side="right") - 1
        slope = (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
        return self.values[i] + slope * (t - self.times[i])

    def segment(self, start: float, stop: float) -> tuple[float, float]:
        """
        (value at start, slope) on an interval without interior breakpoints.
        Jumps at `start` take the right limit, jumps at `stop` the left.
        """
        if len(self.times) == 0:
            return 0.0, 0.0
        if stop <= self.times[0]:
            return self.values[0], 0.0
        if start >= self.times[-1]:
            return self.values[-1], 0.0
        i = np.searchsorted(self.times, start, side="right") - 1
        slope = (self.values[i + 1] - self.values[i]) / (self.times[i + 1] - self.times[i])
        return self.values[i] + slope * (start - self.times[i]), slope


@dataclass(frozen=True)
class MicrowavePulse:
    """
    Drive with peak Rabi rate (rad/ns), phase, and carrier detuning from the
    rotating frame (rad/ns). `sites=None` addresses every site.
    """

    start: float
    stop: float
    rabi_rate: float
    phase: float = 0.0
    detuning: float = 0.0
    sites: Optional[tuple[int, ...]] = None
    envelope: Envelope = field(default_factory=Rectangular)

    def __post_init__(self) -> None:
        if not np.all(np.isfinite([self.start, self.stop, self.rabi_rate, self.phase, self.detuning])):
            raise SchedulingError("Pulse parameters must be finite.")
        if self.stop <= self.start:
            raise SchedulingError(f"Pulse stops at {self.stop} ns before it starts at {self.start} ns.")
        object.__setattr__(self, "phase", float(np.mod(self.phase, 2 * np.pi)))
        if self.sites is not None:
            object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))

    def targets(self, n_sites: int) -> tuple[int, ...]:
        return tuple(range(n_sites)) if self.sites is None else self.sites

    def amplitude(self, t: float) -> float:
        return self.rabi_rate * self.envelope(t, self.start, self.stop)

    def phase_at(self, t: float) -> float:
        return self.phase + self.detuning * (t - self.start)


@dataclass(frozen=True, eq=False)
class ControlSchedule:
    n_sites: int
    duration: float
    detuning: dict[int, Channel] = field(default_factory=dict)
    pulses: tuple[MicrowavePulse, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if self.duration < 0 or not np.isfinite(self.duration):
            raise SchedulingError("Schedule duration must be finite and non-negative.")
        for site, channel in self.detuning.items():
            self._check_site(site)
            if len(channel.times) and (
                channel.times[0] < 0 or channel.times[-1] > self.duration
            ):
                raise SchedulingError(
                    f"Detuning channel of site {site} leaves [0, {self.duration}] ns."
                )
        for pulse in self.pulses:
            if pulse.start < 0 or pulse.stop > self.duration:
                raise SchedulingError(
                    f"Pulse [{pulse.start}, {pulse.stop}] ns leaves [0, {self.duration}] ns."
                )
            for site in pulse.targets(self.n_sites):
                self._check_site(site)
        for site in range(self.n_sites):
            spans = sorted(
                (p.start, p.stop) for p in self.pulses if site in p.targets(self.n_sites)
            )
            for (_, stop), (start, _) in zip(spans, spans[1:]):
                if start < stop:
                    raise SchedulingError(
                        f"Overlapping pulses on site {site} at {start} ns."
                    )

    def _check_site(self, site: int) -> None:
        if not 0 <= site < self.n_sites:
            raise IndexRangeError(f"Site {site} out of range for {self.n_sites} sites.")

    @classmethod
    def empty(cls, n_sites: int) -> "ControlSchedule":
        return cls(n_sites=n_sites, duration=0.0)

    def detuning_at(self, site: int, t: float) -> float:
        self._check_site(site)
        channel = self.detuning.get(site)
        return 0.0 if channel is None else channel(t)

    def breakpoints(self) -> np.ndarray:
        points = [0.0, self.duration]
        for channel in self.detuning.values():
            points.extend(channel.times)
        for pulse in self.pulses:
            points.extend([pulse.start, pulse.stop])
        return np.unique(points)

    def to_frame(self) -> pd.DataFrame:
        """Breakpoint table of all channels."""
        rows = []
        for site in sorted(self.detuning):
            channel = self.detuning[site]
            for t, value in zip(channel.times, channel.values):
                rows.append(
                    {"channel": f"detuning_{site}", "target": str(site), "t_ns": t, "value": value}
                )
        for k, pulse in enumerate(self.pulses):
            target = "all" if pulse.sites is None else ";".join(map(str, pulse.sites))
            for t in (pulse.start, pulse.stop):
                rows.append(
                    {
                        "channel": f"mw_{k}",
                        "target": target,
                        "t_ns": t,
                        "value": pulse.rabi_rate,
                        "phase": pulse.phase,
                        "carrier": pulse.detuning,
                        "envelope": pulse.envelope.name,
                    }
                )
        columns = ["channel", "target", "t_ns", "value", "phase", "carrier", "envelope"]
        return pd.DataFrame(rows, columns=columns)


@dataclass(frozen=True, eq=False)
class RegisterState:
    """Amplitude vector (2^N) or density matrix (2^N x 2^N)."""

    data: np.ndarray
    n_sites: int

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=complex)
        dimension = 2**self.n_sites
        if data.shape not in ((dimension,), (dimension, dimension)):
            raise ValueError(
                f"State of shape {data.shape} does not describe {self.n_sites} sites."
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def basis(cls, n_sites: int, index: int) -> "RegisterState":
        if not 0 <= index < 2**n_sites:
            raise IndexRangeError(f"Basis index {index} out of range.")
        data = np.zeros(2**n_sites, dtype=complex)
        data[index] = 1.0
        return cls(data, n_sites)

    @classmethod
    def ground(cls, n_sites: int) -> "RegisterState":
        return cls.basis(n_sites, 0)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "RegisterState":
        """bits[n] is the logical value of site n."""
        return cls.basis(len(bits), int(sum(int(b) << n for n, b in enumerate(bits))))

    @property
    def is_density(self) -> bool:
        return self.data.ndim == 2

    def to_density(self) -> "RegisterState":
        if self.is_density:
            return self
        return RegisterState(np.outer(self.data, self.data.conj()), self.n_sites)

    def probabilities(self) -> np.ndarray:
        if self.is_density:
            return np.real(np.diag(self.data))
        return np.abs(self.data) ** 2

    def excited_population(self, site: int) -> float:
        if not 0 <= site < self.n_sites:
            raise IndexRangeError(f"Site {site} out of range.")
        excited = (np.arange(2**self.n_sites) >> site) & 1
        return float(np.sum(self.probabilities()[excited == 1]))

    def populations(self) -> np.ndarray:
        return np.array([self.excited_population(n) for n in range(self.n_sites)])

    def expectation(self, operator) -> complex:
        if self.is_density:
            return complex(np.trace(operator @ self.data))
        return complex(np.vdot(self.data, operator @ self.data))

    def coherence(self, site_a: int, site_b: int) -> float:
        """|<s+_a s-_b>|, the excitation-exchange coherence of two sites."""
        operator = site_operator(RAISING, site_a, self.n_sites) @ site_operator(
            LOWERING, site_b, self.n_sites
        )
        return abs(self.expectation(operator))

    def norm_error(self) -> float:
        if self.is_density:
            return abs(np.real(np.trace(self.data)) - 1)
        return abs(np.linalg.norm(self.data) - 1)

    def is_physical(self, atol: float = 1e-8) -> bool:
        if not self.is_density:
            return self.norm_error() < atol
        hermitian = np.max(np.abs(self.data - self.data.conj().T), initial=0) < 1e-10
        positive = np.min(np.linalg.eigvalsh(self.data)) > -1e-10
        return hermitian and positive and self.norm_error() < atol

    def fidelity(self, other: "RegisterState") -> float:
        if self.n_sites != other.n_sites:
            raise ValueError("States belong to registers of different size.")
        if not self.is_density and not other.is_density:
            return float(abs(np.vdot(self.data, other.data)) ** 2)
        if not self.is_density:
            return float(np.real(self.expectation(other.data)))
        if not other.is_density:
            return float(np.real(other.expectation(self.data)))
        root = sqrtm(self.data)
        return float(np.real(np.trace(sqrtm(root @ other.data @ root))) ** 2)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: tuple[RegisterState, ...]

    @property
    def n_sites(self) -> int:
        return self.states[0].n_sites

    @property
    def final(self) -> RegisterState:
        return self.states[-1]

    def populations(self) -> np.ndarray:
        """Excited population per sample (rows) and site (columns)."""
        return np.array([state.populations() for state in self.states])

    def to_frame(self, coherences: bool = False) -> pd.DataFrame:
        frame = {"t": self.times}
        populations = self.populations()
        for n in range(self.n_sites):
            frame[f"p_excited_{n}"] = populations[:, n]
        if coherences:
            for a in range(self.n_sites):
                for b in range(a + 1, self.n_sites):
                    frame[f"coherence_{a}_{b}"] = [s.coherence(a, b) for s in self.states]
        return pd.DataFrame(frame)


@dataclass(frozen=True, eq=False)
class DecoherenceRates:
    """Per-site T1^-1 and T2^-1 in s^-1."""

    t1_inv: Union[np.ndarray, float]
    t2_inv: Union[np.ndarray, float]

    def __post_init__(self) -> None:
        t1_inv = np.atleast_1d(np.asarray(self.t1_inv, dtype=float))
        t2_inv = np.atleast_1d(np.asarray(self.t2_inv, dtype=float))
        if np.any(t1_inv < 0) or np.any(t2_inv < 0):
            raise RateConsistencyError("Decoherence rates must be non-negative.")
        if np.any(t2_inv < t1_inv / 2 - 1e-12 * np.maximum(t1_inv, 1)):
            raise RateConsistencyError(
                "T2 may not exceed 2 T1: need 1/T2 >= 1/(2 T1) on every site."
            )
        object.__setattr__(self, "t1_inv", t1_inv)
        object.__setattr__(self, "t2_inv", t2_inv)

    @classmethod
    def from_budget(cls, budget) -> "DecoherenceRates":
        return cls(budget.t1_inv, max(budget.t2_inv, budget.t1_inv / 2))

    def for_sites(self, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
        """(T1^-1, pure dephasing rate) per site, in ns^-1."""
        t1_inv = np.broadcast_to(self.t1_inv, (n_sites,)) * 1e-9
        t2_inv = np.broadcast_to(self.t2_inv, (n_sites,)) * 1e-9
        return t1_inv, np.clip(t2_inv - t1_inv / 2, 0, None)


def site_operator(operator: np.ndarray, site: int, n_sites: int) -> sparse.csr_matrix:
    """Embed a one-site operator; the highest site is the leftmost factor."""
    return sparse.kron(
        sparse.kron(sparse.identity(2 ** (n_sites - 1 - site)), operator),
        sparse.identity(2**site),
        format="csr",
    )


@dataclass(frozen=True, eq=False)
class _Operators:
    z_diagonals: np.ndarray
    x: tuple
    y: tuple
    lowering: tuple
    exchange: dict


@lru_cache(maxsize=16)
def _operators(n_sites: int) -> _Operators:
    index = np.arange(2**n_sites)
    z_diagonals = np.array(
        [1 - 2 * ((index >> n) & 1) for n in range(n_sites)], dtype=float
    ).reshape(n_sites, 2**n_sites)
    raising = [site_operator(RAISING, n, n_sites) for n in range(n_sites)]
    lowering = [site_operator(LOWERING, n, n_sites) for n in range(n_sites)]
    exchange = {
        (n, m): (raising[n] @ lowering[m] + lowering[n] @ raising[m]).tocsr()
        for n in range(n_sites)
        for m in range(n + 1, n_sites)
    }
    return _Operators(
        z_diagonals=z_diagonals,
        x=tuple(site_operator(PAULI_X, n, n_sites) for n in range(n_sites)),
        y=tuple(site_operator(PAULI_Y, n, n_sites) for n in range(n_sites)),
        lowering=tuple(lowering),
        exchange=exchange,
    )


def _exchange_term(ops: _Operators, params: QubitParams) -> sparse.csr_matrix:
    dimension = ops.z_diagonals.shape[1]
    term = sparse.csr_matrix((dimension, dimension), dtype=complex)
    for (n, m), operator in ops.exchange.items():
        if params.coupling[n, m] != 0:
            term = term + EXCHANGE_SCALE * params.coupling[n, m] / 2 * operator
    return term


def _assemble(
    ops: _Operators,
    static: sparse.csr_matrix,
    detunings: np.ndarray,
    drives: list[tuple[int, float, float]],
) -> sparse.csr_matrix:
    """Static exchange plus detuning diagonal plus (site, amplitude, phase) drives."""
    diagonal = detunings @ ops.z_diagonals / 2 if len(detunings) else 0
    hamiltonian = static + sparse.diags(diagonal * np.ones(static.shape[0]), format="csr")
    for site, amplitude, phase in drives:
        hamiltonian = hamiltonian + amplitude / 2 * (
            np.cos(phase) * ops.x[site] + np.sin(phase) * ops.y[site]
        )
    return hamiltonian


def _check_register(params: QubitParams, schedule: ControlSchedule) -> None:
    if params.n_sites != schedule.n_sites:
        raise ValueError(
            f"Parameters for {params.n_sites} sites, schedule for {schedule.n_sites}."
        )
    if schedule.n_sites > MAX_PURE_SITES:
        raise IndexRangeError(f"At most {MAX_PURE_SITES} sites are supported.")


def build_hamiltonian(
    params: QubitParams, schedule: ControlSchedule, t: float
) -> np.ndarray:
    """H(t)/hbar in rad/ns as a dense Hermitian matrix."""
    _check_register(params, schedule)
    if not 0 <= t <= schedule.duration:
        raise IndexRangeError(f"t = {t} ns outside [0, {schedule.duration}] ns.")
    ops = _operators(schedule.n_sites)
    detunings = np.array([schedule.detuning_at(n, t) for n in range(schedule.n_sites)])
    drives = [
        (site, pulse.amplitude(t), pulse.phase_at(t))
        for pulse in schedule.pulses
        if pulse.start <= t < pulse.stop
        for site in pulse.targets(schedule.n_sites)
    ]
    return _assemble(ops, _exchange_term(ops, params), detunings, drives).toarray()


def _interval_hamiltonian(ops, static, schedule: ControlSchedule, start: float, stop: float):
    """H(t) on [start, stop], an interval free of breakpoints."""
    segments = np.array(
        [
            schedule.detuning[n].segment(start, stop) if n in schedule.detuning else (0.0, 0.0)
            for n in range(schedule.n_sites)
        ]
    ).reshape(-1, 2)
    active = [p for p in schedule.pulses if p.start <= start and stop <= p.stop]

    def hamiltonian(t: float) -> sparse.csr_matrix:
        detunings = segments[:, 0] + segments[:, 1] * (t - start)
        drives = [
            (site, pulse.amplitude(t), pulse.phase_at(t))
            for pulse in active
            for site in pulse.targets(schedule.n_sites)
        ]
        return _assemble(ops, static, detunings, drives)

    return hamiltonian


def _sample_times(duration: float, sampling) -> np.ndarray:
    if sampling is None:
        sampling = 201
    if np.isscalar(sampling):
        if duration == 0:
            return np.zeros(1)
        return np.linspace(0, duration, int(sampling))
    times = np.asarray(sampling, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("Sample times must be a non-empty 1D sequence.")
    if np.any(np.diff(times) <= 0):
        raise ValueError("Sample times must be strictly increasing.")
    if times[0] < 0 or times[-1] > duration:
        raise IndexRangeError(f"Sample times must lie in [0, {duration}] ns.")
    return times


def _jump_operators(ops: _Operators, rates: DecoherenceRates, n_sites: int) -> np.ndarray:
    relaxation, dephasing = rates.for_sites(n_sites)
    jumps = []
    for n in range(n_sites):
        if relaxation[n] > 0:
            jumps.append(np.sqrt(relaxation[n]) * ops.lowering[n].toarray())
        if dephasing[n] > 0:
            jumps.append(np.sqrt(dephasing[n] / 2) * np.diag(ops.z_diagonals[n]).astype(complex))
    dimension = 2**n_sites
    return np.array(jumps).reshape(-1, dimension, dimension)


def evolve(
    params: QubitParams,
    schedule: ControlSchedule,
    initial: RegisterState,
    decoherence: Optional[DecoherenceRates] = None,
    sampling: Union[int, Sequence[float], None] = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_pure_sites: int = MAX_PURE_SITES,
    max_density_sites: int = MAX_DENSITY_SITES,
) -> Trajectory:
    """
    Integrate the Schroedinger equation, or the Lindblad equation when rates
    are given or the initial state is a density matrix. Integration restarts
    at every channel breakpoint.
    """
    _check_register(params, schedule)
    n_sites = schedule.n_sites
    if initial.n_sites != n_sites:
        raise ValueError("Initial state and schedule differ in site count.")
    density = decoherence is not None or initial.is_density
    limit = max_density_sites if density else max_pure_sites
    if n_sites > limit:
        raise IndexRangeError(
            f"{n_sites} sites exceed the {'density-matrix' if density else 'pure-state'} limit of {limit}."
        )

    times = _sample_times(schedule.duration, sampling)
    ops = _operators(n_sites)
    static = _exchange_term(ops, params)
    state = initial.to_density() if density else initial
    dimension = 2**n_sites

    if density:
        jumps = (
            _jump_operators(ops, decoherence, n_sites)
            if decoherence is not None
            else np.zeros((0, dimension, dimension))
        )
        jumps_dagger = jumps.conj().transpose(0, 2, 1)
        jumps_squared = np.sum(jumps_dagger @ jumps, axis=0)

    samples = np.empty((len(times), state.data.size), dtype=complex)
    samples[times == 0] = state.data.ravel()
    y = state.data.ravel()

    breakpoints = schedule.breakpoints()
    for start, stop in zip(breakpoints[:-1], breakpoints[1:]):
        mask = (times > start) & (times <= stop)
        t_eval = np.union1d(times[mask], [stop])
        hamiltonian = _interval_hamiltonian(ops, static, schedule, start, stop)

        if density:

            def rhs(t, y, hamiltonian=hamiltonian):
                rho = y.reshape(dimension, dimension)
                h = hamiltonian(t).toarray()
                rho_dot = -1j * (h @ rho - rho @ h)
                if len(jumps):
                    rho_dot += np.sum(jumps @ rho @ jumps_dagger, axis=0) - 0.5 * (
                        jumps_squared @ rho + rho @ jumps_squared
                    )
                return rho_dot.ravel()

        else:

            def rhs(t, y, hamiltonian=hamiltonian):
                return -1j * (hamiltonian(t) @ y)

        solution = solve_ivp(
            rhs, (start, stop), y, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol
        )
        if solution.status == -1:
            raise StiffnessError(
                f"Integration failed on [{start:.6g}, {stop:.6g}] ns: {solution.message}"
            )
        positions = np.searchsorted(t_eval, times[mask])
        samples[mask] = solution.y[:, positions].T
        y = solution.y[:, -1]

    shape = (dimension, dimension) if density else (dimension,)
    states = tuple(RegisterState(sample.reshape(shape), n_sites) for sample in samples)
    drift = max(state.norm_error() for state in states)
    logger.debug(f"Evolved {n_sites} sites over {schedule.duration} ns, drift {drift:.2e}")
    if drift > DRIFT_TOLERANCE:
        warnings.warn(f"Norm drift {drift:.2e} exceeds {DRIFT_TOLERANCE:.0e}, tighten rtol/atol.")
    return Trajectory(times=times, states=states)


def rabi_rate(params: QubitParams, site: int, e_rf: float = 1.0) -> float:
    """Omega_R = |e E_RF <1|z|2>| / hbar in rad/ns for a drive field in V/cm."""
    params.check_site(site)
    return ghz_to_rad_per_ns(dipole_energy_ghz(e_rf, abs(params.z12[site])))


def rabi_experiment(
    params: QubitParams,
    site: int,
    e_rf: float = 1.0,
    duration: Optional[float] = None,
    detuning: float = 0.0,
    sampling: Union[int, Sequence[float], None] = None,
    **evolve_kwargs,
) -> tuple[float, Trajectory]:
    """Drive one site from its ground state; the default duration is one Rabi period."""
    omega = rabi_rate(params, site, e_rf)
    if duration is None:
        duration = 2 * np.pi / omega
    schedule = ControlSchedule(
        n_sites=1,
        duration=duration,
        detuning={0: Channel.constant(detuning, duration)},
        pulses=(MicrowavePulse(0.0, duration, omega),),
    )
    trajectory = evolve(
        params.subset([site]), schedule, RegisterState.ground(1), sampling=sampling, **evolve_kwargs
    )
    return omega, trajectory


def _dressed_first_excited(params: QubitParams, schedule: ControlSchedule, t: float) -> np.ndarray:
    """Single-excitation eigenvector of a pair that is closest to |site 0 excited>."""
    block = build_hamiltonian(params, schedule, t)[np.ix_([1, 2], [1, 2])]
    _, vectors = eigh(block)
    k = np.argmax(np.abs(vectors[0]))
    state = np.zeros(4, dtype=complex)
    state[[1, 2]] = vectors[:, k]
    return state


def lz_sweep_experiment(
    params: QubitParams,
    g: float,
    half_span: Optional[float] = None,
    sampling: Union[int, Sequence[float], None] = None,
    sites: tuple[int, int] = (0, 1),
    tail_factor: float = 20.0,
    **evolve_kwargs,
) -> tuple[float, Trajectory]:
    """
    Sweep two sites through resonance, Delta_0 = -alpha t and Delta_1 = +alpha t
    with the crossing at the middle of the run and alpha = (Omega_sw / g)^2.
    Starts in the dressed state correlated with site 0 excited and returns the
    probability of ending in the dressed state with the same character.
    """
    if g < 0:
        raise ValueError("g must be non-negative.")
    pair = params.subset(list(sites))
    omega_sw = pair.coupling[0, 1]
    if g > 0:
        if omega_sw <= 0:
            raise ValueError(f"Sites {sites} are not coupled.")
        alpha = (omega_sw / g) ** 2
        coupling = omega_sw
    else:
        alpha = omega_sw**2 if omega_sw > 0 else 1.0
        coupling = 0.0

    required = tail_factor * max(coupling, np.sqrt(alpha)) / alpha
    if half_span is None:
        half_span = required
    elif half_span < required * (1 - 1e-9):
        raise SpanError(
            f"Half span {half_span:.4g} ns is below {required:.4g} ns needed for adiabatic tails."
        )

    duration = 2 * half_span
    sweep = alpha * half_span
    schedule = ControlSchedule(
        n_sites=2,
        duration=duration,
        detuning={
            0: Channel([0.0, duration], [sweep, -sweep]),
            1: Channel([0.0, duration], [-sweep, sweep]),
        },
    )
    pair = pair.with_coupling(np.array([[0.0, coupling], [coupling, 0.0]]))

    initial = RegisterState(_dressed_first_excited(pair, schedule, 0.0), 2)
    trajectory = evolve(pair, schedule, initial, sampling=sampling, **evolve_kwargs)
    final = _dressed_first_excited(pair, schedule, duration)
    survival = float(abs(np.vdot(final, trajectory.final.data)) ** 2)
    logger.debug(f"LZ sweep g={g}: alpha={alpha:.4g} rad/ns^2, survival={survival:.6g}")
    return survival, trajectory
