"""
Gate circuits, their compilation into control schedules, and schedule
validation against hardware limits and the dephasing budget.

Gates are compiled strictly one after another. Sites not addressed by a gate
are parked at detunings k * Delta_park, with Delta_park * T a multiple of 2 pi
so parking leaves no net phase.
"""

import ast
import logging
import operator
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from eonhe.decoherence import RateBudget
from eonhe.device import QubitParams
from eonhe.dynamics import (
    EXCHANGE_SCALE,
    PAULI_X,
    PAULI_Y,
    Channel,
    ControlSchedule,
    MicrowavePulse,
    envelope_from_config,
    rabi_rate,
    site_operator,
)
from eonhe.errors import (
    ConfigError,
    DetuningRangeError,
    IndexRangeError,
    SchedulingError,
)

logger = logging.getLogger(__name__)

# name -> (number of sites, takes a parameter)
GATES = {
    "RX": (1, True),
    "RY": (1, True),
    "RZ": (1, True),
    "ISWAP": (2, False),
    "SWEEP_SWAP": (2, True),
    "CNOT": (2, False),
}


@dataclass(frozen=True)
class Gate:
    """Rotation angles in rad; the SWEEP_SWAP parameter is g."""

    name: str
    sites: tuple[int, ...]
    parameter: Optional[float] = None

    def __post_init__(self) -> None:
        name = self.name.upper()
        if name not in GATES:
            raise ValueError(f"Unknown gate {self.name}.")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        arity, parametrized = GATES[name]
        if len(self.sites) != arity or len(set(self.sites)) != arity:
            raise ValueError(f"{name} needs {arity} distinct sites, got {self.sites}.")
        if parametrized:
            if self.parameter is None or not np.isfinite(self.parameter):
                raise ValueError(f"{name} needs a finite parameter.")
            if name == "SWEEP_SWAP" and self.parameter <= 0:
                raise ValueError("SWEEP_SWAP needs g > 0.")
        elif self.parameter is not None:
            raise ValueError(f"{name} takes no parameter.")

    def __str__(self) -> str:
        parts = [self.name]
        if self.name in ("RX", "RY", "RZ"):
            parts.append(f"{self.parameter:.17g}")
        parts.extend(map(str, self.sites))
        if self.name == "SWEEP_SWAP":
            parts.append(f"{self.parameter:.17g}")
        return " ".join(parts)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            for site in gate.sites:
                if not 0 <= site < self.n_qubits:
                    raise IndexRangeError(
                        f"{gate} addresses site {site} of a {self.n_qubits}-qubit circuit."
                    )


_OPERATORS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_angle(text: str) -> float:
    """Evaluate arithmetic on numbers and `pi`, e.g. '-3*pi/4'."""

    def evaluate(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return evaluate(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return np.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPERATORS:
            return _OPERATORS[type(node.op)](evaluate(node.left), evaluate(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPERATORS:
            return _OPERATORS[type(node.op)](evaluate(node.operand))
        raise ValueError(f"Unsupported expression '{text}'.")

    return evaluate(ast.parse(text.strip(), mode="eval"))


def parse_circuit(
    text: str, n_qubits: Optional[int] = None, path: Optional[Path] = None
) -> Circuit:
    """
    One gate per line: `RX theta site`, `RY theta site`, `RZ theta site`,
    `ISWAP a b`, `SWEEP_SWAP a b g`, `CNOT c t`. `#` starts a comment.
    Without `n_qubits` the register is sized by the highest site used.
    """
    gates = []
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        name = tokens[0].upper()
        try:
            if name not in GATES:
                raise ValueError(f"Unknown gate '{tokens[0]}'.")
            arity, parametrized = GATES[name]
            expected = 1 + arity + parametrized
            if len(tokens) != expected:
                raise ValueError(f"{name} takes {expected - 1} arguments.")
            if name in ("RX", "RY", "RZ"):
                gate = Gate(name, (int(tokens[2]),), parse_angle(tokens[1]))
            elif name == "SWEEP_SWAP":
                gate = Gate(name, (int(tokens[1]), int(tokens[2])), parse_angle(tokens[3]))
            else:
                gate = Gate(name, tuple(int(t) for t in tokens[1:]))
        except (ValueError, SyntaxError, ZeroDivisionError) as e:
            raise ConfigError(str(e), path=path, line=number) from e
        gates.append(gate)

    if n_qubits is None:
        n_qubits = 1 + max((s for gate in gates for s in gate.sites), default=-1)
    try:
        return Circuit(n_qubits, tuple(gates))
    except IndexRangeError as e:
        raise ConfigError(str(e), path=path) from e


def decompose(gate: Gate) -> list[Gate]:
    """Native gates, in time order. CNOT uses two ISWAPs and is exact up to a global phase."""
    if gate.name != "CNOT":
        return [gate]
    control, target = gate.sites
    return [
        Gate("RZ", (target,), -np.pi / 2),
        Gate("RY", (target,), np.pi / 2),
        Gate("RZ", (target,), np.pi),
        Gate("ISWAP", (control, target)),
        Gate("RX", (control,), np.pi / 2),
        Gate("ISWAP", (control, target)),
        Gate("RZ", (target,), np.pi / 2),
        Gate("RZ", (control,), np.pi / 2),
    ]


@dataclass(frozen=True)
class CompileOptions:
    """Drive field (V/cm), timing (ns) and the electrode voltage bound (mV)."""

    e_rf: float = 1.0
    parking_factor: float = 100.0
    sweep_tail_factor: float = 40.0
    rz_duration: float = 2.0
    voltage_bound: float = 20.0
    envelope: str = "rectangular"


@dataclass(frozen=True)
class GateSlice:
    gate: Gate
    start: float
    stop: float
    parking: float = 0.0
    source: Optional[Gate] = None

    @property
    def duration(self) -> float:
        return self.stop - self.start


@dataclass(frozen=True)
class Violation:
    channel: str
    time: float
    message: str

    def __str__(self) -> str:
        return f"{self.channel} at {self.time:.6g} ns: {self.message}"


@dataclass
class CompilationReport:
    duration: float = 0.0
    slices: list[GateSlice] = field(default_factory=list)
    max_voltage: float = 0.0
    budget_ratio: float = 0.0
    warnings: list[str] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    def summary(self) -> dict[str, str]:
        return {
            "duration_ns": f"{self.duration:.8e}",
            "gates": str(len(self.slices)),
            "max_voltage_mv": f"{self.max_voltage:.8e}",
            "budget_ratio": f"{self.budget_ratio:.8e}",
            "warnings": str(len(self.warnings)),
            "violations": str(len(self.violations)),
        }


@dataclass(frozen=True)
class HardwareLimits:
    """
    Electrode voltage bound (mV), largest Rabi rate (rad/ns), dephasing-budget
    threshold, and per-site mV per rad/ns of detuning.
    """

    voltage_bound: float = 20.0
    max_rabi_rate: float = np.inf
    budget_threshold: float = 1e-2
    millivolt_per_detuning: Optional[np.ndarray] = None

    @classmethod
    def from_params(cls, params: QubitParams, **kwargs) -> "HardwareLimits":
        conversion = np.array(
            [params.detuning_to_millivolt(n, 1.0) for n in range(params.n_sites)]
        )
        return cls(millivolt_per_detuning=conversion, **kwargs)


@dataclass(frozen=True)
class _Plan:
    duration: float
    targets: dict[int, tuple[float, float]]
    pulses: tuple[dict, ...] = ()
    excursion: float = 0.0


def _coupling(params: QubitParams, a: int, b: int) -> float:
    omega_sw = params.coupling[a, b]
    if omega_sw <= 0:
        raise SchedulingError(f"Sites {a} and {b} are not coupled.")
    return omega_sw


def _plan(gate: Gate, params: QubitParams, options: CompileOptions, area: float) -> _Plan:
    name, theta = gate.name, gate.parameter
    if name in ("RX", "RY"):
        (site,) = gate.sites
        omega = rabi_rate(params, site, options.e_rf)
        duration = abs(theta) / (omega * area)
        phase = (0.0 if name == "RX" else np.pi / 2) + (np.pi if theta < 0 else 0.0)
        pulse = {"rabi_rate": omega, "phase": phase, "sites": (site,)}
        return _Plan(duration, {site: (0.0, 0.0)}, (pulse,) if duration > 0 else ())
    if name == "RZ":
        (site,) = gate.sites
        detuning = theta / options.rz_duration
        return _Plan(options.rz_duration, {site: (detuning, detuning)}, excursion=abs(detuning))
    if name == "ISWAP":
        a, b = gate.sites
        duration = np.pi / (EXCHANGE_SCALE * _coupling(params, a, b))
        return _Plan(duration, {a: (0.0, 0.0), b: (0.0, 0.0)})
    if name == "SWEEP_SWAP":
        a, b = gate.sites
        omega_sw = _coupling(params, a, b)
        alpha = (omega_sw / theta) ** 2
        half_span = options.sweep_tail_factor * max(omega_sw, np.sqrt(alpha)) / alpha
        sweep = alpha * half_span
        return _Plan(2 * half_span, {a: (sweep, -sweep), b: (-sweep, sweep)}, excursion=sweep)
    raise NotImplementedError(f"No native compilation for {name}.")


def _parking_detuning(plan: _Plan, params: QubitParams, options: CompileOptions) -> float:
    max_coupling = float(np.max(params.coupling, initial=0.0))
    minimum = options.parking_factor * max_coupling + plan.excursion
    cycles = np.ceil(minimum * plan.duration / (2 * np.pi))
    return 2 * np.pi * cycles / plan.duration


def compile(
    circuit: Circuit,
    params: QubitParams,
    options: CompileOptions = CompileOptions(),
    budget: Optional[RateBudget] = None,
) -> tuple[ControlSchedule, CompilationReport]:
    """Compile a circuit into a sequential control schedule."""
    if params.n_sites != circuit.n_qubits:
        raise ValueError(
            f"Circuit on {circuit.n_qubits} qubits, parameters for {params.n_sites}."
        )
    n = circuit.n_qubits
    envelope = envelope_from_config(options.envelope)
    times = {site: [] for site in range(n)}
    values = {site: [] for site in range(n)}
    pulses, slices = [], []
    max_voltage = 0.0
    t = 0.0

    for source in circuit.gates:
        for gate in decompose(source):
            plan = _plan(gate, params, options, envelope.area_factor)
            if plan.duration == 0:
                slices.append(GateSlice(gate, t, t, source=source))
                continue
            parking = _parking_detuning(plan, params, options)
            spectators = [site for site in range(n) if site not in plan.targets]
            levels = dict(plan.targets)
            for rank, site in enumerate(spectators):
                levels[site] = ((rank + 1) * parking, (rank + 1) * parking)

            stop = t + plan.duration
            for site, (first, last) in sorted(levels.items()):
                voltage = max(
                    params.detuning_to_millivolt(site, first),
                    params.detuning_to_millivolt(site, last),
                )
                if voltage > options.voltage_bound:
                    raise DetuningRangeError(
                        f"{gate} at {t:.6g} ns needs {voltage:.3f} mV on site {site}, bound is {options.voltage_bound} mV."
                    )
                max_voltage = max(max_voltage, voltage)
                times[site].extend([t, stop])
                values[site].extend([first, last])
            for pulse in plan.pulses:
                pulses.append(MicrowavePulse(t, stop, envelope=envelope, **pulse))
            slices.append(GateSlice(gate, t, stop, parking, source))
            t = stop

    schedule = ControlSchedule(
        n_sites=n,
        duration=t,
        detuning={site: Channel(times[site], values[site]) for site in range(n) if times[site]},
        pulses=tuple(pulses),
    )
    report = CompilationReport(
        duration=t,
        slices=slices,
        max_voltage=max_voltage,
        budget_ratio=0.0 if budget is None else t * 1e-9 * budget.t2_inv,
    )
    logger.info(f"Compiled {len(circuit.gates)} gates into {t:.4g} ns")
    return schedule, report


def validate(
    schedule: ControlSchedule,
    budget: RateBudget,
    limits: HardwareLimits = HardwareLimits(),
) -> CompilationReport:
    """Check a schedule against the dephasing budget and hardware limits without changing it."""
    report = CompilationReport(duration=schedule.duration)
    report.budget_ratio = schedule.duration * 1e-9 * budget.t2_inv
    if report.budget_ratio > limits.budget_threshold or np.isclose(
        report.budget_ratio, limits.budget_threshold
    ):
        report.warnings.append(
            f"Duration x T2^-1 = {report.budget_ratio:.3e} reaches the threshold {limits.budget_threshold:.1e}."
        )

    if limits.millivolt_per_detuning is not None:
        for site, channel in sorted(schedule.detuning.items()):
            for t, value in zip(channel.times, channel.values):
                voltage = abs(value) * limits.millivolt_per_detuning[site]
                report.max_voltage = max(report.max_voltage, voltage)
                if voltage > limits.voltage_bound:
                    report.violations.append(
                        Violation(
                            f"detuning_{site}",
                            t,
                            f"{voltage:.3f} mV exceeds {limits.voltage_bound} mV",
                        )
                    )
    for k, pulse in enumerate(schedule.pulses):
        if pulse.rabi_rate > limits.max_rabi_rate:
            report.violations.append(
                Violation(
                    f"mw_{k}",
                    pulse.start,
                    f"Rabi rate {pulse.rabi_rate:.3f} rad/ns exceeds {limits.max_rabi_rate} rad/ns",
                )
            )

    for finding in report.warnings + [str(v) for v in report.violations]:
        warnings.warn(finding)
    return report


def _rotation(gate: Gate) -> np.ndarray:
    half = gate.parameter / 2
    if gate.name == "RX":
        return np.cos(half) * np.eye(2) - 1j * np.sin(half) * PAULI_X
    if gate.name == "RY":
        return np.cos(half) * np.eye(2) - 1j * np.sin(half) * PAULI_Y
    return np.diag([np.exp(-1j * half), np.exp(1j * half)])


def gate_unitary(gate: Gate, n_qubits: int) -> np.ndarray:
    """
    Ideal unitary in the register basis (site 0 least significant). ISWAP is
    |01> -> -i|10>; SWEEP_SWAP is reported as SWAP since its phases depend
    on the sweep.
    """
    Circuit(n_qubits, (gate,))
    dimension = 2**n_qubits
    if gate.name in ("RX", "RY", "RZ"):
        return site_operator(_rotation(gate), gate.sites[0], n_qubits).toarray()

    a, b = gate.sites
    if gate.name == "CNOT":
        excited = site_operator(np.diag([0, 1]), a, n_qubits).toarray()
        flip = site_operator(PAULI_X, b, n_qubits).toarray()
        return np.eye(dimension) - excited + excited @ flip

    raising = [site_operator(np.array([[0, 0], [1, 0]]), s, n_qubits) for s in (a, b)]
    lowering = [op.T for op in raising]
    exchange = (raising[0] @ lowering[1] + lowering[0] @ raising[1]).toarray()
    single_excitation = exchange @ exchange
    if gate.name == "ISWAP":
        return np.eye(dimension) - single_excitation - 1j * exchange
    return np.eye(dimension) - single_excitation + exchange
