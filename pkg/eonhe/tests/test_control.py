import warnings

import numpy as np
import pandas as pd
import pytest

from eonhe.control import (
    Circuit,
    CompileOptions,
    Gate,
    HardwareLimits,
    compile,
    decompose,
    gate_unitary,
    parse_angle,
    parse_circuit,
    validate,
)
from eonhe.decoherence import RateBudget
from eonhe.dynamics import Channel, ControlSchedule, MicrowavePulse, RegisterState, evolve
from eonhe.errors import ConfigError, DetuningRangeError, IndexRangeError

IDLE_BUDGET = RateBudget(tau_intra_inv=0.0, t1_inv=0.0, t2_inv=0.0, delta_t=0.0)


def simulate(params, circuit, index, **options):
    schedule, _ = compile(circuit, params, CompileOptions(**options))
    initial = RegisterState.basis(circuit.n_qubits, index)
    return evolve(params, schedule, initial, sampling=2).final


@pytest.mark.parametrize(
    "text,value", [("pi", np.pi), ("-3*pi/4", -0.75 * np.pi), ("0.5", 0.5), ("+2*(1-pi)", 2 * (1 - np.pi))]
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_parse_angle_rejects_code():
    with pytest.raises(ValueError):
        parse_angle("__import__('os')")


def test_parse_circuit():
    circuit = parse_circuit(
        """
        # Bell-type preparation
        RX pi/2 0
        CNOT 0 1   # entangle
        SWEEP_SWAP 1 2 0.8
        rz -pi 2
        """
    )
    assert circuit.n_qubits == 3
    assert [gate.name for gate in circuit.gates] == ["RX", "CNOT", "SWEEP_SWAP", "RZ"]
    assert circuit.gates[2].parameter == pytest.approx(0.8)
    assert circuit.gates[3].sites == (2,)
    assert parse_circuit(str(circuit.gates[0])).gates[0] == circuit.gates[0]


@pytest.mark.parametrize(
    "text,line",
    [
        ("RX pi 0\nFOO 1", 2),
        ("RX pi", 1),
        ("RX pi 0\n\nISWAP 0 0", 3),
        ("SWEEP_SWAP 0 1 -1", 1),
        ("RX 1/0 0", 1),
    ],
)
def test_parse_circuit_errors(text, line):
    with pytest.raises(ConfigError) as error:
        parse_circuit(text)
    assert error.value.line == line


def test_circuit_sites_in_range():
    with pytest.raises(ConfigError):
        parse_circuit("RX pi 3", n_qubits=2)
    with pytest.raises(IndexRangeError):
        Circuit(1, (Gate("ISWAP", (0, 1)),))


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("RX", (0,))
    with pytest.raises(ValueError):
        Gate("RX", (0,), np.nan)
    with pytest.raises(ValueError):
        Gate("CNOT", (0, 1), 1.0)
    assert Gate("rx", (0,), 1.0).name == "RX"


def test_cnot_decomposition_is_exact():
    target = gate_unitary(Gate("CNOT", (0, 1)), 2)
    product = np.eye(4)
    for gate in decompose(Gate("CNOT", (0, 1))):
        product = gate_unitary(gate, 2) @ product
    assert abs(np.trace(product.conj().T @ target)) / 4 == pytest.approx(1.0, abs=1e-12)


def test_empty_circuit(make_params):
    schedule, report = compile(Circuit(2), make_params(2))
    assert schedule.duration == 0.0
    assert schedule.pulses == ()
    assert report.slices == []
    assert report.budget_ratio == 0.0


def test_rx_pi_on_one_qubit(make_params):
    final = simulate(make_params(1), parse_circuit("RX pi 0"), 0)
    assert final.excited_population(0) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize("envelope", ["rectangular", "raised_cosine"])
def test_rx_pi_with_envelopes(make_params, envelope):
    final = simulate(make_params(1), parse_circuit("RX -pi 0"), 0, envelope=envelope)
    assert final.excited_population(0) == pytest.approx(1.0, abs=1e-4)


@pytest.mark.parametrize(
    "text", ["RX pi/2 0", "RY pi/2 1", "RY -pi/3 0", "RZ pi/2 0", "RX pi 1", "ISWAP 0 1"]
)
def test_compiled_gates_match_ideal_unitaries(make_params, text):
    params = make_params(2)
    circuit = parse_circuit(text, n_qubits=2)
    ideal = gate_unitary(circuit.gates[0], 2)
    for index in range(4):
        final = simulate(params, circuit, index)
        expected = RegisterState(ideal[:, index], 2)
        assert final.fidelity(expected) > 1 - 1e-3


def test_compiled_cnot(make_params):
    params = make_params(2)
    circuit = parse_circuit("CNOT 0 1")
    ideal = gate_unitary(circuit.gates[0], 2)
    for index in range(4):
        final = simulate(params, circuit, index)
        assert final.fidelity(RegisterState(ideal[:, index], 2)) > 1 - 1e-2


def test_sweep_swap_transfers_excitation(make_params):
    params = make_params(2)
    final = simulate(params, parse_circuit("SWEEP_SWAP 0 1 2"), 1)
    assert final.excited_population(1) >= 1 - np.exp(-4 * np.pi) - 1e-3


def test_spectators_are_parked(make_params):
    params = make_params(3)
    schedule, report = compile(parse_circuit("RX pi 1"), params)
    (gate_slice,) = report.slices
    assert gate_slice.parking >= 100 * params.coupling.max()
    # parking leaves no net phase
    assert gate_slice.parking * gate_slice.duration / (2 * np.pi) == pytest.approx(
        round(gate_slice.parking * gate_slice.duration / (2 * np.pi)), abs=1e-9
    )
    assert schedule.detuning_at(0, 0.0) == pytest.approx(gate_slice.parking)
    assert schedule.detuning_at(2, 0.0) == pytest.approx(2 * gate_slice.parking)
    assert schedule.detuning_at(1, 0.0) == 0.0


def test_report_is_sequential(make_params):
    params = make_params(2)
    circuit = parse_circuit("RX pi/2 0\nCNOT 0 1\nRZ pi 1\nSWEEP_SWAP 0 1 1.5")
    schedule, report = compile(circuit, params, budget=RateBudget(0.0, 0.0, 46.6, 2e-9))
    assert report.duration == schedule.duration
    assert sum(s.duration for s in report.slices) == pytest.approx(report.duration)
    for earlier, later in zip(report.slices, report.slices[1:]):
        assert later.start == earlier.stop
    assert report.budget_ratio == pytest.approx(schedule.duration * 1e-9 * 46.6)
    assert 0 < report.max_voltage < 20


def test_compilation_is_deterministic(make_params):
    params = make_params(2)
    circuit = parse_circuit("CNOT 1 0\nSWEEP_SWAP 0 1 0.7")
    first, _ = compile(circuit, params)
    second, _ = compile(circuit, params)
    pd.testing.assert_frame_equal(first.to_frame(), second.to_frame())


def test_unreachable_detuning(make_params):
    with pytest.raises(DetuningRangeError):
        compile(parse_circuit("RX pi 0", n_qubits=2), make_params(2), CompileOptions(voltage_bound=0.1))


def test_register_mismatch(make_params):
    with pytest.raises(ValueError):
        compile(parse_circuit("RX pi 0"), make_params(2))


def test_validate_empty_schedule():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        report = validate(ControlSchedule.empty(1), RateBudget(0.0, 0.0, 1e4, 2e-9))
    assert report.budget_ratio == 0.0
    assert report.warnings == []
    assert report.violations == []


def test_validate_budget_boundary():
    # 1000 gates of 1 ns against T2^-1 = 1e4 s^-1
    schedule = ControlSchedule(1, 1000.0)
    with pytest.warns(UserWarning, match="threshold"):
        report = validate(schedule, RateBudget(0.0, 0.0, 1e4, 2e-9))
    assert report.budget_ratio == pytest.approx(1e-2)
    assert len(report.warnings) == 1


def test_validate_voltage_and_amplitude(make_params):
    params = make_params(1)
    schedule = ControlSchedule(
        1,
        10.0,
        detuning={0: Channel([0.0, 5.0, 10.0], [0.0, 500.0, 0.0])},
        pulses=(MicrowavePulse(2.0, 4.0, 3.0),),
    )
    limits = HardwareLimits.from_params(params, voltage_bound=20.0, max_rabi_rate=1.0)
    with pytest.warns(UserWarning):
        report = validate(schedule, IDLE_BUDGET, limits)
    channels = [(v.channel, v.time) for v in report.violations]
    assert ("detuning_0", 5.0) in channels
    assert ("mw_0", 2.0) in channels
    assert report.max_voltage == pytest.approx(params.detuning_to_millivolt(0, 500.0))
    assert schedule.detuning[0].values[1] == 500.0


@pytest.mark.parametrize(
    "name,sites,parameter",
    [("RX", (0,), np.pi), ("RZ", (1,), np.pi / 2), ("ISWAP", (0, 1), None), ("SWEEP_SWAP", (0, 1), 1.0)],
)
def test_gate_unitaries_are_unitary(name, sites, parameter):
    unitary = gate_unitary(Gate(name, sites, parameter), 2)
    np.testing.assert_allclose(unitary.conj().T @ unitary, np.eye(4), atol=1e-12)
