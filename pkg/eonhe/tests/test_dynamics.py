import numpy as np
import pytest

from eonhe.decoherence import RateBudget
from eonhe.dynamics import (
    EXCHANGE_SCALE,
    PAULI_Z,
    Channel,
    ControlSchedule,
    DecoherenceRates,
    MicrowavePulse,
    RaisedCosine,
    Rectangular,
    RegisterState,
    build_hamiltonian,
    envelope_from_config,
    evolve,
    lz_sweep_experiment,
    rabi_experiment,
    rabi_rate,
    site_operator,
)
from eonhe.errors import (
    IndexRangeError,
    RateConsistencyError,
    SchedulingError,
    SpanError,
)


def test_site_operator_ordering():
    assert np.array_equal(site_operator(PAULI_Z, 0, 2).diagonal(), [1, -1, 1, -1])
    assert np.array_equal(site_operator(PAULI_Z, 1, 2).diagonal(), [1, 1, -1, -1])


def test_register_state_basis():
    state = RegisterState.from_bits([1, 0, 1])
    assert state.probabilities()[5] == 1.0
    assert list(state.populations()) == [1.0, 0.0, 1.0]
    assert state.is_physical()
    assert state.to_density().is_physical()
    assert state.fidelity(state.to_density()) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        RegisterState(np.ones(3), 1)
    with pytest.raises(IndexRangeError):
        RegisterState.basis(2, 4)


def test_channel_jumps_take_right_limit():
    channel = Channel([0.0, 1.0, 1.0, 2.0], [0.0, 2.0, 5.0, 5.0])
    assert channel(0.5) == pytest.approx(1.0)
    assert channel(1.0) == 5.0
    assert channel(3.0) == 5.0
    assert channel.segment(0.0, 1.0) == pytest.approx((0.0, 2.0))
    with pytest.raises(SchedulingError):
        Channel([1.0, 0.0], [0.0, 0.0])


def test_schedule_validation():
    with pytest.raises(SchedulingError):
        ControlSchedule(1, 1.0, pulses=(MicrowavePulse(0.0, 0.6, 1.0), MicrowavePulse(0.5, 1.0, 1.0)))
    with pytest.raises(SchedulingError):
        ControlSchedule(1, 1.0, detuning={0: Channel([0.0, 2.0], [0.0, 0.0])})
    with pytest.raises(IndexRangeError):
        ControlSchedule(1, 1.0, detuning={3: Channel.constant(0.0, 1.0)})
    with pytest.raises(SchedulingError):
        MicrowavePulse(0.0, 1.0, np.inf)
    assert MicrowavePulse(0.0, 1.0, 1.0, phase=-np.pi / 2).phase == pytest.approx(1.5 * np.pi)


def test_envelopes():
    assert isinstance(envelope_from_config("raised-cosine"), RaisedCosine)
    assert isinstance(envelope_from_config("Rectangular"), Rectangular)
    assert RaisedCosine()(0.5, 0.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(NotImplementedError):
        envelope_from_config("gaussian")


def test_undriven_resonant_qubit_has_zero_hamiltonian(make_params):
    schedule = ControlSchedule(1, 10.0)
    assert np.array_equal(build_hamiltonian(make_params(1), schedule, 5.0), np.zeros((2, 2)))
    with pytest.raises(IndexRangeError):
        build_hamiltonian(make_params(1), schedule, 11.0)


def test_exchange_doublet_splitting(make_params):
    params = make_params(2, coupling=0.3)
    hamiltonian = build_hamiltonian(params, ControlSchedule(2, 1.0), 0.0)
    doublet = np.linalg.eigvalsh(hamiltonian[np.ix_([1, 2], [1, 2])])
    assert doublet[1] - doublet[0] == pytest.approx(EXCHANGE_SCALE * 0.3)


def test_hamiltonian_hermitian_for_random_schedules(make_params):
    rng = np.random.default_rng(1)
    params = make_params(3)
    for _ in range(5):
        schedule = ControlSchedule(
            3,
            10.0,
            detuning={n: Channel([0.0, 10.0], rng.normal(size=2)) for n in range(3)},
            pulses=(
                MicrowavePulse(0.0, 10.0, rng.uniform(0, 1), rng.uniform(0, 6), rng.normal(), (0, 2)),
            ),
        )
        hamiltonian = build_hamiltonian(params, schedule, rng.uniform(0, 10))
        assert np.array_equal(hamiltonian, hamiltonian.conj().T)


def test_identity_evolution(make_params):
    params = make_params(2, coupling=0.0)
    initial = RegisterState(np.array([0.6, 0.8j, 0.0, 0.0]), 2)
    trajectory = evolve(params, ControlSchedule(2, 10.0), initial, sampling=11)
    for state in trajectory.states:
        np.testing.assert_allclose(state.data, initial.data, atol=1e-12)


def test_resonant_rabi_oscillation(make_params):
    params = make_params(1)
    omega = rabi_rate(params, 0)
    omega_r, trajectory = rabi_experiment(params, 0, duration=10 * 2 * np.pi / omega, sampling=1001)
    assert omega_r == omega
    expected = np.sin(omega * trajectory.times / 2) ** 2
    assert np.max(np.abs(trajectory.populations()[:, 0] - expected)) < 1e-6
    assert max(state.norm_error() for state in trajectory.states) < 1e-9


def test_rabi_error_shrinks_with_tolerance(make_params):
    params = make_params(1)
    omega = rabi_rate(params, 0)
    duration = 10 * 2 * np.pi / omega
    errors = []
    for rtol, atol in [(1e-4, 1e-6), (1e-10, 1e-12)]:
        _, trajectory = rabi_experiment(params, 0, duration=duration, sampling=401, rtol=rtol, atol=atol)
        expected = np.sin(omega * trajectory.times / 2) ** 2
        errors.append(np.max(np.abs(trajectory.populations()[:, 0] - expected)))
    assert errors[1] < errors[0]
    assert errors[1] < 1e-7


def test_rabi_rate_order_of_magnitude(make_params):
    omega = rabi_rate(make_params(1), 0, e_rf=1.0)
    assert omega * 1e9 == pytest.approx(6.5e8, rel=0.02)
    assert 1e9 / 3 <= omega * 1e9 <= 3e9


def test_pi_pulse(make_params):
    params = make_params(1)
    omega = rabi_rate(params, 0)
    _, trajectory = rabi_experiment(params, 0, duration=np.pi / omega)
    assert trajectory.final.excited_population(0) == pytest.approx(1.0, abs=1e-6)


def test_detuned_rabi_reaches_half(make_params):
    params = make_params(1)
    omega = rabi_rate(params, 0)
    generalized = np.sqrt(2) * omega
    _, trajectory = rabi_experiment(
        params, 0, duration=np.pi / generalized, detuning=omega, sampling=2
    )
    assert trajectory.final.excited_population(0) == pytest.approx(0.5, abs=1e-4)


def test_exchange_conserves_excitations(make_params):
    params = make_params(3)
    schedule = ControlSchedule(
        3,
        20.0,
        detuning={0: Channel([0.0, 20.0], [1.0, -1.0]), 2: Channel.constant(0.5, 20.0)},
    )
    trajectory = evolve(params, schedule, RegisterState.from_bits([1, 0, 1]), sampling=41)
    totals = trajectory.populations().sum(axis=1)
    np.testing.assert_allclose(totals, 2.0, atol=1e-8)
    frame = trajectory.to_frame(coherences=True)
    assert list(frame.columns) == [
        "t",
        "p_excited_0",
        "p_excited_1",
        "p_excited_2",
        "coherence_0_1",
        "coherence_0_2",
        "coherence_1_2",
    ]


def test_energy_conserved_for_static_hamiltonian(make_params):
    params = make_params(2)
    schedule = ControlSchedule(
        2,
        20.0,
        detuning={0: Channel.constant(0.4, 20.0)},
        pulses=(MicrowavePulse(0.0, 20.0, 0.3, sites=(1,)),),
    )
    hamiltonian = build_hamiltonian(params, schedule, 0.0)
    trajectory = evolve(params, schedule, RegisterState.from_bits([1, 0]), sampling=21)
    energies = np.array([np.real(state.expectation(hamiltonian)) for state in trajectory.states])
    assert np.max(np.abs(energies - energies[0])) < 1e-8 * max(1.0, abs(energies[0]))


def test_relaxation(make_params):
    params = make_params(1)
    rates = DecoherenceRates(t1_inv=1e8, t2_inv=5e7)
    trajectory = evolve(
        params, ControlSchedule(1, 10.0), RegisterState.from_bits([1]), decoherence=rates, sampling=11
    )
    assert trajectory.final.is_density
    assert trajectory.final.excited_population(0) == pytest.approx(np.exp(-1.0), abs=1e-6)
    assert all(state.is_physical() for state in trajectory.states)


def test_dephasing(make_params):
    params = make_params(1)
    rates = DecoherenceRates(t1_inv=0.0, t2_inv=1e8)
    plus = RegisterState(np.array([1.0, 1.0]) / np.sqrt(2), 1)
    trajectory = evolve(params, ControlSchedule(1, 10.0), plus, decoherence=rates, sampling=11)
    coherence = np.array([abs(state.data[0, 1]) for state in trajectory.states])
    np.testing.assert_allclose(coherence, 0.5 * np.exp(-0.1 * trajectory.times), atol=1e-7)
    np.testing.assert_allclose(trajectory.populations()[:, 0], 0.5, atol=1e-9)


def test_rate_consistency():
    with pytest.raises(RateConsistencyError):
        DecoherenceRates(t1_inv=1e6, t2_inv=1e5)
    with pytest.raises(RateConsistencyError):
        DecoherenceRates(t1_inv=-1.0, t2_inv=0.0)
    budget = RateBudget(tau_intra_inv=0.0, t1_inv=6.8e6, t2_inv=46.6, delta_t=2e-9)
    rates = DecoherenceRates.from_budget(budget)
    assert rates.t2_inv[0] == pytest.approx(3.4e6)
    relaxation, dephasing = rates.for_sites(2)
    assert relaxation == pytest.approx([6.8e-3, 6.8e-3])
    assert dephasing == pytest.approx([0.0, 0.0])


def test_register_limits(make_params):
    params = make_params(7)
    with pytest.raises(IndexRangeError):
        evolve(
            params,
            ControlSchedule(7, 1.0),
            RegisterState.ground(7),
            decoherence=DecoherenceRates(0.0, 0.0),
        )


def test_sample_times(make_params):
    params = make_params(1)
    with pytest.raises(IndexRangeError):
        evolve(params, ControlSchedule(1, 1.0), RegisterState.ground(1), sampling=[0.0, 2.0])
    with pytest.raises(ValueError):
        evolve(params, ControlSchedule(1, 1.0), RegisterState.ground(1), sampling=[0.5, 0.2])


def test_uncoupled_crossing_keeps_excitation(make_params):
    survival, _ = lz_sweep_experiment(make_params(2), 0.0)
    assert survival == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("g,expected,tolerance", [(1.0, np.exp(-np.pi), 2e-2 * np.exp(-np.pi)), (2.0, np.exp(-4 * np.pi), 5e-6)])
def test_landau_zener_survival(make_params, g, expected, tolerance):
    survival, trajectory = lz_sweep_experiment(make_params(2), g, sampling=5)
    assert survival == pytest.approx(expected, abs=tolerance)
    assert trajectory.populations().sum(axis=1) == pytest.approx(np.ones(5), abs=1e-8)


def test_landau_zener_span(make_params):
    with pytest.raises(SpanError):
        lz_sweep_experiment(make_params(2), 1.0, half_span=1.0)
    with pytest.raises(ValueError):
        lz_sweep_experiment(make_params(2), -1.0)


def test_zero_duration_evolution_has_single_sample(make_params):
    initial = RegisterState.from_bits([1])
    trajectory = evolve(make_params(1), ControlSchedule(1, 0.0), initial)
    assert list(trajectory.times) == [0.0]
    assert len(trajectory.states) == 1
    np.testing.assert_array_equal(trajectory.final.data, initial.data)
