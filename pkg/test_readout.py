import json
import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import PhysicsInputError
from src.gates import PulseSegment
from src.readout import (
    FilterSpec,
    ReadoutRun,
    bus_transfer,
    detection_probability,
    discrimination_power,
    flip_probability,
    readout_run,
    readout_to_csv,
    schedule_to_json,
    swap_chain_fidelity,
)

D_PRIME_HZ = 100e6


def _pulse(rabi_hz: float) -> PulseSegment:
    return PulseSegment.for_angle(math.pi, 28e9, rabi_hz, 1)


# ===== DETECTION PROBABILITY =====

def test_ideal_filters_read_the_caged_state():
    run = ReadoutRun(electrons=500)
    assert readout_run(1.5, run).counts == 500
    assert readout_run(-1.5, run).counts == 0
    assert readout_run(0.5, run).counts == 0


@pytest.mark.parametrize("epsilon", [0.0, 0.1, 0.5, 1.2])
def test_under_rotated_flip(epsilon):
    run = ReadoutRun(flip_angle=math.pi - epsilon)
    flip = flip_probability(1.5, run)
    assert flip == pytest.approx(math.cos(epsilon / 2) ** 2)
    assert detection_probability(flip, run.filter_a, run.filter_b) == pytest.approx(math.cos(epsilon / 2) ** 2)


def test_leaky_first_filter():
    leaky = FilterSpec(pass_polarization='down', efficiency=0.9)
    run = ReadoutRun(filter_a=leaky)
    assert detection_probability(0.0, run.filter_a, run.filter_b) == pytest.approx(0.05)
    assert detection_probability(1.0, run.filter_a, run.filter_b) == pytest.approx(0.95)


def test_zero_efficiency_filters_do_nothing():
    blind_a = ReadoutRun(filter_a=FilterSpec(pass_polarization='down', efficiency=0.0))
    blind_b = ReadoutRun(filter_b=FilterSpec(pass_polarization='up', efficiency=0.0))
    for flip in (0.0, 1.0):
        assert detection_probability(flip, blind_a.filter_a, blind_a.filter_b) == pytest.approx(0.5)
        assert detection_probability(flip, blind_b.filter_a, blind_b.filter_b) == pytest.approx(1.0)
    sampled = readout_run(-1.5, blind_a.model_copy(update={'electrons': 10000, 'seed': 3}))
    assert sampled.probability == pytest.approx(0.5)
    assert abs(sampled.p_hat - 0.5) < 4 * math.sqrt(0.25 / 10000)


@pytest.mark.parametrize("flip", [0.0, 0.3, 1.0])
@pytest.mark.parametrize("knob", ['efficiency', 'transmission'])
@pytest.mark.parametrize("stage", ['filter_a', 'filter_b'])
def test_detection_probability_is_affine_and_monotone_in_filter_knobs(stage, knob, flip):
    base = ReadoutRun(filter_a=FilterSpec(pass_polarization='down', efficiency=0.8, transmission=0.9),
                      filter_b=FilterSpec(pass_polarization='up', efficiency=0.7, transmission=0.95))
    values = []
    for x in np.linspace(0.0, 1.0, 11):
        run = base.model_copy(update={stage: getattr(base, stage).model_copy(update={knob: float(x)})})
        values.append(detection_probability(flip, run.filter_a, run.filter_b))
    steps = np.diff(values)
    assert np.allclose(np.diff(steps), 0.0, atol=1e-12)
    assert np.all(steps >= -1e-12) or np.all(steps <= 1e-12)


def test_filter_transmission_scales_counts():
    lossy = FilterSpec(pass_polarization='up', transmission=0.5)
    run = ReadoutRun(filter_b=lossy)
    assert detection_probability(1.0, run.filter_a, run.filter_b) == pytest.approx(0.5)


def test_detection_probability_checks():
    with pytest.raises(PhysicsInputError):
        detection_probability(1.5, FilterSpec(pass_polarization='down'), FilterSpec(pass_polarization='up'))
    with pytest.raises(ValidationError):
        FilterSpec(pass_polarization='sideways')
    with pytest.raises(ValidationError):
        FilterSpec(pass_polarization='up', efficiency=1.2)
    with pytest.raises(ValidationError):
        ReadoutRun(electrons=0)


# ===== SAMPLED RUNS =====

def test_seeded_runs_are_reproducible():
    run = ReadoutRun(electrons=10000, flip_angle=math.pi / 2, seed=7)
    first, second = readout_run(1.5, run), readout_run(1.5, run)
    assert first.counts == second.counts
    assert first.probability == pytest.approx(0.5)
    sigma = math.sqrt(0.25 / run.electrons)
    assert abs(first.p_hat - first.probability) < 5 * sigma


def test_small_under_rotation_at_ten_thousand_electrons():
    run = ReadoutRun(electrons=10000, flip_angle=math.pi - 0.1, seed=11)
    result = readout_run(1.5, run)
    p = math.cos(0.05) ** 2
    assert result.probability == pytest.approx(p)
    assert abs(result.p_hat - p) < 4 * math.sqrt(p * (1 - p) / run.electrons)


def test_distribution_collapses_once_per_run():
    outcomes = set()
    for seed in range(20):
        result = readout_run({1.5: 0.5, -1.5: 0.5}, ReadoutRun(electrons=200, seed=seed))
        assert result.counts in (0, 200)
        assert result.caged_m in (1.5, -1.5)
        outcomes.add(result.caged_m)
    assert outcomes == {1.5, -1.5}


@pytest.mark.parametrize("caged", [2.5, {1.5: 0.5, -1.5: 0.4}, {1.5: 1.2, -1.5: -0.2}])
def test_invalid_caged_state(caged):
    with pytest.raises(PhysicsInputError):
        readout_run(caged, ReadoutRun())


def test_pulsed_readout_uses_mobile_coupling():
    run = ReadoutRun(electrons=100)
    pulse = _pulse(D_PRIME_HZ / 100)
    assert flip_probability(1.5, run, pulse, D_PRIME_HZ) == pytest.approx(1.0)
    assert flip_probability(-1.5, run, pulse, D_PRIME_HZ) < 1e-4
    assert readout_run(1.5, run, pulse, D_PRIME_HZ).details['flip_probability'] == pytest.approx(1.0)


def test_discrimination_power():
    run = ReadoutRun()
    assert discrimination_power(run, D_PRIME_HZ, _pulse(D_PRIME_HZ / 100)) > 0.999
    assert discrimination_power(run, D_PRIME_HZ, _pulse(100 * D_PRIME_HZ)) < 0.01
    with pytest.raises(PhysicsInputError):
        discrimination_power(run, 0.0, _pulse(1e6))


def test_readout_csv(tmp_path):
    results = [readout_run(1.5, ReadoutRun(electrons=50, seed=s)) for s in range(3)]
    path = readout_to_csv(results, tmp_path / 'readout.csv')
    lines = path.read_text().splitlines()
    assert lines[0] == 'seed,n,counts,p_hat,p,caged_m'
    assert len(lines) == 4
    assert lines[1].startswith('0,50,50,')


# ===== BUS TRANSFER =====

def test_swap_chain_is_a_swap():
    assert swap_chain_fidelity() == pytest.approx(1.0)


def test_bus_schedule(five_site_full):
    schedule, fidelity = bus_transfer(1, 4, five_site_full, math.inf, 1e-6, 1e-3)
    assert fidelity == pytest.approx(1.0)
    assert [hop.action for hop in schedule.hops] == ['swap', 'transit', 'swap', 'transit', 'swap']
    assert [hop.site for hop in schedule.swaps] == [1, 4, 1]

    leg = 3 * five_site_full.min_spacing_m / 1e-3
    assert schedule.coherent_duration_s == pytest.approx(3e-6 + 2 * leg)
    assert schedule.total_duration_s == pytest.approx(schedule.coherent_duration_s)
    for earlier, later in zip(schedule.hops, schedule.hops[1:]):
        assert later.start_s == pytest.approx(earlier.end_s)


def test_bus_fidelity_budget(five_site_full):
    t2 = 1e-4
    schedule, budgeted = bus_transfer(1, 4, five_site_full, t2, 1e-6, 1e-3)
    _, transit_free = bus_transfer(1, 4, five_site_full, t2, 1e-6, 1e-3, budget=False)
    assert budgeted == pytest.approx(math.exp(-schedule.coherent_duration_s / t2))
    assert transit_free == pytest.approx(math.exp(-3e-6 / t2))
    assert budgeted < transit_free


def test_bus_fidelity_falls_with_distance(five_site_full):
    fidelities = [bus_transfer(1, k, five_site_full, 1e-4, 1e-6, 1e-3)[1] for k in (2, 3, 4, 5)]
    assert np.all(np.diff(fidelities) < 0)


def test_bus_fidelity_rises_with_coherence_time(five_site_full):
    fidelities = [bus_transfer(1, 3, five_site_full, t2, 1e-6, 1e-3)[1] for t2 in (1e-6, 1e-5, 1e-4, 1e-3, math.inf)]
    assert np.all(np.diff(fidelities) > 0)
    assert fidelities[-1] == pytest.approx(1.0)


def test_bus_approach_leg_is_not_charged(five_site_full):
    start = five_site_full.positions_m[4]
    schedule, fidelity = bus_transfer(1, 4, five_site_full, 1e-4, 1e-6, 1e-3, start_position_m=start)
    assert schedule.hops[0].action == 'transit'
    assert schedule.total_duration_s > schedule.coherent_duration_s
    _, direct = bus_transfer(1, 4, five_site_full, 1e-4, 1e-6, 1e-3)
    assert fidelity == pytest.approx(direct)


def test_bus_transfer_checks(five_site_full):
    with pytest.raises(PhysicsInputError):
        bus_transfer(2, 2, five_site_full, 1e-4, 1e-6, 1e-3)
    with pytest.raises(PhysicsInputError):
        bus_transfer(1, 6, five_site_full, 1e-4, 1e-6, 1e-3)
    with pytest.raises(PhysicsInputError):
        bus_transfer(1, 2, five_site_full, -1.0, 1e-6, 1e-3)


def test_schedule_json(tmp_path, five_site_full):
    schedule, fidelity = bus_transfer(1, 3, five_site_full, math.inf, 1e-6, 1e-3)
    payload = json.loads(schedule_to_json(schedule, tmp_path / 'transfer.json', fidelity).read_text())
    assert payload['mobile_t2_s'] is None
    assert payload['fidelity'] == pytest.approx(1.0)
    assert len(payload['hops']) == 5
    assert payload['hops'][0]['pulse_blocks'] == ['CNOT', 'CNOT', 'CNOT']
