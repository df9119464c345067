import random

import pytest

from aoisched import (
    Charge,
    Fly,
    LinearCost,
    QuadraticCost,
    ReplayError,
    Schedule,
    delivery_cost,
    interval_cost,
    replay,
)
from aoisched.aoi import CostTable
from conftest import make_instance, random_schedule

ZERO = LinearCost(0.0)


# ---------------------------------------------------------------------------
# interval and delivery cost
# ---------------------------------------------------------------------------


def test_interval_cost_examples():
    assert interval_cost([0, 0], 2, [LinearCost(1.0)] * 2, 1.0) == 6.0
    assert interval_cost([5], 1, [QuadraticCost(1.0)], 1.0) == 36.0
    assert interval_cost([3, 7, 2], 5, [ZERO] * 3, 1.0) == 0.0
    assert interval_cost([4], 0, [LinearCost(1.0)], 1.0) == 0.0
    with pytest.raises(ValueError):
        interval_cost([0], -1, [ZERO], 1.0)


def test_delivery_cost_examples():
    assert delivery_cost([3], 1, [1], [LinearCost(1.0)], 1.0) == 1.0
    assert delivery_cost([3, 3], 2, [1, 5], [LinearCost(1.0)] * 2, 1.0) == 14.0
    with pytest.raises(ValueError):
        delivery_cost([3], 0, [1], [LinearCost(1.0)], 1.0)


# ---------------------------------------------------------------------------
# replay basics
# ---------------------------------------------------------------------------


def test_replay_empty_schedule_ages_linearly(unit_instance):
    report = replay(Schedule(), unit_instance)
    n = unit_instance.horizon_slots
    assert report.cumulative_cost == n * (n + 1) / 2
    assert report.cost_trace == (1.0, 2.0, 3.0, 4.0)
    assert report.normalized_cost == report.cumulative_cost / n
    assert report.deliveries == ()


def test_replay_single_round_trip(unit_instance):
    report = replay(Schedule((Fly(0, 1, 0), Fly(1, 0, 1))), unit_instance)
    assert report.cumulative_cost == 7.0
    assert report.cost_trace == (1.0, 1.0, 2.0, 3.0)
    assert len(report.deliveries) == 1
    assert report.deliveries[0].slot == 2 and report.deliveries[0].collected_slot == 1


def test_replay_cumulative_equals_trace_sum(unit_instance):
    report = replay(Schedule((Fly(0, 1, 0), Fly(1, 0, 1), Charge(1, 2))), unit_instance)
    assert report.cumulative_cost == pytest.approx(sum(report.cost_trace), abs=1e-12)


def test_replay_errors():
    inst = make_instance(battery=1.5)  # a one-way leg costs 1.0
    with pytest.raises(ReplayError, match="underflow"):
        replay(Schedule((Fly(0, 1, 0), Fly(1, 0, 1))), inst)
    inst = make_instance(min_charge=3)
    with pytest.raises(ReplayError, match="minimum stay"):
        replay(Schedule((Charge(2, 0),)), inst)
    inst = make_instance(horizon=3)
    with pytest.raises(ReplayError):
        replay(Schedule((Charge(4, 0),)), inst)


def test_replay_battery_trace_and_charging():
    inst = make_instance(battery=2.0, rate=0.5)
    report = replay(Schedule((Fly(0, 1, 0), Fly(1, 0, 1), Charge(2, 2))), inst)
    assert report.battery_trace == (2.0, 1.0, 0.0, 0.5, 1.0)


# ---------------------------------------------------------------------------
# properties on random schedules
# ---------------------------------------------------------------------------


def _instances_for_properties():
    from aoisched import random_instance, validate

    out = []
    seed = 0
    while len(out) < 12:
        inst = random_instance(seed, 1 + seed % 3, 8 + seed % 5, radius_m=2500.0)
        seed += 1
        if not validate(inst):
            out.append(inst)
    return out


def test_replay_decomposes_into_interval_and_delivery_terms():
    """Replay must equal the sum of per-action closed-form terms."""
    rng = random.Random(42)
    for inst in _instances_for_properties():
        tau = inst.slot_len
        fns = inst.cost_fns
        for _ in range(6):
            sched = random_schedule(inst, rng)
            report = replay(sched, inst)

            total = 0.0
            slot, loc = 0, 0
            delivered = [0] * inst.num_sns
            collected = [0] * inst.num_sns
            for action in sched.actions:
                ages = [(slot - u) * tau for u in delivered]
                if isinstance(action, Charge):
                    total += interval_cost(ages, action.slots, fns, tau)
                    slot += action.slots
                else:
                    duration = inst.travel_slots[action.origin][action.target]
                    if action.target == 0:
                        arrival = slot + duration
                        post = [(arrival - z) * tau for z in collected]
                        total += delivery_cost(ages, duration, post, fns, tau)
                        delivered = list(collected)
                    else:
                        total += interval_cost(ages, duration, fns, tau)
                        collected[action.target - 1] = slot + duration
                    slot += duration
                    loc = action.target
            ages = [(slot - u) * tau for u in delivered]
            total += interval_cost(ages, inst.horizon_slots - slot, fns, tau)
            assert abs(total - report.cumulative_cost) <= 1e-9


def test_replay_aoi_reset_and_monotone_staleness():
    rng = random.Random(99)
    for inst in _instances_for_properties():
        tau = inst.slot_len
        for _ in range(4):
            sched = random_schedule(inst, rng)
            report = replay(sched, inst)
            delivery_slots = {}
            for event in report.deliveries:
                delivery_slots.setdefault(event.slot, {})[event.sn] = event.collected_slot
            for slot, per_sn in delivery_slots.items():
                for sn, z in per_sn.items():
                    assert report.aoi_trace[slot][sn - 1] == pytest.approx((slot - z) * tau)
            # between deliveries every age grows by exactly one slot
            for m in range(1, len(report.aoi_trace)):
                for k in range(inst.num_sns):
                    if m in delivery_slots and (k + 1) in delivery_slots[m]:
                        continue
                    assert report.aoi_trace[m][k] == pytest.approx(
                        report.aoi_trace[m - 1][k] + tau
                    )


def test_replay_energy_conservation():
    rng = random.Random(7)
    for inst in _instances_for_properties():
        for _ in range(4):
            sched = random_schedule(inst, rng)
            report = replay(sched, inst)
            energy = 0.0
            battery = inst.battery_capacity
            for action in sched.actions:
                if isinstance(action, Charge):
                    credit = min(
                        battery + inst.recharge.rate_per_slot * action.slots,
                        inst.battery_capacity,
                    ) - battery
                    battery += credit
                    energy -= credit
                else:
                    battery -= inst.travel_energy[action.origin][action.target]
                    energy += inst.travel_energy[action.origin][action.target]
            assert report.battery_trace[-1] == pytest.approx(
                inst.battery_capacity - energy, abs=1e-9
            )
            assert all(-1e-12 <= b <= inst.battery_capacity + 1e-12
                       for b in report.battery_trace)


def test_trace_csv_columns(tmp_path, unit_instance):
    report = replay(Schedule((Fly(0, 1, 0), Fly(1, 0, 1))), unit_instance)
    path = tmp_path / "trace.csv"
    report.write_trace_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "slot,total_cost,battery,aoi_s1"
    assert len(lines) == unit_instance.horizon_slots + 2


def test_cost_table_matches_interval_cost():
    inst = make_instance(num_sns=2, horizon=6,
                         cost_fns=(QuadraticCost(0.3), LinearCost(2.0)))
    table = CostTable(inst)
    ages = (2, 0)
    got = table.aging_run(0.0, ages, 3)
    want = interval_cost([2.0, 0.0], 3, inst.cost_fns, 1.0)
    assert got == pytest.approx(want, abs=1e-12)
