"""Shared builders for the test suite."""

import random

import pytest

from aoisched import Charge, Fly, Instance, LinearCost, RechargeSpec, Schedule


def make_instance(num_sns=1, horizon=4, travel=None, energy=None, battery=100.0,
                  rate=0.5, min_charge=1, cost_fns=None, slot_len=1.0):
    if travel is None:
        travel = [[0 if i == j else 1 for j in range(num_sns + 1)] for i in range(num_sns + 1)]
    if energy is None:
        energy = [[float(v) for v in row] for row in travel]
    if cost_fns is None:
        cost_fns = tuple(LinearCost(1.0) for _ in range(num_sns))
    return Instance(
        num_sns=num_sns,
        horizon_slots=horizon,
        slot_len=slot_len,
        travel_slots=travel,
        travel_energy=energy,
        battery_capacity=battery,
        recharge=RechargeSpec(rate_per_slot=rate, min_slots=min_charge),
        cost_fns=cost_fns,
    )


def random_schedule(instance, rng: random.Random) -> Schedule:
    """A random feasible action walk: flights under the solvers' guards,
    charges of random legal length, ending at the BS."""
    n = instance.horizon_slots
    t = instance.travel_slots
    e = instance.travel_energy
    cap = instance.battery_capacity
    rate = instance.recharge.rate_per_slot
    w_min = instance.recharge.min_slots
    loc, slot, battery = 0, 0, cap
    visited = set()
    actions = []
    for _ in range(40):
        options = []
        if loc == 0 and slot + w_min <= n:
            options.append(("charge",))
        if loc != 0 and slot + t[loc][0] <= n and e[loc][0] <= battery:
            options.append(("fly", 0))
        for target in range(1, instance.num_sns + 1):
            if target == loc or target in visited:
                continue
            if slot + t[loc][target] + t[target][0] > n:
                continue
            if e[loc][target] + e[target][0] > battery:
                continue
            options.append(("fly", target))
        if not options or rng.random() < 0.15:
            break
        choice = options[rng.randrange(len(options))]
        if choice[0] == "charge":
            slots = rng.randint(w_min, n - slot)
            actions.append(Charge(slots=slots, start_slot=slot))
            battery = min(battery + rate * slots, cap)
            slot += slots
        else:
            target = choice[1]
            actions.append(Fly(origin=loc, target=target, depart_slot=slot))
            battery -= e[loc][target]
            slot += t[loc][target]
            if target == 0:
                visited.clear()
            else:
                visited.add(target)
            loc = target
    if loc != 0:
        actions.append(Fly(origin=loc, target=0, depart_slot=slot))
    return Schedule(tuple(actions))


@pytest.fixture
def unit_instance():
    """S=1, N=4, one-slot legs, linear cost, effectively unlimited battery."""
    return make_instance()
