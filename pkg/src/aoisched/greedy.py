"""Greedy baseline: chase the most expensive age per travel slot.

At each decision point the UAV ranks the reachable unvisited SNs by the
cost their age will have reached on arrival, divided by the travel
slots. It commits to the best-ranked SN only if visiting it and then
returning beats returning right away when both branches are costed over
the same window; otherwise it tries the next SN, and failing all, heads
home to deliver. At the BS it charges just enough to make some trip
affordable, or waits when no trip currently pays off.
"""

from __future__ import annotations

import math

from .aoi import CostTable, SolveResult, replay
from .model import Charge, Fly, Instance, Schedule, validate

__all__ = ["greedy_solve"]


def _branch_visit(table, t, slot, delivered, collected, loc, target, window):
    """Window cost of flying to ``target``, returning, then idling."""
    ages = tuple(slot - u for u in delivered)
    t1 = t[loc][target]
    t2 = t[target][0]
    cost = table.aging_run(0.0, ages, t1)
    z2 = list(collected)
    z2[target - 1] = slot + t1
    mid_ages = tuple(a + t1 for a in ages)
    cost = table.aging_run(cost, mid_ages, t2 - 1)
    arrival = slot + t1 + t2
    cost += table.delivered_step(arrival, z2)
    post_ages = tuple(arrival - z for z in z2)
    return table.aging_run(cost, post_ages, window - t1 - t2)


def _branch_return(table, t, slot, delivered, collected, loc, window):
    """Window cost of returning now (or just idling when already home)."""
    ages = tuple(slot - u for u in delivered)
    if loc == 0:
        return table.aging_run(0.0, ages, window)
    t0 = t[loc][0]
    cost = table.aging_run(0.0, ages, t0 - 1)
    arrival = slot + t0
    cost += table.delivered_step(arrival, collected)
    post_ages = tuple(arrival - z for z in collected)
    return table.aging_run(cost, post_ages, window - t0)


def greedy_solve(instance: Instance) -> SolveResult:
    problems = validate(instance)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))

    s = instance.num_sns
    n = instance.horizon_slots
    t = instance.travel_slots
    e = instance.travel_energy
    cap = instance.battery_capacity
    rate = instance.recharge.rate_per_slot
    w_min = instance.recharge.min_slots
    table = CostTable(instance)

    loc = 0
    slot = 0
    battery = cap
    delivered = [0] * s
    collected = [0] * s
    visited: set[int] = set()
    cost = 0.0
    actions = []

    def score(target: int) -> float:
        duration = t[loc][target]
        return table.rows[target - 1][slot - delivered[target - 1] + duration] / duration

    def reachable() -> list[int]:
        out = []
        for target in range(1, s + 1):
            if target in visited or target == loc:
                continue
            if slot + t[loc][target] + t[target][0] > n:
                continue
            if e[loc][target] + e[target][0] > battery:
                continue
            out.append(target)
        return out

    def commit_flight(target: int) -> None:
        nonlocal loc, slot, battery, cost
        duration = t[loc][target]
        ages = tuple(slot - u for u in delivered)
        if target == 0:
            cost = table.aging_run(cost, ages, duration - 1)
            cost += table.delivered_step(slot + duration, collected)
            delivered[:] = collected
            visited.clear()
        else:
            cost = table.aging_run(cost, ages, duration)
            collected[target - 1] = slot + duration
            visited.add(target)
        actions.append(Fly(origin=loc, target=target, depart_slot=slot))
        battery -= e[loc][target]
        slot += duration
        loc = target

    def commit_charge(slots: int) -> None:
        nonlocal slot, battery, cost
        ages = tuple(slot - u for u in delivered)
        cost = table.aging_run(cost, ages, slots)
        actions.append(Charge(slots=slots, start_slot=slot))
        battery = min(battery + rate * slots, cap)
        slot += slots

    def min_charge_for_a_trip() -> int | None:
        best = None
        for target in range(1, s + 1):
            trip_slots = t[0][target] + t[target][0]
            trip_energy = e[0][target] + e[target][0]
            if trip_energy > cap:
                continue
            need = trip_energy - battery
            if need <= 0 or rate <= 0:
                continue
            w = max(w_min, math.ceil(need / rate - 1e-12))
            while min(battery + rate * w, cap) < trip_energy:
                w += 1
            if slot + w + trip_slots > n:
                continue
            if best is None or w < best:
                best = w
        return best

    while slot < n:
        candidates = reachable()
        if loc == 0 and not candidates:
            any_trip_fits = any(
                slot + t[0][k] + t[k][0] <= n and e[0][k] + e[k][0] <= cap
                for k in range(1, s + 1)
            )
            if not any_trip_fits:
                break
            w = min_charge_for_a_trip()
            if w is None:
                break
            commit_charge(w)
            continue

        candidates.sort(key=lambda target: (-score(target), target))
        chosen = None
        for target in candidates:
            window = max(t[loc][target] + t[target][0], t[loc][0])
            go = _branch_visit(table, t, slot, delivered, collected, loc, target, window)
            stay = _branch_return(table, t, slot, delivered, collected, loc, window)
            if go < stay:
                chosen = target
                break

        if chosen is not None:
            commit_flight(chosen)
        elif loc != 0:
            commit_flight(0)
        else:
            if slot + w_min > n:
                break
            commit_charge(w_min)

    ages = tuple(slot - u for u in delivered)
    cost = table.aging_run(cost, ages, n - slot)

    schedule = Schedule(tuple(actions))
    report = replay(schedule, instance, table)
    return SolveResult(schedule=schedule, report=report, cost=cost)
