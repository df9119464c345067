"""Label-correcting solver over the time-expanded location/slot grid.

A label is a partial itinerary compressed to what the future depends on:
remaining battery, the SNs visited since the last BS departure, per-SN
collection timestamps, per-SN ages, accrued cost, and the promise cost
used for comparisons. Labels spread forward slot by slot through three
moves (charge at the BS, fly to an unvisited SN, return and deliver),
each cell keeping at most ``capacity`` mutually non-dominated labels.
The best plan is read off the BS cells, extended by pure aging to the
horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import dominance
from .aoi import CostTable, RunReport, replay
from .model import Charge, Fly, Instance, Schedule, validate

__all__ = ["Label", "LabelStore", "GlaResult", "expand_charge", "expand_to_sn",
           "expand_to_bs", "reconstruct", "solve"]


class Label:
    """One partial solution pinned to a grid node (location, slot).

    ``collected`` and ``age`` are per-SN tuples in slot units: the slot each
    SN's freshest data was collected (0 = never), and the BS-side age.
    Never mutate a label after it is stored; ``promise`` is assigned once
    during creation.
    """

    __slots__ = ("loc", "slot", "battery", "visited", "collected", "age",
                 "cost", "promise", "parent", "action")

    def __init__(self, loc, slot, battery, visited, collected, age, cost,
                 promise, parent=None, action=None):
        self.loc = loc
        self.slot = slot
        self.battery = battery
        self.visited = visited
        self.collected = collected
        self.age = age
        self.cost = cost
        self.promise = promise
        self.parent = parent
        self.action = action

    def __repr__(self):
        return (f"Label(loc={self.loc}, slot={self.slot}, battery={self.battery:.3f}, "
                f"visited={sorted(self.visited)}, cost={self.cost:.6f})")


class LabelStore:
    """The (S+1) x (N+1) grid of label cells with capacity enforcement.

    ``max_cell_len`` tracks the largest cell ever seen, and with
    ``record=True`` every insertion verdict is kept for inspection.
    """

    def __init__(self, num_sns: int, horizon_slots: int, capacity: int | None,
                 record: bool = False):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be >= 1 (or None for unbounded)")
        self.num_sns = num_sns
        self.horizon_slots = horizon_slots
        self.capacity = capacity
        self.cells = [[[] for _ in range(horizon_slots + 1)] for _ in range(num_sns + 1)]
        self.max_cell_len = 0
        self.events = [] if record else None

    def cell(self, loc: int, slot: int) -> list:
        return self.cells[loc][slot]

    def insert(self, label: Label) -> dominance.DominanceVerdict:
        cell = self.cells[label.loc][label.slot]
        verdict = dominance.insert(label, cell, self.capacity)
        if len(cell) > self.max_cell_len:
            self.max_cell_len = len(cell)
        if self.events is not None:
            self.events.append(verdict)
        return verdict

    def all_labels(self):
        for loc_cells in self.cells:
            for cell in loc_cells:
                yield from cell


def expand_charge(label: Label, slots: int, instance: Instance, table: CostTable) -> Label:
    """Stay at the BS for ``slots`` slots, recharging; every SN ages."""
    if label.loc != 0:
        raise ValueError("charging is only possible at the BS")
    if slots < instance.recharge.min_slots:
        raise ValueError(f"charge stay below the minimum of {instance.recharge.min_slots} slots")
    if label.slot + slots > instance.horizon_slots:
        raise ValueError("charge runs past the horizon")
    cost = table.aging_run(label.cost, label.age, slots)
    battery = min(label.battery + instance.recharge.rate_per_slot * slots,
                  instance.battery_capacity)
    return Label(
        loc=0,
        slot=label.slot + slots,
        battery=battery,
        visited=frozenset(),
        collected=label.collected,
        age=tuple(a + slots for a in label.age),
        cost=cost,
        promise=cost,
        parent=label,
        action=Charge(slots=slots, start_slot=label.slot),
    )


def expand_to_sn(label: Label, target: int, instance: Instance, table: CostTable) -> Label | None:
    """Fly to an unvisited SN and collect its data, or None when the UAV
    could not still reach the BS within the horizon and remaining energy."""
    if target in label.visited or target == label.loc or not 1 <= target <= instance.num_sns:
        raise ValueError(f"invalid flight target {target}")
    t = instance.travel_slots
    e = instance.travel_energy
    duration = t[label.loc][target]
    if label.slot + duration + t[target][0] > instance.horizon_slots:
        return None
    if e[label.loc][target] + e[target][0] > label.battery:
        return None
    arrival = label.slot + duration
    collected = list(label.collected)
    collected[target - 1] = arrival
    out = Label(
        loc=target,
        slot=arrival,
        battery=label.battery - e[label.loc][target],
        visited=label.visited | {target},
        collected=tuple(collected),
        age=tuple(a + duration for a in label.age),
        cost=table.aging_run(label.cost, label.age, duration),
        promise=0.0,
        parent=label,
        action=Fly(origin=label.loc, target=target, depart_slot=label.slot),
    )
    out.promise = dominance.promise_cost(out, table)
    return out


def expand_to_bs(label: Label, instance: Instance, table: CostTable) -> Label | None:
    """Return to the BS and deliver everything on board, or None when the
    horizon or energy does not allow the flight."""
    if label.loc == 0:
        raise ValueError("already at the BS")
    t = instance.travel_slots
    duration = t[label.loc][0]
    if label.slot + duration > instance.horizon_slots:
        return None
    energy = instance.travel_energy[label.loc][0]
    if energy > label.battery:
        return None
    arrival = label.slot + duration
    cost = table.aging_run(label.cost, label.age, duration - 1)
    cost += table.delivered_step(arrival, label.collected)
    return Label(
        loc=0,
        slot=arrival,
        battery=label.battery - energy,
        visited=frozenset(),
        collected=label.collected,
        age=tuple(arrival - z for z in label.collected),
        cost=cost,
        promise=cost,
        parent=label,
        action=Fly(origin=label.loc, target=0, depart_slot=label.slot),
    )


def reconstruct(label: Label) -> Schedule:
    """Walk the parent chain back to the root and emit the action sequence."""
    actions = []
    node = label
    while node.parent is not None:
        actions.append(node.action)
        node = node.parent
    actions.reverse()
    return Schedule(tuple(actions))


@dataclass(frozen=True)
class GlaResult:
    schedule: Schedule
    report: RunReport
    cost: float
    store: LabelStore


def solve(instance: Instance, capacity: int | None = 1, record_events: bool = False) -> GlaResult:
    """Run the labeling solver and return the best schedule found.

    ``capacity`` bounds how many labels each grid cell may hold; None
    removes the bound. Deterministic for a fixed instance and capacity:
    ties between equal-cost final candidates break on the lexicographically
    smallest action sequence (flights before charges, flights by target,
    charges by duration).
    """
    problems = validate(instance)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))

    s = instance.num_sns
    n = instance.horizon_slots
    t = instance.travel_slots
    rate = instance.recharge.rate_per_slot
    cap = instance.battery_capacity
    w_min = instance.recharge.min_slots
    table = CostTable(instance)
    store = LabelStore(s, n, capacity, record=record_events)

    root = Label(
        loc=0, slot=0, battery=cap, visited=frozenset(),
        collected=(0,) * s, age=(0,) * s, cost=0.0, promise=0.0,
    )
    store.insert(root)

    for slot in range(n):
        for loc in range(s + 1):
            for label in list(store.cell(loc, slot)):
                if loc == 0:
                    # Charge stays of every legal length; the running cost
                    # extends one slot at a time so the chain stays cheap.
                    run_cost = label.cost
                    for w in range(1, n - slot + 1):
                        run_cost += table.aging_step(label.age, w)
                        if w < w_min:
                            continue
                        store.insert(Label(
                            loc=0,
                            slot=slot + w,
                            battery=min(label.battery + rate * w, cap),
                            visited=frozenset(),
                            collected=label.collected,
                            age=tuple(a + w for a in label.age),
                            cost=run_cost,
                            promise=run_cost,
                            parent=label,
                            action=Charge(slots=w, start_slot=slot),
                        ))
                    for target in range(1, s + 1):
                        candidate = expand_to_sn(label, target, instance, table)
                        if candidate is not None:
                            store.insert(candidate)
                else:
                    candidate = expand_to_bs(label, instance, table)
                    if candidate is not None:
                        store.insert(candidate)
                    for target in range(1, s + 1):
                        if target in label.visited:
                            continue
                        candidate = expand_to_sn(label, target, instance, table)
                        if candidate is not None:
                            store.insert(candidate)

    best_total = None
    best_key = None
    best_schedule = None
    for slot in range(n + 1):
        for label in store.cell(0, slot):
            total = table.aging_run(label.cost, label.age, n - slot)
            if best_total is not None and total > best_total:
                continue
            schedule = reconstruct(label)
            key = schedule.sort_key()
            if best_total is None or total < best_total or (total == best_total and key < best_key):
                best_total = total
                best_key = key
                best_schedule = schedule

    report = replay(best_schedule, instance, table)
    return GlaResult(schedule=best_schedule, report=report, cost=best_total, store=store)
