"""AoI bookkeeping: per-slot cost accounting, schedule replay, run reports.

Cost is charged at the end of every elapsed slot, for every SN, at its
current age; slot 0 accrues nothing. All slotted solvers and ``replay``
read per-slot charges from one shared :class:`CostTable` and accumulate
them in the same chronological order, so a solver's claimed cost matches
the replayed cost of its schedule exactly, not just to rounding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .model import Fly, Instance, Schedule

__all__ = [
    "CostTable",
    "AoiState",
    "DeliveryEvent",
    "RunReport",
    "SolveResult",
    "ReplayError",
    "interval_cost",
    "delivery_cost",
    "replay",
]


class CostTable:
    """Per-SN cost values tabulated on the slot grid.

    ``rows[s-1][m]`` is SN s's cost at an age of m slots; the table runs to
    twice the horizon because promise windows look past it. ``prefix``
    accumulates rows 1..m for windowed sums that are only ever compared,
    never folded into an accrued cost. Ages in the slotted model always
    land on the grid, so solvers never evaluate a cost function off-table.
    """

    __slots__ = ("rows", "prefix", "num_slots")

    def __init__(self, instance: Instance):
        tau = instance.slot_len
        n = instance.horizon_slots
        self.rows = [[fn(m * tau) for m in range(2 * n + 1)] for fn in instance.cost_fns]
        self.prefix = []
        for row in self.rows:
            acc = 0.0
            pref = [0.0]
            for value in row[1:]:
                acc += value
                pref.append(acc)
            self.prefix.append(pref)
        self.num_slots = n

    def aging_step(self, ages: Sequence[int], i: int) -> float:
        """Total charge for one slot in which every SN has aged ``i`` slots
        past ``ages`` without a delivery."""
        return sum(row[ages[k] + i] for k, row in enumerate(self.rows))

    def aging_run(self, cost: float, ages: Sequence[int], slots: int) -> float:
        """Accumulate ``slots`` consecutive aging charges onto ``cost``."""
        for i in range(1, slots + 1):
            cost += self.aging_step(ages, i)
        return cost

    def delivered_step(self, arrival_slot: int, collected: Sequence[int]) -> float:
        """Total charge for a BS-arrival slot, after the delivery has reset
        every SN's age to the staleness of its freshest collected data."""
        return sum(row[arrival_slot - collected[k]] for k, row in enumerate(self.rows))


@dataclass(frozen=True)
class AoiState:
    """Ages at one slot: BS-side collection timestamps ``delivered_slot`` (u)
    and onboard collection timestamps ``collected_slot`` (z), both in slot
    units, 0 meaning never."""

    slot: int
    delivered_slot: tuple
    collected_slot: tuple
    slot_len: float

    @property
    def ages(self) -> tuple:
        return tuple((self.slot - u) * self.slot_len for u in self.delivered_slot)

    @property
    def onboard_ages(self) -> tuple:
        return tuple((self.slot - z) * self.slot_len for z in self.collected_slot)


@dataclass(frozen=True)
class DeliveryEvent:
    """One SN's BS-side timestamp advancing at a BS arrival."""

    slot: int
    sn: int
    collected_slot: int


@dataclass(frozen=True)
class RunReport:
    """Replay result: totals plus per-slot traces.

    ``cost_trace[m-1]`` is the charge for slot m, ``battery_trace[m]`` the
    battery at the end of slot m, and ``aoi_trace[m]`` the per-SN ages in
    minutes after slot m's delivery, if any.
    """

    cumulative_cost: float
    normalized_cost: float
    cost_trace: tuple
    battery_trace: tuple
    aoi_trace: tuple
    deliveries: tuple

    def to_dict(self) -> dict:
        return {
            "cumulative_cost": self.cumulative_cost,
            "normalized_cost": self.normalized_cost,
            "cost_trace": list(self.cost_trace),
            "battery_trace": list(self.battery_trace),
            "aoi_trace": [list(row) for row in self.aoi_trace],
            "deliveries": [
                {"slot": d.slot, "sn": d.sn, "collected_slot": d.collected_slot}
                for d in self.deliveries
            ],
        }

    def write_trace_csv(self, path) -> None:
        num_sns = len(self.aoi_trace[0]) if self.aoi_trace else 0
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["slot", "total_cost", "battery"] + [f"aoi_s{k}" for k in range(1, num_sns + 1)])
            for m in range(len(self.battery_trace)):
                cost = 0.0 if m == 0 else self.cost_trace[m - 1]
                writer.writerow([m, f"{cost:.12g}", f"{self.battery_trace[m]:.12g}"]
                                + [f"{a:.12g}" for a in self.aoi_trace[m]])


@dataclass(frozen=True)
class SolveResult:
    """What every solver returns: the plan, its replayed report, and the
    solver's own claimed cost (which must agree with the report)."""

    schedule: Schedule
    report: RunReport
    cost: float


class ReplayError(ValueError):
    """A schedule broke a hard rule during replay (energy, horizon, charging)."""


def interval_cost(ages: Sequence[float], slots: int, fns: Sequence, slot_len: float) -> float:
    """Cost accrued while every SN ages ``slots`` slots with no delivery.

    Returns sum over SNs s of sum over i = 1..slots of f_s(ages[s] + i * slot_len).
    """
    if slots < 0:
        raise ValueError("slots must be >= 0")
    total = 0.0
    for a0, fn in zip(ages, fns):
        for i in range(1, slots + 1):
            total += fn(a0 + i * slot_len)
    return total

def delivery_cost(ages: Sequence[float], travel_slots: int, post_ages: Sequence[float],
                  fns: Sequence, slot_len: float) -> float:
    """Cost of a return flight ending in a delivery.

    Ages grow for the first travel_slots - 1 slots; the arrival slot is
    charged at the post-delivery ages instead.
    """
    if travel_slots < 1:
        raise ValueError("travel_slots must be >= 1")
    total = 0.0
    for a0, a1, fn in zip(ages, post_ages, fns):
        for i in range(1, travel_slots):
            total += fn(a0 + i * slot_len)
        total += fn(a1)
    return total


def replay(schedule: Schedule, instance: Instance, table: CostTable | None = None) -> RunReport:
    """Simulate a schedule slot by slot and account its cost independently.

    Flights debit their full energy at departure; a BS arrival first resets
    the delivered timestamps to the onboard ones, then charges the arrival
    slot at the post-delivery ages. Trailing slots after the last action
    accrue aging cost with no moves.
    """
    problems = schedule.check(instance)
    if problems:
        raise ReplayError("; ".join(problems))
    if table is None:
        table = CostTable(instance)

    s = instance.num_sns
    n_slots = instance.horizon_slots
    tau = instance.slot_len
    t = instance.travel_slots
    e = instance.travel_energy
    cap = instance.battery_capacity

    loc = 0
    slot = 0
    battery = cap
    delivered = [0] * s
    collected = [0] * s
    cost = 0.0
    cost_trace = []
    battery_trace = [battery]
    aoi_trace = [tuple(0.0 for _ in range(s))]
    deliveries = []

    def charge_slot(m: int, level: float) -> None:
        nonlocal cost
        step = sum(row[m - delivered[k]] for k, row in enumerate(table.rows))
        cost += step
        cost_trace.append(step)
        battery_trace.append(level)
        aoi_trace.append(tuple((m - u) * tau for u in delivered))

    for action in schedule.actions:
        if isinstance(action, Fly):
            duration = t[action.origin][action.target]
            energy = e[action.origin][action.target]
            if slot + duration > n_slots:
                raise ReplayError(f"flight to {action.target} ends past slot {n_slots}")
            if energy > battery:
                raise ReplayError(
                    f"battery underflow flying {action.origin}->{action.target} at slot {slot}"
                )
            battery -= energy
            arrival = slot + duration
            for i in range(1, duration + 1):
                if action.target == 0 and i == duration:
                    for k in range(s):
                        if collected[k] != delivered[k]:
                            deliveries.append(DeliveryEvent(arrival, k + 1, collected[k]))
                    delivered = list(collected)
                charge_slot(slot + i, battery)
            if action.target != 0:
                collected[action.target - 1] = arrival
            loc = action.target
            slot = arrival
        else:
            if action.slots < instance.recharge.min_slots:
                raise ReplayError(
                    f"charge of {action.slots} slots is below the minimum stay "
                    f"{instance.recharge.min_slots}"
                )
            if slot + action.slots > n_slots:
                raise ReplayError(f"charge ends past slot {n_slots}")
            for i in range(1, action.slots + 1):
                level = min(battery + instance.recharge.rate_per_slot * i, cap)
                charge_slot(slot + i, level)
            battery = min(battery + instance.recharge.rate_per_slot * action.slots, cap)
            slot += action.slots

    for m in range(slot + 1, n_slots + 1):
        charge_slot(m, battery)

    return RunReport(
        cumulative_cost=cost,
        normalized_cost=cost / (s * n_slots),
        cost_trace=tuple(cost_trace),
        battery_trace=tuple(battery_trace),
        aoi_trace=tuple(aoi_trace),
        deliveries=tuple(deliveries),
    )
