"""Continuous-time solver for the fully symmetric case.

All SNs sit at the same travel time ``radius`` from the BS and share one
cost function, so a plan is just a sequence of round trips at given
departure times. Costing is exact: each departure window integrates the
cost over every SN's age trajectory, and the optimal policy visits the
oldest SN each trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import CostFn, Instance, RechargeSpec

__all__ = [
    "SymmetricInstance",
    "PolicyResult",
    "trip_cost",
    "ages_after_trip",
    "sequence_cost",
    "optimal_policy",
    "to_slotted_instance",
]


@dataclass(frozen=True)
class SymmetricInstance:
    """Uniform-radius instance: trips of duration 2 * radius, departures fixed.

    Departure gaps must leave room for the trip plus ``recharge_time``;
    ``initial_ages`` are the per-SN ages at the first departure.
    """

    num_sns: int
    radius: float
    cost_fn: CostFn
    departures: tuple
    end_time: float
    initial_ages: tuple = ()
    recharge_time: float = 0.0

    def __post_init__(self):
        if self.num_sns < 1:
            raise ValueError("num_sns must be >= 1")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.recharge_time < 0:
            raise ValueError("recharge_time must be >= 0")
        departures = tuple(float(x) for x in self.departures)
        if not departures:
            raise ValueError("at least one departure is required")
        object.__setattr__(self, "departures", departures)
        gap = 2 * self.radius + self.recharge_time
        for a, b in zip(departures, departures[1:]):
            if b - a < gap - 1e-12:
                raise ValueError(f"departure gap {b - a} is below the minimum {gap}")
        if self.end_time - departures[-1] < 2 * self.radius - 1e-12:
            raise ValueError("the last trip does not fit before end_time")
        ages = tuple(float(a) for a in (self.initial_ages or (0.0,) * self.num_sns))
        if len(ages) != self.num_sns or any(a < 0 for a in ages):
            raise ValueError("initial_ages must hold one non-negative age per SN")
        object.__setattr__(self, "initial_ages", ages)

    @property
    def num_trips(self) -> int:
        return len(self.departures)

    def windows(self) -> list[float]:
        """Duration of each trip's costing window; they tile [t_1, end_time]."""
        times = list(self.departures) + [self.end_time]
        return [b - a for a, b in zip(times, times[1:])]


def trip_cost(visit_sn: int, ages: Sequence[float], duration: float,
              radius: float, fn: CostFn) -> float:
    """Average cost over one window in which SN ``visit_sn`` (1-based) is
    served by a round trip of length 2 * radius.

    Unvisited SNs age through the whole window; the visited one ages until
    its delivery, then restarts at ``radius`` and ages to the window's end.
    """
    if duration < 2 * radius - 1e-12:
        raise ValueError(f"window of {duration} cannot fit a trip of {2 * radius}")
    if not 1 <= visit_sn <= len(ages):
        raise ValueError(f"invalid SN {visit_sn}")
    total = 0.0
    for k, a0 in enumerate(ages):
        if k == visit_sn - 1:
            total += fn.integrate(a0, a0 + 2 * radius)
        else:
            total += fn.integrate(a0, a0 + duration)
    total += fn.integrate(radius, duration - radius)
    return total / duration


def ages_after_trip(ages: Sequence[float], visit_sn: int, duration: float,
                    radius: float) -> tuple:
    """Per-SN ages at the next departure, ``duration`` after this one."""
    out = []
    for k, a0 in enumerate(ages):
        if k == visit_sn - 1:
            out.append(duration - radius)
        else:
            out.append(a0 + duration)
    return tuple(out)


def sequence_cost(instance: SymmetricInstance, visits: Sequence[int]) -> float:
    """Total (window-weighted) cost of an arbitrary visit sequence."""
    if len(visits) != instance.num_trips:
        raise ValueError(f"expected {instance.num_trips} visits, got {len(visits)}")
    ages = instance.initial_ages
    total = 0.0
    for visit, duration in zip(visits, instance.windows()):
        total += duration * trip_cost(visit, ages, duration, instance.radius, instance.cost_fn)
        ages = ages_after_trip(ages, visit, duration, instance.radius)
    return total


@dataclass(frozen=True)
class PolicyResult:
    visits: tuple
    total_cost: float
    average_cost: float


def optimal_policy(instance: SymmetricInstance) -> PolicyResult:
    """Visit the SN with the largest age on every trip, lowest index on ties.

    With all-zero initial ages this degenerates to a round robin.
    """
    ages = instance.initial_ages
    visits = []
    total = 0.0
    for duration in instance.windows():
        oldest = max(range(1, instance.num_sns + 1), key=lambda k: (ages[k - 1], -k))
        visits.append(oldest)
        total += duration * trip_cost(oldest, ages, duration, instance.radius, instance.cost_fn)
        ages = ages_after_trip(ages, oldest, duration, instance.radius)
    span = instance.end_time - instance.departures[0]
    return PolicyResult(visits=tuple(visits), total_cost=total, average_cost=total / span)


def to_slotted_instance(instance: SymmetricInstance, slot_len: float = 1.0) -> Instance:
    """Discretize for cross-checks against the slotted solvers.

    Legs quantize up to whole slots, SN-to-SN hops go through twice the
    radius, the battery covers exactly one trip, and a full recharge takes
    ``recharge_time`` (one slot when instant).
    """
    import math

    s = instance.num_sns
    leg = max(1, math.ceil(instance.radius / slot_len - 1e-9))
    travel = [[0] * (s + 1) for _ in range(s + 1)]
    energy = [[0.0] * (s + 1) for _ in range(s + 1)]
    for i in range(s + 1):
        for j in range(s + 1):
            if i == j:
                continue
            hops = leg if (i == 0 or j == 0) else 2 * leg
            travel[i][j] = hops
            energy[i][j] = instance.radius if (i == 0 or j == 0) else 2 * instance.radius
    battery = 2 * instance.radius
    recharge_slots = max(1, math.ceil(instance.recharge_time / slot_len - 1e-9))
    horizon = max(1, math.ceil(instance.end_time / slot_len - 1e-9))
    return Instance(
        num_sns=s,
        horizon_slots=horizon,
        slot_len=slot_len,
        travel_slots=travel,
        travel_energy=energy,
        battery_capacity=battery,
        recharge=RechargeSpec(rate_per_slot=battery / recharge_slots, min_slots=1),
        cost_fns=tuple(instance.cost_fn for _ in range(s)),
    )
