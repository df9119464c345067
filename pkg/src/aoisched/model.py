"""Problem instances for AoI-aware UAV data collection scheduling.

Everything is slot based: the horizon is ``horizon_slots`` slots of
``slot_len`` minutes each, location 0 is the base station (BS) and the
sensor nodes (SNs) are numbered 1..S. Travel times are stored already
quantized to slot units so that every solver works on one integer
timeline; travel energies stay continuous. Instances, cost functions and
the recharge model are immutable after construction and safe to share
across parallel workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from scipy.integrate import quad as _scipy_quad

__all__ = [
    "CostFn",
    "LinearCost",
    "QuadraticCost",
    "ExponentialCost",
    "StepCost",
    "PiecewiseLinearCost",
    "cost_fn_from_dict",
    "RechargeSpec",
    "Instance",
    "Fly",
    "Charge",
    "Schedule",
    "action_sort_key",
    "quantize",
    "validate",
    "instance_to_dict",
    "instance_from_dict",
    "load_instance",
    "save_instance",
]


# ---------------------------------------------------------------------------
# AoI cost functions
# ---------------------------------------------------------------------------


class CostFn:
    """A per-SN cost of information age.

    Implementations must be non-decreasing and non-negative on x >= 0;
    constructors reject parameters that would violate this.
    """

    kind = "abstract"

    def __call__(self, x: float) -> float:
        raise NotImplementedError

    def integrate(self, lo: float, hi: float) -> float:
        """Integral of the cost over [lo, hi].

        Linear and quadratic costs use the closed form; the other kinds
        fall back to adaptive quadrature with relative error <= 1e-8.
        """
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _quad(fn, lo: float, hi: float, interior: Sequence[float] = ()) -> float:
    if hi < lo:
        raise ValueError(f"integration bounds reversed: [{lo}, {hi}]")
    if hi == lo:
        return 0.0
    pts = [p for p in interior if lo < p < hi]
    value, _ = _scipy_quad(fn, lo, hi, points=pts or None, limit=200, epsrel=1e-9)
    return value


@dataclass(frozen=True)
class LinearCost(CostFn):
    """f(x) = alpha * x."""

    alpha: float
    kind = "linear"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("linear cost needs alpha >= 0")

    def __call__(self, x: float) -> float:
        return self.alpha * x

    def integrate(self, lo: float, hi: float) -> float:
        if hi < lo:
            raise ValueError(f"integration bounds reversed: [{lo}, {hi}]")
        return self.alpha * (hi * hi - lo * lo) / 2.0

    def to_dict(self) -> dict:
        return {"kind": "linear", "alpha": self.alpha}


@dataclass(frozen=True)
class QuadraticCost(CostFn):
    """f(x) = alpha * x^2."""

    alpha: float
    kind = "quadratic"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("quadratic cost needs alpha >= 0")

    def __call__(self, x: float) -> float:
        return self.alpha * x * x

    def integrate(self, lo: float, hi: float) -> float:
        if hi < lo:
            raise ValueError(f"integration bounds reversed: [{lo}, {hi}]")
        return self.alpha * (hi ** 3 - lo ** 3) / 3.0

    def to_dict(self) -> dict:
        return {"kind": "quadratic", "alpha": self.alpha}


@dataclass(frozen=True)
class ExponentialCost(CostFn):
    """f(x) = alpha * (exp(beta * x) - 1)."""

    alpha: float
    beta: float
    kind = "exponential"

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("exponential cost needs alpha >= 0 and beta >= 0")

    def __call__(self, x: float) -> float:
        return self.alpha * (math.exp(self.beta * x) - 1.0)

    def integrate(self, lo: float, hi: float) -> float:
        return _quad(self, lo, hi)

    def to_dict(self) -> dict:
        return {"kind": "exponential", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class StepCost(CostFn):
    """f(x) = low for x <= threshold, high otherwise."""

    threshold: float
    low: float
    high: float
    kind = "step"

    def __post_init__(self):
        if not 0 <= self.low <= self.high:
            raise ValueError("step cost needs 0 <= low <= high")

    def __call__(self, x: float) -> float:
        return self.low if x <= self.threshold else self.high

    def integrate(self, lo: float, hi: float) -> float:
        return _quad(self, lo, hi, interior=(self.threshold,))

    def to_dict(self) -> dict:
        return {
            "kind": "step",
            "threshold": self.threshold,
            "low": self.low,
            "high": self.high,
        }


@dataclass(frozen=True)
class PiecewiseLinearCost(CostFn):
    """Linear interpolation through (x, y) breakpoints.

    Constant at y[0] left of the first breakpoint; beyond the last one the
    final segment's slope continues. Breakpoints must have strictly
    increasing x and non-decreasing, non-negative y.
    """

    breakpoints: tuple
    kind = "piecewise_linear"

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.breakpoints)
        if not pts:
            raise ValueError("piecewise linear cost needs at least one breakpoint")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x values must be strictly increasing")
        if any(b < a for a, b in zip(ys, ys[1:])) or ys[0] < 0:
            raise ValueError("breakpoint y values must be non-negative and non-decreasing")
        object.__setattr__(self, "breakpoints", pts)

    def __call__(self, x: float) -> float:
        pts = self.breakpoints
        if x <= pts[0][0]:
            return pts[0][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        if len(pts) == 1:
            return pts[0][1]
        (x0, y0), (x1, y1) = pts[-2], pts[-1]
        slope = (y1 - y0) / (x1 - x0)
        return y1 + slope * (x - x1)

    def integrate(self, lo: float, hi: float) -> float:
        return _quad(self, lo, hi, interior=[p[0] for p in self.breakpoints])

    def to_dict(self) -> dict:
        return {"kind": "piecewise_linear", "breakpoints": [list(p) for p in self.breakpoints]}


_COST_KINDS = {
    "linear": lambda d: LinearCost(float(d["alpha"])),
    "quadratic": lambda d: QuadraticCost(float(d["alpha"])),
    "exponential": lambda d: ExponentialCost(float(d["alpha"]), float(d["beta"])),
    "step": lambda d: StepCost(float(d["threshold"]), float(d["low"]), float(d["high"])),
    "piecewise_linear": lambda d: PiecewiseLinearCost(tuple(map(tuple, d["breakpoints"]))),
}


def cost_fn_from_dict(d: dict) -> CostFn:
    try:
        builder = _COST_KINDS[d["kind"]]
    except KeyError:
        raise ValueError(f"unknown cost function kind: {d.get('kind')!r}") from None
    return builder(d)


# ---------------------------------------------------------------------------
# Recharging
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RechargeSpec:
    """Linear charging at ``rate_per_slot`` with a minimum stay of ``min_slots``.

    A stay of w >= min_slots slots raises the battery to
    min(current + rate_per_slot * w, capacity); shorter stays at the BS are
    not valid charge actions.
    """

    rate_per_slot: float
    min_slots: int = 1

    def __post_init__(self):
        if self.rate_per_slot < 0:
            raise ValueError("recharge rate must be >= 0")
        if self.min_slots < 1:
            raise ValueError("min_slots must be >= 1")

    def after(self, current: float, slots: int, capacity: float) -> float:
        """Battery level after charging ``slots`` slots from ``current``."""
        if slots < self.min_slots:
            raise ValueError(f"charge stay of {slots} slots is below the minimum {self.min_slots}")
        return min(current + self.rate_per_slot * slots, capacity)


# ---------------------------------------------------------------------------
# Instance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    """One scheduling problem: locations, slotted travel data, battery, costs.

    ``travel_slots[i][j]`` is the whole number of slots a flight i -> j
    takes (0 on the diagonal, which is never used as a move);
    ``travel_energy[i][j]`` is its energy draw. Index 0 is the BS.
    ``coords`` optionally carries the generator's continuous (x, y)
    placements for reproducibility audits.
    """

    num_sns: int
    horizon_slots: int
    slot_len: float
    travel_slots: tuple
    travel_energy: tuple
    battery_capacity: float
    recharge: RechargeSpec
    cost_fns: tuple
    coords: tuple | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "travel_slots", tuple(tuple(int(v) for v in row) for row in self.travel_slots)
        )
        object.__setattr__(
            self, "travel_energy", tuple(tuple(float(v) for v in row) for row in self.travel_energy)
        )
        object.__setattr__(self, "cost_fns", tuple(self.cost_fns))
        if self.coords is not None:
            object.__setattr__(self, "coords", tuple((float(x), float(y)) for x, y in self.coords))

    @property
    def horizon_minutes(self) -> float:
        return self.horizon_slots * self.slot_len


def quantize(travel_minutes: Sequence[Sequence[float]], slot_len: float) -> tuple:
    """Round a travel-time matrix in minutes up to whole slots.

    Entries within 1e-9 of an exact slot boundary snap down instead of
    picking up a spurious extra slot from float division noise.
    """
    if slot_len <= 0:
        raise ValueError("slot_len must be positive")
    out = []
    for row in travel_minutes:
        slots_row = []
        for minutes in row:
            if minutes < 0:
                raise ValueError("travel times must be non-negative")
            slots_row.append(max(0, math.ceil(minutes / slot_len - 1e-9)))
        out.append(tuple(slots_row))
    return tuple(out)


def validate(instance: Instance) -> list[str]:
    """Collect every invariant violation; an empty list means the instance is usable.

    Violations are data, not exceptions: callers that require a valid
    instance (the solvers) raise on a non-empty result.
    """
    v = []
    s = instance.num_sns
    n = instance.horizon_slots
    if s < 1:
        v.append("num_sns must be >= 1")
    if n < 1:
        v.append("horizon_slots must be >= 1")
    if instance.slot_len <= 0:
        v.append("slot_len must be positive")
    if instance.battery_capacity <= 0:
        v.append("battery_capacity must be positive")
    if len(instance.cost_fns) != s:
        v.append(f"expected {s} cost functions, got {len(instance.cost_fns)}")

    for name, matrix in (("travel_slots", instance.travel_slots), ("travel_energy", instance.travel_energy)):
        if len(matrix) != s + 1 or any(len(row) != s + 1 for row in matrix):
            v.append(f"{name} must be ({s + 1})x({s + 1})")
            continue
        for i, row in enumerate(matrix):
            for j, entry in enumerate(row):
                if i == j and entry != 0:
                    v.append(f"{name}[{i}][{i}] must be 0 (staying in place is not a move)")
                elif entry < 0:
                    v.append(f"{name}[{i}][{j}] is negative")
        if name == "travel_slots":
            for i, row in enumerate(matrix):
                for j, entry in enumerate(row):
                    if i != j and entry < 1:
                        v.append(f"travel_slots[{i}][{j}] must be >= 1 for distinct locations")
    if v:
        return v

    t = instance.travel_slots
    e = instance.travel_energy
    feasible = any(
        t[0][k] + t[k][0] <= n and e[0][k] + e[k][0] <= instance.battery_capacity
        for k in range(1, s + 1)
    )
    if not feasible:
        v.append("no feasible trip: no SN has a round trip within the horizon and battery")
    return v


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fly:
    """Depart ``origin`` at the start of ``depart_slot`` and fly to ``target``."""

    origin: int
    target: int
    depart_slot: int


@dataclass(frozen=True)
class Charge:
    """Stay at the BS for ``slots`` slots starting at ``start_slot``, recharging."""

    slots: int
    start_slot: int


def action_sort_key(action) -> tuple:
    """Deterministic ordering used for tie-breaks: flights before charges,
    flights by target index, charges by duration."""
    if isinstance(action, Fly):
        return (0, action.target)
    return (1, action.slots)


@dataclass(frozen=True)
class Schedule:
    """An executable plan: a contiguous action sequence from the BS back to the BS.

    Trailing slots after the last action are implicit idling at the BS.
    """

    actions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))

    def end_slot(self, instance: Instance) -> int:
        slot = 0
        for action in self.actions:
            if isinstance(action, Fly):
                slot += instance.travel_slots[action.origin][action.target]
            else:
                slot += action.slots
        return slot

    def check(self, instance: Instance) -> list[str]:
        """Structural violations: contiguity, locations, horizon. Battery and
        minimum-charge rules are enforced by replay."""
        v = []
        loc, slot = 0, 0
        s = instance.num_sns
        for idx, action in enumerate(self.actions):
            if isinstance(action, Fly):
                if action.depart_slot != slot:
                    v.append(f"action {idx}: departs at slot {action.depart_slot}, expected {slot}")
                if action.origin != loc:
                    v.append(f"action {idx}: flies from {action.origin} but the UAV is at {loc}")
                if not 0 <= action.target <= s or action.target == action.origin:
                    v.append(f"action {idx}: bad flight target {action.target}")
                    return v
                slot += instance.travel_slots[action.origin][action.target]
                loc = action.target
            elif isinstance(action, Charge):
                if action.start_slot != slot:
                    v.append(f"action {idx}: starts at slot {action.start_slot}, expected {slot}")
                if loc != 0:
                    v.append(f"action {idx}: charging away from the BS (at {loc})")
                if action.slots < 1:
                    v.append(f"action {idx}: charge of {action.slots} slots")
                slot += action.slots
            else:
                v.append(f"action {idx}: unknown action {action!r}")
                return v
        if loc != 0:
            v.append(f"schedule ends at location {loc}, must end at the BS")
        if slot > instance.horizon_slots:
            v.append(f"schedule ends at slot {slot}, beyond the horizon {instance.horizon_slots}")
        return v

    def sort_key(self) -> tuple:
        return tuple(action_sort_key(a) for a in self.actions)

    def to_dict(self) -> dict:
        out = []
        for action in self.actions:
            if isinstance(action, Fly):
                out.append({"type": "fly", "from": action.origin, "to": action.target,
                            "depart_slot": action.depart_slot})
            else:
                out.append({"type": "charge", "slots": action.slots, "start_slot": action.start_slot})
        return {"actions": out}

    @classmethod
    def from_dict(cls, d: dict) -> "Schedule":
        actions = []
        for entry in d["actions"]:
            if entry["type"] == "fly":
                actions.append(Fly(int(entry["from"]), int(entry["to"]), int(entry["depart_slot"])))
            elif entry["type"] == "charge":
                actions.append(Charge(int(entry["slots"]), int(entry["start_slot"])))
            else:
                raise ValueError(f"unknown action type {entry['type']!r}")
        return cls(tuple(actions))


# ---------------------------------------------------------------------------
# Instance (de)serialization
# ---------------------------------------------------------------------------


def instance_to_dict(instance: Instance) -> dict:
    d = {
        "num_sns": instance.num_sns,
        "slot_len_min": instance.slot_len,
        "horizon_slots": instance.horizon_slots,
        "travel_slots": [list(row) for row in instance.travel_slots],
        "travel_energy": [list(row) for row in instance.travel_energy],
        "battery_capacity": instance.battery_capacity,
        "recharge": {
            "rate_per_slot": instance.recharge.rate_per_slot,
            "min_slots": instance.recharge.min_slots,
        },
        "cost_fns": [fn.to_dict() for fn in instance.cost_fns],
    }
    if instance.coords is not None:
        d["coords"] = [list(p) for p in instance.coords]
    return d


def instance_from_dict(d: dict) -> Instance:
    return Instance(
        num_sns=int(d["num_sns"]),
        horizon_slots=int(d["horizon_slots"]),
        slot_len=float(d["slot_len_min"]),
        travel_slots=d["travel_slots"],
        travel_energy=d["travel_energy"],
        battery_capacity=float(d["battery_capacity"]),
        recharge=RechargeSpec(
            rate_per_slot=float(d["recharge"]["rate_per_slot"]),
            min_slots=int(d["recharge"].get("min_slots", 1)),
        ),
        cost_fns=tuple(cost_fn_from_dict(c) for c in d["cost_fns"]),
        coords=tuple(map(tuple, d["coords"])) if "coords" in d else None,
    )


def load_instance(path) -> Instance:
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def save_instance(instance: Instance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")
