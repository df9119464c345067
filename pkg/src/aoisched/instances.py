"""Instance constructors: random disk layouts and the Hamiltonian-path gadget."""

from __future__ import annotations

import math
import random
from itertools import permutations
from typing import Iterable, Sequence

from .model import (
    ExponentialCost,
    Instance,
    LinearCost,
    QuadraticCost,
    RechargeSpec,
    StepCost,
    quantize,
)

__all__ = [
    "GeneratorError",
    "random_instance",
    "reduction_instance",
    "parse_edge_list",
    "has_hamiltonian_path",
]


class GeneratorError(RuntimeError):
    """Placement rejection sampling gave up."""


def _draw_cost_fn(rng: random.Random, kinds: Sequence[str]):
    kind = rng.choice(list(kinds))
    if kind == "linear":
        return LinearCost(rng.uniform(0.5, 2.0))
    if kind == "quadratic":
        return QuadraticCost(rng.uniform(0.01, 0.1))
    if kind == "exponential":
        return ExponentialCost(rng.uniform(0.1, 1.0), rng.uniform(0.01, 0.05))
    raise ValueError(f"unknown cost kind {kind!r}")


def random_instance(
    seed: int,
    num_sns: int,
    horizon_slots: int,
    slot_len: float = 1.0,
    radius_m: float = 5000.0,
    speed_m_per_min: float = 1200.0,
    battery_capacity: float = 25.0,
    recharge_minutes: float = 50.0,
    min_travel_min: float = 0.5,
    min_charge_slots: int = 1,
    kinds: Sequence[str] = ("linear", "quadratic", "exponential"),
    max_place_tries: int = 100_000,
) -> Instance:
    """Drop the BS at the center of a disk and the SNs uniformly inside it.

    Placements re-draw until every pair of locations is at least
    ``min_travel_min`` of flying apart. Travel energy is the flight time in
    minutes, so the battery is a flying-time budget; a full recharge takes
    ``recharge_minutes``. Each SN draws its cost function kind and
    parameters from fixed ranges. Deterministic per seed.
    """
    if num_sns < 1 or horizon_slots < 1:
        raise ValueError("num_sns and horizon_slots must be >= 1")
    rng = random.Random(seed)
    min_dist = min_travel_min * speed_m_per_min
    points = [(0.0, 0.0)]
    tries = 0
    while len(points) < num_sns + 1:
        tries += 1
        if tries > max_place_tries:
            raise GeneratorError(
                f"could not place {num_sns} SNs at pairwise distance >= {min_dist:.0f} m"
            )
        r = radius_m * math.sqrt(rng.random())
        theta = 2 * math.pi * rng.random()
        p = (r * math.cos(theta), r * math.sin(theta))
        if all(math.dist(p, q) >= min_dist for q in points):
            points.append(p)

    minutes = [
        [math.dist(a, b) / speed_m_per_min for b in points]
        for a in points
    ]
    return Instance(
        num_sns=num_sns,
        horizon_slots=horizon_slots,
        slot_len=slot_len,
        travel_slots=quantize(minutes, slot_len),
        travel_energy=minutes,
        battery_capacity=battery_capacity,
        recharge=RechargeSpec(
            rate_per_slot=battery_capacity * slot_len / recharge_minutes,
            min_slots=min_charge_slots,
        ),
        cost_fns=tuple(_draw_cost_fn(rng, kinds) for _ in range(num_sns)),
        coords=tuple(points),
    )


def reduction_instance(num_nodes: int, edges: Iterable[tuple], slot_len: float = 1.0) -> Instance:
    """Encode a Hamiltonian-path question as a scheduling instance.

    SNs joined by a graph edge are 4 slots apart, others 16, and the BS is
    8 slots from everyone, over a horizon of 4S + 14 slots. Every SN gets
    a step cost that is free up to an age of 4S + 13 slots and 100 beyond,
    so a zero-cost schedule exists exactly when the UAV can chain the
    graph's edges through every SN once and still get home in time. The
    battery is the sum of all pairwise energies, which no simple tour can
    exhaust.
    """
    if num_nodes < 2:
        raise ValueError("the reduction needs at least 2 nodes")
    edge_set = set()
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b or not (1 <= a <= num_nodes and 1 <= b <= num_nodes):
            raise ValueError(f"bad edge ({a}, {b}) for {num_nodes} nodes")
        edge_set.add((min(a, b), max(a, b)))

    s = num_nodes
    travel = [[0] * (s + 1) for _ in range(s + 1)]
    for i in range(1, s + 1):
        travel[0][i] = travel[i][0] = 8
        for j in range(i + 1, s + 1):
            hop = 4 if (i, j) in edge_set else 16
            travel[i][j] = travel[j][i] = hop
    energy = [[float(v) for v in row] for row in travel]
    battery = sum(energy[i][j] for i in range(s + 1) for j in range(i + 1, s + 1))

    horizon = 4 * s + 14
    threshold = (4 * s + 13) * slot_len
    return Instance(
        num_sns=s,
        horizon_slots=horizon,
        slot_len=slot_len,
        travel_slots=travel,
        travel_energy=energy,
        battery_capacity=battery,
        recharge=RechargeSpec(rate_per_slot=1.0, min_slots=1),
        cost_fns=tuple(StepCost(threshold, 0.0, 100.0) for _ in range(s)),
    )


def parse_edge_list(path) -> list[tuple[int, int]]:
    """Read one '<i> <j>' pair per line, 1-indexed; blank lines and lines
    starting with '#' are skipped."""
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
    return edges


def has_hamiltonian_path(num_nodes: int, edges: Iterable[tuple]) -> bool:
    """Permutation scan, independent of any scheduling machinery."""
    adjacent = set()
    for a, b in edges:
        adjacent.add((a, b))
        adjacent.add((b, a))
    if num_nodes == 1:
        return True
    return any(
        all((order[i], order[i + 1]) in adjacent for i in range(num_nodes - 1))
        for order in permutations(range(1, num_nodes + 1))
    )
