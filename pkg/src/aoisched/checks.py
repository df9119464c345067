"""Verification harness shared by the CLI ``verify`` command and the test suite.

Each check builds its own instances, exercises the solvers, and returns a
:class:`CheckResult`; nothing here depends on pytest. Counts and
tolerances default to the values the acceptance suite runs at.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass

from . import dominance
from .aoi import CostTable, replay
from .greedy import greedy_solve
from .instances import has_hamiltonian_path, random_instance, reduction_instance
from .labeling import solve as gla_solve
from .model import (
    Charge,
    ExponentialCost,
    Fly,
    Instance,
    LinearCost,
    PiecewiseLinearCost,
    QuadraticCost,
    StepCost,
    validate,
)
from .oracle import oracle_solve, zero_cost_feasible
from .symmetric import SymmetricInstance, optimal_policy, sequence_cost, trip_cost

__all__ = [
    "CheckResult",
    "small_ensemble",
    "benchmark_ensemble",
    "check_oracle_equivalence",
    "check_bs_dominance_soundness",
    "check_symmetric_policy",
    "check_trip_gap_sign",
    "check_reduction_equivalence",
    "check_solver_comparison",
    "check_capacity_trend",
    "check_replay_consistency",
    "check_capacity_invariant",
    "run_all",
]

REPLAY_TOL = 1e-9
ORACLE_TOL = 1e-9
SYMMETRIC_REL_TOL = 1e-8
GAP_REL_TOL = 1e-8
MIN_IMPROVEMENT = 0.05


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    replay_max_dev: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.detail}"


# ---------------------------------------------------------------------------
# Instance ensembles
# ---------------------------------------------------------------------------


def small_ensemble(count: int, base_seed: int = 0, max_sns: int = 3,
                   max_slots: int = 12, radius_m: float = 2500.0) -> list[Instance]:
    """Deterministic stream of small valid instances for oracle-scale checks."""
    out = []
    seed = base_seed
    while len(out) < count:
        s = 1 + seed % max_sns
        n = max_slots - 4 + seed % 5
        inst = random_instance(seed, s, n, radius_m=radius_m)
        seed += 1
        if not validate(inst):
            out.append(inst)
    return out


def benchmark_ensemble(seeds: int = 20, num_sns: int = 20, horizon_slots: int = 100,
                       capacities: tuple = (1, 10)) -> list[dict]:
    """Solve every seed with greedy and with the labeling solver at each
    capacity, recording normalized costs, wall-clock runtimes, and the
    gap between claimed and replayed cost."""
    rows = []
    for seed in range(seeds):
        inst = random_instance(seed, num_sns, horizon_slots)
        t0 = time.perf_counter()
        res = greedy_solve(inst)
        elapsed = time.perf_counter() - t0
        rows.append({
            "seed": seed, "algo": "greedy", "capacity": None,
            "normalized_cost": res.report.normalized_cost,
            "runtime_s": elapsed,
            "replay_dev": abs(res.cost - res.report.cumulative_cost),
        })
        for capacity in capacities:
            t0 = time.perf_counter()
            res = gla_solve(inst, capacity=capacity)
            elapsed = time.perf_counter() - t0
            rows.append({
                "seed": seed, "algo": f"gla_k{capacity}", "capacity": capacity,
                "normalized_cost": res.report.normalized_cost,
                "runtime_s": elapsed,
                "replay_dev": abs(res.cost - res.report.cumulative_cost),
            })
    return rows


# ---------------------------------------------------------------------------
# Oracle equivalence and bounds
# ---------------------------------------------------------------------------


def check_oracle_equivalence(count: int = 50) -> CheckResult:
    """Unbounded-capacity labeling must reproduce the oracle optimum exactly;
    bounded capacities and greedy must never beat it."""
    t0 = time.perf_counter()
    worst = 0.0
    below = 0
    replay_dev = 0.0
    for inst in small_ensemble(count):
        orc = oracle_solve(inst)
        unbounded = gla_solve(inst, capacity=None)
        worst = max(worst, abs(orc.cost - unbounded.cost))
        for res in (orc, unbounded, gla_solve(inst, capacity=1), greedy_solve(inst)):
            replay_dev = max(replay_dev, abs(res.cost - res.report.cumulative_cost))
            if res.cost < orc.cost - ORACLE_TOL:
                below += 1
    elapsed = time.perf_counter() - t0
    passed = worst <= ORACLE_TOL and below == 0 and elapsed < 60.0
    return CheckResult(
        "oracle equivalence",
        passed,
        f"{count} instances, max |oracle - unbounded| = {worst:.2e}, "
        f"{below} results below optimum, {elapsed:.1f}s",
        replay_max_dev=replay_dev,
    )


# ---------------------------------------------------------------------------
# Dominance soundness at BS cells
# ---------------------------------------------------------------------------


def _play_suffix(instance: Instance, table: CostTable, label, actions) -> float | None:
    """Total horizon cost of extending a BS label by an action sequence;
    None when the sequence is infeasible from that label's state."""
    n = instance.horizon_slots
    t = instance.travel_slots
    e = instance.travel_energy
    cap = instance.battery_capacity
    loc, slot = label.loc, label.slot
    battery = label.battery
    collected = list(label.collected)
    delivered = [slot - a for a in label.age]
    visited = set(label.visited)
    cost = label.cost
    for action in actions:
        ages = tuple(slot - u for u in delivered)
        if isinstance(action, Charge):
            if loc != 0 or action.slots < instance.recharge.min_slots or slot + action.slots > n:
                return None
            cost = table.aging_run(cost, ages, action.slots)
            battery = min(battery + instance.recharge.rate_per_slot * action.slots, cap)
            slot += action.slots
        else:
            target = action.target
            duration = t[loc][target]
            if slot + duration > n or e[loc][target] > battery:
                return None
            if target == 0:
                cost = table.aging_run(cost, ages, duration - 1)
                cost += table.delivered_step(slot + duration, collected)
                delivered = list(collected)
                visited.clear()
            else:
                if target in visited or target == loc:
                    return None
                cost = table.aging_run(cost, ages, duration)
                collected[target - 1] = slot + duration
                visited.add(target)
            battery -= e[loc][target]
            slot += duration
            loc = target
    if loc != 0:
        return None
    ages = tuple(slot - u for u in delivered)
    return table.aging_run(cost, ages, n - slot)


def _enumerate_suffixes(instance: Instance, label):
    """Every action sequence that the label's state can execute and that ends
    back at the BS, using the solvers' transition model."""
    n = instance.horizon_slots
    t = instance.travel_slots
    e = instance.travel_energy
    cap = instance.battery_capacity
    rate = instance.recharge.rate_per_slot
    w_min = instance.recharge.min_slots
    s = instance.num_sns
    out = []

    def walk(loc, slot, battery, visited, prefix):
        if loc == 0:
            out.append(tuple(prefix))
            for w in range(w_min, n - slot + 1):
                walk(0, slot + w, min(battery + rate * w, cap), frozenset(),
                     prefix + [Charge(slots=w, start_slot=slot)])
        else:
            if slot + t[loc][0] <= n and e[loc][0] <= battery:
                walk(0, slot + t[loc][0], battery - e[loc][0], frozenset(),
                     prefix + [Fly(origin=loc, target=0, depart_slot=slot)])
        for target in range(1, s + 1):
            if target in visited or target == loc:
                continue
            if slot + t[loc][target] + t[target][0] > n:
                continue
            if e[loc][target] + e[target][0] > battery:
                continue
            walk(target, slot + t[loc][target], battery - e[loc][target],
                 visited | {target}, prefix + [Fly(origin=loc, target=target, depart_slot=slot)])

    walk(label.loc, label.slot, label.battery, frozenset(label.visited), [])
    return out


def check_bs_dominance_soundness(count: int = 20) -> CheckResult:
    """Whenever a label at a BS cell is discarded in favor of a dominator,
    extending both by the same suffix must never favor the discarded one."""
    t0 = time.perf_counter()
    pairs = 0
    suffixes_checked = 0
    violations = 0
    for inst in small_ensemble(count, max_slots=10):
        table = CostTable(inst)
        res = gla_solve(inst, capacity=None, record_events=True)
        for verdict in res.store.events:
            if verdict.candidate.loc != 0:
                continue
            if verdict.outcome == "discarded-dominated":
                matchups = [(verdict.candidate, verdict.dominated_by)]
            elif verdict.removed:
                matchups = [(loser, verdict.candidate) for loser in verdict.removed]
            else:
                continue
            for loser, winner in matchups:
                pairs += 1
                for suffix in _enumerate_suffixes(inst, loser):
                    suffixes_checked += 1
                    loser_total = _play_suffix(inst, table, loser, suffix)
                    winner_total = _play_suffix(inst, table, winner, suffix)
                    if winner_total is None or winner_total > loser_total + REPLAY_TOL:
                        violations += 1
    elapsed = time.perf_counter() - t0
    return CheckResult(
        "dominance soundness at BS cells",
        violations == 0 and pairs > 0,
        f"{count} instances, {pairs} removal pairs, {suffixes_checked} suffixes, "
        f"{violations} violations, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# Symmetric-case checks
# ---------------------------------------------------------------------------


def random_monotone_cost(rng: random.Random):
    kind = rng.choice(["linear", "quadratic", "exponential", "step", "piecewise"])
    if kind == "linear":
        return LinearCost(rng.uniform(0.1, 3.0))
    if kind == "quadratic":
        return QuadraticCost(rng.uniform(0.01, 0.5))
    if kind == "exponential":
        return ExponentialCost(rng.uniform(0.1, 1.0), rng.uniform(0.01, 0.2))
    if kind == "step":
        low = rng.uniform(0.0, 1.0)
        return StepCost(rng.uniform(1.0, 25.0), low, low + rng.uniform(0.5, 30.0))
    xs, y = 0.0, rng.uniform(0.0, 1.0)
    pts = [(xs, y)]
    for _ in range(rng.randint(1, 3)):
        xs += rng.uniform(1.0, 15.0)
        y += rng.uniform(0.0, 10.0)
        pts.append((xs, y))
    return PiecewiseLinearCost(tuple(pts))


def random_symmetric_instance(rng: random.Random, max_sns: int = 4,
                              max_trips: int = 6) -> SymmetricInstance:
    s = rng.randint(1, max_sns)
    trips = rng.randint(1, max_trips)
    radius = rng.uniform(0.5, 3.0)
    recharge = rng.uniform(0.0, radius)
    departures = [rng.uniform(0.0, 4.0)]
    for _ in range(trips - 1):
        departures.append(departures[-1] + 2 * radius + recharge + rng.uniform(0.0, 3 * radius))
    end = departures[-1] + 2 * radius + rng.uniform(0.0, 3 * radius)
    return SymmetricInstance(
        num_sns=s,
        radius=radius,
        cost_fn=random_monotone_cost(rng),
        departures=tuple(departures),
        end_time=end,
        initial_ages=tuple(rng.uniform(0.0, 10.0) for _ in range(s)),
        recharge_time=recharge,
    )


class _CachedIntegralFn:
    """Memoizes integrate calls; sequence enumeration revisits the same
    bounds thousands of times."""

    def __init__(self, fn):
        self._fn = fn
        self._memo = {}

    def __call__(self, x):
        return self._fn(x)

    def integrate(self, lo, hi):
        key = (lo, hi)
        value = self._memo.get(key)
        if value is None:
            value = self._fn.integrate(lo, hi)
            self._memo[key] = value
        return value


def exhaustive_min_sequence(instance: SymmetricInstance) -> tuple[float, tuple]:
    """Minimum total cost over every possible visit sequence."""
    import dataclasses

    cached = dataclasses.replace(instance, cost_fn=_CachedIntegralFn(instance.cost_fn))
    best_cost, best_visits = None, None
    for visits in itertools.product(range(1, instance.num_sns + 1), repeat=instance.num_trips):
        cost = sequence_cost(cached, visits)
        if best_cost is None or cost < best_cost:
            best_cost, best_visits = cost, visits
    return best_cost, best_visits


def check_symmetric_policy(count: int = 100, seed: int = 7) -> CheckResult:
    """The oldest-first policy must match the exhaustive minimum over all
    visit sequences on random symmetric instances."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    worst_rel = 0.0
    failures = 0
    for _ in range(count):
        inst = random_symmetric_instance(rng)
        policy = optimal_policy(inst)
        best_cost, _ = exhaustive_min_sequence(inst)
        scale = max(1.0, abs(best_cost))
        rel = (policy.total_cost - best_cost) / scale
        worst_rel = max(worst_rel, rel)
        if rel > SYMMETRIC_REL_TOL:
            failures += 1
    elapsed = time.perf_counter() - t0
    return CheckResult(
        "symmetric policy optimality",
        failures == 0,
        f"{count} instances, worst relative excess {worst_rel:.2e}, "
        f"{failures} failures, {elapsed:.1f}s",
    )


def check_trip_gap_sign(count: int = 1000, seed: int = 11) -> CheckResult:
    """Serving the oldest SN in a window never costs more than serving any
    other; checked both through the window costs and through the reduced
    two-integral gap they collapse to."""
    rng = random.Random(seed)
    worst_gap = -math.inf
    worst_mismatch = 0.0
    failures = 0
    for _ in range(count):
        s = rng.randint(2, 5)
        fn = random_monotone_cost(rng)
        radius = rng.uniform(0.5, 3.0)
        duration = 2 * radius + rng.uniform(0.0, 6 * radius)
        ages = tuple(rng.uniform(0.0, 20.0) for _ in range(s))
        oldest = max(range(1, s + 1), key=lambda k: (ages[k - 1], -k))
        other = rng.randint(1, s)
        h_oldest = trip_cost(oldest, ages, duration, radius, fn)
        h_other = trip_cost(other, ages, duration, radius, fn)
        gap = h_oldest - h_other
        reduced = (
            fn.integrate(ages[other - 1] + 2 * radius, ages[other - 1] + duration)
            - fn.integrate(ages[oldest - 1] + 2 * radius, ages[oldest - 1] + duration)
        ) / duration
        scale = max(1.0, abs(h_oldest), abs(h_other))
        worst_gap = max(worst_gap, gap / scale)
        worst_mismatch = max(worst_mismatch, abs(gap - reduced) / scale)
        if gap / scale > GAP_REL_TOL or abs(gap - reduced) / scale > GAP_REL_TOL:
            failures += 1
    return CheckResult(
        "oldest-first trip advantage",
        failures == 0,
        f"{count} draws, worst relative gap {worst_gap:.2e}, "
        f"worst reduced-form mismatch {worst_mismatch:.2e}, {failures} failures",
    )


# ---------------------------------------------------------------------------
# Hardness-gadget equivalence
# ---------------------------------------------------------------------------


def four_node_graph_classes() -> list[tuple]:
    """One representative edge set per isomorphism class of simple graphs on
    4 nodes (there are 11)."""
    all_edges = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    perms = list(itertools.permutations(range(1, 5)))
    seen = {}
    for bits in range(64):
        edges = frozenset(e for k, e in enumerate(all_edges) if bits >> k & 1)
        canon = min(
            tuple(sorted(tuple(sorted((p[a - 1], p[b - 1]))) for a, b in edges))
            for p in perms
        )
        seen.setdefault(canon, edges)
    return [tuple(sorted(e)) for e in seen.values()]


def check_reduction_equivalence() -> CheckResult:
    """Over every simple graph on 4 nodes, the gadget instance has a
    zero-cost schedule exactly when the graph has a Hamiltonian path."""
    t0 = time.perf_counter()
    classes = four_node_graph_classes()
    mismatches = 0
    for edges in classes:
        inst = reduction_instance(4, edges)
        sched_zero = zero_cost_feasible(inst)
        ham = has_hamiltonian_path(4, edges)
        if sched_zero != ham:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    return CheckResult(
        "hardness gadget equivalence",
        mismatches == 0 and len(classes) == 11,
        f"{len(classes)} graph classes, {mismatches} mismatches, {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# Benchmark trends
# ---------------------------------------------------------------------------


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def check_solver_comparison(rows: list[dict]) -> CheckResult:
    """At unit capacity the labeling solver's ensemble mean must beat greedy
    by at least MIN_IMPROVEMENT."""
    gla = _mean(r["normalized_cost"] for r in rows if r["algo"] == "gla_k1")
    greedy = _mean(r["normalized_cost"] for r in rows if r["algo"] == "greedy")
    improvement = (greedy - gla) / greedy
    dev = max(r["replay_dev"] for r in rows)
    return CheckResult(
        "labeling beats greedy",
        gla < greedy and improvement >= MIN_IMPROVEMENT,
        f"mean normalized cost {gla:.3f} vs {greedy:.3f}, improvement {improvement * 100:.1f}%",
        replay_max_dev=dev,
    )


def check_capacity_trend(rows: list[dict]) -> CheckResult:
    """More labels per cell must not hurt the ensemble mean and must cost
    strictly more time."""
    cost1 = _mean(r["normalized_cost"] for r in rows if r["algo"] == "gla_k1")
    cost10 = _mean(r["normalized_cost"] for r in rows if r["algo"] == "gla_k10")
    time1 = _mean(r["runtime_s"] for r in rows if r["algo"] == "gla_k1")
    time10 = _mean(r["runtime_s"] for r in rows if r["algo"] == "gla_k10")
    return CheckResult(
        "capacity trend",
        cost10 <= cost1 and time10 > time1,
        f"mean cost {cost10:.3f} (k=10) vs {cost1:.3f} (k=1); "
        f"mean time {time10 * 1000:.0f}ms vs {time1 * 1000:.0f}ms",
    )


def check_replay_consistency(extra_devs: list[float] | None = None,
                             count: int = 10) -> CheckResult:
    """Every solver's claimed cost must equal the replayed cost of its
    schedule, here and in every other check that solved anything."""
    dev = max(extra_devs or [0.0])
    for inst in small_ensemble(count, base_seed=100):
        for res in (
            oracle_solve(inst),
            gla_solve(inst, capacity=None),
            gla_solve(inst, capacity=1),
            gla_solve(inst, capacity=3),
            greedy_solve(inst),
        ):
            dev = max(dev, abs(res.cost - res.report.cumulative_cost))
            fresh = replay(res.schedule, inst)
            dev = max(dev, abs(res.cost - fresh.cumulative_cost))
    return CheckResult(
        "replay consistency",
        dev <= REPLAY_TOL,
        f"max |claimed - replayed| = {dev:.2e}",
        replay_max_dev=dev,
    )


def check_capacity_invariant(seeds: int = 3, num_sns: int = 20,
                             horizon_slots: int = 100) -> CheckResult:
    """No cell may ever exceed its capacity, and no stored pair may sit in a
    domination relation after the run."""
    worst_len = 0
    dominated_pairs = 0
    cells_scanned = 0
    for seed in range(seeds):
        inst = random_instance(seed, num_sns, horizon_slots)
        for capacity in (1, 10):
            res = gla_solve(inst, capacity=capacity)
            worst_len = max(worst_len, res.store.max_cell_len - capacity)
            for loc_cells in res.store.cells:
                for cell in loc_cells:
                    cells_scanned += 1
                    for a, b in itertools.combinations(cell, 2):
                        if dominance.dominates(a, b) or dominance.dominates(b, a):
                            dominated_pairs += 1
    for inst in small_ensemble(4, base_seed=50, max_slots=10):
        res = gla_solve(inst, capacity=None)
        for loc_cells in res.store.cells:
            for cell in loc_cells:
                cells_scanned += 1
                for a, b in itertools.combinations(cell, 2):
                    if dominance.dominates(a, b) or dominance.dominates(b, a):
                        dominated_pairs += 1
    return CheckResult(
        "label store invariants",
        worst_len <= 0 and dominated_pairs == 0,
        f"{cells_scanned} cells scanned, capacity excess {max(worst_len, 0)}, "
        f"{dominated_pairs} dominated pairs stored",
    )


def run_all(quick: bool = False) -> list[CheckResult]:
    """Run every check; ``quick`` shrinks the ensembles for a fast smoke pass."""
    scale = 0.2 if quick else 1.0
    results = [
        check_oracle_equivalence(count=max(5, int(50 * scale))),
        check_bs_dominance_soundness(count=max(3, int(20 * scale))),
        check_symmetric_policy(count=max(10, int(100 * scale))),
        check_trip_gap_sign(count=max(100, int(1000 * scale))),
        check_reduction_equivalence(),
    ]
    rows = benchmark_ensemble(seeds=max(3, int(20 * scale)))
    results.append(check_solver_comparison(rows))
    results.append(check_capacity_trend(rows))
    devs = [r.replay_max_dev for r in results] + [max(r["replay_dev"] for r in rows)]
    results.append(check_replay_consistency(devs, count=max(3, int(10 * scale))))
    results.append(check_capacity_invariant(seeds=1 if quick else 3))
    return results
