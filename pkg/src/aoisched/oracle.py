"""Exhaustive enumeration of every feasible slotted schedule.

Ground truth for the other solvers on desk-size instances. The action
branching at every state matches the labeling solver's transition
generator move for move, but no state is ever merged, pruned, or
memoized, so a bookkeeping bug in the label abstraction cannot hide
here. A pruned variant answers only "does a zero-cost schedule exist?",
which keeps the hardness-gadget instances tractable.
"""

from __future__ import annotations

from .aoi import CostTable, SolveResult, replay
from .model import Charge, Fly, Instance, Schedule, validate

__all__ = ["OracleLimitError", "oracle_solve", "zero_cost_feasible"]

DEFAULT_MAX_SNS = 4
DEFAULT_MAX_SLOTS = 14


class OracleLimitError(ValueError):
    """The instance is too large for exhaustive enumeration."""


def oracle_solve(instance: Instance, max_sns: int = DEFAULT_MAX_SNS,
                 max_slots: int = DEFAULT_MAX_SLOTS) -> SolveResult:
    """Depth-first search over all feasible action sequences, each costed
    with the same per-slot accounting as replay; returns the cheapest
    schedule under the shared tie-breaking order."""
    problems = validate(instance)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(problems))
    if instance.num_sns > max_sns or instance.horizon_slots > max_slots:
        raise OracleLimitError(
            f"oracle limits exceeded: S={instance.num_sns} (max {max_sns}), "
            f"N={instance.horizon_slots} (max {max_slots})"
        )

    s = instance.num_sns
    n = instance.horizon_slots
    t = instance.travel_slots
    e = instance.travel_energy
    cap = instance.battery_capacity
    rate = instance.recharge.rate_per_slot
    w_min = instance.recharge.min_slots
    table = CostTable(instance)

    best: list = [None, None, None]  # total, key, actions

    def consider(cost: float, ages: tuple, slot: int, actions: tuple) -> None:
        total = table.aging_run(cost, ages, n - slot)
        if best[0] is not None and total > best[0]:
            return
        key = tuple(
            (0, a.target) if isinstance(a, Fly) else (1, a.slots) for a in actions
        )
        if best[0] is None or total < best[0] or (total == best[0] and key < best[1]):
            best[0], best[1], best[2] = total, key, actions

    def visit(loc: int, slot: int, battery: float, visited: frozenset,
              collected: tuple, ages: tuple, cost: float, actions: tuple) -> None:
        if loc == 0:
            consider(cost, ages, slot, actions)
            run_cost = cost
            for w in range(1, n - slot + 1):
                run_cost += table.aging_step(ages, w)
                if w < w_min:
                    continue
                visit(
                    0, slot + w, min(battery + rate * w, cap), frozenset(),
                    collected, tuple(a + w for a in ages), run_cost,
                    actions + (Charge(slots=w, start_slot=slot),),
                )
        else:
            duration = t[loc][0]
            if slot + duration <= n and e[loc][0] <= battery:
                arrival = slot + duration
                ret_cost = table.aging_run(cost, ages, duration - 1)
                ret_cost += table.delivered_step(arrival, collected)
                visit(
                    0, arrival, battery - e[loc][0], frozenset(),
                    collected, tuple(arrival - z for z in collected), ret_cost,
                    actions + (Fly(origin=loc, target=0, depart_slot=slot),),
                )
        for target in range(1, s + 1):
            if target in visited or target == loc:
                continue
            duration = t[loc][target]
            if slot + duration + t[target][0] > n:
                continue
            if e[loc][target] + e[target][0] > battery:
                continue
            arrival = slot + duration
            nxt_collected = list(collected)
            nxt_collected[target - 1] = arrival
            visit(
                target, arrival, battery - e[loc][target], visited | {target},
                tuple(nxt_collected), tuple(a + duration for a in ages),
                table.aging_run(cost, ages, duration),
                actions + (Fly(origin=loc, target=target, depart_slot=slot),),
            )

    visit(0, 0, cap, frozenset(), (0,) * s, (0,) * s, 0.0, ())

    schedule = Schedule(best[2])
    report = replay(schedule, instance, table)
    return SolveResult(schedule=schedule, report=report, cost=best[0])


def zero_cost_feasible(instance: Instance) -> bool:
    """Decide whether any feasible schedule accrues zero total cost.

    Same action model as the full oracle, but branches die as soon as a
    slot would charge a positive cost, and an optimistic completion bound
    (one cheapest inbound hop per SN still needing a fresh collection,
    plus one cheapest return) discards states that cannot finish in time.
    """
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
    rows = CostTable(instance).rows

    min_inbound = [min(t[j][k] for j in range(s + 1) if j != k) for k in range(1, s + 1)]
    min_return = min(t[k][0] for k in range(1, s + 1))

    def needs_collection(k: int, collected: tuple) -> bool:
        # Even the onboard copy would be too old by the horizon.
        return rows[k][n - collected[k]] > 0

    def bound_ok(loc: int, slot: int, collected: tuple, delivered: tuple) -> bool:
        need = slot
        pending_return = loc != 0
        for k in range(s):
            if needs_collection(k, collected):
                need += min_inbound[k]
                pending_return = True
            elif rows[k][n - delivered[k]] > 0:
                pending_return = True
        if pending_return:
            need += min_return if loc == 0 or needs_any_collection(collected) else t[loc][0]
        return need <= n

    def needs_any_collection(collected: tuple) -> bool:
        return any(rows[k][n - collected[k]] > 0 for k in range(s))

    def visit(loc: int, slot: int, battery: float, visited: frozenset,
              collected: tuple, delivered: tuple) -> bool:
        if loc == 0 and all(rows[k][n - delivered[k]] == 0 for k in range(s)):
            return True
        if not bound_ok(loc, slot, collected, delivered):
            return False
        if loc == 0:
            for w in range(w_min, n - slot + 1):
                if any(rows[k][slot + w - delivered[k]] > 0 for k in range(s)):
                    break  # ages only grow; longer stays cost too
                if visit(0, slot + w, min(battery + rate * w, cap), frozenset(),
                         collected, delivered):
                    return True
        else:
            duration = t[loc][0]
            arrival = slot + duration
            if arrival <= n and e[loc][0] <= battery:
                grown = duration > 1 and any(
                    rows[k][arrival - 1 - delivered[k]] > 0 for k in range(s)
                )
                landed = any(rows[k][arrival - collected[k]] > 0 for k in range(s))
                if not grown and not landed:
                    if visit(0, arrival, battery - e[loc][0], frozenset(),
                             collected, collected):
                        return True
        for target in range(1, s + 1):
            if target in visited or target == loc:
                continue
            duration = t[loc][target]
            arrival = slot + duration
            if arrival + t[target][0] > n:
                continue
            if e[loc][target] + e[target][0] > battery:
                continue
            if any(rows[k][arrival - delivered[k]] > 0 for k in range(s)):
                continue
            nxt = list(collected)
            nxt[target - 1] = arrival
            if visit(target, arrival, battery - e[loc][target], visited | {target},
                     tuple(nxt), delivered):
                return True
        return False

    return visit(0, 0, cap, frozenset(), (0,) * s, (0,) * s)
