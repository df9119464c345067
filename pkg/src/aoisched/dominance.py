"""Label comparison rules and capacity-limited cell insertion.

Two jobs live here. ``dominates`` decides when a stored label makes
another label at the same node redundant; it only fires when the
dominator is at least as good in every state component the future can
depend on (battery, visited set, onboard timestamps, delivered
timestamps, accrued cost), so removing a dominated label never loses the
optimum. ``promise_cost`` ranks labels for capacity eviction: the cost a
partial solution would have if everything on board were delivered at its
slot, which lets a label that has collected a lot look as good as it
deserves even though nothing has reached the BS yet.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, annotations only
    from .aoi import CostTable
    from .labeling import Label

__all__ = ["DominanceVerdict", "promise_cost", "dominates", "insert"]


def promise_cost(label: "Label", table: "CostTable") -> float:
    """Eviction rank for a label that just arrived at an SN.

    Starting from the parent label's accrued cost, every SN ages a further
    ``arrival_slot - 1`` slots from the parent's ages, and one final
    charge uses the age each SN's data would have if everything on board
    were delivered at the arrival. The long window keeps the rank
    sensitive to how stale the already-delivered data is, which the
    final as-if-delivered charge alone cannot see. Labels created at BS
    cells rank by their accrued cost directly (delivering changes
    nothing there).
    """
    parent = label.parent
    slot = label.slot
    total = parent.cost
    for k, pref in enumerate(table.prefix):
        a0 = parent.age[k]
        total += pref[a0 + slot - 1] - pref[a0]
    for k, row in enumerate(table.rows):
        total += row[slot - label.collected[k]]
    return total


def dominates(a: "Label", b: "Label") -> bool:
    """True when ``a`` makes ``b`` redundant at their shared node.

    Requires battery no lower, visited set no larger, onboard collection
    timestamps no older, ages no higher, accrued cost no higher, and at
    least one of these strictly better. Any continuation feasible for
    ``b`` is then feasible for ``a`` at no more cost, so the relation is
    safe to prune on. At BS nodes (empty visited sets, ages determined by
    the collection timestamps, promise equal to cost) this reduces to
    comparing battery, ages, and cost alone. Irreflexive by construction.
    """
    if a.battery < b.battery or a.cost > b.cost:
        return False
    if not a.visited <= b.visited:
        return False
    strict = a.battery > b.battery or a.cost < b.cost or a.visited < b.visited
    for za, zb in zip(a.collected, b.collected):
        if za < zb:
            return False
        if za > zb:
            strict = True
    for aa, ab in zip(a.age, b.age):
        if aa > ab:
            return False
        if aa < ab:
            strict = True
    return strict


def _state_equal(a: "Label", b: "Label") -> bool:
    return (
        a.battery == b.battery
        and a.cost == b.cost
        and a.collected == b.collected
        and a.age == b.age
        and a.visited == b.visited
    )


@dataclass(frozen=True)
class DominanceVerdict:
    """What one insertion attempt did to a cell.

    ``outcome`` is one of discarded-dominated, stored,
    stored-after-evictions, discarded-full. ``removed`` lists stored labels
    the candidate dominated away; ``evicted`` is a label dropped to respect
    the capacity; ``dominated_by`` names the stored label that blocked a
    discarded candidate.
    """

    outcome: str
    candidate: "Label"
    dominated_by: "Label | None" = None
    removed: tuple = ()
    evicted: "Label | None" = None


def insert(candidate: "Label", cell: list, capacity: int | None) -> DominanceVerdict:
    """Apply the domination rules and capacity limit to one candidate.

    Order matters: a dominated candidate is discarded first; otherwise
    stored labels it dominates are removed, then the candidate is stored
    if the cell has room, or replaces the worst-promise label if it
    improves on it (oldest stored wins promise ties). Labels whose full
    state duplicates a stored one are discarded so equivalent action
    orderings collapse to one representative.
    """
    for stored in cell:
        if dominates(stored, candidate) or _state_equal(stored, candidate):
            return DominanceVerdict("discarded-dominated", candidate, dominated_by=stored)

    removed = tuple(stored for stored in cell if dominates(candidate, stored))
    if removed:
        removed_ids = {id(stored) for stored in removed}
        cell[:] = [stored for stored in cell if id(stored) not in removed_ids]

    if capacity is None or len(cell) < capacity:
        cell.append(candidate)
        if removed:
            return DominanceVerdict("stored-after-evictions", candidate, removed=removed)
        return DominanceVerdict("stored", candidate)

    worst = cell[0]
    for stored in cell[1:]:
        if stored.promise > worst.promise:
            worst = stored
    if candidate.promise < worst.promise:
        cell.remove(worst)
        cell.append(candidate)
        return DominanceVerdict("stored-after-evictions", candidate, removed=removed, evicted=worst)
    return DominanceVerdict("discarded-full", candidate)
