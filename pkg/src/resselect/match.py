"""Matchmaking: requirement/capability satisfaction, viable sets, selection.

ClassAd-style exact matching adapted to consumables.  Value comparison in
form conditions is exact (no numeric tolerance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from .model import Capability, Requirement, ResourceSpec, TaskSpec, aggregate


class EmptyViableSetError(ValueError):
    """Raised when selecting from an empty viable set."""


@dataclass(frozen=True)
class ViableSet:
    """Resources on which a task can execute, in input pool order."""

    task_id: str
    resource_ids: Tuple[str, ...]

    def to_json(self) -> dict:
        return {"task_id": self.task_id, "viable": list(self.resource_ids)}


def satisfy_req(req: Requirement, cap: Capability) -> bool:
    """True iff the capability's consumable can satisfy the requirement.

    Checks: same type; every requirement form attribute present in the
    capability form; non-empty intersection of each shared condition set.
    """
    rc, cc = req.consumable, cap.consumable
    if rc.ctype != cc.ctype:
        return False
    for attr, cond in rc.form.items():
        if attr not in cc.form:
            return False
        if not (cc.form[attr] & cond):
            return False
    return True


def satisfy_task(task: TaskSpec, resource: ResourceSpec) -> bool:
    """True iff every requirement of the task is matched by some capability."""
    if task.requirements is None:
        task = aggregate(task)
    return all(
        any(satisfy_req(req, cap) for cap in resource.capabilities)
        for req in task.requirements
    )


def viable_set(task: TaskSpec, pool: Sequence[ResourceSpec]) -> ViableSet:
    """Filter the pool to resources that can execute the task (pool order kept)."""
    ids = tuple(r.resource_id for r in pool if satisfy_task(task, r))
    return ViableSet(task.task_id, ids)


def res_select(
    vrs_ids: Sequence[str],
    inputs: Sequence,
    affinity: Callable[..., float],
) -> str:
    """Pick the candidate whose payload yields the highest affinity value.

    Ties go to the earliest candidate (strict improvement required).
    -inf affinities are skipped unless every candidate is -inf, in which
    case the first candidate is returned.
    """
    if not vrs_ids:
        raise EmptyViableSetError("empty viable set")
    if len(inputs) != len(vrs_ids):
        raise ValueError("one affinity input required per candidate resource")
    best_id = None
    best_val = -math.inf
    for rid, payload in zip(vrs_ids, inputs):
        val = affinity(payload)
        if best_val < val:
            best_val = val
            best_id = rid
    return best_id if best_id is not None else vrs_ids[0]


# --- affinity registry -------------------------------------------------------
#
# Affinity functions must be pure: same payload, same value, no side effects.


def neg_ttc(payload: dict) -> float:
    """Default affinity: the negated predicted time-to-completion."""
    return -(payload["tq_s"] + payload["tx_s"])


_AFFINITIES: Dict[str, Callable] = {"neg_ttc": neg_ttc}


def register_affinity(name: str, fn: Callable) -> None:
    """Register a user-supplied affinity function under ``name``."""
    if not callable(fn):
        raise TypeError("affinity must be callable")
    _AFFINITIES[name] = fn


def get_affinity(name: str) -> Callable:
    try:
        return _AFFINITIES[name]
    except KeyError:
        raise ValueError(f"unknown affinity function {name!r}") from None


def list_affinities() -> List[str]:
    return sorted(_AFFINITIES)
