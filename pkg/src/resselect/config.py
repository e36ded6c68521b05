"""Run configuration shared by the planner, predictor and CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .queuewait import DEFAULT_BUCKETS, DEFAULT_WINDOW_S, SimilarityBuckets


@dataclass
class Config:
    """Explicit configuration; no environment variables are consulted.

    inflation_factors scales predicted cycle counts per resource (e.g. a
    pool that executes ~22% more instructions gets 1.22).
    resource_queues maps a resource id to the (machine, queue) used for
    queue-wait lookups; default is (resource_id, "default").
    profile_overrides / default_profile map workload task ids onto baseline
    profile task ids when they differ.
    """

    inflation_factors: Dict[str, float] = field(default_factory=dict)
    walltime_safety_factor: float = 1.5
    buckets: SimilarityBuckets = DEFAULT_BUCKETS
    window_s: float = DEFAULT_WINDOW_S
    affinity: str = "neg_ttc"
    frequency_choice: str = "base"
    resource_queues: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    cores_per_task: int = 1
    profile_overrides: Dict[str, str] = field(default_factory=dict)
    default_profile: Optional[str] = None

    def __post_init__(self):
        if any(v <= 0 for v in self.inflation_factors.values()):
            raise ValueError("inflation factors must be > 0")
        if self.walltime_safety_factor <= 0:
            raise ValueError("walltime_safety_factor must be > 0")
        if self.window_s <= 0:
            raise ValueError("window_s must be > 0")
        if self.frequency_choice not in ("base", "max"):
            raise ValueError("frequency_choice must be 'base' or 'max'")
        if self.cores_per_task < 1:
            raise ValueError("cores_per_task must be >= 1")

    def machine_queue(self, resource_id: str) -> Tuple[str, str]:
        return self.resource_queues.get(resource_id, (resource_id, "default"))

    def profile_id(self, task_id: str) -> str:
        if task_id in self.profile_overrides:
            return self.profile_overrides[task_id]
        return self.default_profile if self.default_profile is not None else task_id

    @classmethod
    def from_json(cls, obj: dict) -> "Config":
        buckets = DEFAULT_BUCKETS
        if "buckets" in obj:
            buckets = SimilarityBuckets(
                walltime_edges_s=tuple(obj["buckets"]["walltime_edges_s"]),
                cores_edges=tuple(obj["buckets"]["cores_edges"]),
            )
        queues = {
            rid: (mq["machine"], mq["queue"])
            for rid, mq in obj.get("resource_queues", {}).items()
        }
        return cls(
            inflation_factors=dict(obj.get("inflation_factors", {})),
            walltime_safety_factor=obj.get("walltime_safety_factor", 1.5),
            buckets=buckets,
            window_s=obj.get("window_s", DEFAULT_WINDOW_S),
            affinity=obj.get("affinity", "neg_ttc"),
            frequency_choice=obj.get("frequency_choice", "base"),
            resource_queues=queues,
            cores_per_task=obj.get("cores_per_task", 1),
            profile_overrides=dict(obj.get("profile_overrides", {})),
            default_profile=obj.get("default_profile"),
        )

    def to_json(self) -> dict:
        return {
            "inflation_factors": dict(self.inflation_factors),
            "walltime_safety_factor": self.walltime_safety_factor,
            "buckets": self.buckets.to_json(),
            "window_s": self.window_s,
            "affinity": self.affinity,
            "frequency_choice": self.frequency_choice,
            "resource_queues": {
                rid: {"machine": m, "queue": q}
                for rid, (m, q) in self.resource_queues.items()
            },
            "cores_per_task": self.cores_per_task,
            "profile_overrides": dict(self.profile_overrides),
            "default_profile": self.default_profile,
        }
