"""Monte-Carlo simulation of distributed workload execution.

Per trial, each resource with assigned tasks gets one sampled pilot queue
wait (or one per task, for pools submitting single-core pilots); task
durations are sampled per task.  Workload metrics come from the resulting
timeline: TTC is the last task end, execution time is the span during which
at least one task runs, and queue time is everything else (the span before
the first start plus any zero-running-task gaps).
"""

from __future__ import annotations

import csv
import hashlib
import heapq
import math
import random
import statistics
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .plan import SelectionPlan


@dataclass(frozen=True)
class DistSpec:
    """A sampling distribution: constant, normal truncated at 0, or empirical."""

    kind: str  # "constant" | "normal" | "empirical"
    value: Optional[float] = None
    mean: Optional[float] = None
    stddev: Optional[float] = None
    samples: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind == "constant":
            if self.value is None or self.value < 0:
                raise ValueError("constant distribution needs value >= 0")
        elif self.kind == "normal":
            if self.mean is None or self.stddev is None or self.stddev < 0:
                raise ValueError("normal distribution needs mean and stddev >= 0")
        elif self.kind == "empirical":
            if not self.samples:
                raise ValueError("empirical distribution needs a non-empty sample list")
            object.__setattr__(self, "samples", tuple(self.samples))
            if any(s < 0 for s in self.samples):
                raise ValueError("empirical samples must be >= 0")
        else:
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def sample(self, rng: random.Random) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "normal":
            return max(0.0, rng.gauss(self.mean, self.stddev))
        return self.samples[rng.randrange(len(self.samples))]

    @classmethod
    def from_json(cls, obj: dict) -> "DistSpec":
        return cls(
            kind=obj["kind"],
            value=obj.get("value"),
            mean=obj.get("mean"),
            stddev=obj.get("stddev"),
            samples=tuple(obj["samples"]) if "samples" in obj else None,
        )

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "constant":
            out["value"] = self.value
        elif self.kind == "normal":
            out["mean"] = self.mean
            out["stddev"] = self.stddev
        else:
            out["samples"] = list(self.samples)
        return out


@dataclass(frozen=True)
class ResourceBehavior:
    """Stochastic behavior of one resource during simulation.

    pilot_mode "single" samples one queue wait per resource per trial (one
    pilot acquires everything); "per_task" samples an independent wait per
    task (single-core pilots, staggered starts).
    """

    resource_id: str
    tq_dist: DistSpec
    tx_dist: DistSpec
    cores_per_node: int = 1
    capacity_cores: Optional[int] = None
    pilot_mode: str = "single"

    def __post_init__(self):
        if self.cores_per_node < 1:
            raise ValueError("cores_per_node must be >= 1")
        if self.capacity_cores is not None and self.capacity_cores < 1:
            raise ValueError("capacity_cores must be >= 1 when set")
        if self.pilot_mode not in ("single", "per_task"):
            raise ValueError("pilot_mode must be 'single' or 'per_task'")

    @classmethod
    def from_json(cls, obj: dict) -> "ResourceBehavior":
        return cls(
            resource_id=obj["resource_id"],
            tq_dist=DistSpec.from_json(obj["tq_dist"]),
            tx_dist=DistSpec.from_json(obj["tx_dist"]),
            cores_per_node=obj.get("cores_per_node", 1),
            capacity_cores=obj.get("capacity_cores"),
            pilot_mode=obj.get("pilot_mode", "single"),
        )

    def to_json(self) -> dict:
        out = {
            "resource_id": self.resource_id,
            "tq_dist": self.tq_dist.to_json(),
            "tx_dist": self.tx_dist.to_json(),
            "cores_per_node": self.cores_per_node,
            "pilot_mode": self.pilot_mode,
        }
        if self.capacity_cores is not None:
            out["capacity_cores"] = self.capacity_cores
        return out


@dataclass(frozen=True)
class SimulationResult:
    """Per-trial workload metrics plus their means and sample stddevs."""

    workload_id: str
    strategy: str
    trials: int
    ttc_wkd_s: Tuple[float, ...]
    tq_wkd_s: Tuple[float, ...]
    tx_wkd_s: Tuple[float, ...]

    def _summary(self, values: Sequence[float]) -> dict:
        return {
            "mean": statistics.mean(values),
            "sample_stddev": statistics.stdev(values) if len(values) >= 2 else None,
        }

    @property
    def mean_ttc_s(self) -> float:
        return statistics.mean(self.ttc_wkd_s)

    def to_json(self) -> dict:
        return {
            "workload_id": self.workload_id,
            "strategy": self.strategy,
            "trials": self.trials,
            "per_trial": {
                "ttc_wkd_s": list(self.ttc_wkd_s),
                "tq_wkd_s": list(self.tq_wkd_s),
                "tx_wkd_s": list(self.tx_wkd_s),
            },
            "summary": {
                "ttc_wkd_s": self._summary(self.ttc_wkd_s),
                "tq_wkd_s": self._summary(self.tq_wkd_s),
                "tx_wkd_s": self._summary(self.tx_wkd_s),
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SimulationResult":
        per = obj["per_trial"]
        return cls(
            workload_id=obj["workload_id"],
            strategy=obj["strategy"],
            trials=obj["trials"],
            ttc_wkd_s=tuple(per["ttc_wkd_s"]),
            tq_wkd_s=tuple(per["tq_wkd_s"]),
            tx_wkd_s=tuple(per["tx_wkd_s"]),
        )

    def write_trials_csv(self, stream) -> None:
        writer = csv.writer(stream)
        writer.writerow(["trial", "ttc_wkd_s", "tq_wkd_s", "tx_wkd_s"])
        for i, (ttc, tq, tx) in enumerate(
            zip(self.ttc_wkd_s, self.tq_wkd_s, self.tx_wkd_s)
        ):
            writer.writerow([i, repr(ttc), repr(tq), repr(tx)])


def _derive_rng(seed: int, *parts) -> random.Random:
    """PRNG stream keyed by (seed, trial, resource, task): results never
    depend on iteration order or parallelism."""
    token = "|".join(str(p) for p in (seed, *parts))
    digest = hashlib.blake2b(token.encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _sample(dist: DistSpec, seed: int, *parts) -> float:
    if dist.is_constant:
        return dist.value
    return dist.sample(_derive_rng(seed, *parts))


def _union_length(intervals: List[Tuple[float, float]]) -> float:
    total = 0.0
    cur_start = cur_end = -math.inf
    for start, end in sorted(intervals):
        if start > cur_end:
            total += cur_end - cur_start if cur_end > cur_start else 0.0
            cur_start, cur_end = start, end
        elif end > cur_end:
            cur_end = end
    if cur_end > cur_start:
        total += cur_end - cur_start
    return total


def simulate(
    plan: SelectionPlan,
    behaviors: Dict[str, ResourceBehavior],
    trials: int,
    seed: int,
) -> SimulationResult:
    """Run ``trials`` independent executions of the plan and collect
    TTC / queue-time / execution-time metrics per trial."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not plan.assignments:
        raise ValueError("zero-task plan: nothing to simulate")
    tasks_by_res: Dict[str, List[str]] = {}
    for task_id, a in plan.assignments.items():
        tasks_by_res.setdefault(a.resource_id, []).append(task_id)
    for rid in tasks_by_res:
        if rid not in behaviors:
            raise ValueError(f"missing behavior for resource {rid!r}")
        tasks_by_res[rid].sort()
    resource_ids = sorted(tasks_by_res)

    ttc_list: List[float] = []
    tq_list: List[float] = []
    tx_list: List[float] = []
    for trial in range(trials):
        intervals: List[Tuple[float, float]] = []
        for rid in resource_ids:
            beh = behaviors[rid]
            task_ids = tasks_by_res[rid]
            if beh.pilot_mode == "per_task":
                for tid in task_ids:
                    start = _sample(beh.tq_dist, seed, trial, rid, tid, "tq")
                    dur = _sample(beh.tx_dist, seed, trial, rid, tid, "tx")
                    intervals.append((start, start + dur))
                continue
            activation = _sample(beh.tq_dist, seed, trial, rid, "tq")
            capacity = beh.capacity_cores
            busy_ends: List[float] = []  # one entry per occupied core
            for tid in task_ids:
                dur = _sample(beh.tx_dist, seed, trial, rid, tid, "tx")
                start = activation
                if capacity is not None:
                    if len(busy_ends) >= capacity:
                        start = max(activation, heapq.heappop(busy_ends))
                    heapq.heappush(busy_ends, start + dur)
                intervals.append((start, start + dur))
        ttc = max(end for _, end in intervals)
        tx = _union_length(intervals)
        ttc_list.append(ttc)
        tx_list.append(tx)
        tq_list.append(ttc - tx)
    return SimulationResult(
        workload_id=plan.workload_id,
        strategy=plan.strategy,
        trials=trials,
        ttc_wkd_s=tuple(ttc_list),
        tq_wkd_s=tuple(tq_list),
        tx_wkd_s=tuple(tx_list),
    )


def compare(model_result: SimulationResult, random_result: SimulationResult) -> dict:
    """Percent TTC reduction of the model strategy over random, with
    per-metric deltas.  Positive reduction means the model is faster."""
    if model_result.workload_id != random_result.workload_id:
        raise ValueError(
            "mismatched workloads: "
            f"{model_result.workload_id!r} vs {random_result.workload_id!r}"
        )
    report = {
        "workload_id": model_result.workload_id,
        "ttc_reduction_pct": (
            (random_result.mean_ttc_s - model_result.mean_ttc_s)
            / random_result.mean_ttc_s
            * 100.0
        ),
        "metrics": {},
    }
    for metric in ("ttc_wkd_s", "tq_wkd_s", "tx_wkd_s"):
        m_vals = getattr(model_result, metric)
        r_vals = getattr(random_result, metric)
        m_mean = statistics.mean(m_vals)
        r_mean = statistics.mean(r_vals)
        report["metrics"][metric] = {
            "model_mean": m_mean,
            "random_mean": r_mean,
            "delta": r_mean - m_mean,
            "model_sample_stddev": (
                statistics.stdev(m_vals) if len(m_vals) >= 2 else None
            ),
            "random_sample_stddev": (
                statistics.stdev(r_vals) if len(r_vals) >= 2 else None
            ),
        }
    return report
