"""Resource selection toolkit for heterogeneous computing pools.

Models tasks and resources as consumable requirements and capabilities,
predicts per-resource execution cost from baseline hardware-counter
profiles, estimates queue waits from history, selects resources that
minimize predicted time-to-completion, and simulates the benefit over
random selection.
"""

from .config import Config
from .match import (
    EmptyViableSetError,
    ViableSet,
    register_affinity,
    res_select,
    satisfy_req,
    satisfy_task,
    viable_set,
)
from .model import (
    Capability,
    ConsumableSpec,
    EmptyTaskError,
    Instruction,
    NotSatisfiableError,
    Requirement,
    ResourceSpec,
    TaskSpec,
    WorkloadSpec,
    aggregate,
    cost,
)
from .plan import SelectionPlan, TtcEstimate, plan_model, plan_random
from .predict import (
    BaselineProfile,
    ClockSpec,
    PoolInventoryEntry,
    PredictionReport,
    diagnose,
    pool_clock_spec,
    predict_sequential_cycles,
    predict_tx,
    tx_error,
)
from .queuewait import (
    QueueWaitEstimate,
    QueueWaitRecord,
    QueueWaitStore,
    SimilarityBuckets,
)
from .sim import DistSpec, ResourceBehavior, SimulationResult, compare, simulate

__version__ = "0.1.0"

__all__ = [
    "Capability",
    "Config",
    "ConsumableSpec",
    "BaselineProfile",
    "ClockSpec",
    "DistSpec",
    "EmptyTaskError",
    "EmptyViableSetError",
    "Instruction",
    "NotSatisfiableError",
    "PoolInventoryEntry",
    "PredictionReport",
    "QueueWaitEstimate",
    "QueueWaitRecord",
    "QueueWaitStore",
    "Requirement",
    "ResourceBehavior",
    "ResourceSpec",
    "SelectionPlan",
    "SimilarityBuckets",
    "SimulationResult",
    "TaskSpec",
    "TtcEstimate",
    "ViableSet",
    "WorkloadSpec",
    "aggregate",
    "compare",
    "cost",
    "diagnose",
    "plan_model",
    "plan_random",
    "pool_clock_spec",
    "predict_sequential_cycles",
    "predict_tx",
    "register_affinity",
    "res_select",
    "satisfy_req",
    "satisfy_task",
    "simulate",
    "tx_error",
    "viable_set",
]
