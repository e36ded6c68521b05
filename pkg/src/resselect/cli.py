"""Command-line interface: the pipeline as subcommands with deterministic,
machine-readable output.

Exit codes: 0 success, 1 validation error, 2 I/O error.  Results go to
stdout (or --out); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from typing import List, Optional

from . import model
from .config import Config
from .match import viable_set
from .plan import SelectionPlan, plan_model, plan_random
from .predict import load_clocks, load_profiles, predict_sequential_cycles, predict_tx, profiles_by_task
from .queuewait import QueueWaitStore, _parse_iso8601
from .sim import ResourceBehavior, SimulationResult, compare, simulate

CONSUMABLE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"type": "string", "minLength": 1},
        "form": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {"type": ["number", "string"]},
                "minItems": 1,
            },
        },
    },
    "required": ["type"],
}

REQUIREMENT_SCHEMA = {
    "allOf": [CONSUMABLE_SCHEMA],
    "properties": {"amount": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["amount"],
}

TASK_SCHEMA = {
    "type": "object",
    "properties": {
        "task_id": {"type": "string", "minLength": 1},
        "instructions": {
            "type": "array",
            "items": {"type": "array", "items": REQUIREMENT_SCHEMA, "minItems": 1},
        },
        "requirements": {"type": "array", "items": REQUIREMENT_SCHEMA},
    },
    "required": ["task_id"],
    "oneOf": [{"required": ["instructions"]}, {"required": ["requirements"]}],
}

POOL_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "resource_id": {"type": "string", "minLength": 1},
            "capabilities": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "allOf": [CONSUMABLE_SCHEMA],
                    "properties": {"rate": {"type": "number", "exclusiveMinimum": 0}},
                    "required": ["rate"],
                },
            },
        },
        "required": ["resource_id", "capabilities"],
    },
}

WORKLOAD_SCHEMA = {
    "type": "object",
    "properties": {
        "workload_id": {"type": "string", "minLength": 1},
        "tasks": {"type": "array", "items": TASK_SCHEMA},
    },
    "required": ["workload_id", "tasks"],
}

VIABLE_SET_SCHEMA = {
    "type": "object",
    "properties": {
        "task_id": {"type": "string"},
        "viable": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["task_id", "viable"],
}

SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "plan": {"type": ["string", "object"]},
        "behaviors": {"type": "array"},
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
    },
    "required": ["plan", "behaviors", "trials", "seed"],
}

SCHEMAS = {
    "aggregate": {"input": {"task": TASK_SCHEMA}, "output": TASK_SCHEMA},
    "match": {
        "input": {"task": TASK_SCHEMA, "pool": POOL_SCHEMA},
        "output": VIABLE_SET_SCHEMA,
    },
    "predict": {
        "input": {
            "profiles": "CSV: task_id,workload_param,instructions,cycles,instr_rate,avg_clock_ghz,tx_s",
            "clocks": {"type": "array"},
        },
        "output": {"type": "array", "items": {"type": "object"}},
    },
    "queue-wait": {
        "input": {
            "history": "CSV: machine,queue,submit_time_iso8601,wait_s,walltime_req_s,cores_req"
        },
        "output": {"type": "object"},
    },
    "select": {
        "input": {"workload": WORKLOAD_SCHEMA, "pool": POOL_SCHEMA},
        "output": {"type": "object", "required": ["workload_id", "assignments"]},
    },
    "simulate": {"input": {"scenario": SCENARIO_SCHEMA}, "output": {"type": "object"}},
    "report": {
        "input": {"model": "SimulationResult JSON", "random": "SimulationResult JSON"},
        "output": "CSV: group,metric,mean,sample_stddev",
    },
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", exit_code=2) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON in {path}: {exc}") from exc


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", exit_code=2) from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc}", exit_code=2) from exc
    else:
        sys.stdout.write(text)


def _load_config(path: Optional[str]) -> Config:
    return Config.from_json(_read_json(path)) if path else Config()


def _load_history(path: str) -> QueueWaitStore:
    store = QueueWaitStore()
    _, warnings = store.ingest_csv(io.StringIO(_read_text(path)))
    for w in warnings:
        print(f"warning: {path}: {w}", file=sys.stderr)
    return store


def _load_profile_file(path: str):
    profiles, warnings = load_profiles(io.StringIO(_read_text(path)))
    for w in warnings:
        print(f"warning: {path}: {w}", file=sys.stderr)
    return profiles


def _cmd_aggregate(args) -> None:
    task = model.task_from_json(_read_json(args.task))
    out = model.task_to_json(model.aggregate(task))
    _emit(model.canonical_dumps(out), args.out)


def _cmd_match(args) -> None:
    task = model.task_from_json(_read_json(args.task))
    pool = [model.resource_from_json(r) for r in _read_json(args.pool)]
    vs = viable_set(task, pool)
    _emit(model.canonical_dumps(vs.to_json()), args.out)


def _cmd_predict(args) -> None:
    profiles = _load_profile_file(args.profiles)
    clocks = load_clocks(_read_json(args.clocks))
    config = _load_config(args.config)
    by_task = profiles_by_task(profiles)
    task_ids = [args.task_id] if args.task_id else sorted(by_task)
    reports = []
    for task_id in task_ids:
        if task_id not in by_task:
            raise CliError(f"no baseline profiles for task {task_id!r}")
        cycles = predict_sequential_cycles(by_task[task_id])
        for rid in sorted(clocks):
            report = predict_tx(
                cycles.mean,
                clocks[rid],
                inflation=config.inflation_factors.get(rid, 1.0),
                task_id=task_id,
            )
            entry = report.to_json()
            entry["pred_cycles_stddev"] = cycles.stddev
            entry["n_profiles"] = cycles.n_samples
            reports.append(entry)
    _emit(model.canonical_dumps(reports), args.out)


def _cmd_queue_wait(args) -> None:
    store = _load_history(args.history)
    config = _load_config(args.config)
    estimate = store.estimate_tq(
        machine=args.machine,
        queue=args.queue,
        walltime_req_s=args.walltime,
        cores_req=args.cores,
        now=_parse_iso8601(args.now),
        window_s=config.window_s,
        buckets=config.buckets,
    )
    _emit(model.canonical_dumps(estimate.to_json()), args.out)


def _cmd_select(args) -> None:
    workload = model.workload_from_json(_read_json(args.workload))
    pool = [model.resource_from_json(r) for r in _read_json(args.pool)]
    config = _load_config(args.config)
    if args.strategy == "random":
        if args.seed is None:
            raise CliError("--seed is required for the random strategy")
        plan = plan_random(workload, pool, args.seed, config.cores_per_task)
    else:
        profiles = _load_profile_file(args.profiles)
        clocks = load_clocks(_read_json(args.clocks))
        store = _load_history(args.history)
        plan = plan_model(
            workload, pool, profiles, clocks, store, config, now=_parse_iso8601(args.now)
        )
    _emit(model.canonical_dumps(plan.to_json()), args.out)


def _cmd_simulate(args) -> None:
    scenario = _read_json(args.scenario)
    plan_obj = scenario["plan"]
    if isinstance(plan_obj, str):
        plan_obj = _read_json(plan_obj)
    plan = SelectionPlan.from_json(plan_obj)
    behaviors = {
        b["resource_id"]: ResourceBehavior.from_json(b) for b in scenario["behaviors"]
    }
    result = simulate(plan, behaviors, trials=scenario["trials"], seed=scenario["seed"])
    _emit(model.canonical_dumps(result.to_json()), args.out)
    if args.trials_csv:
        buf = io.StringIO()
        result.write_trials_csv(buf)
        _emit(buf.getvalue(), args.trials_csv)


def _cmd_report(args) -> None:
    model_result = SimulationResult.from_json(_read_json(args.model))
    random_result = SimulationResult.from_json(_read_json(args.random))
    rep = compare(model_result, random_result)
    lines = ["group,metric,mean,sample_stddev"]
    for metric, entry in sorted(rep["metrics"].items()):
        lines.append(
            f"model,{metric},{entry['model_mean']!r},{entry['model_sample_stddev']!r}"
        )
        lines.append(
            f"random,{metric},{entry['random_mean']!r},{entry['random_sample_stddev']!r}"
        )
    lines.append(f"comparison,ttc_reduction_pct,{rep['ttc_reduction_pct']!r},")
    _emit("\n".join(lines) + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resselect",
        description="Model-driven resource selection for bag-of-tasks workloads.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler, command=name)
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument(
            "--schema",
            action="store_true",
            help="print this subcommand's input/output JSON schema and exit",
        )
        return p

    p = add("aggregate", _cmd_aggregate, "collapse a task's instructions into totals")
    p.add_argument("--task", help="task JSON file")

    p = add("match", _cmd_match, "compute a task's viable resources")
    p.add_argument("--task", help="task JSON file")
    p.add_argument("--pool", help="resource pool JSON file")

    p = add("predict", _cmd_predict, "predict execution times from profiles")
    p.add_argument("--profiles", help="baseline profile CSV")
    p.add_argument("--clocks", help="clock specification JSON")
    p.add_argument("--task-id", help="restrict to one task id")
    p.add_argument("--config", help="config JSON")

    p = add("queue-wait", _cmd_queue_wait, "estimate queue wait from history")
    p.add_argument("--history", help="queue-wait history CSV")
    p.add_argument("--machine")
    p.add_argument("--queue")
    p.add_argument("--walltime", type=float, help="requested walltime in seconds")
    p.add_argument("--cores", type=int, help="requested core count")
    p.add_argument("--now", help="query time, ISO-8601 UTC")
    p.add_argument("--config", help="config JSON")

    p = add("select", _cmd_select, "plan a workload over a pool")
    p.add_argument("--workload", help="workload JSON file")
    p.add_argument("--pool", help="resource pool JSON file")
    p.add_argument("--profiles", help="baseline profile CSV")
    p.add_argument("--clocks", help="clock specification JSON")
    p.add_argument("--history", help="queue-wait history CSV")
    p.add_argument("--config", help="config JSON")
    p.add_argument("--now", help="planning time, ISO-8601 UTC")
    p.add_argument("--strategy", choices=["model", "random"], default="model")
    p.add_argument("--seed", type=int, help="PRNG seed (random strategy)")

    p = add("simulate", _cmd_simulate, "Monte-Carlo simulate a selection plan")
    p.add_argument("--scenario", help="scenario JSON (plan, behaviors, trials, seed)")
    p.add_argument("--trials-csv", help="also write per-trial metrics CSV here")

    p = add("report", _cmd_report, "compare model vs random simulation results")
    p.add_argument("--model", help="model-strategy SimulationResult JSON")
    p.add_argument("--random", help="random-strategy SimulationResult JSON")

    return parser


REQUIRED_FLAGS = {
    "aggregate": ["task"],
    "match": ["task", "pool"],
    "predict": ["profiles", "clocks"],
    "queue-wait": ["history", "machine", "queue", "walltime", "cores", "now"],
    "select": ["workload", "pool"],
    "simulate": ["scenario"],
    "report": ["model", "random"],
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        sys.stdout.write(model.canonical_dumps(SCHEMAS[args.command]))
        return 0
    missing = [
        f"--{name.replace('_', '-')}"
        for name in REQUIRED_FLAGS[args.command]
        if getattr(args, name.replace("-", "_")) is None
    ]
    if missing:
        print(
            f"error: {args.command} requires {', '.join(missing)}", file=sys.stderr
        )
        return 1
    try:
        args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
