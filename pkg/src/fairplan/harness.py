"""End-to-end experiment harness.

Runs each configured approach on each task (assign, compile, plan with an
external or built-in planner, validate, evaluate fairness on the original
task), persists one record per run, and aggregates the records into the
per-domain score table. Every score is a pure function of the persisted
records, so tables can be rebuilt offline.
"""

import dataclasses
import json
import math
import os
import re
import shlex
import statistics
import subprocess
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .assignment import FairnessScheme, build_model, solve
from .contract_net import contract_net_assign
from .errors import FairplanError, InvalidPlan, SearchBoundExceeded
from .evaluation import fairness_report
from .fair_compilation import compile_fair, project_plan
from .generator import generate_warehouse
from .grounding import execute, ground
from .labeling import compile_labeled
from .pddl import emit_domain, emit_plan, emit_problem, parse_agents, parse_domain, parse_plan, parse_problem
from .search import breadth_first_plan, uniform_cost_plan

TIME_LIMIT = 900.0
APPROACHES = ("passthrough", "contract-net", "milp", "fpc")
METRICS = ("plan-cost", "g-maximin", "g-propeq", "w-maximin", "w-propeq", "time", "coverage")
DEFAULT_STATE_BOUND = 1_000_000


@dataclass(frozen=True)
class PlannerAdapter:
    """How to obtain a plan: a command template over {domain} {problem}
    {plan} paths, or one of the built-in searches ("bfs" / "ucs")."""

    name: str
    command: str = None
    builtin: str = None
    timeout: float = TIME_LIMIT
    cost_regex: str = r";\s*cost\s*=\s*(\d+)"
    state_bound: int = DEFAULT_STATE_BOUND

    def __post_init__(self):
        if (self.command is None) == (self.builtin is None):
            raise ValueError("adapter needs exactly one of command/builtin")
        if self.command is not None:
            for placeholder in ("{domain}", "{problem}", "{plan}"):
                if placeholder not in self.command:
                    raise ValueError(f"adapter command lacks {placeholder}")
        if self.builtin is not None and self.builtin not in ("bfs", "ucs"):
            raise ValueError(f"unknown builtin search {self.builtin!r}")
        if self.timeout <= 0:
            raise ValueError("adapter timeout must be positive")


BUILTIN_ADAPTERS = {
    "builtin-bfs": PlannerAdapter(name="builtin-bfs", builtin="bfs"),
    "builtin-ucs": PlannerAdapter(name="builtin-ucs", builtin="ucs"),
}


@dataclass
class PlannerRun:
    status: str  # solved | unsolvable | timeout | error | invalid
    plan: object
    seconds: float
    detail: str = ""


def run_planner(adapter, domain_path, problem_path, ground_task, plan_path,
                timeout=None):
    """Run the planner on emitted task files and validate its plan against
    the given ground task. Wall-clock time covers the planner only;
    ``timeout`` overrides the adapter's own limit."""
    timeout = adapter.timeout if timeout is None else timeout
    start = time.perf_counter()
    if adapter.builtin is not None:
        search = breadth_first_plan if adapter.builtin == "bfs" else uniform_cost_plan
        try:
            plan = search(ground_task, state_bound=adapter.state_bound)
        except SearchBoundExceeded as exc:
            return PlannerRun("error", None, time.perf_counter() - start, str(exc))
        seconds = time.perf_counter() - start
        if plan is None:
            return PlannerRun("unsolvable", None, seconds, "search space exhausted")
        Path(plan_path).write_text(emit_plan(plan))
    else:
        argv = [
            part.format(domain=domain_path, problem=problem_path, plan=plan_path)
            for part in shlex.split(adapter.command)
        ]
        try:
            proc = subprocess.run(
                argv,
                capture_output=True,
                text=True,
                timeout=adapter.timeout,
            )
        except subprocess.TimeoutExpired:
            return PlannerRun("timeout", None, time.perf_counter() - start,
                              f"no plan within {adapter.timeout}s")
        except OSError as exc:
            return PlannerRun("error", None, time.perf_counter() - start, str(exc))
        seconds = time.perf_counter() - start
        if proc.returncode != 0:
            return PlannerRun(
                "error", None, seconds,
                f"planner exited {proc.returncode}: {proc.stderr.strip()[:500]}",
            )
        if not Path(plan_path).exists():
            return PlannerRun("error", None, seconds, "planner wrote no plan file")
        text = Path(plan_path).read_text()
        try:
            plan = parse_plan(text, ground_task)
        except FairplanError as exc:
            return PlannerRun("error", None, seconds, f"unparsable plan: {exc}")
        if plan.declared_cost is None:
            # planners with nonstandard trailers declare them via the adapter
            match = re.search(adapter.cost_regex, text)
            if match:
                plan = dataclasses.replace(plan, declared_cost=int(match.group(1)))
    try:
        execute(ground_task, plan)
    except InvalidPlan as exc:
        return PlannerRun("invalid", plan, seconds, str(exc))
    return PlannerRun("solved", plan, seconds)


@dataclass
class RunRecord:
    """Outcome of one (approach, task) run; the unit scoring works from."""

    approach: str
    task_id: str
    group: str
    solved: bool
    status: str
    seconds: float
    num_agents: int
    num_goals: int
    plan_cost: int = None
    goal_maximin: int = None
    goal_propeq: int = None
    workload_maximin: int = None
    workload_propeq: int = None
    detail: str = ""

    def to_json_dict(self):
        data = dataclasses.asdict(self)
        data["version"] = 1
        return data

    @classmethod
    def from_json_dict(cls, data):
        data = dict(data)
        data.pop("version", None)
        return cls(**data)


def _rekey_plan(plan, target_ground):
    steps = []
    for action in plan.steps:
        original = target_ground.action_index.get(action.key)
        if original is None:
            raise InvalidPlan(f"{action.ident} does not exist in the original task")
        steps.append(original)
    return type(plan)(tuple(steps))


def run_approach(
    task,
    approach,
    adapter,
    scheme=None,
    priority_weight=1000,
    workdir=None,
    task_id=None,
    group=None,
):
    """One end-to-end run. For pre-assignment approaches the reported time
    includes the assignment; the reported cost is always the cost of the
    plan projected onto the original task, so reward costs never leak in.

    Without an explicit ``workdir`` the emitted files go to a fresh scratch
    directory (under $FAIRPLAN_TMP when set)."""
    if approach not in APPROACHES:
        raise ValueError(f"unknown approach {approach!r}")
    if approach == "fpc" and (scheme is None or not scheme.goal_oriented):
        raise ValueError("fpc requires a goal-oriented fairness scheme")
    if approach == "milp" and scheme is None:
        raise ValueError("milp requires a fairness scheme")
    task_id = task_id or task.problem_name or "task"
    group = group or task.domain_name
    base = dict(
        approach=approach,
        task_id=task_id,
        group=group,
        num_agents=len(task.agents),
        num_goals=len(task.goals),
    )

    original_ground = ground(task)
    compiled = None
    assign_seconds = 0.0
    try:
        if approach in ("milp", "contract-net"):
            t0 = time.perf_counter()
            if approach == "milp":
                result = solve(build_model(original_ground, scheme, priority_weight))
            else:
                result = contract_net_assign(
                    original_ground, scheme or FairnessScheme.GOAL_MAXIMIN, priority_weight
                )
            assign_seconds = time.perf_counter() - t0
            solve_task = compile_labeled(task, result.assignment).task
        elif approach == "fpc":
            compiled = compile_fair(task, scheme, priority_weight)
            solve_task = compiled.task
        else:
            solve_task = task
    except FairplanError as exc:
        return RunRecord(
            solved=False, status="error", seconds=assign_seconds,
            detail=str(exc), **base,
        )

    if workdir is None:
        workdir = tempfile.mkdtemp(
            prefix="fairplan-", dir=os.environ.get("FAIRPLAN_TMP")
        )
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    domain_path = workdir / "domain.pddl"
    problem_path = workdir / "problem.pddl"
    plan_path = workdir / "plan.txt"
    domain_path.write_text(emit_domain(solve_task))
    problem_path.write_text(emit_problem(solve_task))

    solve_ground = ground(solve_task)
    run = run_planner(adapter, str(domain_path), str(problem_path), solve_ground, str(plan_path))
    seconds = run.seconds + assign_seconds
    if run.status != "solved":
        return RunRecord(
            solved=False, status=run.status, seconds=seconds, detail=run.detail, **base
        )

    try:
        if approach == "fpc":
            projected = project_plan(compiled, run.plan, original_ground)
        else:
            projected = _rekey_plan(run.plan, original_ground)
        trace = execute(original_ground, projected)
    except (FairplanError, InvalidPlan) as exc:
        return RunRecord(
            solved=False, status="invalid", seconds=seconds, detail=str(exc), **base
        )
    report = fairness_report(original_ground, trace)
    return RunRecord(
        solved=True,
        status="solved",
        seconds=seconds,
        plan_cost=trace.cost,
        goal_maximin=report.goal_maximin,
        goal_propeq=report.goal_propeq,
        workload_maximin=report.workload_maximin,
        workload_propeq=report.workload_propeq,
        **base,
    )


# ---------------------------------------------------------------------------
# Scoring


def time_score(seconds):
    """1 within a second, 0 at the 900s limit, logarithmic in between."""
    if seconds <= 0:
        raise ValueError("time score is defined for positive times")
    if seconds <= 1.0:
        return 1.0
    if seconds >= TIME_LIMIT:
        return 0.0
    return 1.0 - math.log(seconds) / math.log(TIME_LIMIT)


def _ratio_low_better(value, best):
    # best is the minimum; a zero best only scores the approaches matching it
    if value == best:
        return 1.0
    return best / value if value > 0 else 0.0


def _ratio_high_better(value, best):
    if value == best:
        return 1.0
    return value / best if best > 0 else 0.0


def _task_scores(task_records):
    scores = {r.approach: dict.fromkeys(METRICS, 0.0) for r in task_records}
    solved = [r for r in task_records if r.solved]
    if not solved:
        return scores
    best_cost = min(r.plan_cost for r in solved)
    best_gmax = max(r.goal_maximin for r in solved)
    best_gprop = min(r.goal_propeq for r in solved)
    best_wmax = max(r.workload_maximin for r in solved)
    best_wprop = min(r.workload_propeq for r in solved)
    for r in solved:
        scores[r.approach] = {
            "plan-cost": _ratio_low_better(r.plan_cost, best_cost),
            "g-maximin": _ratio_high_better(r.goal_maximin, best_gmax),
            "g-propeq": _ratio_low_better(r.goal_propeq, best_gprop),
            "w-maximin": _ratio_high_better(r.workload_maximin, best_wmax),
            "w-propeq": _ratio_low_better(r.workload_propeq, best_wprop),
            "time": time_score(max(r.seconds, 1e-9)),
            "coverage": 1.0,
        }
    return scores


@dataclass(eq=False)
class ScoreTable:
    approaches: tuple
    groups: dict  # group -> approach -> metric -> summed score
    stats: dict  # group -> {"tasks", "agents-mean", "agents-std", ...}

    def to_json_dict(self):
        return {"version": 1, "approaches": list(self.approaches),
                "groups": self.groups, "stats": self.stats}

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_markdown(self):
        header = (
            "| Problems | N | G | Approach | Plan Cost | G-Maximin | G-Propeq "
            "| W-Maximin | W-Propeq | Total Time | Coverage |"
        )
        rule = "|" + "---|" * 11
        lines = [header, rule]
        for group in self.groups:
            stats = self.stats[group]
            n = f"{stats['agents-mean']:.2f}±{stats['agents-std']:.2f}"
            g = f"{stats['goals-mean']:.2f}±{stats['goals-std']:.2f}"
            for approach in self.approaches:
                row = self.groups[group][approach]
                cells = [group, n, g, approach]
                for metric in METRICS[:-1]:
                    cells.append(f"{row[metric]:.2f}")
                cells.append(f"{int(row['coverage'])}")
                lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def score_table(records):
    """Aggregate records into per-group sums plus the all-problems and
    commonly-solved-problems sections. Every approach must have run every
    task (unsolved runs included)."""
    if not records:
        raise ValueError("no records to score")
    approaches = tuple(sorted({r.approach for r in records}))
    by_task = {}
    for r in records:
        by_task.setdefault(r.task_id, []).append(r)
    for task_id, task_records in by_task.items():
        present = {r.approach for r in task_records}
        if present != set(approaches):
            missing = sorted(set(approaches) - present)
            raise ValueError(f"task {task_id!r} lacks records for {missing}")
        if len(task_records) != len(approaches):
            raise ValueError(f"task {task_id!r} has duplicate records")

    common_tasks = {
        task_id
        for task_id, task_records in by_task.items()
        if all(r.solved for r in task_records)
    }

    def empty_rows():
        return {a: dict.fromkeys(METRICS, 0.0) for a in approaches}

    groups = {}
    group_tasks = {}
    for r in records:
        groups.setdefault(r.group, empty_rows())
        group_tasks.setdefault(r.group, set()).add(r.task_id)
    groups["all-problems"] = empty_rows()
    groups["commonly-solved"] = empty_rows()

    task_meta = {}
    for task_id, task_records in sorted(by_task.items()):
        scores = _task_scores(task_records)
        group = task_records[0].group
        task_meta[task_id] = (task_records[0].num_agents, task_records[0].num_goals, group)
        for approach, metric_scores in scores.items():
            for metric, value in metric_scores.items():
                groups[group][approach][metric] += value
                groups["all-problems"][approach][metric] += value
                if task_id in common_tasks:
                    groups["commonly-solved"][approach][metric] += value

    def stats_for(task_ids):
        agents = [task_meta[t][0] for t in task_ids]
        goals = [task_meta[t][1] for t in task_ids]
        return {
            "tasks": len(task_ids),
            "agents-mean": statistics.mean(agents) if agents else 0.0,
            "agents-std": statistics.pstdev(agents) if agents else 0.0,
            "goals-mean": statistics.mean(goals) if goals else 0.0,
            "goals-std": statistics.pstdev(goals) if goals else 0.0,
        }

    stats = {group: stats_for(ids) for group, ids in group_tasks.items()}
    stats["all-problems"] = stats_for(set(by_task))
    stats["commonly-solved"] = stats_for(common_tasks)
    ordered = {g: groups[g] for g in sorted(group_tasks)}
    ordered["all-problems"] = groups["all-problems"]
    ordered["commonly-solved"] = groups["commonly-solved"]
    return ScoreTable(approaches=approaches, groups=ordered, stats=stats)


# ---------------------------------------------------------------------------
# Bench runs


def _load_adapters(config):
    adapters = dict(BUILTIN_ADAPTERS)
    for spec in config.get("adapters", ()):
        adapter = PlannerAdapter(
            name=spec["name"],
            command=spec.get("command"),
            builtin=spec.get("builtin"),
            timeout=float(spec.get("timeout", TIME_LIMIT)),
            state_bound=int(spec.get("state-bound", DEFAULT_STATE_BOUND)),
        )
        adapters[adapter.name] = adapter
    return adapters


def _load_task(spec, base_dir):
    if "generator" in spec:
        if spec["generator"] != "warehouse":
            raise ValueError(f"unknown generator {spec['generator']!r}")
        task = generate_warehouse(
            width=spec["width"],
            height=spec["height"],
            agents=spec["agents"],
            work_locations=spec["work-locations"],
            black_locations=spec.get("black-locations", 0),
            hammers=spec.get("hammers", 0),
            seed=spec.get("seed", 0),
        )
    else:
        base = Path(base_dir)
        domain = parse_domain((base / spec["domain"]).read_text())
        task = parse_problem((base / spec["problem"]).read_text(), domain)
        if "agents" in spec:
            task = task.with_agents(parse_agents((base / spec["agents"]).read_text()))
    name = spec.get("name") or task.problem_name
    group = spec.get("group") or task.domain_name
    return name, group, task


def _approach_entries(config):
    entries = []
    for spec in config.get("approaches", ()):
        approach = spec["approach"]
        scheme = FairnessScheme.parse(spec["scheme"]) if "scheme" in spec else None
        if approach == "fpc" and (scheme is None or not scheme.goal_oriented):
            raise ValueError(
                f"approach {spec.get('name', approach)!r}: fpc needs a goal-oriented scheme"
            )
        name = spec.get("name") or (approach + (f"-{scheme.value}" if scheme else ""))
        entries.append((name, approach, scheme, spec.get("adapter", "builtin-bfs")))
    if not entries:
        raise ValueError("bench config lists no approaches")
    return entries


def _atomic_write(path, text):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_bench(config, out_dir, base_dir="."):
    """Execute the full approach x task matrix described by ``config`` and
    write records, scores.json and scores.md under ``out_dir``."""
    out = Path(out_dir)
    (out / "records").mkdir(parents=True, exist_ok=True)
    (out / "tasks").mkdir(exist_ok=True)
    (out / "plans").mkdir(exist_ok=True)

    adapters = _load_adapters(config)
    entries = _approach_entries(config)
    priority_weight = int(config.get("priority-weight", 1000))
    tasks = [_load_task(spec, base_dir) for spec in config.get("tasks", ())]
    if not tasks:
        raise ValueError("bench config lists no tasks")

    jobs = []
    for task_name, group, task in tasks:
        for entry_name, approach, scheme, adapter_name in entries:
            if adapter_name not in adapters:
                raise ValueError(f"unknown adapter {adapter_name!r}")
            jobs.append((task_name, group, task, entry_name, approach, scheme,
                         adapters[adapter_name]))

    def run_job(job):
        task_name, group, task, entry_name, approach, scheme, adapter = job
        workdir = out / "tasks" / f"{task_name}__{entry_name}"
        try:
            record = run_approach(
                task,
                approach,
                adapter,
                scheme=scheme,
                priority_weight=priority_weight,
                workdir=workdir,
                task_id=task_name,
                group=group,
            )
        except FairplanError as exc:
            record = RunRecord(
                approach=entry_name, task_id=task_name, group=group,
                solved=False, status="error", seconds=0.0,
                num_agents=len(task.agents), num_goals=len(task.goals),
                detail=str(exc),
            )
        record.approach = entry_name
        plan_file = workdir / "plan.txt"
        if plan_file.exists():
            _atomic_write(out / "plans" / f"{task_name}__{entry_name}.plan",
                          plan_file.read_text())
        _atomic_write(
            out / "records" / f"{task_name}__{entry_name}.json",
            json.dumps(record.to_json_dict(), sort_keys=True, indent=2) + "\n",
        )
        return record

    workers = int(config.get("workers", 1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_job, jobs))
    else:
        records = [run_job(job) for job in jobs]

    table = score_table(records)
    _atomic_write(out / "scores.json", table.to_json())
    _atomic_write(out / "scores.md", table.to_markdown())
    return table


def load_records(run_dir):
    records = []
    for path in sorted(Path(run_dir, "records").glob("*.json")):
        records.append(RunRecord.from_json_dict(json.loads(path.read_text())))
    return records
