"""Command-line front end.

Exit codes are a stable contract for scripts: 0 success, 1 usage error,
2 bad input (parse/semantic/assignment), 3 solver or planner failure.
"""

import argparse
import json
import sys
from pathlib import Path

from .assignment import FairnessScheme, build_model, solve
from .contract_net import contract_net_assign
from .errors import FairplanError, InvalidPlan, SearchBoundExceeded
from .evaluation import fairness_report
from .fair_compilation import compile_fair
from .generator import generate_warehouse
from .grounding import execute, ground
from .harness import load_records, run_bench, score_table
from .labeling import compile_labeled
from .pddl import (
    emit_domain,
    emit_plan,
    emit_problem,
    fact_str,
    parse_agents,
    parse_domain,
    parse_plan,
    parse_problem,
)
from .search import breadth_first_plan, uniform_cost_plan

USAGE_EXIT = 1
INPUT_EXIT = 2
SOLVER_EXIT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _fail(code, kind, message, **extra):
    payload = {"error": kind, "message": message}
    payload.update(extra)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _load_task(args, need_agents=True):
    domain = parse_domain(Path(args.domain).read_text())
    task = parse_problem(Path(args.problem).read_text(), domain)
    if getattr(args, "agents", None):
        task = task.with_agents(parse_agents(Path(args.agents).read_text()))
    elif need_agents:
        raise FairplanError("this command needs --agents (one object name per line)")
    return task


def _parse_fact(text):
    return tuple(text.strip().lstrip("(").rstrip(")").split())


def cmd_assign(args):
    task = _load_task(args)
    scheme = FairnessScheme.parse(args.scheme)
    ground_task = ground(task)
    if not task.assignable_goals:
        print("warning: every goal already holds initially; nothing to assign",
              file=sys.stderr)
    if args.method == "milp":
        result = solve(build_model(ground_task, scheme, args.priority_weight))
    else:
        result = contract_net_assign(ground_task, scheme, args.priority_weight)
    payload = {
        "version": 1,
        "scheme": scheme.value,
        "method": result.method,
        "priority-weight": result.priority_weight,
        "assignment": {fact_str(g): a for g, a in sorted(result.assignment.items())},
        "objective": {
            "fairness-value": result.fairness_value,
            "heuristic-cost": result.heuristic_cost,
            "min-goals": result.min_goals,
            "max-goals": result.max_goals,
            "min-workload": result.min_workload,
            "max-workload": result.max_workload,
        },
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_compile(args):
    if args.mode == "labeled" and not args.assignment:
        return _fail(USAGE_EXIT, "usage", "labeled mode needs --assignment FILE")
    if args.mode == "fair" and not args.scheme:
        return _fail(USAGE_EXIT, "usage", "fair mode needs --scheme")
    task = _load_task(args)
    if args.mode == "labeled":
        data = json.loads(Path(args.assignment).read_text())
        assignment = {_parse_fact(g): a for g, a in data["assignment"].items()}
        labeled = compile_labeled(task, assignment)
        out_task = labeled.task
        print(f"labeled predicates: {len(labeled.labeled_goals)}")
        print(f"done flags: {len(labeled.done_flags)}")
        print(f"updated schemas: {len(labeled.updated_schemas)}")
    else:
        scheme = FairnessScheme.parse(args.scheme)
        compiled = compile_fair(task, scheme, args.priority_weight,
                                cost_mode=args.cost_mode)
        out_task = compiled.task
        print(f"partitions: {len(compiled.partitions)}")
        print(f"reward schemas: {len(compiled.reward_partitions)}")
        print(f"number objects: {len(compiled.number_objects)}")
        print(f"updated schemas: {len(compiled.updated_arity)}")
    Path(args.out_domain).write_text(emit_domain(out_task))
    Path(args.out_problem).write_text(emit_problem(out_task))
    return 0


def cmd_evaluate(args):
    task = _load_task(args)
    ground_task = ground(task)
    plan = parse_plan(Path(args.plan).read_text(), ground_task)
    try:
        trace = execute(ground_task, plan)
    except InvalidPlan as exc:
        payload = {
            "version": 1,
            "valid": False,
            "failing-step": exc.step,
            "missing": [fact_str(f) for f in exc.missing],
            "message": str(exc),
        }
    else:
        report = fairness_report(ground_task, trace)
        payload = {"version": 1, "valid": True, "report": report.to_json_dict()}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_solve(args):
    task = _load_task(args, need_agents=False)
    ground_task = ground(task)
    search = breadth_first_plan if args.search == "bfs" else uniform_cost_plan
    try:
        plan = search(ground_task, state_bound=args.state_bound)
    except SearchBoundExceeded as exc:
        return _fail(SOLVER_EXIT, "search-bound-exceeded", str(exc))
    if plan is None:
        return _fail(SOLVER_EXIT, "unsolvable", "no plan exists for this task")
    Path(args.plan_out).write_text(emit_plan(plan))
    print(f"plan: {len(plan)} steps, cost {plan.cost}")
    return 0


def cmd_generate(args):
    task = generate_warehouse(
        width=args.width,
        height=args.height,
        agents=args.agents,
        work_locations=args.work_locations,
        black_locations=args.black_locations,
        hammers=args.hammers,
        seed=args.seed,
    )
    Path(args.out_domain).write_text(emit_domain(task))
    Path(args.out_problem).write_text(emit_problem(task))
    Path(args.out_agents).write_text("\n".join(task.agents) + "\n")
    print(f"generated {task.problem_name}")
    return 0


def cmd_score(args):
    records = load_records(args.records)
    if not records:
        raise FairplanError(f"no records under {args.records}")
    table = score_table(records)
    run_dir = Path(args.records)
    (run_dir / "scores.json").write_text(table.to_json())
    (run_dir / "scores.md").write_text(table.to_markdown())
    print(f"scored {len(records)} records into {run_dir / 'scores.json'}")
    return 0


def cmd_bench(args):
    config = json.loads(Path(args.config).read_text())
    out_dir = args.out or config.get("output")
    if not out_dir:
        raise FairplanError("bench needs --out or an \"output\" entry in the config")
    table = run_bench(config, out_dir, base_dir=Path(args.config).parent)
    for approach in table.approaches:
        coverage = int(table.groups["all-problems"][approach]["coverage"])
        print(f"{approach}: coverage {coverage}")
    return 0


def build_parser():
    parser = _Parser(
        prog="fairplan",
        description="Fair goal allocation and plan-fairness compilations for "
        "cooperative multi-agent planning tasks.",
        epilog=(
            "PDDL dialect: :typing, = literals, when-conditional effects and "
            "(increase (total-cost) ...) action costs; agents arrive as a side "
            "file of object names, one per line."
        ),
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add_task_args(p, agents_required=True):
        p.add_argument("--domain", required=True, help="domain PDDL file")
        p.add_argument("--problem", required=True, help="problem PDDL file")
        p.add_argument("--agents", required=agents_required,
                       help="agent list file (one object name per line)")

    p = sub.add_parser("assign", help="pre-assign goals to agents")
    add_task_args(p)
    p.add_argument("--scheme", required=True,
                   choices=[s.value for s in FairnessScheme])
    p.add_argument("--method", choices=["milp", "contract-net"], default="milp")
    p.add_argument("--priority-weight", type=int, default=1000)
    p.add_argument("--out", help="assignment JSON output (default stdout)")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("compile", help="compile a task (labeled or fair mode)")
    add_task_args(p)
    p.add_argument("--mode", required=True, choices=["labeled", "fair"])
    p.add_argument("--assignment", help="assignment JSON (labeled mode)")
    p.add_argument("--scheme", choices=[s.value for s in FairnessScheme],
                   help="fairness scheme (fair mode; goal-oriented only)")
    p.add_argument("--priority-weight", type=int, default=1000)
    p.add_argument("--cost-mode", choices=["fluent", "flat"], default="fluent")
    p.add_argument("--out-domain", required=True)
    p.add_argument("--out-problem", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("evaluate", help="validate a plan and report fairness")
    add_task_args(p)
    p.add_argument("--plan", required=True, help="plan file (IPC format)")
    p.add_argument("--out", help="report JSON output (default stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("solve", help="run the built-in planner on a task")
    add_task_args(p, agents_required=False)
    p.add_argument("--search", choices=["bfs", "ucs"], default="bfs")
    p.add_argument("--state-bound", type=int, default=1_000_000)
    p.add_argument("--plan-out", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="generate a warehouse task")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--work-locations", type=int, required=True)
    p.add_argument("--black-locations", type=int, default=0)
    p.add_argument("--hammers", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-domain", required=True)
    p.add_argument("--out-problem", required=True)
    p.add_argument("--out-agents", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("score", help="rebuild score tables from run records")
    p.add_argument("--records", required=True, help="run directory")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="run a full approach x task matrix")
    p.add_argument("--config", required=True, help="bench config (JSON)")
    p.add_argument("--out", help="run directory (overrides config output)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return USAGE_EXIT
    try:
        return args.func(args)
    except SearchBoundExceeded as exc:
        return _fail(SOLVER_EXIT, "search-bound-exceeded", str(exc))
    except FairplanError as exc:
        kind = type(exc).__name__
        kebab = "".join("-" + c.lower() if c.isupper() else c for c in kind).lstrip("-")
        extra = {}
        if hasattr(exc, "goal"):
            extra["goal"] = fact_str(exc.goal)
        return _fail(INPUT_EXIT, kebab, str(exc), **extra)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        return _fail(INPUT_EXIT, "input-error", str(exc))


if __name__ == "__main__":
    sys.exit(main())
