"""Fair goal allocation and plan-fairness compilations for cooperative
multi-agent planning."""

from .assignment import (
    AssignmentModel,
    FairnessScheme,
    GoalAssignment,
    assignable_goals,
    brute_force_assignment,
    build_model,
    solve,
)
from .contract_net import contract_net_assign
from .evaluation import FairnessReport, fairness_report, first_achievers
from .fair_compilation import (
    CompiledFairTask,
    compile_fair,
    omega,
    plan_partition,
    project_plan,
    restricted_partitions,
)
from .generator import generate_warehouse
from .grounding import GroundAction, GroundTask, Plan, PlanTrace, execute, ground
from .harness import (
    PlannerAdapter,
    RunRecord,
    ScoreTable,
    run_approach,
    run_bench,
    run_planner,
    score_table,
    time_score,
)
from .heuristics import AgentHeuristics, INFINITE, achievable, h_ff, restrict_to_agent
from .labeling import LabeledTask, compile_labeled, eff_pred_goal
from .pddl import (
    Task,
    emit_pddl,
    parse_agents,
    parse_domain,
    parse_plan,
    parse_problem,
    parse_task,
    semantically_equal,
)
from .search import breadth_first_plan, brute_force_plan, uniform_cost_plan

__version__ = "0.1.0"
