"""Fair pre-assignment of goals to agents.

Builds an assignment model over achievable (agent, goal) pairs, weighted by
single-agent relaxed-plan costs, and solves it exactly: first optimize the
chosen fairness term, then minimize the summed heuristic cost among the
fairness-optimal assignments. This two-level lexicographic order is what a
big-priority-weight single objective would express, without the overflow.
"""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .errors import SearchBoundExceeded, UnassignableGoal
from .heuristics import INFINITE, AgentHeuristics


class FairnessScheme(Enum):
    GOAL_MAXIMIN = "g-maximin"
    GOAL_PROPEQ = "g-propeq"
    WORKLOAD_MAXIMIN = "w-maximin"
    WORKLOAD_PROPEQ = "w-propeq"

    @property
    def goal_oriented(self):
        return self in (FairnessScheme.GOAL_MAXIMIN, FairnessScheme.GOAL_PROPEQ)

    @property
    def proportional(self):
        return self in (FairnessScheme.GOAL_PROPEQ, FairnessScheme.WORKLOAD_PROPEQ)

    @classmethod
    def parse(cls, text):
        for scheme in cls:
            if scheme.value == text:
                return scheme
        raise ValueError(
            f"unknown fairness scheme {text!r}; expected one of "
            + ", ".join(s.value for s in cls)
        )


def assignable_goals(ground):
    """Goals false in the initial state, in declaration order."""
    return tuple(g for g in ground.goals if g not in ground.init)


@dataclass(frozen=True, eq=False)
class AssignmentModel:
    """Decision model: binary pair variables restricted to achievable pairs.

    ``cost[(agent, goal)]`` holds the finite relaxed-plan values; goals are
    kept sorted so the solver's tie-break order is well defined."""

    agents: tuple
    goals: tuple
    cost: dict
    scheme: FairnessScheme
    priority_weight: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(sorted(self.agents)))
        object.__setattr__(self, "goals", tuple(sorted(self.goals)))
        if not self.agents:
            raise ValueError("assignment model needs at least one agent")
        for goal in self.goals:
            if not any((agent, goal) in self.cost for agent in self.agents):
                raise UnassignableGoal(goal)

    @cached_property
    def achievers(self):
        return {
            goal: tuple(a for a in self.agents if (a, goal) in self.cost)
            for goal in self.goals
        }


@dataclass(frozen=True, eq=False)
class GoalAssignment:
    """A total assignment of the assignable goals plus its objective report."""

    assignment: dict  # goal fact -> agent
    scheme: FairnessScheme
    fairness_value: int
    heuristic_cost: int
    min_goals: int
    max_goals: int
    min_workload: int
    max_workload: int
    priority_weight: int = 1000
    method: str = "milp"


def build_model(ground, scheme, priority_weight=1000, heuristics=None):
    """Assemble the model for a ground task; every assignable goal must have
    at least one agent that can achieve it under the relaxation."""
    oracle = heuristics or AgentHeuristics(ground)
    goals = assignable_goals(ground)
    cost = {}
    for goal in goals:
        for agent in sorted(ground.agents):
            value = oracle.value(agent, (goal,))
            if value != INFINITE:
                cost[(agent, goal)] = int(value)
    return AssignmentModel(
        agents=tuple(ground.agents),
        goals=goals,
        cost=cost,
        scheme=scheme,
        priority_weight=priority_weight,
    )


def _fairness_term(scheme, counts, work):
    min_g, max_g = min(counts.values()), max(counts.values())
    min_w, max_w = min(work.values()), max(work.values())
    term = {
        FairnessScheme.GOAL_MAXIMIN: min_g,
        FairnessScheme.GOAL_PROPEQ: min_g - max_g,
        FairnessScheme.WORKLOAD_MAXIMIN: min_w,
        FairnessScheme.WORKLOAD_PROPEQ: min_w - max_w,
    }[scheme]
    return term, (min_g, max_g, min_w, max_w)


def _finish(model, assignment, method):
    counts = {a: 0 for a in model.agents}
    work = {a: 0 for a in model.agents}
    total = 0
    for goal, agent in assignment.items():
        h = model.cost[(agent, goal)]
        counts[agent] += 1
        work[agent] += h
        total += h
    term, (min_g, max_g, min_w, max_w) = _fairness_term(model.scheme, counts, work)
    return GoalAssignment(
        assignment=dict(assignment),
        scheme=model.scheme,
        fairness_value=term,
        heuristic_cost=total,
        min_goals=min_g,
        max_goals=max_g,
        min_workload=min_w,
        max_workload=max_w,
        priority_weight=model.priority_weight,
        method=method,
    )


def solve(model):
    """Exact branch-and-bound over the assignment vector.

    Goals are branched in sorted order and agents tried in sorted order, so
    the first optimum found (and kept, since replacements require a strict
    improvement) is the lexicographically smallest optimal vector."""
    goals, agents, scheme = model.goals, model.agents, model.scheme
    n_agents = len(agents)
    achievers = model.achievers
    if not goals:
        return _finish(model, {}, "milp")

    # Suffix data for bounding: per agent, how many of the remaining goals it
    # could still take and at what summed cost; plus the cheapest completion.
    m = len(goals)
    rem_count = [dict.fromkeys(agents, 0) for _ in range(m + 1)]
    rem_cost = [dict.fromkeys(agents, 0) for _ in range(m + 1)]
    min_cost_suffix = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        goal = goals[i]
        for a in agents:
            hit = (a, goal) in model.cost
            rem_count[i][a] = rem_count[i + 1][a] + (1 if hit else 0)
            rem_cost[i][a] = rem_cost[i + 1][a] + (model.cost[(a, goal)] if hit else 0)
        min_cost_suffix[i] = min_cost_suffix[i + 1] + min(
            model.cost[(a, goal)] for a in achievers[goal]
        )

    counts = dict.fromkeys(agents, 0)
    work = dict.fromkeys(agents, 0)
    chosen = {}
    best = {"rank": None, "assignment": None}

    def fairness_bound(i):
        if scheme is FairnessScheme.GOAL_MAXIMIN:
            return min(counts[a] + rem_count[i][a] for a in agents)
        if scheme is FairnessScheme.GOAL_PROPEQ:
            ub_min = min(counts[a] + rem_count[i][a] for a in agents)
            lb_max = max(max(counts.values()), math.ceil(m / n_agents))
            return ub_min - lb_max
        if scheme is FairnessScheme.WORKLOAD_MAXIMIN:
            return min(work[a] + rem_cost[i][a] for a in agents)
        ub_min = min(work[a] + rem_cost[i][a] for a in agents)
        total_lb = sum(work.values()) + min_cost_suffix[i]
        lb_max = max(max(work.values()), math.ceil(total_lb / n_agents))
        return ub_min - lb_max

    def descend(i, cost_so_far):
        if i == m:
            term, _ = _fairness_term(scheme, counts, work)
            rank = (term, -cost_so_far)
            if best["rank"] is None or rank > best["rank"]:
                best["rank"] = rank
                best["assignment"] = dict(chosen)
            return
        if best["rank"] is not None:
            bound = (fairness_bound(i), -(cost_so_far + min_cost_suffix[i]))
            if bound <= best["rank"]:
                return
        goal = goals[i]
        for agent in achievers[goal]:
            h = model.cost[(agent, goal)]
            chosen[goal] = agent
            counts[agent] += 1
            work[agent] += h
            descend(i + 1, cost_so_far + h)
            counts[agent] -= 1
            work[agent] -= h
            del chosen[goal]

    descend(0, 0)
    return _finish(model, best["assignment"], "milp")


def enumerate_optimum(model, bound=10_000_000):
    """Plain enumeration over all achievable-respecting total assignments,
    with the same objective and tie-break as ``solve``."""
    achievers = model.achievers
    space = 1
    for goal in model.goals:
        space *= len(achievers[goal])
        if space > bound:
            raise SearchBoundExceeded(
                f"assignment space exceeds enumeration bound {bound}"
            )
    best_rank, best_assignment = None, {}
    for combo in itertools.product(*(achievers[g] for g in model.goals)):
        assignment = dict(zip(model.goals, combo))
        counts = dict.fromkeys(model.agents, 0)
        work = dict.fromkeys(model.agents, 0)
        total = 0
        for goal, agent in assignment.items():
            h = model.cost[(agent, goal)]
            counts[agent] += 1
            work[agent] += h
            total += h
        term, _ = _fairness_term(model.scheme, counts, work)
        rank = (term, -total)
        if best_rank is None or rank > best_rank:
            best_rank, best_assignment = rank, assignment
    return _finish(model, best_assignment, "milp")


def brute_force_assignment(ground, scheme, priority_weight=1000, bound=10_000_000,
                           heuristics=None):
    """Verification oracle: exhaustive optimum of the same model."""
    model = build_model(ground, scheme, priority_weight, heuristics)
    return enumerate_optimum(model, bound)


def dump_lp(model):
    """LP-format text of the model, for cross-checks with external solvers."""
    lines = ["Maximize"]
    k = model.priority_weight
    terms = []
    if model.scheme is FairnessScheme.GOAL_MAXIMIN:
        terms.append(f"{k} minG")
    elif model.scheme is FairnessScheme.GOAL_PROPEQ:
        terms.append(f"{k} minG - {k} maxG")
    elif model.scheme is FairnessScheme.WORKLOAD_MAXIMIN:
        terms.append(f"{k} minW")
    else:
        terms.append(f"{k} minW - {k} maxW")

    def var(agent, goal):
        flat = "_".join(goal).replace("-", "_")
        return f"x_{agent}_{flat}"

    for (agent, goal), h in sorted(model.cost.items()):
        terms.append(f"- {h} {var(agent, goal)}")
    lines.append(" obj: " + " ".join(terms))
    lines.append("Subject To")
    for i, goal in enumerate(model.goals):
        vars_ = " + ".join(var(a, goal) for a in model.achievers[goal])
        lines.append(f" assign{i}: {vars_} = 1")
    for j, agent in enumerate(model.agents):
        pairs = [(g, model.cost[(agent, g)]) for g in model.goals
                 if (agent, g) in model.cost]
        count_expr = " + ".join(var(agent, g) for g, _ in pairs) or "0 minG"
        if model.scheme.goal_oriented:
            lines.append(f" ming{j}: {count_expr} - minG >= 0")
            if model.scheme.proportional:
                lines.append(f" maxg{j}: {count_expr} - maxG <= 0")
        else:
            work_expr = " + ".join(f"{h} {var(agent, g)}" for g, h in pairs) or "0 minW"
            lines.append(f" minw{j}: {work_expr} - minW >= 0")
            if model.scheme.proportional:
                lines.append(f" maxw{j}: {work_expr} - maxW <= 0")
    lines.append("Binary")
    lines.append(" " + " ".join(var(a, g) for (a, g) in sorted(model.cost)))
    lines.append("End")
    return "\n".join(lines) + "\n"
