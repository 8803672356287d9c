"""Joint goal-allocation-and-planning compilation.

The task is extended with symbolic per-agent goal counters and, for every
possible distribution of the assignable goals over the agents (a restricted
integer partition), a reward action whose cost prices that distribution
under the chosen fairness scheme. The single goal becomes an artificial end
atom only reward actions can achieve, and the metric minimizes total cost,
so a cost-optimal plan picks the best affordable distribution first and the
cheapest base plan second.

Only goal-oriented schemes compile: goal counts are bounded a priori while
per-agent action costs are not.
"""

from dataclasses import dataclass, replace

from .assignment import FairnessScheme
from .errors import CompilationError
from .grounding import Plan
from .labeling import done_flag_name, match_achievers
from .pddl.model import (
    EQUALS,
    ActionSchema,
    Atom,
    ConditionalEffect,
    FunctionTerm,
    Literal,
    Predicate,
    Task,
    TypedVar,
    fact_str,
    fresh_name,
    is_variable,
)

REWARD_PREFIX = "__give_min_reward_"
MIN_COST_FUNCTION = "min-associated-cost"
NUMBER_TYPE = "number"


def restricted_partitions(goals, agents):
    """All multisets of ``agents`` nonnegative integers summing to ``goals``,
    each in nondecreasing order; zero parts allowed."""
    if agents < 1:
        raise ValueError("need at least one part")
    if goals < 0:
        raise ValueError("goal count cannot be negative")

    def parts(total, slots, minimum):
        if slots == 1:
            yield (total,)
            return
        for first in range(minimum, total // slots + 1):
            for rest in parts(total - first, slots - 1, first):
                yield (first,) + rest

    return tuple(parts(goals, agents, 0))


def omega(scheme, partition, goal_count, priority_weight):
    """Reward cost of finishing with the given goal distribution."""
    if scheme is FairnessScheme.GOAL_MAXIMIN:
        return (goal_count - min(partition)) * priority_weight
    if scheme is FairnessScheme.GOAL_PROPEQ:
        return (max(partition) - min(partition)) * priority_weight
    raise CompilationError(
        f"scheme {scheme.value} is workload-oriented; only goal-oriented "
        "schemes have a bounded distribution space to price"
    )


@dataclass(frozen=True, eq=False)
class CompiledFairTask:
    task: Task
    scheme: FairnessScheme
    priority_weight: int
    partitions: tuple
    reward_partitions: dict  # reward schema name -> partition
    updated_arity: dict  # updated schema name -> original parameter count
    done_flags: dict  # goal fact -> flag name
    counter_predicate: str
    next_predicate: str
    end_predicate: str
    number_objects: tuple
    omega_costs: dict  # partition -> cost
    renamed_params: dict  # schema name -> (n1 var, n2 var), when not the defaults


def compile_fair(task, scheme, priority_weight=1000, cost_mode="fluent"):
    """Compile the joint task. ``cost_mode`` picks how reward costs reach the
    metric: ``"fluent"`` keys them on a numeric function of the partition's
    minimum (goal-maximin only; the spread of a proportional-equality
    partition is not a function of its minimum), ``"flat"`` writes plain
    integer costs into the reward actions."""
    if cost_mode not in ("fluent", "flat"):
        raise ValueError(f"unknown cost mode {cost_mode!r}")
    if not task.agents:
        raise CompilationError("task has no agents")
    assignable = sorted(task.assignable_goals)
    if not assignable:
        raise CompilationError("no assignable goals: nothing to distribute")
    if not scheme.goal_oriented:
        omega(scheme, (0,), 0, priority_weight)  # raises with the explanation

    matches, achieved = match_achievers(task, assignable)
    unachievable = [g for g in assignable if g not in achieved]
    if unachievable:
        raise CompilationError(
            f"missing achiever schema for goal {fact_str(unachievable[0])}"
        )

    goal_count = len(assignable)
    use_fluent = cost_mode == "fluent" and scheme is FairnessScheme.GOAL_MAXIMIN

    number_type = fresh_name(NUMBER_TYPE, task.types.types)
    type_declarations = [(number_type, "object")]
    agent_types = set(task.agent_types)
    if len(agent_types) == 1:
        agent_type = next(iter(agent_types))
    else:
        agent_type = fresh_name("agent", task.types.types | {number_type})
        type_declarations.append((agent_type, "object"))
        type_declarations.extend((t, agent_type) for t in sorted(agent_types))
    types = task.types.extended(type_declarations)

    prefix = "n" if not any(f"n{i}" in task.objects for i in range(goal_count + 2)) else "gcnum"
    numbers = tuple(f"{prefix}{i}" for i in range(goal_count + 2))

    taken = {p.name for p in task.predicates} | {f.name for f in task.functions}
    counter = fresh_name("n_goal_achieved", taken)
    taken.add(counter)
    next_name = fresh_name("next", taken)
    taken.add(next_name)
    end_name = fresh_name("end", taken)
    taken.add(end_name)
    done_flags = {}
    flag_preds = []
    for goal in assignable:
        flag = fresh_name(done_flag_name(goal), taken)
        taken.add(flag)
        done_flags[goal] = flag
        flag_preds.append(Predicate(flag))

    new_preds = [
        Predicate(counter, (TypedVar("?a", agent_type), TypedVar("?n", number_type))),
        Predicate(next_name, (TypedVar("?n1", number_type), TypedVar("?n2", number_type))),
        Predicate(end_name),
    ]
    functions = task.functions
    if use_fluent:
        functions = functions + (
            Predicate(fresh_name(MIN_COST_FUNCTION, taken), (TypedVar("?n", number_type),)),
        )
    cost_fn = functions[-1].name if use_fluent else None

    schemas = []
    updated_arity = {}
    renamed = {}
    for schema in task.schemas:
        explicit_cost = task.schema_cost(schema)
        found = matches.get(schema.name)
        if not found:
            schemas.append(replace(schema, cost=explicit_cost))
            continue
        param_names = set(schema.param_names)
        n1 = fresh_name("?n1", param_names)
        n2 = fresh_name("?n2", param_names | {n1})
        if (n1, n2) != ("?n1", "?n2"):
            renamed[schema.name] = (n1, n2)
        agent_var = schema.params[0].name
        effects = []
        for goal, atom in found:
            condition = [Literal(Atom(done_flags[goal]), positive=False)]
            seen = set()
            for term, obj in zip(atom.args, goal[1:]):
                if is_variable(term) and (term, obj) not in seen:
                    seen.add((term, obj))
                    condition.append(Literal(Atom(EQUALS, (term, obj))))
            effect = [
                Literal(Atom(counter, (agent_var, n1)), positive=False),
                Literal(Atom(counter, (agent_var, n2))),
                Literal(Atom(done_flags[goal])),
            ]
            effects.append(ConditionalEffect(tuple(condition), tuple(effect)))
        updated_arity[schema.name] = len(schema.params)
        schemas.append(
            replace(
                schema,
                params=schema.params
                + (TypedVar(n1, number_type), TypedVar(n2, number_type)),
                precondition=schema.precondition
                + (
                    Literal(Atom(counter, (agent_var, n1))),
                    Literal(Atom(next_name, (n1, n2))),
                ),
                conditional=schema.conditional + tuple(effects),
                cost=explicit_cost,
            )
        )

    partitions = restricted_partitions(goal_count, len(task.agents))
    omega_costs = {p: omega(scheme, p, goal_count, priority_weight) for p in partitions}
    reward_partitions = {}
    for partition in partitions:
        name = REWARD_PREFIX + "-".join(str(v) for v in partition)
        reward_partitions[name] = partition
        params = tuple(TypedVar(f"?a{i}", agent_type) for i in range(len(task.agents)))
        pre = [Literal(Atom(g[0], tuple(g[1:]))) for g in task.goals]
        pre += [Literal(Atom(flag)) for flag in done_flags.values()]
        pre += [
            Literal(Atom(EQUALS, (params[i].name, params[j].name)), positive=False)
            for i in range(len(params))
            for j in range(i + 1, len(params))
        ]
        pre += [
            Literal(Atom(counter, (params[i].name, numbers[partition[i]])))
            for i in range(len(partition))
        ]
        cost = (
            FunctionTerm(cost_fn, (numbers[min(partition)],))
            if use_fluent
            else omega_costs[partition]
        )
        schemas.append(
            ActionSchema(
                name=name,
                params=params,
                precondition=tuple(pre),
                add=(Atom(end_name),),
                cost=cost,
            )
        )

    objects = dict(task.objects)
    for n in numbers:
        objects[n] = number_type

    init = set(task.init)
    init.update((next_name, numbers[i], numbers[i + 1]) for i in range(len(numbers) - 1))
    init.update((counter, agent, numbers[0]) for agent in task.agents)

    numeric_init = dict(task.numeric_init)
    if use_fluent:
        for i, n in enumerate(numbers):
            numeric_init[(cost_fn, n)] = max(0, goal_count - i) * priority_weight

    new_task = Task(
        domain_name=task.domain_name,
        types=types,
        predicates=task.predicates + tuple(new_preds) + tuple(flag_preds),
        functions=functions,
        schemas=tuple(schemas),
        problem_name=task.problem_name,
        objects=objects,
        agents=task.agents,
        init=frozenset(init),
        numeric_init=numeric_init,
        goals=((end_name,),),
        metric_total_cost=True,
    )
    return CompiledFairTask(
        task=new_task,
        scheme=scheme,
        priority_weight=priority_weight,
        partitions=partitions,
        reward_partitions=reward_partitions,
        updated_arity=updated_arity,
        done_flags=done_flags,
        counter_predicate=counter,
        next_predicate=next_name,
        end_predicate=end_name,
        number_objects=numbers,
        omega_costs=omega_costs,
        renamed_params=renamed,
    )


def plan_partition(compiled, plan):
    """Goal distribution selected by a compiled-task plan (from its reward
    step), or None when the plan never applies a reward action."""
    for action in reversed(tuple(plan.steps)):
        if action.name in compiled.reward_partitions:
            return compiled.reward_partitions[action.name]
    return None


def project_plan(compiled, plan, original_ground):
    """Strip reward steps and drop the counter parameters from updated
    actions, resolving the result against the original ground task."""
    steps = []
    for action in plan.steps:
        if action.name in compiled.reward_partitions:
            continue
        arity = compiled.updated_arity.get(action.name)
        args = action.args if arity is None else action.args[:arity]
        key = (action.name,) + tuple(args)
        original = original_ground.action_index.get(key)
        if original is None:
            raise CompilationError(
                f"{fact_str(key)} does not exist in the original task"
            )
        steps.append(original)
    return Plan(tuple(steps))
