"""Compilation that bakes a goal assignment into the planning task.

Every assignable goal gets an agent-labeled twin predicate and a done
flag. Each action that can achieve the goal gains a conditional effect
which, on the first achievement only, records the acting agent in the
labeled atom. The labeled atoms for the assigned agents join the goals, so
plans are forced to realize exactly the given assignment.
"""

from dataclasses import dataclass, replace

from .errors import CompilationError
from .pddl.model import (
    EQUALS,
    Atom,
    ConditionalEffect,
    Literal,
    Predicate,
    Task,
    TypedVar,
    fact_str,
    fresh_name,
    is_variable,
)

AB_SUFFIX = "ab"
DONE_SUFFIX = "-done"


def done_flag_name(goal):
    """(at package1 s1) -> atpackage1-s1-done; pattern shared by both compilers."""
    return goal[0] + "-".join(goal[1:]) + DONE_SUFFIX


def eff_pred_goal(schema, goal, task):
    """The unconditional add effect through which ``schema`` can achieve
    ``goal``: an atom unifiable with the goal under a type-consistent,
    consistent binding, none of whose arguments is an agent-typed variable.

    Returns the lifted atom or None. At most one effect may qualify (one
    achievable goal predicate per action)."""
    if any(obj in task.agents for obj in goal[1:]):
        return None  # goals naming an agent have an owner a priori

    def dedicated_to_agents(type_name):
        return any(task.types.is_subtype(type_name, t) for t in task.agent_types)

    matches = []
    for atom in schema.add:
        if atom.symbol != goal[0] or len(atom.args) != len(goal) - 1:
            continue
        binding = {}
        ok = True
        for term, obj in zip(atom.args, goal[1:]):
            if is_variable(term):
                param_type = schema.param_type(term)
                if param_type is None or not task.types.is_subtype(
                    task.objects[obj], param_type
                ):
                    ok = False
                    break
                if binding.setdefault(term, obj) != obj:
                    ok = False
                    break
            elif term != obj:
                ok = False
                break
        if not ok:
            continue
        if any(
            is_variable(term) and dedicated_to_agents(schema.param_type(term))
            for term in atom.args
        ):
            continue
        matches.append(atom)
    if len(matches) > 1:
        raise CompilationError(
            f"action {schema.name!r} can achieve {fact_str(goal)} through "
            "several effects; one achievable goal predicate per action is assumed"
        )
    return matches[0] if matches else None


def _common_supertype(types, hierarchy):
    if len(types) == 1:
        return next(iter(types))
    shared = None
    for t in types:
        lineage = {t} | set(hierarchy.ancestors(t))
        shared = lineage if shared is None else shared & lineage
    # The most specific shared ancestor has the largest own ancestry.
    return max(shared, key=lambda t: (len(hierarchy.ancestors(t)), t))


def _first_achiever_effect(schema, goal, effect_atom, flag, labeled_atom_args, label_symbol):
    """Conditional effect firing exactly when this action first makes the
    goal true: all effect parameters pinned to the goal's objects, guarded
    by the goal's done flag (evaluated on the pre-transition state)."""
    condition = [Literal(Atom(flag), positive=False)]
    seen = set()
    for term, obj in zip(effect_atom.args, goal[1:]):
        if is_variable(term) and (term, obj) not in seen:
            seen.add((term, obj))
            condition.append(Literal(Atom(EQUALS, (term, obj))))
    effect = [Literal(Atom(flag))]
    if label_symbol is not None:
        effect.append(Literal(Atom(label_symbol, labeled_atom_args)))
    return ConditionalEffect(tuple(condition), tuple(effect))


@dataclass(frozen=True, eq=False)
class LabeledTask:
    task: Task
    assignment: dict  # goal fact -> agent
    labeled_goals: dict  # goal fact -> labeled ground atom
    done_flags: dict  # goal fact -> flag predicate name
    updated_schemas: tuple  # names of schemas that gained conditional effects


def match_achievers(task, goals):
    """Map each schema name to its [(goal, effect atom)] matches, plus the
    set of goals some schema can achieve."""
    matches = {}
    achieved = set()
    for schema in task.schemas:
        found = []
        for goal in goals:
            atom = eff_pred_goal(schema, goal, task)
            if atom is not None:
                found.append((goal, atom))
                achieved.add(goal)
        if found:
            if not schema.params or not task.is_agent_type(schema.params[0].type):
                raise CompilationError(
                    f"action {schema.name!r} achieves goals but its first "
                    "parameter is not agent-typed"
                )
            matches[schema.name] = found
    return matches, achieved


def compile_labeled(task, assignment):
    """Build the labeled task for a total assignment of the assignable goals."""
    if not task.agents:
        raise CompilationError("task has no agents")
    assignable = sorted(task.assignable_goals)
    extra = set(assignment) - set(assignable)
    if extra:
        raise CompilationError(
            f"assignment references non-assignable goal {fact_str(sorted(extra)[0])}"
        )
    missing = [g for g in assignable if g not in assignment]
    if missing:
        raise CompilationError(
            f"assignment is not total: {fact_str(missing[0])} is unassigned"
        )
    for goal, agent in assignment.items():
        if agent not in task.agents:
            raise CompilationError(f"{agent!r} (assigned {fact_str(goal)}) is not an agent")

    matches, achieved = match_achievers(task, assignable)
    unachievable = [g for g in assignable if g not in achieved]
    if unachievable:
        raise CompilationError(
            f"missing achiever schema for goal {fact_str(unachievable[0])}"
        )

    taken = {p.name for p in task.predicates} | {f.name for f in task.functions}
    # One labeled predicate per goal symbol; the agent slot takes the common
    # supertype of the achieving schemas' agent parameters.
    label_names = {}
    label_preds = []
    for symbol in sorted({g[0] for g in assignable}):
        agent_types = {
            task.schema(name).params[0].type
            for name, found in matches.items()
            if any(goal[0] == symbol for goal, _ in found)
        }
        agent_type = _common_supertype(agent_types, task.types)
        name = fresh_name(symbol + AB_SUFFIX, taken)
        taken.add(name)
        label_names[symbol] = name
        base = task.predicate(symbol)
        agent_var = fresh_name("?a", {p.name for p in base.params})
        label_preds.append(
            Predicate(name, base.params + (TypedVar(agent_var, agent_type),))
        )

    done_flags = {}
    flag_preds = []
    for goal in assignable:
        flag = fresh_name(done_flag_name(goal), taken)
        taken.add(flag)
        done_flags[goal] = flag
        flag_preds.append(Predicate(flag))

    schemas = []
    updated = []
    for schema in task.schemas:
        found = matches.get(schema.name)
        if not found:
            schemas.append(schema)
            continue
        effects = []
        for goal, atom in found:
            effects.append(
                _first_achiever_effect(
                    schema,
                    goal,
                    atom,
                    done_flags[goal],
                    atom.args + (schema.params[0].name,),
                    label_names[goal[0]],
                )
            )
        schemas.append(replace(schema, conditional=schema.conditional + tuple(effects)))
        updated.append(schema.name)

    labeled_goals = {
        goal: (label_names[goal[0]],) + tuple(goal[1:]) + (assignment[goal],)
        for goal in assignable
    }
    new_task = Task(
        domain_name=task.domain_name,
        types=task.types,
        predicates=task.predicates + tuple(label_preds) + tuple(flag_preds),
        functions=task.functions,
        schemas=tuple(schemas),
        problem_name=task.problem_name,
        objects=dict(task.objects),
        agents=task.agents,
        init=task.init,
        numeric_init=dict(task.numeric_init),
        goals=task.goals + tuple(labeled_goals[g] for g in assignable),
        metric_total_cost=False,
    )
    return LabeledTask(
        task=new_task,
        assignment=dict(assignment),
        labeled_goals=labeled_goals,
        done_flags=done_flags,
        updated_schemas=tuple(updated),
    )
