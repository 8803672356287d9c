"""Deterministic PDDL emission: equal tasks print byte-identically."""

from .model import TOTAL_COST, FunctionTerm, fact_str


def _typed_params(params):
    return " ".join(f"{p.name} - {p.type}" for p in params)


def _literal(lit):
    return str(lit)


def _conditional(effect):
    cond = " ".join(_literal(l) for l in effect.condition)
    eff = " ".join(_literal(l) for l in effect.effect)
    return f"(when (and {cond}) (and {eff}))"


def _cost_effect(cost):
    if isinstance(cost, FunctionTerm):
        return f"(increase ({TOTAL_COST}) {cost})"
    return f"(increase ({TOTAL_COST}) {cost})"


def emit_domain(task):
    lines = [f"(define (domain {task.domain_name})"]
    lines.append("(:requirements :typing)")

    declarations = task.types.declarations()
    if declarations:
        lines.append("(:types")
        for child, parent in declarations:
            lines.append(f"  {child} - {parent}")
        lines.append(")")

    lines.append("(:predicates")
    for pred in task.predicates:
        entry = f"({pred.name}"
        if pred.params:
            entry += " " + _typed_params(pred.params)
        lines.append(f"  {entry})")
    lines.append(")")

    if task.functions:
        lines.append("(:functions")
        for fn in task.functions:
            entry = f"({fn.name}"
            if fn.params:
                entry += " " + _typed_params(fn.params)
            lines.append(f"  {entry})")
        lines.append(")")

    for schema in task.schemas:
        lines.append("")
        lines.append(f"(:action {schema.name}")
        lines.append(f"  :parameters ({_typed_params(schema.params)})")
        lines.append("  :precondition (and")
        for lit in schema.precondition:
            lines.append(f"    {_literal(lit)}")
        lines.append("  )")
        lines.append("  :effect (and")
        for atom in schema.add:
            lines.append(f"    {atom}")
        for atom in schema.delete:
            lines.append(f"    (not {atom})")
        for effect in schema.conditional:
            lines.append(f"    {_conditional(effect)}")
        if schema.cost is not None:
            lines.append(f"    {_cost_effect(schema.cost)}")
        lines.append("  )")
        lines.append(")")

    lines.append(")")
    return "\n".join(lines) + "\n"


def emit_problem(task):
    name = task.problem_name or f"{task.domain_name}-problem"
    lines = [f"(define (problem {name})"]
    lines.append(f"(:domain {task.domain_name})")

    lines.append("(:objects")
    for obj in sorted(task.objects):
        lines.append(f"  {obj} - {task.objects[obj]}")
    lines.append(")")

    lines.append("(:init")
    for fact in sorted(task.init):
        lines.append(f"  {fact_str(fact)}")
    for key in sorted(task.numeric_init):
        lines.append(f"  (= {fact_str(key)} {task.numeric_init[key]})")
    if task.metric_total_cost:
        lines.append(f"  (= ({TOTAL_COST}) 0)")
    lines.append(")")

    lines.append("(:goal (and")
    for goal in task.goals:
        lines.append(f"  {fact_str(goal)}")
    lines.append("))")

    if task.metric_total_cost:
        lines.append(f"(:metric minimize ({TOTAL_COST}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


def emit_pddl(task):
    """Domain and problem texts; reparsing them yields a semantically equal task."""
    return emit_domain(task), emit_problem(task)


def emit_plan(plan):
    """IPC plan format: one action per line plus a cost trailer."""
    lines = [action.ident for action in plan.steps]
    lines.append(f"; cost = {plan.cost}")
    return "\n".join(lines) + "\n"
