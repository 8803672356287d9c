"""Instantiation of lifted tasks and execution of ground plans.

States are frozensets of facts; a fact is a tuple ``(symbol, arg1, ...)``.
Grounding prunes with static predicates (those no effect ever touches) and
resolves equality literals at instantiation time, so ground actions carry
only plain atoms.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidPlan, PDDLSemanticError
from .pddl.model import EQUALS, FunctionTerm, fact_str


@dataclass(frozen=True)
class GroundConditional:
    pos: frozenset
    neg: frozenset
    add: frozenset
    delete: frozenset

    def fires(self, state):
        return self.pos <= state and not (self.neg & state)


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple
    agent: object  # executing agent object name, or None
    pre: frozenset
    add: frozenset
    delete: frozenset
    conditional: tuple = ()
    cost: int = 1

    @property
    def key(self):
        return (self.name,) + self.args

    @property
    def ident(self):
        return fact_str(self.key)

    def applicable(self, state):
        return self.pre <= state

    def apply(self, state):
        """State transition; inapplicable actions leave the state unchanged.

        Conditional effects are evaluated against the pre-transition state,
        and deletes are applied before adds."""
        if not self.applicable(state):
            return state
        add = set(self.add)
        delete = set(self.delete)
        for eff in self.conditional:
            if eff.fires(state):
                add |= eff.add
                delete |= eff.delete
        return frozenset((state - delete) | add)


@dataclass(frozen=True)
class Plan:
    steps: tuple
    declared_cost: int = None

    @property
    def cost(self):
        return sum(a.cost for a in self.steps)

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class PlanTrace:
    """A validated execution: states[i] is the state before steps[i]."""

    steps: tuple
    states: tuple  # len(steps) + 1 entries
    fired: tuple  # per step, indices of conditional effects that fired
    cost: int

    @property
    def final_state(self):
        return self.states[-1]


@dataclass(frozen=True, eq=False)
class GroundTask:
    facts: frozenset
    actions: tuple  # canonical (name, args) order
    init: frozenset
    goals: tuple  # declaration order preserved
    agents: tuple
    metric_total_cost: bool = False

    @cached_property
    def action_index(self):
        return {a.key: a for a in self.actions}

    @cached_property
    def goal_set(self):
        return frozenset(self.goals)

    def replace_actions(self, actions):
        return GroundTask(
            facts=self.facts,
            actions=tuple(actions),
            init=self.init,
            goals=self.goals,
            agents=self.agents,
            metric_total_cost=self.metric_total_cost,
        )


def static_symbols(task):
    """Predicate symbols no effect (conditional included) ever adds or deletes."""
    dynamic = set()
    for schema in task.schemas:
        dynamic.update(a.symbol for a in schema.add)
        dynamic.update(a.symbol for a in schema.delete)
        for eff in schema.conditional:
            dynamic.update(lit.atom.symbol for lit in eff.effect)
    return {p.name for p in task.predicates} - dynamic


def _resolve_cost(task, schema, binding):
    cost = task.schema_cost(schema)
    if isinstance(cost, FunctionTerm):
        key = (cost.symbol,) + tuple(binding.get(a, a) for a in cost.args)
        if key not in task.numeric_init:
            raise PDDLSemanticError(
                f"action {schema.name!r} reads undefined fluent {fact_str(key)}"
            )
        cost = task.numeric_init[key]
    if cost < 0:
        raise PDDLSemanticError(f"action {schema.name!r} has negative cost {cost}")
    return cost


def _ground_schema(task, schema, statics, out):
    candidates = [task.objects_of_type(p.type) for p in schema.params]
    if any(not c for c in candidates):
        return
    agent_first = bool(schema.params) and task.is_agent_type(schema.params[0].type)
    agent_set = set(task.agents)

    eq_pre = [l for l in schema.precondition if l.atom.symbol == EQUALS]
    atom_pre = [l.atom for l in schema.precondition if l.atom.symbol != EQUALS]

    for combo in itertools.product(*candidates):
        binding = dict(zip(schema.param_names, combo))

        ok = True
        for lit in eq_pre:
            left, right = (binding.get(a, a) for a in lit.atom.args)
            if (left == right) != lit.positive:
                ok = False
                break
        if not ok:
            continue

        pre = frozenset(a.ground(binding) for a in atom_pre)
        if any(f[0] in statics and f not in task.init for f in pre):
            continue

        add = set(a.ground(binding) for a in schema.add)
        delete = set(a.ground(binding) for a in schema.delete)
        conditional = []
        for eff in schema.conditional:
            pos, neg = set(), set()
            impossible = False
            for lit in eff.condition:
                if lit.atom.symbol == EQUALS:
                    left, right = (binding.get(a, a) for a in lit.atom.args)
                    if (left == right) != lit.positive:
                        impossible = True
                        break
                    continue
                fact = lit.atom.ground(binding)
                if fact[0] in statics:
                    holds = fact in task.init
                    if holds != lit.positive:
                        impossible = True
                        break
                    continue
                (pos if lit.positive else neg).add(fact)
            if impossible:
                continue
            eff_add = frozenset(l.atom.ground(binding) for l in eff.effect if l.positive)
            eff_del = frozenset(l.atom.ground(binding) for l in eff.effect if not l.positive)
            if not pos and not neg:
                add |= eff_add
                delete |= eff_del
            else:
                conditional.append(
                    GroundConditional(frozenset(pos), frozenset(neg), eff_add, eff_del)
                )

        agent = combo[0] if agent_first and combo and combo[0] in agent_set else None
        out.append(
            GroundAction(
                name=schema.name,
                args=tuple(combo),
                agent=agent,
                pre=pre,
                add=frozenset(add),
                delete=frozenset(delete),
                conditional=tuple(sorted(conditional, key=lambda c: (sorted(c.pos), sorted(c.neg)))),
                cost=_resolve_cost(task, schema, binding),
            )
        )


def ground(task):
    """Instantiate every schema over type-consistent substitutions.

    Actions whose static preconditions fail in the initial state are
    dropped, equality literals are decided here, and conditional effects
    with statically-true (statically-false) conditions are folded into the
    unconditional effects (dropped)."""
    statics = static_symbols(task)
    actions = []
    for schema in task.schemas:
        _ground_schema(task, schema, statics, actions)
    actions.sort(key=lambda a: a.key)

    facts = set(task.init) | set(task.goals)
    for a in actions:
        facts |= a.pre | a.add | a.delete
        for eff in a.conditional:
            facts |= eff.pos | eff.neg | eff.add | eff.delete

    return GroundTask(
        facts=frozenset(facts),
        actions=tuple(actions),
        init=frozenset(task.init),
        goals=tuple(task.goals),
        agents=tuple(task.agents),
        metric_total_cost=task.metric_total_cost,
    )


def execute(ground_task, plan):
    """Validate a plan step by step.

    Unlike the transition function (which leaves the state unchanged on an
    inapplicable action), validation rejects the plan at the first step
    whose preconditions do not hold, and requires the goals at the end."""
    steps = tuple(plan.steps) if isinstance(plan, Plan) else tuple(plan)
    state = ground_task.init
    states = [state]
    fired = []
    cost = 0
    for i, action in enumerate(steps):
        if not action.applicable(state):
            missing = sorted(action.pre - state)
            raise InvalidPlan(
                f"step {i}: {action.ident} is inapplicable; missing "
                + ", ".join(fact_str(f) for f in missing),
                step=i,
                missing=missing,
            )
        fired.append(
            tuple(j for j, eff in enumerate(action.conditional) if eff.fires(state))
        )
        state = action.apply(state)
        states.append(state)
        cost += action.cost
    missing_goals = [g for g in ground_task.goals if g not in state]
    if missing_goals:
        raise InvalidPlan(
            "goals not achieved: " + ", ".join(fact_str(g) for g in missing_goals),
            step=None,
            missing=missing_goals,
        )
    return PlanTrace(steps=steps, states=tuple(states), fired=tuple(fired), cost=cost)
