"""Abstract syntax for the typed PDDL fragment used by the toolkit.

The fragment covers typing, equality literals, conditional effects and
integer action costs expressed through the builtin ``total-cost`` fluent.
Ground atoms are plain tuples ``(symbol, arg1, ..., argk)`` so that states
can be cheap frozensets.
"""

import itertools
from dataclasses import dataclass, field, replace

from ..errors import PDDLSemanticError

ROOT_TYPE = "object"
EQUALS = "="
TOTAL_COST = "total-cost"

# Ground atom: (symbol, arg1, ..., argk).
Fact = tuple


def fact_str(fact):
    return "(" + " ".join(fact) + ")"


def is_variable(term):
    return term.startswith("?")


class TypeHierarchy:
    """Object types with declared supertypes, rooted at ``object``.

    Multiple declarations of the same type are merged: redundant ancestor
    declarations collapse into the most specific one, and independent
    supertypes are all kept (the hierarchy is a DAG ordered by reachability).
    Cyclic declarations are rejected.
    """

    def __init__(self, declarations=()):
        raw = {}
        for child, parent in declarations:
            if child == ROOT_TYPE:
                raise PDDLSemanticError(f"cannot re-declare root type {ROOT_TYPE!r}")
            raw.setdefault(child, set()).add(parent)
            if parent != ROOT_TYPE:
                raw.setdefault(parent, set()).add(ROOT_TYPE)
        self._ancestors = {}
        self._check_acyclic(raw)
        for name in raw:
            self._ancestors[name] = self._collect_ancestors(name, raw)
        # Keep only the most specific parents: drop any declared parent that
        # is an ancestor of another declared parent.
        self._parents = {}
        for name, parents in raw.items():
            minimal = {
                p for p in parents
                if not any(q != p and p in self._ancestors.get(q, ()) for q in parents)
            }
            self._parents[name] = frozenset(minimal - {name})

    @staticmethod
    def _check_acyclic(raw):
        visiting, done = set(), set()

        def visit(node, trail):
            if node in done or node == ROOT_TYPE:
                return
            if node in visiting:
                raise PDDLSemanticError(f"cyclic type declarations: {' -> '.join(trail + [node])}")
            visiting.add(node)
            for parent in raw.get(node, ()):
                visit(parent, trail + [node])
            visiting.discard(node)
            done.add(node)

        for name in raw:
            visit(name, [])

    @staticmethod
    def _collect_ancestors(name, raw):
        seen = set()
        stack = list(raw.get(name, ()))
        while stack:
            t = stack.pop()
            if t in seen:
                continue
            seen.add(t)
            stack.extend(raw.get(t, ()))
        seen.add(ROOT_TYPE)
        return frozenset(seen)

    @property
    def types(self):
        return frozenset(self._parents) | {ROOT_TYPE}

    def has(self, name):
        return name == ROOT_TYPE or name in self._parents

    def parents(self, name):
        return self._parents.get(name, frozenset())

    def ancestors(self, name):
        if name == ROOT_TYPE:
            return frozenset()
        if name not in self._ancestors:
            raise PDDLSemanticError(f"unknown type {name!r}")
        return self._ancestors[name]

    def is_subtype(self, name, ancestor):
        """Reflexive: every type is a subtype of itself and of ``object``."""
        if name == ancestor or ancestor == ROOT_TYPE:
            return self.has(name)
        return ancestor in self.ancestors(name)

    def compatible(self, a, b):
        """True when one type is an ancestor of the other (bindings can overlap)."""
        return self.is_subtype(a, b) or self.is_subtype(b, a)

    def declarations(self):
        """Minimal (child, parent) pairs, sorted; suitable for printing."""
        return tuple(
            (child, parent)
            for child in sorted(self._parents)
            for parent in sorted(self._parents[child])
        )

    def extended(self, declarations):
        return TypeHierarchy(self.declarations() + tuple(declarations))

    def __eq__(self, other):
        return isinstance(other, TypeHierarchy) and self._parents == other._parents

    def __repr__(self):
        return f"TypeHierarchy({self.declarations()!r})"


@dataclass(frozen=True, order=True)
class TypedVar:
    name: str  # includes the leading '?'
    type: str = ROOT_TYPE


@dataclass(frozen=True, order=True)
class Predicate:
    name: str
    params: tuple = ()

    @property
    def arity(self):
        return len(self.params)


@dataclass(frozen=True, order=True)
class Atom:
    """Possibly-lifted atom; arguments are variables ('?x') or object names."""

    symbol: str
    args: tuple = ()

    def ground(self, binding):
        return (self.symbol,) + tuple(binding.get(a, a) for a in self.args)

    def substitute(self, binding):
        return Atom(self.symbol, tuple(binding.get(a, a) for a in self.args))

    @property
    def is_ground(self):
        return not any(is_variable(a) for a in self.args)

    def as_fact(self):
        return (self.symbol,) + tuple(self.args)

    def __str__(self):
        return fact_str(self.as_fact())


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def negate(self):
        return Literal(self.atom, not self.positive)

    def substitute(self, binding):
        return Literal(self.atom.substitute(binding), self.positive)

    def __str__(self):
        return str(self.atom) if self.positive else f"(not {self.atom})"


@dataclass(frozen=True, order=True)
class FunctionTerm:
    """Reference to a numeric fluent, e.g. (min-associated-cost n0)."""

    symbol: str
    args: tuple = ()

    def __str__(self):
        return fact_str((self.symbol,) + tuple(self.args))


def _sorted_tuple(items):
    return tuple(sorted(items))


@dataclass(frozen=True)
class ConditionalEffect:
    """(when C E): condition literals, effect literals (positive=add)."""

    condition: tuple
    effect: tuple

    def __post_init__(self):
        object.__setattr__(self, "condition", _sorted_tuple(self.condition))
        object.__setattr__(self, "effect", _sorted_tuple(self.effect))

    def _key(self):
        return (self.condition, self.effect)


@dataclass(frozen=True)
class ActionSchema:
    """Lifted action. Literal sets are canonically sorted on construction.

    ``cost`` is an explicit integer, a FunctionTerm, or None when the schema
    declares no ``(increase (total-cost) ...)`` effect.
    """

    name: str
    params: tuple = ()
    precondition: tuple = ()  # positive atoms plus equality literals
    add: tuple = ()
    delete: tuple = ()
    conditional: tuple = ()
    cost: object = None

    def __post_init__(self):
        object.__setattr__(self, "precondition", _sorted_tuple(self.precondition))
        object.__setattr__(self, "add", _sorted_tuple(self.add))
        object.__setattr__(self, "delete", _sorted_tuple(self.delete))
        object.__setattr__(
            self, "conditional", tuple(sorted(self.conditional, key=ConditionalEffect._key))
        )

    @property
    def param_names(self):
        return tuple(p.name for p in self.params)

    def param_type(self, var):
        for p in self.params:
            if p.name == var:
                return p.type
        return None


@dataclass(frozen=True, eq=False)
class Task:
    """A lifted multi-agent planning task (domain plus, optionally, problem).

    ``agents`` lists the acting objects; it arrives from a side file or a
    generator, never from the PDDL text itself.
    """

    domain_name: str
    types: TypeHierarchy
    predicates: tuple = ()
    functions: tuple = ()
    schemas: tuple = ()
    problem_name: str = None
    objects: dict = field(default_factory=dict)  # name -> declared type
    agents: tuple = ()
    init: frozenset = frozenset()
    numeric_init: dict = field(default_factory=dict)  # (fname, *args) -> int
    goals: tuple = ()  # declaration order preserved
    metric_total_cost: bool = False

    # -- lookups ---------------------------------------------------------

    def predicate(self, name):
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def function(self, name):
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def schema(self, name):
        for s in self.schemas:
            if s.name == name:
                return s
        return None

    def objects_of_type(self, type_name):
        return tuple(
            sorted(o for o, t in self.objects.items() if self.types.is_subtype(t, type_name))
        )

    # -- agents ----------------------------------------------------------

    def with_agents(self, names):
        names = tuple(names)
        for n in names:
            if n not in self.objects:
                raise PDDLSemanticError(f"agent {n!r} is not a declared object")
        return replace(self, agents=names)

    @property
    def agent_types(self):
        return tuple(sorted({self.objects[a] for a in self.agents}))

    def is_agent_type(self, type_name):
        """True when the type lies on an agent type's lineage (above or below)."""
        return any(self.types.compatible(type_name, t) for t in self.agent_types)

    # -- costs -----------------------------------------------------------

    @property
    def has_cost_model(self):
        return self.metric_total_cost or any(s.cost is not None for s in self.schemas)

    def schema_cost(self, schema):
        """Declared cost, or the fragment default (1 without a cost model, else 0)."""
        if schema.cost is not None:
            return schema.cost
        return 0 if self.has_cost_model else 1

    # -- goals -----------------------------------------------------------

    @property
    def assignable_goals(self):
        """Goals not already true in the initial state, in declaration order."""
        return tuple(g for g in self.goals if g not in self.init)


def semantically_equal(a, b):
    """Task equality up to declaration order (atom sets compared as sets).

    The agent list is not compared: it travels in a side file, so it cannot
    survive an emit/reparse cycle of the PDDL text."""
    return (
        a.domain_name == b.domain_name
        and a.problem_name == b.problem_name
        and a.types == b.types
        and set(a.predicates) == set(b.predicates)
        and set(a.functions) == set(b.functions)
        and {s.name: s for s in a.schemas} == {s.name: s for s in b.schemas}
        and dict(a.objects) == dict(b.objects)
        and a.init == b.init
        and dict(a.numeric_init) == dict(b.numeric_init)
        and set(a.goals) == set(b.goals)
        and a.metric_total_cost == b.metric_total_cost
    )


def check_well_typed_atom(task, atom, what="atom"):
    """Validate a ground atom against the predicate signature (arity and types)."""
    pred = task.predicate(atom[0])
    if pred is None:
        raise PDDLSemanticError(f"{what} uses unknown predicate {atom[0]!r}: {fact_str(atom)}")
    if len(atom) - 1 != pred.arity:
        raise PDDLSemanticError(
            f"{what} {fact_str(atom)} has arity {len(atom) - 1}, expected {pred.arity}"
        )
    for obj, param in zip(atom[1:], pred.params):
        if obj not in task.objects:
            raise PDDLSemanticError(f"{what} {fact_str(atom)} names undeclared object {obj!r}")
        if not task.types.is_subtype(task.objects[obj], param.type):
            raise PDDLSemanticError(
                f"{what} {fact_str(atom)}: object {obj!r} of type "
                f"{task.objects[obj]!r} does not fit parameter type {param.type!r}"
            )


def fresh_name(base, taken):
    """Deterministic fresh identifier not colliding with ``taken``."""
    if base not in taken:
        return base
    for i in itertools.count(2):
        candidate = f"{base}{i}"
        if candidate not in taken:
            return candidate
