from .model import (
    EQUALS,
    ROOT_TYPE,
    TOTAL_COST,
    ActionSchema,
    Atom,
    ConditionalEffect,
    FunctionTerm,
    Literal,
    Predicate,
    Task,
    TypedVar,
    TypeHierarchy,
    fact_str,
    fresh_name,
    is_variable,
    semantically_equal,
)
from .parser import parse_agents, parse_domain, parse_plan, parse_problem, parse_task
from .printer import emit_domain, emit_pddl, emit_plan, emit_problem

__all__ = [
    "EQUALS",
    "ROOT_TYPE",
    "TOTAL_COST",
    "ActionSchema",
    "Atom",
    "ConditionalEffect",
    "FunctionTerm",
    "Literal",
    "Predicate",
    "Task",
    "TypedVar",
    "TypeHierarchy",
    "fact_str",
    "fresh_name",
    "is_variable",
    "semantically_equal",
    "parse_agents",
    "parse_domain",
    "parse_plan",
    "parse_problem",
    "parse_task",
    "emit_domain",
    "emit_pddl",
    "emit_plan",
    "emit_problem",
]
