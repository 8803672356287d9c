"""Parsers for the supported PDDL dialect, plan files and agent lists.

The dialect is deliberately narrow: typing, equality literals, ``when``
conditional effects and ``(increase (total-cost) ...)`` cost effects.
Anything outside it is a hard error rather than a silent skip, because a
misread domain would corrupt every downstream transformation.
"""

import re
from dataclasses import dataclass

from ..errors import PDDLSemanticError, PDDLSyntaxError, PlanSyntaxError
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
    check_well_typed_atom,
    fact_str,
    is_variable,
)

SUPPORTED_REQUIREMENTS = {
    ":strips",
    ":typing",
    ":equality",
    ":conditional-effects",
    ":action-costs",
    ":fluents",
    ":numeric-fluents",
}


# ---------------------------------------------------------------------------
# S-expression layer


@dataclass(frozen=True)
class SExpr:
    """Either a symbol (``items is None``) or a parenthesised list."""

    value: str
    items: tuple
    line: int
    column: int

    @property
    def is_symbol(self):
        return self.items is None

    def head(self):
        if self.is_symbol or not self.items or not self.items[0].is_symbol:
            return None
        return self.items[0].value

    def fail(self, message):
        raise PDDLSyntaxError(message, self.line, self.column)


_TOKEN = re.compile(r"[^\s();]+")


def tokenize(text):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield (ch, line, col)
            col += 1
            i += 1
        else:
            m = _TOKEN.match(text, i)
            word = m.group(0)
            yield (word.lower(), line, col)
            col += len(word)
            i = m.end()
    yield (None, line, col)


def read_sexpr(text):
    """Parse a single top-level s-expression, rejecting trailing junk."""
    tokens = list(tokenize(text))
    pos = 0

    def parse():
        nonlocal pos
        tok, line, col = tokens[pos]
        if tok is None:
            raise PDDLSyntaxError("unexpected end of input", line, col)
        pos += 1
        if tok == "(":
            items = []
            while True:
                nxt, nline, ncol = tokens[pos]
                if nxt is None:
                    raise PDDLSyntaxError("unbalanced parentheses", nline, ncol)
                if nxt == ")":
                    pos += 1
                    return SExpr("", tuple(items), line, col)
                items.append(parse())
        if tok == ")":
            raise PDDLSyntaxError("unexpected ')'", line, col)
        return SExpr(tok, None, line, col)

    expr = parse()
    tok, line, col = tokens[pos]
    if tok is not None:
        raise PDDLSyntaxError(f"trailing input {tok!r}", line, col)
    return expr


def _symbols(exprs):
    out = []
    for e in exprs:
        if not e.is_symbol:
            e.fail("expected a name")
        out.append(e.value)
    return out


def parse_typed_list(exprs, what="entry"):
    """Parse ``a b - t c - u d`` into [(name, type)]; untyped names get object."""
    result = []
    pending = []
    i = 0
    while i < len(exprs):
        e = exprs[i]
        if not e.is_symbol:
            e.fail(f"expected {what} name")
        if e.value == "-":
            if not pending:
                e.fail("dangling '-' in typed list")
            if i + 1 >= len(exprs) or not exprs[i + 1].is_symbol:
                e.fail("missing type after '-'")
            type_name = exprs[i + 1].value
            result.extend((name, type_name) for name in pending)
            pending = []
            i += 2
        else:
            pending.append(e.value)
            i += 1
    result.extend((name, ROOT_TYPE) for name in pending)
    return result


# ---------------------------------------------------------------------------
# Domain


class _DomainReader:
    def __init__(self, expr):
        self.expr = expr
        self.types = TypeHierarchy()
        self.predicates = []
        self.functions = []
        self.schemas = []
        self.name = None

    def read(self):
        expr = self.expr
        if expr.head() != "define":
            expr.fail("expected (define (domain ...) ...)")
        header = expr.items[1]
        if header.head() != "domain" or len(header.items) != 2:
            header.fail("expected (domain NAME)")
        self.name = header.items[1].value
        for section in expr.items[2:]:
            key = section.head()
            if key == ":requirements":
                self._requirements(section)
            elif key == ":types":
                self._types(section)
            elif key == ":predicates":
                self._predicates(section)
            elif key == ":functions":
                self._functions(section)
            elif key == ":action":
                self._action(section)
            else:
                section.fail(f"unsupported domain section {key!r}")
        return Task(
            domain_name=self.name,
            types=self.types,
            predicates=tuple(self.predicates),
            functions=tuple(self.functions),
            schemas=tuple(self.schemas),
        )

    def _requirements(self, section):
        for flag in section.items[1:]:
            if not flag.is_symbol:
                flag.fail("expected a requirement flag")
            name = flag.value if flag.value.startswith(":") else ":" + flag.value
            if name not in SUPPORTED_REQUIREMENTS:
                flag.fail(f"unsupported requirement {name}")

    def _types(self, section):
        pairs = parse_typed_list(section.items[1:], "type")
        try:
            self.types = TypeHierarchy(pairs)
        except PDDLSemanticError as exc:
            raise PDDLSyntaxError(str(exc), section.line, section.column) from exc

    def _signature(self, expr, kind):
        body = expr.items
        if not body or not body[0].is_symbol:
            expr.fail(f"expected ({kind} ...declaration...)")
        name = body[0].value
        params = []
        seen = set()
        for var, type_name in parse_typed_list(body[1:], "parameter"):
            if not is_variable(var):
                expr.fail(f"{kind} parameter {var!r} must be a ?variable")
            if var in seen:
                expr.fail(f"duplicate parameter {var!r} in {name}")
            seen.add(var)
            if not self.types.has(type_name):
                expr.fail(f"unknown type {type_name!r} in {name}")
            params.append(TypedVar(var, type_name))
        return Predicate(name, tuple(params))

    def _predicates(self, section):
        for expr in section.items[1:]:
            if expr.is_symbol:
                expr.fail("predicate declarations must be parenthesised")
            pred = self._signature(expr, "predicate")
            if any(p.name == pred.name for p in self.predicates):
                expr.fail(f"duplicate predicate {pred.name!r}")
            self.predicates.append(pred)

    def _functions(self, section):
        for expr in section.items[1:]:
            if expr.is_symbol:
                expr.fail("function declarations must be parenthesised")
            fn = self._signature(expr, "function")
            if fn.name == TOTAL_COST:
                continue  # builtin, never stored
            self.functions.append(fn)

    # -- formulas ---------------------------------------------------------

    def _predicate_for(self, expr, name):
        for p in self.predicates:
            if p.name == name:
                return p
        expr.fail(f"unknown predicate {name!r}")

    def _atom(self, expr, params, allow_equality):
        name = expr.head()
        if name is None:
            expr.fail("expected an atom")
        args = _symbols(expr.items[1:])
        if name == EQUALS:
            if not allow_equality:
                expr.fail("equality is not allowed here")
            if len(args) != 2:
                expr.fail("equality takes exactly two arguments")
        else:
            pred = self._predicate_for(expr, name)
            if len(args) != pred.arity:
                expr.fail(
                    f"predicate {name!r} expects {pred.arity} arguments, got {len(args)}"
                )
            for arg, param in zip(args, pred.params):
                if is_variable(arg):
                    bound = params.get(arg)
                    if bound is None:
                        expr.fail(f"variable {arg} does not appear in :parameters")
                    if not self.types.compatible(bound, param.type):
                        expr.fail(
                            f"variable {arg} of type {bound!r} cannot fill "
                            f"parameter of type {param.type!r} in {name!r}"
                        )
                # Constant arguments are objects; they are checked once the
                # problem declares the object list.
        for arg in args:
            if is_variable(arg) and arg not in params:
                expr.fail(f"variable {arg} does not appear in :parameters")
        return Atom(name, tuple(args))

    def _condition_literals(self, expr, params, negatable_atoms):
        """Parse an (and ...) or single literal into a literal list."""
        parts = expr.items[1:] if expr.head() == "and" else [expr]
        literals = []
        for part in parts:
            if part.is_symbol:
                part.fail("expected a literal")
            if part.head() == "not":
                if len(part.items) != 2:
                    part.fail("(not ...) takes exactly one literal")
                inner = self._atom(part.items[1], params, allow_equality=True)
                if inner.symbol != EQUALS and not negatable_atoms:
                    part.fail("negated atoms are not supported in preconditions")
                literals.append(Literal(inner, positive=False))
            else:
                literals.append(Literal(self._atom(part, params, allow_equality=True)))
        return tuple(literals)

    def _cost_expr(self, expr, params):
        if len(expr.items) != 3:
            expr.fail("expected (increase (total-cost) AMOUNT)")
        target, amount = expr.items[1], expr.items[2]
        if target.head() != TOTAL_COST or len(target.items) != 1:
            target.fail("only (total-cost) can be increased")
        if amount.is_symbol:
            if not amount.value.isdigit():
                amount.fail("action cost must be a nonnegative integer")
            return int(amount.value)
        name = amount.head()
        if name is None:
            amount.fail("expected a numeric fluent term")
        if not any(f.name == name for f in self.functions):
            amount.fail(f"unknown numeric function {name!r}")
        args = _symbols(amount.items[1:])
        for a in args:
            if is_variable(a) and a not in params:
                amount.fail(f"variable {a} does not appear in :parameters")
        return FunctionTerm(name, tuple(args))

    def _action(self, section):
        body = list(section.items[1:])
        if not body or not body[0].is_symbol:
            section.fail("expected an action name")
        name = body[0].value
        fields = {}
        i = 1
        while i < len(body):
            key = body[i]
            if not key.is_symbol or not key.value.startswith(":"):
                key.fail("expected :parameters, :precondition or :effect")
            if i + 1 >= len(body):
                key.fail(f"missing value for {key.value}")
            if key.value in fields:
                key.fail(f"duplicate {key.value}")
            fields[key.value] = body[i + 1]
            i += 2
        unknown = set(fields) - {":parameters", ":precondition", ":effect"}
        if unknown:
            section.fail(f"unsupported action section {sorted(unknown)[0]!r}")

        params = {}
        typed = []
        if ":parameters" in fields:
            plist = fields[":parameters"]
            if plist.is_symbol:
                plist.fail("expected a parameter list")
            for var, type_name in parse_typed_list(plist.items, "parameter"):
                if not is_variable(var):
                    plist.fail(f"parameter {var!r} must be a ?variable")
                if var in params:
                    plist.fail(f"duplicate parameter {var!r}")
                if not self.types.has(type_name):
                    plist.fail(f"unknown type {type_name!r}")
                params[var] = type_name
                typed.append(TypedVar(var, type_name))

        precondition = ()
        if ":precondition" in fields:
            precondition = self._condition_literals(
                fields[":precondition"], params, negatable_atoms=False
            )

        if ":effect" not in fields:
            section.fail(f"action {name!r} has empty effect")
        add, delete, conditional, cost = self._effect(fields[":effect"], params)
        if not add and not delete and not conditional:
            fields[":effect"].fail(f"action {name!r} has empty effect")

        if any(s.name == name for s in self.schemas):
            section.fail(f"duplicate action {name!r}")
        self.schemas.append(
            ActionSchema(
                name=name,
                params=tuple(typed),
                precondition=precondition,
                add=tuple(add),
                delete=tuple(delete),
                conditional=tuple(conditional),
                cost=cost,
            )
        )

    def _effect(self, expr, params):
        parts = expr.items[1:] if expr.head() == "and" else [expr]
        add, delete, conditional = [], [], []
        cost = None
        for part in parts:
            if part.is_symbol:
                part.fail("expected an effect")
            head = part.head()
            if head == "not":
                if len(part.items) != 2:
                    part.fail("(not ...) takes exactly one atom")
                delete.append(self._atom(part.items[1], params, allow_equality=False))
            elif head == "when":
                if len(part.items) != 3:
                    part.fail("expected (when CONDITION EFFECT)")
                condition = self._condition_literals(
                    part.items[1], params, negatable_atoms=True
                )
                eadd, edel, enested, ecost = self._effect(part.items[2], params)
                if enested or ecost is not None:
                    part.fail("conditional effects cannot nest when/increase")
                effect = tuple(Literal(a) for a in eadd) + tuple(
                    Literal(a, positive=False) for a in edel
                )
                if not effect:
                    part.fail("conditional effect is empty")
                conditional.append(ConditionalEffect(condition, effect))
            elif head == "increase":
                if cost is not None:
                    part.fail("multiple cost effects in one action")
                cost = self._cost_expr(part, params)
            else:
                add.append(self._atom(part, params, allow_equality=False))
        return add, delete, conditional, cost


def parse_domain(text):
    """Parse domain text into a Task whose problem half is still empty."""
    return _DomainReader(read_sexpr(text)).read()


# ---------------------------------------------------------------------------
# Problem


def _ground_atom(expr, domain):
    name = expr.head()
    if name is None:
        expr.fail("expected a ground atom")
    args = _symbols(expr.items[1:])
    for a in args:
        if is_variable(a):
            expr.fail(f"unexpected variable {a} in ground atom")
    return (name,) + tuple(args)


def _check_schema_constants(task):
    """Constant arguments inside schemas can only be validated against the
    problem's object list, so this runs at link time."""

    def check_term(term, where):
        if not is_variable(term) and term not in task.objects:
            raise PDDLSemanticError(
                f"schema {where} references undeclared object {term!r}"
            )

    for schema in task.schemas:
        for lit in schema.precondition:
            for a in lit.atom.args:
                check_term(a, schema.name)
        for atom in schema.add + schema.delete:
            for a in atom.args:
                check_term(a, schema.name)
        for cond in schema.conditional:
            for lit in cond.condition + cond.effect:
                for a in lit.atom.args:
                    check_term(a, schema.name)
        if isinstance(schema.cost, FunctionTerm):
            for a in schema.cost.args:
                check_term(a, schema.name)


def parse_problem(text, domain):
    """Parse problem text against a parsed domain, producing a complete Task."""
    expr = read_sexpr(text)
    if expr.head() != "define":
        expr.fail("expected (define (problem ...) ...)")
    header = expr.items[1]
    if header.head() != "problem" or len(header.items) != 2:
        header.fail("expected (problem NAME)")
    problem_name = header.items[1].value

    objects = {}
    init = set()
    numeric_init = {}
    goals = []
    metric = False

    sections = list(expr.items[2:])
    for section in sections:
        key = section.head()
        if key == ":domain":
            if len(section.items) != 2 or section.items[1].value != domain.domain_name:
                section.fail(
                    f"problem is for domain {section.items[1].value!r}, "
                    f"expected {domain.domain_name!r}"
                )
        elif key == ":objects":
            for name, type_name in parse_typed_list(section.items[1:], "object"):
                if not domain.types.has(type_name):
                    section.fail(f"unknown type {type_name!r} for object {name!r}")
                if name in objects and objects[name] != type_name:
                    section.fail(f"object {name!r} declared with two types")
                objects[name] = type_name
        elif key == ":init":
            pass  # handled after objects
        elif key == ":goal":
            pass
        elif key == ":metric":
            body = section.items[1:]
            if (
                len(body) != 2
                or body[0].value != "minimize"
                or body[1].head() != TOTAL_COST
            ):
                section.fail("only (:metric minimize (total-cost)) is supported")
            metric = True
        else:
            section.fail(f"unsupported problem section {key!r}")

    task = Task(
        domain_name=domain.domain_name,
        types=domain.types,
        predicates=domain.predicates,
        functions=domain.functions,
        schemas=domain.schemas,
        problem_name=problem_name,
        objects=objects,
        metric_total_cost=metric,
    )

    for section in sections:
        key = section.head()
        if key == ":init":
            for entry in section.items[1:]:
                if entry.is_symbol:
                    entry.fail("expected an init atom")
                if entry.head() == EQUALS:
                    self_fn = entry.items[1]
                    if len(entry.items) != 3 or self_fn.is_symbol:
                        entry.fail("expected (= (function args...) VALUE)")
                    value = entry.items[2]
                    if not value.is_symbol or not value.value.isdigit():
                        value.fail("numeric init value must be a nonnegative integer")
                    fname = self_fn.head()
                    if fname == TOTAL_COST:
                        if int(value.value) != 0:
                            value.fail("total-cost must start at 0")
                        continue
                    if task.function(fname) is None:
                        self_fn.fail(f"unknown numeric function {fname!r}")
                    args = _symbols(self_fn.items[1:])
                    for a in args:
                        if a not in objects:
                            self_fn.fail(f"undeclared object {a!r}")
                    numeric_init[(fname,) + tuple(args)] = int(value.value)
                else:
                    atom = _ground_atom(entry, domain)
                    try:
                        check_well_typed_atom(task, atom, "init atom")
                    except PDDLSemanticError as exc:
                        raise PDDLSyntaxError(str(exc), entry.line, entry.column) from exc
                    init.add(atom)
        elif key == ":goal":
            if len(section.items) != 2:
                section.fail("expected a single goal formula")
            formula = section.items[1]
            parts = formula.items[1:] if formula.head() == "and" else [formula]
            for part in parts:
                if part.is_symbol:
                    part.fail("expected a goal atom")
                atom = _ground_atom(part, domain)
                try:
                    check_well_typed_atom(task, atom, "goal atom")
                except PDDLSemanticError as exc:
                    raise PDDLSyntaxError(str(exc), part.line, part.column) from exc
                if atom not in goals:
                    goals.append(atom)

    task = Task(
        domain_name=task.domain_name,
        types=task.types,
        predicates=task.predicates,
        functions=task.functions,
        schemas=task.schemas,
        problem_name=problem_name,
        objects=objects,
        init=frozenset(init),
        numeric_init=numeric_init,
        goals=tuple(goals),
        metric_total_cost=metric,
    )
    _check_schema_constants(task)
    return task


def parse_task(domain_text, problem_text, agents=()):
    task = parse_problem(problem_text, parse_domain(domain_text))
    return task.with_agents(agents) if agents else task


# ---------------------------------------------------------------------------
# Agent list and plan files


def parse_agents(text):
    """Agent side file: one object name per line, ';' comments allowed."""
    names = []
    for raw in text.splitlines():
        line = raw.split(";", 1)[0].strip().lower()
        if line:
            names.append(line)
    return tuple(names)


_COST_TRAILER = re.compile(r";\s*cost\s*=\s*(\d+)")


def parse_plan(text, ground):
    """Resolve an IPC-format plan file against a ground task."""
    from ..grounding import Plan  # local import; grounding depends on the model only

    index = ground.action_index
    steps = []
    declared_cost = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        m = _COST_TRAILER.search(raw)
        if m:
            declared_cost = int(m.group(1))
        line = raw.split(";", 1)[0].strip().lower()
        if not line:
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise PlanSyntaxError(f"line {lineno}: expected (action args...)")
        key = tuple(line[1:-1].split())
        if not key:
            raise PlanSyntaxError(f"line {lineno}: empty action")
        action = index.get(key)
        if action is None:
            raise PlanSyntaxError(
                f"line {lineno}: {fact_str(key)} is not a ground action of this task"
            )
        steps.append(action)
    return Plan(tuple(steps), declared_cost)
