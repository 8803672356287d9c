"""Parameterized warehouse instances: robots on a grid performing works.

Moving costs one energy unit; picking up hammers and performing works are
free. Works at black locations require a held hammer, and there is no drop
action, so a hammer stays with whoever grabs it first. Setting ``height``
or ``width`` to 1 yields corridor instances.
"""

import random

from .pddl.model import (
    ActionSchema,
    Atom,
    Literal,
    Predicate,
    Task,
    TypedVar,
    TypeHierarchy,
)

AGENT_TYPE = "agent"
LOCATION_TYPE = "location"
WHITE_TYPE = "white-location"
BLACK_TYPE = "black-location"
HAMMER_TYPE = "hammer"


def _warehouse_domain():
    types = TypeHierarchy(
        [
            (AGENT_TYPE, "object"),
            (HAMMER_TYPE, "object"),
            (LOCATION_TYPE, "object"),
            (WHITE_TYPE, LOCATION_TYPE),
            (BLACK_TYPE, LOCATION_TYPE),
        ]
    )
    predicates = (
        Predicate("at", (TypedVar("?a", AGENT_TYPE), TypedVar("?l", LOCATION_TYPE))),
        Predicate(
            "adjacent",
            (TypedVar("?l1", LOCATION_TYPE), TypedVar("?l2", LOCATION_TYPE)),
        ),
        Predicate(
            "hammer-at", (TypedVar("?h", HAMMER_TYPE), TypedVar("?l", LOCATION_TYPE))
        ),
        Predicate(
            "holding", (TypedVar("?a", AGENT_TYPE), TypedVar("?h", HAMMER_TYPE))
        ),
        Predicate("work-performed", (TypedVar("?l", LOCATION_TYPE),)),
    )
    schemas = (
        ActionSchema(
            name="move",
            params=(
                TypedVar("?a", AGENT_TYPE),
                TypedVar("?from", LOCATION_TYPE),
                TypedVar("?to", LOCATION_TYPE),
            ),
            precondition=(
                Literal(Atom("at", ("?a", "?from"))),
                Literal(Atom("adjacent", ("?from", "?to"))),
            ),
            add=(Atom("at", ("?a", "?to")),),
            delete=(Atom("at", ("?a", "?from")),),
            cost=1,
        ),
        ActionSchema(
            name="pick-up-hammer",
            params=(
                TypedVar("?a", AGENT_TYPE),
                TypedVar("?h", HAMMER_TYPE),
                TypedVar("?l", LOCATION_TYPE),
            ),
            precondition=(
                Literal(Atom("at", ("?a", "?l"))),
                Literal(Atom("hammer-at", ("?h", "?l"))),
            ),
            add=(Atom("holding", ("?a", "?h")),),
            delete=(Atom("hammer-at", ("?h", "?l")),),
            cost=0,
        ),
        ActionSchema(
            name="perform-work",
            params=(TypedVar("?a", AGENT_TYPE), TypedVar("?l", WHITE_TYPE)),
            precondition=(Literal(Atom("at", ("?a", "?l"))),),
            add=(Atom("work-performed", ("?l",)),),
            cost=0,
        ),
        ActionSchema(
            name="perform-work-black-location",
            params=(
                TypedVar("?a", AGENT_TYPE),
                TypedVar("?l", BLACK_TYPE),
                TypedVar("?h", HAMMER_TYPE),
            ),
            precondition=(
                Literal(Atom("at", ("?a", "?l"))),
                Literal(Atom("holding", ("?a", "?h"))),
            ),
            add=(Atom("work-performed", ("?l",)),),
            cost=0,
        ),
    )
    return types, predicates, schemas


def generate_warehouse(
    width,
    height,
    agents,
    work_locations,
    black_locations,
    hammers,
    seed=0,
    agent_cells=None,
    hammer_cells=None,
    work_cells=None,
):
    """Deterministic warehouse task; placements come from ``seed`` unless the
    explicit cell lists pin them down (cells are named ``c<x>-<y>``)."""
    cells = [f"c{x}-{y}" for y in range(1, height + 1) for x in range(1, width + 1)]
    if width < 1 or height < 1:
        raise ValueError("grid must be at least 1x1")
    if agents < 1:
        raise ValueError("need at least one agent")
    if black_locations > work_locations:
        raise ValueError("black locations are work locations; count exceeds total")
    if work_locations > len(cells):
        raise ValueError(f"{work_locations} work locations do not fit {len(cells)} cells")
    if black_locations > 0 and hammers < 1:
        raise ValueError("black locations need at least one hammer")

    rng = random.Random(seed)
    if work_cells is None:
        work_cells = rng.sample(cells, work_locations)
    elif len(work_cells) != work_locations:
        raise ValueError("work cell list does not match the requested count")
    black_cells = list(work_cells[:black_locations])
    if agent_cells is None:
        agent_cells = [rng.choice(cells) for _ in range(agents)]
    if hammer_cells is None:
        hammer_cells = [rng.choice(cells) for _ in range(hammers)]
    for cell in list(work_cells) + list(agent_cells) + list(hammer_cells):
        if cell not in cells:
            raise ValueError(f"cell {cell!r} is outside the {width}x{height} grid")

    types, predicates, schemas = _warehouse_domain()
    objects = {}
    for i in range(1, agents + 1):
        objects[f"robot{i}"] = AGENT_TYPE
    for i in range(1, hammers + 1):
        objects[f"hammer{i}"] = HAMMER_TYPE
    for cell in cells:
        if cell in black_cells:
            objects[cell] = BLACK_TYPE
        elif cell in work_cells:
            objects[cell] = WHITE_TYPE
        else:
            objects[cell] = LOCATION_TYPE

    init = set()
    for y in range(1, height + 1):
        for x in range(1, width + 1):
            here = f"c{x}-{y}"
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, ny = x + dx, y + dy
                if 1 <= nx <= width and 1 <= ny <= height:
                    init.add(("adjacent", here, f"c{nx}-{ny}"))
    for i, cell in enumerate(agent_cells, 1):
        init.add(("at", f"robot{i}", cell))
    for i, cell in enumerate(hammer_cells, 1):
        init.add(("hammer-at", f"hammer{i}", cell))

    goals = tuple(("work-performed", cell) for cell in work_cells)

    return Task(
        domain_name="warehouse",
        types=types,
        predicates=predicates,
        functions=(),
        schemas=schemas,
        problem_name=f"warehouse-{width}x{height}-a{agents}-w{work_locations}"
        f"-b{black_locations}-h{hammers}-s{seed}",
        objects=objects,
        agents=tuple(f"robot{i}" for i in range(1, agents + 1)),
        init=frozenset(init),
        goals=goals,
        metric_total_cost=True,
    )
