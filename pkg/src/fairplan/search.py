"""Exhaustive planners for desk-scale tasks.

``breadth_first_plan`` and ``uniform_cost_plan`` are the built-in planners
used by the harness; ``brute_force_plan`` additionally optimizes a
lexicographic (fairness, cost) objective by searching over states extended
with first-achiever attribution. States are packed into integer bit sets,
and all searches are deterministic: actions expand in canonical order and
ties resolve to the first node reached.
"""

import heapq
import itertools

from .errors import SearchBoundExceeded
from .grounding import Plan

GOAL_MAXIMIN = "g-maximin"
GOAL_PROPEQ = "g-propeq"


class BitTask:
    """A ground task with states, preconditions and effects as bit masks."""

    def __init__(self, ground):
        self.ground = ground
        self.index = {fact: i for i, fact in enumerate(sorted(ground.facts))}

        def mask(facts):
            m = 0
            for fact in facts:
                m |= 1 << self.index[fact]
            return m

        self.mask = mask
        self.init = mask(ground.init)
        self.goal = mask(ground.goal_set)
        self.actions = []
        for action in ground.actions:
            conds = tuple(
                (mask(e.pos), mask(e.neg), mask(e.add), mask(e.delete))
                for e in action.conditional
            )
            self.actions.append((action, mask(action.pre), mask(action.add),
                                 mask(action.delete), conds))

    def successor(self, state, pre, add, delete, conds):
        for pos, neg, cadd, cdel in conds:
            if state & pos == pos and not state & neg:
                add |= cadd
                delete |= cdel
        return (state & ~delete) | add


def _reconstruct(parent, node):
    steps = []
    while parent[node] is not None:
        node, action = parent[node]
        steps.append(action)
    return Plan(tuple(reversed(steps)))


def breadth_first_plan(ground, state_bound=1_000_000):
    """Shortest plan, or None when the reachable space contains no goal state."""
    bt = BitTask(ground)
    if bt.init & bt.goal == bt.goal:
        return Plan(())
    parent = {bt.init: None}
    frontier = [bt.init]
    while frontier:
        next_frontier = []
        for state in frontier:
            for entry in bt.actions:
                action, pre, add, delete, conds = entry
                if state & pre != pre:
                    continue
                successor = bt.successor(state, pre, add, delete, conds)
                if successor in parent:
                    continue
                parent[successor] = (state, action)
                if len(parent) > state_bound:
                    raise SearchBoundExceeded(
                        f"breadth-first search exceeded {state_bound} states"
                    )
                if successor & bt.goal == bt.goal:
                    return _reconstruct(parent, successor)
                next_frontier.append(successor)
        frontier = next_frontier
    return None


def uniform_cost_plan(ground, state_bound=1_000_000):
    """Cost-optimal plan, or None when no goal state is reachable."""
    bt = BitTask(ground)
    counter = itertools.count()
    dist = {bt.init: 0}
    parent = {bt.init: None}
    heap = [(0, next(counter), bt.init)]
    while heap:
        cost, _, state = heapq.heappop(heap)
        if cost > dist[state]:
            continue
        if state & bt.goal == bt.goal:
            return _reconstruct(parent, state)
        for entry in bt.actions:
            action, pre, add, delete, conds = entry
            if state & pre != pre:
                continue
            successor = bt.successor(state, pre, add, delete, conds)
            new_cost = cost + action.cost
            if successor in dist and dist[successor] <= new_cost:
                continue
            dist[successor] = new_cost
            parent[successor] = (state, action)
            if len(dist) > state_bound:
                raise SearchBoundExceeded(
                    f"uniform-cost search exceeded {state_bound} states"
                )
            heapq.heappush(heap, (new_cost, next(counter), successor))
    return None


def _count_partition(agents, attribution):
    counts = {a: 0 for a in agents}
    for _, agent in attribution:
        if agent is not None:
            counts[agent] += 1
    return tuple(sorted(counts.values()))


def scheme_partition_value(scheme, partition):
    """Bigger-is-better fairness value of a goal-count partition."""
    scheme = getattr(scheme, "value", scheme)
    if scheme == GOAL_MAXIMIN:
        return min(partition)
    if scheme == GOAL_PROPEQ:
        return -(max(partition) - min(partition))
    raise ValueError(f"unsupported scheme {scheme!r} for partition objectives")


def _extended_search(ground, horizon, state_bound):
    """Dijkstra over (state, attribution, steps) nodes, steps <= ``horizon``.

    Attribution freezes the first achiever of each assignable goal, so the
    fairness of any plan reaching a node depends only on (state,
    attribution). The step count is part of the node identity: with
    zero-cost actions a cheaper path may be longer, and a longer path must
    not hide nodes that a shorter one still reaches within the horizon.
    Returns (parent map, dict mapping goal (state, attribution) pairs to
    their cheapest (cost, full node))."""
    bt = BitTask(ground)
    assignable = tuple(
        (goal, 1 << bt.index[goal])
        for goal in ground.goals
        if goal not in ground.init
    )
    start = (bt.init, frozenset(), 0)
    counter = itertools.count()
    dist = {start: 0}
    parent = {start: None}
    goal_nodes = {}
    heap = [(0, next(counter), start)]
    while heap:
        cost, _, node = heapq.heappop(heap)
        if cost > dist[node]:
            continue
        state, attribution, steps = node
        if state & bt.goal == bt.goal:
            key = (state, attribution)
            if key not in goal_nodes or cost < goal_nodes[key][0]:
                goal_nodes[key] = (cost, node)
        if steps >= horizon:
            continue
        claimed = None
        for entry in bt.actions:
            action, pre, add, delete, conds = entry
            if state & pre != pre:
                continue
            successor = bt.successor(state, pre, add, delete, conds)
            new_attribution = attribution
            if claimed is None:
                claimed = {g for g, _ in attribution}
            gained = [
                goal
                for goal, bit in assignable
                if goal not in claimed and not state & bit and successor & bit
            ]
            if gained:
                new_attribution = attribution | {
                    (goal, action.agent) for goal in gained
                }
            new_node = (successor, new_attribution, steps + 1)
            new_cost = cost + action.cost
            if new_node in dist and dist[new_node] <= new_cost:
                continue
            dist[new_node] = new_cost
            parent[new_node] = (node, action)
            if len(dist) > state_bound:
                raise SearchBoundExceeded(
                    f"attribution search exceeded {state_bound} nodes"
                )
            heapq.heappush(heap, (new_cost, next(counter), new_node))
    return parent, goal_nodes


def goal_partition_costs(ground, horizon, state_bound=1_000_000):
    """Minimum plan cost for every reachable first-achiever count partition.

    Partitions count assignable goals per agent (idle agents contribute 0)
    over plans of at most ``horizon`` steps."""
    _, goal_nodes = _extended_search(ground, horizon, state_bound)
    best = {}
    for (state, attribution), (cost, _) in goal_nodes.items():
        partition = _count_partition(ground.agents, attribution)
        if partition not in best or cost < best[partition]:
            best[partition] = cost
    return best


def brute_force_plan(ground, horizon, objective="cost", scheme=None,
                     state_bound=1_000_000):
    """Objective-optimal plan within ``horizon`` steps, or None if unsolvable.

    ``objective`` is ``"cost"`` or ``"lexicographic"``; the latter maximizes
    (fairness of the induced assignable-goal distribution, then -cost) for a
    goal-oriented ``scheme``."""
    if objective == "cost":
        parent, goal_nodes = _extended_search(ground, horizon, state_bound)
        best_node, best_cost = None, None
        for cost, node in goal_nodes.values():
            if best_cost is None or cost < best_cost:
                best_node, best_cost = node, cost
        return None if best_node is None else _reconstruct(parent, best_node)
    if objective != "lexicographic":
        raise ValueError(f"unknown objective {objective!r}")
    if scheme is None:
        raise ValueError("lexicographic objective needs a scheme")
    parent, goal_nodes = _extended_search(ground, horizon, state_bound)
    best_node, best_rank = None, None
    for (state, attribution), (cost, node) in goal_nodes.items():
        partition = _count_partition(ground.agents, attribution)
        rank = (scheme_partition_value(scheme, partition), -cost)
        if best_rank is None or rank > best_rank:
            best_node, best_rank = node, rank
    return None if best_node is None else _reconstruct(parent, best_node)
