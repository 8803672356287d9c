"""Iterative auction baseline for goal allocation.

Goals are auctioned one at a time in their declaration order. An agent's
bid for a goal is the relaxed-plan cost of achieving that goal together
with everything it has already won, so agents holding large bundles bid
high and the allocation tends to spread out. There is no re-auctioning.
"""

from .assignment import _finish, AssignmentModel, assignable_goals
from .errors import UnassignableGoal
from .heuristics import INFINITE, AgentHeuristics


def contract_net_assign(ground, scheme, priority_weight=1000, heuristics=None):
    """Assign every assignable goal to the cheapest bundle bidder.

    Ties go to the agent with fewer won goals, then to the lexicographically
    smallest agent name. The result reports the same objective values as the
    exact solver so downstream consumers cannot tell the methods apart."""
    oracle = heuristics or AgentHeuristics(ground)
    agents = tuple(sorted(ground.agents))
    won = {a: [] for a in agents}
    assignment = {}
    for goal in assignable_goals(ground):
        bids = []
        for agent in agents:
            value = oracle.value(agent, frozenset(won[agent]) | {goal})
            if value != INFINITE:
                bids.append((value, len(won[agent]), agent))
        if not bids:
            raise UnassignableGoal(goal)
        winner = min(bids)[2]
        won[winner].append(goal)
        assignment[goal] = winner

    cost = {
        (agent, goal): int(oracle.value(agent, (goal,)))
        for goal in assignment
        for agent in agents
        if oracle.value(agent, (goal,)) != INFINITE
    }
    model = AssignmentModel(
        agents=agents,
        goals=tuple(assignment),
        cost=cost,
        scheme=scheme,
        priority_weight=priority_weight,
    )
    result = _finish(model, assignment, "contract-net")
    return result
