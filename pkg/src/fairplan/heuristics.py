"""Delete-relaxation reachability and the relaxed-plan heuristic.

The heuristic is evaluated on single-agent restrictions of a ground task:
``restrict_to_agent`` keeps one agent's actions (plus agentless ones), and
``h_ff`` estimates the cost for that task to reach a goal set from the
initial state. Infinity means the goals are unreachable even ignoring
deletes, which is the achievability test used by the assignment layers.
"""

import heapq
from dataclasses import dataclass

INFINITE = float("inf")


def restrict_to_agent(ground, agent):
    """Keep only the given agent's actions and agentless actions."""
    if agent not in ground.agents:
        raise ValueError(f"unknown agent {agent!r}")
    return ground.replace_actions(
        a for a in ground.actions if a.agent is None or a.agent == agent
    )


@dataclass(frozen=True)
class _RelaxedAction:
    key: tuple  # (action key, conditional-effect index or -1): tie-break identity
    action_key: tuple
    pre: frozenset
    add: frozenset
    cost: int


class RelaxedReachability:
    """Forward pass of the relaxed planning graph from a fixed state.

    Deletes are dropped; each conditional effect becomes a separate relaxed
    action whose precondition also includes the effect's positive condition
    (negative conditions are optimistically assumed to hold). The pass is
    goal-independent, so one instance serves many extractions.
    """

    def __init__(self, ground, state=None):
        self.state = frozenset(ground.init if state is None else state)
        self.actions = []
        for action in ground.actions:
            if action.add:
                self.actions.append(
                    _RelaxedAction(
                        key=(action.key, -1),
                        action_key=action.key,
                        pre=action.pre,
                        add=action.add,
                        cost=action.cost,
                    )
                )
            for i, eff in enumerate(action.conditional):
                if eff.add:
                    self.actions.append(
                        _RelaxedAction(
                            key=(action.key, i),
                            action_key=action.key,
                            pre=action.pre | eff.pos,
                            add=eff.add,
                            cost=action.cost,
                        )
                    )
        self._ground_cost = {a.action_key: a.cost for a in self.actions}
        self._run_layers()
        self._run_additive_costs()

    def _run_layers(self):
        """Breadth-first reachability levels, used only for tie-breaking."""
        layer = {f: 0 for f in self.state}
        action_layer = {}
        frontier = True
        current = 0
        pending = list(self.actions)
        while frontier:
            frontier = False
            still = []
            for ra in pending:
                if all(p in layer and layer[p] <= current for p in ra.pre):
                    action_layer[ra.key] = current
                    for f in ra.add:
                        if f not in layer:
                            layer[f] = current + 1
                            frontier = True
                else:
                    still.append(ra)
            pending = still
            current += 1
        self.fact_layer = layer
        self.action_layer = action_layer

    def _run_additive_costs(self):
        """Generalized Dijkstra computing additive fact costs and, per relaxed
        action, the cost of its best supporting set."""
        fact_cost = {f: 0 for f in self.state}
        waiting = {}  # fact -> [relaxed action indices]
        missing = []
        pre_sum = []
        for idx, ra in enumerate(self.actions):
            missing.append(len(ra.pre))
            pre_sum.append(ra.cost)
            for p in ra.pre:
                waiting.setdefault(p, []).append(idx)
        action_value = {}
        heap = [(0, f) for f in sorted(self.state)]
        heapq.heapify(heap)
        settled = set()

        def trigger(idx):
            ra = self.actions[idx]
            value = pre_sum[idx]
            action_value[ra.key] = value
            for f in ra.add:
                new = value
                if f not in fact_cost or new < fact_cost[f]:
                    fact_cost[f] = new
                    heapq.heappush(heap, (new, f))

        for idx, ra in enumerate(self.actions):
            if missing[idx] == 0:
                trigger(idx)
        while heap:
            cost, fact = heapq.heappop(heap)
            if fact in settled or cost > fact_cost.get(fact, INFINITE):
                continue
            settled.add(fact)
            for idx in waiting.get(fact, ()):
                missing[idx] -= 1
                pre_sum[idx] += cost
                if missing[idx] == 0:
                    trigger(idx)
        self.fact_cost = fact_cost
        self.action_value = action_value

    def reachable(self, fact):
        return fact in self.fact_cost

    def _best_supporter(self, fact):
        best = None
        best_rank = None
        for ra in self.actions:
            if fact not in ra.add or ra.key not in self.action_value:
                continue
            rank = (self.action_value[ra.key], self.action_layer[ra.key], ra.key)
            if best_rank is None or rank < best_rank:
                best, best_rank = ra, rank
        return best

    def extract_plan(self, goals):
        """Relaxed plan for a goal set: (cost, supporting ground action keys),
        or (infinity, None) when some goal is unreachable.

        One application of a ground action serves all of its selected
        conditional copies, so each underlying action is charged once."""
        goals = set(goals)
        if any(not self.reachable(g) for g in goals):
            return INFINITE, None
        achieved = set(self.state)
        selected = {}  # relaxed action key -> _RelaxedAction
        queue = [(-self.fact_layer[g], g) for g in sorted(goals) if g not in achieved]
        heapq.heapify(queue)
        while queue:
            _, fact = heapq.heappop(queue)
            if fact in achieved:
                continue
            supporter = self._best_supporter(fact)
            achieved |= supporter.add
            if supporter.key not in selected:
                selected[supporter.key] = supporter
                for p in supporter.pre:
                    if p not in achieved:
                        heapq.heappush(queue, (-self.fact_layer[p], p))
        charged = sorted({ra.action_key for ra in selected.values()})
        return sum(self._ground_cost[key] for key in charged), tuple(charged)

    def extract(self, goals):
        """Relaxed-plan cost alone: a nonnegative integer or infinity."""
        return self.extract_plan(goals)[0]


def h_ff(ground, goals, state=None):
    """Relaxed-plan heuristic value of reaching ``goals`` from the initial
    state (or ``state``), as a nonnegative integer or infinity."""
    return RelaxedReachability(ground, state).extract(goals)


class AgentHeuristics:
    """Per-agent relaxed reachability with memoised goal-set values."""

    def __init__(self, ground):
        self.ground = ground
        self._reach = {}
        self._memo = {}

    def reachability(self, agent):
        if agent not in self._reach:
            self._reach[agent] = RelaxedReachability(restrict_to_agent(self.ground, agent))
        return self._reach[agent]

    def value(self, agent, goals):
        key = (agent, frozenset(goals))
        if key not in self._memo:
            self._memo[key] = self.reachability(agent).extract(goals)
        return self._memo[key]


def achievable(ground, agents, goals, heuristics=None):
    """Pairs (agent, goal) whose single-agent relaxed cost is finite."""
    oracle = heuristics or AgentHeuristics(ground)
    return {
        (agent, goal)
        for agent in agents
        for goal in goals
        if oracle.value(agent, (goal,)) != INFINITE
    }
