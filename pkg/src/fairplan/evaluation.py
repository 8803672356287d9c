"""First-achiever attribution and fairness values of executed plans."""

from dataclasses import dataclass


def first_achievers(ground, trace):
    """Map each goal to the agent of the first step that made it true.

    Goals already true initially and never re-achieved stay unmapped; later
    re-achievements never transfer credit. A goal first achieved by an
    agentless action maps to None."""
    achievers = {}
    for i, action in enumerate(trace.steps):
        before, after = trace.states[i], trace.states[i + 1]
        for goal in ground.goals:
            if goal not in achievers and goal not in before and goal in after:
                achievers[goal] = action.agent
    return achievers


@dataclass(frozen=True, eq=False)
class FairnessReport:
    agents: tuple
    goal_counts: dict  # agent -> first-achieved goal count
    workloads: dict  # agent -> summed cost of its actions
    achievers: dict  # goal -> agent or None
    goal_maximin: int
    goal_propeq: int
    workload_maximin: int
    workload_propeq: int
    plan_cost: int
    reachieved_nonassignable: tuple  # goals true in I that some step re-achieved

    def value(self, scheme):
        return {
            "g-maximin": self.goal_maximin,
            "g-propeq": self.goal_propeq,
            "w-maximin": self.workload_maximin,
            "w-propeq": self.workload_propeq,
        }[getattr(scheme, "value", scheme)]

    def to_json_dict(self):
        return {
            "version": 1,
            "agents": list(self.agents),
            "goal-counts": {a: self.goal_counts[a] for a in self.agents},
            "workloads": {a: self.workloads[a] for a in self.agents},
            "achievers": {
                "(" + " ".join(g) + ")": agent for g, agent in sorted(self.achievers.items())
            },
            "g-maximin": self.goal_maximin,
            "g-propeq": self.goal_propeq,
            "w-maximin": self.workload_maximin,
            "w-propeq": self.workload_propeq,
            "plan-cost": self.plan_cost,
            "re-achieved-non-assignable": ["(" + " ".join(g) + ")" for g in self.reachieved_nonassignable],
        }


def fairness_report(ground, trace):
    """Per-agent goal counts and workloads of a validated trace, with the
    four scheme values. Idle agents count zero; agentless actions belong to
    no workload."""
    if not ground.agents:
        raise ValueError("fairness is over agents; the task declares none")
    achievers = first_achievers(ground, trace)
    counts = {a: 0 for a in ground.agents}
    work = {a: 0 for a in ground.agents}
    for agent in achievers.values():
        if agent is not None:
            counts[agent] += 1
    for step in trace.steps:
        if step.agent is not None:
            work[step.agent] += step.cost
    return FairnessReport(
        agents=tuple(ground.agents),
        goal_counts=counts,
        workloads=work,
        achievers=achievers,
        goal_maximin=min(counts.values()),
        goal_propeq=max(counts.values()) - min(counts.values()),
        workload_maximin=min(work.values()),
        workload_propeq=max(work.values()) - min(work.values()),
        plan_cost=trace.cost,
        reachieved_nonassignable=tuple(
            sorted(g for g in achievers if g in ground.init)
        ),
    )
