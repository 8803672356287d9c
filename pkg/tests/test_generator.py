import pytest

from fairplan.generator import generate_warehouse
from fairplan.grounding import execute, ground
from fairplan.pddl import emit_pddl
from fairplan.search import breadth_first_plan


class TestGenerateWarehouse:
    def test_corridor_solvable_by_single_agent(self):
        task = generate_warehouse(1, 5, 1, 2, 0, 0, seed=3)
        plan = breadth_first_plan(ground(task))
        assert plan is not None

    def test_zero_work_locations_empty_plan_valid(self):
        task = generate_warehouse(2, 2, 1, 0, 0, 0, seed=0)
        assert task.goals == ()
        trace = execute(ground(task), [])
        assert trace.cost == 0

    def test_black_goals_need_hammers(self):
        task = generate_warehouse(2, 2, 1, 1, 1, 1, seed=5)
        plan = breadth_first_plan(ground(task))
        assert any(a.name == "pick-up-hammer" for a in plan.steps)

    def test_deterministic_from_seed(self):
        a = generate_warehouse(3, 3, 2, 4, 2, 2, seed=42)
        b = generate_warehouse(3, 3, 2, 4, 2, 2, seed=42)
        assert emit_pddl(a) == emit_pddl(b)
        c = generate_warehouse(3, 3, 2, 4, 2, 2, seed=43)
        assert emit_pddl(a) != emit_pddl(c)

    def test_grid_adjacency(self):
        task = generate_warehouse(2, 2, 1, 0, 0, 0, seed=0)
        adjacency = {f for f in task.init if f[0] == "adjacent"}
        assert len(adjacency) == 8  # 4 undirected edges, both directions
        assert ("adjacent", "c1-1", "c2-1") in adjacency
        assert ("adjacent", "c1-1", "c2-2") not in adjacency  # no diagonals

    def test_costs_move_only(self):
        task = generate_warehouse(2, 2, 1, 1, 1, 1, seed=5)
        costs = {s.name: s.cost for s in task.schemas}
        assert costs == {"move": 1, "pick-up-hammer": 0,
                         "perform-work": 0, "perform-work-black-location": 0}
        assert task.metric_total_cost

    def test_too_many_work_locations(self):
        with pytest.raises(ValueError, match="do not fit"):
            generate_warehouse(2, 2, 1, 5, 0, 0, seed=0)

    def test_black_exceeding_work(self):
        with pytest.raises(ValueError, match="count exceeds"):
            generate_warehouse(3, 3, 1, 2, 3, 3, seed=0)

    def test_black_without_hammers(self):
        with pytest.raises(ValueError, match="hammer"):
            generate_warehouse(3, 3, 1, 2, 1, 0, seed=0)

    def test_explicit_cells_validated(self):
        with pytest.raises(ValueError, match="outside"):
            generate_warehouse(2, 2, 1, 1, 0, 0, seed=0, agent_cells=["c9-9"])

    def test_agents_listed_on_task(self):
        task = generate_warehouse(2, 2, 3, 1, 0, 0, seed=1)
        assert task.agents == ("robot1", "robot2", "robot3")
        assert all(task.objects[a] == "agent" for a in task.agents)
