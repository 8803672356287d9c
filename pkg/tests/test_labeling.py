import pytest

from fairplan.errors import CompilationError
from fairplan.evaluation import first_achievers
from fairplan.generator import generate_warehouse
from fairplan.grounding import execute, ground
from fairplan.labeling import compile_labeled, done_flag_name, eff_pred_goal
from fairplan.pddl import emit_pddl, parse_domain, parse_problem, semantically_equal
from fairplan.search import breadth_first_plan



class TestEffPredGoal:
    def test_unload_truck_matches_package_goal(self, driverlog):
        schema = driverlog.schema("unload-truck")
        atom = eff_pred_goal(schema, ("at", "package1", "s1"), driverlog)
        assert atom is not None
        assert atom.symbol == "at" and atom.args == ("?obj", "?loc")

    def test_board_truck_cannot_achieve_package_goal(self, driverlog):
        schema = driverlog.schema("board-truck")
        assert eff_pred_goal(schema, ("at", "package1", "s1"), driverlog) is None

    def test_agent_typed_effect_is_excluded(self, driverlog):
        # walk adds (at ?driver ?loc-to); driver positions are never labeled
        schema = driverlog.schema("walk")
        assert eff_pred_goal(schema, ("at", "driver1", "s0"), driverlog) is None

    def test_type_mismatch_prevents_unification(self, driverlog):
        schema = driverlog.schema("drive-truck")
        assert eff_pred_goal(schema, ("at", "package1", "s1"), driverlog) is None
        assert eff_pred_goal(schema, ("at", "truck2", "s2"), driverlog) is not None


class TestCompileLabeled:
    def test_appendix_goal_set(self, driverlog, labeled_fixture, appendix_assignment):
        labeled = compile_labeled(driverlog, appendix_assignment)
        assert set(labeled.task.goals) == set(labeled_fixture.goals)

    def test_untouched_schemas_identical(self, driverlog, appendix_assignment):
        labeled = compile_labeled(driverlog, appendix_assignment)
        for name in ("board-truck", "disembark-truck", "load-truck", "walk"):
            assert labeled.task.schema(name) == driverlog.schema(name)
        assert labeled.updated_schemas == ("unload-truck", "drive-truck")

    def test_conditional_effect_counts(self, driverlog, appendix_assignment):
        labeled = compile_labeled(driverlog, appendix_assignment)
        assert len(labeled.task.schema("drive-truck").conditional) == 1
        assert len(labeled.task.schema("unload-truck").conditional) == 3

    def test_done_flag_names_match_appendix(self, driverlog, appendix_assignment):
        labeled = compile_labeled(driverlog, appendix_assignment)
        assert labeled.done_flags[("at", "package1", "s1")] == "atpackage1-s1-done"
        assert labeled.done_flags[("at", "truck2", "s2")] == "attruck2-s2-done"
        assert done_flag_name(("end",)) == "end-done"

    def test_metric_dropped_costs_kept(self, appendix_assignment):
        task = generate_warehouse(2, 2, 1, 1, 0, 0, seed=0,
                                  agent_cells=["c1-1"], work_cells=["c2-2"])
        labeled = compile_labeled(task, {("work-performed", "c2-2"): "robot1"})
        assert not labeled.task.metric_total_cost
        assert labeled.task.schema("move").cost == 1

    def test_empty_assignable_set_is_identity(self):
        # a task whose goals all hold initially has nothing to label
        from fairplan.pddl.model import (ActionSchema, Atom, Literal, Predicate,
                                         Task, TypeHierarchy, TypedVar)
        task = Task(
            domain_name="d",
            types=TypeHierarchy([("unit", "object")]),
            predicates=(Predicate("g"), Predicate("p")),
            schemas=(ActionSchema("a", params=(TypedVar("?u", "unit"),),
                                  precondition=(Literal(Atom("g")),),
                                  add=(Atom("p"),)),),
            objects={"u1": "unit"},
            agents=("u1",),
            init=frozenset([("g",)]),
            goals=(("g",),),
        )
        labeled = compile_labeled(task, {})
        assert labeled.task.predicates == task.predicates
        assert labeled.task.goals == task.goals
        assert labeled.task.schemas == task.schemas

    def test_round_trips_through_pddl(self, driverlog, appendix_assignment):
        labeled = compile_labeled(driverlog, appendix_assignment)
        domain_text, problem_text = emit_pddl(labeled.task)
        again = parse_problem(problem_text, parse_domain(domain_text))
        assert semantically_equal(labeled.task, again)

    def test_non_total_assignment_rejected(self, driverlog, appendix_assignment):
        partial = dict(appendix_assignment)
        partial.pop(("at", "truck2", "s2"))
        with pytest.raises(CompilationError, match="not total"):
            compile_labeled(driverlog, partial)

    def test_non_assignable_goal_rejected(self, driverlog, appendix_assignment):
        over = dict(appendix_assignment)
        over[("at", "truck1", "s1")] = "driver1"  # already true initially
        with pytest.raises(CompilationError, match="non-assignable"):
            compile_labeled(driverlog, over)

    def test_missing_achiever_rejected(self):
        from fairplan.pddl.model import (ActionSchema, Atom, Literal, Predicate,
                                         Task, TypeHierarchy, TypedVar)
        task = Task(
            domain_name="d",
            types=TypeHierarchy([("unit", "object")]),
            predicates=(Predicate("g"), Predicate("x")),
            schemas=(ActionSchema("a", params=(TypedVar("?u", "unit"),),
                                  add=(Atom("x"),)),),
            objects={"u1": "unit"},
            agents=("u1",),
            goals=(("g",),),
        )
        with pytest.raises(CompilationError, match="missing achiever"):
            compile_labeled(task, {("g",): "u1"})


class TestLabeledSemantics:
    def make_labeled_warehouse(self):
        task = generate_warehouse(
            1, 4, 2, 2, 0, 0, seed=0,
            agent_cells=["c1-1", "c1-4"],
            work_cells=["c1-2", "c1-3"],
        )
        assignment = {
            ("work-performed", "c1-2"): "robot1",
            ("work-performed", "c1-3"): "robot2",
        }
        return task, compile_labeled(task, assignment)

    def test_soundness_labeled_plan_solves_original(self):
        task, labeled = self.make_labeled_warehouse()
        labeled_ground = ground(labeled.task)
        plan = breadth_first_plan(labeled_ground)
        assert plan is not None
        original_ground = ground(task)
        original_steps = [original_ground.action_index[a.key] for a in plan.steps]
        trace = execute(original_ground, original_steps)
        assert set(task.goals) <= trace.final_state

    def test_first_achiever_fidelity(self):
        task, labeled = self.make_labeled_warehouse()
        labeled_ground = ground(labeled.task)
        plan = breadth_first_plan(labeled_ground)
        trace = execute(labeled_ground, plan)
        attribution = first_achievers(labeled_ground, trace)
        for goal, labeled_goal in labeled.labeled_goals.items():
            label_steps = [
                i for i in range(len(trace.steps))
                if labeled_goal not in trace.states[i]
                and labeled_goal in trace.states[i + 1]
            ]
            # the labeled atom appears exactly once, at the step that first
            # achieves the goal, and names that step's agent
            assert len(label_steps) == 1
            step = label_steps[0]
            assert goal not in trace.states[step]
            assert goal in trace.states[step + 1]
            assert trace.steps[step].agent == labeled_goal[-1]
            assert attribution[goal] == labeled_goal[-1]

    def test_second_achiever_is_not_labeled(self):
        # two agents can both achieve g; the conditional must latch after the
        # first achievement because the done flag is set with the label
        from fairplan.pddl.model import (ActionSchema, Atom, Literal, Predicate,
                                         Task, TypeHierarchy, TypedVar)
        task = Task(
            domain_name="d",
            types=TypeHierarchy([("unit", "object")]),
            predicates=(
                Predicate("goal-held", (TypedVar("?x", "object"),)),
                Predicate("reset",),
            ),
            schemas=(
                ActionSchema(
                    "make", params=(TypedVar("?u", "unit"), TypedVar("?w", "object")),
                    add=(Atom("goal-held", ("?w",)),),
                ),
                ActionSchema(
                    "wipe", params=(TypedVar("?u", "unit"), TypedVar("?w", "object")),
                    add=(Atom("reset"),),
                    delete=(Atom("goal-held", ("?w",)),),
                ),
            ),
            objects={"u1": "unit", "u2": "unit", "w": "object"},
            agents=("u1", "u2"),
            goals=(("goal-held", "w"),),
        )
        labeled = compile_labeled(task, {("goal-held", "w"): "u1"})
        gt = ground(labeled.task)
        first = gt.action_index[("make", "u1", "w")]
        wipe = gt.action_index[("wipe", "u2", "w")]
        again = gt.action_index[("make", "u2", "w")]
        state = gt.init
        for action in (first, wipe, again):
            state = action.apply(state)
        label_u1 = labeled.labeled_goals[("goal-held", "w")]
        label_u2 = label_u1[:-1] + ("u2",)
        assert label_u1 in state
        assert label_u2 not in state
