import json

import pytest

from fairplan.cli import main

from .conftest import FIXTURES

MINI_DOMAIN = """
(define (domain flip)
(:requirements :typing)
(:types unit - object thing - object)
(:predicates (held ?w - thing) (wiped))
(:action make
 :parameters (?u - unit ?w - thing)
 :precondition (and)
 :effect (and (held ?w)))
(:action wipe
 :parameters (?u - unit ?w - thing)
 :precondition (held ?w)
 :effect (and (not (held ?w)) (wiped))))
"""

MINI_PROBLEM = """
(define (problem flip-1)
(:domain flip)
(:objects u1 u2 - unit w - thing)
(:init)
(:goal (and (held w))))
"""


@pytest.fixture
def driverlog_args(tmp_path):
    return [
        "--domain", str(FIXTURES / "domain.pddl"),
        "--problem", str(FIXTURES / "problem.pddl"),
        "--agents", str(FIXTURES / "agents.txt"),
    ]


def mini_files(tmp_path, problem=MINI_PROBLEM):
    d = tmp_path / "flip-domain.pddl"
    p = tmp_path / "flip-problem.pddl"
    a = tmp_path / "flip-agents.txt"
    d.write_text(MINI_DOMAIN)
    p.write_text(problem)
    a.write_text("u1\nu2\n")
    return ["--domain", str(d), "--problem", str(p), "--agents", str(a)]


class TestAssign:
    def test_driverlog_goal_maximin(self, driverlog_args, tmp_path):
        out = tmp_path / "assignment.json"
        code = main(["assign", *driverlog_args, "--scheme", "g-maximin",
                     "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert len(data["assignment"]) == 4
        assert data["objective"]["min-goals"] == 1
        assert set(data["assignment"].values()) <= {"driver1", "driver2", "driver3"}

    def test_workload_scheme_reports_workload(self, driverlog_args, tmp_path):
        out = tmp_path / "assignment.json"
        code = main(["assign", *driverlog_args, "--scheme", "w-propeq",
                     "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert len(data["assignment"]) == 4
        assert "min-workload" in data["objective"]
        assert "max-workload" in data["objective"]

    def test_contract_net_method(self, driverlog_args, tmp_path):
        out = tmp_path / "assignment.json"
        code = main(["assign", *driverlog_args, "--scheme", "g-maximin",
                     "--method", "contract-net", "--out", str(out)])
        assert code == 0
        assert json.loads(out.read_text())["method"] == "contract-net"

    def test_empty_assignable_warns(self, tmp_path, capsys):
        args = mini_files(
            tmp_path, MINI_PROBLEM.replace("(:init)", "(:init (held w))")
        )
        code = main(["assign", *args, "--scheme", "g-maximin"])
        assert code == 0
        captured = capsys.readouterr()
        assert "nothing to assign" in captured.err
        assert json.loads(captured.out)["assignment"] == {}

    def test_idempotent(self, driverlog_args, tmp_path):
        out1, out2 = tmp_path / "a1.json", tmp_path / "a2.json"
        main(["assign", *driverlog_args, "--scheme", "g-propeq", "--out", str(out1)])
        main(["assign", *driverlog_args, "--scheme", "g-propeq", "--out", str(out2)])
        assert out1.read_text() == out2.read_text()


class TestCompile:
    def test_fair_mode_summary(self, driverlog_args, tmp_path, capsys):
        code = main([
            "compile", *driverlog_args, "--mode", "fair", "--scheme", "g-maximin",
            "--out-domain", str(tmp_path / "d.pddl"),
            "--out-problem", str(tmp_path / "p.pddl"),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "partitions: 4" in out
        assert "number objects: 6" in out
        assert "__give_min_reward_0-1-3" in (tmp_path / "d.pddl").read_text()

    def test_labeled_mode_roundtrip(self, driverlog_args, tmp_path):
        assignment = tmp_path / "assignment.json"
        main(["assign", *driverlog_args, "--scheme", "g-maximin",
              "--out", str(assignment)])
        code = main([
            "compile", *driverlog_args, "--mode", "labeled",
            "--assignment", str(assignment),
            "--out-domain", str(tmp_path / "d.pddl"),
            "--out-problem", str(tmp_path / "p.pddl"),
        ])
        assert code == 0
        assert "atab" in (tmp_path / "d.pddl").read_text()

    def test_labeled_without_assignment_is_usage_error(self, driverlog_args,
                                                       tmp_path):
        code = main([
            "compile", *driverlog_args, "--mode", "labeled",
            "--out-domain", str(tmp_path / "d.pddl"),
            "--out-problem", str(tmp_path / "p.pddl"),
        ])
        assert code == 1

    def test_fair_mode_rejects_workload_scheme(self, driverlog_args, tmp_path):
        code = main([
            "compile", *driverlog_args, "--mode", "fair", "--scheme", "w-maximin",
            "--out-domain", str(tmp_path / "d.pddl"),
            "--out-problem", str(tmp_path / "p.pddl"),
        ])
        assert code == 2


class TestEvaluate:
    def test_valid_plan_report(self, driverlog_args, tmp_path):
        out = tmp_path / "report.json"
        code = main(["evaluate", *driverlog_args,
                     "--plan", str(FIXTURES / "plan11.txt"), "--out", str(out)])
        assert code == 0
        data = json.loads(out.read_text())
        assert data["valid"] is True
        assert data["report"]["goal-counts"]["driver3"] == 4
        assert data["report"]["plan-cost"] == 11

    def test_invalid_plan_verdict(self, driverlog_args, tmp_path, capsys):
        lines = (FIXTURES / "plan11.txt").read_text().splitlines()
        lines[0], lines[2] = lines[2], lines[0]
        bad = tmp_path / "bad.plan"
        bad.write_text("\n".join(lines))
        code = main(["evaluate", *driverlog_args, "--plan", str(bad)])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["valid"] is False
        assert data["failing-step"] == 0
        assert "report" not in data

    def test_reachievement_attribution_through_files(self, tmp_path, capsys):
        args = mini_files(tmp_path)
        plan = tmp_path / "plan.txt"
        plan.write_text("(make u1 w)\n(wipe u2 w)\n(make u2 w)\n")
        code = main(["evaluate", *args, "--plan", str(plan)])
        assert code == 0
        data = json.loads(capsys.readouterr().out)
        assert data["valid"] is True
        assert data["report"]["achievers"]["(held w)"] == "u1"
        assert data["report"]["re-achieved-non-assignable"] == []

    def test_unparsable_plan_is_input_error(self, driverlog_args, tmp_path):
        bad = tmp_path / "bad.plan"
        bad.write_text("(teleport driver1 s0)\n")
        assert main(["evaluate", *driverlog_args, "--plan", str(bad)]) == 2


class TestGenerateSolve:
    def test_generate_then_solve_then_evaluate(self, tmp_path, capsys):
        d = tmp_path / "wh-d.pddl"
        p = tmp_path / "wh-p.pddl"
        a = tmp_path / "wh-agents.txt"
        assert main(["generate", "--width", "2", "--height", "3", "--agents", "2",
                     "--work-locations", "2", "--seed", "4",
                     "--out-domain", str(d), "--out-problem", str(p),
                     "--out-agents", str(a)]) == 0
        plan = tmp_path / "plan.txt"
        assert main(["solve", "--domain", str(d), "--problem", str(p),
                     "--plan-out", str(plan)]) == 0
        capsys.readouterr()
        assert main(["evaluate", "--domain", str(d), "--problem", str(p),
                     "--agents", str(a), "--plan", str(plan)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["valid"] is True

    def test_unsolvable_task_exit_three(self, tmp_path, capsys):
        # the only achiever of the goal is removed from the domain
        domain = tmp_path / "dead-d.pddl"
        problem = tmp_path / "dead-p.pddl"
        domain.write_text("""
(define (domain dead)
(:requirements :typing)
(:types unit - object)
(:predicates (goal-atom) (other))
(:action spin
 :parameters (?u - unit)
 :precondition (and)
 :effect (and (other))))
""")
        problem.write_text("""
(define (problem dead-1)
(:domain dead)
(:objects u1 - unit)
(:init)
(:goal (and (goal-atom))))
""")
        code = main(["solve", "--domain", str(domain), "--problem", str(problem),
                     "--plan-out", str(tmp_path / "plan.txt")])
        assert code == 3
        assert "unsolvable" in capsys.readouterr().err

    def test_solve_writes_cost_trailer(self, tmp_path):
        args = mini_files(tmp_path)
        plan = tmp_path / "plan.txt"
        assert main(["solve", "--domain", args[1], "--problem", args[3],
                     "--plan-out", str(plan)]) == 0
        assert "; cost =" in plan.read_text()


class TestExitCodes:
    def test_no_subcommand_is_usage(self, capsys):
        assert main([]) == 1

    def test_unknown_flag_is_usage(self, driverlog_args):
        with pytest.raises(SystemExit) as err:
            main(["assign", *driverlog_args, "--scheme", "g-maximin",
                  "--frobnicate"])
        assert err.value.code == 1

    def test_missing_file_is_input_error(self, tmp_path):
        assert main(["solve", "--domain", str(tmp_path / "nope.pddl"),
                     "--problem", str(tmp_path / "nope2.pddl"),
                     "--plan-out", str(tmp_path / "p.txt")]) == 2

    def test_syntax_error_is_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.pddl"
        bad.write_text("(define (domain d) (:types")
        assert main(["solve", "--domain", str(bad), "--problem", str(bad),
                     "--plan-out", str(tmp_path / "p.txt")]) == 2
        assert "error" in capsys.readouterr().err

    def test_unassignable_goal_machine_readable(self, tmp_path, capsys):
        domain = tmp_path / "d.pddl"
        problem = tmp_path / "p.pddl"
        agents = tmp_path / "a.txt"
        domain.write_text("""
(define (domain blocked)
(:requirements :typing)
(:types unit - object)
(:predicates (key) (goal-atom))
(:action open
 :parameters (?u - unit)
 :precondition (key)
 :effect (and (goal-atom))))
""")
        problem.write_text("""
(define (problem blocked-1)
(:domain blocked)
(:objects u1 - unit)
(:init)
(:goal (and (goal-atom))))
""")
        agents.write_text("u1\n")
        code = main(["assign", "--domain", str(domain), "--problem", str(problem),
                     "--agents", str(agents), "--scheme", "g-maximin"])
        assert code == 2
        payload = json.loads(capsys.readouterr().err)
        assert payload["error"] == "unassignable-goal"
        assert payload["goal"] == "(goal-atom)"

    def test_help_documents_dialect(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["--help"])
        assert err.value.code == 0
        assert "PDDL dialect" in capsys.readouterr().out
