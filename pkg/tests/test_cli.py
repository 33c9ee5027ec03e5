import json
from pathlib import Path

import pytest

from bpmc.automata import check_unambiguous, parse_automaton
from bpmc.bp import parse_bp
from bpmc.cli import main
from bpmc.hardness import dump_atm, dump_circuit
from conftest import CRITICAL_GW, RUNNING, TRANSITION_SYSTEM
from randgen import random_atm, random_circuit

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "ex1.bp").write_text(RUNNING)
    (tmp_path / "gw.bp").write_text(CRITICAL_GW)
    (tmp_path / "ts.bp").write_text(TRANSITION_SYSTEM)
    (tmp_path / "gfy.nba").write_text(
        "nba; alphabet X Y; states p f; initial p; accepting f; p -X-> p; p -Y-> f; f -X-> p; f -Y-> f;")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def json_report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    rep = json.loads(out)
    assert set(rep["timings"]) == {"total_seconds"}
    del rep["timings"]
    return code, rep


def test_ltl_golden(files, capsys):
    code, rep = json_report(capsys, "check", "ltl1", "--bp", files / "ex1.bp", "--ltl", "F D")
    assert code == 0
    assert rep == json.loads((GOLDEN / "ltl1_running_fd.json").read_text())


def test_human_readable(files, capsys):
    code, out, _ = run(capsys, "check", "ltl1", "--bp", files / "ex1.bp", "--ltl", "F D")
    assert code == 0 and out.startswith("ltl1: NO") and "rho=Greater" in out


def test_finite_critical(files, capsys):
    code, rep = json_report(capsys, "check", "finite1", "--bp", files / "gw.bp")
    assert code == 0 and rep["answer"] == "YES" and "witness" not in rep


def test_reach_and_nba(files, capsys):
    _, rep = json_report(capsys, "check", "reach1", "--bp", files / "ex1.bp", "--targets", "D")
    assert rep["answer"] == "NO"
    _, rep = json_report(capsys, "check", "nba1", "--bp", files / "ts.bp", "--aut", files / "gfy.nba")
    assert rep["answer"] == "YES" and rep["route"] == "nba-determinize-dpa"


def test_ltl2uba_round_trip(files, capsys):
    out = files / "out.nba"
    code, _, _ = run(capsys, "translate", "ltl2uba", "--ltl", "G !D", "--alphabet", "I,B,D", "-o", out)
    assert code == 0
    assert check_unambiguous(parse_automaton(out.read_text()))


def test_nba2dpa(files, capsys):
    out = files / "out.dpa"
    assert run(capsys, "translate", "nba2dpa", "--aut", files / "gfy.nba", "-o", out)[0] == 0
    assert parse_automaton(out.read_text()).priority


def test_fail_on_no(files, capsys):
    args = ("check", "ltl1", "--bp", files / "ex1.bp", "--ltl", "F D")
    assert run(capsys, *args, "--fail-on-no")[0] == 1
    assert run(capsys, "check", "finite1", "--bp", files / "gw.bp", "--fail-on-no")[0] == 0


def test_parse_errors_exit_2(files, capsys):
    code, _, err = run(capsys, "check", "ltl1", "--bp", files / "ex1.bp", "--ltl", "G (")
    assert code == 2 and "position" in err
    (files / "bad.bp").write_text("bp; start X; X -> 1/2 : X;")
    assert run(capsys, "check", "finite1", "--bp", files / "bad.bp")[0] == 2
    assert run(capsys, "check", "nba1", "--bp", files / "ex1.bp", "--aut", files / "missing.nba")[0] == 2
    assert run(capsys, "check", "ltl1", "--bp", files / "ex1.bp")[0] == 2
    with pytest.raises(SystemExit) as ei:
        main(["check", "nosuchproblem"])
    assert ei.value.code == 2


def test_budget_exit_3(files, capsys):
    code, _, _ = run(capsys, "check", "nba1", "--bp", files / "ts.bp", "--aut", files / "gfy.nba", "--budget", "1")
    assert code == 3


def test_reports_are_reproducible(files, capsys):
    args = ("check", "ltl1", "--bp", files / "ex1.bp", "--ltl", "F D")
    assert json_report(capsys, *args) == json_report(capsys, *args)
    sim = ("simulate", "--bp", files / "ex1.bp", "--depth", "6", "--seed", "3")
    assert run(capsys, *sim) == run(capsys, *sim)


def test_simulate_curve_and_prob(files, capsys):
    _, out, _ = run(capsys, "simulate", "--bp", files / "ex1.bp", "--depth", "3", "--samples", "20",
                    "--targets", "D")
    assert out.splitlines()[0] == "depth,rate" and len(out.splitlines()) == 5
    code, out, err = run(capsys, "prob", "--bp", files / "ex1.bp", "--targets", "D", "--max-iter", "5")
    assert code == 0 and out.startswith("iter,type,value") and "not converged" in err


def test_gen_round_trips(files, capsys, tmp_path):
    import random

    (tmp_path / "c.circ").write_text(dump_circuit(random_circuit(random.Random(1))))
    assert run(capsys, "gen", "circuit", "--circuit", tmp_path / "c.circ", "-o", tmp_path / "c")[0] == 0
    parse_bp((tmp_path / "c.bp").read_text())
    parse_automaton((tmp_path / "c.dpa").read_text())
    (tmp_path / "m.atm").write_text(dump_atm(random_atm(random.Random(1))))
    assert run(capsys, "gen", "atm", "--atm", tmp_path / "m.atm", "--word", "a,b", "-o", tmp_path / "m")[0] == 0
    parse_bp((tmp_path / "m.bp").read_text())
    parse_automaton((tmp_path / "m.nba").read_text())
    assert run(capsys, "gen", "atm", "--atm", tmp_path / "m.atm", "--word", "")[0] == 2
