import json

import pytest

from achieve import (EnumerationBudget, RecordOfAchievement, check, check_achievement,
                     check_completeness, eval_assertion, hamiltonian_correctness, parse_instance,
                     parse_program, validate_input)
from achieve.assertions import TRUE
from achieve.errors import SpecViolation
from achieve.grounder import herbrand_terms
from achieve.model import preds
from conftest import instance, load


def verdicts(result):
    return {k: v.verdict for k, v in result.items()}


def test_validate_triangle(hamiltonian):
    assert validate_input(instance(hamiltonian, "triangle"), hamiltonian.input_spec) == []


def test_validate_bad_placeholder(hamiltonian):
    inst = parse_instance("vertex(a;b;c). edge(a,b). #const v0=d.", hamiltonian.input_spec)
    assert validate_input(inst, hamiltonian.input_spec) == ["v0 in vertex/1 fails"]


def test_validate_assumption(hamiltonian):
    inst = parse_instance("vertex(a). edge(a,z). #const v0=a.", hamiltonian.input_spec)
    assert len(validate_input(inst, hamiltonian.input_spec)) == 1


def test_validate_queens_zero(nqueens):
    inst = parse_instance("#const n=0.", nqueens.input_spec)
    assert validate_input(inst, nqueens.input_spec) == ["n >= 1 fails"]


def test_validate_undeclared_and_unbound(nqueens):
    from achieve import Atom, InputInstance

    inst = InputInstance.make([Atom("q", (1,))])
    found = validate_input(inst, nqueens.input_spec)
    assert any("undeclared" in v for v in found) and any("unbound" in v for v in found)


def test_invalid_instance_refused(nqueens):
    with pytest.raises(SpecViolation):
        check(nqueens, [parse_instance("#const n=0.", nqueens.input_spec)])


@pytest.mark.parametrize("n", [4, 5])
def test_queens_record_is_achieved(nqueens, n):
    res = check_achievement(nqueens, None, [instance(nqueens, f"n{n}")])
    assert verdicts(res) == {k: "pass" for k in range(1, 7)}


def test_moved_col_annotation_fails(nqueens):
    rec = nqueens.record
    moved = rec.without(2).with_entry(1, rec[2])
    res = check_achievement(nqueens, moved, [instance(nqueens, "n4")])
    v = res[1]
    assert v.verdict == "fail"
    assert v.counterexample["prefix"] == 1
    assert v.counterexample["model"] == ["row(1)", "row(2)", "row(3)", "row(4)"]


def test_hamiltonian_record(hamiltonian):
    report = check(hamiltonian, [instance(hamiltonian, g) for g in ("triangle", "path3")])
    assert report.exit_code == 0
    assert [a.index for a in report.annotations] == [1, 2, 4, 5]
    assert report.stats["coverage"] == "checked on 2 instance(s)"


def test_queens_completeness(nqueens):
    st = {}
    res = check_completeness(nqueens, None, [instance(nqueens, "n4")], stats=st)
    assert verdicts(res) == {k: "pass" for k in range(1, 7)}
    assert st["candidates"]["3/nqueens-n4"] == 1820


def test_queens_without_diagonal_is_incomplete(nqueens):
    rec = nqueens.record.with_entry(6, TRUE)
    res = check_completeness(nqueens, rec, [instance(nqueens, "n4")])
    v = res[6]
    assert v.verdict == "fail" and v.counterexample["prefix"] == 6
    queens = {s for s in v.counterexample["interpretation"] if s.startswith("queen")}
    assert queens == {"queen(1,1)", "queen(2,2)", "queen(3,3)", "queen(4,4)"}
    assert all(r.verdict == "pass" for k, r in res.items() if k < 6)


def test_completeness_budget_is_inconclusive(nqueens):
    res = check_completeness(nqueens, None, [instance(nqueens, "n4")], EnumerationBudget(max_candidates=50))
    assert res[3].verdict == "inconclusive" and res[3].reason
    assert res[1].verdict == "pass"


def test_achievement_budget_is_inconclusive(nqueens):
    res = check_achievement(nqueens, None, [instance(nqueens, "n4")], EnumerationBudget(max_models=100))
    # prefixes 3 and 4 have 1820 and 256 models; 5 and 6 fit in the budget
    assert verdicts(res) == {1: "inconclusive", 2: "inconclusive", 3: "inconclusive",
                             4: "inconclusive", 5: "pass", 6: "pass"}


def test_fail_beats_inconclusive(nqueens):
    rec = nqueens.record.with_entry(1, nqueens.record[2])
    res = check_achievement(nqueens, rec, [instance(nqueens, "n4")], EnumerationBudget(max_models=100))
    assert res[1].verdict == "fail"


@pytest.mark.parametrize("name,cycles", [("triangle", 2), ("k4", 6), ("path3", 0)])
def test_hamiltonian_correctness(hamiltonian, name, cycles):
    from achieve import enumerate_stable_models, ground

    inst = instance(hamiltonian, name)
    assert hamiltonian_correctness(hamiltonian, None, inst)
    assert len(enumerate_stable_models(ground(hamiltonian, inst))) == cycles


def test_trivial_record_passes():
    p = parse_program("{ a; b }. c :- a, not b.\n:- c, b.")
    rec = RecordOfAchievement.from_mapping({k: TRUE for k in range(1, 4)})
    assert verdicts(check_achievement(p, rec, [parse_instance("", p.input_spec)])) == {1: "pass", 2: "pass", 3: "pass"}


def test_shrinking_instances_never_breaks_pass(hamiltonian):
    bad = RecordOfAchievement.from_mapping({5: hamiltonian.record[5]}).with_entry(
        4, __import__("achieve").parse_assertion("|reached/1| = 3"))
    insts = [instance(hamiltonian, g) for g in ("triangle", "k4")]
    both = check_achievement(hamiltonian, bad, insts)
    one = check_achievement(hamiltonian, bad, insts[:1])
    assert both[4].verdict == "fail" and one[4].verdict == "pass"


def test_definition_fidelity_on_dumped_models(hamiltonian):
    from achieve import enumerate_stable_models, ground

    inst = instance(hamiltonian, "k4")
    assert check(hamiltonian, [inst], completeness=False).exit_code == 0
    spec = hamiltonian.input_spec
    U = herbrand_terms(hamiltonian, inst)
    for k, f in hamiltonian.record.entries:
        for kk in range(k, hamiltonian.n + 1):
            for m in enumerate_stable_models(ground(hamiltonian.prefix(kk), inst)):
                assert eval_assertion(f, inst, m, U, spec.input_predicates, spec.placeholder_names,
                                      preds(hamiltonian))


def test_completeness_and_achievement_at_last_prefix_give_model_set(hamiltonian):
    from achieve import a_star, enumerate_satisfying, enumerate_stable_models, ground

    inst = instance(hamiltonian, "triangle")
    spec = hamiltonian.input_spec
    sat = enumerate_satisfying(a_star(hamiltonian.record, hamiltonian.n), inst, preds(hamiltonian),
                               herbrand_terms(hamiltonian, inst), None, spec.input_predicates,
                               spec.placeholder_names)
    assert sat == enumerate_stable_models(ground(hamiltonian, inst))


@pytest.mark.parametrize("name,insts", [("obt", ["k1", "k2"]), ("sca", ["s3n2"]), ("borda", ["election"])])
def test_reconstructed_records(name, insts):
    p = load(name)
    report = check(p, [instance(p, i) for i in insts])
    assert report.exit_code == 0, report.to_text()


def test_report_json_is_deterministic(hamiltonian):
    insts = [instance(hamiltonian, "triangle")]
    one = check(hamiltonian, insts).to_json()
    two = check(hamiltonian, insts).to_json()
    assert one == two
    doc = json.loads(one)
    assert set(doc) == {"program", "instances", "annotations", "stats"}
    assert set(doc["annotations"][0]) == {"index", "assertion", "achievement", "completeness"}


def test_text_and_json_agree(nqueens):
    rec = nqueens.record.without(2).with_entry(1, nqueens.record[2])
    report = check(nqueens, [instance(nqueens, "n4")], record=rec, completeness=False)
    doc = json.loads(report.to_json())
    text = report.to_text()
    for ann in doc["annotations"]:
        assert f"achievement: {ann['achievement']['verdict']}" in text
    assert report.exit_code == 1
