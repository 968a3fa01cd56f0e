import pytest

from achieve import (Atom, EnumerationBudget, Interpretation, brute_force_stable_models,
                     enumerate_stable_models, ground, is_stable, minimal_model, parse_program,
                     reduct, translate_choice)
from achieve import oracles
from achieve.engine import is_stable_reference, least_model, stratify
from achieve.errors import BudgetExceeded
from conftest import instance, load


def models(text):
    return {frozenset(str(a) for a in m) for m in enumerate_stable_models(ground(parse_program(text)))}


def atoms(*names):
    return [Atom(n, ()) for n in names]


@pytest.mark.parametrize("text,expected", [
    ("p :- not q. q :- not p.", [{"p"}, {"q"}]),
    ("a :- not a.", []),
    ("a. b :- a. c :- b, not d.", [{"a", "b", "c"}]),
    ("a :- b. b :- a.", [set()]),
    ("p :- not q. q :- not r. r :- not p.", []),
    ("1 { a; b } 1.", [{"a"}, {"b"}]),
    ("0 { a } 1.", [set(), {"a"}]),
    ("{ a; b }.", [set(), {"a"}, {"a", "b"}, {"b"}]),
    ("2 { a; b; c } 2. :- a, c.", [{"a", "b"}, {"b", "c"}]),
    ("{ a }. b :- not a. :- b.", [{"a"}]),
])
def test_textbook_programs(text, expected):
    assert models(text) == {frozenset(e) for e in expected}


def test_reduct_and_minimal_model():
    g = ground(parse_program("p :- not q. q :- not p."))
    I = atoms("p")
    red = reduct(g, I)
    assert red.rules == ((Atom("p", ()), ()),)
    assert minimal_model(red) == Interpretation(I)
    assert is_stable(g, I) and not is_stable(g, atoms("p", "q")) and not is_stable(g, [])


def test_least_model():
    a, b, c = atoms("a", "b", "c")
    assert least_model([(a, ()), (b, (a,)), (c, (b, c))]) == {a, b}


def test_choice_translation_fresh_atoms():
    g = ground(parse_program("1 { a; b } 1."))
    t = translate_choice(g)
    assert len(t.fresh) == 2 and all(f.is_fresh() for f in t.fresh)
    assert len(t.cardinality) == 1
    assert all(m.predicates() <= {("a", 0), ("b", 0)} for m in enumerate_stable_models(g))


def test_fast_and_reference_stability_agree(hamiltonian):
    g = ground(hamiltonian, instance(hamiltonian, "triangle"))
    pool = sorted(g.atoms, key=str)
    import itertools

    ins = [a for a in pool if a.pred == "in"]
    base = [a for a in pool if a.pred != "in" and a.pred != "reached"]
    reached = [a for a in pool if a.pred == "reached"]
    for r in range(0, 4):
        for combo in itertools.combinations(ins, r):
            I = base + list(combo) + reached
            assert is_stable(g, I) == is_stable_reference(g, I)


def test_atoms_outside_program_are_not_stable():
    g = ground(parse_program("a."))
    assert not is_stable(g, atoms("a", "zzz"))


@pytest.mark.parametrize("n", [4, 5, 6])
def test_nqueens_models_match_oracle(nqueens, n):
    ms = enumerate_stable_models(ground(nqueens, instance(nqueens, f"n{n}")))
    got = {frozenset(m.extension("queen", 2)) for m in ms}
    assert got == set(oracles.nqueens_solutions(n))


def test_models_are_canonically_ordered(nqueens):
    ms = enumerate_stable_models(ground(nqueens, instance(nqueens, "n6")))
    assert ms == sorted(ms)


def test_brute_force_agrees_on_small_program():
    g = ground(parse_program("{ a; b; c }. d :- a, not b. :- c, d. e :- not a."))
    assert enumerate_stable_models(g) == brute_force_stable_models(g)
    assert brute_force_stable_models(g, reference=False) == brute_force_stable_models(g)


def test_budgets():
    g = ground(parse_program("{ a; b; c; d }."))
    with pytest.raises(BudgetExceeded) as err:
        enumerate_stable_models(g, EnumerationBudget(max_models=3))
    assert err.value.kind == "models"
    with pytest.raises(BudgetExceeded):
        enumerate_stable_models(g, EnumerationBudget(max_candidates=2))
    with pytest.raises(BudgetExceeded):
        brute_force_stable_models(g, EnumerationBudget(max_candidates=8))


@pytest.mark.parametrize("kw", [{"max_candidates": 0}, {"max_models": -1}, {"timeout": 0}])
def test_budget_validation(kw):
    with pytest.raises(ValueError):
        EnumerationBudget(**kw)


def test_stats_reported(nqueens):
    st = {}
    enumerate_stable_models(ground(nqueens, instance(nqueens, "n4")), stats=st)
    assert st["candidates"] >= 2 and st["branch_atoms"] == 16


def test_stratify_puts_constraints_last():
    g = ground(parse_program("a. b :- a, not c. :- b, a. c :- not a."))
    levels = stratify(g)
    assert all(r.is_constraint for r in levels[-1])


def test_aggregate_over_choice():
    out = models("{ a(1); a(2) }. s(N) :- N = #sum{ X : a(X) }. :- s(N), N < 2.")
    assert out == {frozenset({"a(1)", "a(2)", "s(3)"}), frozenset({"a(2)", "s(2)"})}
