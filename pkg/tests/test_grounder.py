import pytest

from achieve import enumerate_stable_models, ground, herbrand_terms, parse_instance, parse_program
from achieve.errors import NonFiniteGrounding, UnboundPlaceholder, UnsupportedAggregate
from achieve.grounder import aggregate_value
from achieve.model import Symbol
from conftest import instance, load


def only_model(text, inst=None):
    p = parse_program(text)
    g = ground(p, inst) if inst else ground(p)
    models = enumerate_stable_models(g)
    assert len(models) == 1
    return {str(a) for a in models[0]}


def test_transitive_closure():
    m = only_model("e(1,2). e(2,3). e(3,4). t(X,Y) :- e(X,Y). t(X,Y) :- e(X,Z), t(Z,Y).")
    assert {a for a in m if a.startswith("t(")} == {
        "t(1,2)", "t(1,3)", "t(1,4)", "t(2,3)", "t(2,4)", "t(3,4)"}


def test_intervals_and_pools():
    assert only_model("p(1..3). q(a;b).") == {"p(1)", "p(2)", "p(3)", "q(a)", "q(b)"}


def test_empty_interval():
    assert only_model("p(3..1). q.") == {"q"}


def test_arithmetic_truncates_and_skips_division_by_zero():
    m = only_model("v(-7). v(2). v(0). d(X/Y) :- v(X), v(Y), Y != X. r(X\\2) :- v(X).")
    assert "d(-3)" in m and "d(0)" in m
    assert "r(-1)" in m and "r(0)" in m


def test_placeholders_substituted(nqueens):
    g = ground(nqueens.prefix(2), instance(nqueens, "n4"))
    assert {str(a) for a in g.atoms} == {f"row({i})" for i in range(1, 5)} | {f"col({i})" for i in range(1, 5)}


def test_unbound_placeholder(nqueens):
    with pytest.raises(UnboundPlaceholder):
        ground(nqueens)


def test_input_facts_included(hamiltonian):
    g = ground(hamiltonian.prefix(1), instance(hamiltonian, "triangle"))
    atoms = {str(a) for a in g.atoms}
    assert "vertex(a)" in atoms and "edge(a,b)" in atoms and "in(a,b)" in atoms
    assert "in(a,a)" not in atoms


def test_sum_counts_distinct_witnesses():
    m = only_model("ps(1,2,2). ps(2,2,1). ps(3,2,1). s(N) :- N = #sum{ S : ps(_,2,S) }.")
    assert "s(4)" in m


def test_count_and_max():
    m = only_model("a(1..4). b(2). c(N) :- N = #count{ X : a(X), not b(X) }. m(M) :- M = #max{ X : a(X) }.")
    assert "c(3)" in m and "m(4)" in m


def test_empty_aggregates():
    m = only_model("z. s(N) :- N = #sum{ X : none(X) }. c(N) :- N = #count{ X : none(X) }. "
                   "m(M) :- M = #max{ X : none(X) }.")
    assert m == {"z", "s(0)", "c(0)"}


def test_aggregate_value_helper():
    assert aggregate_value("sum", [(2, Symbol("a")), (3,)]) == 5
    assert aggregate_value("min", [(2,), (-1,)]) == -1
    assert aggregate_value("count", [(1,), (1, 2)]) == 2


def test_recursive_aggregate_rejected():
    with pytest.raises(UnsupportedAggregate):
        ground(parse_program("p(1). p(N+1) :- N = #count{ X : p(X) }, N < 3."))


def test_non_finite_grounding():
    with pytest.raises(NonFiniteGrounding):
        ground(parse_program("p(0). p(X+1) :- p(X)."), atom_limit=500)


def test_bounded_recursion_terminates():
    m = only_model("p(0). p(X+1) :- p(X), X < 5.")
    assert m == {f"p({i})" for i in range(6)}


def test_herbrand_terms_of_prefix_use_full_program():
    p = load("queens8")
    assert herbrand_terms(p.prefix(1)) == set(range(1, 9))


def test_herbrand_terms_include_instance(hamiltonian):
    terms = herbrand_terms(hamiltonian, instance(hamiltonian, "path3"))
    assert terms == {Symbol("a"), Symbol("b"), Symbol("c")}


def test_ground_is_deterministic(nqueens):
    inst = instance(nqueens, "n4")
    assert ground(nqueens, inst).dump() == ground(nqueens, inst).dump()


def test_constraint_instances_with_false_comparisons_dropped():
    g = ground(parse_program("q(1..3). :- q(X), q(Y), X < Y, X > Y."))
    assert not any(r.is_constraint for r in g.rules)
