import pytest

from achieve import Atom, Interpretation, parse_program, preds, prefix
from achieve.errors import PrefixRangeError
from achieve.model import Symbol, atom_key, term_key
from conftest import load


def test_symbols_and_ints_order():
    assert term_key(3) < term_key(Symbol("a"))
    assert sorted([Symbol("b"), 2, Symbol("a"), -1], key=term_key) == [-1, 2, Symbol("a"), Symbol("b")]


def test_interpretation_rejects_non_precomputed():
    from achieve.model import BinOp

    with pytest.raises(ValueError):
        Interpretation([Atom("p", (BinOp("+", 1, 1),))])


def test_interpretation_set_semantics():
    a, b = Atom("p", (1,)), Atom("q", (Symbol("x"), 2))
    I = Interpretation([b, a, a])
    assert len(I) == 2 and a in I
    assert [str(x) for x in I] == ["p(1)", "q(x,2)"]
    assert I == Interpretation([a, b]) and hash(I) == hash(Interpretation([a, b]))
    assert I.extension("q", 2) == {(Symbol("x"), 2)}
    assert I.restrict([("p", 1)]) == Interpretation([a])
    assert I.predicates() == {("p", 1), ("q", 2)}


def test_atom_key_is_total():
    atoms = [Atom("p", (2,)), Atom("p", (1,)), Atom("o", ()), Atom("p", (1, 1))]
    assert [str(a) for a in sorted(atoms, key=atom_key)] == ["o", "p(1)", "p(2)", "p(1,1)"]


def test_prefix_of_queens8_is_first_rule():
    p = load("queens8")
    one = prefix(p, 1)
    assert one.n == 1 and str(one.rules[0]) == "row(1..8)."
    assert one.full is p
    assert prefix(p, p.n).rules == p.rules


@pytest.mark.parametrize("k", [0, -1, 7])
def test_prefix_range(k):
    with pytest.raises(PrefixRangeError):
        prefix(load("queens8"), k)


def test_prefix_keeps_only_earlier_annotations(nqueens):
    view = nqueens.prefix(3)
    assert view.record.domain == [1, 2, 3]
    assert nqueens.record.domain == [1, 2, 3, 4, 5, 6]


def test_preds_include_inputs(hamiltonian):
    assert preds(hamiltonian.prefix(1)) == {("in", 2), ("vertex", 1), ("edge", 2)}
    assert ("reached", 1) in preds(hamiltonian)


def test_to_text_round_trip():
    for name in ("nqueens", "hamiltonian", "obt", "sca", "borda", "queens8"):
        p = load(name)
        again = parse_program(p.to_text())
        assert again.rules == tuple(r for r in again.rules)
        assert [str(r) for r in again.rules] == [str(r) for r in p.rules]
        assert again.record == p.record
        assert again.input_spec == p.input_spec
        assert again.reconstructed == p.reconstructed
