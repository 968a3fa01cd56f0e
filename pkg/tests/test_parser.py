import pytest

from achieve import parse_instance, parse_program
from achieve.errors import ArityError, IncompleteInput, ParseError, SafetyError, SpecViolation
from achieve.model import BinOp, ChoiceHead, Interval, Symbol, Variable


def rules(text):
    return parse_program(text).rules


def test_fact_with_interval():
    (r,) = rules("row(1..n).")
    assert r.index == 1 and r.body == ()
    assert r.head.args == (Interval(1, Symbol("n")),)


def test_rule_order_and_indices():
    rs = rules("a. b :- a. :- b, not a.")
    assert [r.index for r in rs] == [1, 2, 3]
    assert rs[2].is_constraint


def test_choice_rule_bounds_and_conditions():
    (r,) = rules("n { queen(I,J) : col(I), row(J) } n.")
    assert isinstance(r.head, ChoiceHead)
    assert r.head.lower == Symbol("n") and r.head.upper == Symbol("n")
    assert len(r.head.elements[0].condition) == 2


def test_choice_without_upper_bound():
    (r,) = rules("1 { a; b }.")
    assert r.head.upper is None and len(r.head.elements) == 2


def test_arithmetic_precedence():
    (r,) = rules("p(1+2*3).")
    assert r.head.args[0] == BinOp("+", 1, BinOp("*", 2, 3))


def test_comparison_head_becomes_constraint():
    (r,) = rules("Y < Y1 :- q(Y), q(Y1).")
    assert r.is_constraint
    assert str(r.body[-1]).replace(" ", "") == "Y>=Y1"


def test_aggregate_body():
    (r,) = rules("s(N) :- N = #sum{ S,X : v(X,S) }.")
    agg = r.body[0]
    assert agg.func == "sum" and agg.elements[0].terms == (Variable("S"), Variable("X"))


def test_comments_and_span():
    p = parse_program("% comment\n\np(1).  % trailing\nq :- p(1).", file="f.lp")
    assert p.rules[1].span.line == 4 and p.rules[1].span.file == "f.lp"


@pytest.mark.parametrize("text,var", [
    ("p(X) :- not q(X).", "X"),
    ("p(X) :- X > 1.", "X"),
    ("p(Y) :- q(X).", "Y"),
    ("p :- not q(_).", "_"),
    ("{ a(X) }.", "X"),
    ("s(N) :- N = #sum{ S : v(S,T) }, w(T2).", None),
])
def test_unsafe_rules(text, var):
    if var is None:
        rules(text)
        return
    with pytest.raises(SafetyError) as err:
        rules(text)
    assert err.value.variable == var


def test_safe_arithmetic_binding():
    rules("p(Y) :- q(X), Y = X+1.")
    rules("posScore(P,C,X*VC) :- p(P,Pos,C), X = 3-Pos, votecount(P,VC).")


@pytest.mark.parametrize("text", ["p(1.", "p :- .", "p(f(1)).", "p(X) :- q(X)", "#const n=3. p."])
def test_syntax_errors_carry_spans(text):
    with pytest.raises(ParseError) as err:
        parse_program(text, file="bad.lp")
    assert err.value.span is not None and err.value.span.file == "bad.lp"


def test_annotations_attach_to_preceding_rule():
    p = parse_program("a.\nb.\n%@ achieved: true.\nc.\n")
    assert p.record.domain == [2]


def test_group_annotation_attaches_to_last_rule():
    from conftest import load

    assert 3 not in load("hamiltonian").record.domain
    assert 4 in load("hamiltonian").record.domain


def test_multiline_annotation():
    p = parse_program("q(1).\n%@ achieved: forall X in q/1:\n%@   X = 1.\n")
    assert str(p.record[1]) == "forall X in q/1: X = 1"


def test_annotation_before_first_rule():
    with pytest.raises(ParseError):
        parse_program("%@ achieved: true.\na.")


def test_annotation_unknown_predicate():
    with pytest.raises(ArityError):
        parse_program("p(1).\n%@ achieved: p/2 = {}.")


def test_input_declarations():
    from conftest import load

    spec = load("hamiltonian").input_spec
    assert spec.input_predicates == {("vertex", 1), ("edge", 2)}
    assert spec.placeholder_names == ("v0",)
    assert str(spec.condition("v0")) == "v0 in vertex/1"
    assert len(spec.assumptions) == 1


def test_reconstructed_flag():
    from conftest import load

    assert load("obt").reconstructed and load("obt").declared_complete
    assert not load("nqueens").reconstructed


def test_instance_parsing():
    from conftest import load

    spec = load("hamiltonian").input_spec
    inst = parse_instance("vertex(a;b). edge(a,b). #const v0=a.", spec, name="g")
    assert inst.name == "g" and inst.binding_map == {"v0": Symbol("a")}
    assert len(inst.facts) == 3


def test_instance_errors():
    from conftest import load

    spec = load("hamiltonian").input_spec
    with pytest.raises(SpecViolation):
        parse_instance("vertex(a). in(a,a). #const v0=a.", spec)
    with pytest.raises(IncompleteInput):
        parse_instance("vertex(a).", spec)
    with pytest.raises(ParseError):
        parse_instance("vertex(X). #const v0=a.", spec)
