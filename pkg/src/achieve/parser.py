"""Recursive-descent parser for programs, ``%@`` annotations and instance files."""

from __future__ import annotations

import itertools
import os
import re
from typing import Any, Optional

from .arith import eval_values
from .assertions import parse_assertion, referenced_predicates
from .errors import ArityError, IncompleteInput, ParseError, SafetyError, SourceSpan, SpecViolation
from .lexer import Token, TokenStream, tokenize
from .model import (
    COMPARISON_OPS, NEGATED_OP, AggregateAssign, AggregateElement, AnnotationBlock, Atom,
    BinOp, ChoiceElement, ChoiceHead, Comparison, InputInstance, InputSpec, Interval,
    Literal, Pool, Program, Rule, Symbol, TupleTerm, UnOp, Variable, is_precomputed,
    sig_str, term_vars,
)

_AGG_FUNCS = {"#sum": "sum", "#count": "count", "#max": "max", "#min": "min"}


class _RuleParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts

    # terms
    def term(self) -> Any:
        left = self.additive()
        if self.ts.accept(".."):
            return Interval(left, self.additive())
        return left

    def additive(self) -> Any:
        left = self.mult()
        while self.ts.at_op("+", "-"):
            op = self.ts.advance().value
            left = BinOp(op, left, self.mult())
        return left

    def mult(self) -> Any:
        left = self.unary()
        while self.ts.at_op("*", "/", "\\"):
            op = self.ts.advance().value
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Any:
        if self.ts.at_op("-"):
            self.ts.advance()
            arg = self.unary()
            if isinstance(arg, int):
                return -arg
            return UnOp("-", arg)
        return self.primary()

    def primary(self) -> Any:
        ts = self.ts
        t = ts.cur
        if t.kind == "NUM":
            ts.advance()
            return int(t.value)
        if t.kind == "VAR":
            ts.advance()
            return Variable(t.value)
        if t.kind == "ID":
            if ts.peek().value == "(":
                ts.error(f"function terms are not supported ({t.value}(...))")
            ts.advance()
            return Symbol(t.value)
        if ts.at_op("|"):
            ts.advance()
            arg = self.term()
            ts.expect("|")
            return UnOp("abs", arg)
        if ts.at_op("("):
            ts.advance()
            first = self.term()
            if ts.accept(";"):
                alts = [first, self.term()]
                while ts.accept(";"):
                    alts.append(self.term())
                ts.expect(")")
                return Pool(tuple(alts))
            items = [first]
            trailing = False
            while ts.accept(","):
                if ts.at_op(")"):
                    trailing = True
                    break
                items.append(self.term())
            ts.expect(")")
            if len(items) == 1 and not trailing:
                return first
            return TupleTerm(tuple(items))
        ts.error(f"expected a term, found {ts.describe()}")

    # atoms and literals
    def atom(self) -> Atom:
        ts = self.ts
        t = ts.cur
        if t.kind != "ID":
            ts.error(f"expected an atom, found {ts.describe()}")
        ts.advance()
        if not ts.accept("("):
            return Atom(t.value, ())
        args = [self.term()]
        if ts.at_op(";"):
            alts = [args[0]]
            while ts.accept(";"):
                alts.append(self.term())
            if ts.at_op(","):
                ts.error("pools are only supported in single-argument atoms")
            ts.expect(")")
            return Atom(t.value, (Pool(tuple(alts)),))
        while ts.accept(","):
            args.append(self.term())
            if ts.at_op(";"):
                ts.error("pools are only supported in single-argument atoms")
        ts.expect(")")
        return Atom(t.value, tuple(args))

    def _comparison_op(self) -> Optional[str]:
        t = self.ts.cur
        if t.kind == "OP" and t.value in COMPARISON_OPS:
            return t.value
        return None

    def condition_literal(self):
        """A literal inside a choice element or aggregate element condition."""
        ts = self.ts
        if ts.cur.kind == "ID" and ts.cur.value == "not":
            ts.advance()
            return Literal(self.atom(), True)
        if ts.cur.kind == "ID":
            a = self.atom()
            op = self._comparison_op()
            if op and not a.args:
                ts.advance()
                return Comparison(op, Symbol(a.pred), self.term())
            return Literal(a)
        left = self.term()
        op = self._comparison_op()
        if not op:
            ts.error(f"expected a comparison operator, found {ts.describe()}")
        ts.advance()
        return Comparison(op, left, self.term())

    def body_item(self):
        ts = self.ts
        if ts.cur.kind == "DIRECTIVE":
            agg = self.aggregate()
            if not ts.accept("="):
                ts.error("aggregates are only supported in assignment position")
            return AggregateAssign(self.term(), agg[0], agg[1])
        if ts.cur.kind == "ID" and ts.cur.value == "not":
            ts.advance()
            return Literal(self.atom(), True)
        if ts.cur.kind == "ID":
            a = self.atom()
            op = self._comparison_op()
            if op and not a.args:
                ts.advance()
                return Comparison(op, Symbol(a.pred), self.term())
            return Literal(a)
        left = self.term()
        op = self._comparison_op()
        if not op:
            ts.error(f"expected a comparison operator, found {ts.describe()}")
        ts.advance()
        if ts.cur.kind == "DIRECTIVE":
            if op != "=":
                ts.error("aggregates are only supported in assignment position")
            func, elems = self.aggregate()
            return AggregateAssign(left, func, elems)
        return Comparison(op, left, self.term())

    def aggregate(self):
        ts = self.ts
        t = ts.cur
        if t.value not in _AGG_FUNCS:
            ts.error(f"unsupported directive {t.value}")
        ts.advance()
        ts.expect("{")
        elems = []
        if not ts.at_op("}"):
            elems.append(self.aggregate_element())
            while ts.accept(";"):
                elems.append(self.aggregate_element())
        ts.expect("}")
        return _AGG_FUNCS[t.value], tuple(elems)

    def aggregate_element(self) -> AggregateElement:
        ts = self.ts
        terms = [self.term()]
        while ts.accept(","):
            terms.append(self.term())
        cond = []
        if ts.accept(":"):
            cond.append(self.condition_literal())
            while ts.accept(","):
                cond.append(self.condition_literal())
        return AggregateElement(tuple(terms), tuple(cond))

    def body(self) -> tuple:
        items = [self.body_item()]
        while self.ts.accept(","):
            items.append(self.body_item())
        return tuple(items)

    def choice(self, lower) -> ChoiceHead:
        ts = self.ts
        ts.expect("{")
        elems = []
        if not ts.at_op("}"):
            elems.append(self.choice_element())
            while ts.accept(";"):
                elems.append(self.choice_element())
        ts.expect("}")
        upper = None
        if not (ts.at_op(".") or ts.at_op(":-")):
            upper = self.term()
        return ChoiceHead(lower, upper, tuple(elems))

    def choice_element(self) -> ChoiceElement:
        ts = self.ts
        a = self.atom()
        cond = []
        if ts.accept(":"):
            cond.append(self.condition_literal())
            while ts.accept(","):
                cond.append(self.condition_literal())
        return ChoiceElement(a, tuple(cond))

    def statement(self, index: int) -> Rule:
        """One rule; the head comparison form ``t1 op t2 :- body`` becomes a constraint."""
        ts = self.ts
        span = ts.span()
        if ts.cur.kind == "DIRECTIVE":
            ts.error(f"directive {ts.cur.value} is not allowed in programs")
        if ts.accept(":-"):
            body = self.body()
            ts.expect(".")
            return Rule(index, None, body, span)
        head_cmp = None
        if ts.at_op("{"):
            head = self.choice(None)
        elif ts.cur.kind == "ID":
            a = self.atom()
            op = self._comparison_op()
            if op and not a.args:
                ts.advance()
                head_cmp = Comparison(op, Symbol(a.pred), self.term())
                head = None
            elif ts.at_op("{"):
                head = self.choice(Symbol(a.pred)) if not a.args else ts.error("bad choice bound")
            else:
                head = a
        else:
            left = self.term()
            op = self._comparison_op()
            if ts.at_op("{"):
                head = self.choice(left)
            elif op:
                ts.advance()
                head_cmp = Comparison(op, left, self.term())
                head = None
            else:
                ts.error(f"expected a rule head, found {ts.describe()}")
        body: tuple = ()
        if ts.accept(":-"):
            body = self.body()
        ts.expect(".")
        if head_cmp is not None:
            body = body + (Comparison(NEGATED_OP[head_cmp.op], head_cmp.left, head_cmp.right),)
            return Rule(index, None, body, span)
        return Rule(index, head, body, span)


# -- safety ---------------------------------------------------------------------

def _binding_vars(t: Any) -> set[str]:
    """Variables bound by matching ``t`` as a positive-atom argument."""
    if isinstance(t, Variable):
        return set() if t.anonymous else {t.name}
    if isinstance(t, TupleTerm):
        out = set()
        for i in t.items:
            out |= _binding_vars(i)
        return out
    return set()


def _vars(t: Any) -> set[str]:
    return {v.name for v in term_vars(t) if not v.anonymous}


def _has_anon(t: Any) -> bool:
    return any(v.anonymous for v in term_vars(t))


def _item_vars(item) -> set[str]:
    if isinstance(item, Literal):
        return {v.name for v in item.atom.vars() if not v.anonymous}
    if isinstance(item, Comparison):
        return _vars(item.left) | _vars(item.right)
    if isinstance(item, AggregateAssign):
        out = _vars(item.term)
        for e in item.elements:
            for t in e.terms:
                out |= _vars(t)
            for c in e.condition:
                out |= _item_vars(c)
        return out
    raise TypeError(item)


def _check_anonymous(items, span, allow_positive=True):
    for it in items:
        if isinstance(it, Literal):
            if it.negated and any(v.anonymous for v in it.atom.vars()):
                raise SafetyError("_", span)
            if not it.negated:
                for a in it.atom.args:
                    if not isinstance(a, (Variable, TupleTerm)) and _has_anon(a):
                        raise SafetyError("_", span)
        elif isinstance(it, Comparison):
            if _has_anon(it.left) or _has_anon(it.right):
                raise SafetyError("_", span)
        elif isinstance(it, AggregateAssign):
            if _has_anon(it.term):
                raise SafetyError("_", span)
            for e in it.elements:
                if any(_has_anon(t) for t in e.terms):
                    raise SafetyError("_", span)
                _check_anonymous(e.condition, span)


def _close(items, bound: set[str], outer: dict) -> set[str]:
    """Fixpoint of variables bound by ``items`` starting from ``bound``.

    ``outer`` maps each aggregate (by id) to the variables occurring outside it.
    """
    bound = set(bound)
    changed = True
    while changed:
        changed = False
        for it in items:
            new: set[str] = set()
            if isinstance(it, Literal) and not it.negated:
                for a in it.atom.args:
                    if _vars(a) - _binding_vars(a) <= bound:
                        new |= _binding_vars(a)
            elif isinstance(it, Comparison) and it.op == "=":
                for lhs, rhs in ((it.left, it.right), (it.right, it.left)):
                    if _binding_vars(lhs) and _vars(lhs) == _binding_vars(lhs) and _vars(rhs) <= bound:
                        new |= _binding_vars(lhs)
            elif isinstance(it, AggregateAssign):
                globals_ = (_item_vars(it) & outer.get(id(it), set())) - _vars(it.term)
                if isinstance(it.term, Variable) and globals_ <= bound:
                    new.add(it.term.name)
            if not new <= bound:
                bound |= new
                changed = True
    return bound


def check_safety(rule: Rule) -> None:
    span = rule.span
    body = rule.body
    _check_anonymous(body, span)
    head_vars: set[str] = set()
    if isinstance(rule.head, Atom):
        if any(v.anonymous for v in rule.head.vars()):
            raise SafetyError("_", span)
        head_vars = {v.name for v in rule.head.vars()}
    # variables occurring outside each aggregate decide which element vars are global
    occurrences: list[set[str]] = [_item_vars(b) for b in body]
    for i, it in enumerate(body):
        if isinstance(it, AggregateAssign):
            others = set(head_vars)
            for j, o in enumerate(occurrences):
                if j != i:
                    others |= o
            if isinstance(rule.head, ChoiceHead):
                others |= _choice_vars(rule.head)
            others |= _vars(it.term)
            _check_aggregate(it, others, span)
    agg_outer = {id(it): _outer_of(it, body, rule) for it in body if isinstance(it, AggregateAssign)}
    bound = _close(body, set(), agg_outer)
    # aggregates: the assigned var is bound once the globals are
    for it in body:
        need = _item_vars(it)
        if isinstance(it, AggregateAssign):
            need = {v for v in need if v in _outer_of(it, body, rule)} | _vars(it.term)
        for v in sorted(need):
            if v not in bound:
                raise SafetyError(v, span)
    for v in sorted(head_vars):
        if v not in bound:
            raise SafetyError(v, span)
    if isinstance(rule.head, ChoiceHead):
        h = rule.head
        for t in (h.lower, h.upper):
            if t is not None:
                for v in sorted(_vars(t)):
                    if v not in bound:
                        raise SafetyError(v, span)
        for e in h.elements:
            if any(v.anonymous for v in e.atom.vars()):
                raise SafetyError("_", span)
            _check_anonymous(e.condition, span)
            local_bound = _close(e.condition, bound, {})
            need = {v.name for v in e.atom.vars()}
            for c in e.condition:
                need |= _item_vars(c)
            for v in sorted(need):
                if v not in local_bound:
                    raise SafetyError(v, span)


def _choice_vars(h: ChoiceHead) -> set[str]:
    out: set[str] = set()
    for e in h.elements:
        out |= {v.name for v in e.atom.vars() if not v.anonymous}
        for c in e.condition:
            out |= _item_vars(c)
    return out


def _outer_of(agg: AggregateAssign, body, rule: Rule) -> set[str]:
    out: set[str] = set()
    if isinstance(rule.head, Atom):
        out |= {v.name for v in rule.head.vars()}
    elif isinstance(rule.head, ChoiceHead):
        out |= _choice_vars(rule.head)
    for b in body:
        if b is not agg:
            out |= _item_vars(b)
    return out


def _check_aggregate(agg: AggregateAssign, outer: set[str], span) -> None:
    for e in agg.elements:
        local_bound = _close(e.condition, outer, {})
        need: set[str] = set()
        for t in e.terms:
            need |= _vars(t)
        for c in e.condition:
            need |= _item_vars(c)
        for v in sorted(need):
            if v not in local_bound:
                raise SafetyError(v, span)


# -- annotations ----------------------------------------------------------------

_BLOCK_START = re.compile(r"^\s*(achieved\s*:|input\s*:|reconstructed\b|record\s*:)")
_SIG = re.compile(r"^\s*([a-z][A-Za-z0-9_']*)\s*/\s*(\d+)\s*$")


def _group_annotations(annots: list[tuple[Token, int]], file: str) -> list[tuple[str, Token, int]]:
    """Merge continuation lines into blocks: (text, first token, attached index)."""
    blocks: list[list] = []
    for tok, attached in annots:
        text = tok.value
        if _BLOCK_START.match(text) or not blocks or blocks[-1][2] != attached:
            blocks.append([text.strip(), tok, attached])
        else:
            blocks[-1][0] += " " + text.strip()
    return [(b[0], b[1], b[2]) for b in blocks]


def _strip_period(text: str) -> str:
    text = text.strip()
    if text.endswith(".") and not text.endswith(".."):
        text = text[:-1].rstrip()
    return text


def parse_program(text: str, file: str = "<string>", name: Optional[str] = None) -> Program:
    """Parse an annotated program; rule order is textual order."""
    tokens = list(tokenize(text, file))
    stmt_tokens: list[Token] = []
    annot_pos: list[tuple[Token, int]] = []
    for t in tokens:
        if t.kind == "ANNOT":
            annot_pos.append((t, len(stmt_tokens)))
        else:
            stmt_tokens.append(t)
    ts = TokenStream(stmt_tokens, file)
    parser = _RuleParser(ts)
    rules: list[Rule] = []
    ends: list[int] = []
    while ts.cur.kind != "EOF":
        r = parser.statement(len(rules) + 1)
        check_safety(r)
        rules.append(r)
        ends.append(ts.pos)
    if not rules:
        raise ParseError("a program needs at least one rule", SourceSpan(file, 1, 1))

    def attached_index(pos: int) -> int:
        return sum(1 for e in ends if e <= pos)

    annots = [(t, attached_index(p)) for t, p in annot_pos]
    blocks: list[AnnotationBlock] = []
    input_preds: set[tuple[str, int]] = set()
    placeholders: list[tuple[str, Any]] = []
    assumptions: list[Any] = []
    reconstructed = False
    complete = False
    pending: list[tuple[Any, Token, int]] = []
    for body, tok, attached in _group_annotations(annots, file):
        span = tok.span(file)
        col = tok.col + 2 + (len(tok.value) - len(tok.value.lstrip()))
        m = _BLOCK_START.match(body)
        if not m:
            raise ParseError(f"unrecognized annotation: {body!r}", span)
        keyword = m.group(1).split(":")[0].strip()
        rest = _strip_period(body[m.end():])
        if keyword == "reconstructed":
            reconstructed = True
            continue
        if keyword == "record":
            if rest.strip() != "complete":
                raise ParseError(f"unknown record annotation {rest!r}", span)
            complete = True
            continue
        if keyword == "achieved":
            if attached == 0:
                raise ParseError("achievement annotation before the first rule", span)
            a = parse_assertion(rest, file, tok.line, col)
            blocks.append(AnnotationBlock("achieved", rest, attached, a, None, span))
            pending.append((a, tok, attached))
            continue
        if attached != 0:
            raise ParseError("input annotations must precede all rules", span)
        stripped = rest.strip()
        if stripped.startswith("const ") or stripped == "const":
            cond_text = stripped[len("const"):].strip()
            m2 = re.match(r"[a-z][A-Za-z0-9_']*", cond_text)
            if not m2:
                raise ParseError("const declaration needs a placeholder name", span)
            pname = m2.group()
            cond = None
            if cond_text[m2.end():].strip():
                cond = parse_assertion(cond_text, file, tok.line, col)
            placeholders.append((pname, cond))
            blocks.append(AnnotationBlock("const-decl", stripped, 0, cond, pname, span))
            if cond is not None:
                pending.append((cond, tok, -1))
        elif stripped.startswith("assume "):
            a = parse_assertion(stripped[len("assume "):], file, tok.line, col)
            assumptions.append(a)
            blocks.append(AnnotationBlock("input", stripped, 0, a, None, span))
            pending.append((a, tok, 0))
        else:
            sigs = []
            for part in stripped.split(","):
                ms = _SIG.match(part)
                if not ms:
                    raise ParseError(f"expected predicate signatures p/k, found {part.strip()!r}", span)
                sigs.append((ms.group(1), int(ms.group(2))))
            input_preds |= set(sigs)
            payload = ", ".join(sig_str(s) for s in sigs)
            blocks.append(AnnotationBlock("input", payload, 0, None, None, span))
    program_preds: set[tuple[str, int]] = set()
    for r in rules:
        program_preds |= r.predicates()
    known = program_preds | input_preds
    for a, tok, attached in pending:
        allowed = input_preds if attached == -1 else known
        for sig in sorted(referenced_predicates(a) - allowed):
            what = "input predicate" if attached == -1 else "predicate"
            raise ArityError(f"annotation mentions unknown {what} {sig_str(sig)}", tok.span(file))
    spec = InputSpec(frozenset(input_preds), tuple(placeholders), tuple(assumptions))
    return Program(tuple(rules), tuple(blocks), spec, reconstructed, complete,
                   name or file)


def parse_program_file(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_program(text, path, os.path.splitext(os.path.basename(path))[0])


# -- instances ------------------------------------------------------------------

def parse_instance(text: str, spec: InputSpec, file: str = "<instance>",
                   name: Optional[str] = None, require_all: bool = True) -> InputInstance:
    """Ground facts over input predicates plus ``#const`` bindings."""
    ts = TokenStream(list(tokenize(text, file, annotations=False)), file)
    rp = _RuleParser(ts)
    facts: set[Atom] = set()
    bindings: dict[str, Any] = {}
    while ts.cur.kind != "EOF":
        span = ts.span()
        if ts.cur.kind == "DIRECTIVE":
            if ts.cur.value != "#const":
                ts.error(f"unsupported directive {ts.cur.value} in instance file")
            ts.advance()
            if ts.cur.kind != "ID":
                ts.error("expected a constant name after #const")
            cname = ts.advance().value
            ts.expect("=")
            value = rp.term()
            ts.expect(".")
            vals = eval_values(value, {}) if not list(term_vars(value)) else []
            if len(vals) != 1 or not is_precomputed(vals[0]):
                raise ParseError(f"#const {cname} needs a single ground value", span)
            bindings[cname] = vals[0]
            continue
        if ts.at_op(":-"):
            ts.error("instance files contain facts only")
        a = rp.atom()
        if ts.at_op(":-"):
            ts.error("instance files contain facts only")
        ts.expect(".")
        if list(a.vars()):
            raise ParseError(f"instance fact {a} is not ground", span)
        if a.signature not in spec.input_predicates:
            raise SpecViolation(f"{span}: {a.pred}/{a.arity} is not an input predicate")
        choices = [eval_values(t, {}) for t in a.args]
        for args in itertools.product(*choices):
            facts.add(Atom(a.pred, tuple(args)))
    if require_all:
        missing = [p for p in spec.placeholder_names if p not in bindings]
        if missing:
            raise IncompleteInput("missing binding for placeholder " + ", ".join(missing))
    return InputInstance.make(facts, bindings, name or file)


def parse_instance_file(path: str, spec: InputSpec) -> InputInstance:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_instance(text, spec, path, os.path.splitext(os.path.basename(path))[0])
