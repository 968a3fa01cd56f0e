"""The achievement language embedded in ``%@ achieved:`` comments.

An assertion is read against a pair (input instance, interpretation).  Input
predicates take their extension from the instance, every other predicate from
the interpretation; ``p/k`` denotes the set of argument tuples of ``p`` (plain
terms when ``k == 1``).  Uppercase names are metavariables ranging over the
finite universe of precomputed terms unless a domain is given.

See ``docs/assertions.md`` for the surface grammar.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional

from .errors import AssertionEvalError, BudgetExceeded, ParseError
from .lexer import TokenStream, tokenize
from .model import Atom, InputInstance, Interpretation, Symbol, term_key, term_str


# -- AST ------------------------------------------------------------------------

class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Node):
    value: int

    def __str__(self):
        return str(self.value) if self.value >= 0 else f"({self.value})"


@dataclass(frozen=True)
class Const(Node):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var(Node):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Tup(Node):
    items: tuple

    def __str__(self):
        return "(" + ", ".join(map(str, self.items)) + ("," if len(self.items) == 1 else "") + ")"


@dataclass(frozen=True)
class Arith(Node):
    op: str
    left: Node
    right: Node

    def __str__(self):
        prec = _PREC[self.op]
        left = f"({self.left})" if isinstance(self.left, Arith) and _PREC[self.left.op] < prec else str(self.left)
        right = f"({self.right})" if isinstance(self.right, Arith) and _PREC[self.right.op] <= prec else str(self.right)
        return f"{left} {self.op} {right}"


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "\\": 2}


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def __str__(self):
        return f"-({self.arg})" if isinstance(self.arg, (Arith, Neg)) else f"-{self.arg}"


@dataclass(frozen=True)
class Bars(Node):
    """``|e|``: cardinality of a set, absolute value of an integer."""

    arg: Node

    def __str__(self):
        return f"|{self.arg}|"


@dataclass(frozen=True)
class Ext(Node):
    pred: str
    arity: int

    def __str__(self):
        return f"{self.pred}/{self.arity}"


@dataclass(frozen=True)
class Range(Node):
    lo: Node
    hi: Node

    def __str__(self):
        return f"{{{self.lo}..{self.hi}}}"


@dataclass(frozen=True)
class SetLit(Node):
    items: tuple

    def __str__(self):
        return "{" + ", ".join(map(str, self.items)) + "}"


@dataclass(frozen=True)
class Comp(Node):
    expr: Node
    cond: Node

    def __str__(self):
        return f"{{{self.expr} : {self.cond}}}"


@dataclass(frozen=True)
class Call(Node):
    name: str  # closure, proj
    args: tuple

    def __str__(self):
        return f"{self.name}(" + ", ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Agg(Node):
    func: str  # sum, count, max, min
    expr: Node
    cond: Node

    def __str__(self):
        return f"{self.func}{{{self.expr} : {self.cond}}}"


@dataclass(frozen=True)
class Bool(Node):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class AtomF(Node):
    pred: str
    args: tuple

    def __str__(self):
        if not self.args:
            return self.pred
        return f"{self.pred}(" + ", ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Rel(Node):
    op: str  # = != < <= > >= in subset
    left: Node
    right: Node

    def __str__(self):
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class Not(Node):
    arg: Node

    def __str__(self):
        return f"not {_wrap(self.arg)}"


@dataclass(frozen=True)
class And(Node):
    items: tuple

    def __str__(self):
        return " and ".join(_wrap(i) for i in self.items)


@dataclass(frozen=True)
class Or(Node):
    items: tuple

    def __str__(self):
        return " or ".join(_wrap(i) for i in self.items)


@dataclass(frozen=True)
class Implies(Node):
    left: Node
    right: Node

    def __str__(self):
        return f"{_wrap(self.left)} -> {_wrap(self.right)}"


@dataclass(frozen=True)
class Iff(Node):
    left: Node
    right: Node

    def __str__(self):
        return f"{_wrap(self.left)} <-> {_wrap(self.right)}"


@dataclass(frozen=True)
class Binder:
    pattern: Node  # Var or Tup of Var
    domain: Optional[Node] = None

    def __str__(self):
        return f"{self.pattern} in {self.domain}" if self.domain is not None else str(self.pattern)

    def vars(self) -> list[str]:
        if isinstance(self.pattern, Var):
            return [self.pattern.name]
        return [v.name for v in self.pattern.items]


@dataclass(frozen=True)
class Quant(Node):
    kind: str  # forall, exists, exists!
    binders: tuple
    body: Node

    def __str__(self):
        return f"{self.kind} " + ", ".join(map(str, self.binders)) + f": {self.body}"


TRUE = Bool(True)

_ATOMIC = (Bool, AtomF, Rel)


def _wrap(f: Node) -> str:
    return str(f) if isinstance(f, _ATOMIC + (Not,)) else f"({f})"


def conjoin(items: Iterable[Node]) -> Node:
    items = tuple(items)
    if not items:
        return TRUE
    if len(items) == 1:
        return items[0]
    return And(items)


def flatten_and(f: Node) -> list[Node]:
    if isinstance(f, And):
        out = []
        for i in f.items:
            out.extend(flatten_and(i))
        return out
    if isinstance(f, Bool) and f.value:
        return []
    return [f]


# -- parser ---------------------------------------------------------------------

_KEYWORDS = {"and", "or", "not", "forall", "exists", "in", "subset", "true", "false"}
_AGGS = {"sum", "count", "max", "min"}
_BUILTINS = {"closure", "proj"}
_RELOPS = {"=", "!=", "<", "<=", ">", ">="}


class _Fail(Exception):
    pass


class AssertionParser:
    def __init__(self, text: str, file: str = "<assertion>", line: int = 1, col: int = 1):
        tokens = list(tokenize(text, file, line, col, annotations=False))
        self.ts = TokenStream(tokens, file)

    def parse(self) -> Node:
        f = self.formula()
        if self.ts.cur.kind != "EOF":
            self.ts.error(f"unexpected {self.ts.describe()} in assertion")
        return f

    # formulas
    def formula(self) -> Node:
        left = self.implication()
        if self.ts.accept("<->"):
            return Iff(left, self.implication())
        return left

    def implication(self) -> Node:
        left = self.disjunction()
        if self.ts.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Node:
        items = [self.conjunction()]
        while self._kw("or"):
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self) -> Node:
        items = [self.unary()]
        while self._kw("and"):
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def _kw(self, word: str) -> bool:
        t = self.ts.cur
        if t.kind == "ID" and t.value == word:
            self.ts.advance()
            return True
        return False

    def unary(self) -> Node:
        ts = self.ts
        if self._kw("not"):
            return Not(self.unary())
        if ts.cur.kind == "ID" and ts.cur.value in ("forall", "exists"):
            kind = ts.advance().value
            if kind == "exists" and ts.cur.value == "!" and ts.cur.kind == "OP":
                ts.advance()
                kind = "exists!"
            binders = [self.binder()]
            while ts.accept(","):
                binders.append(self.binder())
            ts.expect(":")
            return Quant(kind, tuple(binders), self.formula())
        if self._kw("true"):
            return Bool(True)
        if self._kw("false"):
            return Bool(False)
        start = ts.pos
        try:
            return self._relation_or_atom()
        except (ParseError, _Fail):
            if not ts.tokens[start].value == "(":
                raise
            ts.pos = start
        ts.expect("(")
        f = self.formula()
        ts.expect(")")
        return f

    def binder(self) -> Binder:
        ts = self.ts
        if ts.accept("("):
            names = [self._var()]
            while ts.accept(","):
                names.append(self._var())
            ts.expect(")")
            pattern: Node = Tup(tuple(names))
        else:
            pattern = self._var()
        domain = None
        if ts.cur.kind == "ID" and ts.cur.value == "in" and ts.peek().value not in ("(", "/"):
            ts.advance()
            domain = self.expr()
        return Binder(pattern, domain)

    def _var(self) -> Var:
        t = self.ts.cur
        if t.kind != "VAR" or t.value == "_":
            self.ts.error(f"expected a variable, found {self.ts.describe()}")
        self.ts.advance()
        return Var(t.value)

    def _relation_or_atom(self) -> Node:
        ts = self.ts
        left = self.expr()
        t = ts.cur
        if t.kind == "OP" and t.value in _RELOPS:
            ts.advance()
            return Rel(t.value, left, self.expr())
        if t.kind == "ID" and t.value in ("in", "subset") and ts.peek().value not in ("(", "/"):
            ts.advance()
            return Rel(t.value, left, self.expr())
        if isinstance(left, AtomF):
            return left
        if isinstance(left, Const):
            return AtomF(left.name, ())
        raise _Fail()

    # expressions
    def expr(self) -> Node:
        left = self.term()
        while self.ts.at_op("+", "-"):
            op = self.ts.advance().value
            left = Arith(op, left, self.term())
        return left

    def term(self) -> Node:
        left = self.factor()
        while self.ts.at_op("*", "/", "\\"):
            op = self.ts.advance().value
            left = Arith(op, left, self.factor())
        return left

    def factor(self) -> Node:
        if self.ts.at_op("-"):
            self.ts.advance()
            arg = self.factor()
            if isinstance(arg, Num):
                return Num(-arg.value)
            return Neg(arg)
        return self.primary()

    def primary(self) -> Node:
        ts = self.ts
        t = ts.cur
        if t.kind == "NUM":
            ts.advance()
            return Num(int(t.value))
        if t.kind == "VAR":
            ts.advance()
            return Var(t.value)
        if t.kind == "ID":
            name = t.value
            nxt = ts.peek()
            if nxt.value == "/" and ts.peek(2).kind == "NUM":
                ts.advance(), ts.advance()
                return Ext(name, int(ts.advance().value))
            if name in _AGGS and nxt.value == "{":
                ts.advance(), ts.advance()
                e = self.expr()
                ts.expect(":")
                cond = self.formula()
                ts.expect("}")
                return Agg(name, e, cond)
            if nxt.value == "(" and (name not in _KEYWORDS or name == "in"):
                ts.advance(), ts.advance()
                args = []
                if not ts.at_op(")"):
                    args.append(self.expr())
                    while ts.accept(","):
                        args.append(self.expr())
                ts.expect(")")
                if name in _BUILTINS:
                    return Call(name, tuple(args))
                return AtomF(name, tuple(args))
            if name in _KEYWORDS:
                raise _Fail()
            ts.advance()
            return Const(name)
        if t.kind == "OP":
            if t.value == "(":
                ts.advance()
                items = [self.expr()]
                trailing = False
                while ts.accept(","):
                    if ts.at_op(")"):
                        trailing = True
                        break
                    items.append(self.expr())
                ts.expect(")")
                if len(items) == 1 and not trailing:
                    return items[0]
                return Tup(tuple(items))
            if t.value == "|":
                ts.advance()
                e = self.expr()
                ts.expect("|")
                return Bars(e)
            if t.value == "{":
                return self._set()
        raise _Fail()

    def _set(self) -> Node:
        ts = self.ts
        ts.expect("{")
        if ts.accept("}"):
            return SetLit(())
        first = self.expr()
        if ts.accept(".."):
            hi = self.expr()
            ts.expect("}")
            return Range(first, hi)
        if ts.accept(":"):
            cond = self.formula()
            ts.expect("}")
            return Comp(first, cond)
        items = [first]
        while ts.accept(","):
            if ts.accept("..."):
                ts.expect(",")
                hi = self.expr()
                ts.expect("}")
                if len(items) != 1:
                    ts.error("'...' ranges take the form {lo,...,hi}")
                return Range(first, hi)
            items.append(self.expr())
        ts.expect("}")
        return SetLit(tuple(items))


def parse_assertion(text: str, file: str = "<assertion>", line: int = 1, col: int = 1) -> Node:
    try:
        return AssertionParser(text, file, line, col).parse()
    except _Fail:
        raise ParseError(f"cannot parse assertion: {text.strip()!r}") from None


# -- static analysis ------------------------------------------------------------

def referenced_predicates(node: Any) -> set[tuple[str, int]]:
    """Signatures mentioned through ``p/k`` extensions or ``p(...)`` atoms."""
    out: set[tuple[str, int]] = set()

    def walk(n):
        if isinstance(n, Ext):
            out.add((n.pred, n.arity))
        elif isinstance(n, AtomF):
            out.add((n.pred, len(n.args)))
        if isinstance(n, Node):
            for v in n.__dict__.values() if hasattr(n, "__dict__") else ():
                walk(v)
            for f in getattr(n, "__dataclass_fields__", {}):
                walk(getattr(n, f))
        elif isinstance(n, Binder):
            walk(n.pattern)
            walk(n.domain)
        elif isinstance(n, tuple):
            for x in n:
                walk(x)

    walk(node)
    return out


def free_vars(node: Any) -> set[str]:
    if isinstance(node, Var):
        return set() if node.name == "_" else {node.name}
    if isinstance(node, Quant):
        out: set[str] = set()
        bound: set[str] = set()
        for b in node.binders:
            if b.domain is not None:
                out |= free_vars(b.domain) - bound
            bound |= set(b.vars())
        return out | (free_vars(node.body) - bound)
    if isinstance(node, (Comp, Agg)):
        # locals are every variable not bound from outside; nothing escapes
        return set()
    if isinstance(node, Node):
        out = set()
        for f in node.__dataclass_fields__:
            out |= free_vars(getattr(node, f))
        return out
    if isinstance(node, tuple):
        out = set()
        for x in node:
            out |= free_vars(x)
        return out
    return set()


def direct_vars(node: Any) -> set[str]:
    """Variables a comprehension or aggregate binds: those occurring outside nested scopes."""
    if isinstance(node, Var):
        return set() if node.name == "_" else {node.name}
    if isinstance(node, (Comp, Agg)):
        return set()
    if isinstance(node, Quant):
        out: set[str] = set()
        bound: set[str] = set()
        for b in node.binders:
            if b.domain is not None:
                out |= direct_vars(b.domain)
            bound |= set(b.vars())
        return (out | direct_vars(node.body)) - bound
    if isinstance(node, Node):
        out = set()
        for f in node.__dataclass_fields__:
            out |= direct_vars(getattr(node, f))
        return out
    if isinstance(node, tuple):
        out = set()
        for x in node:
            out |= direct_vars(x)
        return out
    return set()


def all_vars(node: Any) -> set[str]:
    """Every metavariable occurring anywhere inside ``node``."""
    if isinstance(node, Var):
        return set() if node.name == "_" else {node.name}
    if isinstance(node, Binder):
        return set(node.vars()) | all_vars(node.domain)
    if isinstance(node, Node):
        out: set[str] = set()
        for f in node.__dataclass_fields__:
            out |= all_vars(getattr(node, f))
        return out
    if isinstance(node, tuple):
        out = set()
        for x in node:
            out |= all_vars(x)
        return out
    return set()


# -- evaluation -----------------------------------------------------------------

class Context:
    """Everything needed to evaluate assertions for one (instance, interpretation) pair."""

    def __init__(self, instance: InputInstance, interpretation: Interpretation | Iterable[Atom],
                 universe: Iterable[Any], input_predicates: Iterable[tuple[str, int]] = (),
                 placeholders: Iterable[str] = (), known: Optional[set] = None):
        self.instance = instance
        self.bindings = instance.binding_map
        self.placeholders = set(placeholders)
        self.inputs = set(input_predicates)
        self.known = known
        self.universe = sorted(set(universe), key=term_key)
        self._ext: dict[tuple[str, int], frozenset] = {}
        by_sig: dict[tuple[str, int], set] = {}
        atoms = interpretation.atoms if isinstance(interpretation, Interpretation) else interpretation
        for a in atoms:
            by_sig.setdefault(a.signature, set()).add(a.args)
        for a in instance.facts:
            if a.signature in self.inputs:
                by_sig.setdefault(("\0input",) + a.signature, set()).add(a.args)
        self._raw = by_sig

    def tuples(self, pred: str, arity: int) -> frozenset:
        """Argument tuples of ``pred/arity``."""
        sig = (pred, arity)
        got = self._ext.get(sig)
        if got is None:
            if self.known is not None and sig not in self.known and sig not in self.inputs:
                raise AssertionEvalError(f"unknown predicate {pred}/{arity}")
            key = ("\0input", pred, arity) if sig in self.inputs else sig
            got = frozenset(self._raw.get(key, ()))
            self._ext[sig] = got
        return got

    def extension(self, pred: str, arity: int) -> frozenset:
        ts = self.tuples(pred, arity)
        if arity == 1:
            return frozenset(t[0] for t in ts)
        return ts

    def constant(self, name: str) -> Any:
        if name in self.bindings:
            return self.bindings[name]
        if name in self.placeholders:
            raise AssertionEvalError(f"placeholder {name} is unbound")
        return Symbol(name)


_UNDEF = object()


def _cmp_key(v):
    return term_key(v)


def evaluate(node: Node, ctx: Context, env: Mapping[str, Any]) -> Any:
    """Value of an expression (terms, frozensets, ``_UNDEF``)."""
    t = type(node)
    if t is Num:
        return node.value
    if t is Var:
        if node.name == "_":
            raise AssertionEvalError("'_' only allowed as an atom argument")
        try:
            return env[node.name]
        except KeyError:
            raise AssertionEvalError(f"unbound metavariable {node.name}") from None
    if t is Const:
        return ctx.constant(node.name)
    if t is Tup:
        vals = tuple(evaluate(i, ctx, env) for i in node.items)
        return _UNDEF if any(v is _UNDEF for v in vals) else vals
    if t is Ext:
        return ctx.extension(node.pred, node.arity)
    if t is Arith:
        a, b = evaluate(node.left, ctx, env), evaluate(node.right, ctx, env)
        if a is _UNDEF or b is _UNDEF:
            return _UNDEF
        if isinstance(a, frozenset) and isinstance(b, frozenset) and node.op == "*":
            return frozenset(_pair(x, y) for x in a for y in b)
        if node.op == "-" and isinstance(a, frozenset) and isinstance(b, frozenset):
            return a - b
        if node.op == "+" and isinstance(a, frozenset) and isinstance(b, frozenset):
            return a | b
        _need_ints(a, b, node)
        return _arith(node.op, a, b)
    if t is Neg:
        a = evaluate(node.arg, ctx, env)
        if a is _UNDEF:
            return a
        _need_ints(a, 0, node)
        return -a
    if t is Bars:
        a = evaluate(node.arg, ctx, env)
        if a is _UNDEF:
            return a
        if isinstance(a, frozenset):
            return len(a)
        _need_ints(a, 0, node)
        return abs(a)
    if t is Range:
        lo, hi = evaluate(node.lo, ctx, env), evaluate(node.hi, ctx, env)
        if lo is _UNDEF or hi is _UNDEF:
            return _UNDEF
        _need_ints(lo, hi, node)
        return frozenset(range(lo, hi + 1))
    if t is SetLit:
        vals = [evaluate(i, ctx, env) for i in node.items]
        return frozenset(v for v in vals if v is not _UNDEF)
    if t is Comp:
        out = set()
        local = (direct_vars(node.expr) | direct_vars(node.cond)) - set(env)
        for e in solutions(node.cond, ctx, env, local):
            v = evaluate(node.expr, ctx, e)
            if v is not _UNDEF:
                out.add(v)
        return frozenset(out)
    if t is Agg:
        vals = []
        local = (direct_vars(node.expr) | direct_vars(node.cond)) - set(env)
        for e in solutions(node.cond, ctx, env, local):
            v = evaluate(node.expr, ctx, e)
            if isinstance(v, tuple):
                v = v[0] if v else _UNDEF
            if v is not _UNDEF:
                vals.append(v)
        return _aggregate(node.func, vals)
    if t is Call:
        return _call(node, ctx, env)
    if t is AtomF:
        raise AssertionEvalError(f"atom {node} used as a value")
    raise AssertionEvalError(f"not an expression: {node}")


def _pair(x, y):
    x = x if isinstance(x, tuple) else (x,)
    y = y if isinstance(y, tuple) else (y,)
    return x + y


def _need_ints(a, b, node):
    if not (isinstance(a, int) and isinstance(b, int)):
        raise AssertionEvalError(f"arithmetic on non-integers in {node}")


def _arith(op: str, a: int, b: int) -> Any:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        return _UNDEF
    q = abs(a) // abs(b) * (1 if (a >= 0) == (b >= 0) else -1)
    return q if op == "/" else a - b * q


def _aggregate(func: str, vals: list) -> Any:
    if func == "count":
        return len(vals)
    if not all(isinstance(v, int) for v in vals):
        raise AssertionEvalError(f"{func} over non-integer values")
    if func == "sum":
        return sum(vals)
    if not vals:
        return _UNDEF
    return max(vals) if func == "max" else min(vals)


def _call(node: Call, ctx: Context, env) -> Any:
    args = [evaluate(a, ctx, env) for a in node.args]
    if any(a is _UNDEF for a in args):
        return _UNDEF
    if node.name == "closure":
        if len(args) != 1 or not isinstance(args[0], frozenset):
            raise AssertionEvalError("closure expects one set of pairs")
        return transitive_closure(args[0])
    if node.name == "proj":
        if len(args) != 2 or not isinstance(args[0], frozenset) or not isinstance(args[1], int):
            raise AssertionEvalError("proj expects a set and a 1-based position")
        i = args[1] - 1
        return frozenset(t[i] for t in args[0] if isinstance(t, tuple) and 0 <= i < len(t))
    raise AssertionEvalError(f"unknown builtin {node.name}")


def transitive_closure(pairs: Iterable[tuple]) -> frozenset:
    """Pairs connected by a path of length >= 1 (semi-naive composition)."""
    succ: dict[Any, set] = {}
    for p in pairs:
        if not (isinstance(p, tuple) and len(p) == 2):
            raise AssertionEvalError("closure expects pairs")
        succ.setdefault(p[0], set()).add(p[1])
    closure = {(x, y) for x, ys in succ.items() for y in ys}
    delta = set(closure)
    while delta:
        new = set()
        for x, y in delta:
            for z in succ.get(y, ()):
                if (x, z) not in closure:
                    new.add((x, z))
        closure |= new
        delta = new
    return frozenset(closure)


def holds(node: Node, ctx: Context, env: Mapping[str, Any]) -> bool:
    t = type(node)
    if t is Bool:
        return node.value
    if t is And:
        return all(holds(i, ctx, env) for i in node.items)
    if t is Or:
        return any(holds(i, ctx, env) for i in node.items)
    if t is Not:
        return not holds(node.arg, ctx, env)
    if t is Implies:
        return (not holds(node.left, ctx, env)) or holds(node.right, ctx, env)
    if t is Iff:
        return holds(node.left, ctx, env) == holds(node.right, ctx, env)
    if t is AtomF:
        return _atom_holds(node, ctx, env)
    if t is Rel:
        return _rel_holds(node, ctx, env)
    if t is Quant:
        return _quant_holds(node, ctx, env)
    raise AssertionEvalError(f"not a formula: {node}")


def _atom_holds(node: AtomF, ctx: Context, env) -> bool:
    tuples = ctx.tuples(node.pred, len(node.args))
    pattern = []
    for a in node.args:
        if isinstance(a, Var) and a.name == "_":
            pattern.append(_UNDEF)
        else:
            v = evaluate(a, ctx, env)
            if v is _UNDEF:
                return False
            pattern.append(v)
    if _UNDEF not in pattern:
        return tuple(pattern) in tuples
    return any(all(p is _UNDEF or p == x for p, x in zip(pattern, tup)) for tup in tuples)


def _rel_holds(node: Rel, ctx: Context, env) -> bool:
    a = evaluate(node.left, ctx, env)
    b = evaluate(node.right, ctx, env)
    if a is _UNDEF or b is _UNDEF:
        return False
    op = node.op
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "in":
        if not isinstance(b, frozenset):
            raise AssertionEvalError(f"right side of 'in' is not a set: {node}")
        return a in b
    if op == "subset":
        if not (isinstance(a, frozenset) and isinstance(b, frozenset)):
            raise AssertionEvalError(f"'subset' needs two sets: {node}")
        return a <= b
    if isinstance(a, frozenset) or isinstance(b, frozenset):
        raise AssertionEvalError(f"ordering comparison on sets: {node}")
    ka, kb = _cmp_key(a), _cmp_key(b)
    if op == "<":
        return ka < kb
    if op == "<=":
        return ka <= kb
    if op == ">":
        return ka > kb
    return ka >= kb


def _bind_pattern(pattern: Node, value: Any, env: dict) -> bool:
    if isinstance(pattern, Var):
        env[pattern.name] = value
        return True
    if not isinstance(value, tuple) or len(value) != len(pattern.items):
        return False
    for p, v in zip(pattern.items, value):
        env[p.name] = v
    return True


def _binder_values(b: Binder, ctx: Context, env) -> Optional[list]:
    if b.domain is None:
        return None
    dom = evaluate(b.domain, ctx, env)
    if dom is _UNDEF:
        return []
    if not isinstance(dom, frozenset):
        raise AssertionEvalError(f"quantifier domain is not a set: {b.domain}")
    return sorted(dom, key=_cmp_key)


def _assignments(binders: tuple, ctx: Context, env: dict, body: Optional[Node]) -> Iterator[dict]:
    """Assignments to the binder variables; ``body`` (if given) may restrict unbounded ones."""
    if not binders:
        yield env
        return
    b, rest = binders[0], binders[1:]
    values = _binder_values(b, ctx, env)
    if values is None:
        names = b.vars()
        for v in itertools.product(ctx.universe, repeat=len(names)):
            e = dict(env)
            e.update(zip(names, v))
            yield from _assignments(rest, ctx, e, body)
        return
    for v in values:
        e = dict(env)
        if _bind_pattern(b.pattern, v, e):
            yield from _assignments(rest, ctx, e, body)


def _quant_holds(node: Quant, ctx: Context, env) -> bool:
    unbounded = all(b.domain is None for b in node.binders)
    names = [n for b in node.binders for n in b.vars()]
    if node.kind == "forall":
        if unbounded and isinstance(node.body, Implies):
            # only assignments satisfying the antecedent matter
            local = set(names)
            for e in solutions(node.body.left, ctx, env, local):
                if not holds(node.body.right, ctx, e):
                    return False
            return True
        return all(holds(node.body, ctx, e) for e in _assignments(node.binders, ctx, dict(env), None))
    if unbounded:
        it = solutions(node.body, ctx, env, set(names))
    else:
        it = (e for e in _assignments(node.binders, ctx, dict(env), None) if holds(node.body, ctx, e))
    if node.kind == "exists":
        return next(iter(it), None) is not None
    seen = set()
    for e in it:
        seen.add(tuple(e[n] for n in names))
        if len(seen) > 1:
            return False
    return len(seen) == 1


def solutions(cond: Node, ctx: Context, env: Mapping[str, Any], local: set[str]) -> Iterator[dict]:
    """Distinct assignments to ``local`` (extending ``env``) under which ``cond`` holds.

    Positive atoms, equalities and memberships among the top-level conjuncts
    drive the search; remaining variables range over the universe.
    """
    local = {v for v in local if v not in env}
    seen = set()
    order = sorted(local)
    for e in _solve(flatten_and(cond), ctx, dict(env), local):
        key = tuple(e[v] for v in order)
        if key in seen:
            continue
        seen.add(key)
        if holds(cond, ctx, e):
            yield e


def _evaluable(node: Node, env) -> bool:
    return not (free_vars(node) - set(env))


def _solve(conjuncts: list, ctx: Context, env: dict, local: set) -> Iterator[dict]:
    unbound = {v for v in local if v not in env}
    if not unbound:
        yield env
        return
    for c in conjuncts:
        if isinstance(c, AtomF) and (all_vars(c) & unbound):
            if not all(_evaluable(a, env) or isinstance(a, Var) for a in c.args):
                continue
            for tup in sorted(ctx.tuples(c.pred, len(c.args)), key=_cmp_key):
                e = dict(env)
                ok = True
                for a, x in zip(c.args, tup):
                    if isinstance(a, Var):
                        if a.name == "_":
                            continue
                        if a.name in e:
                            if e[a.name] != x:
                                ok = False
                                break
                        else:
                            e[a.name] = x
                    elif evaluate(a, ctx, e) != x:
                        ok = False
                        break
                if ok:
                    yield from _solve(conjuncts, ctx, e, local)
            return
        if isinstance(c, Rel) and c.op in ("=", "in"):
            target, source = c.left, c.right
            if c.op == "=" and isinstance(c.right, (Var, Tup)) and not _evaluable(c.right, env) \
                    and _evaluable(c.left, env):
                target, source = c.right, c.left
            if not _is_pattern(target) or not (all_vars(target) & unbound) or not _evaluable(source, env):
                continue
            val = evaluate(source, ctx, env)
            if val is _UNDEF:
                return
            values = [val] if c.op == "=" else (sorted(val, key=_cmp_key) if isinstance(val, frozenset) else [])
            for v in values:
                e = dict(env)
                if _match_pattern(target, v, e, ctx):
                    yield from _solve(conjuncts, ctx, e, local)
            return
    var = min(unbound)
    for v in ctx.universe:
        e = dict(env)
        e[var] = v
        yield from _solve(conjuncts, ctx, e, local)


def _is_pattern(node: Node) -> bool:
    if isinstance(node, Var):
        return node.name != "_"
    return isinstance(node, Tup) and all(_is_pattern(i) or not all_vars(i) for i in node.items)


def _match_pattern(pattern: Node, value: Any, env: dict, ctx: Context) -> bool:
    if isinstance(pattern, Var):
        if pattern.name in env:
            return env[pattern.name] == value
        env[pattern.name] = value
        return True
    if isinstance(pattern, Tup):
        if not isinstance(value, tuple) or len(value) != len(pattern.items):
            return False
        return all(_match_pattern(p, v, env, ctx) for p, v in zip(pattern.items, value))
    return evaluate(pattern, ctx, env) == value


def eval_assertion(a: Node, instance: InputInstance, S: Interpretation | Iterable[Atom],
                   universe: Iterable[Any], input_predicates: Iterable[tuple[str, int]] = (),
                   placeholders: Iterable[str] = (), known: Optional[set] = None) -> bool:
    """Truth of ``a`` for input ``instance`` and interpretation ``S``."""
    ctx = Context(instance, S, universe, input_predicates, placeholders, known)
    return holds(a, ctx, {})


# -- records of achievement -----------------------------------------------------

@dataclass(frozen=True)
class RecordOfAchievement:
    """Partial map from prefix index to the achievement recorded after that prefix."""

    entries: tuple = ()  # sorted (index, assertion) pairs

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Node]) -> "RecordOfAchievement":
        return cls(tuple(sorted(mapping.items())))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Any]) -> "RecordOfAchievement":
        grouped: dict[int, list[Node]] = {}
        for b in blocks:
            if b.kind == "achieved":
                grouped.setdefault(b.attached, []).append(b.assertion)
        return cls.from_mapping({k: conjoin(v) for k, v in grouped.items()})

    @property
    def domain(self) -> list[int]:
        return [k for k, _ in self.entries]

    def as_dict(self) -> dict[int, Node]:
        return dict(self.entries)

    def __getitem__(self, k: int) -> Node:
        return self.as_dict()[k]

    def __contains__(self, k: int) -> bool:
        return k in self.as_dict()

    def __len__(self) -> int:
        return len(self.entries)

    def restrict(self, k: int) -> "RecordOfAchievement":
        return RecordOfAchievement(tuple(e for e in self.entries if e[0] <= k))

    def with_entry(self, k: int, a: Node) -> "RecordOfAchievement":
        d = self.as_dict()
        d[k] = a
        return RecordOfAchievement.from_mapping(d)

    def without(self, k: int) -> "RecordOfAchievement":
        d = self.as_dict()
        d.pop(k, None)
        return RecordOfAchievement.from_mapping(d)

    def a_star(self, k: int) -> Node:
        return a_star(self, k)


def a_star(record: RecordOfAchievement, k: int) -> Node:
    """Conjunction of the record's entries at indices up to ``k``."""
    if k < 1:
        raise ValueError("prefix index must be positive")
    return conjoin(a for i, a in record.entries if i <= k)


# -- satisfying interpretations -------------------------------------------------

def _as_tuples(value: Any, arity: int) -> Optional[frozenset]:
    if not isinstance(value, frozenset):
        return None
    out = set()
    for v in value:
        if arity == 1:
            out.add((v,))
        elif isinstance(v, tuple) and len(v) == arity:
            out.add(v)
        else:
            return None
    return frozenset(out)


def _ext_side(c: Node, sig) -> Optional[tuple[str, Node]]:
    """For ``p/k op E`` or ``E op p/k`` return (op as seen from p/k, E)."""
    flip = {"=": "=", "subset": "superset"}
    if not isinstance(c, Rel):
        return None
    if isinstance(c.left, Ext) and (c.left.pred, c.left.arity) == sig:
        return c.op, c.right
    if isinstance(c.right, Ext) and (c.right.pred, c.right.arity) == sig and c.op in flip:
        return flip[c.op], c.left
    return None


def _card_side(c: Node, sig) -> Optional[tuple[str, Node]]:
    mirror = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}
    if not isinstance(c, Rel) or c.op not in mirror:
        return None
    if isinstance(c.left, Bars) and isinstance(c.left.arg, Ext) and (c.left.arg.pred, c.left.arg.arity) == sig:
        return c.op, c.right
    if isinstance(c.right, Bars) and isinstance(c.right.arg, Ext) and \
            (c.right.arg.pred, c.right.arg.arity) == sig:
        return mirror[c.op], c.left
    return None


def _size_ok(op: str, size: int, bound: int) -> bool:
    return {"=": size == bound, "!=": size != bound, "<": size < bound, "<=": size <= bound,
            ">": size > bound, ">=": size >= bound}[op]


class _Timer:
    def __init__(self, budget):
        self.budget = budget
        self.start = time.monotonic()

    def check(self, count: int):
        t = getattr(self.budget, "timeout", None)
        if t is not None and time.monotonic() - self.start > t:
            raise BudgetExceeded("timeout", count)


def enumerate_satisfying(a: Node, instance: InputInstance, predicate_set: Iterable[tuple[str, int]],
                         universe: Iterable[Any], budget=None,
                         input_predicates: Iterable[tuple[str, int]] = (),
                         placeholders: Iterable[str] = (),
                         stats: Optional[dict] = None) -> list[Interpretation]:
    """All interpretations over ``predicate_set`` and ``universe`` that satisfy ``a``.

    Input predicates are fixed to the instance's facts.  Every other predicate
    is either pinned by an equation ``p/k = E``, or drawn from a candidate set
    narrowed by ``p/k subset E`` and ``forall X in p/k: ...`` conjuncts, with
    subset sizes restricted by ``|p/k| op E`` conjuncts.  Conjuncts whose
    predicates are all decided prune early; the full assertion filters last.
    """
    from .engine import EnumerationBudget

    budget = budget or EnumerationBudget()
    universe = sorted(set(universe), key=term_key)
    inputs = set(input_predicates)
    preds = sorted(set(predicate_set), key=lambda s: (s[0], s[1]))
    fixed_atoms = [f for f in instance.facts if f.signature in inputs and f.signature in set(preds)]
    free = [s for s in preds if s not in inputs]
    conjuncts = flatten_and(a)
    refs = [referenced_predicates(c) for c in conjuncts]
    placeholders = tuple(placeholders)
    timer = _Timer(budget)
    results: list[Interpretation] = []
    counter = {"candidates": 0, "nodes": 0}

    def ctx_for(assigned: dict) -> Context:
        atoms = list(fixed_atoms)
        for sig, tuples in assigned.items():
            atoms.extend(Atom(sig[0], t) for t in tuples)
        return Context(instance, atoms, universe, inputs, placeholders)

    def decided(assigned: dict, sigs: set) -> bool:
        return all(s not in free or s in assigned for s in sigs)

    def consistent(assigned: dict, newly: tuple) -> bool:
        counter["nodes"] += 1
        if counter["nodes"] % 256 == 0:
            timer.check(counter["candidates"])
        ctx = None
        for c, r in zip(conjuncts, refs):
            if newly in r and decided(assigned, r):
                ctx = ctx or ctx_for(assigned)
                if not holds(c, ctx, {}):
                    return False
        return True

    def search(assigned: dict):
        remaining = [s for s in free if s not in assigned]
        if not remaining:
            counter["candidates"] += 1
            if counter["candidates"] > budget.max_candidates:
                raise BudgetExceeded("candidates", counter["candidates"] - 1)
            if counter["candidates"] % 256 == 0:
                timer.check(counter["candidates"])
            ctx = ctx_for(assigned)
            if holds(a, ctx, {}):
                results.append(Interpretation(ctx_atoms(assigned)))
                if len(results) > budget.max_models:
                    raise BudgetExceeded("models", len(results) - 1)
            return
        # pinned extensions first
        for sig in remaining:
            for c, r in zip(conjuncts, refs):
                side = _ext_side(c, sig)
                if side is None or side[0] != "=":
                    continue
                others = r - {sig}
                if sig in referenced_predicates(side[1]) or not decided(assigned, others):
                    continue
                value = _as_tuples(evaluate(side[1], ctx_for(assigned), {}), sig[1])
                if value is None:
                    return
                nxt = dict(assigned)
                nxt[sig] = value
                if consistent(nxt, sig):
                    search(nxt)
                return
        sig = _pick(remaining, conjuncts)
        ctx = ctx_for(assigned)
        candidates = None
        sizes = None
        filters = []
        for c, r in zip(conjuncts, refs):
            side = _ext_side(c, sig)
            if side is not None and side[0] == "subset" and decided(assigned, r - {sig}) \
                    and sig not in referenced_predicates(side[1]):
                got = _as_tuples(evaluate(side[1], ctx, {}), sig[1])
                if got is None:
                    return
                candidates = got if candidates is None else candidates & got
                continue
            card = _card_side(c, sig)
            if card is not None and decided(assigned, r - {sig}) \
                    and sig not in referenced_predicates(card[1]):
                bound = evaluate(card[1], ctx, {})
                if not isinstance(bound, int):
                    return
                allowed = {n for n in range(0, 1 + len(universe) ** sig[1]) if _size_ok(card[0], n, bound)}
                sizes = allowed if sizes is None else sizes & allowed
                continue
            if isinstance(c, Quant) and c.kind == "forall" and len(c.binders) == 1:
                b = c.binders[0]
                if isinstance(b.domain, Ext) and (b.domain.pred, b.domain.arity) == sig \
                        and decided(assigned, referenced_predicates(c.body)) \
                        and sig not in referenced_predicates(c.body):
                    filters.append((b.pattern, c.body))
        if candidates is None:
            candidates = frozenset(itertools.product(universe, repeat=sig[1]))
        kept = []
        for tup in sorted(candidates, key=_cmp_key):
            value = tup[0] if sig[1] == 1 else tup
            ok = True
            for pattern, body in filters:
                env: dict = {}
                if not _bind_pattern(pattern, value, env) or not holds(body, ctx, env):
                    ok = False
                    break
            if ok:
                kept.append(tup)
        m = len(kept)
        size_list = sorted(s for s in (sizes if sizes is not None else range(m + 1)) if 0 <= s <= m)
        total = sum(math.comb(m, s) for s in size_list)
        if counter["candidates"] + total > budget.max_candidates and len(remaining) == 1:
            raise BudgetExceeded("candidates", counter["candidates"])
        for s in size_list:
            for combo in itertools.combinations(kept, s):
                nxt = dict(assigned)
                nxt[sig] = frozenset(combo)
                if consistent(nxt, sig):
                    search(nxt)

    def ctx_atoms(assigned):
        atoms = list(fixed_atoms)
        for sig, tuples in assigned.items():
            atoms.extend(Atom(sig[0], t) for t in tuples)
        return atoms

    search({})
    if stats is not None:
        stats["candidates"] = counter["candidates"]
    return sorted(results)


def _pick(remaining: list, conjuncts: list):
    """Branch on a predicate no equation pins; pinned ones wait for their inputs."""
    for sig in remaining:
        if not any(_ext_side(c, sig) is not None and _ext_side(c, sig)[0] == "=" for c in conjuncts):
            return sig
    return remaining[0]


def enumerate_satisfying_exhaustive(a: Node, instance: InputInstance,
                                    predicate_set: Iterable[tuple[str, int]],
                                    universe: Iterable[Any], budget=None,
                                    input_predicates: Iterable[tuple[str, int]] = (),
                                    placeholders: Iterable[str] = ()) -> list[Interpretation]:
    """Reference path: every subset of every free predicate's tuple space, filtered by ``a``."""
    from .engine import EnumerationBudget

    budget = budget or EnumerationBudget()
    universe = sorted(set(universe), key=term_key)
    inputs = set(input_predicates)
    preds = sorted(set(predicate_set))
    fixed = [f for f in instance.facts if f.signature in inputs and f.signature in set(preds)]
    pool = [Atom(p, t) for p, k in preds if (p, k) not in inputs
            for t in itertools.product(universe, repeat=k)]
    if 2 ** len(pool) > budget.max_candidates:
        raise BudgetExceeded("candidates", 0)
    out = []
    for mask in range(2 ** len(pool)):
        atoms = fixed + [pool[i] for i in range(len(pool)) if mask >> i & 1]
        ctx = Context(instance, atoms, universe, inputs, placeholders)
        if holds(a, ctx, {}):
            out.append(Interpretation(atoms))
    return sorted(out)
