"""Terms, atoms, rules, ordered programs and interpretations.

Precomputed terms are plain Python values: ``int`` for integers, :class:`Symbol`
for symbolic constants and ``tuple`` for tuples.  Everything else
(:class:`Variable`, :class:`BinOp`, :class:`Interval`, ...) only occurs in the
rule AST and disappears during grounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Iterator, Mapping, Optional, Union

from .errors import PrefixRangeError, SourceSpan

FRESH_PREFIX = "__c_"


@dataclass(frozen=True, order=True)
class Symbol:
    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Symbol({self.name!r})"


@dataclass(frozen=True)
class Variable:
    name: str

    @property
    def anonymous(self) -> bool:
        return self.name == "_"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / \
    left: Any
    right: Any

    def __str__(self) -> str:
        return f"({term_str(self.left)}{self.op}{term_str(self.right)})"


@dataclass(frozen=True)
class UnOp:
    op: str  # "-" or "abs"
    arg: Any

    def __str__(self) -> str:
        if self.op == "abs":
            return f"|{term_str(self.arg)}|"
        return f"-{term_str(self.arg)}"


@dataclass(frozen=True)
class Interval:
    lo: Any
    hi: Any

    def __str__(self) -> str:
        return f"{term_str(self.lo)}..{term_str(self.hi)}"


@dataclass(frozen=True)
class Pool:
    alternatives: tuple

    def __str__(self) -> str:
        return "(" + ";".join(term_str(t) for t in self.alternatives) + ")"


@dataclass(frozen=True)
class TupleTerm:
    items: tuple

    def __str__(self) -> str:
        if len(self.items) == 1:
            return f"({term_str(self.items[0])},)"
        return "(" + ",".join(term_str(t) for t in self.items) + ")"


Term = Union[int, Symbol, tuple, Variable, BinOp, UnOp, Interval, Pool, TupleTerm]


def term_str(t: Any) -> str:
    if isinstance(t, tuple):
        if len(t) == 1:
            return f"({term_str(t[0])},)"
        return "(" + ",".join(term_str(x) for x in t) + ")"
    return str(t)


def is_precomputed(t: Any) -> bool:
    if isinstance(t, bool):
        return False
    if isinstance(t, (int, Symbol)):
        return True
    if isinstance(t, tuple):
        return all(is_precomputed(x) for x in t)
    if isinstance(t, TupleTerm):
        return all(is_precomputed(x) for x in t.items)
    return False


def term_key(t: Any) -> tuple:
    """Total order on precomputed terms: integers < symbols < tuples."""
    if isinstance(t, int):
        return (0, t)
    if isinstance(t, Symbol):
        return (1, t.name)
    if isinstance(t, tuple):
        return (2, len(t), tuple(term_key(x) for x in t))
    raise TypeError(f"not a precomputed term: {t!r}")


def term_vars(t: Any) -> Iterator[Variable]:
    if isinstance(t, Variable):
        yield t
    elif isinstance(t, BinOp):
        yield from term_vars(t.left)
        yield from term_vars(t.right)
    elif isinstance(t, UnOp):
        yield from term_vars(t.arg)
    elif isinstance(t, Interval):
        yield from term_vars(t.lo)
        yield from term_vars(t.hi)
    elif isinstance(t, Pool):
        for a in t.alternatives:
            yield from term_vars(a)
    elif isinstance(t, TupleTerm):
        for a in t.items:
            yield from term_vars(a)


def map_term(t: Any, fn) -> Any:
    """Rebuild ``t`` bottom-up, applying ``fn`` to every leaf."""
    if isinstance(t, BinOp):
        return BinOp(t.op, map_term(t.left, fn), map_term(t.right, fn))
    if isinstance(t, UnOp):
        return UnOp(t.op, map_term(t.arg, fn))
    if isinstance(t, Interval):
        return Interval(map_term(t.lo, fn), map_term(t.hi, fn))
    if isinstance(t, Pool):
        return Pool(tuple(map_term(a, fn) for a in t.alternatives))
    if isinstance(t, TupleTerm):
        return TupleTerm(tuple(map_term(a, fn) for a in t.items))
    return fn(t)


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def is_precomputed(self) -> bool:
        return all(is_precomputed(a) for a in self.args)

    def is_fresh(self) -> bool:
        return self.pred.startswith(FRESH_PREFIX)

    def vars(self) -> Iterator[Variable]:
        for a in self.args:
            yield from term_vars(a)

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}(" + ",".join(term_str(a) for a in self.args) + ")"


def atom_key(a: Atom) -> tuple:
    return (a.pred, len(a.args), tuple(term_key(x) for x in a.args))


def sig_str(sig: tuple[str, int]) -> str:
    return f"{sig[0]}/{sig[1]}"


# -- rule AST -----------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self) -> str:
        return f"not {self.atom}" if self.negated else str(self.atom)


COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")
NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


@dataclass(frozen=True)
class Comparison:
    op: str
    left: Any
    right: Any

    def vars(self) -> Iterator[Variable]:
        yield from term_vars(self.left)
        yield from term_vars(self.right)

    def __str__(self) -> str:
        return f"{term_str(self.left)}{self.op}{term_str(self.right)}"


@dataclass(frozen=True)
class AggregateElement:
    terms: tuple
    condition: tuple  # of Literal / Comparison

    def __str__(self) -> str:
        head = ",".join(term_str(t) for t in self.terms)
        if not self.condition:
            return head
        return head + ":" + ",".join(str(c) for c in self.condition)


@dataclass(frozen=True)
class AggregateAssign:
    """``term = #func{ elements }``; ``term`` is bound by it or compared with it."""

    term: Any
    func: str  # sum, count, max, min
    elements: tuple

    def __str__(self) -> str:
        elems = ";".join(str(e) for e in self.elements)
        return f"{term_str(self.term)}=#{self.func}{{{elems}}}"


@dataclass(frozen=True)
class ChoiceElement:
    atom: Atom
    condition: tuple = ()

    def __str__(self) -> str:
        if not self.condition:
            return str(self.atom)
        return f"{self.atom}:" + ",".join(str(c) for c in self.condition)


@dataclass(frozen=True)
class ChoiceHead:
    lower: Any  # term or None
    upper: Any  # term or None
    elements: tuple

    def __str__(self) -> str:
        lo = f"{term_str(self.lower)} " if self.lower is not None else ""
        hi = f" {term_str(self.upper)}" if self.upper is not None else ""
        return lo + "{ " + "; ".join(str(e) for e in self.elements) + " }" + hi


BodyItem = Union[Literal, Comparison, AggregateAssign]
Head = Union[Atom, ChoiceHead, None]


@dataclass(frozen=True)
class Rule:
    index: int
    head: Head
    body: tuple = ()
    span: Optional[SourceSpan] = field(default=None, compare=False)

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_choice(self) -> bool:
        return isinstance(self.head, ChoiceHead)

    def predicates(self) -> set[tuple[str, int]]:
        out: set[tuple[str, int]] = set()

        def cond(items):
            for c in items:
                if isinstance(c, Literal):
                    out.add(c.atom.signature)
                elif isinstance(c, AggregateAssign):
                    for e in c.elements:
                        cond(e.condition)

        if isinstance(self.head, Atom):
            out.add(self.head.signature)
        elif isinstance(self.head, ChoiceHead):
            for e in self.head.elements:
                out.add(e.atom.signature)
                cond(e.condition)
        cond(self.body)
        return out

    def __str__(self) -> str:
        head = "" if self.head is None else str(self.head)
        if not self.body:
            return f"{head}."
        body = ", ".join(str(b) for b in self.body)
        return f"{head} :- {body}." if head else f":- {body}."


# -- inputs -------------------------------------------------------------------

@dataclass(frozen=True)
class InputSpec:
    """Input predicates, placeholders (name -> validity condition) and extra assumptions."""

    input_predicates: frozenset = frozenset()
    placeholders: tuple = ()  # of (name, Assertion | None), in declaration order
    assumptions: tuple = ()

    @property
    def placeholder_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.placeholders)

    def condition(self, name: str):
        for n, c in self.placeholders:
            if n == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class InputInstance:
    facts: frozenset = frozenset()
    bindings: tuple = ()  # of (name, precomputed term)
    name: str = "instance"

    @property
    def binding_map(self) -> dict[str, Any]:
        return dict(self.bindings)

    def extension(self, pred: str, arity: int) -> set[tuple]:
        return {a.args for a in self.facts if a.pred == pred and a.arity == arity}

    @classmethod
    def make(cls, facts: Iterable[Atom] = (), bindings: Mapping[str, Any] | None = None,
             name: str = "instance") -> "InputInstance":
        return cls(frozenset(facts), tuple(sorted((bindings or {}).items())), name)


# -- annotations and programs ---------------------------------------------------

@dataclass(frozen=True)
class AnnotationBlock:
    kind: str  # "achieved", "input" or "const-decl"
    payload: str = field(compare=False)
    attached: int  # rule index preceding an achieved block; 0 for input blocks
    assertion: Any = None  # parsed achievement or validity condition
    name: Optional[str] = None  # placeholder name of a const-decl block
    span: Optional[SourceSpan] = field(default=None, compare=False)


@dataclass(frozen=True)
class Program:
    rules: tuple
    annotations: tuple = ()
    input_spec: InputSpec = InputSpec()
    reconstructed: bool = False
    declared_complete: bool = False
    name: str = field(default="program", compare=False)
    root: Optional["Program"] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.rules)

    @property
    def full(self) -> "Program":
        """The complete program this view was cut from (itself if not a view)."""
        return self.root if self.root is not None else self

    @property
    def record(self):
        from .assertions import RecordOfAchievement

        return RecordOfAchievement.from_blocks(self.annotations)

    def prefix(self, k: int) -> "Program":
        root = self.full
        if not 1 <= k <= self.n:
            raise PrefixRangeError(f"prefix index {k} outside 1..{self.n}")
        anns = tuple(a for a in self.annotations if a.attached <= k)
        return replace(self, rules=self.rules[:k], annotations=anns, root=root)

    def predicates(self) -> set[tuple[str, int]]:
        out: set[tuple[str, int]] = set()
        for r in self.rules:
            out |= r.predicates()
        return out

    def to_text(self) -> str:
        """Surface syntax that re-parses to an equal program."""
        lines = []
        if self.reconstructed:
            lines.append("%@ reconstructed")
        if self.declared_complete:
            lines.append("%@ record: complete")
        by_index: dict[int, list[AnnotationBlock]] = {}
        for a in self.annotations:
            by_index.setdefault(a.attached, []).append(a)
        for a in by_index.get(0, []):
            lines.append(_block_text(a))
        for r in self.rules:
            lines.append(str(r))
            for a in by_index.get(r.index, []):
                lines.append(_block_text(a))
        return "\n".join(lines) + "\n"


def _block_text(a: AnnotationBlock) -> str:
    if a.kind == "achieved":
        return f"%@ achieved: {a.assertion}."
    if a.kind == "const-decl":
        return f"%@ input: const {a.assertion if a.assertion is not None else a.name}."
    if a.assertion is not None:
        return f"%@ input: assume {a.assertion}."
    return f"%@ input: {a.payload}."


def prefix(program: Program, k: int) -> Program:
    return program.prefix(k)


def preds(view: Program) -> set[tuple[str, int]]:
    """Predicates occurring in the view plus the program's input predicates."""
    return view.predicates() | set(view.input_spec.input_predicates)


# -- interpretations ------------------------------------------------------------

class Interpretation:
    """An immutable set of precomputed atoms with a canonical iteration order."""

    __slots__ = ("atoms", "_key")

    def __init__(self, atoms: Iterable[Atom] = ()):
        atoms = frozenset(a for a in atoms if not a.is_fresh())
        for a in atoms:
            if not a.is_precomputed():
                raise ValueError(f"interpretation atom {a} is not precomputed")
        self.atoms = atoms
        self._key = None

    @classmethod
    def trusted(cls, atoms: Iterable[Atom], key: tuple) -> "Interpretation":
        """Build from non-fresh precomputed atoms whose canonical key is already known."""
        obj = cls.__new__(cls)
        obj.atoms = frozenset(atoms)
        obj._key = key
        return obj

    def __iter__(self) -> Iterator[Atom]:
        return iter(sorted(self.atoms, key=atom_key))

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, a: object) -> bool:
        return a in self.atoms

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Interpretation):
            return self.atoms == other.atoms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.atoms)

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(atom_key(a) for a in self)
        return self._key

    def __lt__(self, other: "Interpretation") -> bool:
        return self.key() < other.key()

    def extension(self, pred: str, arity: int) -> set[tuple]:
        return {a.args for a in self.atoms if a.pred == pred and len(a.args) == arity}

    def restrict(self, signatures: Iterable[tuple[str, int]]) -> "Interpretation":
        sigs = set(signatures)
        return Interpretation(a for a in self.atoms if a.signature in sigs)

    def predicates(self) -> set[tuple[str, int]]:
        return {a.signature for a in self.atoms}

    def __str__(self) -> str:
        return "{" + ", ".join(str(a) for a in self) + "}"

    def __repr__(self) -> str:
        return f"Interpretation({self})"
