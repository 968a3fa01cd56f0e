"""Bottom-up instantiation of program prefixes.

Rules are grounded component by component along the predicate dependency graph.
Within a recursive component the usual semi-naive scheme is used: each round
only considers instances that use at least one atom derived in the previous
round.  Alongside the *possible* atoms (anything that may be derived) the
grounder tracks *certain* atoms (derivable by definite rules from certain
atoms), which drive the optional simplification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Iterator, Optional

import networkx as nx

from .arith import eval_values, is_simple, match, substitute
from .errors import GroundingError, NonFiniteGrounding, UnboundPlaceholder, UnsupportedAggregate
from .model import (
    AggregateAssign, Atom, ChoiceHead, Comparison, InputInstance, Literal, Program, Rule,
    Symbol, Variable, atom_key, term_key, term_str, term_vars,
)

DEFAULT_ATOM_LIMIT = 200_000


# -- ground program ---------------------------------------------------------------

@dataclass(frozen=True)
class GroundElement:
    atom: Atom
    pos: tuple = ()
    neg: tuple = ()

    def __str__(self):
        cond = [str(a) for a in self.pos] + [f"not {a}" for a in self.neg]
        return str(self.atom) + (":" + ",".join(cond) if cond else "")


@dataclass(frozen=True)
class GroundChoice:
    lower: int
    upper: Optional[int]  # None means unbounded
    elements: tuple

    def __str__(self):
        hi = "" if self.upper is None else f" {self.upper}"
        return f"{self.lower} {{" + "; ".join(map(str, self.elements)) + "}" + hi


@dataclass(frozen=True)
class GroundAggregate:
    """``func{elements} = value``; elements are (weight tuple, pos atoms, neg atoms)."""

    func: str
    elements: tuple
    value: Any

    def evaluate(self, true_atoms) -> Any:
        ws = [e[0] for e in self.elements
              if all(a in true_atoms for a in e[1]) and not any(a in true_atoms for a in e[2])]
        return aggregate_value(self.func, ws)

    def holds(self, true_atoms) -> bool:
        v = self.evaluate(true_atoms)
        return v is not None and v == self.value

    def atoms(self) -> Iterator[Atom]:
        for e in self.elements:
            yield from e[1]
            yield from e[2]

    def __str__(self):
        parts = []
        for w, pos, neg in self.elements:
            cond = [str(a) for a in pos] + [f"not {a}" for a in neg]
            parts.append(",".join(term_str(x) for x in w) + (":" + ",".join(cond) if cond else ""))
        return f"{term_str(self.value)}=#{self.func}{{" + "; ".join(parts) + "}"


def aggregate_value(func: str, weights: Iterable[tuple]) -> Any:
    ws = list(weights)
    if func == "count":
        return len(ws)
    nums = [w[0] for w in ws if w and isinstance(w[0], int)]
    if func == "sum":
        return sum(nums)
    if not nums:
        return None
    return max(nums) if func == "max" else min(nums)


@dataclass(frozen=True)
class GroundRule:
    index: int
    head: Any  # Atom, GroundChoice or None
    pos: tuple = ()
    neg: tuple = ()
    aggs: tuple = ()

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_choice(self) -> bool:
        return isinstance(self.head, GroundChoice)

    def head_atoms(self) -> list[Atom]:
        if isinstance(self.head, Atom):
            return [self.head]
        if isinstance(self.head, GroundChoice):
            return [e.atom for e in self.head.elements]
        return []

    def atoms(self) -> Iterator[Atom]:
        yield from self.head_atoms()
        if isinstance(self.head, GroundChoice):
            for e in self.head.elements:
                yield from e.pos
                yield from e.neg
        yield from self.pos
        yield from self.neg
        for g in self.aggs:
            yield from g.atoms()

    def sort_key(self) -> tuple:
        return (self.index, str(self))

    def __str__(self):
        head = "" if self.head is None else str(self.head)
        body = [str(a) for a in self.pos] + [f"not {a}" for a in self.neg] + [str(g) for g in self.aggs]
        if not body:
            return f"{head}."
        return (f"{head} :- " if head else ":- ") + ", ".join(body) + "."


@dataclass
class GroundProgram:
    rules: list
    head_atoms: frozenset
    certain: frozenset = frozenset()
    atom_list: list = field(default_factory=list)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def atoms(self) -> frozenset:
        got = self._cache.get("atoms")
        if got is None:
            s = set()
            for r in self.rules:
                s.update(r.atoms())
            got = self._cache["atoms"] = frozenset(s)
        return got

    def dump(self) -> str:
        return "\n".join(str(r) for r in self.rules) + ("\n" if self.rules else "")

    def __len__(self) -> int:
        return len(self.rules)


# -- preprocessing ----------------------------------------------------------------

def _subst_item(it, mapping):
    if isinstance(it, Literal):
        return Literal(_subst_atom(it.atom, mapping), it.negated)
    if isinstance(it, Comparison):
        return Comparison(it.op, substitute(it.left, mapping), substitute(it.right, mapping))
    if isinstance(it, AggregateAssign):
        elems = tuple(replace(e, terms=tuple(substitute(t, mapping) for t in e.terms),
                              condition=tuple(_subst_item(c, mapping) for c in e.condition))
                      for e in it.elements)
        return AggregateAssign(substitute(it.term, mapping), it.func, elems)
    raise TypeError(it)


def _subst_atom(a: Atom, mapping) -> Atom:
    return Atom(a.pred, tuple(substitute(t, mapping) for t in a.args))


def substitute_placeholders(rules: Iterable[Rule], instance: InputInstance,
                            declared: Iterable[str] = ()) -> list[Rule]:
    mapping = instance.binding_map
    for name in declared:
        if name not in mapping:
            raise UnboundPlaceholder(f"placeholder {name} has no binding")
    if not mapping:
        return list(rules)
    out = []
    for r in rules:
        head = r.head
        if isinstance(head, Atom):
            head = _subst_atom(head, mapping)
        elif isinstance(head, ChoiceHead):
            head = ChoiceHead(substitute(head.lower, mapping) if head.lower is not None else None,
                              substitute(head.upper, mapping) if head.upper is not None else None,
                              tuple(replace(e, atom=_subst_atom(e.atom, mapping),
                                            condition=tuple(_subst_item(c, mapping) for c in e.condition))
                                    for e in head.elements))
        out.append(replace(r, head=head, body=tuple(_subst_item(b, mapping) for b in r.body)))
    return out


def _head_sigs(r: Rule) -> list[tuple[str, int]]:
    if isinstance(r.head, Atom):
        return [r.head.signature]
    if isinstance(r.head, ChoiceHead):
        return sorted({e.atom.signature for e in r.head.elements})
    return []


def _body_sigs(items) -> set[tuple[str, int]]:
    out = set()
    for it in items:
        if isinstance(it, Literal):
            out.add(it.atom.signature)
        elif isinstance(it, AggregateAssign):
            for e in it.elements:
                out |= _body_sigs(e.condition)
    return out


def _agg_sigs(items) -> set[tuple[str, int]]:
    out = set()
    for it in items:
        if isinstance(it, AggregateAssign):
            for e in it.elements:
                out |= _body_sigs(e.condition)
    return out


def dependency_graph(rules: Iterable[Rule]) -> nx.DiGraph:
    """Edges from body predicates to head predicates."""
    g = nx.DiGraph()
    for r in rules:
        heads = _head_sigs(r)
        deps = _body_sigs(r.body)
        if isinstance(r.head, ChoiceHead):
            for e in r.head.elements:
                deps |= _body_sigs(e.condition)
        for h in heads:
            g.add_node(h)
            for d in deps:
                g.add_edge(d, h)
    return g


def components(rules: list[Rule]) -> list[tuple[set, list[Rule]]]:
    """Predicate components in topological order with the rules defining them."""
    g = dependency_graph(rules)
    cond = nx.condensation(g)
    order = list(nx.lexicographical_topological_sort(
        cond, key=lambda c: min(cond.nodes[c]["members"])))
    out = []
    for c in order:
        members = set(cond.nodes[c]["members"])
        defining = [r for r in rules if r.head is not None and set(_head_sigs(r)) & members]
        if defining:
            out.append((members, defining))
    return out


# -- instantiation ------------------------------------------------------------------

class _Store:
    """Possible atoms per signature with a simple first-argument index."""

    def __init__(self):
        self.by_sig: dict[tuple[str, int], list[tuple]] = {}
        self.sets: dict[tuple[str, int], set[tuple]] = {}
        self.count = 0

    def add(self, a: Atom) -> bool:
        s = self.sets.setdefault(a.signature, set())
        if a.args in s:
            return False
        s.add(a.args)
        self.by_sig.setdefault(a.signature, []).append(a.args)
        self.count += 1
        return True

    def __contains__(self, a: Atom) -> bool:
        return a.args in self.sets.get(a.signature, ())

    def tuples(self, sig) -> list[tuple]:
        return self.by_sig.get(sig, [])


class _Grounder:
    def __init__(self, rules: list[Rule], instance: InputInstance, input_preds,
                 simplify: bool = True, atom_limit: int = DEFAULT_ATOM_LIMIT):
        self.rules = rules
        self.instance = instance
        self.simplify = simplify
        self.atom_limit = atom_limit
        self.possible = _Store()
        self.certain: set[Atom] = set()
        self.input_facts = sorted((a for a in instance.facts if a.signature in set(input_preds)),
                                  key=atom_key)
        for a in self.input_facts:
            self.possible.add(a)
            self.certain.add(a)
        self.out: list[GroundRule] = []
        self.done: set[tuple[str, int]] = set(s for s in input_preds)

    # body matching
    def instantiate(self, items: list, env: dict, delta: Optional[dict] = None,
                    delta_at: Optional[int] = None) -> Iterator[tuple[dict, list]]:
        """Yield (env, ground items) for every instance of ``items``.

        Ground items are (kind, payload): ("pos", atom), ("neg", atom), ("agg", GroundAggregate).
        When ``delta_at`` is set, the literal at that position only matches ``delta`` atoms.
        """
        yield from self._inst(list(enumerate(items)), env, [], delta, delta_at)

    def _inst(self, pending, env, acc, delta, delta_at):
        if not pending:
            yield env, acc
            return
        choice = self._pick(pending, env, delta_at)
        if choice is None:
            # remaining items cannot be scheduled: only unsafe input reaches here
            raise GroundingError("cannot bind all variables while grounding")
        pos, (i, it) = choice
        rest = pending[:pos] + pending[pos + 1:]
        if isinstance(it, Comparison):
            if it.op == "=" and not (_term_bound(it.left, env) and _term_bound(it.right, env)):
                target, source = (it.left, it.right) if _term_bound(it.right, env) else (it.right, it.left)
                for v in eval_values(source, env):
                    e = dict(env)
                    if match(target, v, e):
                        yield from self._inst(rest, e, acc, delta, delta_at)
                return
            if _compare(it, env):
                yield from self._inst(rest, env, acc, delta, delta_at)
            return
        if isinstance(it, Literal) and it.negated:
            for args in itertools.product(*(eval_values(t, env) for t in it.atom.args)):
                yield from self._inst(rest, env, acc + [("neg", Atom(it.atom.pred, args))], delta, delta_at)
            return
        if isinstance(it, Literal):
            a = it.atom
            use_delta = delta is not None and i == delta_at
            source = delta.get(a.signature, set()) if use_delta else self.possible.tuples(a.signature)
            if all(_term_bound(t, env) for t in a.args):
                for args in itertools.product(*(eval_values(t, env) for t in a.args)):
                    g = Atom(a.pred, args)
                    ok = (args in source) if use_delta else g in self.possible
                    if ok:
                        yield from self._inst(rest, env, acc + [("pos", g)], delta, delta_at)
                return
            for tup in (sorted(source, key=_tuple_key) if use_delta else list(source)):
                e = dict(env)
                if all(_match_arg(t, v, e) for t, v in zip(a.args, tup)):
                    yield from self._inst(rest, e, acc + [("pos", Atom(a.pred, tup))], delta, delta_at)
            return
        if isinstance(it, AggregateAssign):
            for v, gagg in self._aggregate(it, env):
                e = dict(env)
                if _term_bound(it.term, env):
                    if v not in eval_values(it.term, env):
                        continue
                elif not match(it.term, v, e):
                    continue
                extra = [] if gagg is None else [("agg", gagg)]
                yield from self._inst(rest, e, acc + extra, delta, delta_at)
            return
        raise TypeError(it)

    def _pick(self, pending, env, delta_at):
        best = None
        for pos, (i, it) in enumerate(pending):
            if isinstance(it, Comparison):
                lb, rb = _term_bound(it.left, env), _term_bound(it.right, env)
                if lb and rb:
                    return pos, (i, it)
                if it.op == "=" and ((lb and is_simple(it.right)) or (rb and is_simple(it.left))):
                    score = (1, 0)
                else:
                    continue
            elif isinstance(it, Literal) and it.negated:
                if all(_term_bound(t, env) for t in it.atom.args):
                    score = (2, 0)
                else:
                    continue
            elif isinstance(it, Literal):
                a = it.atom
                if not all(_term_bound(t, env) or is_simple(t) for t in a.args):
                    continue
                if i == delta_at:
                    score = (0, 0)
                else:
                    bound = sum(1 for t in a.args if _term_bound(t, env))
                    score = (1, -bound, len(self.possible.tuples(a.signature)))
            elif isinstance(it, AggregateAssign):
                if all(v in env for v in _agg_globals(it, env)):
                    score = (3, 0)
                else:
                    continue
            else:
                continue
            if best is None or score < best[0]:
                best = (score, pos, (i, it))
        return None if best is None else (best[1], best[2])

    # aggregates
    def _aggregate(self, it: AggregateAssign, env: dict) -> list[tuple[Any, Optional[GroundAggregate]]]:
        elements = set()
        for el in it.elements:
            local_items = list(el.condition)
            for e, ground in self.instantiate(local_items, dict(env)):
                weights = [eval_values(t, e) for t in el.terms]
                pos = tuple(sorted((g for k, g in ground if k == "pos"), key=atom_key))
                neg = tuple(sorted((g for k, g in ground if k == "neg"), key=atom_key))
                for w in itertools.product(*weights):
                    elements.add((tuple(w), pos, neg))
        certain_ws, uncertain = [], []
        for w, pos, neg in elements:
            status = self._cond_status(pos, neg)
            if status is True:
                certain_ws.append(w)
            elif status is None:
                uncertain.append((w, pos, neg))
        if not uncertain:
            v = aggregate_value(it.func, certain_ws)
            if v is None:
                return []
            if self.simplify:
                return [(v, None)]
            elems = tuple(sorted(((w, p, n) for w, p, n in elements), key=_elem_key))
            return [(v, GroundAggregate(it.func, elems, v))]
        elems = tuple(sorted(((w, p, n) for w, p, n in elements
                              if self._cond_status(p, n) is not False), key=_elem_key))
        if not self.simplify:
            elems = tuple(sorted(elements, key=_elem_key))
        return [(v, GroundAggregate(it.func, elems, v))
                for v in _possible_values(it.func, certain_ws, [u[0] for u in uncertain])]

    def _cond_status(self, pos, neg) -> Optional[bool]:
        """True if certainly satisfied, False if impossible, None otherwise."""
        if any(a not in self.possible for a in pos) or any(a in self.certain for a in neg):
            return False
        if all(a in self.certain for a in pos) and not any(a in self.possible for a in neg):
            return True
        return None

    # rule grounding
    def ground_rule(self, r: Rule, delta=None, delta_at=None) -> Iterator[GroundRule]:
        for env, ground in self.instantiate(list(r.body), {}, delta, delta_at):
            pos = [g for k, g in ground if k == "pos"]
            neg = [g for k, g in ground if k == "neg"]
            aggs = [g for k, g in ground if k == "agg"]
            if isinstance(r.head, Atom):
                for args in itertools.product(*(eval_values(t, env) for t in r.head.args)):
                    yield self._make(r.index, Atom(r.head.pred, args), pos, neg, aggs)
            elif isinstance(r.head, ChoiceHead):
                gc = self._choice(r.head, env)
                if gc is not None:
                    yield self._make(r.index, gc, pos, neg, aggs)
            else:
                yield self._make(r.index, None, pos, neg, aggs)

    def _choice(self, h: ChoiceHead, env) -> Optional[GroundChoice]:
        lo = _bound_value(h.lower, env, 0)
        hi = _bound_value(h.upper, env, None)
        if lo is _BAD or hi is _BAD:
            return None
        elems = set()
        for e in h.elements:
            for env2, ground in self.instantiate(list(e.condition), dict(env)):
                pos = tuple(sorted((g for k, g in ground if k == "pos"), key=atom_key))
                neg = tuple(sorted((g for k, g in ground if k == "neg"), key=atom_key))
                if self.simplify:
                    # only atoms of finished components have settled status
                    if any(a in self.certain and a.signature in self.done for a in neg):
                        continue
                    pos = tuple(a for a in pos if not (a in self.certain and a.signature in self.done))
                    neg = tuple(a for a in neg if a in self.possible or a.signature not in self.done)
                for args in itertools.product(*(eval_values(t, env2) for t in e.atom.args)):
                    elems.add(GroundElement(Atom(e.atom.pred, args), pos, neg))
        return GroundChoice(lo, hi, tuple(sorted(elems, key=lambda x: (atom_key(x.atom), str(x)))))

    def _make(self, index, head, pos, neg, aggs) -> GroundRule:
        return GroundRule(index, head,
                          tuple(sorted(set(pos), key=atom_key)),
                          tuple(sorted(set(neg), key=atom_key)),
                          tuple(sorted(set(aggs), key=str)))

    def _add_possible(self, a: Atom) -> bool:
        if not a.is_precomputed():
            raise GroundingError(f"head atom {a} is not precomputed")
        new = self.possible.add(a)
        if new and self.possible.count > self.atom_limit:
            raise NonFiniteGrounding(
                f"more than {self.atom_limit} atoms; the instantiation does not appear to be finite")
        return new

    def run(self) -> GroundProgram:
        rules = self.rules
        normal = [r for r in rules if r.head is not None]
        constraints = [r for r in rules if r.head is None]
        ground: list[GroundRule] = []
        for members, defining in components(normal):
            for r in defining:
                if _agg_sigs(r.body) & members:
                    raise UnsupportedAggregate(
                        f"rule {r.index}: aggregate depends on its own head predicate")
            produced = self._component(members, defining)
            produced = self._finish_component(members, produced)
            ground.extend(produced)
            self.done |= members
        for r in constraints:
            ground.extend(self._simplify(g) for g in set(self.ground_rule(r)))
        ground = [g for g in ground if g is not None]
        for a in self.input_facts:
            ground.append(GroundRule(0, a))
        unique = sorted(set(ground), key=GroundRule.sort_key)
        heads = frozenset(a for g in unique for a in g.head_atoms())
        return GroundProgram(unique, heads, frozenset(self.certain))

    def _component(self, members: set, defining: list[Rule]) -> set[GroundRule]:
        produced: set[GroundRule] = set()
        recursive_positions = {}
        for r in defining:
            recursive_positions[r.index] = [i for i, it in enumerate(r.body)
                                            if isinstance(it, Literal) and not it.negated
                                            and it.atom.signature in members]
        delta: dict = {}

        def absorb(g: GroundRule, new_delta: dict):
            if g in produced:
                return
            produced.add(g)
            for a in g.head_atoms():
                if self._add_possible(a):
                    new_delta.setdefault(a.signature, set()).add(a.args)

        # choice rules whose conditions read this component are re-ground whole
        # until nothing new is possible; only the final element sets are kept
        regrown = [r for r in defining if isinstance(r.head, ChoiceHead)
                   and any(_body_sigs(e.condition) & members for e in r.head.elements)]
        latest: dict[int, set[GroundRule]] = {}

        def regrow(new_delta: dict):
            for r in regrown:
                latest[r.index] = set()
                for g in self.ground_rule(r):
                    latest[r.index].add(g)
                    for a in g.head_atoms():
                        if self._add_possible(a):
                            new_delta.setdefault(a.signature, set()).add(a.args)

        new_delta: dict = {}
        for r in defining:
            if r not in regrown:
                for g in self.ground_rule(r):
                    absorb(g, new_delta)
        regrow(new_delta)
        delta = new_delta
        while delta:
            new_delta = {}
            for r in defining:
                if r in regrown:
                    continue
                for i in recursive_positions[r.index]:
                    for g in self.ground_rule(r, delta, i):
                        absorb(g, new_delta)
            regrow(new_delta)
            delta = new_delta
        for gs in latest.values():
            produced |= gs
        return produced

    def _finish_component(self, members: set, produced: set[GroundRule]) -> list[GroundRule]:
        # certain atoms of this component: least fixpoint over definite instances
        changed = True
        while changed:
            changed = False
            for g in produced:
                if isinstance(g.head, Atom) and g.head not in self.certain \
                        and all(a in self.certain for a in g.pos) \
                        and not any(a in self.possible for a in g.neg) \
                        and all(_agg_certain(x, self) for x in g.aggs):
                    self.certain.add(g.head)
                    changed = True
        out = []
        for g in produced:
            s = self._simplify(g)
            if s is not None:
                out.append(s)
        return out

    def _simplify(self, g: GroundRule) -> Optional[GroundRule]:
        if not self.simplify:
            return g
        if any(a in self.certain for a in g.neg) or any(a not in self.possible for a in g.pos):
            return None
        return replace(g, pos=tuple(a for a in g.pos if a not in self.certain),
                       neg=tuple(a for a in g.neg if a in self.possible))


def _agg_certain(g: GroundAggregate, grounder: _Grounder) -> bool:
    for _, pos, neg in g.elements:
        if grounder._cond_status(pos, neg) is None:
            return False
    return g.holds(grounder.certain)


def _elem_key(e):
    return (tuple(term_key(x) for x in e[0]), tuple(atom_key(a) for a in e[1]),
            tuple(atom_key(a) for a in e[2]))


def _possible_values(func: str, certain: list[tuple], uncertain: list[tuple]) -> list:
    if func == "count":
        return list(range(len(certain), len(certain) + len(uncertain) + 1))
    cw = [w[0] for w in certain if w and isinstance(w[0], int)]
    uw = [w[0] for w in uncertain if w and isinstance(w[0], int)]
    if func == "sum":
        sums = {0}
        for w in uw:
            sums |= {s + w for s in sums}
        return sorted(sum(cw) + s for s in sums)
    best = max if func == "max" else min
    vals = set()
    if cw:
        base = best(cw)
        vals.add(base)
        vals |= {w for w in uw if best(w, base) == w}
    else:
        vals |= set(uw)
    return sorted(vals)


_BAD = object()


def _bound_value(t, env, default):
    if t is None:
        return default
    vals = eval_values(t, env)
    if len(vals) != 1 or not isinstance(vals[0], int):
        return _BAD
    return vals[0]


def _term_bound(t, env) -> bool:
    if isinstance(t, Variable):
        return not t.anonymous and t.name in env
    if isinstance(t, (int, Symbol, tuple)):
        return True
    return all(not v.anonymous and v.name in env for v in _vars_of(t))


def _vars_of(t):
    return list(term_vars(t))


def _tuple_key(t: tuple) -> tuple:
    return tuple(term_key(x) for x in t)


def _match_arg(t, v, env) -> bool:
    if is_simple(t) or isinstance(t, Variable):
        return match(t, v, env)
    return v in eval_values(t, env)


def _agg_globals(it: AggregateAssign, env) -> list[str]:
    """Variables of the aggregate that must be bound before evaluating it."""
    out = []
    for e in it.elements:
        local = set()
        for c in e.condition:
            if isinstance(c, Literal) and not c.negated:
                local |= {v.name for v in c.atom.vars() if not v.anonymous}
            elif isinstance(c, Comparison) and c.op == "=":
                local |= {v.name for v in _vars_of(c.left) if not v.anonymous}
                local |= {v.name for v in _vars_of(c.right) if not v.anonymous}
        for t in e.terms:
            for v in _vars_of(t):
                if v.name not in local:
                    out.append(v.name)
        for c in e.condition:
            if isinstance(c, Literal):
                vs = c.atom.vars()
            else:
                vs = itertools.chain(_vars_of(c.left), _vars_of(c.right))
            for v in vs:
                if not v.anonymous and v.name not in local:
                    out.append(v.name)
    return out


def _compare(c: Comparison, env) -> bool:
    for a in eval_values(c.left, env):
        for b in eval_values(c.right, env):
            if _cmp(c.op, a, b):
                return True
    return False


def _cmp(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    ka, kb = term_key(a), term_key(b)
    return {"<": ka < kb, "<=": ka <= kb, ">": ka > kb, ">=": ka >= kb}[op]


# -- public API ---------------------------------------------------------------------

def ground(view: Program, instance: InputInstance = InputInstance(), simplify: bool = True,
           atom_limit: int = DEFAULT_ATOM_LIMIT) -> GroundProgram:
    """Instantiate the rules of ``view`` (a program or prefix) for ``instance``."""
    rules = substitute_placeholders(view.rules, instance, view.input_spec.placeholder_names)
    g = _Grounder(rules, instance, view.input_spec.input_predicates, simplify, atom_limit)
    return g.run()


def possible_atoms(view: Program, instance: InputInstance = InputInstance()) -> set[Atom]:
    gp = ground(view, instance)
    return set(gp.atoms)


def herbrand_terms(view: Program, instance: InputInstance = InputInstance()) -> set:
    """Argument terms of every atom the full program can derive, plus instance terms."""
    full = view.full
    gp = ground(full, instance)
    terms = set()
    for a in gp.atoms:
        terms.update(a.args)
    for a in instance.facts:
        terms.update(a.args)
    terms.update(v for _, v in instance.bindings)
    return terms
