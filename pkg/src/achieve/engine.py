"""Stable models of ground programs.

Two independent routes are provided.  The reference route follows the textbook
definition: choice rules are translated into normal rules over fresh atoms, the
reduct is taken and its least model compared with the candidate.  The search
route guesses the truth of the *branch atoms* (choice atoms and atoms negated
inside their own component), derives everything else level by level, and
hands every consistent candidate to the reference check.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

import networkx as nx

from .errors import BudgetExceeded, UnsupportedAggregate
from .grounder import GroundAggregate, GroundChoice, GroundProgram, GroundRule, aggregate_value
from .model import FRESH_PREFIX, Atom, Interpretation, atom_key


@dataclass(frozen=True)
class EnumerationBudget:
    max_candidates: int = 5_000_000
    max_models: int = 1_000_000
    timeout: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.max_candidates <= 0 or self.max_models <= 0:
            raise ValueError("budget limits must be positive")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")


# -- choice translation, reduct, least models -----------------------------------------

@dataclass(frozen=True)
class CardinalityConstraint:
    """``lower <= |{elements true}| <= upper`` whenever the body holds."""

    pos: tuple
    neg: tuple
    aggs: tuple
    elements: tuple  # of GroundElement
    lower: int
    upper: Optional[int]
    index: int = 0


@dataclass
class TranslatedProgram:
    rules: list  # GroundRule with atom heads or constraints only
    cardinality: list
    fresh: dict  # fresh atom -> the choice atom it shadows


@dataclass(frozen=True)
class PositiveProgram:
    rules: tuple  # of (head Atom, body tuple of Atom)


def fresh_atom(rule_no: int, a: Atom) -> Atom:
    return Atom(f"{FRESH_PREFIX}{rule_no}_{a.pred}", a.args)


def translate_choice(g: GroundProgram) -> TranslatedProgram:
    """Replace every choice rule by normal rules over fresh atoms plus a cardinality check."""
    cached = g._cache.get("translated")
    if cached is not None:
        return cached
    rules, cards, fresh = [], [], {}
    for no, r in enumerate(g.rules):
        if not isinstance(r.head, GroundChoice):
            rules.append(r)
            continue
        for e in r.head.elements:
            f = fresh_atom(no, e.atom)
            fresh[f] = e.atom
            pos = r.pos + e.pos
            neg = r.neg + e.neg
            rules.append(GroundRule(r.index, e.atom, pos, neg + (f,), r.aggs))
            rules.append(GroundRule(r.index, f, pos, neg + (e.atom,), r.aggs))
        cards.append(CardinalityConstraint(r.pos, r.neg, r.aggs, r.head.elements,
                                           r.head.lower, r.head.upper, r.index))
    t = TranslatedProgram(rules, cards, fresh)
    g._cache["translated"] = t
    return t


def _body_holds(pos, neg, aggs, true_atoms) -> bool:
    return all(a in true_atoms for a in pos) and not any(a in true_atoms for a in neg) \
        and all(x.holds(true_atoms) for x in aggs)


def _count_true(elements, true_atoms) -> int:
    return len({e.atom for e in elements if e.atom in true_atoms
                and all(a in true_atoms for a in e.pos) and not any(a in true_atoms for a in e.neg)})


def completion_with_fresh(t: TranslatedProgram, I: Iterable[Atom]) -> set[Atom]:
    """``I`` plus the fresh atoms recording the choices ``I`` did not make."""
    base = set(I)
    out = set(base)
    for r in t.rules:
        if r.head in t.fresh and t.fresh[r.head] not in base and _body_holds(r.pos, r.neg, r.aggs, base):
            out.add(r.head)
    return out


def reduct(g, I: Iterable[Atom]) -> PositiveProgram:
    """Program reduct.  Choice rules are translated first.

    Aggregates are stratified, so they are evaluated in ``I`` like negated atoms.
    """
    t = g if isinstance(g, TranslatedProgram) else translate_choice(g)
    I = set(I)
    out = []
    for r in t.rules:
        if r.head is None:
            continue
        if any(a in I for a in r.neg):
            continue
        if not all(x.holds(I) for x in r.aggs):
            continue
        out.append((r.head, tuple(r.pos)))
    return PositiveProgram(tuple(out))


def least_model(rules: Iterable[tuple[Atom, tuple]]) -> set[Atom]:
    """Least model of a definite program by counter-based forward chaining."""
    rules = list(rules)
    missing = [len(set(body)) for _, body in rules]
    watch: dict[Atom, list[int]] = {}
    model: set[Atom] = set()
    queue = []
    for i, (head, body) in enumerate(rules):
        for b in set(body):
            watch.setdefault(b, []).append(i)
        if missing[i] == 0:
            queue.append(head)
    while queue:
        a = queue.pop()
        if a in model:
            continue
        model.add(a)
        for i in watch.get(a, ()):
            missing[i] -= 1
            if missing[i] == 0:
                queue.append(rules[i][0])
    return model


def minimal_model(p: PositiveProgram) -> Interpretation:
    return Interpretation(least_model(p.rules))


def is_stable_reference(g: GroundProgram, I: Iterable[Atom]) -> bool:
    """Stability by the definition: I* = lfp(reduct(translate_choice(g), I*)) plus constraints."""
    I = set(I)
    if any(a.is_fresh() for a in I) or not I <= g.atoms:
        return False
    t = translate_choice(g)
    star = completion_with_fresh(t, I)
    if least_model(reduct(t, star).rules) != star:
        return False
    for r in t.rules:
        if r.head is None and _body_holds(r.pos, r.neg, r.aggs, I):
            return False
    for c in t.cardinality:
        if _body_holds(c.pos, c.neg, c.aggs, I):
            n = _count_true(c.elements, I)
            if n < c.lower or (c.upper is not None and n > c.upper):
                return False
    return True


# -- compiled form ----------------------------------------------------------------------

class _Agg:
    __slots__ = ("func", "elements", "value")

    def __init__(self, func, elements, value):
        self.func = func
        self.elements = elements
        self.value = value

    def holds(self, true: set | list) -> bool:
        ws = [w for w, pos, neg in self.elements
              if all(true[a] for a in pos) and not any(true[a] for a in neg)]
        v = aggregate_value(self.func, ws)
        return v is not None and v == self.value


class Compiled:
    """Integer-indexed view of a ground program (choice rules kept as such)."""

    def __init__(self, g: GroundProgram):
        atoms = sorted(g.atoms, key=atom_key)
        self.atoms = atoms
        self.index = {a: i for i, a in enumerate(atoms)}
        self.keys = [atom_key(a) for a in atoms]
        ix = self.index
        self.rules = []  # (head, pos, neg, aggs) for atom heads
        self.constraints = []  # (pos, neg, aggs)
        self.choices = []  # (pos, neg, aggs, [(atom, pos, neg)], L, U)

        def agg(x: GroundAggregate) -> _Agg:
            return _Agg(x.func, tuple((w, tuple(ix[a] for a in p), tuple(ix[a] for a in n))
                                      for w, p, n in x.elements), x.value)

        for r in g.rules:
            pos = tuple(ix[a] for a in r.pos)
            neg = tuple(ix[a] for a in r.neg)
            aggs = tuple(agg(x) for x in r.aggs)
            if isinstance(r.head, Atom):
                self.rules.append((ix[r.head], pos, neg, aggs))
            elif isinstance(r.head, GroundChoice):
                elems = tuple((ix[e.atom], tuple(ix[a] for a in e.pos), tuple(ix[a] for a in e.neg))
                              for e in r.head.elements)
                self.choices.append((pos, neg, aggs, elems, r.head.lower, r.head.upper))
            else:
                self.constraints.append((pos, neg, aggs))
        self._definite_rules()

    def _definite_rules(self):
        n = len(self.atoms)
        # definite part used by the stability check: every rule's positive body,
        # every choice element's positive body
        self.watch = [[] for _ in range(n)]
        self.rule_bodies = []
        for head, pos, neg, aggs in self.rules:
            self.rule_bodies.append((head, tuple(set(pos)), neg, aggs, None))
        for ci, (pos, neg, aggs, elems, lo, hi) in enumerate(self.choices):
            for atom, epos, eneg in elems:
                self.rule_bodies.append((atom, tuple(set(pos + epos)), neg + eneg, aggs, atom))
        for i, (_, pos, _, _, _) in enumerate(self.rule_bodies):
            for a in pos:
                self.watch[a].append(i)

    def stable(self, true: list[bool]) -> bool:
        """Reference stability test on a boolean vector (fresh atoms handled implicitly)."""
        for pos, neg, aggs in self.constraints:
            if all(true[a] for a in pos) and not any(true[a] for a in neg) \
                    and all(x.holds(true) for x in aggs):
                return False
        for pos, neg, aggs, elems, lo, hi in self.choices:
            if all(true[a] for a in pos) and not any(true[a] for a in neg) \
                    and all(x.holds(true) for x in aggs):
                chosen = {a for a, ep, en in elems
                          if true[a] and all(true[b] for b in ep) and not any(true[b] for b in en)}
                if len(chosen) < lo or (hi is not None and len(chosen) > hi):
                    return False
        # least model of the reduct; a choice element `a :- B, not a'` survives iff a is true
        derived = [False] * len(self.atoms)
        missing = [-1] * len(self.rule_bodies)
        queue = []
        for i, (head, pos, neg, aggs, choice_atom) in enumerate(self.rule_bodies):
            if choice_atom is not None and not true[choice_atom]:
                continue
            if neg and any(true[a] for a in neg):
                continue
            if aggs and not all(x.holds(true) for x in aggs):
                continue
            if pos:
                missing[i] = len(pos)
            else:
                queue.append(head)
        watch = self.watch
        bodies = self.rule_bodies
        while queue:
            a = queue.pop()
            if derived[a]:
                continue
            if not true[a]:
                return False
            derived[a] = True
            for i in watch[a]:
                m = missing[i]
                if m > 0:
                    missing[i] = m - 1
                    if m == 1:
                        queue.append(bodies[i][0])
        return derived == true


def compiled(g: GroundProgram) -> Compiled:
    c = g._cache.get("compiled")
    if c is None:
        c = g._cache["compiled"] = Compiled(g)
    return c


def is_stable(g: GroundProgram, I: Iterable[Atom]) -> bool:
    """True iff ``I`` is a stable model of ``g`` (restricted to non-fresh atoms)."""
    c = compiled(g)
    true = [False] * len(c.atoms)
    for a in I:
        i = c.index.get(a)
        if i is None:
            return False
        true[i] = True
    return c.stable(true)


# -- stratification -------------------------------------------------------------------

def _rule_deps(r: GroundRule):
    deps = {a.signature for a in itertools.chain(r.pos, r.neg)}
    agg = {a.signature for x in r.aggs for a in x.atoms()}
    if isinstance(r.head, GroundChoice):
        for e in r.head.elements:
            deps |= {a.signature for a in itertools.chain(e.pos, e.neg)}
    return deps | agg, agg


def _predicate_levels(g: GroundProgram) -> tuple[dict, nx.DiGraph]:
    graph = nx.DiGraph()
    agg_edges = []
    for r in g.rules:
        heads = {a.signature for a in r.head_atoms()}
        deps, agg = _rule_deps(r)
        for h in heads:
            graph.add_node(h)
            for d in deps:
                graph.add_edge(d, h)
            for d in agg:
                agg_edges.append((d, h))
    cond = nx.condensation(graph)
    mapping = cond.graph["mapping"]
    for d, h in agg_edges:
        if mapping[d] == mapping[h]:
            raise UnsupportedAggregate(f"aggregate over {d[0]}/{d[1]} is recursive through {h[0]}/{h[1]}")
    level = {}
    for c in nx.topological_sort(cond):
        preds = list(cond.predecessors(c))
        level[c] = 1 + max((level[p] for p in preds), default=-1)
    return {sig: level[mapping[sig]] for sig in mapping}, graph


def stratify(g: GroundProgram) -> list[list[GroundRule]]:
    """Partition of the rules by predicate level; constraints form the last stratum.

    Raises :class:`UnsupportedAggregate` when an aggregate depends on its own head.
    """
    levels, _ = _predicate_levels(g)
    strata: dict[int, list[GroundRule]] = {}
    constraints = []
    for r in g.rules:
        if r.head is None:
            constraints.append(r)
            continue
        lv = max(levels[a.signature] for a in r.head_atoms()) if r.head_atoms() else 0
        strata.setdefault(lv, []).append(r)
    out = [strata[k] for k in sorted(strata)]
    if constraints:
        out.append(constraints)
    return out


# -- search ---------------------------------------------------------------------------

class _Search:
    def __init__(self, g: GroundProgram, budget: EnumerationBudget):
        self.g = g
        self.c = compiled(g)
        self.budget = budget
        c = self.c
        n = len(c.atoms)
        levels, graph = _predicate_levels(g)
        sig_level = levels
        self.atom_level = [sig_level.get(a.signature, 0) for a in c.atoms]
        heads = set()
        for head, *_ in c.rules:
            heads.add(head)
        choice_atoms = set()
        for pos, neg, aggs, elems, lo, hi in c.choices:
            for a, _, _ in elems:
                choice_atoms.add(a)
        branch = set(choice_atoms)
        for head, pos, neg, aggs in c.rules:
            for a in neg:
                if self.atom_level[a] == self.atom_level[head]:
                    branch.add(a)
        for pos, neg, aggs, elems, lo, hi in c.choices:
            for a, ep, en in elems:
                for b in neg + en:
                    if self.atom_level[b] == self.atom_level[a]:
                        branch.add(b)
        # atoms with no rule at all are false
        self.definable = heads | choice_atoms
        branch &= self.definable
        self.branch = sorted(branch)
        self.is_branch = [False] * n
        for b in self.branch:
            self.is_branch[b] = True
        # facts certain regardless of the guess
        self.certain = self._certain()
        self._levels_rules()
        self._clauses()

    def _certain(self) -> list[bool]:
        c = self.c
        out = [False] * len(c.atoms)
        changed = True
        while changed:
            changed = False
            for head, pos, neg, aggs in c.rules:
                if not out[head] and not neg and not aggs and all(out[a] for a in pos):
                    out[head] = True
                    changed = True
        return out

    def _levels_rules(self):
        c = self.c
        by_level: dict[int, list] = {}
        for head, pos, neg, aggs in c.rules:
            by_level.setdefault(self.atom_level[head], []).append((head, pos, neg, aggs, None))
        for pos, neg, aggs, elems, lo, hi in c.choices:
            for a, ep, en in elems:
                by_level.setdefault(self.atom_level[a], []).append((a, pos + ep, neg + en, aggs, a))
        self.level_rules = [by_level[k] for k in sorted(by_level)]

    def _lit_status(self, atom: int, want: bool):
        """Static truth of literal ``atom == want``: True, False, or an index into the branch vars."""
        if self.certain[atom]:
            return want
        if atom not in self.definable:
            return not want
        if self.is_branch[atom]:
            return None
        return "unknown"

    def _clauses(self):
        c = self.c
        self.clauses = []  # tuples of (atom, want): violated when all literals hold
        self.leaf_constraints = []
        for con in c.constraints:
            pos, neg, aggs = con
            lits = []
            dead = False
            static = not aggs
            for atom, want in itertools.chain(((a, True) for a in pos), ((a, False) for a in neg)):
                s = self._lit_status(atom, want)
                if s is True:
                    continue
                if s is False:
                    dead = True
                    break
                if s == "unknown":
                    static = False
                    break
                lits.append((atom, want))
            if dead:
                continue
            if static:
                self.clauses.append(tuple(lits))
            else:
                self.leaf_constraints.append(con)
        self.cards = []
        self.leaf_choices = []
        for ch in c.choices:
            pos, neg, aggs, elems, lo, hi = ch
            body_certain = not aggs and all(self.certain[a] for a in pos) and \
                all(a not in self.definable for a in neg)
            conds_certain = all(all(self.certain[b] for b in ep) and all(b not in self.definable for b in en)
                                for a, ep, en in elems)
            atoms = [a for a, _, _ in elems]
            if body_certain and conds_certain and len(set(atoms)) == len(atoms):
                self.cards.append((tuple(atoms), lo, hi))
            else:
                self.leaf_choices.append(ch)
        n = len(c.atoms)
        self.watch_clause = [[] for _ in range(n)]
        for i, cl in enumerate(self.clauses):
            for atom, _ in cl:
                self.watch_clause[atom].append(i)
        self.watch_card = [[] for _ in range(n)]
        for i, (atoms, lo, hi) in enumerate(self.cards):
            for a in atoms:
                self.watch_card[a].append(i)

    def run(self) -> list[Interpretation]:
        c = self.c
        n = len(c.atoms)
        self.val: list[Optional[bool]] = [None] * n
        self.card_true = [0] * len(self.cards)
        self.card_free = [len(a) for a, _, _ in self.cards]
        self.trail: list[int] = []
        self.models: list[Interpretation] = []
        self.candidates = 0
        self.start = time.monotonic()
        # empty clauses and impossible cardinalities fail outright
        if any(not cl for cl in self.clauses):
            return []
        for i, (atoms, lo, hi) in enumerate(self.cards):
            if len(atoms) < lo or (hi is not None and hi < 0):
                return []
        ok = True
        for i, (atoms, lo, hi) in enumerate(self.cards):
            ok = ok and self._check_card(i)
        for cl in self.clauses:
            if len(cl) == 1:
                ok = ok and self._assign(cl[0][0], not cl[0][1])
        if ok and self._propagate():
            self._dfs(0)
        return sorted(self.models)

    def _assign(self, atom: int, value: bool) -> bool:
        cur = self.val[atom]
        if cur is not None:
            return cur == value
        self.val[atom] = value
        self.trail.append(atom)
        self.queue.append(atom)
        for ci in self.watch_card[atom]:
            self.card_free[ci] -= 1
            if value:
                self.card_true[ci] += 1
        return True

    def _undo(self, mark: int):
        while len(self.trail) > mark:
            atom = self.trail.pop()
            value = self.val[atom]
            self.val[atom] = None
            for ci in self.watch_card[atom]:
                self.card_free[ci] += 1
                if value:
                    self.card_true[ci] -= 1

    def _check_card(self, ci: int) -> bool:
        atoms, lo, hi = self.cards[ci]
        t, f = self.card_true[ci], self.card_free[ci]
        if (hi is not None and t > hi) or t + f < lo:
            return False
        if hi is not None and t == hi and f:
            for a in atoms:
                if self.val[a] is None and not self._assign(a, False):
                    return False
        elif t + f == lo and f:
            for a in atoms:
                if self.val[a] is None and not self._assign(a, True):
                    return False
        return True

    queue: list

    def _propagate(self) -> bool:
        q = self.queue
        val = self.val
        while q:
            atom = q.pop()
            for ci in self.watch_clause[atom]:
                free = None
                nfree = 0
                for a, want in self.clauses[ci]:
                    v = val[a]
                    if v is None:
                        nfree += 1
                        free = (a, want)
                        if nfree > 1:
                            break
                    elif v != want:
                        nfree = -1
                        break
                if nfree == 0:
                    q.clear()
                    return False
                if nfree == 1:
                    if not self._assign(free[0], not free[1]):
                        q.clear()
                        return False
            for ci in self.watch_card[atom]:
                if not self._check_card(ci):
                    q.clear()
                    return False
        return True

    def _dfs(self, start: int):
        branch = self.branch
        val = self.val
        i = start
        while i < len(branch) and val[branch[i]] is not None:
            i += 1
        if i == len(branch):
            self._leaf()
            return
        atom = branch[i]
        for value in (True, False):
            mark = len(self.trail)
            self.queue = []
            if self._assign(atom, value) and self._propagate():
                self._dfs(i + 1)
            self._undo(mark)

    def _leaf(self):
        self.candidates += 1
        if self.candidates > self.budget.max_candidates:
            raise BudgetExceeded("candidates", len(self.models))
        if self.budget.timeout is not None and self.candidates % 512 == 0 \
                and time.monotonic() - self.start > self.budget.timeout:
            raise BudgetExceeded("timeout", len(self.models))
        c = self.c
        n = len(c.atoms)
        val = self.val
        guess = [bool(v) for v in val]
        true = [False] * n
        for rules in self.level_rules:
            self._close_level(rules, true, guess)
        for b in self.branch:
            if true[b] != guess[b]:
                return
        if not c.stable(true):
            return
        idx = [i for i in range(n) if true[i]]
        model = Interpretation.trusted([c.atoms[i] for i in idx], tuple(c.keys[i] for i in idx))
        self.models.append(model)
        if len(self.models) > self.budget.max_models:
            raise BudgetExceeded("models", len(self.models) - 1)

    def _close_level(self, rules, true, guess):
        # naive iteration is enough: levels are small and mostly non-recursive
        is_branch = self.is_branch
        pending = []
        for head, pos, neg, aggs, choice_atom in rules:
            if true[head] or (choice_atom is not None and not guess[choice_atom]):
                continue
            if neg and any((guess[a] if is_branch[a] else true[a]) for a in neg):
                continue
            if aggs and not all(x.holds(true) for x in aggs):
                continue
            if pos:
                pending.append((head, pos))
            else:
                true[head] = True
        changed = bool(pending)
        while changed:
            changed = False
            rest = []
            for head, pos in pending:
                if true[head]:
                    continue
                if all(true[a] for a in pos):
                    true[head] = True
                    changed = True
                else:
                    rest.append((head, pos))
            pending = rest


def enumerate_stable_models(g: GroundProgram, budget: Optional[EnumerationBudget] = None,
                            stats: Optional[dict] = None) -> list[Interpretation]:
    """All stable models of ``g`` in canonical order."""
    budget = budget or EnumerationBudget()
    s = _Search(g, budget)
    s.queue = []
    models = s.run()
    if stats is not None:
        stats["candidates"] = s.candidates
        stats["branch_atoms"] = len(s.branch)
    return models


def brute_force_stable_models(g: GroundProgram, budget: Optional[EnumerationBudget] = None,
                              reference: bool = True) -> list[Interpretation]:
    """Every subset of the atom universe, filtered by the stability check."""
    budget = budget or EnumerationBudget()
    universe = sorted((a for a in g.atoms if not a.is_fresh()), key=atom_key)
    total = 2 ** len(universe)
    if total > budget.max_candidates:
        raise BudgetExceeded("candidates", 0)
    check = is_stable_reference if reference else is_stable
    out = []
    for mask in range(total):
        subset = [universe[i] for i in range(len(universe)) if mask >> i & 1]
        if check(g, subset):
            out.append(Interpretation(subset))
            if len(out) > budget.max_models:
                raise BudgetExceeded("models", len(out) - 1)
    return sorted(out)
