"""Achievement and completeness checking of a program's record."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .assertions import (Context, RecordOfAchievement, a_star,
                         enumerate_satisfying, enumerate_satisfying_exhaustive, holds)
from .engine import EnumerationBudget, enumerate_stable_models, is_stable
from .errors import AssertionEvalError, BudgetExceeded, SpecViolation
from .grounder import ground, herbrand_terms
from .model import InputInstance, InputSpec, Interpretation, Program, preds, sig_str
from .oracles import hamiltonian_cycles

PASS, FAIL, INCONCLUSIVE, SKIPPED = "pass", "fail", "inconclusive", "skipped"


@dataclass
class Verdict:
    verdict: str
    counterexample: Optional[dict] = None
    reason: Optional[str] = None

    def as_json(self) -> dict:
        out: dict[str, Any] = {"verdict": self.verdict}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass
class AnnotationReport:
    index: int
    assertion: str
    achievement: Verdict = field(default_factory=lambda: Verdict(SKIPPED))
    completeness: Verdict = field(default_factory=lambda: Verdict(SKIPPED))


@dataclass
class CheckReport:
    program: str
    instances: list[str]
    annotations: list[AnnotationReport]
    stats: dict = field(default_factory=dict)

    def verdicts(self) -> list[str]:
        return [v.verdict for a in self.annotations for v in (a.achievement, a.completeness)]

    @property
    def exit_code(self) -> int:
        vs = self.verdicts()
        if FAIL in vs:
            return 1
        if INCONCLUSIVE in vs:
            return 2
        return 0

    def as_json(self) -> dict:
        return {
            "program": self.program,
            "instances": list(self.instances),
            "annotations": [{"index": a.index, "assertion": a.assertion,
                             "achievement": a.achievement.as_json(),
                             "completeness": a.completeness.as_json()}
                            for a in sorted(self.annotations, key=lambda a: a.index)],
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_json(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"program {self.program}: checked on {len(self.instances)} instance(s)"
                 + (f" ({', '.join(self.instances)})" if self.instances else "")]
        for a in sorted(self.annotations, key=lambda a: a.index):
            lines.append(f"[{a.index}] {a.assertion}")
            for label, v in (("achievement", a.achievement), ("completeness", a.completeness)):
                line = f"    {label}: {v.verdict}"
                if v.reason:
                    line += f" ({v.reason})"
                lines.append(line)
                if v.counterexample:
                    for key in sorted(v.counterexample):
                        val = v.counterexample[key]
                        if isinstance(val, list):
                            val = "{" + ", ".join(val) + "}"
                        lines.append(f"      {key}: {val}")
        return "\n".join(lines)


# -- inputs ---------------------------------------------------------------------

def validate_input(instance: InputInstance, spec: InputSpec) -> list[str]:
    """Violations of ``spec`` by ``instance``; empty when the input is valid."""
    violations = []
    for f in sorted(instance.facts, key=lambda a: str(a)):
        if f.signature not in spec.input_predicates:
            violations.append(f"fact {f} uses undeclared predicate {sig_str(f.signature)}")
    bound = instance.binding_map
    missing = [n for n in spec.placeholder_names if n not in bound]
    for name in missing:
        violations.append(f"placeholder {name} is unbound")
    universe = {t for f in instance.facts for t in f.args} | set(bound.values())
    conditions = [c for n, c in spec.placeholders if c is not None and n not in missing]
    conditions += [c for c in spec.assumptions if c is not None]
    for cond in conditions:
        ctx = Context(instance, (), universe, spec.input_predicates, spec.placeholder_names)
        try:
            ok = holds(cond, ctx, {})
        except AssertionEvalError as e:
            violations.append(f"{cond} cannot be evaluated: {e}")
            continue
        if not ok:
            violations.append(f"{cond} fails")
    return violations


def _require_valid(instances: Sequence[InputInstance], spec: InputSpec) -> None:
    for inst in instances:
        bad = validate_input(inst, spec)
        if bad:
            raise SpecViolation(f"instance {inst.name} is not a valid input: " + "; ".join(bad))


def _model_json(m: Interpretation) -> list[str]:
    return [str(a) for a in m]


def _budget_reason(e: BudgetExceeded) -> str:
    return f"{e.kind} budget exceeded after {e.count}"


class _InstanceData:
    """Per-instance caches shared by both judgments."""

    def __init__(self, program: Program, instance: InputInstance):
        self.instance = instance
        self.universe = sorted(herbrand_terms(program, instance), key=repr)
        self.known = preds(program.full)
        self.models: dict[int, list[Interpretation]] = {}
        self.grounded: dict[int, Any] = {}

    def ground(self, program: Program, k: int):
        if k not in self.grounded:
            self.grounded[k] = ground(program.prefix(k), self.instance)
        return self.grounded[k]

    def context(self, program: Program, S) -> Context:
        spec = program.input_spec
        return Context(self.instance, S, self.universe, spec.input_predicates,
                       spec.placeholder_names, self.known)


# -- achievements ------------------------------------------------------------------

def check_achievement(program: Program, record: Optional[RecordOfAchievement],
                      instances: Sequence[InputInstance], budget: Optional[EnumerationBudget] = None,
                      stats: Optional[dict] = None, _data: Optional[list] = None) -> dict[int, Verdict]:
    """Check that every recorded assertion holds in all stable models of every
    program between its prefix and the whole program, for each instance."""
    budget = budget or EnumerationBudget()
    record = program.record if record is None else record
    _require_valid(instances, program.input_spec)
    entries = record.as_dict()
    verdicts = {k: Verdict(PASS) for k in entries}
    inconclusive: dict[int, str] = {}
    data = _data or [_InstanceData(program, i) for i in instances]
    counts: dict[int, int] = {}
    for d in data:
        for kk in range(1, program.n + 1):
            pending = [k for k in entries if k <= kk and verdicts[k].verdict != FAIL]
            if not pending:
                continue
            try:
                models = d.models.get(kk)
                if models is None:
                    models = enumerate_stable_models(d.ground(program, kk), budget)
                    d.models[kk] = models
            except BudgetExceeded as e:
                for k in pending:
                    inconclusive.setdefault(k, f"prefix {kk}, instance {d.instance.name}: {_budget_reason(e)}")
                continue
            counts[kk] = counts.get(kk, 0) + len(models)
            for m in models:
                ctx = d.context(program, m)
                for k in pending:
                    if verdicts[k].verdict == FAIL:
                        continue
                    try:
                        ok = holds(entries[k], ctx, {})
                        reason = None
                    except AssertionEvalError as e:
                        ok, reason = False, f"assertion cannot be evaluated: {e}"
                    if not ok:
                        verdicts[k] = Verdict(FAIL, {"prefix": kk, "instance": d.instance.name,
                                                     "model": _model_json(m)}, reason)
    for k, why in inconclusive.items():
        if verdicts[k].verdict != FAIL:
            verdicts[k] = Verdict(INCONCLUSIVE, reason=why)
    if stats is not None:
        stats["models_per_prefix"] = {str(k): v for k, v in sorted(counts.items())}
    return verdicts


# -- completeness ----------------------------------------------------------------

def check_completeness(program: Program, record: Optional[RecordOfAchievement],
                       instances: Sequence[InputInstance], budget: Optional[EnumerationBudget] = None,
                       stats: Optional[dict] = None, exhaustive_crosscheck: bool = False,
                       indices: Optional[Iterable[int]] = None,
                       _data: Optional[list] = None) -> dict[int, Verdict]:
    """Check that every interpretation over the prefix's predicates satisfying
    the conjunction of the record up to that prefix is a stable model of it."""
    budget = budget or EnumerationBudget()
    record = program.record if record is None else record
    _require_valid(instances, program.input_spec)
    spec = program.input_spec
    data = _data or [_InstanceData(program, i) for i in instances]
    verdicts: dict[int, Verdict] = {}
    candidates: dict[str, int] = {}
    crosscheck: dict[str, str] = {}
    for k in (record.domain if indices is None else sorted(set(indices) & set(record.domain))):
        view = program.prefix(k)
        formula = a_star(record, k)
        verdict = Verdict(PASS) if data else Verdict(SKIPPED, reason="no instances")
        for d in data:
            st: dict = {}
            try:
                found = enumerate_satisfying(formula, d.instance, preds(view), d.universe, budget,
                                             spec.input_predicates, spec.placeholder_names, st)
            except BudgetExceeded as e:
                if verdict.verdict == PASS:
                    verdict = Verdict(INCONCLUSIVE, reason=f"instance {d.instance.name}: {_budget_reason(e)}")
                continue
            except AssertionEvalError as e:
                verdict = Verdict(FAIL, reason=f"assertion cannot be evaluated: {e}")
                break
            candidates[f"{k}/{d.instance.name}"] = st.get("candidates", 0)
            if exhaustive_crosscheck:
                key = f"{k}/{d.instance.name}"
                try:
                    ref = enumerate_satisfying_exhaustive(formula, d.instance, preds(view), d.universe, budget,
                                                          spec.input_predicates, spec.placeholder_names)
                    crosscheck[key] = "agree" if ref == found else "disagree"
                except BudgetExceeded:
                    crosscheck[key] = "budget exceeded"
                if crosscheck[key] == "disagree":
                    verdict = Verdict(INCONCLUSIVE, reason=f"instance {d.instance.name}: enumerators disagree")
                    continue
            g = d.ground(program, k)
            bad = next((I for I in found if not is_stable(g, I)), None)
            if bad is not None:
                verdict = Verdict(FAIL, {"prefix": k, "instance": d.instance.name,
                                         "interpretation": _model_json(bad)})
                break
        verdicts[k] = verdict
    if stats is not None:
        stats["candidates"] = dict(sorted(candidates.items()))
        if exhaustive_crosscheck:
            stats["crosscheck"] = dict(sorted(crosscheck.items()))
    return verdicts


def check(program: Program, instances: Sequence[InputInstance],
          budget: Optional[EnumerationBudget] = None, record: Optional[RecordOfAchievement] = None,
          achievement: bool = True, completeness: bool = True,
          exhaustive_crosscheck: bool = False, indices: Optional[Iterable[int]] = None) -> CheckReport:
    """Both judgments for every annotation (or those at ``indices``), assembled into a report."""
    record = program.record if record is None else record
    wanted = set(record.domain if indices is None else indices)
    _require_valid(instances, program.input_spec)
    data = [_InstanceData(program, i) for i in instances]
    stats: dict = {"instances_checked": len(instances),
                   "coverage": f"checked on {len(instances)} instance(s)"}
    reports = {k: AnnotationReport(k, str(a)) for k, a in record.entries if k in wanted}
    if achievement:
        only = RecordOfAchievement(tuple(e for e in record.entries if e[0] in wanted))
        for k, v in check_achievement(program, only, instances, budget, stats, data).items():
            reports[k].achievement = v
    if completeness:
        for k, v in check_completeness(program, record, instances, budget, stats,
                                       exhaustive_crosscheck, wanted, data).items():
            reports[k].completeness = v
    return CheckReport(program.name, [i.name for i in instances],
                       [reports[k] for k in sorted(reports)], stats)


# -- corollary --------------------------------------------------------------------

def in_projections(models: Iterable[Interpretation]) -> set[frozenset]:
    return {frozenset(m.extension("in", 2)) for m in models}


def hamiltonian_correctness(program: Program, record: Optional[RecordOfAchievement],
                            instance: InputInstance,
                            budget: Optional[EnumerationBudget] = None) -> bool:
    """Whether the in/2 projections of the stable models are exactly the graph's
    Hamiltonian cycles as found by permutation search."""
    _require_valid([instance], program.input_spec)
    models = enumerate_stable_models(ground(program, instance), budget)
    cycles = hamiltonian_cycles((t[0] for t in instance.extension("vertex", 1)),
                                instance.extension("edge", 2))
    return in_projections(models) == cycles
