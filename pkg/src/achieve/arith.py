"""Evaluation of rule-AST terms to precomputed values."""

from __future__ import annotations

import itertools
from typing import Any, Mapping

from .model import BinOp, Interval, Pool, Symbol, TupleTerm, UnOp, Variable


def c_div(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _dedupe(values):
    seen = set()
    out = []
    for v in values:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def eval_values(t: Any, env: Mapping[str, Any] = {}) -> list:
    """All precomputed values ``t`` denotes under ``env``.

    Intervals and pools denote several values; undefined arithmetic (division by
    zero, arithmetic on symbols) denotes none.
    """
    if isinstance(t, (int, Symbol)) and not isinstance(t, bool):
        return [t]
    if isinstance(t, tuple):
        return [t]
    if isinstance(t, Variable):
        return [env[t.name]]
    if isinstance(t, BinOp):
        out = []
        for a in eval_values(t.left, env):
            for b in eval_values(t.right, env):
                if not (isinstance(a, int) and isinstance(b, int)):
                    continue
                if t.op == "+":
                    out.append(a + b)
                elif t.op == "-":
                    out.append(a - b)
                elif t.op == "*":
                    out.append(a * b)
                elif b == 0:
                    continue
                elif t.op == "/":
                    out.append(c_div(a, b))
                else:
                    out.append(a - b * c_div(a, b))
        return _dedupe(out)
    if isinstance(t, UnOp):
        vals = [v for v in eval_values(t.arg, env) if isinstance(v, int)]
        return _dedupe(abs(v) if t.op == "abs" else -v for v in vals)
    if isinstance(t, Interval):
        out = []
        for lo in eval_values(t.lo, env):
            for hi in eval_values(t.hi, env):
                if isinstance(lo, int) and isinstance(hi, int):
                    out.extend(range(lo, hi + 1))
        return _dedupe(out)
    if isinstance(t, Pool):
        return _dedupe(v for a in t.alternatives for v in eval_values(a, env))
    if isinstance(t, TupleTerm):
        parts = [eval_values(i, env) for i in t.items]
        return _dedupe(tuple(p) for p in itertools.product(*parts))
    raise TypeError(f"cannot evaluate term {t!r}")


def substitute(t: Any, mapping: Mapping[str, Any]) -> Any:
    """Replace symbolic constants named in ``mapping`` by their values."""
    if isinstance(t, Symbol):
        return mapping.get(t.name, t)
    if isinstance(t, tuple):
        return tuple(substitute(x, mapping) for x in t)
    if isinstance(t, BinOp):
        return BinOp(t.op, substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, UnOp):
        return UnOp(t.op, substitute(t.arg, mapping))
    if isinstance(t, Interval):
        return Interval(substitute(t.lo, mapping), substitute(t.hi, mapping))
    if isinstance(t, Pool):
        return Pool(tuple(substitute(a, mapping) for a in t.alternatives))
    if isinstance(t, TupleTerm):
        return TupleTerm(tuple(substitute(a, mapping) for a in t.items))
    return t


def is_simple(t: Any) -> bool:
    """True for terms that match without evaluation (variables, values, tuples of them)."""
    if isinstance(t, (Variable, int, Symbol, tuple)):
        return True
    if isinstance(t, TupleTerm):
        return all(is_simple(i) for i in t.items)
    return False


def match(pattern: Any, value: Any, env: dict) -> bool:
    """Unify a simple pattern with a precomputed value, extending ``env``."""
    if isinstance(pattern, Variable):
        if pattern.anonymous:
            return True
        got = env.get(pattern.name, _MISSING)
        if got is _MISSING:
            env[pattern.name] = value
            return True
        return got == value
    if isinstance(pattern, TupleTerm):
        if not isinstance(value, tuple) or len(value) != len(pattern.items):
            return False
        return all(match(p, v, env) for p, v in zip(pattern.items, value))
    return pattern == value


_MISSING = object()
