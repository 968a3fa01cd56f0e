"""Command-line front end: ``achieve {check,models,complete,corpus}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .checker import CheckReport, check, hamiltonian_correctness, in_projections
from .engine import EnumerationBudget, enumerate_stable_models
from .errors import AchieveError, BudgetExceeded
from .grounder import ground
from .model import InputInstance, Program
from .parser import parse_instance_file, parse_program_file

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3

# Instances small enough for full record checks; the rest are model-count only.
CORPUS_CHECKS = {
    "nqueens": ["n4"],
    "hamiltonian": ["triangle", "k4", "path3"],
    "obt": ["k1", "k2"],
    "sca": ["s3n2"],
    "borda": ["election"],
}


@dataclass
class CliConfig:
    command: str
    program_path: Optional[str] = None
    instance_paths: list[str] = field(default_factory=list)
    prefix_index: Optional[int] = None
    budget: EnumerationBudget = field(default_factory=EnumerationBudget)
    output_format: str = "text"
    dump_ground: bool = False
    exhaustive_crosscheck: bool = False


def corpus_dir() -> Path:
    env = os.environ.get("ACHIEVE_CORPUS_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files("achieve") / "corpus"))


def _resolve(path: str, program: Optional[str] = None) -> str:
    """Fall back to the bundled corpus for paths that do not exist locally."""
    if os.path.exists(path):
        return path
    base = os.path.basename(path)
    candidates = [corpus_dir() / base]
    if program:
        candidates.append(corpus_dir() / f"{program}-{base}")
    for c in candidates:
        if c.exists():
            return str(c)
    return path


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="achieve", description="Check records of achievement of ASP programs.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "check": "verify achievements and completeness of the record",
        "models": "list stable models of a prefix",
        "complete": "verify completeness of the record only",
        "corpus": "run the bundled corpus against stored oracle results",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        if name != "corpus":
            p.add_argument("program")
            p.add_argument("-i", "--instance", action="append", default=[], dest="instances")
            p.add_argument("--prefix", type=_positive_int)
        p.add_argument("--budget-candidates", type=_positive_int, default=EnumerationBudget.max_candidates)
        p.add_argument("--budget-models", type=_positive_int, default=EnumerationBudget.max_models)
        p.add_argument("--timeout", type=_positive_float)
        p.add_argument("--json", action="store_true")
        p.add_argument("--dump-ground", action="store_true")
        p.add_argument("--exhaustive-crosscheck", action="store_true")
    return ap


def config_from_args(argv: Optional[Sequence[str]] = None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    return CliConfig(
        command=ns.command,
        program_path=getattr(ns, "program", None),
        instance_paths=list(getattr(ns, "instances", [])),
        prefix_index=getattr(ns, "prefix", None),
        budget=EnumerationBudget(ns.budget_candidates, ns.budget_models, ns.timeout),
        output_format="json" if ns.json else "text",
        dump_ground=ns.dump_ground,
        exhaustive_crosscheck=ns.exhaustive_crosscheck,
    )


def _load(cfg: CliConfig) -> tuple[Program, list[InputInstance]]:
    program = parse_program_file(_resolve(cfg.program_path))
    spec = program.input_spec
    paths = [_resolve(p, program.name) for p in cfg.instance_paths]
    instances = [parse_instance_file(p, spec) for p in paths]
    if not instances:
        if spec.input_predicates or spec.placeholders:
            raise UsageError(f"{program.name} declares inputs; pass at least one -i/--instance")
        instances = [InputInstance(name="empty")]
    return program, instances


class UsageError(Exception):
    pass


def _emit(out, text: str) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def run(cfg: CliConfig, out=None) -> int:
    """Execute one command; returns the exit code."""
    out = out or sys.stdout
    try:
        if cfg.command == "corpus":
            return _run_corpus(cfg, out)
        program, instances = _load(cfg)
        if cfg.command == "models":
            return _run_models(cfg, program, instances, out)
        return _run_check(cfg, program, instances, out)
    except (AchieveError, UsageError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_USAGE


def _run_models(cfg: CliConfig, program: Program, instances: list[InputInstance], out) -> int:
    k = cfg.prefix_index or program.n
    view = program.prefix(k)
    results = []
    code = EXIT_OK
    for inst in instances:
        g = ground(view, inst)
        if cfg.dump_ground and cfg.output_format == "text":
            _emit(out, f"% ground program for {inst.name}\n{g.dump()}")
        try:
            models = enumerate_stable_models(g, cfg.budget)
            results.append({"instance": inst.name, "count": len(models),
                            "models": [[str(a) for a in m] for m in models]})
        except BudgetExceeded as e:
            code = EXIT_INCONCLUSIVE
            results.append({"instance": inst.name, "inconclusive": f"{e.kind} budget exceeded after {e.count}"})
        if cfg.dump_ground and cfg.output_format == "json":
            results[-1]["ground"] = g.dump().splitlines()
    if cfg.output_format == "json":
        _emit(out, json.dumps({"program": program.name, "prefix": k, "instances": results},
                              indent=2, sort_keys=True))
        return code
    for r in results:
        if "inconclusive" in r:
            _emit(out, f"{r['instance']}: inconclusive ({r['inconclusive']})")
            continue
        _emit(out, f"{r['instance']}: {r['count']} stable model(s) of prefix {k}")
        for i, m in enumerate(r["models"], 1):
            _emit(out, f"Model {i}: {{{', '.join(m)}}}")
    return code


def _run_check(cfg: CliConfig, program: Program, instances: list[InputInstance], out) -> int:
    indices = None
    if cfg.prefix_index is not None:
        if cfg.prefix_index not in program.record:
            raise UsageError(f"no annotation at prefix {cfg.prefix_index}")
        indices = [cfg.prefix_index]
    start = time.monotonic()
    report = check(program, instances, cfg.budget,
                   achievement=cfg.command == "check", completeness=True,
                   exhaustive_crosscheck=cfg.exhaustive_crosscheck, indices=indices)
    if cfg.output_format == "json":
        _emit(out, report.to_json())
    else:
        _emit(out, report.to_text())
        _emit(out, f"elapsed {time.monotonic() - start:.2f}s")
    return report.exit_code


def _run_corpus(cfg: CliConfig, out) -> int:
    root = corpus_dir()
    expected = json.loads((root / "expected.json").read_text())
    rows = []
    failed = inconclusive = False
    for prog_name in sorted(expected):
        program = parse_program_file(str(root / f"{prog_name}.lp"))
        for inst_name in sorted(expected[prog_name]):
            want = expected[prog_name][inst_name]
            path = root / f"{prog_name}-{inst_name}.facts"
            inst = parse_instance_file(str(path), program.input_spec) if path.exists() \
                else InputInstance(name=inst_name)
            row = {"program": prog_name, "instance": inst_name, "expected": want["models"]}
            try:
                models = enumerate_stable_models(ground(program, inst), cfg.budget)
            except BudgetExceeded as e:
                row.update(models="inconclusive", ok=False, reason=f"{e.kind} budget exceeded")
                inconclusive = True
                rows.append(row)
                continue
            ok = len(models) == want["models"]
            if "cycles" in want:
                ok = ok and hamiltonian_correctness(program, None, inst, cfg.budget)
                got = sorted(sorted([str(x), str(y)] for x, y in c) for c in in_projections(models))
                ok = ok and got == want["cycles"]
            if "winners" in want:
                winners = sorted(int(str(t[0])) for m in models for t in m.extension("winner", 1))
                scores = {str(c): s for m in models for c, s in m.extension("score", 2)}
                ok = ok and winners == want["winners"] and scores == want["scores"]
            row.update(models=len(models), ok=ok)
            if inst_name in CORPUS_CHECKS.get(prog_name, []):
                report: CheckReport = check(program, [inst], cfg.budget)
                row["record"] = report.exit_code
                if report.exit_code:
                    ok = False
                    row["ok"] = False
            failed = failed or not ok
            rows.append(row)
    if cfg.output_format == "json":
        _emit(out, json.dumps({"corpus": str(root.name), "results": rows}, indent=2, sort_keys=True))
    else:
        for r in rows:
            rec = ""
            if "record" in r:
                rec = "  record " + ("pass" if r["record"] == 0 else f"exit {r['record']}")
            _emit(out, f"{'ok  ' if r['ok'] else 'FAIL'} {r['program']}/{r['instance']}: "
                       f"{r['models']} model(s), expected {r['expected']}{rec}")
    return EXIT_FAIL if failed else EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
