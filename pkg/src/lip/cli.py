"""Command-line front end.

Exit codes: 0 success or a positive answer, 1 a negative answer (eval,
derive), 2 a rejected script or a property violation, 3 a usage, input or
I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .checker import EvalError, Query, parse_query
from .corpus import run_corpus
from .derivation import analysis_set, derives
from .kernel import ScriptError, Theory, check_script
from .lexer import ParseError
from .model import ModelError, load_model
from .sweeps import SUITES, run_suite
from .terms import format_message, parse_message, parse_message_list, term_theory
from .theories import PRESET_NAMES, PresetError, load_preset

OK, NO, REJECTED, ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None


# -- subcommands -----------------------------------------------------------------

def cmd_check(args) -> int:
    theory = Theory("check")
    if not args.no_corpus:
        run_corpus(theory=theory)
    results = []
    for path in args.scripts:
        text = _read(path)
        name = Path(path).stem
        verdict = check_script(theory, text)
        if verdict.accepted and name not in theory.theorems:
            theory.admit(name, text)
        results.append((path, verdict))
    if args.json:
        _emit([dict(v.to_json(), file=p) for p, v in results])
    else:
        for p, v in results:
            if v.accepted:
                print(f"{p}: accepted")
            else:
                print(f"{p}: rejected at line {v.line}: {v.reason}: {v.detail}")
    return OK if all(v.accepted for _, v in results) else REJECTED


def cmd_eval(args) -> int:
    try:
        model = load_model(args.model)
    except ModelError as e:
        raise UsageError(f"{args.model}: {e}") from None
    f = parse_query(model, args.formula)
    answer = Query(f, args.state, args.mode).answer(model)
    if args.json:
        _emit({"formula": args.formula, "mode": args.mode, "state": args.state,
               "value": answer})
    else:
        print("true" if answer else "false")
    return OK if answer else NO


def cmd_derive(args) -> int:
    theory = term_theory(args.theory)
    agents = {args.agent} | set(filter(None, (a.strip() for a in args.agents.split(","))))
    base = parse_message_list(_read(args.base), theory, agents)
    goal = parse_message(args.goal, theory, agents)
    ok = derives(args.agent, base, goal, theory)
    if args.json:
        _emit({"derivable": ok,
               "analysis_set": sorted(format_message(m)
                                      for m in analysis_set(args.agent, base, theory))})
    else:
        print("derivable" if ok else "not derivable")
    return OK if ok else NO


def cmd_sweep(args) -> int:
    preset = load_preset(args.preset)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("LIP_SEED", "0"))
    cfg = preset.sweep_config(seed=seed)
    bounds = {"models": args.models, "max_states": args.max_states,
              "max_agents": args.max_agents, "max_depth": args.max_depth}
    cfg = replace(cfg, **{k: v for k, v in bounds.items() if v is not None})
    if preset.singleton is not None:
        cfg = replace(cfg, max_agents=1)
    report = run_suite(args.suite, cfg)
    if args.json:
        _emit(report.to_json())
    else:
        total = sum(report.checks.values())
        print(f"{args.suite}: {report.models} models, {total} checks, "
              f"{len(report.violations)} violations")
        for v in report.violations[:20]:
            print(f"  {v.check} at {v.state}: {v.formula} (expected {v.expected}, got {v.got})")
    return OK if report.ok else REJECTED


def cmd_corpus(args) -> int:
    run = run_corpus()
    if args.json:
        _emit({"accepted": sum(r.verdict.accepted for r in run.results),
               "total": len(run.results),
               "scripts": [dict(r.verdict.to_json(), name=r.name) for r in run.results]})
    else:
        for r in run.results:
            v = r.verdict
            status = "accepted" if v.accepted else f"rejected at line {v.line}: {v.reason}"
            print(f"{r.name}: {status}")
        print(f"{len(run.results) - len(run.failures())}/{len(run.results)} accepted "
              f"in {run.seconds:.2f}s")
    return OK if run.ok else REJECTED


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lip", description="Check LiP proof scripts and evaluate LiP models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="check proof scripts (.lipp)")
    c.add_argument("scripts", nargs="+", metavar="SCRIPT")
    c.add_argument("--no-corpus", action="store_true",
                   help="do not make the shipped theorems citable")
    c.add_argument("--json", action="store_true")
    c.set_defaults(run=cmd_check)

    e = sub.add_parser("eval", help="evaluate a formula on a model (.lipm)")
    e.add_argument("--model", required=True)
    e.add_argument("--state", help="state id; omit for truth at every state")
    e.add_argument("--formula", required=True)
    e.add_argument("--mode", choices=("persistent", "instant"), default="persistent")
    e.add_argument("--json", action="store_true")
    e.set_defaults(run=cmd_eval)

    d = sub.add_parser("derive", help="decide message derivability")
    d.add_argument("--agent", required=True)
    d.add_argument("--agents", default="", help="further agent names, comma-separated")
    d.add_argument("--base", required=True, help="file of comma- or newline-separated messages")
    d.add_argument("--goal", required=True)
    d.add_argument("--theory", choices=("base", "dy"), default="base")
    d.add_argument("--json", action="store_true")
    d.set_defaults(run=cmd_derive)

    s = sub.add_parser("sweep", help="run a randomised property sweep")
    s.add_argument("--suite", choices=sorted(SUITES), default="soundness")
    s.add_argument("--preset", choices=PRESET_NAMES, default="base")
    s.add_argument("--seed", type=int, help="default 0, or LIP_SEED when set")
    s.add_argument("--models", type=int)
    s.add_argument("--max-states", type=int)
    s.add_argument("--max-agents", type=int)
    s.add_argument("--max-depth", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(run=cmd_sweep)

    k = sub.add_parser("corpus", help="check every shipped proof script")
    k.add_argument("--json", action="store_true")
    k.set_defaults(run=cmd_corpus)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except UsageError as e:
        print(f"lip: error: {e}", file=sys.stderr)
    except ParseError as e:
        print(f"lip: parse error: {e}", file=sys.stderr)
    except (EvalError, PresetError, ScriptError, ValueError, KeyError) as e:
        print(f"lip: error: {e.args[0] if e.args else e}", file=sys.stderr)
    except OSError as e:
        print(f"lip: {e}", file=sys.stderr)
    return ERROR


def main() -> None:
    sys.exit(run())
