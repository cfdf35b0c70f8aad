"""Hilbert-style proof checking for ``.lipp`` scripts.

A script is a header followed by numbered lines ``n. formula ; justification``.
Formulas are kept as text and parsed at check time, so that a script with
``param`` declarations can be re-checked under other parameter values when
another script cites it.

Justifications::

    axiom NAME [{X=v, ...}]     instance of an axiom schema
    mp i, j                     modus ponens (either order)
    nec i                       necessitation of a hypothesis-free line
    antitone i                  epistemic antitonicity on a k-implication line
    pl [i, j, ...]              propositional consequence of the cited lines
    premise                     global premise of the theorem (top level only)
    hyp                         local hypothesis opening a begin-hyp block
    ldt i-j                     discharge of the block just closed
    reit i                      repeat a visible line
    by NAME [i, ...] [{X=v}]    instance of a registered theorem
    each X : JUSTIFICATION      line ``all[X : D] body``; every conjunct is checked
                                with the inner justification under X := member, and
                                cited ``each`` lines over X contribute their own conjunct
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from .axioms import SCHEMAS, SchemaError, infer_axiom, match_axiom
from .formulas import (FormulaParser, Knows, Proves, as_implication, conjoin,
                       expand_macros, format_formula, implies)
from .lexer import ParseError, tokenize
from .pattern import Matcher, marker_for, marker_key
from .pl import AtomBudgetExceeded, abstract_atoms, pl_entails
from .terms import Agent, agents_of, term_theory

PRESETS = ("base", "dy")
KINDS = ("msg", "formula", "agent", "community")


# -- script structure --------------------------------------------------------

@dataclass(frozen=True)
class Param:
    name: str
    kind: str
    default: str


@dataclass(frozen=True)
class ScriptLine:
    number: int
    formula: str
    justification: str
    path: tuple  # ids of the enclosing hypothesis blocks, outermost first
    source: int  # 1-based line in the file
    closes: int | None = None  # block id closed right before this line


@dataclass
class ProofScript:
    name: str
    theory: str = "base"
    agents: tuple = ()
    singleton: str | None = None
    designated: str | None = None
    params: list = field(default_factory=list)
    goal: str | None = None
    lines: list = field(default_factory=list)
    blocks: dict = field(default_factory=dict)  # id -> (first, last) line numbers
    unclosed: int = 0

    @property
    def param_kinds(self) -> dict:
        return {p.name: p.kind for p in self.params}

    @property
    def preset(self) -> str:
        return "base-singleton" if self.singleton else self.theory


class ScriptError(ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


_NUMBERED = re.compile(r"^(\d+)\s*\.\s*(.*)$")
_HEADER = re.compile(r"^(theory|agents|singleton-society|designated|param|goal)\b\s*(.*)$")


def _strip_comment(raw: str) -> str:
    i = raw.find("#")
    return raw if i < 0 else raw[:i]


def parse_script(text: str, name: str = "script") -> ProofScript:
    """Split a ``.lipp`` text into header and lines (formulas stay unparsed)."""
    script = ProofScript(name)
    entries: list = []  # [kind, source line, text]
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if line[:1].isspace() and entries and entries[-1][0] in ("line", "header"):
            entries[-1][2] += " " + stripped
            continue
        if stripped in ("begin-hyp", "end-hyp"):
            entries.append([stripped, no, ""])
        elif _NUMBERED.match(stripped):
            entries.append(["line", no, stripped])
        elif _HEADER.match(stripped):
            entries.append(["header", no, stripped])
        else:
            raise ScriptError(f"unrecognised line {stripped!r}", no)

    stack: list = []
    next_block = 0
    pending_close = None
    seen_line = False
    agents_given = False
    for kind, no, body in entries:
        if kind == "header":
            if seen_line:
                raise ScriptError("header after the first proof line", no)
            key, rest = _HEADER.match(body).groups()
            rest = rest.strip()
            if key == "theory":
                if rest not in PRESETS:
                    raise ScriptError(f"unknown theory {rest!r}", no)
                script.theory = rest
            elif key == "agents":
                names = re.fullmatch(r"\{\s*([a-z][\w]*(\s*,\s*[a-z][\w]*)*)\s*\}", rest)
                if not names:
                    raise ScriptError("agents must be a nonempty set {a,b,...}", no)
                script.agents = tuple(sorted({x.strip() for x in names.group(1).split(",")}))
                agents_given = True
            elif key == "singleton-society":
                if not re.fullmatch(r"[a-z]\w*", rest):
                    raise ScriptError("singleton-society needs one agent name", no)
                script.singleton = rest
            elif key == "designated":
                script.designated = rest
            elif key == "param":
                m = re.fullmatch(r"([A-Z]\w*)\s*:\s*(\w+)\s*=\s*(.+)", rest)
                if not m or m.group(2) not in KINDS:
                    raise ScriptError("param needs the form NAME : msg|formula|agent|community = default", no)
                if m.group(1) in script.param_kinds or m.group(1) in ("K", "CK"):
                    raise ScriptError(f"parameter name {m.group(1)} is not available", no)
                script.params.append(Param(m.group(1), m.group(2), m.group(3).strip()))
            else:
                script.goal = rest
        elif kind == "begin-hyp":
            stack.append(next_block)
            script.blocks[next_block] = (None, None)
            next_block += 1
        elif kind == "end-hyp":
            if not stack:
                raise ScriptError("end-hyp without begin-hyp", no)
            if pending_close is not None:
                raise ScriptError("discharge the inner block with ldt before closing another", no)
            block = stack.pop()
            if script.blocks[block][0] is None:
                raise ScriptError("empty hypothesis block", no)
            pending_close = block
        else:
            seen_line = True
            m = _NUMBERED.match(body)
            number = int(m.group(1))
            rest = m.group(2)
            if ";" not in rest:
                raise ScriptError("missing ';' before the justification", no)
            formula, just = rest.split(";", 1)
            script.lines.append(ScriptLine(number, formula.strip(), just.strip(),
                                           tuple(stack), no, pending_close))
            pending_close = None
            for block in stack:
                first, _ = script.blocks[block]
                script.blocks[block] = (number if first is None else first, number)
    if pending_close is not None:
        raise ScriptError("end-hyp must be followed by an ldt line", entries[-1][1])
    script.unclosed = len(stack)
    if script.singleton:
        if agents_given and set(script.agents) != {script.singleton}:
            raise ScriptError("a singleton society has exactly one agent", 1)
        script.agents = (script.singleton,)
    if not script.agents:
        raise ScriptError("no agents declared", 1)
    return script


# -- verdicts -------------------------------------------------------------------

@dataclass
class Verdict:
    accepted: bool
    theorem: object = None
    premises: tuple = ()
    line: int | None = None
    reason: str | None = None
    detail: str = ""
    designated: str | None = None

    def to_json(self) -> dict:
        out = {"accepted": self.accepted}
        if self.accepted:
            out["theorem"] = format_formula(self.theorem, self.designated)
            out["premises"] = [format_formula(p, self.designated) for p in self.premises]
        else:
            out.update(line=self.line, reason=self.reason, detail=self.detail)
        return out


class Rejected(Exception):
    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}")


@dataclass
class Theorem:
    name: str
    script: ProofScript
    premises: tuple
    conclusion: object
    pattern_premises: tuple
    pattern_conclusion: object
    modal_premises: bool  # necessitation/antitonicity was applied to premise-dependent lines


class Theory:
    """A named store of checked theorems, citable with ``by NAME``."""

    def __init__(self, name: str = "lip"):
        self.name = name
        self.theorems: dict = {}
        self._instances: dict = {}

    def __contains__(self, name):
        return name in self.theorems

    def admit(self, name: str, script) -> Verdict:
        """Check `script`; register it under `name` when accepted."""
        if name in self.theorems:
            raise ValueError(f"theorem name already registered: {name}")
        if isinstance(script, str):
            try:
                script = parse_script(script, name)
            except ScriptError as e:
                return Verdict(False, line=e.line, reason="parse-error", detail=str(e))
        verdict, modal = _check(self, script, {})
        if verdict.accepted:
            pat_premises, pat_conclusion = _pattern_forms(script)
            self.theorems[name] = Theorem(name, script, verdict.premises, verdict.theorem,
                                          pat_premises, pat_conclusion, modal)
        return verdict

    def register(self, name: str, script) -> "Theory":
        verdict = self.admit(name, script)
        if not verdict.accepted:
            raise ValueError(f"script {name} rejected at line {verdict.line}: "
                             f"{verdict.reason} ({verdict.detail})")
        return self

    def instance(self, name: str, bindings: dict) -> Verdict:
        key = (name, tuple(sorted(bindings.items(), key=lambda kv: kv[0])))
        hit = self._instances.get(key)
        if hit is None:
            thm = self.theorems[name]
            hit, _ = _check(self, thm.script, bindings)
            self._instances[key] = hit
        return hit


def register_theorem(theory: Theory, name: str, script) -> Theory:
    return theory.register(name, script)


# -- environments ----------------------------------------------------------------

class _Context:
    """Parsing context of a script under concrete parameter values."""

    def __init__(self, script: ProofScript, overrides: dict, pattern: bool = False):
        self.script = script
        self.theory = term_theory(script.theory)
        extra = set()
        for p in script.params:
            if p.name in overrides:
                v = overrides[p.name]
                if p.kind == "agent":
                    extra.add(v)
                elif p.kind == "community":
                    extra |= set(v)
                elif p.kind == "msg":
                    extra |= agents_of(v)
        self.agents = frozenset(script.agents) | extra
        self.env: dict = {}
        self.designated = None
        # formula defaults may mention `true`, which needs the designated agent
        ordered = sorted(script.params, key=lambda p: p.kind == "formula")
        for p in ordered:
            if p.kind == "formula" and self.designated is None:
                self.designated = self._designated()
            if pattern:
                self.env[p.name] = (p.kind, marker_for(p.name, p.kind))
            elif p.name in overrides:
                self.env[p.name] = (p.kind, overrides[p.name])
            else:
                try:
                    self.env[p.name] = (p.kind, self.parse_value(p.kind, p.default))
                except ParseError as e:
                    raise Rejected("parse-error", f"default of {p.name}: {e}") from e
        if self.designated is None:
            self.designated = self._designated()

    def _designated(self) -> str:
        d = self.script.designated
        if d is None:
            return min(self.script.agents)
        if d[:1].isupper():
            kind, value = self.env.get(d, (None, None))
            if kind != "agent":
                raise Rejected("parse-error", f"designated {d} is not an agent parameter")
            return value
        if d not in self.agents:
            raise Rejected("parse-error", f"designated agent {d} is not declared")
        return d

    def parser(self, text: str) -> FormulaParser:
        return FormulaParser(text, self.agents, self.theory, self.env,
                             allow_atoms=not self.script.singleton)

    def formula(self, text: str):
        p = self.parser(text)
        f = p.formula()
        p.ts.expect_end()
        return expand_macros(f, self.designated)

    def parse_value(self, kind: str, text: str):
        p = self.parser(text)
        if kind == "msg":
            v = p.message()
        elif kind == "formula":
            v = expand_macros(p.formula(), self.designated)
        elif kind == "agent":
            v = p.agent_name()
        else:
            v = p.community()
        p.ts.expect_end()
        return v


def _pattern_forms(script: ProofScript):
    ctx = _Context(script, {}, pattern=True)
    premises = tuple(ctx.formula(ln.formula) for ln in script.lines
                     if ln.justification.split()[:1] == ["premise"])
    return premises, ctx.formula(script.lines[-1].formula)


# -- justification syntax ------------------------------------------------------

def split_top_level(text: str) -> list[str]:
    """Split on commas that are not nested inside brackets of any kind."""
    parts, depth, start = [], 0, 0
    for tok in tokenize(text):
        if tok.kind == "end":
            break
        if tok.text in ("(", "[", "{", "<", ":["):
            depth += 1
        elif tok.text in (")", "]", "}", ">"):
            depth -= 1
        elif tok.text == "," and depth == 0:
            parts.append(text[start:tok.pos])
            start = tok.pos + 1
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


def _bindings_text(text: str) -> tuple[str, str | None]:
    """Separate a trailing ``{...}`` binding list from the rest."""
    text = text.strip()
    i = text.find("{")
    if i < 0:
        return text, None
    if not text.endswith("}"):
        raise Rejected("parse-error", "binding list must end with '}'")
    return text[:i].strip(), text[i + 1:-1]


def _parse_bindings(ctx: _Context, body: str | None, kinds: dict) -> dict:
    out = {}
    if body is None:
        return out
    for item in split_top_level(body):
        if "=" not in item:
            raise Rejected("parse-error", f"binding {item!r} needs NAME=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in kinds:
            raise Rejected("bad-binding", f"no parameter named {key}")
        try:
            out[key] = ctx.parse_value(kinds[key], value.strip())
        except ParseError as e:
            raise Rejected("bad-binding", f"{key}: {e}") from e
    return out


def _indices(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part.isdigit():
            raise Rejected("parse-error", f"bad line reference {part!r}")
        out.append(int(part))
    return out


# -- checking -------------------------------------------------------------------------

@dataclass
class _Line:
    formula: object
    path: tuple
    hyp: bool
    dep: bool  # depends on a premise
    var: str | None = None  # bound variable of an ``each`` line
    parts: dict | None = None  # member -> conjunct of an ``each`` line


def _own_name_facts(formulas: Iterable) -> list:
    atoms: dict = {}
    for f in formulas:
        abstract_atoms(f, atoms)
    return [a for a in atoms
            if isinstance(a, Knows) and a.msg == Agent(a.agent)]


def _compatible(cited: ProofScript, citing: ProofScript) -> bool:
    if cited.singleton:
        return citing.singleton == cited.singleton
    if cited.theory == "dy":
        return citing.theory == "dy"
    return True


def check_script(theory: Theory, script, bindings: dict | None = None) -> Verdict:
    """Check every line of `script`; the theorem is its final top-level line."""
    if isinstance(script, str):
        try:
            script = parse_script(script)
        except ScriptError as e:
            return Verdict(False, line=e.line, reason="parse-error", detail=str(e))
    return _check(theory, script, bindings or {})[0]


def _check(theory: Theory, script: ProofScript, overrides: dict):
    state = {"modal": False}
    try:
        ctx = _Context(script, overrides)
    except Rejected as r:
        return Verdict(False, line=0, reason=r.reason, detail=r.detail), False
    lines: dict = {}
    premises = []
    expected = 1
    current = None
    try:
        for ln in script.lines:
            current = ln
            if ln.number != expected:
                raise Rejected("numbering", f"expected line {expected}, found {ln.number}")
            expected += 1
            try:
                f = ctx.formula(ln.formula)
            except ParseError as e:
                raise Rejected("parse-error", str(e)) from e
            rec = _justify(theory, script, ctx, ln, f, lines, state)
            lines[ln.number] = rec
            if ln.justification.split()[:1] == ["premise"]:
                premises.append(f)
        current = script.lines[-1] if script.lines else None
        if current is None:
            raise Rejected("parse-error", "script has no proof lines")
        if script.unclosed:
            raise Rejected("unclosed-block", "begin-hyp without end-hyp")
        last = lines[current.number]
        if last.path:
            raise Rejected("unclosed-block", "the final line is inside a hypothesis block")
        if script.goal is not None:
            try:
                goal = ctx.formula(script.goal)
            except ParseError as e:
                raise Rejected("parse-error", f"goal: {e}") from e
            if goal != last.formula:
                raise Rejected("goal-mismatch", "final line differs from the declared goal")
    except Rejected as r:
        line = current.number if current is not None else 0
        return Verdict(False, line=line, reason=r.reason, detail=r.detail,
                       designated=ctx.designated), state["modal"]
    return (Verdict(True, last.formula, tuple(premises), designated=ctx.designated),
            state["modal"])


def _visible(lines: dict, ln: ScriptLine, i: int) -> _Line:
    if i not in lines or i >= ln.number:
        raise Rejected("bad-citation", f"line {i} is not an earlier line")
    rec = lines[i]
    if ln.path[:len(rec.path)] != rec.path:
        raise Rejected("not-visible", f"line {i} lies in a closed hypothesis block")
    return rec


def _justify(theory: Theory, script: ProofScript, ctx: _Context, ln: ScriptLine, f,
             lines: dict, state: dict) -> _Line:
    words = ln.justification.split(None, 1)
    if not words:
        raise Rejected("parse-error", "empty justification")
    rule, rest = words[0], (words[1] if len(words) > 1 else "")
    if ln.closes is not None and rule != "ldt":
        raise Rejected("ldt-mismatch", "a closed block must be discharged with ldt")
    dep = False

    if rule == "axiom":
        name, body = _bindings_text(rest)
        if name not in SCHEMAS:
            raise Rejected("unknown-schema", name)
        schema = SCHEMAS[name]
        if schema.dolev_yao and not ctx.theory.dolev_yao:
            raise Rejected("unknown-schema", f"{name} is not available in theory {script.theory}")
        given = _parse_bindings(ctx, body, schema.kinds)
        try:
            if len(given) == len(schema.params):
                ok = match_axiom(name, given, ctx.theory) == f
            else:
                ok = infer_axiom(name, f, ctx.theory, given) is not None
        except SchemaError as e:
            raise Rejected("axiom-mismatch", str(e)) from e
        if not ok:
            raise Rejected("axiom-mismatch", f"not an instance of {name}")

    elif rule == "mp":
        cited = _indices(rest)
        if len(cited) != 2:
            raise Rejected("parse-error", "mp cites two lines")
        x, y = (_visible(lines, ln, i) for i in cited)
        dep = x.dep or y.dep
        if not (x.formula == implies(y.formula, f) or y.formula == implies(x.formula, f)):
            raise Rejected("mp-mismatch", "cited lines are not φ -> ψ and φ with ψ this line")

    elif rule in ("nec", "antitone"):
        cited = _indices(rest)
        if len(cited) != 1:
            raise Rejected("parse-error", f"{rule} cites one line")
        src = _visible(lines, ln, cited[0])
        if src.path or src.hyp:
            raise Rejected("nec-depth", f"{rule} needs a line outside hypothesis blocks")
        dep = src.dep
        state["modal"] |= dep
        if rule == "nec":
            if not (isinstance(f, Proves) and f.goal == src.formula):
                raise Rejected("nec-mismatch",
                               "line is not a proof modality over the cited line")
        elif not _antitone_ok(src.formula, f):
            raise Rejected("antitone-mismatch",
                           "need k[a](M) -> k[a](M') cited and M' :[a,C] φ -> M :[a,C] φ")

    elif rule == "pl":
        cited = _indices(rest)
        recs = [_visible(lines, ln, i) for i in cited]
        dep = any(r.dep for r in recs)
        prem = [r.formula for r in recs]
        try:
            ok = pl_entails(prem + _own_name_facts(prem + [f]), f)
        except AtomBudgetExceeded as e:
            raise Rejected("pl-budget", str(e)) from e
        if not ok:
            raise Rejected("pl-not-entailed", "not a propositional consequence of the cited lines")

    elif rule == "premise":
        if ln.path:
            raise Rejected("bad-premise", "premises belong at the top level")
        dep = True

    elif rule == "hyp":
        if not ln.path:
            raise Rejected("bad-hyp", "hyp outside a hypothesis block")
        first, _ = script.blocks[ln.path[-1]]
        prev = [lines[i] for i in range(first, ln.number)]
        if any(not r.hyp or r.path != ln.path for r in prev):
            raise Rejected("bad-hyp", "hypotheses must open their block")
        return _Line(f, ln.path, True, False)

    elif rule == "ldt":
        m = re.fullmatch(r"\s*(\d+)\s*-\s*(\d+)\s*", rest)
        if not m:
            raise Rejected("parse-error", "ldt needs a range i-j")
        if ln.closes is None:
            raise Rejected("ldt-mismatch", "ldt must directly follow end-hyp")
        first, last = script.blocks[ln.closes]
        i, j = int(m.group(1)), int(m.group(2))
        if (i, j) != (first, last):
            raise Rejected("ldt-mismatch", f"the closed block spans {first}-{last}")
        block_path = ln.path + (ln.closes,)
        hyps = [lines[k].formula for k in range(first, last + 1)
                if lines[k].hyp and lines[k].path == block_path]
        end = lines[last]
        if end.path != block_path:
            raise Rejected("ldt-mismatch", "the block must end at its own depth")
        if not hyps:
            raise Rejected("ldt-mismatch", "block has no hypotheses")
        if f != implies(conjoin(hyps), end.formula):
            raise Rejected("ldt-mismatch", "line is not (hypotheses) -> last line")
        dep = any(lines[k].dep for k in range(first, last + 1))

    elif rule == "reit":
        cited = _indices(rest)
        if len(cited) != 1:
            raise Rejected("parse-error", "reit cites one line")
        src = _visible(lines, ln, cited[0])
        if src.formula != f:
            raise Rejected("reit-mismatch", "reiterated formula differs")
        dep = src.dep

    elif rule == "by":
        dep = _cite(theory, script, ctx, ln, f, lines, rest, state)

    elif rule == "each":
        return _each(theory, script, ctx, ln, f, lines, state, rest)

    else:
        raise Rejected("parse-error", f"unknown justification {rule!r}")
    return _Line(f, ln.path, False, dep)


def _each_parts(ctx: _Context, text: str, var: str) -> dict:
    """Per-member conjuncts of a line written ``all[X : D] body``."""
    p = ctx.parser(text)
    ts = p.ts
    if not (ts.at("all") and ts.at("[", 1)):
        raise Rejected("parse-error", "each needs a line of the form all[X : D] body")
    ts.next()
    ts.expect("[")
    bound = ts.expect_kind("upper", "a bound agent variable")
    if bound.text != var:
        raise Rejected("parse-error", f"each binds {var} but the line binds {bound.text}")
    ts.expect(":")
    community = p.community()
    ts.expect("]")
    if not community:
        raise Rejected("parse-error", "conjunction over an empty community")
    start = ts.i
    parts = {}
    saved = p.env.get(var)
    for member in sorted(community):
        ts.i = start
        p.env[var] = ("agent", member)
        body = p.unary()
        ts.expect_end()
        parts[member] = expand_macros(body, ctx.designated)
    if saved is None:
        p.env.pop(var, None)
    return parts


def _each(theory: Theory, script: ProofScript, ctx: _Context, ln: ScriptLine, f,
          lines: dict, state: dict, rest: str) -> _Line:
    m = re.fullmatch(r"\s*([A-Z]\w*)\s*:\s*(.+)", rest)
    if not m:
        raise Rejected("parse-error", "each needs the form each X : justification")
    var, inner = m.groups()
    if inner.split()[0] in ("each", "hyp", "premise", "ldt"):
        raise Rejected("parse-error", f"{inner.split()[0]} cannot be used under each")
    if var in ctx.env:
        raise Rejected("parse-error", f"{var} is already a parameter")
    try:
        parts = _each_parts(ctx, ln.formula, var)
    except ParseError as e:
        raise Rejected("parse-error", str(e)) from e
    if conjoin(parts.values()) != f:
        raise Rejected("parse-error", "line does not unfold to its conjuncts")
    dep = False
    try:
        for member, part in parts.items():
            ctx.env[var] = ("agent", member)
            view = {k: (replace(r, formula=r.parts[member])
                        if r.var == var and member in r.parts else r)
                    for k, r in lines.items()}
            sub = replace(ln, justification=inner)
            dep |= _justify(theory, script, ctx, sub, part, view, state).dep
    finally:
        ctx.env.pop(var, None)
    return _Line(f, ln.path, False, dep, var, parts)


def _antitone_ok(src, f) -> bool:
    pre = as_implication(src)
    post = as_implication(f)
    if pre is None or post is None:
        return False
    k1, k2 = pre
    p2, p1 = post
    if not (isinstance(k1, Knows) and isinstance(k2, Knows) and k1.agent == k2.agent):
        return False
    if not (isinstance(p1, Proves) and isinstance(p2, Proves)):
        return False
    return (p1.proof == k1.msg and p2.proof == k2.msg and p1.goal == p2.goal
            and p1.verifier == p2.verifier == k1.agent and p1.community == p2.community)


def _cite(theory: Theory, script: ProofScript, ctx: _Context, ln: ScriptLine, f,
          lines: dict, rest: str, state: dict) -> bool:
    head, body = _bindings_text(rest)
    parts = head.split(None, 1)
    if not parts:
        raise Rejected("parse-error", "by needs a theorem name")
    name = parts[0]
    thm = theory.theorems.get(name)
    if thm is None:
        raise Rejected("unknown-theorem", f"unknown theorem {name}")
    if not _compatible(thm.script, script):
        raise Rejected("unknown-theorem", f"{name} belongs to preset {thm.script.preset}")
    cited = _indices(parts[1].replace(" ", "") if len(parts) > 1 else "")
    recs = [_visible(lines, ln, i) for i in cited]
    if len(recs) != len(thm.pattern_premises):
        raise Rejected("citation-mismatch",
                       f"{name} has {len(thm.pattern_premises)} premise(s), {len(recs)} cited")
    if thm.modal_premises and any(r.path or r.hyp for r in recs):
        raise Rejected("nec-depth", f"{name} uses its premises modally; cite top-level lines")
    kinds = thm.script.param_kinds
    given = _parse_bindings(ctx, body, kinds)
    seed = {marker_key(k, kinds[k]): (frozenset(v) if kinds[k] == "community" else v)
            for k, v in given.items()}
    m = Matcher(seed)
    ok = all(m.match(p, r.formula) for p, r in zip(thm.pattern_premises, recs))
    ok = ok and m.match(thm.pattern_conclusion, f) and m.finish()
    if not ok:
        raise Rejected("citation-mismatch", f"cited lines and this line do not fit {name}")
    found = {}
    for p in thm.script.params:
        key = marker_key(p.name, p.kind)
        if key in m.b:
            found[p.name] = m.b[key]
    inst = theory.instance(name, found)
    if not inst.accepted:
        raise Rejected("citation-mismatch",
                       f"{name} does not check under these bindings "
                       f"(line {inst.line}: {inst.reason})")
    if inst.theorem != f or list(inst.premises) != [r.formula for r in recs]:
        raise Rejected("citation-mismatch", f"instance of {name} differs from the cited lines")
    dep = any(r.dep for r in recs)
    state["modal"] |= dep and thm.modal_premises
    return dep
