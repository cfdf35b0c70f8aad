"""Axiom schemas, written in the formula syntax with upper-case parameters."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .formulas import CORE_TYPES, FormulaParser, expand_macros
from .lexer import ParseError
from .pattern import Matcher, marker_for, marker_key, subst
from .terms import BASE, DY, MESSAGE_TYPES, TermTheory


@dataclass(frozen=True)
class Schema:
    name: str
    params: tuple  # ((name, kind), ...)
    text: str
    dolev_yao: bool = False

    @property
    def kinds(self) -> dict:
        return dict(self.params)


_M = (("A", "agent"), ("M", "msg"))
_MM = (("A", "agent"), ("M", "msg"), ("M2", "msg"))
_PROOF = (("A", "agent"), ("C", "community"), ("M", "msg"), ("P", "formula"))

SCHEMAS = {s.name: s for s in [
    Schema("own-name", (("A", "agent"),), "k[A](A)"),
    Schema("sig-synthesis", _M, "k[A](M) -> k[A](sig[A](M))"),
    Schema("sig-analysis", (("A", "agent"), ("B", "agent"), ("M", "msg")),
           "k[A](sig[B](M)) -> k[A](<M,B>)"),
    Schema("pairing-iff", _MM, "(k[A](M) /\\ k[A](M2)) <-> k[A](<M,M2>)"),
    Schema("pairing", _MM, "(k[A](M) /\\ k[A](M2)) -> k[A](<M,M2>)"),
    Schema("unpairing", _MM, "k[A](<M,M2>) -> (k[A](M) /\\ k[A](M2))"),
    Schema("GK", (("A", "agent"), ("C", "community"), ("M", "msg"), ("M2", "msg"),
                  ("P", "formula"), ("P2", "formula")),
           "M :[A,{C}] (P -> P2) -> (M2 :[A,{C}] P -> <M,M2> :[A,{C}] P2)"),
    Schema("epistemic-truthfulness", _PROOF, "M :[A,{C}] P -> (k[A](M) -> P)"),
    Schema("peer-review", _PROOF,
           "M :[A,{C}] P -> all[X : {C, A}] sig[A](M) :[X,{C,A}] (k[A](M) /\\ M :[A,{C}] P)"),
    Schema("group-decomposition",
           (("A", "agent"), ("C", "community"), ("C2", "community"), ("M", "msg"),
            ("P", "formula")),
           "M :[A,{C,C2}] P -> M :[A,{C}] P"),
    Schema("hash", _M, "k[A](M) -> k[A](hash(M))", dolev_yao=True),
    Schema("enc", _MM, "k[A](<M,M2>) -> k[A](enc[M2](M))", dolev_yao=True),
    Schema("dec", _MM, "k[A](<enc[M2](M),M2>) -> k[A](M)", dolev_yao=True),
]}

BASE_SCHEMAS = tuple(n for n, s in SCHEMAS.items() if not s.dolev_yao)
DY_SCHEMAS = tuple(n for n, s in SCHEMAS.items() if s.dolev_yao)


class SchemaError(ValueError):
    pass


def _schema(name: str) -> Schema:
    s = SCHEMAS.get(name)
    if s is None:
        raise SchemaError(f"unknown axiom schema {name!r}")
    return s


@lru_cache(maxsize=None)
def schema_pattern(name: str, designated: str = "a"):
    """The schema as a formula with markers in place of its parameters."""
    s = _schema(name)
    env = {p: (k, marker_for(p, k)) for p, k in s.params}
    parser = FormulaParser(s.text, (), DY, env)
    f = parser.formula()
    parser.ts.expect_end()
    return expand_macros(f, designated)


def check_sort(name: str, kind: str, value, agents=None) -> None:
    ok = {
        "agent": isinstance(value, str),
        "community": isinstance(value, (frozenset, set)) and all(isinstance(x, str) for x in value),
        "msg": isinstance(value, MESSAGE_TYPES),
        "formula": isinstance(value, CORE_TYPES),
    }[kind]
    if not ok:
        raise SchemaError(f"binding for {name} must be of sort {kind}, got {value!r}")
    if agents is not None:
        names = {value} if kind == "agent" else set(value) if kind == "community" else set()
        bad = names - set(agents)
        if bad:
            raise SchemaError(f"binding for {name} names unknown agent(s) {sorted(bad)}")


def match_axiom(name: str, bindings: dict, theory: TermTheory = BASE, agents=None):
    """Instantiate schema `name`; every parameter must be bound with the right sort."""
    s = _schema(name)
    if s.dolev_yao and not theory.dolev_yao:
        raise SchemaError(f"axiom {name} is not part of the {theory.name} theory")
    missing = [p for p, _ in s.params if p not in bindings]
    if missing:
        raise SchemaError(f"missing binding for {', '.join(missing)} in {name}")
    extra = sorted(set(bindings) - set(s.kinds))
    if extra:
        raise SchemaError(f"{name} has no parameter {', '.join(extra)}")
    marker_binding = {}
    for p, k in s.params:
        v = bindings[p]
        check_sort(p, k, v, agents)
        marker_binding[marker_key(p, k)] = frozenset(v) if k == "community" else v
    return subst(schema_pattern(name), marker_binding)


def infer_axiom(name: str, target, theory: TermTheory = BASE, bindings: dict | None = None):
    """Bindings under which schema `name` yields exactly `target`, or None.

    Parameters the target does not determine (e.g. a community that only
    occurs together with its complement) fall back to the empty community.
    """
    s = _schema(name)
    if s.dolev_yao and not theory.dolev_yao:
        raise SchemaError(f"axiom {name} is not part of the {theory.name} theory")
    seed = {}
    for p, v in (bindings or {}).items():
        if p not in s.kinds:
            raise SchemaError(f"{name} has no parameter {p}")
        k = s.kinds[p]
        check_sort(p, k, v)
        seed[marker_key(p, k)] = frozenset(v) if k == "community" else v
    m = Matcher(seed)
    if not (m.match(schema_pattern(name), target) and m.finish()):
        return None
    out = {}
    for p, k in s.params:
        key = marker_key(p, k)
        if key in m.b:
            out[p] = m.b[key]
        elif k == "community":
            out[p] = frozenset()
        else:
            return None
    try:
        if match_axiom(name, out, theory) != target:
            return None
    except (SchemaError, ParseError, ValueError):
        return None
    return out
