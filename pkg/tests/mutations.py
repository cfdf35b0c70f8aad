"""Seeded single-line mutations of proof scripts.

Three operators, each touching exactly one numbered line:

* ``index``: a cited line number is replaced by another line's number
  (an earlier one for exact-shape rules, a not yet visible one for ``pl``);
* ``schema``: the axiom schema or cited theorem name is swapped;
* ``formula``: the stated formula is negated.
"""

from __future__ import annotations

import random
import re

from lip.axioms import SCHEMAS

NUMBERED = re.compile(r"^(\s*)(\d+)(\s*\.\s*)(.*?)(\s*;\s*)(\S+)(.*)$")
OPERATORS = ("index", "schema", "formula", "index", "formula")


def numbered_lines(text: str) -> dict:
    """Line number -> (position in text lines, regex match)."""
    out = {}
    for pos, raw in enumerate(text.split("\n")):
        m = NUMBERED.match(raw)
        if m:
            out[int(m.group(2))] = (pos, m)
    return out


def _rebuild(m, formula=None, rule=None, rest=None) -> str:
    g = list(m.groups())
    if formula is not None:
        g[3] = formula
    if rule is not None:
        g[5] = rule
    if rest is not None:
        g[6] = rest
    return "".join(g)


def _replace_line(text: str, pos: int, new: str) -> str:
    lines = text.split("\n")
    lines[pos] = new
    return "\n".join(lines)


# rules whose premises must have an exact shape; `pl` tolerates extra or
# alternative premises, so moving one of its citations can leave a valid proof
EXACT_RULES = ("mp", "nec", "antitone", "reit", "by", "each", "ldt")


def mutate_index(text: str, rng: random.Random, names=()) -> str | None:
    lines = numbered_lines(text)
    formulas = {n: m.group(4).strip() for n, (_, m) in lines.items()}
    exact, loose = [], []
    for n, (pos, m) in lines.items():
        for cite in re.finditer(r"\d+", m.group(7)):
            (exact if m.group(6) in EXACT_RULES else loose).append((n, pos, m, cite))
    if not exact and not loose:
        return None
    n, pos, m, cite = rng.choice(exact or loose)
    old = int(cite.group())
    if exact:
        others = [k for k in lines if k != old and formulas[k] != formulas.get(old)]
        earlier = [k for k in others if k < n]
        choice = rng.choice(earlier or others or [n])
    else:
        # a line that is not visible yet: the citing line itself or a later one
        choice = rng.choice([k for k in lines if k >= n] + [max(lines) + 1])
    rest = m.group(7)
    rest = rest[:cite.start()] + str(choice) + rest[cite.end():]
    return _replace_line(text, pos, _rebuild(m, rest=rest))


def mutate_schema(text: str, rng: random.Random, names=()) -> str | None:
    lines = numbered_lines(text)
    candidates = []
    for n, (pos, m) in lines.items():
        rule = m.group(6)
        rest = m.group(7).split()
        if rule in ("axiom", "by") and rest:
            candidates.append((pos, m, rule, rest[0]))
    if not candidates:
        return None
    pos, m, rule, name = rng.choice(candidates)
    pool = sorted(SCHEMAS) if rule == "axiom" else sorted(names)
    pool = [x for x in pool if x != name]
    swapped = m.group(7).replace(name, rng.choice(pool), 1)
    return _replace_line(text, pos, _rebuild(m, rest=swapped))


def mutate_formula(text: str, rng: random.Random, names=()) -> str | None:
    lines = numbered_lines(text)
    if not lines:
        return None
    pos, m = lines[rng.choice(sorted(lines))]
    return _replace_line(text, pos, _rebuild(m, formula=f"~({m.group(4).strip()})"))


MUTATORS = {"index": mutate_index, "schema": mutate_schema, "formula": mutate_formula}


def mutations(text: str, seed: int, names=(), count: int = 5) -> list:
    """`count` (operator, mutated text) pairs; an inapplicable operator falls back to a formula edit."""
    rng = random.Random(seed)
    out = []
    for op in OPERATORS[:count]:
        mutated = MUTATORS[op](text, rng, names)
        if mutated is None or mutated == text:
            op = "formula"
            mutated = mutate_formula(text, rng, names)
        out.append((op, mutated))
    return out
