"""Propositional entailment by truth tables over abstracted atoms.

Every maximal subformula that is not a negation or conjunction is treated
as an opaque propositional atom.  Valuations are enumerated bit-parallel:
atom i is a column of 2**n bits packed into one Python int.
"""

from __future__ import annotations

from .formulas import And, Not

ATOM_BUDGET = 24


class AtomBudgetExceeded(ValueError):
    pass


def abstract_atoms(f, out: dict) -> None:
    """Collect the opaque atoms of `f` into `out` (insertion-ordered)."""
    stack = [f]
    while stack:
        g = stack.pop()
        t = type(g)
        if t is Not:
            stack.append(g.body)
        elif t is And:
            stack.append(g.right)
            stack.append(g.left)
        elif g not in out:
            out[g] = len(out)


def _columns(n: int) -> tuple[list[int], int]:
    rows = 1 << n
    full = (1 << rows) - 1
    cols = []
    for i in range(n):
        # column i: blocks of 2**i zeros then 2**i ones, repeated
        block = ((1 << (1 << i)) - 1) << (1 << i)
        period = 1 << (i + 1)
        pattern = block
        width = period
        while width < rows:
            pattern |= pattern << width
            width *= 2
        cols.append(pattern & full)
    return cols, full


def _eval(f, atoms: dict, cols: list, full: int, memo: dict) -> int:
    hit = memo.get(f)
    if hit is not None:
        return hit
    t = type(f)
    if t is Not:
        v = full ^ _eval(f.body, atoms, cols, full, memo)
    elif t is And:
        v = _eval(f.left, atoms, cols, full, memo) & _eval(f.right, atoms, cols, full, memo)
    else:
        v = cols[atoms[f]]
    memo[f] = v
    return v


def pl_entails(premises, conclusion, budget: int = ATOM_BUDGET) -> bool:
    """True iff the conjunction of `premises` tautologically implies `conclusion`."""
    atoms: dict = {}
    for p in premises:
        abstract_atoms(p, atoms)
    abstract_atoms(conclusion, atoms)
    if len(atoms) > budget:
        raise AtomBudgetExceeded(
            f"{len(atoms)} propositional atoms exceed the budget of {budget}")
    cols, full = _columns(len(atoms))
    memo: dict = {}
    rows = full
    for p in premises:
        rows &= _eval(p, atoms, cols, full, memo)
        if not rows:
            return True
    return rows & ~_eval(conclusion, atoms, cols, full, memo) == 0


def is_tautology(f, budget: int = ATOM_BUDGET) -> bool:
    return pl_entails([], f, budget)
