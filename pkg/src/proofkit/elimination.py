"""Eliminating a rule from a derivation by repeated mimicking steps.

Each step picks one node of the rule ``r``, looks up the mimicking
derivation of its instance, and puts it in place of the node with the
node's premise subderivations grafted onto the matching assumption leaves.

Every step decreases the derivation in the multiset path ordering that
ranks ``r``-nodes above all other labels: the replacement only has
lower-ranked labels above the grafted premise subtrees, which are proper
subterms of the replaced node.  The trace records that check per step.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from .aphs import Aphs, NamedRule
from .derivation import (
    AssumptionLeaf,
    AxiomLeaf,
    Derivation,
    RuleNode,
    assumptions,
    check_derivation,
    conclusion,
    nodes,
    postorder,
    replace_at,
    rules_used,
    subtree,
    substitute_assumptions,
)
from .errors import BudgetExceeded, MimicryError, MissingMimicry

STRATEGIES = ("leftmost-innermost", "leftmost-outermost", "random")


@dataclass(frozen=True)
class Step:
    path: tuple
    instance: str
    count_before: int
    count_after: int
    mpo_decrease: bool

    @property
    def erased(self) -> int:
        """Rule nodes that vanished with a premise the mimicking derivation ignores."""
        return self.count_before - 1 - self.count_after


@dataclass(frozen=True)
class EliminationTrace:
    initial: Derivation
    steps: tuple
    final: Derivation

    @property
    def step_count(self) -> int:
        return len(self.steps)


def validate_mimicry(s: Aphs, r: NamedRule, table: dict) -> None:
    """Reject entries that mention ``r`` or are not mimicking derivations in ``s``."""
    for iid, d in sorted(table.items()):
        if r.name in rules_used(d):
            raise MimicryError(f"entry for {iid!r} uses the rule {r.name!r} itself")
        inst = r.rule.get_instance(iid, s.space)
        if inst is None:
            raise MimicryError(f"{iid!r} is not an instance of {r.name!r}")
        defects = check_derivation(s, d)
        if defects:
            raise MimicryError(f"entry for {iid!r} is invalid: {defects[0]}")
        if conclusion(d) != inst.concl:
            raise MimicryError(f"entry for {iid!r} concludes {conclusion(d)}, not {inst.concl}")
        if not assumptions(d) <= set(inst.prem):
            raise MimicryError(f"entry for {iid!r} uses assumptions outside the premises")


def _r_paths(d: Derivation, name: str, order: str) -> list[tuple]:
    walk = postorder(d) if order == "post" else nodes(d)
    return [p for p, n in walk if isinstance(n, RuleNode) and n.rule == name]


def _count(d: Derivation, name: str) -> int:
    return sum(1 for _, n in nodes(d) if isinstance(n, RuleNode) and n.rule == name)


def mimicking_step(s: Aphs, r: NamedRule, d: Derivation, path: tuple, table: dict) -> Derivation:
    node = subtree(d, path)
    entry = table.get(node.instance)
    if entry is None:
        raise MissingMimicry(node.instance)
    inst = r.rule.get_instance(node.instance, s.space)
    mapping = {}
    for prem, sub in zip(inst.prem, node.premises):
        mapping.setdefault(prem, sub)
    return replace_at(d, path, substitute_assumptions(entry, mapping))


def eliminate_rule(
    s: Aphs,
    r: NamedRule,
    d: Derivation,
    table: dict,
    strategy: str = "leftmost-innermost",
    seed: int = 0,
    max_steps: int = 100_000,
) -> EliminationTrace:
    """Remove every ``r``-node from ``d``; ``s`` is the system without ``r``."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    validate_mimicry(s, r, table)
    rng = random.Random(seed)
    order = "post" if strategy == "leftmost-innermost" else "pre"
    current, steps = d, []
    count = _count(d, r.name)
    while count:
        if len(steps) >= max_steps:
            raise BudgetExceeded(f"elimination did not finish in {max_steps} steps")
        paths = _r_paths(current, r.name, order)
        path = rng.choice(paths) if strategy == "random" else paths[0]
        node = subtree(current, path)
        new = mimicking_step(s, r, current, path, table)
        replaced = subtree(new, path)
        after = _count(new, r.name)
        steps.append(Step(path, node.instance, count, after, mpo_greater(node, replaced, r.name)))
        current, count = new, after
    return EliminationTrace(d, tuple(steps), current)


# -- multiset path ordering on derivations --------------------------------

def _label(d: Derivation):
    if isinstance(d, RuleNode):
        return ("rule", d.rule, d.instance, d.formula)
    if isinstance(d, AxiomLeaf):
        return ("axiom", d.name, d.formula)
    return ("assume", d.formula)


def _children(d: Derivation) -> tuple:
    return d.premises if isinstance(d, RuleNode) else ()


def _prec_greater(f: Derivation, g: Derivation, name: str) -> bool:
    # nodes of the eliminated rule rank above everything else; other labels
    # are only compared for equality
    return isinstance(f, RuleNode) and f.rule == name and not (isinstance(g, RuleNode) and g.rule == name)


def mpo_greater(s: Derivation, t: Derivation, name: str) -> bool:
    return _mpo(s, t, name)


@lru_cache(maxsize=65536)
def _mpo(s, t, name) -> bool:
    if s == t:
        return False
    if any(si == t or _mpo(si, t, name) for si in _children(s)):
        return True
    if _prec_greater(s, t, name):
        return all(_mpo(s, tj, name) for tj in _children(t))
    if _label(s) == _label(t):
        return _multiset_greater(list(_children(s)), list(_children(t)), name)
    return False


def _multiset_greater(ms: list, mt: list, name: str) -> bool:
    rest = list(mt)
    left = []
    for x in ms:
        if x in rest:
            rest.remove(x)
        else:
            left.append(x)
    if not left and not rest:
        return False
    return bool(left) and all(any(_mpo(x, y, name) for x in left) for y in rest)
