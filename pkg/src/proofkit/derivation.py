"""Prooftrees: axiom and assumption leaves, rule-instance nodes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .aphs import Aphs


@dataclass(frozen=True)
class AxiomLeaf:
    name: str
    formula: object


@dataclass(frozen=True)
class AssumptionLeaf:
    formula: object


@dataclass(frozen=True)
class RuleNode:
    rule: str
    instance: str
    formula: object
    premises: tuple = ()


Derivation = Union[AxiomLeaf, AssumptionLeaf, RuleNode]


@dataclass(frozen=True)
class Defect:
    path: tuple
    message: str

    def __str__(self):
        return f"{self.message} at path {list(self.path)}"


def conclusion(d: Derivation):
    return d.formula


def assumptions(d: Derivation) -> frozenset:
    """The set of assumption formulas; repeated leaves collapse."""
    return frozenset(leaf.formula for _, leaf in nodes(d) if isinstance(leaf, AssumptionLeaf))


def nodes(d: Derivation, path: tuple = ()) -> Iterator[tuple[tuple, Derivation]]:
    """Preorder walk yielding ``(path, node)``; paths are child-index tuples."""
    stack = [(path, d)]
    while stack:
        p, node = stack.pop()
        yield p, node
        if isinstance(node, RuleNode):
            for i in reversed(range(len(node.premises))):
                stack.append((p + (i,), node.premises[i]))


def postorder(d: Derivation, path: tuple = ()) -> Iterator[tuple[tuple, Derivation]]:
    if isinstance(d, RuleNode):
        for i, sub in enumerate(d.premises):
            yield from postorder(sub, path + (i,))
    yield path, d


def rule_nodes(d: Derivation, rule: str) -> list[tuple]:
    return [p for p, n in nodes(d) if isinstance(n, RuleNode) and n.rule == rule]


def count_rule(d: Derivation, rule: str) -> int:
    return len(rule_nodes(d, rule))


def rules_used(d: Derivation) -> set[str]:
    return {n.rule for _, n in nodes(d) if isinstance(n, RuleNode)}


def subtree(d: Derivation, path) -> Derivation:
    for i in path:
        d = d.premises[i]
    return d


def replace_at(d: Derivation, path, new: Derivation) -> Derivation:
    if not path:
        return new
    i = path[0]
    prem = list(d.premises)
    prem[i] = replace_at(prem[i], path[1:], new)
    return RuleNode(d.rule, d.instance, d.formula, tuple(prem))


def graft(d: Derivation, formula, replacement: Derivation) -> Derivation:
    """Replace every assumption leaf of ``formula`` by ``replacement``."""
    if isinstance(d, AssumptionLeaf):
        return replacement if d.formula == formula else d
    if isinstance(d, AxiomLeaf):
        return d
    return RuleNode(d.rule, d.instance, d.formula, tuple(graft(p, formula, replacement) for p in d.premises))


def substitute_assumptions(d: Derivation, mapping: dict) -> Derivation:
    if isinstance(d, AssumptionLeaf):
        return mapping.get(d.formula, d)
    if isinstance(d, AxiomLeaf):
        return d
    return RuleNode(d.rule, d.instance, d.formula, tuple(substitute_assumptions(p, mapping) for p in d.premises))


def depth(d: Derivation) -> int:
    if isinstance(d, RuleNode) and d.premises:
        return 1 + max(depth(p) for p in d.premises)
    return 1 if isinstance(d, RuleNode) else 0


def size(d: Derivation) -> int:
    return sum(1 for _ in nodes(d))


def check_derivation(s: Aphs, d: Derivation) -> list[Defect]:
    """Return the defects of ``d`` as a derivation in ``s``; empty means valid."""
    defects: list[Defect] = []
    space = s.space
    rules = {}
    for r in s.rules:
        rules.setdefault(r.name, r)
    for path, node in nodes(d):
        if not space.contains(node.formula):
            defects.append(Defect(path, f"formula {node.formula} outside F"))
            continue
        if isinstance(node, AssumptionLeaf):
            continue
        if isinstance(node, AxiomLeaf):
            axs = s.axioms_named(node.name)
            if not axs:
                defects.append(Defect(path, f"unknown axiom {node.name!r}"))
            elif not any(ax.covers(node.formula) for ax in axs):
                defects.append(Defect(path, f"{node.formula} is not an axiom named {node.name!r}"))
            continue
        named = rules.get(node.rule)
        if named is None:
            defects.append(Defect(path, f"unknown rule {node.rule!r}"))
            continue
        inst = named.rule.get_instance(node.instance, space)
        if inst is None:
            defects.append(Defect(path, f"{node.instance!r} is not an instance of {node.rule!r}"))
            continue
        if not all(space.contains(f) for f in inst.formulas()):
            defects.append(Defect(path, f"instance {node.instance!r} leaves F"))
            continue
        if len(node.premises) != inst.arity:
            defects.append(Defect(path, "arity mismatch"))
            continue
        if node.formula != inst.concl:
            defects.append(Defect(path, f"conclusion {node.formula} differs from instance conclusion {inst.concl}"))
        for i, (sub, want) in enumerate(zip(node.premises, inst.prem)):
            if sub.formula != want:
                defects.append(Defect(path + (i,), f"premise {i + 1} concludes {sub.formula}, instance needs {want}"))
    return defects


def is_valid(s: Aphs, d: Derivation) -> bool:
    return not check_derivation(s, d)


def render(d: Derivation, indent: str = "  ", fmt=str) -> str:
    """Indented prooftree, conclusion first, justification on the right."""
    lines = []

    def walk(node, level):
        pad = indent * level
        if isinstance(node, AxiomLeaf):
            lines.append(f"{pad}{fmt(node.formula)}    [axiom {node.name}]")
        elif isinstance(node, AssumptionLeaf):
            lines.append(f"{pad}{fmt(node.formula)}    [assumption]")
        else:
            lines.append(f"{pad}{fmt(node.formula)}    [{node.rule}: {node.instance}]")
            for p in node.premises:
                walk(p, level + 1)

    walk(d, 0)
    return "\n".join(lines)
