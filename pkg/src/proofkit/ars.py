"""Abstract rewriting systems with first-class steps.

Steps carry their own identity, so two steps with the same source and
target stay distinct; the reduction relation is only their projection.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import IllFormedRule, UnknownObject
from .terms import Signature, Term, enumerate_terms, match_scheme, apply_substitution, scheme_vars


@dataclass(frozen=True)
class ArsStep:
    id: str
    src: object
    tgt: object
    label: str | None = None


class Ars:
    def __init__(self, objects: Iterable, steps: Iterable[ArsStep]):
        self.objects = tuple(dict.fromkeys(objects))
        self._objset = frozenset(self.objects)
        self.steps = tuple(steps)
        ids = set()
        for st in self.steps:
            if st.id in ids:
                raise ValueError(f"duplicate step id {st.id!r}")
            ids.add(st.id)
            for end in (st.src, st.tgt):
                if end not in self._objset:
                    raise UnknownObject(f"step {st.id!r} refers to undeclared object {end}")

    def __contains__(self, obj):
        return obj in self._objset

    def _require(self, obj):
        if obj not in self._objset:
            raise UnknownObject(f"unknown object {obj}")


def induced_relation(ars: Ars) -> frozenset:
    return frozenset((st.src, st.tgt) for st in ars.steps)


def steps_between(ars: Ars, a, b) -> list[ArsStep]:
    ars._require(a)
    ars._require(b)
    return [st for st in ars.steps if st.src == a and st.tgt == b]


def positions(t: Term, prefix: tuple = ()):
    yield prefix, t
    for i, a in enumerate(t.args):
        yield from positions(a, prefix + (i + 1,))


def replace_at(t: Term, pos: tuple, new: Term) -> Term:
    if not pos:
        return new
    i = pos[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], new)
    return Term(t.head, tuple(args))


def format_position(pos: tuple) -> str:
    return ".".join(str(i) for i in pos) if pos else "ε"


def trs_step_expansion(sig: Signature, lhs, rhs, universe_bound: int, label: str | None = None) -> Ars:
    """Materialize the steps of the rule ``lhs -> rhs`` on all terms up to a size.

    One step per (source term, redex position); the id is
    ``source@position``.  Steps whose target leaves the universe are dropped.
    """
    if not scheme_vars(rhs) <= scheme_vars(lhs):
        raise IllFormedRule("right-hand side has variables not in the left-hand side")
    objects = enumerate_terms(sig, universe_bound)
    objset = set(objects)
    steps = []
    for t in objects:
        for pos, sub in positions(t):
            sigma = match_scheme(lhs, sub)
            if sigma is None:
                continue
            tgt = replace_at(t, pos, apply_substitution(rhs, sigma))
            if tgt in objset:
                steps.append(ArsStep(f"{t}@{format_position(pos)}", t, tgt, label))
    return Ars(objects, steps)


def reachable(ars: Ars, a, max_steps: int) -> frozenset:
    ars._require(a)
    succ: dict = {}
    for st in ars.steps:
        succ.setdefault(st.src, []).append(st.tgt)
    seen = {a}
    frontier = [a]
    for _ in range(max_steps):
        nxt = []
        for x in frontier:
            for y in succ.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return frozenset(seen)
