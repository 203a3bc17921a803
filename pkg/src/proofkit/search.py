"""Bounded forward chaining: consequence, theoremhood, theorem sets.

The closure is computed level by level; a formula's witness derivation is
the justification recorded when it first appears, so witnesses have
minimal depth and depend only on the system, assumptions and budget.
A run that ends with a round deriving nothing new is saturated: every
formula of the budgeted universe that is derivable has been found.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .aphs import Aphs, Budget, fact_keys
from .derivation import AssumptionLeaf, AxiomLeaf, Derivation, RuleNode


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value

    @property
    def decided(self) -> bool:
        return self is not Verdict.UNKNOWN


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    witness: Derivation | None = None

    def __bool__(self):
        raise TypeError("use .verdict; a Decision is three-valued")


@dataclass(frozen=True)
class Proved:
    derivation: Derivation
    depth: int


@dataclass(frozen=True)
class NotProvedWithinBudget:
    saturated: bool


@dataclass(frozen=True)
class TheoremSet:
    formulas: frozenset
    saturated: bool


class FactIndex:
    def __init__(self):
        self._level: dict = {}
        self._levels: list[list] = []
        self._by_key = defaultdict(list)
        self.order: list = []

    def __len__(self):
        return len(self._level)

    def __contains__(self, f):
        return f in self._level

    def add(self, f, level: int):
        self._level[f] = level
        while len(self._levels) <= level:
            self._levels.append([])
        self._levels[level].append(f)
        self.order.append(f)
        for k in fact_keys(f):
            self._by_key[k].append(f)

    def level_of(self, f):
        return self._level.get(f)

    def at_level(self, level: int) -> list:
        if level < len(self._levels):
            return self._levels[level]
        return []

    def candidates(self, key):
        if key is None:
            return self.order
        if key[0] == "=":
            return [key[1]] if key[1] in self._level else []
        return self._by_key.get(key, ())


class Closure:
    """Forward-chaining closure of axioms and ``assumptions`` under the rules."""

    def __init__(self, system: Aphs, assumptions=(), budget: Budget = Budget()):
        self.system = system
        self.budget = budget
        self.universe = system.universe(budget)
        self.index = FactIndex()
        self.justification: dict = {}
        self.rounds = 0
        self.saturated = False
        self.exhausted = False
        self._trees: dict = {}
        for f in sorted(set(assumptions), key=system.space.sort_key):
            self._add(f, 0, ("assume",))
        for ax in system.axioms:
            for f in ax.instances(self.universe):
                if f not in self.index:
                    self._add(f, 0, ("axiom", ax.name))

    def _add(self, f, level, just):
        self.index.add(f, level)
        self.justification[f] = just

    def _fire(self, level: int, commit: bool) -> int:
        pending: dict = {}
        cap = self.budget.max_nodes_expanded
        for named in self.system.rules:
            for inst in named.rule.fire(self.index, level, self.universe):
                c = inst.concl
                if c in self.index or c in pending:
                    continue
                if not commit:
                    return 1
                pending[c] = ("rule", named.name, inst)
                if len(self.index) + len(pending) >= cap:
                    self.exhausted = True
                    break
            if self.exhausted:
                break
        for c, just in pending.items():
            self._add(c, level + 1, just)
        return len(pending)

    def step(self) -> int:
        new = self._fire(self.rounds, commit=True)
        if new:
            self.rounds += 1
        elif not self.exhausted:
            self.saturated = True
        return new

    def run(self, goal=None) -> "Closure":
        while not (self.saturated or self.exhausted):
            if goal is not None and goal in self.index:
                break
            if self.rounds >= self.budget.max_depth:
                if not self._fire(self.rounds, commit=False):
                    self.saturated = True
                break
            self.step()
        return self

    @property
    def facts(self) -> frozenset:
        return frozenset(self.index.order)

    def derivation(self, f) -> Derivation:
        if f in self._trees:
            return self._trees[f]
        just = self.justification[f]
        if just[0] == "assume":
            tree = AssumptionLeaf(f)
        elif just[0] == "axiom":
            tree = AxiomLeaf(just[1], f)
        else:
            _, name, inst = just
            tree = RuleNode(name, inst.id, f, tuple(self.derivation(p) for p in inst.prem))
        self._trees[f] = tree
        return tree


@lru_cache(maxsize=4096)
def _saturate(system: Aphs, assumptions: frozenset, budget: Budget) -> Closure:
    return Closure(system, assumptions, budget).run()


def closure(system: Aphs, assumptions=(), budget: Budget = Budget()) -> Closure:
    """Closure run to saturation or budget exhaustion (memoized)."""
    return _saturate(system, frozenset(assumptions), budget)


def derives(s: Aphs, gamma, goal, b: Budget = Budget()):
    """Search for a derivation of ``goal`` whose assumptions lie in ``gamma``."""
    c = Closure(s, gamma, b).run(goal)
    if goal in c.index:
        return Proved(c.derivation(goal), c.index.level_of(goal))
    return NotProvedWithinBudget(c.saturated)


def consequence(s: Aphs, gamma, goal, b: Budget = Budget()) -> Decision:
    result = derives(s, gamma, goal, b)
    if isinstance(result, Proved):
        return Decision(Verdict.YES, result.derivation)
    return Decision(Verdict.NO if result.saturated else Verdict.UNKNOWN)


def is_theorem(s: Aphs, formula, b: Budget = Budget()) -> Decision:
    return consequence(s, (), formula, b)


def theorem_set(s: Aphs, b: Budget = Budget()) -> TheoremSet:
    c = closure(s, (), b)
    return TheoremSet(c.facts, c.saturated)
