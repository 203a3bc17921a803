"""Abstract pure Hilbert systems: instances, unnamed rules, named systems.

A rule is a set of instances, each with its own identity; two instances
may share premises and conclusion and still be different.  Rules are backed
either by an explicit finite list or by schemes whose instances are
generated by substitution over a bounded universe of formulas.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .errors import IllFormedRule, NameClash, ParseError
from .terms import (
    Signature,
    Symbol,
    Term,
    TermUniverse,
    Var,
    apply_substitution,
    bounded_assignments,
    format_substitution,
    match_into,
    parse_scheme,
    parse_term,
    partial_apply,
    scheme_vars,
    size_profile,
    term_key,
    well_formed,
)


# -- formula spaces -------------------------------------------------------

class TermSpace:
    """The formula set F: ground terms over a signature, optionally size-bounded."""

    kind = "term"

    def __init__(self, signature: Signature, max_size: int | None = None):
        self.signature = signature
        self.max_size = max_size

    def contains(self, f) -> bool:
        return (
            isinstance(f, Term)
            and f.ground
            and (self.max_size is None or f.size <= self.max_size)
            and well_formed(f, self.signature)
        )

    def universe(self, bound: int) -> TermUniverse:
        if self.max_size is not None:
            bound = min(bound, self.max_size)
        return TermUniverse(self.signature, bound)

    def covered_by(self, bound: int) -> bool:
        """True if the budgeted universe is all of F."""
        return self.max_size is not None and self.max_size <= bound

    def parse(self, text: str) -> Term:
        return parse_term(text, self.signature)

    def parse_pattern(self, text: str):
        return parse_scheme(text, self.signature)

    def parse_binding(self, var: Var, text: str):
        return parse_term(text, self.signature)

    def format(self, f) -> str:
        return str(f)

    def sort_key(self, f):
        return term_key(f)

    def with_signature(self, signature: Signature) -> "TermSpace":
        return TermSpace(signature, self.max_size)

    def __eq__(self, other):
        return (
            isinstance(other, TermSpace)
            and other.signature == self.signature
            and other.max_size == self.max_size
        )

    def __hash__(self):
        return hash((self.signature, self.max_size))

    def __repr__(self):
        return f"TermSpace({self.signature!r}, max_size={self.max_size})"


# -- patterns -------------------------------------------------------------
# A pattern is a term scheme or any object with the same protocol
# (``vars``, ``apply``, ``match``, ``profiles``, ``lookup_key``); the
# sequent patterns of the natural-deduction encoding are the other kind.

def _is_pattern(p) -> bool:
    return hasattr(p, "vars")


def p_vars(p) -> set:
    if isinstance(p, (Term, Var)):
        return scheme_vars(p)
    return p.vars() if _is_pattern(p) else set()


def p_apply(p, sigma):
    if isinstance(p, (Term, Var)):
        return apply_substitution(p, sigma)
    return p.apply(sigma) if _is_pattern(p) else p


def p_match(p, f, sigma) -> Iterator[dict]:
    if isinstance(p, (Term, Var)):
        if not isinstance(f, Term):
            return
        out = dict(sigma)
        if match_into(p, f, out):
            yield out
        return
    if not _is_pattern(p):
        # a ground formula of another kind, such as a sequent
        if p == f:
            yield dict(sigma)
        return
    yield from p.match(f, sigma)


def p_profiles(p) -> list:
    if isinstance(p, (Term, Var)):
        return [size_profile(p)]
    return p.profiles() if _is_pattern(p) else []


def term_lookup_key(s, sigma):
    s = partial_apply(s, sigma)
    if isinstance(s, Var):
        return None
    if s.ground:
        return ("=", s)
    for i, a in enumerate(s.args):
        if a.ground:
            return ("c", s.head, i, a)
    return ("h", s.head)


def p_lookup_key(p, sigma):
    if isinstance(p, (Term, Var)):
        return term_lookup_key(p, sigma)
    return p.lookup_key(sigma) if _is_pattern(p) else ("=", p)


def p_str(p) -> str:
    return str(p)


def fact_keys(f) -> list:
    t = f if isinstance(f, Term) else f.index_term
    keys = [("h", t.head)]
    keys.extend(("c", t.head, i, a) for i, a in enumerate(t.args))
    return keys


def pattern_instances(p, universe) -> Iterator:
    """Instances of a pattern that lie in ``universe``, in enumeration order."""
    variables = sorted(p_vars(p), key=lambda v: v.name)
    for sigma in bounded_assignments(variables, universe, p_profiles(p)):
        f = p_apply(p, sigma)
        if f in universe:
            yield f


# -- instances and rules --------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """One inference step: a premise sequence and a conclusion, with identity."""

    id: str
    prem: tuple
    concl: object

    @property
    def arity(self) -> int:
        return len(self.prem)

    def premise(self, i: int):
        """The i-th premise, 1-based; None when undefined."""
        if 1 <= i <= len(self.prem):
            return self.prem[i - 1]
        return None

    def formulas(self):
        return (*self.prem, self.concl)

    def __str__(self):
        prem = ", ".join(str(p) for p in self.prem)
        return f"[{self.id}] {prem} / {self.concl}"


class ExplicitRule:
    """A finite rule given by its instance list."""

    finite = True
    kind = "explicit"

    def __init__(self, instances: Iterable[Instance]):
        self.instances = tuple(instances)
        self._by_id = {}
        for inst in self.instances:
            self._by_id.setdefault(inst.id, inst)

    def __eq__(self, other):
        return isinstance(other, ExplicitRule) and other.instances == self.instances

    def __hash__(self):
        return hash(self.instances)

    def __repr__(self):
        return f"ExplicitRule({len(self.instances)} instances)"

    def get_instance(self, iid: str, space=None) -> Instance | None:
        return self._by_id.get(iid)

    def enumerate(self, universe=None) -> Iterator[Instance]:
        for inst in self.instances:
            if universe is None or all(f in universe for f in inst.formulas()):
                yield inst

    def fire(self, index, level: int, universe) -> Iterator[Instance]:
        for inst in self.instances:
            if not inst.prem:
                if level == 0 and inst.concl in universe:
                    yield inst
                continue
            levels = [index.level_of(p) for p in inst.prem]
            if None in levels or max(levels) != level:
                continue
            if inst.concl in universe:
                yield inst

    def diagnostics(self, space) -> list[str]:
        out, seen = [], set()
        for inst in self.instances:
            if inst.id in seen:
                out.append(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)
            for f in inst.formulas():
                if not space.contains(f):
                    out.append(f"instance {inst.id!r}: formula {f} outside F")
        return out


@dataclass(frozen=True)
class SchemeVariant:
    label: str
    prem: tuple
    concl: object

    def variables(self) -> list:
        vs = set(p_vars(self.concl))
        for p in self.prem:
            vs |= p_vars(p)
        return sorted(vs, key=lambda v: v.name)

    def profiles(self) -> list:
        out = []
        for p in (*self.prem, self.concl):
            out.extend(p_profiles(p))
        return out


def _instance_id(label: str, sigma) -> str:
    body = format_substitution(sigma)
    return f"{label}:{body}" if label else body


def split_instance_id(iid: str) -> tuple[str, str]:
    label, sep, body = iid.partition(":")
    if sep and "=" not in label:
        return label, body
    return "", iid


def parse_bindings(body: str, variables, space) -> dict | None:
    by_name = {v.name: v for v in variables}
    sigma = {}
    if not body:
        return sigma
    for part in body.split(";"):
        name, sep, value = part.partition("=")
        var = by_name.get(name.strip())
        if not sep or var is None or var.name in sigma:
            return None
        try:
            sigma[var.name] = space.parse_binding(var, value.strip())
        except (ParseError, ValueError):
            return None
    return sigma


class SchemeRule:
    """A rule whose instances are the substitution instances of its variants.

    Each variant is a premise-scheme sequence plus a conclusion scheme; the
    instance id is the variant label and the canonical print of the
    substitution, so two variants may yield instances that agree on
    premises and conclusion but stay distinct.
    """

    finite = False
    kind = "scheme"

    def __init__(self, variants: Iterable[SchemeVariant]):
        self.variants = tuple(variants)
        labels = [v.label for v in self.variants]
        if len(set(labels)) != len(labels):
            raise IllFormedRule("variant labels must be distinct")
        self._by_label = {v.label: v for v in self.variants}

    @classmethod
    def single(cls, prem, concl) -> "SchemeRule":
        return cls([SchemeVariant("", tuple(prem), concl)])

    def __eq__(self, other):
        return isinstance(other, SchemeRule) and other.variants == self.variants

    def __hash__(self):
        return hash(self.variants)

    def __repr__(self):
        parts = []
        for v in self.variants:
            prem = ", ".join(str(p) for p in v.prem)
            parts.append(f"{v.label + ': ' if v.label else ''}{prem} / {v.concl}")
        return f"SchemeRule({'; '.join(parts)})"

    def instantiate(self, variant: SchemeVariant, sigma) -> Instance:
        prem = tuple(p_apply(p, sigma) for p in variant.prem)
        concl = p_apply(variant.concl, sigma)
        return Instance(_instance_id(variant.label, sigma), prem, concl)

    def get_instance(self, iid: str, space) -> Instance | None:
        label, body = split_instance_id(iid)
        variant = self._by_label.get(label)
        if variant is None:
            return None
        variables = variant.variables()
        sigma = parse_bindings(body, variables, space)
        if sigma is None or set(sigma) != {v.name for v in variables}:
            return None
        inst = self.instantiate(variant, sigma)
        if inst.id != iid:
            return None
        return inst

    def enumerate(self, universe) -> Iterator[Instance]:
        for variant in self.variants:
            for sigma in bounded_assignments(variant.variables(), universe, variant.profiles()):
                inst = self.instantiate(variant, sigma)
                if all(f in universe for f in inst.formulas()):
                    yield inst

    def fire(self, index, level: int, universe) -> Iterator[Instance]:
        for variant in self.variants:
            if not variant.prem:
                if level == 0:
                    yield from self._complete(variant, {}, universe)
                continue
            for sigma in join(variant.prem, index, level):
                yield from self._complete(variant, sigma, universe)

    def _complete(self, variant, sigma, universe):
        free = [v for v in variant.variables() if v.name not in sigma]
        if free:
            sigmas = bounded_assignments(free, universe, p_profiles(variant.concl), sigma)
        else:
            sigmas = [sigma]
        for full in sigmas:
            inst = self.instantiate(variant, full)
            if inst.concl in universe:
                yield inst

    def diagnostics(self, space) -> list[str]:
        out = []
        for v in self.variants:
            for p in (*v.prem, v.concl):
                if isinstance(p, (Term, Var)) and not well_formed(p, space.signature):
                    out.append(f"scheme {p} is not well formed")
        return out


def join(patterns, index, level: int) -> Iterator[dict]:
    """Semi-naive join: substitutions matching every pattern to a known fact.

    At least one premise uses a fact of ``level``; premises left of the
    new one use strictly older facts so each combination is produced once.
    """
    n = len(patterns)
    for i in range(n):
        for f in index.at_level(level):
            for sigma in p_match(patterns[i], f, {}):
                yield from _join_rest(patterns, i, 0, sigma, index, level)


def _join_rest(patterns, new_pos, j, sigma, index, level):
    if j == len(patterns):
        yield sigma
        return
    if j == new_pos:
        yield from _join_rest(patterns, new_pos, j + 1, sigma, index, level)
        return
    limit = level - 1 if j < new_pos else level
    for f in index.candidates(p_lookup_key(patterns[j], sigma)):
        lv = index.level_of(f)
        if lv is None or lv > limit:
            continue
        for s2 in p_match(patterns[j], f, sigma):
            yield from _join_rest(patterns, new_pos, j + 1, s2, index, level)


# -- named axioms, rules, systems -----------------------------------------

@dataclass(frozen=True)
class NamedAxiom:
    name: str
    formula: object  # a formula, or a pattern standing for a family of axioms

    def instances(self, universe) -> Iterator:
        yield from pattern_instances(self.formula, universe)

    def covers(self, f) -> bool:
        return any(True for _ in p_match(self.formula, f, {}))


@dataclass(frozen=True)
class NamedRule:
    name: str
    rule: object


@dataclass(frozen=True)
class Diagnostic:
    clause: str
    message: str

    def __str__(self):
        return f"{self.clause}: {self.message}"


@dataclass(frozen=True)
class Budget:
    max_depth: int = 16
    max_universe_size: int = 8
    max_nodes_expanded: int = 200_000

    def __post_init__(self):
        for name in ("max_depth", "max_universe_size", "max_nodes_expanded"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Aphs:
    """An abstract pure Hilbert system (formula space, named axioms, named rules)."""

    space: object
    axioms: tuple = ()
    rules: tuple = ()

    @property
    def signature(self) -> Signature:
        return self.space.signature

    @property
    def names(self) -> frozenset:
        return frozenset(a.name for a in self.axioms) | frozenset(r.name for r in self.rules)

    def rule(self, name: str) -> NamedRule | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None

    def axioms_named(self, name: str) -> list[NamedAxiom]:
        return [a for a in self.axioms if a.name == name]

    def universe(self, budget: Budget):
        return self.space.universe(budget.max_universe_size)

    def without_rule(self, name: str) -> "Aphs":
        return replace(self, rules=tuple(r for r in self.rules if r.name != name))


def validate_system(s: Aphs) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    if not s.space.signature.constants:
        out.append(Diagnostic("F", "the formula set is empty"))
    rule_names = [r.name for r in s.rules]
    axiom_names = {a.name for a in s.axioms}
    for name in sorted(axiom_names & set(rule_names)):
        out.append(Diagnostic("(i)", f"name {name!r} is used by an axiom and by a rule"))
    seen = set()
    for name in rule_names:
        if name in seen:
            out.append(Diagnostic("(ii)", f"two named rules carry the name {name!r}"))
        seen.add(name)
    for ax in s.axioms:
        f = ax.formula
        if isinstance(f, (Term, Var)):
            if not well_formed(f, s.signature):
                out.append(Diagnostic("F", f"axiom {ax.name!r}: {f} is not a formula"))
            elif f.ground and not s.space.contains(f):
                out.append(Diagnostic("F", f"axiom {ax.name!r}: {f} lies outside F"))
    for r in s.rules:
        for msg in r.rule.diagnostics(s.space):
            out.append(Diagnostic("F", f"rule {r.name!r}: {msg}"))
    return out


def fresh_name(taken, base: str = "R") -> str:
    if base not in taken:
        return base
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def extend_with_rule(s: Aphs, r: NamedRule) -> Aphs:
    if r.name in s.names:
        raise NameClash(f"name {r.name!r} is already used in the system")
    return replace(s, rules=s.rules + (r,))


def extend_system(
    s: Aphs,
    axioms: Iterable[NamedAxiom] = (),
    rules: Iterable[NamedRule] = (),
    symbols: Iterable[Symbol] = (),
) -> Aphs:
    """Add formulas (via new symbols), axioms and rules; names stay distinct."""
    axioms, rules, symbols = tuple(axioms), tuple(rules), tuple(symbols)
    space = s.space
    if symbols:
        space = space.with_signature(s.signature.extend(symbols))
    rule_names = {r.name for r in s.rules}
    for ax in axioms:
        if ax.name in rule_names:
            raise NameClash(f"axiom name {ax.name!r} is a rule name")
    taken = set(s.names) | {a.name for a in axioms}
    for r in rules:
        if r.name in taken:
            raise NameClash(f"rule name {r.name!r} is already used")
        taken.add(r.name)
    return replace(s, space=space, axioms=s.axioms + axioms, rules=s.rules + rules)


def explicit_rule(pairs, sig: Signature | None = None, ids=None) -> ExplicitRule:
    """Build an explicit rule from ``(premises, conclusion)`` pairs of strings or terms."""
    insts = []
    for k, (prem, concl) in enumerate(pairs):
        prem = tuple(parse_term(p, sig) if isinstance(p, str) else p for p in prem)
        concl = parse_term(concl, sig) if isinstance(concl, str) else concl
        iid = ids[k] if ids else f"i{k + 1}"
        insts.append(Instance(iid, prem, concl))
    return ExplicitRule(insts)
