"""Natural-deduction rules with marked assumptions, and their sequent encoding.

An ND instance carries, per premise, the set of present marked assumptions
and the set of assumptions it discharges.  Its sequent image has premises
``pmassm_i => prem_i`` and conclusion ``(U pmassm_i) minus dmassm => concl``;
a whole ND system becomes a Hilbert system over sequents whose axioms are
``=> A`` for its axioms plus ``A:m => A`` for every formula and marker.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from .aphs import (
    Aphs,
    Instance,
    NamedAxiom,
    NamedRule,
    TermSpace,
    fresh_name,
    join,
    p_match,
    parse_bindings,
    split_instance_id,
    term_lookup_key,
    _instance_id,
)
from .errors import MarkerCollision, ParseError
from .terms import (
    Signature,
    Term,
    TermUniverse,
    Var,
    apply_substitution,
    bounded_assignments,
    match_into,
    parse_scheme,
    parse_term,
    scheme_vars,
    size_profile,
    term_key,
    well_formed,
    IDENT,
)
import re

_MARKER_RE = re.compile(rf"^\??{IDENT}$")


class Marked(NamedTuple):
    formula: object
    marker: object

    def __str__(self):
        return f"{self.formula}:{self.marker}"


def _marked_key(m: Marked):
    return (term_key(m.formula), str(m.marker))


def sorted_marked(items) -> list:
    return sorted(items, key=_marked_key)


@dataclass(frozen=True)
class Sequent:
    antecedent: frozenset
    succedent: Term

    @property
    def index_term(self) -> Term:
        return self.succedent

    @property
    def size(self) -> int:
        return self.succedent.size + sum(m.formula.size for m in self.antecedent)

    def __str__(self):
        ante = ", ".join(str(m) for m in sorted_marked(self.antecedent))
        return f"{ante} => {self.succedent}" if ante else f"=> {self.succedent}"


def sequent(succedent, *marked) -> Sequent:
    return Sequent(frozenset(Marked(f, m) for f, m in marked), succedent)


def split_top(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _parse_marker(text: str, allow_vars: bool):
    text = text.strip()
    if not _MARKER_RE.match(text):
        raise ParseError(f"bad marker {text!r}")
    if text.startswith("?"):
        if not allow_vars:
            raise ParseError(f"marker variable {text} in ground sequent")
        return Var(text[1:], "marker")
    return text


def parse_marked(text: str, sig: Signature | None = None, allow_vars: bool = False) -> Marked:
    f, sep, m = text.rpartition(":")
    if not sep:
        raise ParseError(f"expected 'formula:marker', got {text!r}")
    if allow_vars:
        return Marked(parse_scheme(f, sig), _parse_marker(m, True))
    return Marked(parse_term(f, sig), _parse_marker(m, False))


def parse_context(text: str, sig: Signature | None = None) -> frozenset:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"expected '{{...}}', got {text!r}")
    return frozenset(parse_marked(p, sig) for p in split_top(text[1:-1]))


def parse_sequent(text: str, sig: Signature | None = None) -> Sequent:
    ante, sep, succ = text.partition("=>")
    if not sep:
        raise ParseError(f"expected 'antecedent => succedent', got {text!r}")
    return Sequent(frozenset(parse_marked(p, sig) for p in split_top(ante)), parse_term(succ, sig))


def parse_sequent_pattern(text: str, sig: Signature | None = None) -> "SequentPattern":
    ante, sep, succ = text.partition("=>")
    if not sep:
        raise ParseError(f"expected 'antecedent => succedent', got {text!r}")
    items = tuple(parse_marked(p, sig, allow_vars=True) for p in split_top(ante))
    return SequentPattern(items, None, parse_scheme(succ, sig))


# -- formula space --------------------------------------------------------

class SequentUniverse:
    """Sequents over a term universe and a marker pool, antecedent size bounded."""

    def __init__(self, terms: TermUniverse, markers: tuple, max_antecedent: int | None):
        self.terms = terms
        self.markers = tuple(markers)
        self.max_antecedent = max_antecedent

    def __contains__(self, s) -> bool:
        if not isinstance(s, Sequent) or s.succedent not in self.terms:
            return False
        if self.max_antecedent is not None and len(s.antecedent) > self.max_antecedent:
            return False
        return all(m.marker in self.markers and m.formula in self.terms for m in s.antecedent)

    def marked(self) -> list[Marked]:
        return [Marked(t, m) for t in self.terms for m in self.markers]

    def contexts(self, limit: int | None = None, exclude=frozenset()) -> Iterator[frozenset]:
        pool = [m for m in self.marked() if m not in exclude]
        top = len(pool) if self.max_antecedent is None else self.max_antecedent
        if limit is not None:
            top = min(top, limit)
        for k in range(top + 1):
            for combo in combinations(pool, k):
                yield frozenset(combo)

    def __iter__(self):
        for ctx in self.contexts():
            for t in self.terms:
                yield Sequent(ctx, t)


class SequentSpace:
    kind = "sequent"

    def __init__(self, terms: TermSpace, markers: Iterable[str], max_antecedent: int | None = None):
        self.terms = terms
        self.markers = tuple(sorted(set(markers)))
        self.max_antecedent = max_antecedent

    @property
    def signature(self) -> Signature:
        return self.terms.signature

    def contains(self, s) -> bool:
        if not isinstance(s, Sequent) or not self.terms.contains(s.succedent):
            return False
        if self.max_antecedent is not None and len(s.antecedent) > self.max_antecedent:
            return False
        return all(m.marker in self.markers and self.terms.contains(m.formula) for m in s.antecedent)

    def universe(self, bound: int) -> SequentUniverse:
        return SequentUniverse(self.terms.universe(bound), self.markers, self.max_antecedent)

    def covered_by(self, bound: int) -> bool:
        return self.terms.covered_by(bound) and self.max_antecedent is not None

    def parse(self, text: str) -> Sequent:
        return parse_sequent(text, self.signature)

    def parse_pattern(self, text: str):
        return parse_sequent_pattern(text, self.signature)

    def parse_binding(self, var: Var, text: str):
        if var.sort == "marker":
            return _parse_marker(text, False)
        if var.sort == "context":
            return parse_context(text, self.signature)
        return parse_term(text, self.signature)

    def format(self, f) -> str:
        return str(f)

    def sort_key(self, s: Sequent):
        return (term_key(s.succedent), [_marked_key(m) for m in sorted_marked(s.antecedent)])

    def with_signature(self, signature: Signature) -> "SequentSpace":
        return SequentSpace(self.terms.with_signature(signature), self.markers, self.max_antecedent)

    def __eq__(self, other):
        return (
            isinstance(other, SequentSpace)
            and (other.terms, other.markers, other.max_antecedent) == (self.terms, self.markers, self.max_antecedent)
        )

    def __hash__(self):
        return hash((self.terms, self.markers, self.max_antecedent))


# -- sequent patterns -----------------------------------------------------

def _apply_marked(item: Marked, sigma) -> Marked:
    m = item.marker
    return Marked(apply_substitution(item.formula, sigma), sigma[m.name] if isinstance(m, Var) else m)


def _match_marked(item: Marked, target: Marked, sigma: dict) -> bool:
    if not match_into(item.formula, target.formula, sigma):
        return False
    m = item.marker
    if isinstance(m, Var):
        bound = sigma.get(m.name)
        if bound is None:
            sigma[m.name] = target.marker
            return True
        return bound == target.marker
    return m == target.marker


@dataclass(frozen=True)
class SequentPattern:
    """``items, ctx => succ``: required marked assumptions plus an optional context."""

    items: tuple
    ctx: Var | None
    succ: object

    def vars(self) -> set:
        out = set(scheme_vars(self.succ))
        for it in self.items:
            out |= scheme_vars(it.formula)
            if isinstance(it.marker, Var):
                out.add(it.marker)
        if self.ctx is not None:
            out.add(self.ctx)
        return out

    def required(self, sigma) -> frozenset:
        return frozenset(_apply_marked(it, sigma) for it in self.items)

    def apply(self, sigma) -> Sequent:
        ante = self.required(sigma)
        if self.ctx is not None:
            ante |= sigma[self.ctx.name]
        return Sequent(ante, apply_substitution(self.succ, sigma))

    def match(self, f, sigma) -> Iterator[dict]:
        if not isinstance(f, Sequent):
            return
        base = dict(sigma)
        if not match_into(self.succ, f.succedent, base):
            return
        ante = sorted_marked(f.antecedent)

        def rec(i, s):
            if i == len(self.items):
                req = self.required(s)
                if self.ctx is None:
                    if req == f.antecedent:
                        yield s
                    return
                rest = f.antecedent - req
                bound = s.get(self.ctx.name)
                if bound is None:
                    s = dict(s)
                    s[self.ctx.name] = rest
                    yield s
                elif bound | req == f.antecedent:
                    yield s
                return
            for target in ante:
                s2 = dict(s)
                if _match_marked(self.items[i], target, s2):
                    yield from rec(i + 1, s2)

        seen = set()
        for s in rec(0, base):
            key = tuple(sorted((k, str(v)) for k, v in s.items()))
            if key not in seen:
                seen.add(key)
                yield s

    def profiles(self) -> list:
        return [size_profile(self.succ)] + [size_profile(it.formula) for it in self.items]

    def lookup_key(self, sigma):
        if self.ctx is None and all(v.name in sigma for v in self.vars()):
            return ("=", self.apply(sigma))
        return _succ_key(term_lookup_key(self.succ, sigma))

    def __str__(self):
        parts = [str(it) for it in self.items]
        if self.ctx is not None:
            parts.append(f"?{self.ctx.name}")
        return f"{', '.join(parts)} => {self.succ}" if parts else f"=> {self.succ}"


def _succ_key(key):
    # A ground succedent still leaves the antecedent open: fall back to the
    # head/child index instead of direct membership.
    if key is None or key[0] != "=":
        return key
    t = key[1]
    if t.args:
        return ("c", t.head, 0, t.args[0])
    return ("h", t.head)


# -- ND instances and rules -----------------------------------------------

@dataclass(frozen=True)
class AndsInstance:
    id: str
    prem: tuple
    concl: Term
    pmassm: tuple  # one frozenset of Marked per premise
    dmassm: frozenset = frozenset()

    @property
    def arity(self) -> int:
        return len(self.prem)

    def problems(self) -> list[str]:
        out = []
        if len(self.pmassm) != len(self.prem):
            out.append(f"instance {self.id!r}: {len(self.pmassm)} pmassm sets for {len(self.prem)} premises")
        present = frozenset().union(*self.pmassm) if self.pmassm else frozenset()
        if not self.dmassm <= present:
            out.append(f"instance {self.id!r}: discharges assumptions that are not present")
        return out

    def markers(self) -> set:
        out = {m.marker for m in self.dmassm}
        for s in self.pmassm:
            out |= {m.marker for m in s}
        return out


def encode_instance(inst: AndsInstance) -> Instance:
    prem = tuple(Sequent(frozenset(g), a) for g, a in zip(inst.pmassm, inst.prem))
    present = frozenset().union(*inst.pmassm) if inst.pmassm else frozenset()
    return Instance(inst.id, prem, Sequent(present - inst.dmassm, inst.concl))


class AndsExplicitRule:
    finite = True
    kind = "explicit"

    def __init__(self, instances: Iterable[AndsInstance]):
        self.instances = tuple(instances)
        self._by_id = {}
        for inst in self.instances:
            self._by_id.setdefault(inst.id, inst)

    def __eq__(self, other):
        return isinstance(other, AndsExplicitRule) and other.instances == self.instances

    def __hash__(self):
        return hash(self.instances)

    def get_instance(self, iid, space=None):
        return self._by_id.get(iid)

    def enumerate(self, universe=None):
        yield from self.instances

    def fire(self, index, level, universe):
        for inst in self.instances:
            enc = encode_instance(inst)
            if not enc.prem:
                if level == 0:
                    yield inst
                continue
            levels = [index.level_of(p) for p in enc.prem]
            if None not in levels and max(levels) == level:
                yield inst

    def markers(self) -> set:
        out = set()
        for inst in self.instances:
            out |= inst.markers()
        return out

    def diagnostics(self, space) -> list[str]:
        out, seen = [], set()
        for inst in self.instances:
            if inst.id in seen:
                out.append(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)
            out.extend(inst.problems())
        return out


@dataclass(frozen=True)
class AndsVariant:
    label: str
    prem: tuple
    pmassm: tuple  # per premise: tuple of Marked patterns that must be present
    dmassm: tuple  # Marked patterns discharged when present
    concl: object

    def context_vars(self) -> list[Var]:
        return [Var(f"_G{i + 1}", "context") for i in range(len(self.prem))]


class AndsSchemeRule:
    """Scheme-backed ND rule.

    With ``context`` each premise carries an arbitrary extra set of present
    assumptions (bound to ``_G1``, ``_G2``, ...), and each discharge pattern
    removes its instance only where it is present; this is the usual
    sequent reading of rules like implication introduction.
    """

    finite = False
    kind = "scheme"

    def __init__(self, variants: Iterable[AndsVariant], context: bool = True):
        self.variants = tuple(variants)
        self.context = context
        self._by_label = {v.label: v for v in self.variants}

    def __eq__(self, other):
        return isinstance(other, AndsSchemeRule) and (other.variants, other.context) == (self.variants, self.context)

    def __hash__(self):
        return hash((self.variants, self.context))

    def patterns(self, variant) -> list[SequentPattern]:
        ctxs = variant.context_vars() if self.context else [None] * len(variant.prem)
        return [SequentPattern(tuple(items), c, p) for items, c, p in zip(variant.pmassm, ctxs, variant.prem)]

    def variables(self, variant) -> list[Var]:
        vs = set()
        for pat in self.patterns(variant):
            vs |= pat.vars()
        vs |= scheme_vars(variant.concl)
        for it in variant.dmassm:
            vs |= scheme_vars(it.formula)
            if isinstance(it.marker, Var):
                vs.add(it.marker)
        return sorted(vs, key=lambda v: v.name)

    def instantiate(self, variant, sigma) -> AndsInstance:
        pats = self.patterns(variant)
        pm = tuple(pat.apply(sigma).antecedent for pat in pats)
        prem = tuple(apply_substitution(p, sigma) for p in variant.prem)
        present = frozenset().union(*pm) if pm else frozenset()
        dm = frozenset(_apply_marked(it, sigma) for it in variant.dmassm) & present
        return AndsInstance(_instance_id(variant.label, sigma), prem, apply_substitution(variant.concl, sigma), pm, dm)

    def get_instance(self, iid, space):
        label, body = split_instance_id(iid)
        variant = self._by_label.get(label)
        if variant is None:
            return None
        variables = self.variables(variant)
        sigma = parse_bindings(body, variables, space)
        if sigma is None or set(sigma) != {v.name for v in variables}:
            return None
        inst = self.instantiate(variant, sigma)
        return inst if inst.id == iid else None

    def _free_profiles(self, variant):
        out = [size_profile(variant.concl)]
        out.extend(size_profile(it.formula) for it in variant.dmassm)
        return out

    def fire(self, index, level, universe):
        for variant in self.variants:
            pats = self.patterns(variant)
            if not pats:
                sigmas = [{}] if level == 0 else []
            else:
                sigmas = join(pats, index, level)
            for sigma in sigmas:
                free = [v for v in self.variables(variant) if v.name not in sigma]
                for full in bounded_assignments(free, universe, self._free_profiles(variant), sigma):
                    yield self.instantiate(variant, full)

    def enumerate(self, universe):
        for variant in self.variants:
            term_vars = [v for v in self.variables(variant) if v.sort != "context"]
            profiles = [size_profile(p) for p in variant.prem] + [size_profile(variant.concl)]
            for it in (*variant.dmassm, *[i for items in variant.pmassm for i in items]):
                profiles.append(size_profile(it.formula))
            for sigma in bounded_assignments(term_vars, universe, profiles):
                yield from self._with_contexts(variant, sigma, universe)

    def _with_contexts(self, variant, sigma, universe):
        if not self.context:
            yield self.instantiate(variant, sigma)
            return
        pats = self.patterns(variant)

        def rec(i, s):
            if i == len(pats):
                yield self.instantiate(variant, s)
                return
            req = pats[i].required(s)
            room = None if universe.max_antecedent is None else universe.max_antecedent - len(req)
            if room is not None and room < 0:
                return
            for ctx in universe.contexts(limit=room, exclude=req):
                s2 = dict(s)
                s2[f"_G{i + 1}"] = ctx
                yield from rec(i + 1, s2)

        yield from rec(0, sigma)

    def markers(self) -> set:
        out = set()
        for v in self.variants:
            for it in (*v.dmassm, *[i for items in v.pmassm for i in items]):
                if not isinstance(it.marker, Var):
                    out.add(it.marker)
        return out

    def diagnostics(self, space) -> list[str]:
        out = []
        for v in self.variants:
            if len(v.pmassm) != len(v.prem):
                out.append(f"variant {v.label!r}: pmassm length differs from premise count")
            for p in (*v.prem, v.concl):
                if not well_formed(p, space.signature):
                    out.append(f"scheme {p} is not well formed")
        return out


class EncodedRule:
    """The sequent-style image of an ND rule, as a rule on sequent formulas."""

    kind = "encoded"

    def __init__(self, nd_rule):
        self.nd_rule = nd_rule
        self.finite = nd_rule.finite

    def __eq__(self, other):
        return isinstance(other, EncodedRule) and other.nd_rule == self.nd_rule

    def __hash__(self):
        return hash(("encoded", self.nd_rule))

    def get_instance(self, iid, space):
        inst = self.nd_rule.get_instance(iid, space)
        return None if inst is None else encode_instance(inst)

    def enumerate(self, universe):
        for inst in self.nd_rule.enumerate(universe):
            enc = encode_instance(inst)
            if all(f in universe for f in enc.formulas()):
                yield enc

    def fire(self, index, level, universe):
        for inst in self.nd_rule.fire(index, level, universe):
            enc = encode_instance(inst)
            if enc.concl in universe and all(p in universe for p in enc.prem):
                yield enc

    def diagnostics(self, space) -> list[str]:
        return self.nd_rule.diagnostics(space.terms if isinstance(space, SequentSpace) else space)


class WeakeningRule:
    """``G => A`` / ``G, B:m => A``: adds one marked assumption."""

    finite = False
    kind = "weakening"

    def __eq__(self, other):
        return isinstance(other, WeakeningRule)

    def __hash__(self):
        return hash("weakening")

    @staticmethod
    def _make(premise: Sequent, added: Marked) -> Instance:
        iid = f"add={added};from={premise}"
        return Instance(iid, (premise,), Sequent(premise.antecedent | {added}, premise.succedent))

    def get_instance(self, iid, space):
        if not iid.startswith("add=") or ";from=" not in iid:
            return None
        added, _, premise = iid[4:].partition(";from=")
        try:
            inst = self._make(space.parse(premise), parse_marked(added, space.signature))
        except ParseError:
            return None
        if added_present(inst):
            return None
        return inst if inst.id == iid else None

    def _extensions(self, premise, universe):
        if universe.max_antecedent is not None and len(premise.antecedent) >= universe.max_antecedent:
            return
        for m in universe.marked():
            if m not in premise.antecedent:
                yield self._make(premise, m)

    def enumerate(self, universe):
        for s in universe:
            yield from self._extensions(s, universe)

    def fire(self, index, level, universe):
        for f in list(index.at_level(level)):
            yield from self._extensions(f, universe)

    def diagnostics(self, space):
        return []


def added_present(inst: Instance) -> bool:
    return inst.concl.antecedent == inst.prem[0].antecedent


# -- ND systems and the encoding ------------------------------------------

@dataclass(frozen=True)
class Ands:
    space: TermSpace
    axioms: tuple = ()
    rules: tuple = ()

    @property
    def signature(self):
        return self.space.signature

    @property
    def names(self):
        return frozenset(a.name for a in self.axioms) | frozenset(r.name for r in self.rules)

    def markers(self) -> set:
        out = set()
        for r in self.rules:
            out |= r.rule.markers()
        return out


def marker_pool(count: int) -> tuple:
    return tuple(f"m{i}" for i in range(1, count + 1))


ASSUME = "assume"


def encode_system(
    n: Ands,
    markers: int = 2,
    max_antecedent: int | None = 2,
    weakening: bool = False,
    extra_rules: Iterable = (),
) -> Aphs:
    """The Hilbert system over sequents that represents ``n``.

    The marker pool ``m1..mK`` must not clash with markers written in the
    rules of ``n`` or in ``extra_rules`` (rules about to be analysed in it).
    """
    pool = marker_pool(markers)
    user = set(n.markers())
    for r in extra_rules:
        user |= r.markers()
    clash = user & set(pool)
    if clash:
        raise MarkerCollision(f"rule markers {sorted(clash)} collide with the marker pool")
    space = SequentSpace(n.space, set(pool) | user, max_antecedent)
    axioms = [NamedAxiom(ax.name, SequentPattern((), None, ax.formula)) for ax in n.axioms]
    name = fresh_name(n.names, ASSUME)
    a = Var("A")
    axioms.append(NamedAxiom(name, SequentPattern((Marked(a, Var("m", "marker")),), None, a)))
    rules = [NamedRule(r.name, EncodedRule(r.rule)) for r in n.rules]
    if weakening:
        rules.append(NamedRule(fresh_name(n.names | {name}, "W"), WeakeningRule()))
    return Aphs(space, tuple(axioms), tuple(rules))


def validate_ands(n: Ands) -> list:
    from .aphs import Diagnostic

    out = []
    rule_names = [r.name for r in n.rules]
    for name in sorted({a.name for a in n.axioms} & set(rule_names)):
        out.append(Diagnostic("(i)", f"name {name!r} is used by an axiom and by a rule"))
    seen = set()
    for name in rule_names:
        if name in seen:
            out.append(Diagnostic("(ii)", f"two named rules carry the name {name!r}"))
        seen.add(name)
    for r in n.rules:
        for msg in r.rule.diagnostics(n.space):
            out.append(Diagnostic("F", f"rule {r.name!r}: {msg}"))
    return out


# -- rule status through the encoding -------------------------------------

def check_nd_derivable(n: Ands, rule, b, markers: int = 2, max_antecedent: int | None = 2):
    from .analysis import check_derivable

    s = encode_system(n, markers, max_antecedent, extra_rules=[rule])
    return check_derivable(s, EncodedRule(rule), b)


@dataclass
class NdAdmissibility:
    """Admissibility in the encoding, and what it would be with weakening added."""

    result: object
    with_weakening: object

    @property
    def verdict(self):
        return self.result.verdict

    @property
    def weakening_sensitive(self) -> bool:
        return self.result.verdict is not self.with_weakening.verdict


def check_nd_admissible(n: Ands, rule, b, markers: int = 2, max_antecedent: int | None = 2) -> NdAdmissibility:
    from .analysis import check_admissible

    plain = encode_system(n, markers, max_antecedent, extra_rules=[rule])
    weak = encode_system(n, markers, max_antecedent, weakening=True, extra_rules=[rule])
    return NdAdmissibility(check_admissible(plain, EncodedRule(rule), b), check_admissible(weak, EncodedRule(rule), b))
