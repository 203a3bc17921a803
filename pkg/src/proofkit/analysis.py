"""Rule status in a system: derivable, correct, admissible, and related checks.

All verdicts are relative to a budget.  NO is only returned when the
forward closure that refutes it saturated inside the budgeted universe; when
the formula space is larger than that universe the verdicts speak about
the universe, and scheme-backed YES answers are flagged as fragments.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .aphs import (
    Aphs,
    Budget,
    ExplicitRule,
    Instance,
    NamedAxiom,
    NamedRule,
    SchemeRule,
    SchemeVariant,
    extend_system,
    extend_with_rule,
    fresh_name,
)
from .derivation import assumptions, conclusion, is_valid, rules_used
from .errors import BudgetExceeded, PreconditionViolation, SignatureMismatch
from .search import Decision, Proved, Verdict, closure, derives, theorem_set
from .terms import Symbol, Term, term_key

YES, NO, UNKNOWN = Verdict.YES, Verdict.NO, Verdict.UNKNOWN


def combine_all(verdicts) -> Verdict:
    """Conjunction of three-valued verdicts."""
    verdicts = list(verdicts)
    if NO in verdicts:
        return NO
    if UNKNOWN in verdicts:
        return UNKNOWN
    return YES


@dataclass
class Fragment:
    verdict: Verdict
    witnesses: dict = field(default_factory=dict)
    counterexample: Instance | None = None
    fragment: bool = False
    checked: int = 0


@dataclass
class RuleStatus:
    derivable: Fragment
    correct: Fragment
    admissible: Fragment

    @property
    def witnesses(self) -> dict:
        return self.derivable.witnesses

    @property
    def counterexample(self):
        return self.derivable.counterexample or self.correct.counterexample


def instances_of(s: Aphs, rule, b: Budget) -> tuple[list, bool]:
    """Instances to examine, and whether they are all of the rule's instances."""
    if isinstance(rule, ExplicitRule):
        return list(rule.instances), True
    universe = s.universe(b)
    insts = list(rule.enumerate(universe))
    return insts, s.space.covered_by(b.max_universe_size)


def _inside(s: Aphs, b: Budget, inst: Instance) -> bool:
    universe = s.universe(b)
    return all(f in universe for f in inst.formulas())


def find_mimicking_derivation(s: Aphs, inst: Instance, b: Budget = Budget()) -> Decision:
    result = derives(s, set(inst.prem), inst.concl, b)
    if isinstance(result, Proved):
        return Decision(YES, result.derivation)
    if result.saturated and _inside(s, b, inst):
        return Decision(NO)
    return Decision(UNKNOWN)


def check_derivable(s: Aphs, rule, b: Budget = Budget()) -> Fragment:
    insts, complete = instances_of(s, rule, b)
    out = Fragment(YES, checked=len(insts), fragment=not complete)
    unknown = False
    for inst in insts:
        dec = find_mimicking_derivation(s, inst, b)
        if dec.verdict is YES:
            out.witnesses[inst.id] = dec.witness
        elif dec.verdict is NO:
            out.verdict = NO
            out.counterexample = inst
            out.fragment = False
            return out
        else:
            unknown = True
    if unknown:
        out.verdict = UNKNOWN
    return out


def check_correct(s: Aphs, rule, b: Budget = Budget()) -> Fragment:
    insts, complete = instances_of(s, rule, b)
    thms = theorem_set(s, b)
    universe = s.universe(b)
    out = Fragment(YES, checked=len(insts), fragment=not complete)
    unknown = False

    def refuted(f):
        return thms.saturated and f in universe and f not in thms.formulas

    for inst in insts:
        if all(p in thms.formulas for p in inst.prem):
            if inst.concl in thms.formulas:
                continue
            if refuted(inst.concl):
                out.verdict, out.counterexample, out.fragment = NO, inst, False
                return out
            unknown = True
        elif not any(refuted(p) for p in inst.prem):
            unknown = True
    if unknown:
        out.verdict = UNKNOWN
    return out


def check_admissible(s: Aphs, rule, b: Budget = Budget()) -> Fragment:
    ext = extend_with_rule(s, NamedRule(fresh_name(s.names, "R"), rule))
    before, after = theorem_set(s, b), theorem_set(ext, b)
    frag = not s.space.covered_by(b.max_universe_size)
    extra = after.formulas - before.formulas
    if extra and before.saturated:
        # the earliest new theorem was produced by the added rule itself
        closed = closure(ext, (), b)
        new = min(extra, key=lambda f: (closed.index.level_of(f), s.space.sort_key(f)))
        return Fragment(NO, counterexample=closed.justification[new][2])
    if before.saturated and after.saturated:
        return Fragment(YES, fragment=frag)
    return Fragment(UNKNOWN)


def classify_rule(s: Aphs, rule, b: Budget = Budget()) -> RuleStatus:
    return RuleStatus(check_derivable(s, rule, b), check_correct(s, rule, b), check_admissible(s, rule, b))


# -- extensions and the proposition audit ---------------------------------

@dataclass(frozen=True)
class Extension:
    """What a sampled extension added: new constants, axioms and rules."""

    symbols: tuple = ()
    axioms: tuple = ()
    rules: tuple = ()

    def apply(self, s: Aphs) -> Aphs:
        return extend_system(s, self.axioms, self.rules, self.symbols)

    def describe(self) -> dict:
        return {
            "symbols": [f"{x.name}/{x.arity}" for x in self.symbols],
            "axioms": [{"name": a.name, "formula": str(a.formula)} for a in self.axioms],
            "rules": [
                {"name": r.name, "instances": [str(i) for i in r.rule.instances]} for r in self.rules
            ],
        }


def random_extension(s: Aphs, rng: random.Random, b: Budget) -> Extension:
    """Add some mix of a fresh constant, up to two axioms and one explicit rule."""
    symbols = ()
    names = {x.name for x in s.signature.symbols}
    kinds = rng.sample(["symbol", "axiom", "rule"], rng.randint(1, 3))
    if "symbol" in kinds:
        symbols = (Symbol(fresh_name(names, "n"), 0),)
    space = s.space.with_signature(s.signature.extend(symbols)) if symbols else s.space
    terms = list(space.universe(b.max_universe_size))
    taken = set(s.names)
    axioms, rules = [], []
    if "axiom" in kinds:
        for _ in range(rng.randint(1, 2)):
            name = fresh_name(taken, "X")
            taken.add(name)
            axioms.append(NamedAxiom(name, rng.choice(terms)))
    if "rule" in kinds:
        insts = []
        for k in range(rng.randint(1, 3)):
            prem = tuple(rng.choice(terms) for _ in range(rng.randint(1, 2)))
            insts.append(Instance(f"e{k + 1}", prem, rng.choice(terms)))
        rules.append(NamedRule(fresh_name(taken, "Q"), ExplicitRule(insts)))
    return Extension(symbols, tuple(axioms), tuple(rules))


@dataclass
class AuditReport:
    status: RuleStatus
    prop_i: bool | None = None  # None: not both decided
    prop_ii: bool | None = None
    prop_iii: bool | None = None
    prop_iii_checked: int = 0
    prop_iv: Verdict | None = None  # NO: admissibility refuted in some extension
    prop_iv_extension: Extension | None = None

    @property
    def violations(self) -> list[str]:
        out = []
        if self.prop_i is False:
            out.append("(i)")
        if self.prop_ii is False:
            out.append("(ii)")
        if self.prop_iii is False:
            out.append("(iii)")
        return out


def witnesses_hold(s: Aphs, rule, witnesses: dict) -> bool:
    """Every stored mimicking derivation is still one in ``s``."""
    for iid, d in witnesses.items():
        inst = rule.get_instance(iid, s.space)
        if inst is None or not is_valid(s, d):
            return False
        if conclusion(d) != inst.concl or not assumptions(d) <= set(inst.prem):
            return False
    return True


def proposition_audit(
    s: Aphs,
    rule,
    b: Budget = Budget(),
    extension_samples: int = 10,
    seed: int = 0,
) -> AuditReport:
    rng = random.Random(seed)
    status = classify_rule(s, rule, b)
    rep = AuditReport(status)
    d, c, a = status.derivable.verdict, status.correct.verdict, status.admissible.verdict
    if a.decided and c.decided:
        rep.prop_i = a is c
    if d is YES and a.decided:
        rep.prop_ii = a is YES
    if d is YES:
        ok = True
        insts, _ = instances_of(s, rule, b)
        for _ in range(extension_samples):
            ext = random_extension(s, rng, b).apply(s)
            ok = ok and witnesses_hold(ext, rule, status.witnesses) and len(status.witnesses) == len(insts)
            rep.prop_iii_checked += 1
        rep.prop_iii = ok
    elif d is NO:
        rep.prop_iv, rep.prop_iv_extension = refute_in_extension(s, rule, status.derivable.counterexample, b, rng, extension_samples)
    return rep


def refute_in_extension(s, rule, cex, b, rng, samples):
    """Search for an extension in which ``rule`` is not admissible.

    The first candidate makes the counterexample's premises axioms: by purity
    its theorems are exactly the consequences of those premises, which do
    not include the conclusion.
    """
    candidates = []
    if cex is not None:
        taken = set(s.names)
        axioms = []
        for p in dict.fromkeys(cex.prem):
            name = fresh_name(taken, "H")
            taken.add(name)
            axioms.append(NamedAxiom(name, p))
        candidates.append(Extension(axioms=tuple(axioms)))
    candidates.extend(random_extension(s, rng, b) for _ in range(samples))
    for ext in candidates:
        if check_admissible(ext.apply(s), rule, b).verdict is NO:
            return NO, ext
    return UNKNOWN, None


# -- rule elimination helpers ---------------------------------------------

def translate_closed_derivation(s: Aphs, r: NamedRule, d, b: Budget = Budget()):
    """A closed derivation in ``s`` of the conclusion of closed ``d``.

    When ``d`` does not use ``r`` it is returned as is; otherwise the
    conclusion is proved again from scratch, which admissibility of ``r``
    makes possible.
    """
    if assumptions(d):
        raise PreconditionViolation("the derivation has open assumptions")
    if r.name not in rules_used(d):
        return d
    result = derives(s, (), conclusion(d), b)
    if isinstance(result, Proved):
        return result.derivation
    raise BudgetExceeded(f"no closed derivation of {conclusion(d)} within the budget")


# -- comparing systems ----------------------------------------------------

def axiom_rules(s: Aphs) -> list:
    """Axioms recast as 0-premise rules, one per named axiom."""
    out = []
    for ax in s.axioms:
        f = ax.formula
        if isinstance(f, Term) and f.ground:
            out.append(ExplicitRule([Instance(f"axiom {ax.name}", (), f)]))
        else:
            out.append(SchemeRule([SchemeVariant("", (), f)]))
    return out


@dataclass
class Comparison:
    same_theorems: Verdict
    same_consequence: Verdict
    mutually_admissible: Verdict
    mutually_derivable: Verdict

    @property
    def theorems_law(self) -> bool | None:
        if self.same_theorems.decided and self.mutually_admissible.decided:
            return self.same_theorems is self.mutually_admissible
        return None

    @property
    def consequence_law(self) -> bool | None:
        if self.same_consequence.decided and self.mutually_derivable.decided:
            return self.same_consequence is self.mutually_derivable
        return None

    @property
    def discrepancies(self) -> list[str]:
        out = []
        if self.theorems_law is False:
            out.append("same theorems does not match mutual admissibility")
        if self.consequence_law is False:
            out.append("same consequence does not match mutual derivability")
        return out


def _same_sets(x, y) -> Verdict:
    if x.facts == y.facts:
        return YES if x.saturated and y.saturated else UNKNOWN
    if (x.facts - y.facts and y.saturated) or (y.facts - x.facts and x.saturated):
        return NO
    return UNKNOWN


def same_consequence(s1: Aphs, s2: Aphs, b: Budget, max_formulas: int = 10) -> Verdict:
    """Compare closures for every assumption set drawn from the universe."""
    universe = list(s1.universe(b))
    if len(universe) > max_formulas:
        return UNKNOWN
    verdicts = []
    for k in range(len(universe) + 1):
        for gamma in combinations(universe, k):
            v = _same_sets(closure(s1, gamma, b), closure(s2, gamma, b))
            if v is NO:
                return NO
            verdicts.append(v)
    return combine_all(verdicts)


def compare_systems(s1: Aphs, s2: Aphs, b: Budget = Budget(), max_formulas: int = 10) -> Comparison:
    if s1.space != s2.space:
        raise SignatureMismatch("systems are over different formula sets")

    def all_rules(s):
        return axiom_rules(s) + [r.rule for r in s.rules]

    same_thm = _same_sets(closure(s1, (), b), closure(s2, (), b))
    adm = [check_admissible(s2, r, b).verdict for r in all_rules(s1)]
    adm += [check_admissible(s1, r, b).verdict for r in all_rules(s2)]
    der = [check_derivable(s2, r, b).verdict for r in all_rules(s1)]
    der += [check_derivable(s1, r, b).verdict for r in all_rules(s2)]
    return Comparison(same_thm, same_consequence(s1, s2, b, max_formulas), combine_all(adm), combine_all(der))


# -- rules from extensional descriptions ----------------------------------

def rule_from_partial_function(desc: dict) -> ExplicitRule:
    """One instance per entry of a map from premise sequences to a conclusion.

    A map gives each premise sequence at most one conclusion, so a rule
    like disjunction introduction needs one map per conclusion.
    """
    insts = [Instance(f"i{k + 1}", tuple(prem), concl) for k, (prem, concl) in enumerate(desc.items())]
    return ExplicitRule(insts)


def _pair_key(pair):
    prem, concl = pair
    return ([term_key(p) for p in prem], term_key(concl))


def rule_from_relation(rel) -> ExplicitRule:
    """One instance per (premises, conclusion) pair; equal pairs collapse."""
    pairs = sorted({(tuple(p), c) for p, c in rel}, key=_pair_key)
    return ExplicitRule(Instance(f"i{k + 1}", p, c) for k, (p, c) in enumerate(pairs))


def extensionalize(rule, universe=None) -> set:
    return {(inst.prem, inst.concl) for inst in rule.enumerate(universe)}


def intensional_duplicates(rule, universe=None) -> list[tuple[str, str]]:
    """Pairs of distinct instance ids with the same premises and conclusion."""
    groups: dict = {}
    for inst in rule.enumerate(universe):
        groups.setdefault((inst.prem, inst.concl), []).append(inst.id)
    out = []
    for ids in groups.values():
        out.extend(combinations(sorted(set(ids)), 2))
    return sorted(out)
