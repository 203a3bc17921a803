"""Seeded random systems, rules and derivations, and the audit runner.

Sample ``i`` of seed ``k`` uses its own generator seeded with
``k * 100003 + i``, so samples are independent of how many were drawn.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .aphs import Aphs, Budget, ExplicitRule, Instance, NamedAxiom, NamedRule, TermSpace, extend_with_rule
from .analysis import (
    NO,
    UNKNOWN,
    YES,
    check_derivable,
    compare_systems,
    proposition_audit,
)
from .derivation import AssumptionLeaf, RuleNode
from .search import closure
from .terms import Signature, Symbol, TermUniverse


def sample_rng(seed: int, i: int) -> random.Random:
    return random.Random(seed * 100003 + i)


def _size_bound(sig: Signature, max_terms: int) -> int:
    """Largest term-size bound whose universe has at most ``max_terms`` terms."""
    k = 1
    while k < 12:
        if TermUniverse(sig, k + 1).count(limit=max_terms) > max_terms:
            break
        if TermUniverse(sig, k + 1).count() == TermUniverse(sig, k).count():
            break
        k += 1
    return k


def random_signature(rng: random.Random) -> Signature:
    n = rng.randint(1, 3)
    n_const = rng.randint(1, n)
    syms = [Symbol(c, 0) for c in ("a", "b", "c")[:n_const]]
    syms += [Symbol(f, 1) for f in ("f", "g")[: n - n_const]]
    return Signature(syms)


def random_system(rng: random.Random, max_terms: int = 8) -> Aphs:
    sig = random_signature(rng)
    space = TermSpace(sig, rng.randint(1, _size_bound(sig, max_terms)))
    terms = list(space.universe(space.max_size))
    axioms = tuple(
        NamedAxiom(f"A{k + 1}", t) for k, t in enumerate(rng.sample(terms, rng.randint(0, min(3, len(terms)))))
    )
    rules = []
    for k in range(rng.randint(0, 3)):
        insts = []
        for j in range(rng.randint(1, 4)):
            prem = tuple(rng.choice(terms) for _ in range(rng.choice((0, 1, 1, 1, 2, 2))))
            insts.append(Instance(f"i{j + 1}", prem, rng.choice(terms)))
        rules.append(NamedRule(f"R{k + 1}", ExplicitRule(insts)))
    return Aphs(space, axioms, tuple(rules))


def budget_for(s: Aphs) -> Budget:
    return Budget(max_depth=16, max_universe_size=s.space.max_size)


def random_rule(rng: random.Random, s: Aphs, b: Budget) -> ExplicitRule:
    """A rule of 1 to 4 instances; half the time each conclusion follows from its premises."""
    terms = list(s.universe(b))
    biased = rng.random() < 0.5
    insts = []
    for j in range(rng.randint(1, 4)):
        prem = tuple(rng.choice(terms) for _ in range(rng.randint(1, 2)))
        if biased:
            reach = sorted(closure(s, prem, b).facts, key=s.space.sort_key)
            concl = rng.choice(reach)
        else:
            concl = rng.choice(terms)
        insts.append(Instance(f"t{j + 1}", prem, concl))
    return ExplicitRule(insts)


@dataclass(frozen=True)
class Sample:
    system: Aphs
    rule: ExplicitRule
    budget: Budget


def sample(seed: int, i: int, max_terms: int = 8) -> Sample:
    rng = sample_rng(seed, i)
    s = random_system(rng, max_terms)
    b = budget_for(s)
    return Sample(s, random_rule(rng, s, b), b)


def sample_pair(seed: int, i: int, max_terms: int = 8) -> tuple[Aphs, Aphs, Budget]:
    """A system and a variant: plus a sampled rule, or with one rule dropped."""
    sm = sample(seed, i, max_terms)
    rng = sample_rng(seed, i + 7919)
    s = sm.system
    if s.rules and rng.random() < 0.3:
        other = s.without_rule(rng.choice(s.rules).name)
    else:
        other = extend_with_rule(s, NamedRule("T", sm.rule))
    return s, other, sm.budget


@dataclass(frozen=True)
class EliminationCase:
    base: Aphs
    rule: NamedRule
    derivation: object
    mimicry: dict


def _random_derivation(rng, ext, rule_name, insts, facts_of, target, depth):
    by_concl = [i for i in insts if i.concl == target]
    if depth > 0 and by_concl and rng.random() < 0.6:
        inst = rng.choice(by_concl)
        prem = tuple(_random_derivation(rng, ext, rule_name, insts, facts_of, p, depth - 1) for p in inst.prem)
        return RuleNode(rule_name, inst.id, target, prem)
    return facts_of(target)


def sample_elimination_case(seed: int, i: int, max_terms: int = 8, max_depth: int = 3) -> EliminationCase | None:
    """A derivation using a derivable sampled rule, with its mimicry table.

    Returns None when the sampled rule is not derivable.  The derivation
    is built top-down: each formula is either justified by an instance of
    the rule (so rule nodes may nest) or closed off by an assumption leaf.
    """
    sm = sample(seed, i, max_terms)
    status = check_derivable(sm.system, sm.rule, sm.budget)
    if status.verdict is not YES:
        return None
    rng = sample_rng(seed, i + 104729)
    name = "T"
    ext = extend_with_rule(sm.system, NamedRule(name, sm.rule))
    insts = list(sm.rule.instances)
    root = rng.choice(insts)
    d = _random_derivation(rng, ext, name, insts, AssumptionLeaf, root.concl, max_depth)
    if not isinstance(d, RuleNode):
        d = RuleNode(name, root.id, root.concl, tuple(AssumptionLeaf(p) for p in root.prem))
    return EliminationCase(sm.system, NamedRule(name, sm.rule), d, dict(status.witnesses))


# -- audit ----------------------------------------------------------------

def run_audit(seed: int, samples: int, universe: int = 8, extension_samples: int = 10) -> dict:
    """Audit the four items of the rule-status proposition on sampled systems.

    The report is plain data; ``violations`` lists every sample index
    where a checked item failed.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    started = time.perf_counter()
    counts = {
        "samples": samples,
        "i_decided": 0,
        "i_violations": 0,
        "ii_checked": 0,
        "ii_violations": 0,
        "iii_checked": 0,
        "iii_extensions": 0,
        "iii_violations": 0,
        "iv_candidates": 0,
        "iv_refuted": 0,
        "iv_unknown": 0,
        "unknown_verdicts": 0,
    }
    violations = []
    for i in range(samples):
        sm = sample(seed, i, universe)
        rep = proposition_audit(sm.system, sm.rule, sm.budget, extension_samples, seed=seed * 100003 + i)
        st = rep.status
        verdicts = (st.derivable.verdict, st.correct.verdict, st.admissible.verdict)
        counts["unknown_verdicts"] += sum(v is UNKNOWN for v in verdicts)
        if rep.prop_i is not None:
            counts["i_decided"] += 1
            counts["i_violations"] += not rep.prop_i
        if rep.prop_ii is not None:
            counts["ii_checked"] += 1
            counts["ii_violations"] += not rep.prop_ii
        if rep.prop_iii is not None:
            counts["iii_checked"] += 1
            counts["iii_extensions"] += rep.prop_iii_checked
            counts["iii_violations"] += not rep.prop_iii
        if st.derivable.verdict is NO and st.admissible.verdict is YES:
            counts["iv_candidates"] += 1
            if rep.prop_iv is NO:
                counts["iv_refuted"] += 1
            else:
                counts["iv_unknown"] += 1
        if rep.violations:
            violations.append({"sample": i, "items": rep.violations})
    return {
        "seed": seed,
        "universe": universe,
        "counts": counts,
        "violations": violations,
        "ok": not violations,
        "_seconds": time.perf_counter() - started,
    }


def run_comparisons(seed: int, samples: int, universe: int = 8) -> dict:
    counts = {"pairs": samples, "theorems_law_decided": 0, "consequence_law_decided": 0}
    discrepancies = []
    for i in range(samples):
        s1, s2, b = sample_pair(seed, i, universe)
        cmp = compare_systems(s1, s2, b)
        counts["theorems_law_decided"] += cmp.theorems_law is not None
        counts["consequence_law_decided"] += cmp.consequence_law is not None
        if cmp.discrepancies:
            discrepancies.append({"pair": i, "issues": cmp.discrepancies})
    return {"counts": counts, "discrepancies": discrepancies, "ok": not discrepancies}
