"""One test per primary acceptance criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) and then
asserts the criterion at full strength.
"""
import re
import subprocess
import sys
import time

import pytest

from proofkit import CORPUS
from proofkit.analysis import (
    check_admissible,
    check_derivable,
    compare_systems,
    extensionalize,
    intensional_duplicates,
    rule_from_relation,
)
from proofkit.ands import Marked, encode_system, parse_sequent
from proofkit.aphs import Budget
from proofkit.ars import induced_relation, steps_between, trs_step_expansion
from proofkit.derivation import RuleNode, assumptions, count_rule, is_valid, nodes
from proofkit.elimination import STRATEGIES, eliminate_rule
from proofkit.formats import load_derivation, load_mimicry, load_rule_file, load_signature, load_system
from proofkit.sampling import run_audit, run_comparisons, sample_elimination_case
from proofkit.search import Verdict, is_theorem
from proofkit.terms import parse_scheme, parse_term

from acceptance_log import record

T = parse_term


@pytest.fixture(scope="module")
def audit():
    started = time.perf_counter()
    report = run_audit(seed=1, samples=200, universe=8, extension_samples=10)
    return report, time.perf_counter() - started


def test_admissible_equals_correct(audit):
    report, seconds = audit
    c = report["counts"]
    ok = c["i_violations"] == 0 and c["i_decided"] >= 200 and seconds < 60
    record("admissible = correct on decided samples", ok,
           f"{c['i_decided']} decided, {c['i_violations']} violations, {seconds:.1f}s")
    assert ok


def test_derivable_implies_admissible(audit):
    report, _ = audit
    c = report["counts"]
    s = load_system(CORPUS / "counterexample.json")
    rule = load_rule_file(CORPUS / "b-to-c.json", s.space)
    b = Budget(8, 1)
    adm, der = check_admissible(s, rule, b).verdict, check_derivable(s, rule, b).verdict
    ok = c["ii_violations"] == 0 and adm is Verdict.YES and der is Verdict.NO
    record("derivable implies admissible; converse fails on b/c", ok,
           f"{c['ii_checked']} checked, b/c admissible={adm} derivable={der}")
    assert ok


def test_extension_behaviour(audit):
    report, _ = audit
    c = report["counts"]
    stable = c["iii_violations"] == 0 and c["iii_extensions"] == 10 * c["iii_checked"] and c["iii_checked"] > 0
    ratio = c["iv_refuted"] / c["iv_candidates"] if c["iv_candidates"] else 0.0
    ok = stable and c["iv_candidates"] > 0 and ratio >= 0.9
    record("derivability survives extensions; admissibility is refuted", ok,
           f"{c['iii_checked']} derivable rules x 10 extensions, "
           f"{c['iv_refuted']}/{c['iv_candidates']} refuted, {c['iv_unknown']} unknown")
    assert ok


def _elimination_cases():
    demo = load_system(CORPUS / "elim-demo.json")
    table = load_mimicry(CORPUS / "elim-demo-mimicry.json", demo.space)
    base, rule = demo.without_rule("T"), demo.rule("T")
    cases = [("corpus:" + n, base, rule, load_derivation(CORPUS / f"{n}.json", demo.space), table)
             for n in ("elim-demo-derivation", "elim-demo-erasing")]
    for i in range(300):
        case = sample_elimination_case(1, i)
        if case is not None:
            cases.append((f"sample:{i}", case.base, case.rule, case.derivation, case.mimicry))
    return cases


def test_elimination():
    runs, count_mismatch, other = 0, [], []
    for name, base, rule, d, table in _elimination_cases():
        initial = count_rule(d, rule.name)
        for strategy in STRATEGIES:
            runs += 1
            tr = eliminate_rule(base, rule, d, table, strategy, seed=7)
            sound = (
                is_valid(base, tr.final)
                and count_rule(tr.final, rule.name) == 0
                and tr.final.formula == d.formula
                and assumptions(tr.final) <= assumptions(d)
                and all(s.count_after < s.count_before for s in tr.steps)
            )
            if not sound:
                other.append((name, strategy))
            if tr.step_count != initial:
                count_mismatch.append((name, strategy))
    ok = not count_mismatch and not other
    record("elimination: terminates, sound, step count = initial rule nodes", ok,
           f"{runs} runs, {len(other)} unsound, {len(count_mismatch)} with step count != initial count")
    assert not other
    assert not count_mismatch, f"step count differs from initial count in {count_mismatch[:5]}..."


def test_system_comparison():
    report = run_comparisons(seed=1, samples=100, universe=8)
    s1 = load_system(CORPUS / "counterexample.json")
    s2 = load_system(CORPUS / "counterexample-ext.json")
    c = compare_systems(s1, s2, Budget(8, 1))
    constructed = (
        c.same_theorems is Verdict.YES
        and c.mutually_admissible is Verdict.YES
        and c.same_consequence is Verdict.NO
        and c.mutually_derivable is Verdict.NO
        and not c.discrepancies
    )
    decided = report["counts"]["theorems_law_decided"]
    ok = report["ok"] and constructed and decided > 0
    record("theorems <-> mutual admissibility, consequence <-> mutual derivability", ok,
           f"{decided}/100 pairs decided, {len(report['discrepancies'])} discrepancies, constructed pair ok={constructed}")
    assert ok


def test_step_expansion_keeps_two_steps():
    sig = load_signature(CORPUS / "fa-signature.json")
    ars = trs_step_expansion(sig, parse_scheme("f(?x)", sig), parse_scheme("?x", sig), 3)
    found = steps_between(ars, T("f(f(a))"), T("f(a)"))
    rel = induced_relation(ars)
    ok = len(found) == 2 and (T("f(f(a))"), T("f(a)")) in rel and len(rel) == len(set(rel))
    record("rewrite step expansion: 2 steps, one relation pair", ok,
           f"steps {[s.id for s in found]}, pair in relation {((T('f(f(a))'), T('f(a)')) in rel)}")
    assert ok


def _discharge_oracle(rule_name, enc):
    union = frozenset().union(*(p.antecedent for p in enc.prem))
    if rule_name == "impI":
        marker = re.search(r"(?:^|;)u=(\w+)", enc.id).group(1)
        return union - {Marked(enc.concl.succedent.args[0], marker)}
    return union


def test_sequent_encoding():
    n = load_system(CORPUS / "nd-minimal.json")
    s = encode_system(n, markers=2, max_antecedent=2)
    b = Budget(6, 5)
    proofs = {g: is_theorem(s, parse_sequent(g), b) for g in ("=> imp(a,a)", "=> imp(a,imp(b,a))")}
    proved = all(d.verdict is Verdict.YES and is_valid(s, d.witness) for d in proofs.values())
    rules = {r.name: r.rule for r in s.rules}
    checked = bad = 0
    for name, rule in rules.items():
        for enc in rule.enumerate(s.universe(Budget(4, 3))):
            checked += 1
            bad += enc.concl.antecedent != _discharge_oracle(name, enc)
    for d in proofs.values():
        if d.witness is None:
            continue
        for _, node in nodes(d.witness):
            if isinstance(node, RuleNode):
                enc = rules[node.rule].get_instance(node.instance, s.space)
                checked += 1
                bad += enc.concl.antecedent != _discharge_oracle(node.rule, enc)
    ok = proved and bad == 0
    record("sequent encoding: two implication theorems, set-difference law", ok,
           f"theorems proved={proved}, {checked} instances checked, {bad} violations")
    assert ok


def test_extensional_collapse():
    s = load_system(CORPUS / "and-elim.json")
    native = s.rule("AndE").rule
    collapsed = rule_from_relation(extensionalize(native))
    dups = intensional_duplicates(native)
    ok = len(native.instances) == 2 and len(collapsed.instances) == 1 and dups == [("i=1", "i=2")]
    record("and-elimination collapses to one instance", ok,
           f"native {len(native.instances)}, collapsed {len(collapsed.instances)}, duplicates {dups}")
    assert ok


C = str(CORPUS)
COMMANDS = [
    ["check", f"{C}/hilbert-min.json", f"{C}/skk-derivation.json", "--json"],
    ["prove", f"{C}/counterexample-ext.json", "--goal", "c", "--assume", "b", "--json"],
    ["theorems", f"{C}/hilbert-min.json", "--universe", "5", "--max-depth", "2", "--json"],
    ["classify", f"{C}/counterexample.json", "--rule", f"{C}/b-to-c.json", "--json"],
    ["compare", f"{C}/hilbert-min.json", f"{C}/hilbert-min-plus.json", "--universe", "3", "--json"],
    ["eliminate", f"{C}/elim-demo.json", "--rule", "T", "--derivation", f"{C}/elim-demo-erasing.json",
     "--mimicry", f"{C}/elim-demo-mimicry.json", "--strategy", "random", "--seed", "5", "--json"],
    ["audit", "--seed", "3", "--samples", "30", "--json"],
    ["ars", "expand", "--rule", "f(?x)->?x", "--sig", f"{C}/fa-signature.json", "--bound", "3", "--json"],
    ["ars", "steps", f"{C}/fa-ars.json", "--from", "f(f(a))", "--to", "f(a)"],
    ["nd", "classify", f"{C}/necessitation.json", "--rule", f"{C}/nec-open.json", "--universe", "2",
     "--markers", "1", "--max-antecedent", "1", "--json"],
]


def _run(argv):
    p = subprocess.run([sys.executable, "-m", "proofkit.cli", *argv], capture_output=True, timeout=300)
    return p.returncode, p.stdout, p.stderr


def test_determinism():
    differing = []
    for argv in COMMANDS:
        first, second = _run(argv), _run(argv)
        if first != second or not first[1]:
            differing.append(argv[0])
    ok = not differing
    record("determinism: 10 commands give byte-identical output", ok,
           f"{len(COMMANDS)} commands, differing: {differing or 'none'}")
    assert ok
