"""``proofkit`` command line.

Exit codes: 0 valid/proved/affirmed, 1 invalid/refuted, 2 unknown, 3 usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formats
from .ands import Ands, check_nd_admissible, check_nd_derivable, encode_system
from .analysis import classify_rule, compare_systems
from .aphs import Aphs, Budget
from .ars import format_position, induced_relation, steps_between, trs_step_expansion
from .derivation import assumptions, check_derivation, conclusion, render
from .elimination import STRATEGIES, eliminate_rule
from .errors import MimicryError, MissingMimicry, ProofkitError, ValidationError
from .sampling import run_audit
from .search import Proved, Verdict, derives, theorem_set
from .terms import parse_scheme, parse_term

OK, REFUTED, UNKNOWN, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _budget(args) -> Budget:
    try:
        return Budget(args.max_depth, args.universe, args.max_nodes)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _aphs(path) -> Aphs:
    s = formats.load_system(path)
    if isinstance(s, Ands):
        raise UsageError(f"{path} is a natural-deduction system; use 'proofkit nd'")
    return s


def _ands(path) -> Ands:
    n = formats.load_system(path)
    if not isinstance(n, Ands):
        raise UsageError(f"{path} is not a natural-deduction system")
    return n


def _sorted_strs(fs, space) -> list[str]:
    return [str(f) for f in sorted(fs, key=space.sort_key)]


def _fragment_data(frag, with_witnesses: bool = True) -> dict:
    out = {"verdict": str(frag.verdict), "fragment": frag.fragment, "checked": frag.checked}
    if frag.counterexample is not None:
        out["counterexample"] = str(frag.counterexample)
    if with_witnesses and frag.witnesses:
        out["witnesses"] = {iid: formats.derivation_to_data(d) for iid, d in sorted(frag.witnesses.items())}
    return out


def _verdict_line(name: str, frag) -> str:
    line = f"{name}: {frag.verdict}"
    if frag.fragment and frag.verdict is Verdict.YES:
        line += " (on the enumerated fragment)"
    if frag.counterexample is not None:
        line += f"; counterexample {frag.counterexample}"
    return line


# -- commands -------------------------------------------------------------

def cmd_check(args):
    s = _aphs(args.system)
    d = formats.load_derivation(args.derivation, s.space)
    defects = check_derivation(s, d)
    data = {"valid": not defects, "defects": [str(x) for x in defects]}
    if defects:
        return REFUTED, data, "invalid\n" + "\n".join(data["defects"])
    data["conclusion"] = str(conclusion(d))
    data["assumptions"] = _sorted_strs(assumptions(d), s.space)
    text = f"valid\nconclusion: {data['conclusion']}\nassumptions: {{{', '.join(data['assumptions'])}}}"
    return OK, data, text


def cmd_prove(args):
    s = _aphs(args.system)
    goal = s.space.parse(args.goal)
    gamma = [s.space.parse(a) for a in args.assume]
    result = derives(s, gamma, goal, _budget(args))
    if isinstance(result, Proved):
        data = {"result": "proved", "depth": result.depth, "derivation": formats.derivation_to_data(result.derivation)}
        return OK, data, f"proved at depth {result.depth}\n{render(result.derivation)}"
    if result.saturated:
        return REFUTED, {"result": "refuted"}, "refuted: the closure saturated without the goal"
    return UNKNOWN, {"result": "unknown"}, "unknown: budget exhausted before saturation"


def cmd_theorems(args):
    s = _aphs(args.system)
    ts = theorem_set(s, _budget(args))
    data = {"theorems": _sorted_strs(ts.formulas, s.space), "saturated": ts.saturated}
    text = "\n".join(data["theorems"] + [f"saturated: {'yes' if ts.saturated else 'no'}"])
    return (OK if ts.saturated else UNKNOWN), data, text


def _status_exit(verdicts) -> int:
    return OK if all(v.decided for v in verdicts) else UNKNOWN


def cmd_classify(args):
    s = _aphs(args.system)
    rule = formats.load_rule_file(args.rule, s.space)
    st = classify_rule(s, rule, _budget(args))
    data = {
        "derivable": _fragment_data(st.derivable),
        "correct": _fragment_data(st.correct),
        "admissible": _fragment_data(st.admissible),
    }
    lines = [_verdict_line(k, getattr(st, k)) for k in ("derivable", "correct", "admissible")]
    for iid, d in sorted(st.witnesses.items()):
        lines.append(f"witness for {iid}:")
        lines.append(render(d, fmt=s.space.format))
    verdicts = (st.derivable.verdict, st.correct.verdict, st.admissible.verdict)
    return _status_exit(verdicts), data, "\n".join(lines)


def cmd_eliminate(args):
    ext = _aphs(args.system)
    named = ext.rule(args.rule)
    if named is None:
        raise UsageError(f"no rule named {args.rule!r} in {args.system}")
    base = ext.without_rule(args.rule)
    d = formats.load_derivation(args.derivation, ext.space)
    defects = check_derivation(ext, d)
    if defects:
        return REFUTED, {"error": f"derivation invalid: {defects[0]}"}, f"derivation invalid: {defects[0]}"
    table = formats.load_mimicry(args.mimicry, ext.space)
    try:
        trace = eliminate_rule(base, named, d, table, args.strategy, args.seed)
    except (MissingMimicry, MimicryError) as e:
        return REFUTED, {"error": str(e)}, str(e)
    steps = [
        {
            "path": list(st.path),
            "instance": st.instance,
            "before": st.count_before,
            "after": st.count_after,
            "mpo_decrease": st.mpo_decrease,
        }
        for st in trace.steps
    ]
    final_defects = check_derivation(base, trace.final)
    data = {
        "steps": steps,
        "step_count": trace.step_count,
        "final": formats.derivation_to_data(trace.final),
        "valid_in_base": not final_defects,
    }
    lines = [f"step {i + 1}: {st['instance']} at {st['path']} ({st['before']} -> {st['after']})" for i, st in enumerate(steps)]
    lines.append(f"steps: {trace.step_count}")
    lines.append(render(trace.final))
    return (OK if not final_defects else REFUTED), data, "\n".join(lines)


def cmd_compare(args):
    s1, s2 = _aphs(args.system1), _aphs(args.system2)
    c = compare_systems(s1, s2, _budget(args))
    data = {
        "same_theorems": str(c.same_theorems),
        "same_consequence": str(c.same_consequence),
        "mutually_admissible": str(c.mutually_admissible),
        "mutually_derivable": str(c.mutually_derivable),
        "discrepancies": c.discrepancies,
    }
    lines = [f"{k.replace('_', ' ')}: {v}" for k, v in data.items() if k != "discrepancies"]
    lines += [f"discrepancy: {x}" for x in c.discrepancies]
    if c.discrepancies:
        code = REFUTED
    else:
        code = _status_exit([c.same_theorems, c.same_consequence, c.mutually_admissible, c.mutually_derivable])
    return code, data, "\n".join(lines)


def cmd_audit(args):
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.universe < 1:
        raise UsageError("--universe must be at least 1")
    report = run_audit(args.seed, args.samples, args.universe, args.extensions)
    report.pop("_seconds", None)
    c = report["counts"]
    lines = [f"{k}: {v}" for k, v in c.items()]
    lines.append(f"violations: {len(report['violations'])}")
    return (OK if report["ok"] else REFUTED), report, "\n".join(lines)


def cmd_ars_relation(args):
    ars = formats.load_ars(args.file)
    pairs = sorted(induced_relation(ars), key=lambda p: (p[0].key, p[1].key))
    data = {"pairs": [[str(a), str(b)] for a, b in pairs], "steps": len(ars.steps)}
    return OK, data, "\n".join(f"{a} -> {b}" for a, b in data["pairs"])


def cmd_ars_steps(args):
    ars = formats.load_ars(args.file)
    found = steps_between(ars, parse_term(args.src), parse_term(args.tgt))
    data = {"steps": [st.id for st in found]}
    return OK, data, "\n".join(data["steps"])


def cmd_ars_expand(args):
    lhs_text, sep, rhs_text = args.rule.partition("->")
    if not sep:
        raise UsageError("--rule must look like 'lhs -> rhs'")
    sig = formats.load_signature(args.sig)
    ars = trs_step_expansion(sig, parse_scheme(lhs_text, sig), parse_scheme(rhs_text, sig), args.bound)
    data = formats.ars_to_data(ars)
    lines = [f"{st.id}: {st.src} -> {st.tgt}" for st in ars.steps]
    return OK, data, "\n".join(lines)


def cmd_nd_encode(args):
    n = _ands(args.system)
    s = encode_system(n, args.markers, args.max_antecedent)
    out = formats.materialize(s, Budget(max_universe_size=args.universe))
    data = formats.dump_system(out)
    Path(args.output).write_text(formats.dumps(data), encoding="utf-8")
    counts = {r["name"]: len(r.get("instances", [])) for r in data["rules"]}
    summary = {"output": args.output, "axioms": len(data["axioms"]), "rule_instances": counts}
    text = f"wrote {args.output}\n" + "\n".join(f"{k}: {v} instances" for k, v in counts.items())
    return OK, summary, text


def cmd_nd_classify(args):
    n = _ands(args.system)
    rule = formats.load_ands_rule_file(args.rule, n.space)
    b = _budget(args)
    der = check_nd_derivable(n, rule, b, args.markers, args.max_antecedent)
    adm = check_nd_admissible(n, rule, b, args.markers, args.max_antecedent)
    data = {
        "derivable": _fragment_data(der),
        "admissible": _fragment_data(adm.result),
        "admissible_with_weakening": str(adm.with_weakening.verdict),
        "weakening_sensitive": adm.weakening_sensitive,
    }
    lines = [_verdict_line("derivable", der), _verdict_line("admissible", adm.result)]
    if adm.weakening_sensitive:
        lines.append(f"note: with weakening, admissible would be {adm.with_weakening.verdict}")
    return _status_exit([der.verdict, adm.result.verdict]), data, "\n".join(lines)


# -- parser ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print structured output")

    budget = _Parser(add_help=False)
    budget.add_argument("--max-depth", type=int, default=16)
    budget.add_argument("--universe", type=int, default=8, help="bound on term size")
    budget.add_argument("--max-nodes", type=int, default=200_000)

    p = _Parser(prog="proofkit", description="Hilbert and natural-deduction rule analysis")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check a derivation")
    c.add_argument("system")
    c.add_argument("derivation")
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("prove", parents=[common, budget], help="search for a derivation")
    c.add_argument("system")
    c.add_argument("--goal", required=True)
    c.add_argument("--assume", action="append", default=[])
    c.set_defaults(fn=cmd_prove)

    c = sub.add_parser("theorems", parents=[common, budget], help="list theorems in the universe")
    c.add_argument("system")
    c.set_defaults(fn=cmd_theorems)

    c = sub.add_parser("classify", parents=[common, budget], help="derivable / correct / admissible")
    c.add_argument("system")
    c.add_argument("--rule", required=True)
    c.set_defaults(fn=cmd_classify)

    c = sub.add_parser("eliminate", parents=[common], help="eliminate a rule from a derivation")
    c.add_argument("system", help="system that contains the rule")
    c.add_argument("--rule", required=True)
    c.add_argument("--derivation", required=True)
    c.add_argument("--mimicry", required=True)
    c.add_argument("--strategy", choices=STRATEGIES, default="leftmost-innermost")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(fn=cmd_eliminate)

    c = sub.add_parser("compare", parents=[common, budget], help="compare two systems")
    c.add_argument("system1")
    c.add_argument("system2")
    c.set_defaults(fn=cmd_compare)

    c = sub.add_parser("audit", parents=[common], help="randomized audit of rule-status laws")
    c.add_argument("--seed", type=int, default=1)
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--universe", type=int, default=8, help="maximum number of terms per sampled system")
    c.add_argument("--extensions", type=int, default=10)
    c.set_defaults(fn=cmd_audit)

    ars = sub.add_parser("ars", help="abstract rewriting systems")
    ars_sub = ars.add_subparsers(dest="ars_command", required=True, parser_class=_Parser)
    c = ars_sub.add_parser("relation", parents=[common])
    c.add_argument("file")
    c.set_defaults(fn=cmd_ars_relation)
    c = ars_sub.add_parser("steps", parents=[common])
    c.add_argument("file")
    c.add_argument("--from", dest="src", required=True)
    c.add_argument("--to", dest="tgt", required=True)
    c.set_defaults(fn=cmd_ars_steps)
    c = ars_sub.add_parser("expand", parents=[common])
    c.add_argument("--rule", required=True)
    c.add_argument("--sig", required=True)
    c.add_argument("--bound", type=int, required=True)
    c.set_defaults(fn=cmd_ars_expand)

    nd = sub.add_parser("nd", help="natural-deduction systems via the sequent encoding")
    nd_sub = nd.add_subparsers(dest="nd_command", required=True, parser_class=_Parser)
    encoding = _Parser(add_help=False)
    encoding.add_argument("--markers", type=int, default=2)
    encoding.add_argument("--max-antecedent", type=int, default=2)
    c = nd_sub.add_parser("encode", parents=[common, encoding])
    c.add_argument("system")
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--universe", type=int, default=5, help="bound on term size")
    c.set_defaults(fn=cmd_nd_encode)
    c = nd_sub.add_parser("classify", parents=[common, budget, encoding])
    c.add_argument("system")
    c.add_argument("--rule", required=True)
    c.set_defaults(fn=cmd_nd_classify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        code, data, text = args.fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE
    except (ProofkitError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    if args.json:
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
