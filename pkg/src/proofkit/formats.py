"""JSON file formats for systems, rules, derivations, mimicry tables and ARSs.

Loading errors name the offending field by path, e.g. ``rules[1].concl``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .ands import (
    Ands,
    AndsExplicitRule,
    AndsInstance,
    AndsSchemeRule,
    AndsVariant,
    Marked,
    SequentPattern,
    SequentSpace,
    WeakeningRule,
    EncodedRule,
    parse_marked,
    sorted_marked,
    validate_ands,
)
from .aphs import (
    Aphs,
    Budget,
    ExplicitRule,
    Instance,
    NamedAxiom,
    NamedRule,
    SchemeRule,
    SchemeVariant,
    TermSpace,
    validate_system,
)
from .ars import Ars, ArsStep
from .derivation import AssumptionLeaf, AxiomLeaf, RuleNode
from .errors import IllFormedRule, ParseError, ValidationError
from .terms import Signature, Term, Var, parse_scheme, parse_term


def read_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


class _Reader:
    """Field access that reports the path of whatever is missing or malformed."""

    def __init__(self, data, where: str = ""):
        self.data = data
        self.where = where

    def _at(self, key) -> str:
        if isinstance(key, int):
            return f"{self.where}[{key}]"
        return f"{self.where}.{key}" if self.where else key

    def fail(self, msg: str, key=None):
        where = self._at(key) if key is not None else (self.where or "top level")
        raise ParseError(f"{where}: {msg}")

    def get(self, key, kind=None, default=...):
        if not isinstance(self.data, dict):
            self.fail("expected an object")
        if key not in self.data:
            if default is ...:
                self.fail("missing field", key)
            return default
        value = self.data[key]
        if kind is not None and not isinstance(value, kind):
            self.fail(f"expected {kind.__name__ if isinstance(kind, type) else 'another type'}", key)
        return value

    def sub(self, key) -> "_Reader":
        return _Reader(self.data[key] if isinstance(key, int) else self.get(key), self._at(key))

    def items(self, key, default=...) -> list["_Reader"]:
        value = self.get(key, list, default)
        return [_Reader(v, f"{self._at(key)}[{i}]") for i, v in enumerate(value or [])]

    def parse(self, key, fn, default=...):
        value = self.get(key, str, default)
        if value is None or value is default:
            return value
        try:
            return fn(value)
        except ParseError as e:
            self.fail(str(e), key)

    def parse_list(self, key, fn, default=...):
        values = self.get(key, list, default)
        out = []
        for i, v in enumerate(values or []):
            if not isinstance(v, str):
                self.fail("expected a string", key)
            try:
                out.append(fn(v))
            except ParseError as e:
                raise ParseError(f"{self._at(key)}[{i}]: {e}") from None
        return out


# -- signatures and spaces ------------------------------------------------

def _signature(r: _Reader) -> Signature:
    items = r.get("signature", list)
    try:
        return Signature.parse(items)
    except (ValueError, TypeError) as e:
        r.fail(str(e), "signature")


def _term_space(r: _Reader) -> TermSpace:
    return TermSpace(_signature(r), r.get("max_size", int, None))


def _space(r: _Reader):
    terms = _term_space(r)
    kind = r.get("formulas", str, "term")
    if kind == "term":
        return terms
    if kind == "sequent":
        markers = r.get("markers", list)
        return SequentSpace(terms, markers, r.get("max_antecedent", int, None))
    r.fail(f"unknown formula kind {kind!r}", "formulas")


def _pattern(space, text: str):
    if "?" in text:
        return space.parse_pattern(text)
    return space.parse(text)


# -- rules ----------------------------------------------------------------

def _instance(r: _Reader, space) -> Instance:
    return Instance(r.get("id", str), tuple(r.parse_list("prem", space.parse)), r.parse("concl", space.parse))


def _scheme_variant(r: _Reader, space, label: str = "") -> SchemeVariant:
    prem = tuple(r.parse_list("prem", lambda t: _pattern(space, t)))
    return SchemeVariant(r.get("label", str, label), prem, r.parse("concl", lambda t: _pattern(space, t)))


def load_rule(r: _Reader, space):
    kind = r.get("kind", str)
    try:
        if kind == "explicit":
            return ExplicitRule(_instance(x, space) for x in r.items("instances"))
        if kind == "scheme":
            if "variants" in r.data:
                return SchemeRule(_scheme_variant(v, space) for v in r.items("variants"))
            return SchemeRule([_scheme_variant(r, space)])
        if kind == "weakening":
            return WeakeningRule()
    except IllFormedRule as e:
        r.fail(str(e))
    r.fail(f"unknown rule kind {kind!r}", "kind")


def dump_rule(rule) -> dict:
    if isinstance(rule, ExplicitRule):
        return {
            "kind": "explicit",
            "instances": [
                {"id": i.id, "prem": [str(p) for p in i.prem], "concl": str(i.concl)} for i in rule.instances
            ],
        }
    if isinstance(rule, SchemeRule):
        variants = [
            {"label": v.label, "prem": [_scheme_str(p) for p in v.prem], "concl": _scheme_str(v.concl)}
            for v in rule.variants
        ]
        if len(variants) == 1 and not variants[0]["label"]:
            return {"kind": "scheme", "prem": variants[0]["prem"], "concl": variants[0]["concl"]}
        return {"kind": "scheme", "variants": variants}
    if isinstance(rule, WeakeningRule):
        return {"kind": "weakening"}
    raise TypeError(f"cannot serialize rule {rule!r}")


def _scheme_str(p) -> str:
    return f"?{p.name}" if isinstance(p, Var) else str(p)


# -- systems --------------------------------------------------------------

def system_from_data(data) -> Aphs | Ands:
    r = _Reader(data)
    if r.get("type", str, "aphs") == "ands":
        return _ands_from_data(r)
    space = _space(r)
    axioms = tuple(
        NamedAxiom(a.get("name", str), a.parse("formula", lambda t: _pattern(space, t))) for a in r.items("axioms", [])
    )
    rules = tuple(NamedRule(x.get("name", str), load_rule(x, space)) for x in r.items("rules", []))
    s = Aphs(space, axioms, rules)
    diags = validate_system(s)
    if diags:
        raise ValidationError(diags)
    return s


def load_system(path) -> Aphs | Ands:
    try:
        return system_from_data(read_json(path))
    except ParseError as e:
        raise ParseError(f"{path}: {e}") from None


def dump_system(s: Aphs) -> dict:
    space = s.space
    terms = space.terms if isinstance(space, SequentSpace) else space
    out = {"signature": terms.signature.to_list()}
    if terms.max_size is not None:
        out["max_size"] = terms.max_size
    if isinstance(space, SequentSpace):
        out["formulas"] = "sequent"
        out["markers"] = list(space.markers)
        if space.max_antecedent is not None:
            out["max_antecedent"] = space.max_antecedent
    out["axioms"] = [{"name": a.name, "formula": _scheme_str(a.formula)} for a in s.axioms]
    out["rules"] = [{"name": r.name, **dump_rule(r.rule)} for r in s.rules]
    return out


def materialize(s: Aphs, b: Budget) -> Aphs:
    """Replace every rule by the explicit list of its instances in the budgeted universe.

    The result's term space is bounded by the universe, so the explicit
    rules are the complete rules of that finite formula set.
    """
    universe = s.universe(b)
    rules = tuple(
        NamedRule(r.name, r.rule if isinstance(r.rule, ExplicitRule) else ExplicitRule(r.rule.enumerate(universe)))
        for r in s.rules
    )
    space = s.space
    if isinstance(space, SequentSpace):
        space = SequentSpace(TermSpace(space.signature, universe.terms.max_size), space.markers, space.max_antecedent)
    else:
        space = TermSpace(space.signature, universe.max_size)
    return Aphs(space, s.axioms, rules)


# -- ND systems -----------------------------------------------------------

def _marked_list(r: _Reader, key, sig, allow_vars: bool) -> list:
    out = []
    for m in r.items(key, []):
        formula = m.get("formula", str)
        marker = m.get("marker", str)
        try:
            out.append(parse_marked(f"{formula}:{marker}", sig, allow_vars))
        except ParseError as e:
            m.fail(str(e))
    return out


def _pmassm(r: _Reader, sig, allow_vars: bool, arity: int) -> list:
    per = r.get("pmassm", list, [[] for _ in range(arity)])
    if len(per) != arity:
        r.fail(f"needs {arity} entries, one per premise", "pmassm")
    out = []
    for i, items in enumerate(per):
        sub = _Reader({"x": items}, f"{r._at('pmassm')}[{i}]")
        out.append(_marked_list(sub, "x", sig, allow_vars))
    return out


def load_ands_rule(r: _Reader, space: TermSpace):
    sig = space.signature
    kind = r.get("kind", str)
    if kind == "explicit":
        insts = []
        for x in r.items("instances"):
            prem = tuple(x.parse_list("prem", space.parse))
            pm = tuple(frozenset(s) for s in _pmassm(x, sig, False, len(prem)))
            dm = frozenset(_marked_list(x, "dmassm", sig, False))
            insts.append(AndsInstance(x.get("id", str), prem, x.parse("concl", space.parse), pm, dm))
        return AndsExplicitRule(insts)
    if kind == "scheme":
        variants = r.items("variants") if "variants" in r.data else [r]
        out = []
        for v in variants:
            prem = tuple(v.parse_list("prem", space.parse_pattern))
            pm = tuple(tuple(s) for s in _pmassm(v, sig, True, len(prem)))
            dm = tuple(_marked_list(v, "dmassm", sig, True))
            out.append(AndsVariant(v.get("label", str, ""), prem, pm, dm, v.parse("concl", space.parse_pattern)))
        return AndsSchemeRule(out, context=r.get("context", bool, True))
    r.fail(f"unknown rule kind {kind!r}", "kind")


def _ands_from_data(r: _Reader) -> Ands:
    space = _term_space(r)
    axioms = tuple(NamedAxiom(a.get("name", str), a.parse("formula", lambda t: _pattern(space, t))) for a in r.items("axioms", []))
    rules = tuple(NamedRule(x.get("name", str), load_ands_rule(x, space)) for x in r.items("rules", []))
    n = Ands(space, axioms, rules)
    diags = validate_ands(n)
    if diags:
        raise ValidationError(diags)
    return n


def _marked_data(items) -> list:
    return [{"formula": _scheme_str(m.formula), "marker": _scheme_str(m.marker)} for m in sorted_marked(items)]


def dump_ands_rule(rule) -> dict:
    if isinstance(rule, AndsExplicitRule):
        return {
            "kind": "explicit",
            "instances": [
                {
                    "id": i.id,
                    "prem": [str(p) for p in i.prem],
                    "concl": str(i.concl),
                    "pmassm": [_marked_data(s) for s in i.pmassm],
                    "dmassm": _marked_data(i.dmassm),
                }
                for i in rule.instances
            ],
        }
    variants = [
        {
            "label": v.label,
            "prem": [_scheme_str(p) for p in v.prem],
            "pmassm": [[{"formula": _scheme_str(m.formula), "marker": _scheme_str(m.marker)} for m in s] for s in v.pmassm],
            "dmassm": [{"formula": _scheme_str(m.formula), "marker": _scheme_str(m.marker)} for m in v.dmassm],
            "concl": _scheme_str(v.concl),
        }
        for v in rule.variants
    ]
    return {"kind": "scheme", "context": rule.context, "variants": variants}


# -- rules, derivations, mimicry, ARS files -------------------------------

def load_rule_file(path, space):
    """A rule file holds one rule object (``kind`` plus its fields)."""
    r = _Reader(read_json(path))
    if isinstance(space, TermSpace) and r.get("type", str, "aphs") == "ands":
        return load_ands_rule(r, space)
    return load_rule(r, space)


def load_ands_rule_file(path, space: TermSpace):
    return load_ands_rule(_Reader(read_json(path)), space)


def derivation_from_data(data, space, where: str = ""):
    r = _Reader(data, where)
    kind = r.get("kind", str)
    formula = r.parse("formula", space.parse)
    if kind == "axiom":
        return AxiomLeaf(r.get("name", str), formula)
    if kind == "assume":
        return AssumptionLeaf(formula)
    if kind == "rule":
        prem = r.get("premises", list, [])
        subs = tuple(derivation_from_data(p, space, f"{r._at('premises')}[{i}]") for i, p in enumerate(prem))
        return RuleNode(r.get("rule", str), r.get("instance", str), formula, subs)
    r.fail(f"unknown node kind {kind!r}", "kind")


def derivation_to_data(d) -> dict:
    if isinstance(d, AxiomLeaf):
        return {"kind": "axiom", "name": d.name, "formula": str(d.formula)}
    if isinstance(d, AssumptionLeaf):
        return {"kind": "assume", "formula": str(d.formula)}
    return {
        "kind": "rule",
        "rule": d.rule,
        "instance": d.instance,
        "formula": str(d.formula),
        "premises": [derivation_to_data(p) for p in d.premises],
    }


def load_derivation(path, space):
    return derivation_from_data(read_json(path), space)


def load_mimicry(path, space) -> dict:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a map from instance ids to derivations")
    return {iid: derivation_from_data(d, space, iid) for iid, d in data.items()}


def mimicry_to_data(table: dict) -> dict:
    return {iid: derivation_to_data(d) for iid, d in sorted(table.items())}


def ars_from_data(data) -> Ars:
    r = _Reader(data)
    objects = r.parse_list("objects", parse_term)
    steps = []
    for x in r.items("steps"):
        steps.append(ArsStep(x.get("id", str), x.parse("src", parse_term), x.parse("tgt", parse_term), x.get("label", str, None)))
    return Ars(objects, steps)


def load_ars(path) -> Ars:
    return ars_from_data(read_json(path))


def ars_to_data(ars: Ars) -> dict:
    steps = []
    for st in ars.steps:
        item = {"id": st.id, "src": str(st.src), "tgt": str(st.tgt)}
        if st.label is not None:
            item["label"] = st.label
        steps.append(item)
    return {"objects": [str(o) for o in ars.objects], "steps": steps}


def load_signature(path) -> Signature:
    return _signature(_Reader(read_json(path)))
