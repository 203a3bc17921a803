"""Ground terms over a signature, schemes with meta-variables, matching.

Formulas are first-order terms without binders.  A scheme is a term whose
leaves may be meta-variables (written ``?X``); instances are obtained by
substituting ground terms for the meta-variables.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, UnboundMetaVar

IDENT = r"[^\W][\w']*"
_IDENT_RE = re.compile(rf"^{IDENT}$")
_TOKEN_RE = re.compile(rf"\s*(?:(\?{IDENT})|({IDENT})|([(),]))")


@dataclass(frozen=True, order=True)
class Symbol:
    name: str
    arity: int

    def __post_init__(self):
        if not _IDENT_RE.match(self.name):
            raise ValueError(f"bad symbol name {self.name!r}")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name!r}")

    def __str__(self):
        return f"{self.name}/{self.arity}"

    @classmethod
    def parse(cls, text: str) -> "Symbol":
        name, sep, arity = text.strip().rpartition("/")
        if not sep or not arity.strip().isdigit():
            raise ParseError(f"expected 'name/arity', got {text!r}")
        return cls(name.strip(), int(arity))


class Signature:
    """A finite set of function symbols; at least one constant."""

    def __init__(self, symbols: Iterable[Symbol]):
        symbols = tuple(sorted(symbols))
        seen: dict[str, Symbol] = {}
        for sym in symbols:
            if sym.name in seen:
                raise ValueError(f"symbol {sym.name!r} declared twice")
            seen[sym.name] = sym
        if not any(s.arity == 0 for s in symbols):
            raise ValueError("signature needs at least one constant")
        self.symbols = symbols
        self._arity = {s.name: s.arity for s in symbols}

    @classmethod
    def parse(cls, items: Iterable[str]) -> "Signature":
        return cls(Symbol.parse(i) for i in items)

    def arity(self, name: str) -> int | None:
        return self._arity.get(name)

    def __contains__(self, name):
        return name in self._arity

    def __eq__(self, other):
        return isinstance(other, Signature) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Signature({[str(s) for s in self.symbols]})"

    def extend(self, symbols: Iterable[Symbol]) -> "Signature":
        return Signature(self.symbols + tuple(symbols))

    @property
    def constants(self):
        return [s for s in self.symbols if s.arity == 0]

    def to_list(self) -> list[str]:
        return [str(s) for s in self.symbols]


class Var:
    """A meta-variable.  ``sort`` is ``"term"`` or ``"marker"``."""

    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: str = "term"):
        self.name = name
        self.sort = sort

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name and other.sort == self.sort

    def __hash__(self):
        return hash(("?", self.name, self.sort))

    def __repr__(self):
        return f"?{self.name}"

    __str__ = __repr__

    @property
    def size(self):
        return 1

    @property
    def ground(self):
        return False


class Term:
    """Immutable term ``head(args...)``.  Args may be :class:`Var` in schemes."""

    __slots__ = ("head", "args", "_hash", "size", "ground", "_key")

    def __init__(self, head: str, args: tuple = ()):
        self.head = head
        self.args = tuple(args)
        self._hash = hash((head, self.args))
        self.size = 1 + sum(a.size for a in self.args)
        self.ground = all(a.ground for a in self.args)
        self._key = None

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Term)
            and self._hash == other._hash
            and self.head == other.head
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return term_key(self) < term_key(other)

    def __repr__(self):
        return f"Term({str(self)!r})"

    def __str__(self):
        if not self.args:
            return self.head
        return f"{self.head}({','.join(str(a) for a in self.args)})"

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.size, tuple(_preorder(self)))
        return self._key


Scheme = Term | Var


def _preorder(t) -> Iterator[str]:
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            yield "?" + node.name
        else:
            yield node.head
            stack.extend(reversed(node.args))


def term_key(t) -> tuple:
    """Size-then-lexicographic sort key (lexicographic on preorder symbol names)."""
    if isinstance(t, Var):
        return (1, ("?" + t.name,))
    return t.key


def term_size(t) -> int:
    return t.size


def const(name: str) -> Term:
    return Term(name)


def app(head: str, *args) -> Term:
    return Term(head, args)


# -- parsing ---------------------------------------------------------------

def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        var, ident, punct = m.groups()
        if var:
            out.append(("var", var[1:]))
        elif ident:
            out.append(("id", ident))
        else:
            out.append((punct, punct))
        pos = m.end()
    return out


def parse_scheme(text: str, sig: Signature | None = None, *, allow_vars: bool = True):
    """Parse ``name``, ``name(t1,...,tk)`` or ``?X``.

    With a signature the arities are checked.
    """
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty term")
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"unexpected end of {text!r}")
        kind, val = toks[pos]
        pos += 1
        if kind == "var":
            if not allow_vars:
                raise ParseError(f"meta-variable ?{val} in ground term {text!r}")
            return Var(val)
        if kind != "id":
            raise ParseError(f"unexpected {val!r} in {text!r}")
        args = []
        if pos < len(toks) and toks[pos][0] == "(":
            pos += 1
            while True:
                args.append(parse())
                if pos >= len(toks):
                    raise ParseError(f"unclosed '(' in {text!r}")
                k = toks[pos][0]
                pos += 1
                if k == ")":
                    break
                if k != ",":
                    raise ParseError(f"expected ',' or ')' in {text!r}")
        if sig is not None:
            ar = sig.arity(val)
            if ar is None:
                raise ParseError(f"unknown symbol {val!r} in {text!r}")
            if ar != len(args):
                raise ParseError(f"{val!r} has arity {ar}, got {len(args)} arguments in {text!r}")
        return Term(val, tuple(args))

    result = parse()
    if pos != len(toks):
        raise ParseError(f"trailing input in {text!r}")
    return result


def parse_term(text: str, sig: Signature | None = None) -> Term:
    return parse_scheme(text, sig, allow_vars=False)


# -- substitution and matching --------------------------------------------

def scheme_vars(s) -> set:
    if isinstance(s, Var):
        return {s}
    out = set()
    for a in s.args:
        if not a.ground:
            out |= scheme_vars(a)
    return out


def apply_substitution(s, sigma: Mapping[str, Term]) -> Term:
    if isinstance(s, Var):
        try:
            return sigma[s.name]
        except KeyError:
            raise UnboundMetaVar(f"?{s.name} is not bound") from None
    if s.ground:
        return s
    return Term(s.head, tuple(apply_substitution(a, sigma) for a in s.args))


def partial_apply(s, sigma: Mapping[str, Term]):
    """Substitute the bound meta-variables; unbound ones stay in place."""
    if isinstance(s, Var):
        return sigma.get(s.name, s)
    if s.ground:
        return s
    return Term(s.head, tuple(partial_apply(a, sigma) for a in s.args))


def match_into(s, t: Term, sigma: dict) -> bool:
    """Extend ``sigma`` in place so that ``s`` instantiates to ``t``."""
    if isinstance(s, Var):
        bound = sigma.get(s.name)
        if bound is None:
            sigma[s.name] = t
            return True
        return bound == t
    if s.ground:
        return s == t
    if not isinstance(t, Term) or s.head != t.head or len(s.args) != len(t.args):
        return False
    return all(match_into(a, b, sigma) for a, b in zip(s.args, t.args))


def match_scheme(s, t: Term, sigma: Mapping | None = None) -> dict | None:
    """One-way matching; repeated meta-variables must match equal subterms."""
    out = dict(sigma or {})
    return out if match_into(s, t, out) else None


def format_binding(value) -> str:
    if isinstance(value, (frozenset, set)):
        return "{" + ",".join(sorted(f"{f}:{m}" for f, m in value)) + "}"
    return str(value)


def format_substitution(sigma: Mapping) -> str:
    return ";".join(f"{k}={format_binding(v)}" for k, v in sorted(sigma.items()))


# -- enumeration ----------------------------------------------------------

def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class TermUniverse:
    """All ground terms over ``sig`` with at most ``max_size`` nodes.

    Buckets per size are built lazily and cached.
    """

    def __init__(self, sig: Signature, max_size: int):
        if max_size < 1:
            raise ValueError("max_size must be >= 1")
        self.signature = sig
        self.max_size = max_size
        self._buckets: dict[int, list[Term]] = {}

    @property
    def terms(self) -> "TermUniverse":
        return self

    markers: tuple = ()

    def of_size(self, n: int) -> list[Term]:
        if n < 1 or n > self.max_size:
            return []
        if n not in self._buckets:
            out = []
            for sym in self.signature.symbols:
                if sym.arity == 0:
                    if n == 1:
                        out.append(Term(sym.name))
                    continue
                for sizes in _compositions(n - 1, sym.arity):
                    pools = [self.of_size(k) for k in sizes]
                    for combo in _product(pools):
                        out.append(Term(sym.name, combo))
            out.sort(key=term_key)
            self._buckets[n] = out
        return self._buckets[n]

    def __iter__(self):
        for n in range(1, self.max_size + 1):
            yield from self.of_size(n)

    def count(self, limit: int | None = None) -> int:
        total = 0
        for n in range(1, self.max_size + 1):
            total += len(self.of_size(n))
            if limit is not None and total > limit:
                return total
        return total

    def __contains__(self, t) -> bool:
        return isinstance(t, Term) and t.ground and t.size <= self.max_size and well_formed(t, self.signature)

    def __eq__(self, other):
        return (
            isinstance(other, TermUniverse)
            and other.signature == self.signature
            and other.max_size == self.max_size
        )

    def __hash__(self):
        return hash((self.signature, self.max_size))


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for rest in _product(pools[1:]):
            yield (head,) + rest


def enumerate_terms(sig: Signature, max_size: int) -> list[Term]:
    """All terms with at most ``max_size`` nodes, size-then-lexicographic."""
    return list(TermUniverse(sig, max_size))


def well_formed(t, sig: Signature) -> bool:
    if isinstance(t, Var):
        return True
    if sig.arity(t.head) != len(t.args):
        return False
    return all(well_formed(a, sig) for a in t.args)


def size_profile(s) -> tuple[int, Counter]:
    """Split a scheme's size into a fixed part and per-variable occurrence counts."""
    if isinstance(s, Var):
        return 0, Counter({s.name: 1})
    base, counts = 1, Counter()
    for a in s.args:
        b, c = size_profile(a)
        base += b
        counts.update(c)
    return base, counts


def bounded_assignments(
    variables: list[Var],
    universe,
    profiles: list[tuple[int, Counter]],
    sigma: Mapping | None = None,
) -> Iterator[dict]:
    """Extend ``sigma`` over ``variables`` so every profiled scheme fits the universe.

    ``profiles`` are (fixed size, variable counts) pairs as from
    :func:`size_profile`; term variables are assigned universe terms
    smallest first, marker variables range over ``universe.markers``.
    """
    sigma = dict(sigma or {})
    terms = universe.terms
    bound = terms.max_size
    todo = [v for v in variables if v.name not in sigma]

    def current_sizes():
        out = []
        for base, counts in profiles:
            total = base
            for name, k in counts.items():
                val = sigma.get(name)
                total += k * (val.size if isinstance(val, Term) else 1)
            out.append(total)
        return out

    def rec(i):
        if i == len(todo):
            yield dict(sigma)
            return
        var = todo[i]
        if var.sort == "marker":
            for m in universe.markers:
                sigma[var.name] = m
                yield from rec(i + 1)
            del sigma[var.name]
            return
        # sizes assume every unassigned variable takes a size-1 term
        slack = bound
        for (base, counts), cur in zip(profiles, current_sizes()):
            k = counts.get(var.name, 0)
            if k:
                slack = min(slack, 1 + (bound - cur) // k)
        for n in range(1, slack + 1):
            for t in terms.of_size(n):
                sigma[var.name] = t
                yield from rec(i + 1)
        sigma.pop(var.name, None)

    if all(s <= bound for s in current_sizes()):
        yield from rec(0)
