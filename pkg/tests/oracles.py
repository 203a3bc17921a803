"""Brute-force reference implementations, deliberately independent of the library."""
from itertools import product

from proofkit.terms import Term


def census(symbols, size):
    """Number of terms with exactly ``size`` nodes, by direct recursion."""
    if size < 1:
        return 0
    total = 0
    for _, arity in symbols:
        if arity == 0:
            total += size == 1
        else:
            total += _split_count(symbols, size - 1, arity)
    return total


def _split_count(symbols, total, parts):
    if parts == 0:
        return 1 if total == 0 else 0
    return sum(census(symbols, k) * _split_count(symbols, total - k, parts - 1) for k in range(1, total + 1))


def all_terms(symbols, max_size):
    """Closure of the constants under every symbol, keeping terms within the bound."""
    terms = {Term(n) for n, a in symbols if a == 0}
    while True:
        new = set(terms)
        for name, arity in symbols:
            if arity == 0:
                continue
            for args in product(sorted(terms, key=str), repeat=arity):
                t = Term(name, tuple(args))
                if t.size <= max_size:
                    new.add(t)
        if new == terms:
            return terms
        terms = new


def subterm_positions(t, pos=()):
    yield pos, t
    for i, a in enumerate(t.args):
        yield from subterm_positions(a, pos + (i + 1,))


def plug(t, pos, new):
    if not pos:
        return new
    args = list(t.args)
    args[pos[0] - 1] = plug(args[pos[0] - 1], pos[1:], new)
    return Term(t.head, tuple(args))


def rewrite_everywhere(terms, head):
    """Pairs (s, t) where t is s with one ``head(x)`` subterm replaced by ``x``."""
    pairs, steps = set(), 0
    for s in terms:
        for pos, sub in subterm_positions(s):
            if sub.head == head and len(sub.args) == 1:
                t = plug(s, pos, sub.args[0])
                if t in terms:
                    pairs.add((s, t))
                    steps += 1
    return pairs, steps


def naive_closure(start, instances):
    """Least set containing ``start`` and closed under (premises, conclusion) pairs."""
    known = set(start)
    changed = True
    while changed:
        changed = False
        for prem, concl in instances:
            if concl not in known and all(p in known for p in prem):
                known.add(concl)
                changed = True
    return known


def hilbert_ks_theorems(max_size):
    """Theorems of the K/S/modus-ponens calculus over {a, b, imp} within a size bound."""
    universe = all_terms([("a", 0), ("b", 0), ("imp", 2)], max_size)

    def imp(x, y):
        return Term("imp", (x, y))

    def is_k(t):
        return t.head == "imp" and t.args[1].head == "imp" and t.args[1].args[1] == t.args[0]

    def is_s(t):
        try:
            (l, r) = t.args
            a1, bc = l.args
            b1, c1 = bc.args
            (ab, ac) = r.args
            return (
                t.head == l.head == bc.head == r.head == ab.head == ac.head == "imp"
                and ab.args == (a1, b1)
                and ac.args == (a1, c1)
            )
        except (ValueError, AttributeError):
            return False

    known = {t for t in universe if is_k(t) or is_s(t)}
    changed = True
    while changed:
        changed = False
        for t in list(known):
            if t.head == "imp" and t.args[0] in known and t.args[1] not in known and t.args[1] in universe:
                known.add(t.args[1])
                changed = True
    return known
