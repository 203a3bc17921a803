import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_terms, census
from proofkit.errors import ParseError, UnboundMetaVar
from proofkit.terms import (
    Signature,
    Term,
    Var,
    apply_substitution,
    enumerate_terms,
    match_scheme,
    parse_scheme,
    parse_term,
    term_key,
    term_size,
)

A = Term("a")


def sig(*items):
    return Signature.parse(items)


MATRIX = [
    [("a", 0)],
    [("a", 0), ("f", 1)],
    [("a", 0), ("b", 0), ("g", 2)],
    [("a", 0), ("f", 1), ("g", 2)],
    [("a", 0), ("b", 0), ("imp", 2)],
    [("a", 0), ("h", 3)],
]


class TestSubstitution:
    def test_bare_metavar(self):
        assert apply_substitution(Var("X"), {"X": A}) == A

    def test_repeated_metavar(self):
        fa = parse_term("f(a)")
        assert apply_substitution(parse_scheme("imp(?X,?X)"), {"X": fa}) == parse_term("imp(f(a),f(a))")

    def test_unbound(self):
        with pytest.raises(UnboundMetaVar):
            apply_substitution(parse_scheme("imp(?X,?Y)"), {"X": A})


class TestMatching:
    def test_metavar_matches_anything(self):
        assert match_scheme(Var("X"), parse_term("f(a)")) == {"X": parse_term("f(a)")}

    def test_nonlinear_mismatch(self):
        assert match_scheme(parse_scheme("imp(?X,?X)"), parse_term("imp(a,b)")) is None

    def test_nonlinear_match(self):
        assert match_scheme(parse_scheme("imp(?X,?X)"), parse_term("imp(b,b)")) == {"X": Term("b")}

    def test_round_trip_by_enumeration(self):
        s = sig("a/0", "f/1", "g/2")
        schemes = [parse_scheme(x) for x in ("?X", "f(?X)", "g(?X,?Y)", "g(?X,?X)", "g(f(?X),?Y)")]
        for t in enumerate_terms(s, 5):
            for sc in schemes:
                sigma = match_scheme(sc, t)
                if sigma is not None:
                    assert apply_substitution(sc, sigma) == t

    def test_completeness_on_linear_schemes(self):
        # every instance produced by substitution is found again by matching
        s = sig("a/0", "f/1", "g/2")
        terms = [t for t in enumerate_terms(s, 3)]
        sc = parse_scheme("g(?X,f(?Y))")
        for x in terms:
            for y in terms:
                t = apply_substitution(sc, {"X": x, "Y": y})
                assert match_scheme(sc, t) == {"X": x, "Y": y}


class TestEnumeration:
    def test_single_constant(self):
        assert enumerate_terms(sig("a/0"), 1) == [A]

    def test_unary_chain(self):
        assert [str(t) for t in enumerate_terms(sig("a/0", "f/1"), 3)] == ["a", "f(a)", "f(f(a))"]

    def test_binary(self):
        ts = enumerate_terms(sig("a/0", "b/0", "g/2"), 3)
        assert len(ts) == 6
        assert sum(t.size == 1 for t in ts) == 2 and sum(t.size == 3 for t in ts) == 4

    @pytest.mark.parametrize("symbols", MATRIX)
    @pytest.mark.parametrize("bound", [1, 2, 3, 4, 5, 6])
    def test_matches_census(self, symbols, bound):
        s = Signature.parse(f"{n}/{a}" for n, a in symbols)
        ts = enumerate_terms(s, bound)
        assert len(ts) == len(set(ts))
        assert len(ts) == sum(census(symbols, k) for k in range(1, bound + 1))
        assert set(ts) == all_terms(symbols, bound)
        assert [term_key(t) for t in ts] == sorted(term_key(t) for t in ts)


def test_term_size():
    assert term_size(A) == 1
    assert term_size(parse_term("f(f(a))")) == 3
    assert term_size(parse_term("imp(a,f(a))")) == 4


class TestParsing:
    def test_whitespace(self):
        assert parse_term(" imp( a , b ) ") == parse_term("imp(a,b)")

    def test_arity_checked(self):
        with pytest.raises(ParseError):
            parse_term("imp(a)", sig("a/0", "imp/2"))

    def test_unknown_symbol(self):
        with pytest.raises(ParseError):
            parse_term("c", sig("a/0"))

    def test_metavar_rejected_in_terms(self):
        with pytest.raises(ParseError):
            parse_term("?X")

    def test_print_parse_round_trip(self):
        for t in enumerate_terms(sig("a/0", "f/1", "g/2"), 5):
            assert parse_term(str(t)) == t


def test_signature_needs_constant():
    with pytest.raises(ValueError):
        sig("f/1")


def test_signature_rejects_duplicates():
    with pytest.raises(ValueError):
        sig("a/0", "a/1")


SIG = sig("a/0", "b/0", "f/1", "g/2")


def schemes(depth=3):
    leaves = st.sampled_from([Term("a"), Term("b"), Var("X"), Var("Y")])
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(lambda x: Term("f", (x,)), inner),
            st.builds(lambda x, y: Term("g", (x, y)), inner, inner),
        ),
        max_leaves=6,
    )


ground = st.sampled_from(enumerate_terms(SIG, 4))


@settings(max_examples=200, deadline=None)
@given(schemes(), ground, ground)
def test_substitution_then_matching_recovers_instance(sc, x, y):
    t = apply_substitution(sc, {"X": x, "Y": y})
    sigma = match_scheme(sc, t)
    assert sigma is not None
    assert apply_substitution(sc, sigma) == t


@settings(max_examples=200, deadline=None)
@given(schemes(), ground, ground)
def test_substitution_is_homomorphic(sc, x, y):
    sigma = {"X": x, "Y": y}
    t = apply_substitution(sc, sigma)
    if isinstance(sc, Term):
        assert t.head == sc.head
        assert t.args == tuple(apply_substitution(a, sigma) for a in sc.args)
