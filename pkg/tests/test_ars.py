import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_terms, rewrite_everywhere
from proofkit.ars import Ars, ArsStep, induced_relation, reachable, steps_between, trs_step_expansion
from proofkit.errors import IllFormedRule, UnknownObject
from proofkit.terms import Signature, parse_scheme, parse_term

FA = Signature.parse(["a/0", "f/1"])
T = parse_term


def expansion(bound=3):
    return trs_step_expansion(FA, parse_scheme("f(?x)"), parse_scheme("?x"), bound)


def test_empty_ars():
    assert induced_relation(Ars(["x"], [])) == frozenset()


def test_parallel_steps_collapse():
    ars = Ars("abc", [ArsStep("s1", "a", "b"), ArsStep("s2", "a", "b"), ArsStep("s3", "b", "c")])
    assert induced_relation(ars) == {("a", "b"), ("b", "c")}
    assert [s.id for s in steps_between(ars, "a", "b")] == ["s1", "s2"]


def test_undeclared_endpoint():
    with pytest.raises(UnknownObject):
        Ars(["a"], [ArsStep("s", "a", "b")])


def test_unknown_object_query():
    with pytest.raises(UnknownObject):
        steps_between(Ars(["a"], []), "a", "z")


class TestExpansion:
    def test_two_redexes(self):
        ars = expansion()
        found = steps_between(ars, T("f(f(a))"), T("f(a)"))
        assert len(found) == 2
        assert {s.id for s in found} == {"f(f(a))@ε", "f(f(a))@1"}
        assert len(ars.steps) > len(induced_relation(ars))

    def test_normal_form_has_no_steps(self):
        assert [s for s in expansion().steps if s.src == T("a")] == []

    def test_total_steps(self):
        assert len(expansion().steps) == 3

    def test_fresh_rhs_variable(self):
        with pytest.raises(IllFormedRule):
            trs_step_expansion(FA, parse_scheme("f(?x)"), parse_scheme("?y"), 3)

    @pytest.mark.parametrize("bound", [1, 2, 3, 4, 5, 6])
    def test_against_rewrite_oracle(self, bound):
        terms = all_terms([("a", 0), ("f", 1)], bound)
        pairs, steps = rewrite_everywhere(terms, "f")
        ars = expansion(bound)
        assert induced_relation(ars) == pairs
        assert len(ars.steps) == steps

    def test_against_rewrite_oracle_binary(self):
        sig = Signature.parse(["a/0", "f/1", "g/2"])
        terms = all_terms([("a", 0), ("f", 1), ("g", 2)], 5)
        ars = trs_step_expansion(sig, parse_scheme("f(?x)"), parse_scheme("?x"), 5)
        pairs, steps = rewrite_everywhere(terms, "f")
        assert induced_relation(ars) == pairs and len(ars.steps) == steps


class TestReachable:
    def test_reflexive(self):
        assert reachable(expansion(), T("a"), 0) == {T("a")}

    def test_closure_from_ffa(self):
        assert reachable(expansion(), T("f(f(a))"), 2) == {T("f(f(a))"), T("f(a)"), T("a")}

    def test_fixpoint(self):
        ars = expansion(5)
        n = len(ars.objects)
        for obj in ars.objects:
            assert reachable(ars, obj, n) == reachable(ars, obj, n + 1)


@st.composite
def random_ars(draw):
    objects = list(range(draw(st.integers(1, 5))))
    edges = draw(st.lists(st.tuples(st.sampled_from(objects), st.sampled_from(objects)), max_size=10))
    return Ars(objects, [ArsStep(f"s{i}", a, b) for i, (a, b) in enumerate(edges)])


@settings(max_examples=150, deadline=None)
@given(random_ars())
def test_steps_between_agrees_with_relation(ars):
    rel = induced_relation(ars)
    for a in ars.objects:
        for b in ars.objects:
            assert (len(steps_between(ars, a, b)) >= 1) == ((a, b) in rel)


@settings(max_examples=150, deadline=None)
@given(random_ars(), st.integers(0, 5))
def test_reachable_monotone(ars, n):
    for a in ars.objects:
        assert reachable(ars, a, n) <= reachable(ars, a, n + 1)
        assert a in reachable(ars, a, n)
