import random
from itertools import product as iproduct

import pytest

from autodual.algebras import ZERO, catalog, random_algebra
from autodual.errors import TermSyntaxError
from autodual.terms import (LeftChain, Prod, QuasiIdentity, Var, ZeroEquivalent,
                            WHISKERY_QUASI, check_identity, check_quasi_identity,
                            eval_normal, eval_term, normalize, order_sensitivity,
                            order_sensitivity_brute, parse_and_normalize,
                            parse_equation, parse_quasi_identity, parse_term)


def test_parse_and_normalize_examples():
    assert parse_and_normalize("x*(y*z)") == ZeroEquivalent()
    assert parse_and_normalize("((w*x)*y)*z") == LeftChain("w", ("x", "y", "z"))
    assert parse_and_normalize("qabab") == LeftChain("q", ("a", "b", "a", "b"))
    assert parse_and_normalize("x") == LeftChain("x", ())
    # left factor constantly zero stays zero
    assert parse_and_normalize("(x*(y*z))*w") == ZeroEquivalent()


def test_parse_multichar_variables_declared():
    t = parse_and_normalize("foo*bar", variables={"foo", "bar"})
    assert t == LeftChain("foo", ("bar",))
    with pytest.raises(TermSyntaxError):
        parse_and_normalize("foobar*x", variables={"foo", "x"})


def test_parse_errors_have_positions():
    with pytest.raises(TermSyntaxError):
        parse_term("x*(y")
    with pytest.raises(TermSyntaxError):
        parse_term("x?y")
    with pytest.raises(TermSyntaxError):
        parse_term("")


def test_normalization_idempotent():
    t = parse_term("((w*x)*y)*z")
    once = normalize(t)
    assert normalize(parse_term(str(once))) == once


def _all_terms(variables, leaves):
    if leaves == 1:
        return [Var(v) for v in variables]
    out = []
    for k in range(1, leaves):
        for left in _all_terms(variables, k):
            for right in _all_terms(variables, leaves - k):
                out.append(Prod(left, right))
    return out


def test_normalization_soundness_exhaustive():
    variables = ("x", "y")
    terms = []
    for leaves in (1, 2, 3, 4):
        terms += _all_terms(variables, leaves)
    for name in ("B", "N4"):
        M = catalog(name) if name == "B" else catalog("N", 4)
        elems = M.elements()
        for term in terms:
            nt = normalize(term)
            for vals in iproduct(elems, repeat=2):
                assignment = dict(zip(variables, vals))
                assert eval_term(M, term, assignment) == eval_normal(M, nt, assignment)


def test_check_identity_examples():
    N0 = catalog("N", 0)
    cex = check_identity(N0, *parse_equation("xy = xyyy"))
    assert {k: N0.name(v) for k, v in cex.items()} == {"x": "q", "y": "a"}
    N4 = catalog("N", 4)
    cex = check_identity(N4, *parse_equation("wxyz = wyxz"))
    assert {k: N4.name(v) for k, v in cex.items()} == \
        {"w": "q", "x": "a", "y": "b", "z": "b"}
    B = catalog("B")
    assert check_identity(B, *parse_equation("x*(y*z) = u*(v*w)")) is None


def test_check_quasi_identity_examples():
    F0 = catalog("F", 0)
    cex = check_quasi_identity(F0, WHISKERY_QUASI)
    assert {k: F0.name(v) for k, v in cex.items()} == {"v": "q", "w": "r", "x": "a"}
    assert check_quasi_identity(catalog("C", 3), WHISKERY_QUASI) is None
    trivial = parse_quasi_identity("x = y => x = y")
    assert check_quasi_identity(catalog("B"), trivial) is None


def test_quasi_identity_variable_collection():
    q = parse_quasi_identity("vxx = wxx => vx = wx")
    assert set(q.variables()) == {"v", "w", "x"}


def test_order_sensitivity_witnesses():
    N1 = catalog("N", 1)
    w = order_sensitivity(N1)
    assert N1.state_names[w.state] == "q"
    assert [N1.letter_names[j] for j in w.w1] == ["b", "a"]
    assert [N1.letter_names[j] for j in w.w2] == ["a", "b"]
    assert N1.word(N1.state(w.state), w.w1) == ZERO
    assert N1.word(N1.state(w.state), w.w2) != ZERO
    assert order_sensitivity(catalog("L")) is None
    assert order_sensitivity(catalog("F", 2)) is None  # single letter


def test_order_sensitivity_matches_brute_force():
    rng = random.Random(777)
    for _ in range(80):
        M = random_algebra(rng, 3, 2)
        assert (order_sensitivity(M) is not None) == order_sensitivity_brute(M, 6)
