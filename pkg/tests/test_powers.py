import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autodual.algebras import ZERO, AutomaticAlgebra, catalog
from autodual.classify import gen_chain
from autodual.errors import (CapExceeded, DuplicateIndex, IndexOutOfRange,
                             PreconditionViolated)
from autodual.powers import (Groupoid, enumerate_homs, find_embedding,
                             generate_subuniverse, hom_exists, is_compatible,
                             make_compatible_op, op_chain_meet, op_diamond,
                             op_g_uv, op_h, op_join, op_lambda, op_pbar,
                             op_psi, op_quasi_meet, power_element, pointwise_mul)
from autodual.structure import component_group, components


def test_power_element_examples():
    B = catalog("B")
    r = B.element_by_name("r")
    v = B.element_by_name("q")
    assert power_element(ZERO, [(1, r), (5, r)], 6) == (0, r, 0, 0, 0, r)
    assert power_element(v, [], 3) == (v, v, v)
    assert power_element(v, [], 1) == (v,)
    with pytest.raises(DuplicateIndex):
        power_element(ZERO, [(1, r), (1, r)], 4)
    with pytest.raises(IndexOutOfRange):
        power_element(ZERO, [(7, r)], 4)


def test_generate_subuniverse_examples():
    B = catalog("B")
    q, r, a = (B.element_by_name(x) for x in "qra")
    got = generate_subuniverse(B, 2, [(q, q), (a, a)])
    assert set(got) == {(q, q), (a, a), (r, r), (ZERO, ZERO)}
    assert got[:2] == [(q, q), (a, a)]  # generators first
    assert generate_subuniverse(B, 1, [(ZERO,)]) == [(ZERO,)]
    F0 = catalog("F", 0)
    q, r, a = (F0.element_by_name(x) for x in "qra")
    assert set(generate_subuniverse(F0, 1, [(q,), (a,)])) == \
        {(q,), (a,), (r,), (ZERO,)}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=0, max_size=3, unique=True),
       st.lists(st.integers(0, 6), min_size=0, max_size=3, unique=True))
def test_subuniverse_monotone_idempotent(xs, ys):
    B = catalog("B")
    pool = [(x, y) for x in B.elements() for y in B.elements()][:49]
    X = [pool[i * 7 % len(pool)] for i in xs]
    Y = X + [pool[i * 5 % len(pool)] for i in ys]
    sg_x = generate_subuniverse(B, 2, X)
    sg_again = generate_subuniverse(B, 2, sg_x)
    assert set(sg_again) == set(sg_x)
    assert set(sg_x) <= set(generate_subuniverse(B, 2, Y))


def test_enumerate_homs_examples():
    B = catalog("B")
    identity = tuple(B.elements())
    homs = enumerate_homs(Groupoid.from_algebra(B), B)
    assert identity in homs
    F0 = catalog("F", 0)
    A = Groupoid.from_algebra(F0)
    embeddings = enumerate_homs(A, B, injective_only=True)
    by_name = [{A.labels[i]: B.name(x) for i, x in enumerate(h)} for h in embeddings]
    assert {"q": "q", "r": "r", "a": "a", "0": "0"} in by_name
    N0, N1 = catalog("N", 0), catalog("N", 1)
    assert enumerate_homs(Groupoid.from_algebra(N0), N1, injective_only=True) == []
    assert find_embedding(Groupoid.from_algebra(N0), N1) is None


def test_homs_preserve_absorbing_zero():
    N1 = catalog("N", 1)
    A = Groupoid.from_algebra(catalog("N", 0))
    z = A.zero_element()
    for h in enumerate_homs(A, N1):
        assert h[z] == ZERO


def test_hom_cap():
    M2 = gen_chain(2)
    with pytest.raises(CapExceeded):
        enumerate_homs(Groupoid.from_algebra(M2), M2, max_elements=3)
    with pytest.raises(CapExceeded):
        enumerate_homs(Groupoid.from_algebra(catalog("F", 0)), catalog("B"), limit=2)


def test_hom_exists_with_preassignment():
    F0 = catalog("F", 0)
    B = catalog("B")
    A = Groupoid.from_algebra(F0)
    qpos = A.labels.index("q")
    assert hom_exists(A, B, {qpos: B.element_by_name("q")})
    # r = q·a, but no letter of B sends q to s, so this pair is impossible
    rpos = A.labels.index("r")
    assert not hom_exists(A, B, {qpos: B.element_by_name("q"),
                                 rpos: B.element_by_name("s")})


def test_is_compatible_examples():
    B = catalog("B")
    q, r, a = (B.element_by_name(x) for x in "qra")
    g = op_g_uv(B, q, a)
    assert is_compatible(B, g.graph())
    assert is_compatible(B, {(x, x) for x in B.elements()})
    assert not is_compatible(B, {(q, r)})


def test_compatible_op_values():
    L = catalog("L")
    q, r, a = (L.element_by_name(x) for x in "qra")
    qm = op_quasi_meet(L)
    assert qm(q, r) == q
    assert qm(q, a) == ZERO
    j = op_join(L)
    assert j(ZERO, q) == q
    assert j(q, q) == q
    assert (q, r) not in j.domain


def test_quasi_meet_needs_total():
    with pytest.raises(PreconditionViolated):
        op_quasi_meet(catalog("B"))


CONSTANT_D2 = AutomaticAlgebra.build(
    "qr", "ab", [("q", "a", "q"), ("r", "a", "q"), ("q", "b", "r"), ("r", "b", "r")])


def test_chain_meet_and_h_on_constant_display():
    assert is_compatible(CONSTANT_D2, op_chain_meet(CONSTANT_D2).graph())
    for i in range(2):
        assert is_compatible(CONSTANT_D2, op_h(CONSTANT_D2, i).graph())
    with pytest.raises(PreconditionViolated):
        op_chain_meet(catalog("L"))
    with pytest.raises(PreconditionViolated):
        op_h(catalog("N", 4))


def test_group_ops_compatible():
    for M in (catalog("C", 3), gen_chain(2)):
        for g in M.states():
            assert is_compatible(M, op_lambda(M, g).graph())
        assert is_compatible(M, op_diamond(M).graph())
    M2 = gen_chain(2)
    assert is_compatible(M2, op_pbar(M2, 0).graph())
    data = component_group(M2, components(M2)[0])
    identity_endo = {h: h for h in data.subgroup_H}
    assert is_compatible(M2, op_psi(M2, identity_endo, 0).graph())


def test_pbar_needs_letter_affine():
    with pytest.raises(PreconditionViolated):
        op_pbar(catalog("C", 3), 0)


def test_lambda_example_on_C3():
    C3 = catalog("C", 3)
    lam = op_lambda(C3, C3.element_by_name("2"))
    assert C3.name(lam(C3.element_by_name("1"))) == "2"
    assert C3.name(lam(C3.element_by_name("b"))) == "b"
    assert lam(ZERO) == ZERO


def test_make_compatible_op_dispatch():
    B = catalog("B")
    q, a = B.element_by_name("q"), B.element_by_name("a")
    assert make_compatible_op(B, "g_uv", (q, a)).name == "g_uv"
    assert make_compatible_op(B, "join").name == "join"
    with pytest.raises(Exception):
        make_compatible_op(B, "nonsense")


def test_evaluation_maps_preserve_compatible_relations():
    # evaluations are restrictions of coordinates, so they preserve every
    # compatible relation; spot-check on a small instance
    F0 = catalog("F", 0)
    q, a = F0.element_by_name("q"), F0.element_by_name("a")
    elems = generate_subuniverse(F0, 2, [(q, q), (q, a)])
    A = Groupoid.from_power(F0, elems)
    homs = enumerate_homs(A, F0)
    relations = [{(x, x) for x in F0.elements()},
                 op_join(F0).graph(),
                 op_g_uv(F0, q, a).graph()]
    for rel in relations:
        k = len(next(iter(rel)))
        for a_idx in range(A.n):
            for rows in zip(*[homs] * k):
                if all(tuple(h[b] for h in rows) in rel for b in range(A.n)):
                    assert tuple(h[a_idx] for h in rows) in rel
