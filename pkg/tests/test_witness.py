import pytest

from autodual.algebras import ZERO, catalog
from autodual.errors import BadParams, ProofIdentityFailed, UnknownName
from autodual.powers import Groupoid, generate_subuniverse, pointwise_mul
from autodual.witness import (CONSTRUCTION_NAMES, Truncation, build_truncation,
                              kernel_block_analysis, local_eval_probe,
                              verify_construction, _derive_pcomm_params)


def test_build_truncation_thm_wc_sets():
    tr = build_truncation("thm_wc", (0,), 5)
    M = tr.spec.algebra
    r, q, a = (M.element_by_name(x) for x in "rqa")
    assert len(tr.spec.a0) == 4                 # i in 2..5
    assert (ZERO, r, 0, 0, 0) not in tr.elements  # r at position 2 only
    a0_first = tr.spec.a0[0][1]
    assert a0_first == (r, r, 0, 0, 0)
    assert tr.spec.g[1] == (r, 0, 0, 0, 0)
    assert len([1 for _, t in tr.spec.b if t[0] == q]) == 6  # pairs i<j in 2..5
    assert len([1 for _, t in tr.spec.b if t[0] == a]) == 4


def test_verify_all_constructions_small():
    for name, params in [("thm_wc", (0,)), ("thm_wc", (1,)), ("ex_all4_L", ()),
                         ("lem_2state2_N4", ()), ("lem_2state3_N5", ()),
                         ("thm_nondcomm", ()), ("thm_pcomm_case1", ())]:
        report = verify_construction(build_truncation(name, params, 4))
        assert all(item["pass"] for item in report["identities"])
        assert not report["g_in_A"]


def test_degenerate_minimum_size():
    report = verify_construction(build_truncation("lem_2state2_N4", (), 3))
    assert not report["g_in_A"]
    with pytest.raises(BadParams):
        build_truncation("thm_wc", (0,), 2)
    with pytest.raises(UnknownName):
        build_truncation("bogus", (), 4)


def test_thm_wc_containment():
    for m in (0, 1):
        for N in (4, 6):
            rep = verify_construction(build_truncation("thm_wc", (m,), N))
            assert rep["containment_ok"]


def test_truncation_monotonicity():
    # every element of the N-truncation extends (by following one of its
    # derivations, which pads the fresh coordinates with products of the
    # generators' base values) to an element of the N'-truncation; the
    # extension map is injective because restriction undoes it.  A single
    # canonical padding is not available: the same small element can have
    # derivations whose fresh-coordinate values differ.
    for name, params in [("thm_wc", (0,)), ("lem_2state2_N4", ())]:
        for N, N2 in [(3, 4), (4, 5)]:
            small = build_truncation(name, params, N)
            big = build_truncation(name, params, N2)
            M = small.spec.algebra
            pad = {}
            gens_small = small.spec.a0 + small.spec.b
            gens_big = {label: t for label, t in big.spec.a0 + big.spec.b}
            for label, t in gens_small:
                assert label in gens_big
                pad[t] = gens_big[label]
            frontier = list(pad)
            while frontier:
                new = []
                for u in frontier:
                    for v in list(pad):
                        for w, pw in ((pointwise_mul(M, u, v),
                                       pointwise_mul(M, pad[u], pad[v])),
                                      (pointwise_mul(M, v, u),
                                       pointwise_mul(M, pad[v], pad[u]))):
                            if w not in pad:
                                pad[w] = pw
                                new.append(w)
                frontier = new
            big_set = set(big.elements)
            assert set(pad) == set(small.elements)
            for u, pu in pad.items():
                assert pu in big_set
                assert pu[:len(u)] == u
            assert len(set(pad.values())) == len(pad)


def test_pcomm_parameter_derivation_for_N1():
    N1 = catalog("N", 1)
    qi, aj, bj, cs, p, si, t, ri = _derive_pcomm_params(N1)
    assert N1.state_names[qi] == "q"
    assert N1.letter_names[aj] == "b"   # the proof's a is N1's b
    assert N1.letter_names[bj] == "a"
    assert cs == ()
    assert p == 1
    assert N1.state_names[si] == "r"
    assert N1.state_names[ri] == "r"


def test_pcomm_rejects_non_failing_algebra():
    with pytest.raises(BadParams):
        build_truncation("thm_pcomm_case1", (catalog("L"),), 4)


def test_kernel_analysis_projection_shape():
    tr = build_truncation("lem_2state2_N4", (), 4)
    kr = kernel_block_analysis(tr, max_elements=64)
    assert kr.mode == "homs"
    assert not kr.violations
    # projections witness the (3, 1) pattern; some hom collapses all of A0
    assert (3, 1) in kr.block_multisets and (4,) in kr.block_multisets


def test_kernel_analysis_restriction_mode():
    tr = build_truncation("ex_all4_L", (), 4)
    kr = kernel_block_analysis(tr, max_elements=64, hom_budget=50)
    assert kr.mode == "restrictions" and kr.hom_count is None
    assert not kr.violations


def test_kernel_nu_vacuous():
    tr = build_truncation("lem_2state2_N4", (), 4)
    kr = kernel_block_analysis(tr, nu=4, max_elements=64)
    assert not kr.violations


def test_proof_identity_failure_aborts():
    tr = build_truncation("lem_2state2_N4", (), 4)
    # sabotage the algebra reference so the identities cannot hold
    tr.spec.extra["a"], tr.spec.extra["b"] = tr.spec.extra["b"], tr.spec.extra["a"]
    with pytest.raises(ProofIdentityFailed):
        verify_construction(tr)


def test_local_eval_probe_f0():
    F0 = catalog("F", 0)
    A = Groupoid.from_algebra(F0)
    rep = local_eval_probe(F0, A, 3)
    assert rep["hom_count"] == 15
    assert rep["evaluation_count"] == 4
    assert rep["k_local_non_eval"] == 0
    assert rep["letter_range_non_eval"] == 0
    assert rep["neither_count"] == rep["total_maps"] - rep["k_local_count"]


def test_local_eval_probe_k1_counts():
    F0 = catalog("F", 0)
    A = Groupoid.from_algebra(F0)
    rep = local_eval_probe(F0, A, 1)
    assert rep["k_local_count"] == rep["one_local_count"]
    assert rep["k_local_non_eval"] > 0  # non-evaluation 1-local maps exist


def test_local_eval_probe_n0_square():
    N0 = catalog("N", 0)
    q, r, a = (N0.element_by_name(x) for x in "qra")
    elems = generate_subuniverse(N0, 2, [(q, q), (q, r), (a, a)])
    assert len(elems) == 6
    A = Groupoid.from_power(N0, elems)
    rep = local_eval_probe(N0, A, 3)
    assert rep["letter_range_non_eval"] == 0
    # every evaluation is k-local for every k
    assert rep["k_local_count"] >= rep["evaluation_count"]
