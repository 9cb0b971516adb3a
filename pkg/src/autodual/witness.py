"""Finite truncations of the non-dualizability constructions.

Only the finitely checkable content of those arguments is verified here:
the displayed product identities at every admissible index tuple, the
non-membership of the forbidden element in the generated subalgebra, and
the hom-kernel block shape at truncation scale.  The congruence-index
conditions quantify over infinite algebras and are out of reach; every
report says so in its header.

Report indices are 1-based; internal coordinates are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from math import gcd
from typing import Optional

from .algebras import ZERO, AutomaticAlgebra, catalog
from .errors import (BadParams, CapExceeded, InternalInconsistency,
                     ProofIdentityFailed, UnknownName)
from .powers import (Groupoid, enumerate_homs, generate_subuniverse,
                     hom_exists, pointwise_mul)
from .structure import permutation_profile, _compose, _perm_inverse, _perm_order

SCOPE_NOTE = ("finite truncation: displayed identities and hom-kernel blocks "
              "only; congruence-index conditions over infinite algebras are "
              "not finitely checkable")

BUILD_CAP_DEFAULT = 4096

CONSTRUCTION_NAMES = ("thm_wc", "thm_pcomm_case1", "ex_all4_L",
                      "lem_2state2_N4", "lem_2state3_N5", "thm_nondcomm")


@dataclass
class ConstructionSpec:
    name: str
    params: tuple
    N: int
    algebra: AutomaticAlgebra
    coord_names: list
    a0: list                  # (label, tuple) pairs
    b: list                   # (label, tuple) pairs
    g: tuple                  # (label, tuple)
    nu: int
    extra: dict


@dataclass
class Truncation:
    spec: ConstructionSpec
    elements: list            # generated subuniverse, deterministic order
    groupoid: Groupoid
    a0_indices: list          # positions of the A0 elements in `elements`


def _ov(base: int, n: int, *pairs) -> tuple:
    """Constant tuple overridden at 1-based positions (overline notation)."""
    vals = [base] * n
    for idx, v in pairs:
        vals[idx - 1] = v
    return tuple(vals)


def _label(M: AutomaticAlgebra, base: int, *pairs) -> str:
    inner = "".join(f"|{M.name(v)}@{i}" for i, v in pairs)
    return f"{M.name(base)}{inner}"


# ---------------------------------------------------------------------------
# the constructions
# ---------------------------------------------------------------------------

def _spec_thm_wc(params, N):
    m = params[0] if params else 0
    M = catalog("F", m)
    q, r, a = M.element_by_name("q"), M.element_by_name("r"), M.element_by_name("a")
    a0 = [(_label(M, ZERO, (1, r), (i, r)), _ov(ZERO, N, (1, r), (i, r)))
          for i in range(2, N + 1)]
    b = [(_label(M, ZERO, (1, q), (i, q), (j, q)),
          _ov(ZERO, N, (1, q), (i, q), (j, q)))
         for i in range(2, N + 1) for j in range(i + 1, N + 1)]
    b += [(_label(M, a, (i, ZERO)), _ov(a, N, (i, ZERO))) for i in range(2, N + 1)]
    g = (_label(M, ZERO, (1, r)), _ov(ZERO, N, (1, r)))
    return ConstructionSpec("thm_wc", (m,), N, M, [str(i) for i in range(1, N + 1)],
                            a0, b, g, 1, {"q": q, "r": r, "a": a, "m": m})


def _spec_ex_all4_L(params, N):
    M = AutomaticAlgebra.build(
        "qrs", "ac",
        [("q", "a", "q"), ("q", "c", "q"), ("r", "a", "q"), ("r", "c", "s"),
         ("s", "a", "s"), ("s", "c", "s")])
    q, r, s = (M.element_by_name(x) for x in "qrs")
    a, c = M.element_by_name("a"), M.element_by_name("c")
    a0 = [(_label(M, q, (i, s)), _ov(q, N, (i, s))) for i in range(1, N + 1)]
    b = [(_label(M, q, (i, s), (k, r)), _ov(q, N, (i, s), (k, r)))
         for i in range(1, N + 1) for k in range(1, N + 1) if i != k]
    b += [(_label(M, c, (k, a)), _ov(c, N, (k, a))) for k in range(1, N + 1)]
    g = (_label(M, q), _ov(q, N))
    return ConstructionSpec("ex_all4_L", (), N, M,
                            [str(i) for i in range(1, N + 1)],
                            a0, b, g, 1,
                            {"q": q, "r": r, "s": s, "a": a, "c": c})


def _spec_lem_2state2(params, N):
    M = catalog("N", 4)
    q, r = M.element_by_name("q"), M.element_by_name("r")
    a, bl = M.element_by_name("a"), M.element_by_name("b")
    a0 = [(_label(M, q, (i, r)), _ov(q, N, (i, r))) for i in range(1, N + 1)]
    b = [(_label(M, bl, (i, a)), _ov(bl, N, (i, a))) for i in range(1, N + 1)]
    g = (_label(M, q), _ov(q, N))
    return ConstructionSpec("lem_2state2_N4", (), N, M,
                            [str(i) for i in range(1, N + 1)],
                            a0, b, g, 1, {"q": q, "r": r, "a": a, "b": bl})


def _spec_lem_2state3(params, N):
    M = catalog("N", 5)
    q, r = M.element_by_name("q"), M.element_by_name("r")
    a, bl, c = (M.element_by_name(x) for x in "abc")
    a0 = [(_label(M, q, (i, r)), _ov(q, N, (i, r))) for i in range(1, N + 1)]
    b = [(_label(M, bl, (i, c), (k, a)), _ov(bl, N, (i, c), (k, a)))
         for i in range(1, N + 1) for k in range(1, N + 1) if i != k]
    g = (_label(M, q), _ov(q, N))
    return ConstructionSpec("lem_2state3_N5", (), N, M,
                            [str(i) for i in range(1, N + 1)],
                            a0, b, g, 1,
                            {"q": q, "r": r, "a": a, "b": bl, "c": c})


def _derive_pcomm_params(M: AutomaticAlgebra):
    """Search the case-1 parameters (q, a, b, c…, p, s, t) in a failing algebra."""
    n = M.n_states
    for m in range(0, n + 2):
        for qi in range(n):
            q = M.state(qi)
            for aj in range(M.n_letters):
                for bj in range(M.n_letters):
                    if aj == bj:
                        continue
                    for cs in _words(M.n_letters, m):
                        if M.word(q, (aj, bj) + cs) == ZERO and \
                                M.word(q, (bj, aj) + cs) != ZERO:
                            got = _finish_pcomm(M, qi, aj, bj, cs)
                            if got is not None:
                                return got
    raise BadParams("algebra does not fail the transposition quasi-equation")


def _words(n_letters, length):
    if length == 0:
        yield ()
        return
    for head in range(n_letters):
        for rest in _words(n_letters, length - 1):
            yield (head,) + rest


def _finish_pcomm(M, qi, aj, bj, cs):
    q = M.state(qi)
    r = M.word(q, (bj, aj) + cs)
    for p in range(1, 2 * M.n_states + 2):
        cond1 = M.word(q, (bj,) * (p + 1) + (aj,) + cs) == r
        cond3 = M.word(q, (aj,) + (bj,) * p + (aj,) + cs) == ZERO
        if not (cond1 and cond3):
            continue
        for si in range(M.n_states):
            s = M.state(si)
            if M.word(s, (aj,) * (p + 2) + cs) == r:
                t = M.word(s, (bj,) + (aj,) * (p + 1) + cs)
                return (qi, aj, bj, cs, p, si, t, M.state_index(r))
    return None


def _spec_thm_pcomm(params, N):
    M = params[0] if params else catalog("N", 1)
    if isinstance(M, str):
        M = catalog(M) if not M.startswith("N") else catalog("N", int(M[1:]))
    qi, aj, bj, cs, p, si, t, ri = _derive_pcomm_params(M)
    q, s = M.state(qi), M.state(si)
    r = M.state(ri)
    a, b = M.letter(aj), M.letter(bj)
    consts = [M.letter(c) for c in cs]
    a0 = [(_label(M, r, (i, ZERO)), _ov(r, N, (i, ZERO))) for i in range(1, N + 1)]
    gens = []
    for i in range(1, N + 1):
        for k in range(1, N + 1):
            if i != k:
                gens.append((_label(M, q, (i, ZERO), (k, s)),
                             _ov(q, N, (i, ZERO), (k, s))))
    for i, k, l in permutations(range(1, N + 1), 3):
        gens.append((_label(M, q, (i, ZERO), (k, s), (l, ZERO)),
                     _ov(q, N, (i, ZERO), (k, s), (l, ZERO))))
        gens.append((_label(M, q, (i, ZERO), (k, ZERO), (l, ZERO)),
                     _ov(q, N, (i, ZERO), (k, ZERO), (l, ZERO))))
    for i in range(1, N + 1):
        gens.append((_label(M, b, (i, a)), _ov(b, N, (i, a))))
        gens.append((_label(M, b, (i, ZERO)), _ov(b, N, (i, ZERO))))
    gens.append((_label(M, a), _ov(a, N)))
    gens.append((_label(M, b), _ov(b, N)))
    for cl in consts:
        gens.append((_label(M, cl), _ov(cl, N)))
    g = (_label(M, r), _ov(r, N))
    return ConstructionSpec("thm_pcomm_case1", (M.name(q), M.name(a), M.name(b)),
                            N, M, [str(i) for i in range(1, N + 1)],
                            a0, gens, g, 1,
                            {"q": q, "a": a, "b": b, "cs": tuple(consts), "p": p,
                             "s": s, "t": t, "r": r})


def _spec_thm_nondcomm(params, N):
    if not params:
        params = (catalog("C", 3), "b", "c")
    M, bname, cname = params
    if isinstance(M, str):
        M = catalog(M) if M != "C3" else catalog("C", 3)
    profile = permutation_profile(M)
    if not profile.permutational or not profile.commuting:
        raise BadParams("needs a permutational algebra with commuting letters")
    bj = M.letter_names.index(bname)
    cj = M.letter_names.index(cname)
    perms = profile.perms
    m = _perm_order(_compose(perms[bj], _perm_inverse(perms[cj])))
    if m <= 1:
        raise BadParams("chosen letters have equal action")
    lam = _lcm(_perm_order(perms[bj]), _perm_order(perms[cj]))
    s_idx = None
    for i in range(M.n_states):
        r0 = M.word(M.state(i), (bj,) + (cj,) * (lam - 1))
        if r0 != M.state(i):
            s_idx, r_idx = i, M.state_index(r0)
            break
    if s_idx is None:
        raise InternalInconsistency("difference permutation has a fixed point only")
    nu = M.n_letters - 1
    b_elem, c_elem = M.letter(bj), M.letter(cj)
    s_elem, r_elem = M.state(s_idx), M.state(r_idx)
    coords = [str(i) for i in range(1, N + 1)]
    block = []
    for i in range(M.n_states):
        block.append(("b", i))
        block.append(("c", i))
        coords.append(f"({M.state_names[i]},{bname})")
        coords.append(f"({M.state_names[i]},{cname})")
    width = N + len(block)

    def v(i):
        vals = [r_elem if n == i else s_elem for n in range(1, N + 1)]
        for kind, st in block:
            vals.append(M.state(st))
        return tuple(vals)

    def w(I):
        vals = [b_elem if n in I else c_elem for n in range(1, N + 1)]
        for kind, st in block:
            vals.append(b_elem if kind == "b" else c_elem)
        return tuple(vals)

    # Index sets of size nu+1: the unique-block argument interpolates between
    # two (nu+1)-blocks through w's on (nu+1)-sized sets, so they must be
    # generators (the displayed size-nu family cannot support that step, and
    # at finite scale it indeed admits kernels with two non-trivial blocks).
    a0 = [(f"v{i}", v(i)) for i in range(1, N + 1)]
    bgen = [("w{" + ",".join(map(str, I)) + "}", w(set(I)))
            for I in combinations(range(1, N + 1), nu + 1)]
    gvals = [s_elem] * N + [M.state(st) for _, st in block]
    g = ("g", tuple(gvals))
    return ConstructionSpec("thm_nondcomm",
                            (M.name(M.state(s_idx)), bname, cname), N, M, coords,
                            a0, bgen, g, nu,
                            {"b": bj, "c": cj, "m": m, "lam": lam, "nu": nu,
                             "s": s_elem, "r": r_elem, "width": width,
                             "w": w, "v": v})


def _lcm(a, b):
    return a * b // gcd(a, b)


_SPEC_BUILDERS = {
    "thm_wc": _spec_thm_wc,
    "thm_pcomm_case1": _spec_thm_pcomm,
    "ex_all4_L": _spec_ex_all4_L,
    "lem_2state2_N4": _spec_lem_2state2,
    "lem_2state3_N5": _spec_lem_2state3,
    "thm_nondcomm": _spec_thm_nondcomm,
}


def build_truncation(name: str, params=(), N: int = 4,
                     max_elements: int = BUILD_CAP_DEFAULT) -> Truncation:
    """Materialize the generated subalgebra of the named construction."""
    if name not in _SPEC_BUILDERS:
        raise UnknownName(f"unknown construction {name!r}; "
                          f"choose from {CONSTRUCTION_NAMES}")
    if N < 3:
        raise BadParams("truncation size must be at least 3")
    spec = _SPEC_BUILDERS[name](params, N)
    gens = [t for _, t in spec.a0] + [t for _, t in spec.b]
    width = len(spec.coord_names)
    elements = generate_subuniverse(spec.algebra, width, gens,
                                    max_elements=max_elements)
    groupoid = Groupoid.from_power(spec.algebra, elements)
    pos = {t: i for i, t in enumerate(elements)}
    a0_indices = [pos[t] for _, t in spec.a0]
    return Truncation(spec, elements, groupoid, a0_indices)


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

def _mulchain(M, first, *rest):
    out = first
    for x in rest:
        out = pointwise_mul(M, out, x)
    return out


def _check(name, lhs, rhs, indices, failures):
    if lhs != rhs:
        raise ProofIdentityFailed(name, indices)


def _identity_instances(trunc: Truncation):
    """Yield (identity name, index tuple, lhs, rhs) for every admissible
    index choice of every displayed identity of the construction."""
    spec = trunc.spec
    M, N = spec.algebra, spec.N
    e = spec.extra
    if spec.name == "thm_wc":
        q, r, a = e["q"], e["r"], e["a"]
        for j in range(2, N + 1):
            for k in range(2, N + 1):
                if j == k:
                    continue
                lhs = _ov(ZERO, N, (1, r), (j, r))
                rhs = pointwise_mul(M, _ov(ZERO, N, (1, q), (j, q), (k, q)),
                                    _ov(a, N, (k, ZERO)))
                yield ("0|r@1,r@j = 0|q@1,q@j,q@k . a|0@k", (j, k), lhs, rhs)
        for j in range(2, N + 1):
            for k in range(2, N + 1):
                for l in range(2, N + 1):
                    if len({j, k, l}) < 3:
                        continue
                    lhs = pointwise_mul(M, _ov(ZERO, N, (1, q), (j, q), (k, q)),
                                        _ov(a, N, (l, ZERO)))
                    rhs = _ov(ZERO, N, (1, r), (j, r), (k, r))
                    yield ("0|q@1,q@j,q@k . a|0@l = 0|r@1,r@j,r@k", (j, k, l),
                           lhs, rhs)
    elif spec.name == "ex_all4_L":
        q, r, s, a, c = e["q"], e["r"], e["s"], e["a"], e["c"]
        for i in range(1, N + 1):
            for k in range(1, N + 1):
                if i == k:
                    continue
                lhs = pointwise_mul(M, _ov(q, N, (i, s), (k, r)), _ov(c, N, (k, a)))
                yield ("q|s@i,r@k . c|a@k = q|s@i", (i, k), lhs, _ov(q, N, (i, s)))
        for i in range(1, N + 1):
            for k in range(1, N + 1):
                for l in range(1, N + 1):
                    if len({i, k, l}) < 3:
                        continue
                    lhs = pointwise_mul(M, _ov(q, N, (i, s), (k, r)), _ov(c, N, (l, a)))
                    yield ("q|s@i,r@k . c|a@l = q|s@i,s@k", (i, k, l), lhs,
                           _ov(q, N, (i, s), (k, s)))
    elif spec.name == "lem_2state2_N4":
        q, r, a, b = e["q"], e["r"], e["a"], e["b"]
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                if j == k:
                    continue
                lhs = _mulchain(M, _ov(q, N, (k, r)), _ov(b, N, (k, a)),
                                _ov(b, N, (j, a)))
                yield ("q|r@k . b|a@k . b|a@j = q|r@j", (j, k), lhs,
                       _ov(q, N, (j, r)))
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                for l in range(1, N + 1):
                    if len({j, k, l}) < 3:
                        continue
                    lhs = _mulchain(M, _ov(q, N, (k, r)), _ov(b, N, (l, a)),
                                    _ov(b, N, (j, a)))
                    yield ("q|r@k . b|a@l . b|a@j = q|r@j,r@k", (j, k, l), lhs,
                           _ov(q, N, (j, r), (k, r)))
    elif spec.name == "lem_2state3_N5":
        q, r, a, b, c = e["q"], e["r"], e["a"], e["b"], e["c"]
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                for k in range(1, N + 1):
                    if len({i, j, k}) < 3:
                        continue
                    lhs = pointwise_mul(M, _ov(q, N, (j, r)),
                                        _ov(b, N, (i, c), (k, a)))
                    yield ("q|r@j . b|c@i,a@k = q|r@k", (i, j, k), lhs,
                           _ov(q, N, (k, r)))
        for i in range(1, N + 1):
            for k in range(1, N + 1):
                if i == k:
                    continue
                lhs = pointwise_mul(M, _ov(q, N, (i, r)),
                                    _ov(b, N, (i, c), (k, a)))
                yield ("q|r@i . b|c@i,a@k = q|r@i,r@k", (i, k), lhs,
                       _ov(q, N, (i, r), (k, r)))
    elif spec.name == "thm_pcomm_case1":
        q, a, b = e["q"], e["a"], e["b"]
        s, t, r = e["s"], e["t"], e["r"]
        cs, p = e["cs"], e["p"]
        tail = [_ov(a, N)] + [_ov(cl, N) for cl in cs]
        for i in range(1, N + 1):
            for k in range(1, N + 1):
                if i == k:
                    continue
                lhs = _mulchain(M, _ov(q, N, (i, ZERO), (k, s)),
                                *([_ov(b, N, (k, a))] * (p + 1) + tail))
                yield ("q|0@i,s@k . (b|a@k)^{p+1} . a~. c~ = r|0@i", (i, k),
                       lhs, _ov(r, N, (i, ZERO)))
        for i in range(1, N + 1):
            for k in range(1, N + 1):
                for l in range(1, N + 1):
                    if len({i, k, l}) < 3:
                        continue
                    tkl = _ov(r, N, (i, ZERO), (k, t), (l, ZERO))
                    lhs = _mulchain(M, _ov(q, N, (i, ZERO), (k, s)),
                                    *([_ov(b, N, (l, a))]
                                      + [_ov(b, N, (k, a))] * p + tail))
                    yield ("q|0@i,s@k . b|a@l . (b|a@k)^p . a~. c~ = r|0@i,t@k,0@l",
                           (i, k, l), lhs, tkl)
                    lhs = _mulchain(M, _ov(q, N, (i, ZERO), (k, s), (l, ZERO)),
                                    *([_ov(b, N, (l, ZERO))]
                                      + [_ov(b, N, (k, a))] * p + tail))
                    yield ("q|0@i,s@k,0@l . b|0@l . (b|a@k)^p . a~. c~ = r|0@i,t@k,0@l",
                           (i, k, l), lhs, tkl)
                    lhs = _mulchain(M, _ov(q, N, (i, ZERO), (k, s), (l, ZERO)),
                                    *([_ov(b, N, (k, ZERO))]
                                      + [_ov(b, N, (k, a))] * p + tail))
                    yield ("q|0@i,s@k,0@l . b|0@k . (b|a@k)^p . a~. c~ = r|0@i,0@k,0@l",
                           (i, k, l), lhs, _ov(r, N, (i, ZERO), (k, ZERO), (l, ZERO)))
                    lhs = _mulchain(M, _ov(q, N, (i, ZERO), (k, ZERO), (l, ZERO)),
                                    *([_ov(b, N, (i, ZERO))]
                                      + [_ov(b, N)] * p + tail))
                    yield ("q|0@i,0@k,0@l . b|0@i . b~^p . a~. c~ = r|0@i,0@k,0@l",
                           (i, k, l), lhs, _ov(r, N, (i, ZERO), (k, ZERO), (l, ZERO)))
        for i, j, k, l in permutations(range(1, N + 1), 4):
            lhs = _mulchain(M, _ov(q, N, (i, ZERO), (k, ZERO), (l, ZERO)),
                            *([_ov(b, N, (j, ZERO))] + [_ov(b, N)] * p + tail))
            yield ("q|0@i,0@k,0@l . b|0@j . b~^p . a~. c~ = r|0@i,0@j,0@k,0@l",
                   (i, j, k, l), lhs,
                   _ov(r, N, (i, ZERO), (j, ZERO), (k, ZERO), (l, ZERO)))
    elif spec.name == "thm_nondcomm":
        lam, nu = e["lam"], e["nu"]
        wfun, vfun = e["w"], e["v"]
        others = list(range(1, N + 1))
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                if i == j:
                    continue
                rest = [x for x in others if x not in (i, j)]
                for K in combinations(rest, nu):
                    wi = wfun(set(K) | {i})
                    wj = wfun(set(K) | {j})
                    lhs = _mulchain(M, vfun(j), wi, *([wj] * (lam - 1)))
                    yield ("v_i = v_j . w_{K+i} . w_{K+j}^{lam-1}",
                           (i, j) + K, lhs, vfun(i))
    else:
        raise UnknownName(spec.name)


def verify_construction(trunc: Truncation) -> dict:
    """Check every displayed identity and the non-membership of g.

    A failing identity raises ProofIdentityFailed: it would mean the
    transcription of the construction is wrong.
    """
    spec = trunc.spec
    counts = {}
    for name, indices, lhs, rhs in _identity_instances(trunc):
        if lhs != rhs:
            raise ProofIdentityFailed(name, indices)
        counts[name] = counts.get(name, 0) + 1
    report = {
        "name": spec.name,
        "params": [str(p) for p in spec.params],
        "N": spec.N,
        "scope": SCOPE_NOTE,
        "identities": [{"identity": k, "instances": v, "pass": True}
                       for k, v in counts.items()],
        "A_size": len(trunc.elements),
        "g_label": spec.g[0],
        "g_in_A": spec.g[1] in set(trunc.elements),
    }
    if spec.name == "thm_wc":
        report["containment_ok"] = _thm_wc_containment(trunc)
    return report


def _thm_wc_containment(trunc: Truncation) -> bool:
    """A sits inside A0 ∪ B ∪ {0|r@1,r@i,r@j} ∪ {0,s1..sm}^N."""
    spec = trunc.spec
    M, N = spec.algebra, spec.N
    q, r = spec.extra["q"], spec.extra["r"]
    allowed = {t for _, t in spec.a0} | {t for _, t in spec.b}
    for i in range(2, N + 1):
        for j in range(i + 1, N + 1):
            allowed.add(_ov(ZERO, N, (1, r), (i, r), (j, r)))
    cycle = {ZERO} | {M.element_by_name(f"s{i}")
                      for i in range(1, spec.extra["m"] + 1)}
    for t in trunc.elements:
        if t in allowed:
            continue
        if not all(v in cycle for v in t):
            return False
    return True


# ---------------------------------------------------------------------------
# kernel block analysis
# ---------------------------------------------------------------------------

@dataclass
class KernelReport:
    nu: int
    mode: str                 # "homs" or "restrictions"
    hom_count: Optional[int]  # None when only restrictions were enumerated
    block_multisets: list     # distinct sorted block-size tuples of ker(x|A0)
    violations: list          # A0-value profiles with two or more blocks > nu

    def ok(self) -> bool:
        return not self.violations


def kernel_block_analysis(trunc: Truncation, nu: Optional[int] = None,
                          max_elements: int = 64,
                          hom_budget: int = 20000) -> KernelReport:
    """Block structure of ker(x|A0) over all homs x: A -> M.

    Full hom enumeration is attempted first; when the hom set is too large
    (degenerate collapse maps can make it exponential even for small A),
    the analysis switches to enumerating the achievable restrictions x|A0,
    each certified by an extension witness.  The flagged condition -- some
    hom whose kernel on A0 has two blocks larger than nu -- is decided
    exactly in both modes.
    """
    spec = trunc.spec
    if nu is None:
        nu = spec.nu
    try:
        homs = enumerate_homs(trunc.groupoid, spec.algebra,
                              max_elements=max_elements, limit=hom_budget)
    except CapExceeded:
        homs = None
    if homs is not None:
        profiles = sorted({tuple(h[p] for p in trunc.a0_indices) for h in homs})
        count = len(homs)
        mode = "homs"
    else:
        profiles = _achievable_restrictions(trunc, max_elements)
        count = None
        mode = "restrictions"
    multisets = set()
    violations = []
    for prof in profiles:
        blocks = {}
        for v in prof:
            blocks[v] = blocks.get(v, 0) + 1
        sizes = tuple(sorted(blocks.values(), reverse=True))
        multisets.add(sizes)
        if len([s for s in sizes if s > nu]) >= 2:
            violations.append([spec.algebra.name(v) for v in prof])
    return KernelReport(nu, mode, count, sorted(multisets), violations)


def _achievable_restrictions(trunc: Truncation, max_elements: int) -> list:
    """All x|A0 value profiles achievable by some hom, by DFS with
    extension-feasibility pruning at every partial assignment."""
    M = trunc.spec.algebra
    positions = trunc.a0_indices
    values = M.elements()
    out = []
    partial = {}

    def extend(i):
        if i == len(positions):
            out.append(tuple(partial[p] for p in positions))
            return
        for v in values:
            partial[positions[i]] = v
            if hom_exists(trunc.groupoid, M, preassigned=dict(partial),
                          max_elements=max(max_elements, trunc.groupoid.n)):
                extend(i + 1)
        del partial[positions[i]]

    extend(0)
    return out


# ---------------------------------------------------------------------------
# k-local evaluation probe
# ---------------------------------------------------------------------------

def local_eval_probe(M: AutomaticAlgebra, A: Groupoid, k: int,
                     hom_cap: int = 64, node_cap: int = 10 ** 6) -> dict:
    """Classify maps hom(A,M) -> M as evaluations / k-local / neither.

    The k-local maps (k >= 2) are enumerated by depth-first search with
    subset-witness pruning, which is complete for the k-local set without
    enumerating all |M|^|hom| maps; "neither" is counted by arithmetic.
    For k >= 3 the run asserts that every k-local map whose range contains
    a letter is an evaluation, and aborts loudly otherwise.
    """
    homs = enumerate_homs(A, M, max_elements=hom_cap)
    H = len(homs)
    evals = {tuple(h[a_idx] for h in homs) for a_idx in range(A.n)}
    candidates = [sorted(set(homs[x])) for x in range(H)]
    one_local = 1
    for c in candidates:
        one_local *= len(c)
    total_maps = M.size() ** H
    report = {"hom_count": H, "k": k, "evaluation_count": len(evals),
              "one_local_count": one_local, "total_maps": total_maps}
    if k == 1:
        report["k_local_count"] = one_local
        report["k_local_non_eval"] = one_local - len(evals)
        report["neither_count"] = total_maps - one_local
        return report

    agree = [{} for _ in range(H)]
    for x in range(H):
        for a_idx in range(A.n):
            agree[x].setdefault(homs[x][a_idx], set()).add(a_idx)

    found = []
    assignment = [None] * H
    nodes = 0

    def extend(pos):
        nonlocal nodes
        if pos == H:
            found.append(tuple(assignment))
            return
        for value in candidates[pos]:
            nodes += 1
            if nodes > node_cap:
                raise CapExceeded("local evaluation search exceeded node cap")
            base = agree[pos][value]
            ok = True
            for subset in combinations(range(pos), min(k, pos + 1) - 1):
                wit = base
                for x in subset:
                    wit = wit & agree[x][assignment[x]]
                    if not wit:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                assignment[pos] = value
                extend(pos + 1)
                assignment[pos] = None

    extend(0)
    k_local = set(found)
    letters = set(M.letters())
    bad = [f for f in k_local
           if f not in evals and set(f) & letters]
    report["k_local_count"] = len(k_local)
    report["k_local_non_eval"] = len(k_local - evals)
    report["neither_count"] = total_maps - len(k_local)
    report["letter_range_non_eval"] = len(bad)
    if k >= 3 and bad:
        raise InternalInconsistency(
            "a k-local map with a letter in its range is not an evaluation")
    return report


def format_report(report: dict) -> str:
    """Human-readable construction report with a machine-readable block."""
    lines = [f"construction {report['name']}"
             + (f" params {','.join(report['params'])}" if report["params"] else "")
             + f" N={report['N']}",
             f"scope: {report['scope']}",
             f"|A| = {report['A_size']}"]
    for item in report["identities"]:
        status = "PASS" if item["pass"] else "FAIL"
        lines.append(f"  [{status}] {item['identity']}  ({item['instances']} instances)")
    membership = "in A (UNEXPECTED)" if report["g_in_A"] else "not in A"
    lines.append(f"  g = {report['g_label']}: {membership}")
    if "containment_ok" in report:
        lines.append(f"  containment: {'PASS' if report['containment_ok'] else 'FAIL'}")
    lines.append("machine: " + json.dumps({k: v for k, v in report.items()
                                           if k != "scope"}))
    return "\n".join(lines)
