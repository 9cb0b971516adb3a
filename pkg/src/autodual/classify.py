"""Certificate-producing dualizability classification.

The rule pipeline (order is part of the external contract):

  1  zero_semigroup          Q or Σ empty                        -> dualizable
  2  normalize               quasi-variety-preserving reductions
  3  whiskery                some letter not whiskery cycles     -> non-dualizable
  4  rankill                 kill/range reachability             -> non-dualizable
  5  order_sensitivity       rearrangement kill flip             -> non-dualizable
  6  single_letter           |Σ| = 1 (whiskery already passed)   -> dualizable
  7  two_state               |Q| = 2 equational test             -> either
  8  constant_letters        total, all letters constant         -> dualizable
  9  all_loops               every edge a loop                   -> dualizable
 10  letter_affine           per-component coset actions         -> dualizable
 11  commuting_permutations  coset-free commuting permutations   -> non-dualizable
 12  unknown                 honest fall-through

Certificates are JSON-shaped dicts tagged by "kind"; `verify_certificate`
re-derives every claim from the algebra alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import structure, terms
from .abgroups import AbelianGroup
from .algebras import ZERO, AutomaticAlgebra, catalog
from .errors import BadParams, InternalInconsistency
from .powers import Groupoid, find_embedding
from .structure import (components, letter_affine_analysis, nondcomm_check,
                        rankill_check, whiskery_check)
from .terms import LeftChain, check_identity

RULE_ORDER = ("zero_semigroup", "normalize", "whiskery", "rankill",
              "order_sensitivity", "single_letter", "two_state",
              "constant_letters", "all_loops", "letter_affine",
              "commuting_permutations", "unknown")

EQ_XY_XYYY = (LeftChain("x", ("y",)), LeftChain("x", ("y", "y", "y")))
EQ_WXYZ_WYXZ = (LeftChain("w", ("x", "y", "z")), LeftChain("w", ("y", "x", "z")))


@dataclass
class Verdict:
    outcome: str                  # dualizable | non_dualizable | unknown
    rule: str
    certificate: Optional[dict]
    trace: list

    def to_json(self) -> dict:
        return {"verdict": self.outcome, "rule": self.rule,
                "certificate": self.certificate, "trace": self.trace}

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        return cls(data["verdict"], data["rule"], data.get("certificate"),
                   data.get("trace", []))


# ---------------------------------------------------------------------------
# normalization (quasi-variety-preserving reductions)
# ---------------------------------------------------------------------------

def _drop_state_row(M: AutomaticAlgebra, i: int) -> AutomaticAlgebra:
    """Remove a state that is in no letter's range, with its outgoing row."""
    names = M.state_names[:i] + M.state_names[i + 1:]
    delta = {}
    for (si, lj), ti in M.delta.items():
        if si == i:
            continue
        if ti == i:
            raise BadParams("state is still in a range")
        delta[(si if si < i else si - 1, lj)] = ti if ti < i else ti - 1
    return AutomaticAlgebra(names, M.letter_names, delta)


def _find_reduction(M: AutomaticAlgebra):
    """First applicable reduction, least-index element first."""
    if M.n_states > 0:
        for j in range(M.n_letters):
            if not M.dom(j):
                N = M.drop_letter(j)
                q = M.state_names[0]
                emb = {x: [x, "0"] for x in _names(N)}
                emb[M.letter_names[j]] = ["0", q]
                return N, {"kind": "drop_undefined_letter",
                           "removed": M.letter_names[j], "embedding": emb}
    for j2 in range(M.n_letters):
        for j1 in range(j2):
            if M.action(j1) == M.action(j2):
                N = M.drop_letter(j2)
                kept = M.letter_names[j1]
                emb = {x: [x, "0"] for x in _names(N)}
                emb[M.letter_names[j2]] = [kept, kept]
                return N, {"kind": "drop_repeated_letter",
                           "removed": M.letter_names[j2], "embedding": emb}
    if M.n_letters > 0:
        for i in range(M.n_states):
            if all(i not in M.dom(j) and i not in M.ran(j)
                   for j in range(M.n_letters)):
                N = _drop_state_row(M, i)
                a = M.letter_names[0]
                emb = {x: [x, "0"] for x in _names(N)}
                emb[M.state_names[i]] = ["0", a]
                return N, {"kind": "drop_isolated_state",
                           "removed": M.state_names[i], "embedding": emb}
    for i in range(M.n_states):
        if any(i in M.ran(j) for j in range(M.n_letters)):
            continue
        for r in range(M.n_states):
            if r == i:
                continue
            if all(M.delta.get((i, j)) == M.delta.get((r, j))
                   for j in range(M.n_letters)):
                N = _drop_state_row(M, i)
                keep = M.state_names[r]
                emb = {x: [x, "0"] for x in _names(N)}
                emb[M.state_names[i]] = [keep, keep]
                return N, {"kind": "drop_redundant_state",
                           "removed": M.state_names[i], "embedding": emb}
        # only the least redundant state is taken per pass; continue scanning
    return None


def _names(M: AutomaticAlgebra) -> list:
    return list(M.state_names) + list(M.letter_names) + ["0"]


def _check_product_embedding(M: AutomaticAlgebra, factors: list, emb: dict) -> Optional[str]:
    """None if emb is an injective hom M -> Π factors, else a reason."""
    width = len(factors)
    for name in _names(M):
        if name not in emb or len(emb[name]) != width:
            return f"embedding missing or malformed at {name}"
    try:
        vec = {M.element_by_name(n): tuple(F.element_by_name(c)
                                           for F, c in zip(factors, emb[n]))
               for n in _names(M)}
    except Exception as exc:
        return f"embedding names invalid: {exc}"
    if len(set(vec.values())) != len(vec):
        return "embedding is not injective"
    for x in M.elements():
        for y in M.elements():
            lhs = vec[M.mul(x, y)]
            rhs = tuple(F.mul(a, b) for F, a, b in zip(factors, vec[x], vec[y]))
            if lhs != rhs:
                return (f"embedding is not a homomorphism at "
                        f"({M.name(x)}, {M.name(y)})")
    return None


def _apply_step_named(M: AutomaticAlgebra, step: dict) -> AutomaticAlgebra:
    kind, removed = step["kind"], step["removed"]
    if kind in ("drop_undefined_letter", "drop_repeated_letter"):
        j = M.letter_names.index(removed)
        if kind == "drop_undefined_letter" and M.dom(j):
            raise InternalInconsistency(f"letter {removed} is not undefined")
        if kind == "drop_repeated_letter" and not any(
                M.action(j) == M.action(j1) for j1 in range(M.n_letters) if j1 != j):
            raise InternalInconsistency(f"letter {removed} is not repeated")
        return M.drop_letter(j)
    if kind in ("drop_isolated_state", "drop_redundant_state"):
        i = M.state_names.index(removed)
        if any(i in M.ran(j) for j in range(M.n_letters)):
            raise InternalInconsistency(f"state {removed} is in a range")
        if kind == "drop_isolated_state" and any(
                i in M.dom(j) for j in range(M.n_letters)):
            raise InternalInconsistency(f"state {removed} is not isolated")
        if kind == "drop_redundant_state" and not any(
                r != i and all(M.delta.get((i, j)) == M.delta.get((r, j))
                               for j in range(M.n_letters))
                for r in range(M.n_states)):
            raise InternalInconsistency(f"state {removed} is not redundant")
        return _drop_state_row(M, i)
    raise InternalInconsistency(f"unknown reduction step kind {kind!r}")


def normalize_algebra(M: AutomaticAlgebra):
    """Apply the four reductions to fixpoint; each step records an embedding
    into the square of the reduced algebra and is verified before use."""
    steps = []
    cur = M
    while True:
        found = _find_reduction(cur)
        if found is None:
            return cur, steps
        nxt, step = found
        reason = _check_product_embedding(cur, [nxt, nxt], step["embedding"])
        if reason is not None:
            raise InternalInconsistency(f"reduction embedding invalid: {reason}")
        steps.append(step)
        cur = nxt


# ---------------------------------------------------------------------------
# the rule engine
# ---------------------------------------------------------------------------

def _constant_values(M: AutomaticAlgebra) -> Optional[dict]:
    if not M.is_total() or M.n_states == 0:
        return None
    out = {}
    for j in range(M.n_letters):
        imgs = set(M.action(j))
        if len(imgs) != 1:
            return None
        out[M.letter_names[j]] = M.state_names[imgs.pop()]
    return out


def _all_loops(M: AutomaticAlgebra) -> bool:
    return all(ti == si for (si, _), ti in M.delta.items())


def _two_state_decide(N: AutomaticAlgebra):
    """(holds: bool, forbidden: (name, embedding) or None), cross-asserted."""
    cex1 = check_identity(N, *EQ_XY_XYYY)
    cex2 = check_identity(N, *EQ_WXYZ_WYXZ)
    holds = cex1 is None and cex2 is None
    forbidden = None
    for i in range(6):
        Ni = catalog("N", i)
        A = Groupoid.from_algebra(Ni)
        hom = find_embedding(A, N)
        if hom is not None:
            forbidden = (f"N{i}", {A.labels[k]: N.name(x) for k, x in enumerate(hom)})
            break
    if holds != (forbidden is None):
        raise InternalInconsistency(
            "two-state equations and forbidden-subalgebra tests disagree")
    return holds, forbidden


def _serialize_affine(N: AutomaticAlgebra, report) -> dict:
    comps = []
    for cr in report.components:
        entry = {"states": [N.state_names[s] for s in cr.states],
                 "letters": [N.letter_names[j] for j in cr.sigma_c],
                 "dropped": [N.letter_names[j] for j in cr.dropped]}
        if cr.data is not None:
            data = cr.data
            names = [N.state_names[s] for s in data.states]
            entry.update({
                "e": N.state_names[data.e_state],
                "op": [[names[data.group.op(i, k)] for k in range(len(names))]
                       for i in range(len(names))],
                "letter_images": {N.letter_names[j]: names[g]
                                  for j, g in sorted(data.letter_images.items())},
                "H": [names[g] for g in sorted(data.subgroup_H)],
                "exponent": data.exponent,
                "decomposition": [[names[g], d] for g, d in data.decomposition],
            })
        comps.append(entry)
    return {"kind": "letter_affine", "components": comps}


def _loops_chain_cert(N: AutomaticAlgebra) -> dict:
    comps = components(N)
    split = None
    if len(comps) > 1:
        subs = [N.component_subalgebra(c) for c in comps]
        emb = {}
        for i, c in enumerate(comps):
            for s in c:
                vec = ["0"] * len(comps)
                vec[i] = N.state_names[s]
                emb[N.state_names[s]] = vec
        for name in list(N.letter_names) + ["0"]:
            emb[name] = [name] * len(comps)
        split = {"kind": "component_split",
                 "components": [[N.state_names[s] for s in c] for c in comps],
                 "embedding": emb}
        reason = _check_product_embedding(N, subs, emb)
        if reason is not None:
            raise InternalInconsistency(f"component split invalid: {reason}")
    entries = []
    for c in comps:
        sub = N.component_subalgebra(c)
        final, steps = normalize_algebra(sub)
        if final.n_states != 1 or final.n_letters != 1 or \
                _constant_values(final) is None:
            raise InternalInconsistency("loop component did not reduce to a "
                                        "one-state constant-letter algebra")
        entries.append({"states": [N.state_names[s] for s in c],
                        "steps": steps,
                        "final": {"state": final.state_names[0],
                                  "letter": final.letter_names[0]}})
    return {"kind": "all_loops", "split": split, "components": entries}


def classify(M: AutomaticAlgebra) -> Verdict:
    """Run the rule pipeline and return a self-contained verdict."""
    trace = []

    def entry(rule, fired, detail=""):
        trace.append({"rule": rule, "fired": fired, "detail": detail})

    if M.n_states == 0 or M.n_letters == 0:
        entry("zero_semigroup", True, "empty state or letter set")
        return Verdict("dualizable", "zero_semigroup",
                       {"kind": "zero_semigroup"}, trace)
    entry("zero_semigroup", False)

    N, steps = normalize_algebra(M)
    entry("normalize", bool(steps),
          ", ".join(f"{s['kind']}:{s['removed']}" for s in steps) or "already normal")

    def wrap(cert):
        if steps:
            return {"kind": "reduction_chain", "steps": steps, "inner": cert}
        return cert

    if N.n_states == 0 or N.n_letters == 0:
        entry("zero_semigroup", True, "empty after normalization")
        return Verdict("dualizable", "zero_semigroup",
                       wrap({"kind": "zero_semigroup"}), trace)

    wf = whiskery_check(N)
    if wf is not None:
        entry("whiskery", True,
              f"letter {N.letter_names[wf.letter]} fails at {N.state_names[wf.state]}")
        cert = {"kind": "whiskery_failure",
                "letter": N.letter_names[wf.letter],
                "state": N.state_names[wf.state],
                "m": wf.forbidden_m, "embedding": wf.embedding}
        return Verdict("non_dualizable", "whiskery", wrap(cert), trace)
    entry("whiskery", False)

    rk = rankill_check(N)
    if rk is not None:
        entry("rankill", True, f"case {rk.case} at letter {N.letter_names[rk.letter]}")
        cert = {"kind": "rankill", "case": rk.case,
                "letter": N.letter_names[rk.letter],
                "state": N.state_names[rk.state],
                "word": [N.letter_names[j] for j in rk.word]}
        return Verdict("non_dualizable", "rankill", wrap(cert), trace)
    entry("rankill", False)

    ow = terms.order_sensitivity(N)
    if ow is not None:
        entry("order_sensitivity", True, f"state {N.state_names[ow.state]}")
        cert = {"kind": "order_sensitive", "state": N.state_names[ow.state],
                "w1": [N.letter_names[j] for j in ow.w1],
                "w2": [N.letter_names[j] for j in ow.w2]}
        return Verdict("non_dualizable", "order_sensitivity", wrap(cert), trace)
    entry("order_sensitivity", False)

    if N.n_letters == 1:
        entry("single_letter", True, "single whiskery letter")
        return Verdict("dualizable", "single_letter",
                       wrap({"kind": "single_letter_whiskery"}), trace)
    entry("single_letter", False)

    if N.n_states == 2:
        holds, forbidden = _two_state_decide(N)
        if holds:
            entry("two_state", True, "both equations hold")
            cert = {"kind": "two_state_equations",
                    "identities": ["x*y = x*y*y*y", "w*x*y*z = w*y*x*z"]}
            return Verdict("dualizable", "two_state", wrap(cert), trace)
        entry("two_state", True, f"forbidden subalgebra {forbidden[0]}")
        cert = {"kind": "two_state_forbidden", "which": forbidden[0],
                "embedding": forbidden[1]}
        return Verdict("non_dualizable", "two_state", wrap(cert), trace)
    entry("two_state", False)

    values = _constant_values(N)
    if values is not None:
        entry("constant_letters", True)
        return Verdict("dualizable", "constant_letters",
                       wrap({"kind": "constant_letters", "values": values}), trace)
    entry("constant_letters", False)

    if _all_loops(N):
        entry("all_loops", True)
        return Verdict("dualizable", "all_loops", wrap(_loops_chain_cert(N)), trace)
    entry("all_loops", False)

    affine = letter_affine_analysis(N)
    if affine.affine:
        entry("letter_affine", True)
        return Verdict("dualizable", "letter_affine",
                       wrap(_serialize_affine(N, affine)), trace)
    if affine.failure:
        comp_names = " ".join(N.state_names[i] for i in affine.failure[0])
        entry("letter_affine", False,
              f"failure {affine.failure[1]} on component {{{comp_names}}}")
    else:
        entry("letter_affine", False)

    nd = nondcomm_check(N)
    if nd is not None:
        entry("commuting_permutations", True,
              f"pair ({N.letter_names[nd.b]}, {N.letter_names[nd.c]}), m = {nd.m}")
        cert = {"kind": "commuting_permutations",
                "b": N.letter_names[nd.b], "c": N.letter_names[nd.c], "m": nd.m,
                "report": [{"states": [N.state_names[s] for s in comp],
                            "actions": count} for comp, count in nd.coset_report]}
        return Verdict("non_dualizable", "commuting_permutations", wrap(cert), trace)
    entry("commuting_permutations", False)

    entry("unknown", True, "no rule applies; the problem is open here")
    return Verdict("unknown", "unknown", None, trace)


# ---------------------------------------------------------------------------
# certificate verification (independent re-derivation)
# ---------------------------------------------------------------------------

def verify_certificate(M: AutomaticAlgebra, verdict) -> tuple:
    """(ok, reason). Re-derives every claim in the certificate from M alone."""
    try:
        if isinstance(verdict, Verdict):
            outcome, cert = verdict.outcome, verdict.certificate
        else:
            outcome, cert = verdict["verdict"], verdict.get("certificate")
        if outcome not in ("dualizable", "non_dualizable", "unknown"):
            return (False, f"unrecognized verdict {outcome!r}")
        if outcome == "unknown":
            return _verify_unknown(M)
        if cert is None:
            return (False, "decided verdict without certificate")
        return _verify_cert(M, cert, outcome)
    except Exception as exc:  # malformed certificates must not crash the verifier
        return (False, f"verification error: {exc}")


_ND_KINDS = {"whiskery_failure", "rankill", "order_sensitive",
             "two_state_forbidden", "commuting_permutations"}
_D_KINDS = {"zero_semigroup", "single_letter_whiskery", "two_state_equations",
            "constant_letters", "all_loops", "letter_affine"}


def _verify_cert(M: AutomaticAlgebra, cert: dict, outcome: str) -> tuple:
    kind = cert.get("kind")
    if kind == "reduction_chain":
        cur = M
        for step in cert["steps"]:
            if step["kind"] == "component_split":
                return (False, "component_split is only valid inside all_loops")
            nxt = _apply_step_named(cur, step)
            reason = _check_product_embedding(cur, [nxt, nxt], step["embedding"])
            if reason is not None:
                return (False, reason)
            cur = nxt
        return _verify_cert(cur, cert["inner"], outcome)
    if outcome == "non_dualizable" and kind not in _ND_KINDS:
        return (False, f"{kind} cannot witness non-dualizability")
    if outcome == "dualizable" and kind not in _D_KINDS:
        return (False, f"{kind} cannot witness dualizability")
    checker = _CHECKERS.get(kind)
    if checker is None:
        return (False, f"unknown certificate kind {kind!r}")
    return checker(M, cert)


def _verify_zero(M, cert):
    if M.n_states == 0 or M.n_letters == 0:
        return (True, "")
    return (False, "both Q and Σ are nonempty")


def _verify_whiskery_failure(M, cert):
    j = M.letter_names.index(cert["letter"])
    i = M.state_names.index(cert["state"])
    x = M.mul(M.state(i), M.letter(j))
    if x == ZERO:
        return (False, "letter is undefined at the state, so it passes there")
    y = x
    for _ in range(M.n_states):
        y = M.mul(y, M.letter(j))
        if y == x:
            return (False, "the state returns to an a-cycle; no failure")
    m = cert["m"]
    Fm = catalog("F", m)
    emb = cert["embedding"]
    elems = {Fm.name(e): e for e in Fm.elements()}
    if set(emb) != set(elems):
        return (False, "embedding domain does not match F_m")
    try:
        img = {e: M.element_by_name(emb[name]) for name, e in elems.items()}
    except Exception:
        return (False, "embedding image names invalid")
    if len(set(img.values())) != len(img):
        return (False, "embedding not injective")
    for a in Fm.elements():
        for b in Fm.elements():
            if M.mul(img[a], img[b]) != img[Fm.mul(a, b)]:
                return (False, "embedding is not a homomorphism")
    return (True, "")


def _verify_rankill(M, cert):
    j = M.letter_names.index(cert["letter"])
    i = M.state_names.index(cert["state"])
    word = tuple(M.letter_names.index(a) for a in cert["word"])
    end = M.word(M.state(i), word)
    if end == ZERO:
        return (False, "witness word dies")
    ti = M.state_index(end)
    if cert["case"] == 1:
        if i in M.kills(j) and ti in M.dom(j):
            return (True, "")
        return (False, "case-1 conditions fail")
    if cert["case"] == 2:
        if i in M.ran(j) and ti in M.kills(j):
            return (True, "")
        return (False, "case-2 conditions fail")
    return (False, "unknown case")


def _verify_order_sensitive(M, cert):
    i = M.state_names.index(cert["state"])
    w1 = tuple(M.letter_names.index(a) for a in cert["w1"])
    w2 = tuple(M.letter_names.index(a) for a in cert["w2"])
    if sorted(w1) != sorted(w2):
        return (False, "words are not rearrangements of each other")
    if M.word(M.state(i), w1) != ZERO:
        return (False, "first word does not die")
    if M.word(M.state(i), w2) == ZERO:
        return (False, "second word dies too")
    return (True, "")


def _verify_single_letter(M, cert):
    if M.n_letters != 1:
        return (False, "more than one letter")
    if structure._whiskery_direct(M) is not None:
        return (False, "the letter does not act as whiskery cycles")
    return (True, "")


def _verify_two_state_equations(M, cert):
    if M.n_states != 2:
        return (False, "not a two-state algebra")
    if check_identity(M, *EQ_XY_XYYY) is not None:
        return (False, "xy = xyyy fails")
    if check_identity(M, *EQ_WXYZ_WYXZ) is not None:
        return (False, "wxyz = wyxz fails")
    return (True, "")


def _verify_two_state_forbidden(M, cert):
    which = cert["which"]
    if not which.startswith("N") or not which[1:].isdigit():
        return (False, "unknown forbidden algebra")
    Ni = catalog("N", int(which[1:]))
    emb = cert["embedding"]
    elems = {Ni.name(e): e for e in Ni.elements()}
    if set(emb) != set(elems):
        return (False, "embedding domain mismatch")
    try:
        img = {e: M.element_by_name(emb[name]) for name, e in elems.items()}
    except Exception:
        return (False, "embedding image names invalid")
    if len(set(img.values())) != len(img):
        return (False, "embedding not injective")
    for a in Ni.elements():
        for b in Ni.elements():
            if M.mul(img[a], img[b]) != img[Ni.mul(a, b)]:
                return (False, "embedding is not a homomorphism")
    return (True, "")


def _verify_constant_letters(M, cert):
    values = _constant_values(M)
    if values is None:
        return (False, "not a total constant-letter algebra")
    if values != cert["values"]:
        return (False, "stated constants disagree with the table")
    return (True, "")


def _verify_all_loops(M, cert):
    if not _all_loops(M):
        return (False, "some edge is not a loop")
    comps = components(M)
    stated = cert.get("components", [])
    if [e["states"] for e in stated] != [[M.state_names[s] for s in c] for c in comps]:
        return (False, "stated components do not match")
    split = cert.get("split")
    if len(comps) > 1:
        if split is None:
            return (False, "missing component split")
        subs = [M.component_subalgebra(c) for c in comps]
        reason = _check_product_embedding(M, subs, split["embedding"])
        if reason is not None:
            return (False, reason)
    for comp, entry in zip(comps, stated):
        cur = M.component_subalgebra(comp)
        for step in entry["steps"]:
            nxt = _apply_step_named(cur, step)
            reason = _check_product_embedding(cur, [nxt, nxt], step["embedding"])
            if reason is not None:
                return (False, reason)
            cur = nxt
        if cur.n_states != 1 or cur.n_letters != 1 or _constant_values(cur) is None:
            return (False, "component does not reduce to the constant-letter case")
        if entry["final"] != {"state": cur.state_names[0],
                              "letter": cur.letter_names[0]}:
            return (False, "stated final algebra disagrees")
    return (True, "")


def _verify_letter_affine(M, cert):
    comps = components(M)
    stated = cert.get("components", [])
    if [e["states"] for e in stated] != [[M.state_names[s] for s in c] for c in comps]:
        return (False, "stated components do not match")
    for comp, entry in zip(comps, stated):
        sigma_c = [j for j in range(M.n_letters)
                   if any((s, j) in M.delta for s in comp)]
        if entry["letters"] != [M.letter_names[j] for j in sigma_c]:
            return (False, "stated component letters do not match")
        if not sigma_c:
            continue
        names = entry["states"]
        pos = {n: k for k, n in enumerate(names)}
        try:
            table = [[pos[v] for v in row] for row in entry["op"]]
            G = AbelianGroup(table, labels=names)
        except Exception as exc:
            return (False, f"stated table is not an abelian group: {exc}")
        if names[G.identity] != entry["e"]:
            return (False, "stated identity disagrees with the table")
        images = {}
        for j in sigma_c:
            img_name = entry["letter_images"].get(M.letter_names[j])
            if img_name not in pos:
                return (False, f"no stated image for letter {M.letter_names[j]}")
            images[j] = pos[img_name]
        for k, s in enumerate(comp):
            for j in sigma_c:
                got = M.mul(M.state(s), M.letter(j))
                want_pos = G.op(k, images[j])
                if got == ZERO or M.state_names.index(names[want_pos]) != M.state_index(got):
                    return (False, "table law q·a = q * a_img fails")
        diffs = [G.op(G.inv(images[a]), images[b]) for a in sigma_c for b in sigma_c]
        H = G.subgroup_generated(diffs)
        if sorted(names[g] for g in H) != sorted(entry["H"]):
            return (False, "stated H is not the difference subgroup")
        image_set = set(images.values())
        for x in image_set:
            for y in image_set:
                for z in image_set:
                    if G.op(x, G.op(G.inv(y), z)) not in image_set:
                        return (False, "letter images are not Mal'cev closed")
        least = images[sigma_c[0]]
        coset = {G.op(least, h) for h in H}
        if coset != image_set:
            return (False, "letter images are not a coset of H")
        if entry.get("exponent") != G.exponent:
            return (False, "stated exponent disagrees")
        total = 1
        for gen_name, order in entry.get("decomposition", []):
            if gen_name not in pos or G.order_of(pos[gen_name]) != order:
                return (False, "stated decomposition generator order is wrong")
            total *= order
        if total != G.n:
            return (False, "stated decomposition orders do not multiply to |C|")
    return (True, "")


def _verify_commuting_permutations(M, cert):
    profile = structure.permutation_profile(M)
    if not profile.permutational:
        return (False, "not permutational")
    if not profile.commuting:
        return (False, "letters do not commute")
    b = M.letter_names.index(cert["b"])
    c = M.letter_names.index(cert["c"])
    perms = profile.perms
    m = structure._perm_order(structure._compose(perms[b],
                                                 structure._perm_inverse(perms[c])))
    if m != cert["m"] or m <= 1:
        return (False, f"stated order m = {cert['m']} is wrong (actual {m})")
    for comp in components(M):
        pos = {s: k for k, s in enumerate(comp)}
        actions = {tuple(pos[perms[j][s]] for s in comp) for j in range(M.n_letters)}
        if structure._coset_inside(actions, m):
            return (False, "a component action set contains a qualifying coset")
    return (True, "")


_CHECKERS = {
    "zero_semigroup": _verify_zero,
    "whiskery_failure": _verify_whiskery_failure,
    "rankill": _verify_rankill,
    "order_sensitive": _verify_order_sensitive,
    "single_letter_whiskery": _verify_single_letter,
    "two_state_equations": _verify_two_state_equations,
    "two_state_forbidden": _verify_two_state_forbidden,
    "constant_letters": _verify_constant_letters,
    "all_loops": _verify_all_loops,
    "letter_affine": _verify_letter_affine,
    "commuting_permutations": _verify_commuting_permutations,
}


def _verify_unknown(M: AutomaticAlgebra) -> tuple:
    """An unknown verdict claims no rule decides; re-check each predicate."""
    if M.n_states == 0 or M.n_letters == 0:
        return (False, "zero semigroup decides")
    N, _ = normalize_algebra(M)
    if N.n_states == 0 or N.n_letters == 0:
        return (False, "normalizes to a zero semigroup")
    if whiskery_check(N) is not None:
        return (False, "whiskery decides")
    if rankill_check(N) is not None:
        return (False, "rankill decides")
    if terms.order_sensitivity(N) is not None:
        return (False, "order sensitivity decides")
    if N.n_letters == 1 or N.n_states == 2:
        return (False, "a classification theorem decides")
    if _constant_values(N) is not None or _all_loops(N):
        return (False, "a sufficiency rule decides")
    if letter_affine_analysis(N).affine:
        return (False, "letter-affine decides")
    if nondcomm_check(N) is not None:
        return (False, "commuting permutations decide")
    return (True, "")


# ---------------------------------------------------------------------------
# the alternating chain
# ---------------------------------------------------------------------------

def _least_prime_above(x: int) -> int:
    p = x + 1
    while True:
        if p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1)):
            return p
        p += 1


def _perm_closure(perms: set) -> set:
    out = set(perms)
    frontier = list(out)
    while frontier:
        new = []
        for p in frontier:
            for q in perms:
                r = tuple(p[i] for i in q)
                if r not in out:
                    out.add(r)
                    new.append(r)
        frontier = new
    return out


def gen_chain(n: int) -> AutomaticAlgebra:
    """Stage n of the alternating chain: odd stages append a fresh prime
    cycle pair, even stages close the letter actions into an abelian
    permutation group."""
    if n < 1:
        raise BadParams("chain index must be >= 1")
    M = catalog("C", 3)
    g_counter = 1
    for stage in range(2, n + 1):
        states = list(M.state_names)
        letters = list(M.letter_names)
        actions = {letters[j]: M.action(j) for j in range(M.n_letters)}
        if stage % 2 == 0:
            closure = _perm_closure(set(actions.values()))
            for perm in sorted(closure - set(actions.values())):
                name = f"g{g_counter}"
                g_counter += 1
                letters.append(name)
                actions[name] = perm
        else:
            p = _least_prime_above(len(letters) + 3)
            offset = len(states)
            new_states = [f"s{stage}_{i}" for i in range(1, p + 1)]
            states += new_states
            for name in list(actions):
                actions[name] = actions[name] + tuple(range(offset, offset + p))
            ident_old = tuple(range(offset))
            fwd = tuple(offset + ((i + 1) % p) for i in range(p))
            back = tuple(offset + ((i - 1) % p) for i in range(p))
            actions[f"b_{stage}"] = ident_old + fwd
            actions[f"c_{stage}"] = ident_old + back
            letters += [f"b_{stage}", f"c_{stage}"]
        delta = {}
        for j, name in enumerate(letters):
            for i, t in enumerate(actions[name]):
                delta[(i, j)] = t
        M = AutomaticAlgebra(states, letters, delta)
    return M
