"""Structural predicates: components, kill sets, whiskery cycles,
permutation profiles, per-component abelian groups, the letter-affine test,
and the commuting-permutation non-dualizability conditions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .abgroups import AbelianGroup, cyclic_decomposition
from .algebras import ZERO, AutomaticAlgebra, catalog
from .errors import (InternalInconsistency, NotCommuting, NotPermutational,
                     NotTransitive)
from .powers import Groupoid, find_embedding
from .terms import WHISKERY_QUASI, check_quasi_identity


# ---------------------------------------------------------------------------
# components and letter sets
# ---------------------------------------------------------------------------

def components(M: AutomaticAlgebra) -> list:
    """Connected components of the underlying undirected graph, as sorted
    lists of state indices, ordered by least member."""
    parent = list(range(M.n_states))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (si, _), ti in M.delta.items():
        a, b = find(si), find(ti)
        if a != b:
            parent[max(a, b)] = min(a, b)
    blocks = {}
    for i in range(M.n_states):
        blocks.setdefault(find(i), []).append(i)
    return [sorted(v) for _, v in sorted(blocks.items())]


def component_of(M: AutomaticAlgebra, state_index: int) -> list:
    for comp in components(M):
        if state_index in comp:
            return comp
    raise InternalInconsistency("state not covered by components")


@dataclass(frozen=True)
class LetterSets:
    dom: frozenset
    ran: frozenset
    ks: frozenset


def letter_sets(M: AutomaticAlgebra) -> list:
    return [LetterSets(M.dom(j), M.ran(j), M.kills(j)) for j in range(M.n_letters)]


# ---------------------------------------------------------------------------
# range/kill reachability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RanKillWitness:
    case: int            # 1: kill -> dom path, 2: ran -> kill path
    letter: int          # letter index
    state: int           # starting state index
    word: tuple          # letter-index word


def _bfs_to_targets(M: AutomaticAlgebra, sources, targets) -> Optional[tuple]:
    """Shortest (state, word) reaching a target set; sources in state order,
    letters in index order, so the result is deterministic."""
    best = None
    for src in sorted(sources):
        if src in targets:
            cand = (src, ())
        else:
            cand = None
            seen = {src}
            queue = deque([(src, ())])
            while queue:
                cur, word = queue.popleft()
                for j in range(M.n_letters):
                    t = M.delta.get((cur, j))
                    if t is None or t in seen:
                        continue
                    if t in targets:
                        cand = (src, word + (j,))
                        queue.clear()
                        break
                    seen.add(t)
                    queue.append((t, word + (j,)))
        if cand is not None and (best is None or len(cand[1]) < len(best[1])):
            best = cand
    return best


def rankill_check(M: AutomaticAlgebra) -> Optional[RanKillWitness]:
    """Path witness from ran a to ks a (case 2) or from ks a to dom a (case 1).

    Case 2 is searched first across all letters, then case 1; within a case,
    letters in index order and breadth-first shortest words.
    """
    for j in range(M.n_letters):
        hit = _bfs_to_targets(M, M.ran(j), M.kills(j))
        if hit is not None:
            return RanKillWitness(2, j, hit[0], hit[1])
    for j in range(M.n_letters):
        hit = _bfs_to_targets(M, M.kills(j), M.dom(j))
        if hit is not None:
            return RanKillWitness(1, j, hit[0], hit[1])
    return None


# ---------------------------------------------------------------------------
# whiskery cycles, three ways
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WhiskeryFailure:
    letter: int           # letter index failing
    state: int            # state index with qa != qa^{n+1} for all n
    forbidden_m: int      # the m for which F_m embeds
    embedding: dict       # F_m element name -> M element name


def _whiskery_direct(M: AutomaticAlgebra) -> Optional[tuple]:
    """(letter, state) of the first failure, scanning letters then states.

    The letter passes at q when q·a is 0 or returns to itself within |Q|
    further steps of a (the orbit of q·a has period at most |Q|).
    """
    for j in range(M.n_letters):
        for i in range(M.n_states):
            x = M.mul(M.state(i), M.letter(j))
            if x == ZERO:
                continue
            y = x
            for _ in range(M.n_states):
                y = M.mul(y, M.letter(j))
                if y == x:
                    break
            else:
                return (j, i)
    return None


def _whiskery_embedding(M: AutomaticAlgebra) -> Optional[tuple]:
    """(m, embedding dict) for the least m with F_m embeddable, else None."""
    for m in range(0, max(0, M.n_states - 1)):
        Fm = catalog("F", m)
        A = Groupoid.from_algebra(Fm)
        hom = find_embedding(A, M)
        if hom is not None:
            names = {A.labels[i]: M.name(x) for i, x in enumerate(hom)}
            return (m, names)
    return None


def whiskery_check(M: AutomaticAlgebra) -> Optional[WhiskeryFailure]:
    """None if every letter acts as whiskery cycles, else a failure witness.

    Computes all three equivalent conditions (direct orbit check, the
    vxx≈wxx ⟹ vx≈wx quasi-identity, F_m-embedding-freeness) and insists
    they agree before answering.
    """
    direct = _whiskery_direct(M)
    quasi = check_quasi_identity(M, WHISKERY_QUASI)
    embed = _whiskery_embedding(M)
    votes = (direct is None, quasi is None, embed is None)
    if len(set(votes)) != 1:
        raise InternalInconsistency(
            f"whiskery conditions disagree on {M!r}: "
            f"direct={direct}, quasi={quasi}, embedding={embed}")
    if direct is None:
        return None
    return WhiskeryFailure(direct[0], direct[1], embed[0], embed[1])


# ---------------------------------------------------------------------------
# permutation profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PermProfile:
    permutational: bool
    commuting: bool
    perms: Optional[tuple]        # per letter: tuple state->state, when permutational
    component_status: tuple       # per component: per letter 'total'/'undefined'/'partial'


def permutation_profile(M: AutomaticAlgebra) -> PermProfile:
    perms = []
    permutational = True
    for j in range(M.n_letters):
        act = M.action(j)
        if None in act or len(set(act)) != M.n_states:
            permutational = False
            perms = None
            break
        perms.append(act)
    commuting = True
    for i in range(M.n_states):
        q = M.state(i)
        for a in range(M.n_letters):
            for b in range(M.n_letters):
                if M.word(q, (a, b)) != M.word(q, (b, a)):
                    commuting = False
    status = []
    for comp in components(M):
        row = []
        for j in range(M.n_letters):
            defined = [i for i in comp if (i, j) in M.delta]
            if not defined:
                row.append("undefined")
            elif len(defined) == len(comp) and \
                    len({M.delta[(i, j)] for i in defined}) == len(comp):
                row.append("total")
            else:
                row.append("partial")
        status.append(tuple(row))
    return PermProfile(permutational, commuting,
                       tuple(perms) if perms is not None else None,
                       tuple(status))


# ---------------------------------------------------------------------------
# per-component abelian group
# ---------------------------------------------------------------------------

@dataclass
class AbelianGroupData:
    """Group structure carried by one component of a permutational,
    commuting algebra, via the regular action."""

    states: tuple          # sorted state indices of the component
    e_state: int           # identity's state index (least in the component)
    group: AbelianGroup    # op table on positions 0..|C|-1
    letter_images: dict    # letter index -> group index of its image
    subgroup_H: frozenset  # group indices: ⟨g⁻¹h : g,h letter images⟩
    exponent: int
    decomposition: list    # (generator group index, prime-power order)

    def group_index(self, state_index: int) -> int:
        return self.states.index(state_index)

    def state_of_group_index(self, gi: int) -> int:
        return self.states[gi]

    def op_states(self, s1: int, s2: int) -> int:
        return self.states[self.group.op(self.group_index(s1), self.group_index(s2))]

    def inv_state(self, s: int) -> int:
        return self.states[self.group.inv(self.group_index(s))]


def _perm_on(M: AutomaticAlgebra, comp: list, j: int) -> Optional[tuple]:
    """Letter j as a position permutation of the component, or None."""
    pos = {s: k for k, s in enumerate(comp)}
    out = []
    for s in comp:
        t = M.delta.get((s, j))
        if t is None or t not in pos:
            return None
    images = [pos[M.delta[(s, j)]] for s in comp]
    if len(set(images)) != len(comp):
        return None
    return tuple(images)


def _compose(p: tuple, q: tuple) -> tuple:
    return tuple(p[q[i]] for i in range(len(p)))


def _perm_inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def _perm_order(p: tuple) -> int:
    ident = tuple(range(len(p)))
    acc, k = p, 1
    while acc != ident:
        acc = _compose(acc, p)
        k += 1
    return k


def component_group(M: AutomaticAlgebra, comp: Sequence[int],
                    letters: Optional[Sequence[int]] = None) -> AbelianGroupData:
    """The abelian group a component carries under a transitive commuting
    permutation action of its letters.

    The identity is chosen as the least state of the component; the regular
    action makes φ ↦ φ(e) a bijection from the generated permutation group
    onto the component, and the group law transfers along it.  The defining
    law q·a = q * a_img is asserted before returning.
    """
    comp = sorted(comp)
    if letters is None:
        letters = [j for j in range(M.n_letters)
                   if any((s, j) in M.delta for s in comp)]
    perms = {}
    for j in letters:
        p = _perm_on(M, comp, j)
        if p is None:
            raise NotPermutational(
                f"letter {M.letter_names[j]} is not a permutation of the component")
        perms[j] = p
    for j1 in letters:
        for j2 in letters:
            if _compose(perms[j1], perms[j2]) != _compose(perms[j2], perms[j1]):
                raise NotCommuting(
                    f"letters {M.letter_names[j1]}, {M.letter_names[j2]} do not commute")
    ident = tuple(range(len(comp)))
    group_elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for p in frontier:
            for j in letters:
                q = _compose(perms[j], p)
                if q not in group_elems:
                    group_elems.add(q)
                    new.append(q)
        frontier = new
    orbit = {p[0] for p in group_elems}
    if len(orbit) != len(comp):
        raise NotTransitive("letters do not act transitively on the component")
    if len(group_elems) != len(comp):
        raise NotCommuting("transitive abelian action is not regular; "
                           "letters cannot commute")
    # e sits at position 0 (least state); the bijection is φ ↦ φ(position 0)
    by_value = {}
    for p in group_elems:
        by_value[p[0]] = p
    table = [[0] * len(comp) for _ in comp]
    for g1 in range(len(comp)):
        for g2 in range(len(comp)):
            table[g1][g2] = _compose(by_value[g1], by_value[g2])[0]
    group = AbelianGroup(table, labels=[M.state_names[s] for s in comp])
    letter_images = {j: perms[j][0] for j in letters}
    diffs = []
    for j1 in letters:
        for j2 in letters:
            diffs.append(group.op(group.inv(letter_images[j1]), letter_images[j2]))
    H = group.subgroup_generated(diffs)
    data = AbelianGroupData(tuple(comp), comp[0], group, letter_images, H,
                            group.exponent, cyclic_decomposition(group))
    for s in comp:
        for j in letters:
            got = M.mul(M.state(s), M.letter(j))
            want = M.state(data.op_states(s, data.state_of_group_index(letter_images[j])))
            if got != want:
                raise InternalInconsistency(
                    "component group law q·a = q * a_img failed")
    return data


# ---------------------------------------------------------------------------
# letter-affine analysis
# ---------------------------------------------------------------------------

@dataclass
class ComponentAffineReport:
    states: tuple
    sigma_c: tuple            # letter indices acting on this component
    dropped: tuple            # letters undefined on this component
    data: Optional[AbelianGroupData]
    coset_ok: bool
    failure: Optional[tuple]  # (kind, detail)


@dataclass
class LetterAffineReport:
    affine: bool
    components: list
    failure: Optional[tuple] = None   # (component states, kind, detail)


def letter_affine_analysis(M: AutomaticAlgebra) -> LetterAffineReport:
    """Per-component coset test for the letter actions.

    Per component C only the letters with domain meeting C count; each must
    act as a total permutation of C, the actions must commute, and the
    letter images must be closed under xy⁻¹z in the component group (that
    closure is exactly being a coset of the difference subgroup).  Letters
    undefined on C are recorded, not errors.
    """
    reports = []
    for comp in components(M):
        sigma_c = [j for j in range(M.n_letters)
                   if any((s, j) in M.delta for s in comp)]
        dropped = tuple(j for j in range(M.n_letters) if j not in sigma_c)
        for j in sigma_c:
            if _perm_on(M, comp, j) is None:
                failure = (tuple(comp), "not-permutational", M.letter_names[j])
                return LetterAffineReport(False, reports, failure)
        try:
            data = component_group(M, comp, sigma_c) if sigma_c else None
        except NotCommuting as exc:
            return LetterAffineReport(False, reports,
                                      (tuple(comp), "not-commuting", str(exc)))
        triple = None
        if data is not None:
            images = data.letter_images
            image_set = set(images.values())
            for a in sigma_c:
                for b in sigma_c:
                    for c in sigma_c:
                        g = data.group.op(images[a],
                                          data.group.op(data.group.inv(images[b]),
                                                        images[c]))
                        if g not in image_set:
                            triple = (a, b, c)
                            break
                    if triple:
                        break
                if triple:
                    break
        if triple is not None:
            reports.append(ComponentAffineReport(tuple(comp), tuple(sigma_c),
                                                 dropped, data, False, None))
            return LetterAffineReport(False, reports,
                                      (tuple(comp), "malcev",
                                       tuple(M.letter_names[x] for x in triple)))
        reports.append(ComponentAffineReport(tuple(comp), tuple(sigma_c),
                                             dropped, data, True, None))
    return LetterAffineReport(True, reports)


# ---------------------------------------------------------------------------
# commuting-permutation non-dualizability conditions
# ---------------------------------------------------------------------------

@dataclass
class NondcommWitness:
    b: int                   # letter index
    c: int                   # letter index
    m: int                   # order of ρ_b ρ_c⁻¹
    coset_report: list       # per component: (states, action count, checked)


def _coset_inside(actions: set, m: int) -> bool:
    """True iff the action set contains a coset of a nontrivial subgroup
    whose order divides m.

    A coset kH inside the set forces H = k⁻¹(kH), and H contains a cyclic
    subgroup ⟨g⟩ of order > 1 dividing m that still satisfies k⟨g⟩ ⊆ set;
    conversely any such ⟨g⟩ is itself a qualifying subgroup.  So it is
    enough to look for k in the set and g in k⁻¹·set with ⟨g⟩ ⊆ k⁻¹·set.
    """
    n = len(next(iter(actions)))
    ident = tuple(range(n))
    for k in actions:
        kinv = _perm_inverse(k)
        D = {_compose(kinv, a) for a in actions}
        for g in D:
            if g == ident:
                continue
            if m % _perm_order(g) != 0:
                continue
            power = g
            ok = True
            while power != ident:
                if power not in D:
                    ok = False
                    break
                power = _compose(power, g)
            if ok:
                return True
    return False


def nondcomm_check(M: AutomaticAlgebra) -> Optional[NondcommWitness]:
    """Witness (b, c, m) for the commuting-permutation non-dualizability
    conditions, or None.

    Requires: all letters act as permutations of Q, the permutations
    commute, some ρ_b ρ_c⁻¹ has order m > 1, and no component's action set
    contains a coset of a nontrivial subgroup of order dividing m.
    """
    profile = permutation_profile(M)
    if not profile.permutational or not profile.commuting:
        return None
    perms = profile.perms
    comps = components(M)
    for b in range(M.n_letters):
        for c in range(M.n_letters):
            if b == c:
                continue
            m = _perm_order(_compose(perms[b], _perm_inverse(perms[c])))
            if m <= 1:
                continue
            report = []
            ok = True
            for comp in comps:
                pos = {s: k for k, s in enumerate(comp)}
                actions = set()
                for j in range(M.n_letters):
                    actions.add(tuple(pos[perms[j][s]] for s in comp))
                if _coset_inside(actions, m):
                    ok = False
                    break
                report.append((tuple(comp), len(actions)))
            if ok:
                return NondcommWitness(b, c, m, report)
    return None
