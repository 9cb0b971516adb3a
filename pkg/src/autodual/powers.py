"""Finite powers, subuniverse generation, hom enumeration, compatibility.

Power elements are plain tuples of element codes over the index set
{0, …, n−1}.  Generated subalgebras are materialized as `Groupoid` tables
(opaque finite groupoids) so that hom enumeration works uniformly for
catalog algebras and for subalgebras of powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .algebras import ZERO, AutomaticAlgebra
from .errors import (BadParams, CapExceeded, DuplicateIndex, IndexOutOfRange,
                     PreconditionViolated, UnknownName)

HOM_CAP_DEFAULT = 64


# ---------------------------------------------------------------------------
# power elements and subuniverse generation
# ---------------------------------------------------------------------------

def power_element(base: int, overrides: Iterable[tuple], n: int) -> tuple:
    """Constant tuple with value `base`, patched at the override positions."""
    values = [base] * n
    seen = set()
    for idx, v in overrides:
        if not 0 <= idx < n:
            raise IndexOutOfRange(f"override index {idx} not in 0..{n - 1}")
        if idx in seen:
            raise DuplicateIndex(f"override index {idx} repeated")
        seen.add(idx)
        values[idx] = v
    return tuple(values)


def pointwise_mul(M: AutomaticAlgebra, u: tuple, v: tuple) -> tuple:
    return tuple(M.mul(x, y) for x, y in zip(u, v))


def generate_subuniverse(M: AutomaticAlgebra, n: int,
                         generators: Sequence[tuple],
                         max_elements: Optional[int] = None) -> list:
    """Closure under pointwise product, in deterministic generation order.

    Generators come first (duplicates removed, first occurrence kept); each
    round then multiplies all known pairs in index order and appends new
    elements in discovery order.
    """
    elems = []
    index = {}
    for g in generators:
        if len(g) != n:
            raise BadParams("generator has wrong index size")
        if g not in index:
            index[g] = len(elems)
            elems.append(g)
    frontier = list(elems)
    while frontier:
        new = []
        known = list(elems)
        for u in known:
            for v in frontier:
                for w in (pointwise_mul(M, u, v), pointwise_mul(M, v, u)):
                    if w not in index:
                        index[w] = len(elems)
                        elems.append(w)
                        new.append(w)
                        if max_elements is not None and len(elems) > max_elements:
                            raise CapExceeded(
                                f"subuniverse exceeded {max_elements} elements")
        frontier = new
    return elems


# ---------------------------------------------------------------------------
# finite groupoids as explicit tables
# ---------------------------------------------------------------------------

class Groupoid:
    """Finite groupoid by multiplication table; elements are 0..n-1."""

    def __init__(self, table: Sequence[Sequence[int]], labels=None):
        self.table = [list(row) for row in table]
        self.n = len(self.table)
        for row in self.table:
            if len(row) != self.n or any(not 0 <= x < self.n for x in row):
                raise BadParams("malformed multiplication table")
        self.labels = list(labels) if labels is not None else list(range(self.n))

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    @classmethod
    def from_algebra(cls, M: AutomaticAlgebra) -> "Groupoid":
        elems = M.elements()
        pos = {x: i for i, x in enumerate(elems)}
        table = [[pos[M.mul(x, y)] for y in elems] for x in elems]
        return cls(table, labels=[M.name(x) for x in elems])

    @classmethod
    def from_power(cls, M: AutomaticAlgebra, elements: Sequence[tuple]) -> "Groupoid":
        pos = {u: i for i, u in enumerate(elements)}
        table = []
        for u in elements:
            row = []
            for v in elements:
                w = pointwise_mul(M, u, v)
                if w not in pos:
                    raise BadParams("element list is not closed under product")
                row.append(pos[w])
            table.append(row)
        return cls(table, labels=list(elements))

    def zero_element(self) -> Optional[int]:
        """The absorbing element, if there is one."""
        for i in range(self.n):
            if all(self.table[i][j] == i and self.table[j][i] == i
                   for j in range(self.n)):
                return i
        return None


# ---------------------------------------------------------------------------
# homomorphism enumeration
# ---------------------------------------------------------------------------

def enumerate_homs(A: Groupoid, M: AutomaticAlgebra, injective_only: bool = False,
                   max_elements: int = HOM_CAP_DEFAULT,
                   limit: Optional[int] = None) -> list:
    """All homomorphisms A -> M as tuples of element codes, indexed by A.

    Backtracking with closure propagation (a product's image is forced as
    soon as both factors are decided) and forward checking: at every node
    the most constrained element is branched next.  The result is returned
    sorted, so the output order is canonical regardless of search order.
    With `limit`, enumeration aborts with CapExceeded once more than that
    many homs exist.
    """
    return _hom_search(A, M, injective_only=injective_only,
                       max_elements=max_elements, limit=limit)


def hom_exists(A: Groupoid, M: AutomaticAlgebra, preassigned: Optional[dict] = None,
               max_elements: int = 4096) -> bool:
    """Is there a hom A -> M extending the partial element->code map?"""
    found = _hom_search(A, M, preassigned=preassigned, first_only=True,
                        max_elements=max_elements)
    return bool(found)


def _hom_search(A: Groupoid, M: AutomaticAlgebra, injective_only: bool = False,
                max_elements: int = HOM_CAP_DEFAULT, limit: Optional[int] = None,
                preassigned: Optional[dict] = None,
                first_only: bool = False) -> list:
    if A.n > max_elements:
        raise CapExceeded(f"|A| = {A.n} exceeds hom-enumeration cap {max_elements}")
    targets = M.elements()
    size = M.size()
    mul = [[M.mul(x, y) for y in range(size)] for x in range(size)]
    n = A.n
    table = A.table
    out = []
    img = [None] * n

    assigned = []

    def propagate(start):
        forced = [start]
        assigned.append(start)
        queue = [start]
        while queue:
            i = queue.pop()
            row_i = table[i]
            for j in list(assigned):
                for (x, y) in ((i, j), (j, i)):
                    k = table[x][y]
                    v = mul[img[x]][img[y]]
                    if img[k] is None:
                        img[k] = v
                        forced.append(k)
                        assigned.append(k)
                        queue.append(k)
                    elif img[k] != v:
                        return forced, False
        return forced, True

    def undo(forced):
        for k in forced:
            img[k] = None
        del assigned[-len(forced):]

    def candidates(j):
        used = set(img) - {None} if injective_only else ()
        found = []
        row_j = table[j]
        for c in targets:
            if c in used:
                continue
            ok = True
            for k in assigned:
                t = table[k][j]
                if img[t] is not None and mul[img[k]][c] != img[t]:
                    ok = False
                    break
                t = row_j[k]
                if img[t] is not None and mul[c][img[k]] != img[t]:
                    ok = False
                    break
            if ok:
                t = row_j[j]
                if img[t] is not None and mul[c][c] != img[t]:
                    continue
                found.append(c)
        return found

    def extend():
        if first_only and out:
            return
        best_j, best_cands = None, None
        for j in range(n):
            if img[j] is not None:
                continue
            cands = candidates(j)
            if best_cands is None or len(cands) < len(best_cands):
                best_j, best_cands = j, cands
                if len(cands) <= 1:
                    break
        if best_j is not None and not best_cands:
            return
        if best_j is None:
            if injective_only and len(set(img)) != n:
                return
            out.append(tuple(img))
            if limit is not None and len(out) > limit:
                raise CapExceeded(f"more than {limit} homomorphisms")
            return
        for c in best_cands:
            img[best_j] = c
            forced, ok = propagate(best_j)
            if ok and not (injective_only and _has_dup(img)):
                extend()
            undo(forced)
            if first_only and out:
                return

    def _has_dup(values):
        seen = set()
        for v in values:
            if v is None:
                continue
            if v in seen:
                return True
            seen.add(v)
        return False

    if preassigned:
        for j, v in preassigned.items():
            if img[j] is None:
                img[j] = v
                forced, ok = propagate(j)
                if not ok:
                    return []
            elif img[j] != v:
                return []
    extend()
    out.sort()
    return out


def find_embedding(A: Groupoid, M: AutomaticAlgebra,
                   max_elements: int = HOM_CAP_DEFAULT) -> Optional[tuple]:
    """First injective hom A -> M, or None."""
    homs = enumerate_homs(A, M, injective_only=True, max_elements=max_elements)
    return homs[0] if homs else None


# ---------------------------------------------------------------------------
# compatibility
# ---------------------------------------------------------------------------

def is_compatible(M: AutomaticAlgebra, relation: Iterable[tuple]) -> bool:
    """True iff the relation is closed under the pointwise product."""
    rel = set(relation)
    for u in rel:
        for v in rel:
            if tuple(M.mul(x, y) for x, y in zip(u, v)) not in rel:
                return False
    return True


@dataclass(frozen=True)
class PartialOperation:
    name: str
    arity: int
    table: dict  # argument tuple -> value

    @property
    def domain(self):
        return self.table.keys()

    def __call__(self, *args):
        return self.table[args]

    def graph(self) -> set:
        return {args + (value,) for args, value in self.table.items()}


# ---------------------------------------------------------------------------
# the compatible-operation library
# ---------------------------------------------------------------------------

def op_g_uv(M: AutomaticAlgebra, u: int, v: int) -> PartialOperation:
    """Binary total op: u on the single pair (u, v), 0 elsewhere.

    Needs a letter among {u, v}, else the pair (u, v) could be hit by a
    product and the operation would not be a homomorphism.
    """
    if not (M.is_letter(u) or M.is_letter(v)):
        raise PreconditionViolated("g_uv needs a letter among its parameters")
    table = {}
    for x in M.elements():
        for y in M.elements():
            table[(x, y)] = u if (x, y) == (u, v) else ZERO
    return PartialOperation("g_uv", 2, table)


def op_join(M: AutomaticAlgebra) -> PartialOperation:
    """Partial join of the flat order (0 below every state)."""
    table = {}
    for x in M.elements():
        table[(x, x)] = x
    for s in M.states():
        table[(ZERO, s)] = s
        table[(s, ZERO)] = s
    return PartialOperation("join", 2, table)


def op_quasi_meet(M: AutomaticAlgebra) -> PartialOperation:
    """Total quasi-meet: first argument if both are states or both letters.

    Only a homomorphism on total algebras.
    """
    if not M.is_total():
        raise PreconditionViolated("quasi-meet needs a total algebra")
    table = {}
    for x in M.elements():
        for y in M.elements():
            both_states = M.is_state(x) and M.is_state(y)
            both_letters = M.is_letter(x) and M.is_letter(y)
            table[(x, y)] = x if (both_states or both_letters) else ZERO
    return PartialOperation("quasi_meet", 2, table)


def _constant_letter_values(M: AutomaticAlgebra):
    """state-index value of each letter if all letters are constant, else None."""
    values = []
    for j in range(M.n_letters):
        imgs = set(M.action(j))
        if len(imgs) != 1 or None in imgs:
            return None
        values.append(imgs.pop())
    return values


def op_chain_meet(M: AutomaticAlgebra) -> PartialOperation:
    """Total meet for the constant-letter setting.

    Requires: total, every letter constant, and the letter-value map a
    bijection onto the states.  States and their letters are ranked by
    state index; the meet of two states (or two letters) is the one with
    the larger index, mixed pairs meet at 0.
    """
    if not M.is_total():
        raise PreconditionViolated("chain meet needs a total algebra")
    values = _constant_letter_values(M)
    if values is None:
        raise PreconditionViolated("chain meet needs constant letters")
    if sorted(values) != list(range(M.n_states)):
        raise PreconditionViolated("chain meet needs letter values to enumerate Q")
    letter_rank = {M.letter(j): values[j] for j in range(M.n_letters)}
    state_rank = {M.state(i): i for i in range(M.n_states)}
    table = {}
    for x in M.elements():
        for y in M.elements():
            if x in state_rank and y in state_rank:
                table[(x, y)] = x if state_rank[x] >= state_rank[y] else y
            elif x in letter_rank and y in letter_rank:
                table[(x, y)] = x if letter_rank[x] >= letter_rank[y] else y
            else:
                table[(x, y)] = ZERO
    return PartialOperation("chain_meet", 2, table)


def op_h(M: AutomaticAlgebra, state_index: int = 0) -> PartialOperation:
    """Ternary partial op from the constant-letter dualizability argument.

    Domain excludes the distinguished state's letter in the first slot;
    the value is the join of y, z over {0, q} when x = q, else 0.
    """
    if not M.is_total():
        raise PreconditionViolated("h needs a total algebra")
    values = _constant_letter_values(M)
    if values is None:
        raise PreconditionViolated("h needs constant letters")
    q1 = M.state(state_index)
    with_value = [j for j in range(M.n_letters) if values[j] == state_index]
    if len(with_value) != 1:
        raise PreconditionViolated("h needs exactly one letter with the chosen value")
    a1 = M.letter(with_value[0])
    table = {}
    for x in M.elements():
        if x == a1:
            continue
        for y in M.elements():
            for z in M.elements():
                if x == q1 and y in (ZERO, q1) and z in (ZERO, q1):
                    table[(x, y, z)] = q1 if (y == q1 or z == q1) else ZERO
                else:
                    table[(x, y, z)] = ZERO
    return PartialOperation("h", 3, table)


def op_lambda(M: AutomaticAlgebra, g: int) -> PartialOperation:
    """Unary total translation by g on g's component, identity elsewhere."""
    from .structure import component_of, component_group
    comp = component_of(M, M.state_index(g))
    data = component_group(M, comp)
    table = {(x,): x for x in M.elements()}
    for s in comp:
        table[(M.state(s),)] = M.state(data.op_states(M.state_index(g), s))
    return PartialOperation("lambda_g", 1, table)


def op_diamond(M: AutomaticAlgebra) -> PartialOperation:
    """Binary partial op separating same-coset pairs from cross-coset ones."""
    from .structure import components, component_group
    table = {(ZERO, ZERO): ZERO}
    for a in M.letters():
        for b in M.letters():
            table[(a, b)] = a
    for comp in components(M):
        data = component_group(M, comp)
        for u in comp:
            for v in comp:
                diff = data.op_states(data.inv_state(u), v)
                in_H = data.group_index(diff) in data.subgroup_H
                table[(M.state(u), M.state(v))] = ZERO if not in_H else M.state(u)
    return PartialOperation("diamond", 2, table)


def op_pbar(M: AutomaticAlgebra, component_index: int = 0) -> PartialOperation:
    """Mal'cev operation xy⁻¹z on one component, extended to letter triples.

    Needs the letter images on the component to be closed under the Mal'cev
    operation (the letter-affine condition there).
    """
    from .structure import components, component_group
    comp = components(M)[component_index]
    data = component_group(M, comp)
    images = sorted(set(data.letter_images.values()))
    table = {(ZERO, ZERO, ZERO): ZERO}
    for x in comp:
        for y in comp:
            for z in comp:
                val = data.op_states(x, data.op_states(data.inv_state(y), z))
                table[(M.state(x), M.state(y), M.state(z))] = M.state(val)
    image_of = {a: data.letter_images[M.letter_index(a)] for a in M.letters()}
    for a in M.letters():
        for b in M.letters():
            for c in M.letters():
                gi = data.group.op(image_of[a],
                                   data.group.op(data.group.inv(image_of[b]),
                                                 image_of[c]))
                if gi not in images:
                    raise PreconditionViolated(
                        "letter images are not Mal'cev closed on this component")
                table[(a, b, c)] = _least_letter_with_image(M, data, gi)
    return PartialOperation("pbar", 3, table)


def _least_letter_with_image(M: AutomaticAlgebra, data, group_index: int) -> int:
    for j in range(M.n_letters):
        if data.letter_images.get(j) == group_index:
            return M.letter(j)
    raise PreconditionViolated("no letter realizes the required image")


def op_psi(M: AutomaticAlgebra, endo: dict, component_index: int = 0) -> PartialOperation:
    """Unary partial op extending an endomorphism of H that fixes u.

    `endo` maps group indices of H to group indices of H; it must fix
    u = a^{|G/H|} where a is the image of the least letter.  The extension
    sends a^t·h to a^t·endo(h) on the component and acts on letters through
    their images; it is defined on C ∪ Σ ∪ {0}.
    """
    from .structure import components, component_group
    comp = components(M)[component_index]
    data = component_group(M, comp)
    G, H = data.group, data.subgroup_H
    for h in H:
        if endo.get(h) not in H:
            raise PreconditionViolated("endo must map H into H")
    for h1 in H:
        for h2 in H:
            if endo[G.op(h1, h2)] != G.op(endo[h1], endo[h2]):
                raise PreconditionViolated("endo is not a homomorphism on H")
    a_i = data.letter_images[min(data.letter_images)]
    n_i = G.n // len(H)
    u_i = G.power(a_i, n_i)
    if endo[u_i] != u_i:
        raise PreconditionViolated("endo must fix u = a^{|G/H|}")

    def xi(g: int) -> int:
        for t in range(n_i):
            h = G.op(G.inv(G.power(a_i, t)), g)
            if h in H:
                return G.op(G.power(a_i, t), endo[h])
        raise PreconditionViolated("G/H is not generated by the chosen letter image")

    images = set(data.letter_images.values())
    table = {(ZERO,): ZERO}
    for s in comp:
        table[(M.state(s),)] = M.state(data.state_of_group_index(xi(data.group_index(s))))
    for a in M.letters():
        gi = xi(data.letter_images[M.letter_index(a)])
        if gi not in images:
            raise PreconditionViolated(
                "extension leaves the letter images; component is not letter-affine")
        table[(a,)] = _least_letter_with_image(M, data, gi)
    return PartialOperation("psi", 1, table)


def make_compatible_op(M: AutomaticAlgebra, name: str, params=None) -> PartialOperation:
    """Dispatcher over the compatible-operation library.

    Names: g_uv(u, v), join, quasi_meet, chain_meet, h(state_index),
    lambda_g(g), diamond, pbar(component_index), psi(endo, component_index).
    Parameters are passed as a tuple/dict in `params`.
    """
    params = params or ()
    if name == "g_uv":
        return op_g_uv(M, *params)
    if name == "join":
        return op_join(M)
    if name == "quasi_meet":
        return op_quasi_meet(M)
    if name == "chain_meet":
        return op_chain_meet(M)
    if name == "h":
        return op_h(M, *params)
    if name == "lambda_g":
        return op_lambda(M, *params)
    if name == "diamond":
        return op_diamond(M)
    if name == "pbar":
        return op_pbar(M, *params)
    if name == "psi":
        return op_psi(M, *params)
    raise UnknownName(f"unknown compatible operation {name!r}")
