"""Groupoid terms, identities, quasi-identities, and order sensitivity.

Grammar (used by the CLI as well):

    term  := atom | term '*' atom | term atom
    atom  := IDENT | '(' term ')'

Juxtaposition is only available when every variable is a single character;
a multi-character identifier run like ``qabab`` is exploded into single-
character variables.  Identities are written ``lhs = rhs`` and
quasi-identities ``eq ('&' eq)* '=>' eq``.

Every term normalizes under the bracket-from-the-left convention: a product
whose right factor is itself a product is constantly 0 in every automatic
algebra, and everything else flattens to a left chain u·v1·v2·…·vn.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Optional, Union

from .algebras import ZERO, AutomaticAlgebra
from .errors import TermSyntaxError


# ---------------------------------------------------------------------------
# terms and normalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Prod:
    left: "GroupoidTerm"
    right: "GroupoidTerm"


GroupoidTerm = Union[Var, Prod]


@dataclass(frozen=True)
class ZeroEquivalent:
    def variables(self):
        return ()

    def __str__(self):
        return "<0>"


@dataclass(frozen=True)
class LeftChain:
    head: str
    tail: tuple

    def variables(self):
        return (self.head,) + self.tail

    def __str__(self):
        return "*".join((self.head,) + self.tail)


NormalTerm = Union[ZeroEquivalent, LeftChain]


def normalize(term: GroupoidTerm) -> NormalTerm:
    """Flatten to a left chain, or detect constant-zero shape."""
    if isinstance(term, Var):
        return LeftChain(term.name, ())
    if not isinstance(term.right, Var):
        return ZeroEquivalent()
    left = normalize(term.left)
    if isinstance(left, ZeroEquivalent):
        return ZeroEquivalent()
    return LeftChain(left.head, left.tail + (term.right.name,))


def _tokenize(src: str):
    tokens = []
    i = 0
    while i < len(src):
        ch = src[i]
        if ch.isspace():
            i += 1
        elif ch in "()*":
            tokens.append((ch, i))
            i += 1
        elif ch.isalnum() or ch == "_":
            j = i
            while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("ident", i, src[i:j]))
            i = j
        else:
            raise TermSyntaxError(f"unexpected character {ch!r}", pos=i)
    return tokens


class _Parser:
    def __init__(self, tokens, variables=None):
        # An identifier run is one variable if declared, else it explodes
        # into single-character variables (juxtaposition).
        self.tokens = tokens
        self.pos = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise TermSyntaxError("unexpected end of input", pos=None)
        self.pos += 1
        return tok

    def atoms_from_ident(self, tok):
        text = tok[2]
        if self.variables is not None and text in self.variables:
            return [Var(text)]
        if len(text) == 1:
            return [Var(text)]
        if self.variables is not None and not all(c in self.variables for c in text):
            raise TermSyntaxError(f"unknown variable {text!r}", pos=tok[1])
        return [Var(c) for c in text]

    def parse_atom(self):
        tok = self.next()
        if tok[0] == "(":
            inner = self.parse_term()
            closing = self.next()
            if closing[0] != ")":
                raise TermSyntaxError("expected ')'", pos=closing[1])
            return [inner]
        if tok[0] == "ident":
            return self.atoms_from_ident(tok)
        raise TermSyntaxError(f"expected a variable or '('", pos=tok[1])

    def parse_term(self):
        parts = self.parse_atom()
        while True:
            tok = self.peek()
            if tok is None or tok[0] == ")":
                break
            if tok[0] == "*":
                self.next()
                parts.extend(self.parse_atom())
            elif tok[0] in ("(", "ident"):
                parts.extend(self.parse_atom())
            else:
                break
        term = parts[0]
        for part in parts[1:]:
            term = Prod(term, part)
        return term


def parse_term(src: str, variables=None) -> GroupoidTerm:
    tokens = _tokenize(src)
    parser = _Parser(tokens, variables)
    term = parser.parse_term()
    if parser.peek() is not None:
        raise TermSyntaxError("trailing input", pos=parser.peek()[1])
    return term


def parse_and_normalize(src: str, variables=None) -> NormalTerm:
    return normalize(parse_term(src, variables))


@dataclass(frozen=True)
class QuasiIdentity:
    premises: tuple  # of (NormalTerm, NormalTerm)
    conclusion: tuple

    def variables(self):
        seen = []
        for lhs, rhs in self.premises + (self.conclusion,):
            for v in lhs.variables() + rhs.variables():
                if v not in seen:
                    seen.append(v)
        return tuple(seen)


def parse_equation(src: str, variables=None):
    """`lhs = rhs` -> (NormalTerm, NormalTerm)."""
    if "=" not in src:
        raise TermSyntaxError("expected '=' in equation", pos=None)
    lhs, rhs = src.split("=", 1)
    return (parse_and_normalize(lhs, variables), parse_and_normalize(rhs, variables))


def parse_quasi_identity(src: str, variables=None) -> QuasiIdentity:
    """`eq ('&' eq)* '=>' eq`."""
    if "=>" not in src:
        raise TermSyntaxError("expected '=>' in quasi-identity", pos=None)
    prem_src, concl_src = src.split("=>", 1)
    premises = tuple(parse_equation(p, variables) for p in prem_src.split("&"))
    return QuasiIdentity(premises, parse_equation(concl_src, variables))


# ---------------------------------------------------------------------------
# evaluation and model checking
# ---------------------------------------------------------------------------

def eval_term(M: AutomaticAlgebra, term: GroupoidTerm, assignment: dict) -> int:
    if isinstance(term, Var):
        return assignment[term.name]
    return M.mul(eval_term(M, term.left, assignment),
                 eval_term(M, term.right, assignment))


def eval_normal(M: AutomaticAlgebra, term: NormalTerm, assignment: dict) -> int:
    if isinstance(term, ZeroEquivalent):
        return ZERO
    x = assignment[term.head]
    for v in term.tail:
        x = M.mul(x, assignment[v])
    return x


def _assignments(M: AutomaticAlgebra, variables):
    """Lexicographic over the canonical element order, last variable fastest."""
    elems = M.elements()
    for values in iproduct(elems, repeat=len(variables)):
        yield dict(zip(variables, values))


def check_identity(M: AutomaticAlgebra, lhs: NormalTerm,
                   rhs: NormalTerm) -> Optional[dict]:
    """None if the identity holds, else the first counterexample assignment."""
    variables = sorted(set(lhs.variables()) | set(rhs.variables()))
    for assignment in _assignments(M, variables):
        if eval_normal(M, lhs, assignment) != eval_normal(M, rhs, assignment):
            return assignment
    return None


def check_quasi_identity(M: AutomaticAlgebra, q: QuasiIdentity) -> Optional[dict]:
    """None if the quasi-identity holds, else the first counterexample."""
    variables = sorted(q.variables())
    for assignment in _assignments(M, variables):
        if all(eval_normal(M, l, assignment) == eval_normal(M, r, assignment)
               for l, r in q.premises):
            l, r = q.conclusion
            if eval_normal(M, l, assignment) != eval_normal(M, r, assignment):
                return assignment
    return None


WHISKERY_QUASI = QuasiIdentity(
    ((LeftChain("v", ("x", "x")), LeftChain("w", ("x", "x"))),),
    (LeftChain("v", ("x",)), LeftChain("w", ("x",))),
)


# ---------------------------------------------------------------------------
# order sensitivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderWitness:
    state: int           # state index
    w1: tuple            # letter-index word with q·w1 = 0
    w2: tuple            # rearrangement with q·w2 != 0


def _suffix_to_mixed(M: AutomaticAlgebra, xa: int, xb: int) -> Optional[tuple]:
    """Shortest word v with exactly one of xa·v, xb·v equal to 0, or None.

    BFS on the product automaton over (Q ∪ {0})².  Letters are explored in
    index order, so the returned word is the lexicographically least of
    minimal length.
    """
    start = (xa, xb)
    if (xa == ZERO) != (xb == ZERO):
        return ()
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (u, v), word = queue.popleft()
        for j in range(M.n_letters):
            nu, nv = M.mul(u, M.letter(j)), M.mul(v, M.letter(j))
            if (nu == ZERO) != (nv == ZERO):
                return word + (j,)
            pair = (nu, nv)
            if pair not in seen and pair != (ZERO, ZERO):
                seen.add(pair)
                queue.append((pair, word + (j,)))
    return None


def order_sensitivity(M: AutomaticAlgebra) -> Optional[OrderWitness]:
    """Exact kill-order sensitivity decision.

    Some rearrangement of a word flips a product between zero and nonzero
    iff a single adjacent transposition does, somewhere along the word.  So
    it suffices to search for a state s and letters a, b such that some
    common suffix separates s·ab from s·ba; the suffix condition is a
    product-automaton reachability question.  Returns None when every
    rearrangement of every word kills consistently.
    """
    for si in range(M.n_states):
        s = M.state(si)
        for a in range(M.n_letters):
            for b in range(a + 1, M.n_letters):
                xa = M.word(s, (a, b))
                xb = M.word(s, (b, a))
                if xa == xb:
                    continue
                v = _suffix_to_mixed(M, xa, xb)
                if v is not None:
                    if M.word(s, (a, b) + v) == ZERO:
                        return OrderWitness(si, (a, b) + v, (b, a) + v)
                    return OrderWitness(si, (b, a) + v, (a, b) + v)
    return None


def order_sensitivity_brute(M: AutomaticAlgebra, max_len: int = 6) -> bool:
    """Oracle: search all words up to max_len for a kill-order flip."""
    for si in range(M.n_states):
        s = M.state(si)
        words = [()]
        for _ in range(max_len):
            words = [w + (j,) for w in words for j in range(M.n_letters)]
            by_multiset = {}
            for w in words:
                by_multiset.setdefault(tuple(sorted(w)), []).append(w)
            for group in by_multiset.values():
                results = {M.word(s, w) == ZERO for w in group}
                if len(results) == 2:
                    return True
    return False
