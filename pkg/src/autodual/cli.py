"""Command-line interface.

Subcommands: classify, analyze, normalize, catalog, chain, check-eq, embed,
witness, verify-cert.  Exit codes: 0 success, 1 usage (also: a query that
answers "no"), 2 parse error, 3 precondition violated, 4 internal-invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import witness as witness_mod
from .algebras import AutomaticAlgebra, catalog
from .classify import classify, gen_chain, normalize_algebra, verify_certificate
from .errors import InputParseError, ToolError
from .powers import Groupoid, find_embedding
from .structure import (components, letter_affine_analysis, letter_sets,
                        permutation_profile, whiskery_check)
from .terms import (check_identity, check_quasi_identity, parse_equation,
                    parse_quasi_identity)


class UsageError(ToolError):
    exit_code = 1


def parse_algebra_file(text: str) -> AutomaticAlgebra:
    """Parse the whitespace/line algebra format; `#` starts a comment."""
    states = letters = None
    trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head, rest = tokens[0], tokens[1:]
        if head == "states":
            if states is not None:
                raise InputParseError("duplicate states line", line=lineno)
            if trans:
                raise InputParseError("states must precede trans lines", line=lineno)
            states = rest
        elif head == "letters":
            if letters is not None:
                raise InputParseError("duplicate letters line", line=lineno)
            if trans:
                raise InputParseError("letters must precede trans lines", line=lineno)
            letters = rest
        elif head == "trans":
            if states is None or letters is None:
                raise InputParseError("trans before states/letters", line=lineno)
            if len(rest) != 3:
                raise InputParseError("trans needs: state letter state", line=lineno)
            if rest[0] not in states or rest[2] not in states:
                raise InputParseError(f"unknown state in {rest}", line=lineno)
            if rest[1] not in letters:
                raise InputParseError(f"unknown letter in {rest}", line=lineno)
            trans.append((lineno, tuple(rest)))
        else:
            raise InputParseError(f"unknown directive {head!r}", line=lineno)
    if states is None or letters is None:
        raise InputParseError("missing states or letters line")
    seen = {}
    for lineno, (q, a, r) in trans:
        if (q, a) in seen and seen[(q, a)] != r:
            raise InputParseError(f"conflicting transitions for ({q}, {a})",
                                  line=lineno)
        seen[(q, a)] = r
    return AutomaticAlgebra.build(states, letters, [t for _, t in trans])


def _load(path: str) -> AutomaticAlgebra:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_algebra_file(fh.read())


def _reported_note(M: AutomaticAlgebra) -> str:
    # Non-normative annotation: published analysis settles some catalog
    # algebras that the rule engine honestly leaves open.
    if M == catalog("L"):
        return ("note (reported, not derived): the literature shows this "
                "algebra non-dualizable via a bespoke power construction; "
                "see `autodual witness ex_all4_L --size 6`.")
    return ""


def _algebra_by_token(token: str) -> AutomaticAlgebra:
    match = re.fullmatch(r"([A-Za-z_]+?)(\d+)", token)
    if token in ("B", "L", "L3star", "R"):
        return catalog(token)
    if match:
        return catalog(match.group(1), int(match.group(2)))
    raise UsageError(f"cannot resolve algebra token {token!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args) -> int:
    M = _load(args.file)
    verdict = classify(M)
    if args.json:
        print(json.dumps(verdict.to_json()))
        return 0
    print(f"verdict: {verdict.outcome}")
    print(f"rule: {verdict.rule}")
    if verdict.certificate is not None:
        print("certificate: " + json.dumps(verdict.certificate))
    print("trace:")
    for entry in verdict.trace:
        mark = "*" if entry["fired"] else " "
        detail = f"  ({entry['detail']})" if entry["detail"] else ""
        print(f"  {mark} {entry['rule']}{detail}")
    if verdict.outcome == "unknown":
        note = _reported_note(M)
        if note:
            print(note)
    return 0


def cmd_analyze(args) -> int:
    M = _load(args.file)
    print("== COMPONENTS ==")
    for comp in components(M):
        print("  {" + " ".join(M.state_names[i] for i in comp) + "}")
    print("== LETTER SETS ==")
    for j, ls in enumerate(letter_sets(M)):
        def fmt(ss):
            return "{" + " ".join(M.state_names[i] for i in sorted(ss)) + "}"
        print(f"  {M.letter_names[j]}: dom {fmt(ls.dom)} ran {fmt(ls.ran)} "
              f"ks {fmt(ls.ks)}")
    print("== WHISKERY ==")
    wf = whiskery_check(M)
    if wf is None:
        print("  every letter acts as whiskery cycles")
    else:
        print(f"  FAILS: letter {M.letter_names[wf.letter]} at state "
              f"{M.state_names[wf.state]} (F_{wf.forbidden_m} embeds)")
    print("== PERMUTATION PROFILE ==")
    prof = permutation_profile(M)
    print(f"  permutational: {prof.permutational}")
    print(f"  commuting: {prof.commuting}")
    for ci, row in enumerate(prof.component_status):
        print(f"  component {ci}: "
              + " ".join(f"{M.letter_names[j]}={st}" for j, st in enumerate(row)))
    print("== LETTER-AFFINE ==")
    rep = letter_affine_analysis(M)
    print(f"  letter-affine: {rep.affine}")
    if rep.failure is not None:
        comp, kind, detail = rep.failure
        names = " ".join(M.state_names[i] for i in comp)
        print(f"  failure: {kind} on component {{{names}}}: {detail}")
    for cr in rep.components:
        names = " ".join(M.state_names[i] for i in cr.states)
        dropped = " ".join(M.letter_names[j] for j in cr.dropped) or "-"
        print(f"  component {{{names}}}: letters "
              + " ".join(M.letter_names[j] for j in cr.sigma_c)
              + f" dropped {dropped}")
    return 0


def cmd_normalize(args) -> int:
    M = _load(args.file)
    N, steps = normalize_algebra(M)
    for step in steps:
        print(f"# {step['kind']}: removed {step['removed']}")
    sys.stdout.write(N.emit())
    return 0


def cmd_catalog(args) -> int:
    M = catalog(args.name, *args.params)
    if args.emit:
        sys.stdout.write(M.emit())
    else:
        print(f"{args.name}: {M.n_states} states, {M.n_letters} letters, "
              f"{len(M.delta)} transitions")
        sys.stdout.write(M.emit())
    return 0


def cmd_chain(args) -> int:
    for n in range(1, args.n + 1):
        M = gen_chain(n)
        verdict = classify(M)
        print(f"M_{n}: |Q| = {M.n_states}, |Sigma| = {M.n_letters}: "
              f"{verdict.outcome} ({verdict.rule})")
    return 0


def cmd_check_eq(args) -> int:
    M = _load(args.file)
    if "=>" in args.expr:
        q = parse_quasi_identity(args.expr)
        cex = check_quasi_identity(M, q)
    else:
        lhs, rhs = parse_equation(args.expr)
        cex = check_identity(M, lhs, rhs)
    if cex is None:
        print("holds")
    else:
        parts = ", ".join(f"{v}={M.name(x)}" for v, x in sorted(cex.items()))
        print(f"counterexample: {parts}")
    return 0


def cmd_embed(args) -> int:
    A = _load(args.file1)
    B = _load(args.file2)
    G = Groupoid.from_algebra(A)
    hom = find_embedding(G, B, max_elements=args.max_elements)
    if hom is None:
        print("no embedding")
        return 1
    print("embedding: " + " ".join(f"{G.labels[i]}->{B.name(x)}"
                                   for i, x in enumerate(hom)))
    return 0


def cmd_witness(args) -> int:
    params = ()
    if args.name == "thm_wc":
        params = (int(args.params[0]),) if args.params else (0,)
    elif args.name == "thm_pcomm_case1":
        params = (_algebra_by_token(args.params[0]),) if args.params else ()
    elif args.name == "thm_nondcomm":
        if args.params:
            params = (_algebra_by_token(args.params[0]),
                      args.params[1] if len(args.params) > 1 else "b",
                      args.params[2] if len(args.params) > 2 else "c")
    trunc = witness_mod.build_truncation(args.name, params, args.size,
                                         max_elements=args.build_cap)
    report = witness_mod.verify_construction(trunc)
    print(witness_mod.format_report(report))
    if len(trunc.elements) <= args.max_elements:
        kr = witness_mod.kernel_block_analysis(trunc, nu=args.nu,
                                               max_elements=args.max_elements)
        counted = kr.hom_count if kr.hom_count is not None else "not enumerated"
        print(f"kernel analysis [{kr.mode}]: nu = {kr.nu}, homs = {counted}, "
              f"block patterns = {kr.block_multisets}, "
              f"violations = {len(kr.violations)}")
    else:
        print(f"kernel analysis: skipped (|A| = {len(trunc.elements)} exceeds "
              f"--max-elements {args.max_elements})")
    return 0 if not report["g_in_A"] else 4


def cmd_verify_cert(args) -> int:
    M = _load(args.file)
    with open(args.cert_file, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputParseError(f"certificate file is not JSON: {exc}")
    ok, reason = verify_certificate(M, data)
    if ok:
        print("certificate VALID")
        return 0
    print(f"certificate INVALID: {reason}")
    return 1


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=int, default=0,
                        help="seed for randomized suites (reserved)")
    shared.add_argument("--max-elements", type=int, default=64, dest="max_elements",
                        help="hom-enumeration cap")
    parser = _Parser(prog="autodual",
                     description="Dualizability toolkit for finite automatic algebras")
    commands = parser.add_subparsers(dest="command", required=True)

    def subcommand(name, **kw):
        return commands.add_parser(name, parents=[shared], **kw)

    p = subcommand("classify", help="classify an algebra file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = subcommand("analyze", help="structural report")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = subcommand("normalize", help="apply quasi-variety-preserving reductions")
    p.add_argument("file")
    p.set_defaults(func=cmd_normalize)

    p = subcommand("catalog", help="emit a named algebra")
    p.add_argument("name")
    p.add_argument("params", nargs="*", type=int)
    p.add_argument("--emit", action="store_true")
    p.set_defaults(func=cmd_catalog)

    p = subcommand("chain", help="classify the alternating chain M_1..M_N")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_chain)

    p = subcommand("check-eq", help="check an identity or quasi-identity")
    p.add_argument("file")
    p.add_argument("expr")
    p.set_defaults(func=cmd_check_eq)

    p = subcommand("embed", help="search an embedding FILE1 -> FILE2")
    p.add_argument("file1")
    p.add_argument("file2")
    p.set_defaults(func=cmd_embed)

    p = subcommand("witness", help="build and verify a truncated construction")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--nu", type=int, default=None)
    p.add_argument("--build-cap", type=int, default=witness_mod.BUILD_CAP_DEFAULT)
    p.set_defaults(func=cmd_witness)

    p = subcommand("verify-cert", help="re-check a verdict JSON against an algebra")
    p.add_argument("file")
    p.add_argument("cert_file")
    p.set_defaults(func=cmd_verify_cert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except InputParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ToolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
