"""Command line front end: load block files, run one verb, print a report.

Exit codes: 0 success, 1 verification failure or undecided word, 2 usage
or load error.  Reports are deterministic; ``--porcelain`` switches to
one machine-readable record per line.  The environment variable
``EPIC_MAX_STATES`` caps constructed automaton sizes (default 10^6).
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from typing import Optional

from .automata import Letter, format_word, parse_word
from .constructions import (
    SyncTripleAutomaton,
    autostackable_projection,
    change_generators,
    cross_section_to_demo,
    extension,
    fi_overgroup,
    fi_subgroup,
    graph_product,
)
from .demonstrations import Demonstration, builtin_demo
from .errors import EpicError, InputContradictionError, LoadError
from .graphproduct import GraphProductOracle, VertexGraph
from .wordproblem import (
    BUDGET_EXCEEDED,
    Frontier,
    decide_word,
    demonstration_enumerator,
    normal_closure_enumerator,
    replay,
)
from .workspace import Workspace, load, render, render_automaton


class UsageError(Exception):
    """Bad names or flag values; maps to exit code 2."""


_BUILTIN_ALIAS = re.compile(r"^(?:z|free(\d+)|zk(\d+))$", re.IGNORECASE)


def _resolve_demo(ws: Workspace, name: str):
    """A workspace demonstration, or a builtin for names like Z, FREE2, ZK3.

    Returns (demo, group_name, automaton_name); the names are None for
    builtins.
    """
    if name in ws.demonstrations:
        group_name, automaton_name = ws.demo_refs[name]
        return ws.demonstrations[name], group_name, automaton_name
    m = _BUILTIN_ALIAS.match(name.strip())
    if m:
        if m.group(1):
            return builtin_demo(f"free({m.group(1)})"), None, None
        if m.group(2):
            return builtin_demo(f"zk({m.group(2)})"), None, None
        return builtin_demo("z"), None, None
    try:
        return builtin_demo(name), None, None
    except ValueError:
        raise UsageError(f"unknown demonstration {name!r}") from None


def _resolve_group(ws: Workspace, name: str):
    if name not in ws.groups:
        raise UsageError(f"unknown group {name!r}")
    return ws.groups[name]


def _resolve_automaton(ws: Workspace, name: str):
    if name not in ws.automata:
        raise UsageError(f"unknown automaton {name!r}")
    return ws.automata[name]


def _resolve_table(ws: Workspace, name: str):
    if name not in ws.cosettables:
        raise UsageError(f"unknown cosettable {name!r}")
    return ws.cosettables[name]


# -- key predicates ------------------------------------------------------


def parse_key_predicate(spec: str):
    """Small predicate language over element keys.

    Forms: ``perm-even``; ``matrix-zero:R,C[;R,C...]``;
    ``matrix-entry:R,C=V``; ``zk-divisible:I,M``.  Row, column and
    coordinate indices are 0-based against the key's printed data.
    """
    kind, _, rest = spec.partition(":")
    if kind == "perm-even":

        def even(key):
            images = [int(p) for p in key.data.decode().split(",")]
            swaps = 0
            seen = set()
            for start in range(len(images)):
                if start in seen:
                    continue
                length = 0
                p = start
                while p not in seen:
                    seen.add(p)
                    p = images[p] - 1
                    length += 1
                swaps += length - 1
            return swaps % 2 == 0

        return even
    if kind == "matrix-zero":
        positions = []
        for part in rest.split(";"):
            r, c = part.split(",")
            positions.append((int(r), int(c)))

        def zero(key):
            rows = [row.split(",") for row in key.data.decode().split(";")]
            return all(rows[r][c] == "0" for r, c in positions)

        return zero
    if kind == "matrix-entry":
        coords, _, value = rest.partition("=")
        r, c = (int(p) for p in coords.split(","))

        def entry(key):
            rows = [row.split(",") for row in key.data.decode().split(";")]
            return rows[r][c] == value

        return entry
    if kind == "zk-divisible":
        coord, modulus = (int(p) for p in rest.split(","))

        def divisible(key):
            return int(key.data.decode().split(",")[coord]) % modulus == 0

        return divisible
    raise UsageError(f"unknown key predicate {spec!r}")


# -- bundles -------------------------------------------------------------


def _named_pairs(values, what):
    """Parse repeated NAME=TOKENS flags into (Letter, Word) pairs."""
    out = []
    for item in values or ():
        name, eq, rhs = item.partition("=")
        if not eq:
            raise UsageError(f"{what} takes NAME=WORD, got {item!r}")
        out.append((Letter(name.strip()), parse_word(rhs)))
    return out


def _bundle_group_name(bundle: Workspace, ws: Workspace, oracle, fallback: str) -> str:
    """Register an oracle in the bundle, preferring its workspace name."""
    for name, g in ws.groups.items():
        if g == oracle:
            fallback = name
            break
    if fallback in bundle.groups:
        if bundle.groups[fallback] == oracle:
            return fallback
        raise UsageError(f"name {fallback!r} would collide inside the bundle")
    bundle.groups[fallback] = oracle
    if isinstance(oracle, GraphProductOracle):
        refs = ws.graph_refs.get(fallback)
        if refs is None:
            refs = {}
            for v in oracle.graph.vertices:
                refs[v] = _bundle_group_name(
                    bundle, ws, oracle.vertex_oracles[v], f"{fallback}_{v}")
        else:
            for v, used in refs.items():
                _bundle_group_name(bundle, ws, ws.groups[used], used)
        bundle.graph_refs[fallback] = refs
    return fallback


def _write_demo_bundle(ws: Workspace, demo: Demonstration, name: str, path: str):
    bundle = Workspace()
    group_name = _bundle_group_name(bundle, ws, demo.oracle, f"{name}_group")
    bundle.automata[f"{name}_lang"] = demo.language
    bundle.demonstrations[name] = demo
    bundle.demo_refs[name] = (group_name, f"{name}_lang")
    text = render(bundle)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    # a bundle that does not reload is a bug, not a report line
    load([path])


def _write_automaton_bundle(nfa, name: str, path: str):
    text = render_automaton(name, nfa)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    load([path])


# -- verb handlers -------------------------------------------------------


def cmd_verify(ws: Workspace, args) -> int:
    demo, _, _ = _resolve_demo(ws, args.demo)
    search_len = args.search_len if args.search_len is not None else args.max_len
    violations = demo.verify_no_identity(args.max_len)
    report = demo.verify_coverage(args.ball, search_len)
    missing = report.sorted_missing()
    if args.porcelain:
        for w in violations:
            print(f"violation {format_word(w)}")
        for key in missing:
            print(f"missing {key.render()}")
        print(f"result {'fail' if violations or (args.strict and missing) else 'pass'}")
    else:
        for w in violations:
            print(f"identity word accepted: {format_word(w)}")
        for key in missing:
            print(f"uncovered element: {key.render()}")
        print(f"identity violations: {len(violations)}, missing: {len(missing)}")
    if violations or (args.strict and missing):
        return 1
    return 0


def cmd_enumerate(ws: Workspace, args) -> int:
    if (args.automaton is None) == (args.demo is None):
        raise UsageError("enumerate needs exactly one of --automaton or --demo")
    if args.automaton is not None:
        nfa = _resolve_automaton(ws, args.automaton)
    else:
        nfa = _resolve_demo(ws, args.demo)[0].language
    for w in nfa.enumerate_words(args.max_len):
        print(format_word(w))
    return 0


def cmd_ball(ws: Workspace, args) -> int:
    if (args.group is None) == (args.demo is None):
        raise UsageError("ball needs exactly one of --group or --demo")
    if args.group is not None:
        oracle = _resolve_group(ws, args.group)
    else:
        oracle = _resolve_demo(ws, args.demo)[0].oracle
    for key, witness in oracle.ball(args.radius).items():
        print(f"{key.render()} {format_word(witness)}")
    return 0


def cmd_wp_decide(ws: Workspace, args) -> int:
    if args.presentation not in ws.presentations:
        raise UsageError(f"unknown presentation {args.presentation!r}")
    presentation = ws.presentations[args.presentation]
    demo, _, _ = _resolve_demo(ws, args.demo)
    allowed = {x.name for x in presentation.alphabet}
    for letter, image in demo.eval_map.items():
        for y in image:
            if y.name not in allowed:
                raise UsageError(
                    f"demonstration letter {letter.name!r} evaluates through "
                    f"{y.name!r}, which the presentation does not generate")
    word = parse_word(args.word)
    for x in word:
        if x.name not in allowed:
            raise UsageError(f"word letter {x.name!r} is outside the presentation alphabet")
    frontier = None
    if args.resume and os.path.exists(args.resume):
        with open(args.resume, "r", encoding="utf-8") as fh:
            frontier = Frontier.from_json(fh.read())
    language = demonstration_enumerator(demo)
    closure = normal_closure_enumerator(presentation)
    verdict = decide_word(word, language, closure, args.budget, frontier)
    if verdict.kind == BUDGET_EXCEEDED:
        if args.resume:
            with open(args.resume, "w", encoding="utf-8") as fh:
                fh.write(verdict.frontier.to_json())
        if args.porcelain:
            print(f"verdict budget_exceeded comparisons={verdict.comparisons} "
                  f"stalled={'yes' if verdict.stalled else 'no'}")
        else:
            print(f"verdict: budget exceeded after {verdict.comparisons} comparisons"
                  + (" (both streams exhausted)" if verdict.stalled else ""))
            if args.resume:
                print(f"frontier written to {args.resume}")
        return 1
    replayed = replay(word, demonstration_enumerator(demo),
                      normal_closure_enumerator(presentation), verdict.certificate)
    if args.porcelain:
        fields = " ".join(f"{k}={v}" for k, v in sorted(verdict.certificate.items())
                          if k != "kind")
        print(f"verdict {verdict.kind} comparisons={verdict.comparisons} "
              f"replayed={'yes' if replayed else 'no'} {fields}")
    else:
        print(f"verdict: {verdict.kind}")
        for k, v in sorted(verdict.certificate.items()):
            if k != "kind":
                print(f"  {k}: {v}")
        print(f"comparisons: {verdict.comparisons}")
        print(f"certificate replays: {'yes' if replayed else 'no'}")
    return 0 if replayed else 1


def cmd_change_gens(ws: Workspace, args) -> int:
    demo, _, _ = _resolve_demo(ws, args.demo)
    target = dict(_named_pairs(args.letter, "--letter"))
    phi = dict(_named_pairs(args.image, "--image"))
    out = change_generators(demo, target, phi)
    _write_demo_bundle(ws, out, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_extension(ws: Workspace, args) -> int:
    demo_n, _, _ = _resolve_demo(ws, args.normal)
    demo_q, _, _ = _resolve_demo(ws, args.quotient)
    oracle = _resolve_group(ws, args.group)
    in_normal = parse_key_predicate(args.in_normal)
    out = extension(demo_n, demo_q, oracle, in_normal, check_len=args.check_len)
    _write_demo_bundle(ws, out, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_fi_overgroup(ws: Workspace, args) -> int:
    demo, _, _ = _resolve_demo(ws, args.demo)
    oracle = _resolve_group(ws, args.group)
    transversal = dict(_named_pairs(args.coset_rep, "--coset-rep"))
    in_subgroup = parse_key_predicate(args.in_subgroup) if args.in_subgroup else None
    out = fi_overgroup(demo, oracle, transversal, in_subgroup=in_subgroup)
    _write_demo_bundle(ws, out, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_fi_subgroup(ws: Workspace, args) -> int:
    demo, _, _ = _resolve_demo(ws, args.demo)
    table = _resolve_table(ws, args.table)
    in_subgroup = parse_key_predicate(args.in_subgroup) if args.in_subgroup else None
    out = fi_subgroup(demo, table, in_subgroup=in_subgroup)
    _write_demo_bundle(ws, out, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_graph_product(ws: Workspace, args) -> int:
    vertices = args.vertices.split()
    edges = []
    for item in args.edge or ():
        u, dash, v = item.partition("-")
        if not dash:
            raise UsageError(f"--edge takes U-V, got {item!r}")
        edges.append((u, v))
    local = {}
    for item in args.vertex or ():
        v, eq, demo_name = item.partition("=")
        if not eq:
            raise UsageError(f"--vertex takes VERTEX=DEMO, got {item!r}")
        local[v] = _resolve_demo(ws, demo_name)[0]
    graph = VertexGraph.make(vertices, edges)
    out = graph_product(graph, local)
    _write_demo_bundle(ws, out, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_autostackable_project(ws: Workspace, args) -> int:
    nfa = _resolve_automaton(ws, args.automaton)
    base = parse_word(args.base)
    triple = SyncTripleAutomaton(nfa, base)
    projected = autostackable_projection(triple)
    _write_automaton_bundle(projected, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_cross_section(ws: Workspace, args) -> int:
    nfa = _resolve_automaton(ws, args.automaton)
    oracle = _resolve_group(ws, args.group)
    rep = parse_word(args.rep)
    out = cross_section_to_demo(nfa, oracle, rep)
    _write_demo_bundle(ws, out, args.name, args.out)
    print(f"wrote {args.out}")
    return 0


# -- parser --------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    # accepted after the verb too; SUPPRESS keeps the top-level values alive
    p.add_argument("-f", "--file", dest="files", action="append",
                   default=argparse.SUPPRESS, metavar="PATH",
                   help="workspace file; repeatable")
    p.add_argument("--porcelain", action="store_true", default=argparse.SUPPRESS,
                   help="one machine-readable record per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epicdemo",
        description="Verify and construct demonstrations of non-identity "
                    "elements over block-file workspaces.")
    parser.add_argument("-f", "--file", dest="files", action="append", default=[],
                        metavar="PATH", help="workspace file; repeatable")
    parser.add_argument("--porcelain", action="store_true",
                        help="one machine-readable record per line")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("verify", help="check a demonstration against its group")
    p.add_argument("--demo", required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--ball", type=int, required=True)
    p.add_argument("--search-len", type=int, default=None,
                   help="word length for coverage search (default: --max-len)")
    p.add_argument("--strict", action="store_true",
                   help="missing coverage is a failure, not a bound artifact")
    _add_common(p)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("enumerate", help="list accepted words in length-lex order")
    p.add_argument("--automaton")
    p.add_argument("--demo")
    p.add_argument("--max-len", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("ball", help="list group elements with shortest witnesses")
    p.add_argument("--group")
    p.add_argument("--demo")
    p.add_argument("--radius", type=int, required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_ball)

    wp = sub.add_parser("wp", help="word problem procedures").add_subparsers(
        dest="wp_verb", required=True)
    p = wp.add_parser("decide", help="dovetail a demonstration against relators")
    p.add_argument("--presentation", required=True)
    p.add_argument("--demo", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--resume", metavar="PATH",
                   help="frontier checkpoint file, read if present, "
                        "written when the budget runs out")
    _add_common(p)
    p.set_defaults(handler=cmd_wp_decide)

    build = sub.add_parser("construct", help="closure constructions").add_subparsers(
        dest="construction", required=True)

    p = build.add_parser("change-gens", help="re-express over a new generating set")
    p.add_argument("--demo", required=True)
    p.add_argument("--letter", action="append", metavar="NEW=ORACLEWORD",
                   help="evaluation of a new letter; repeatable")
    p.add_argument("--image", action="append", metavar="OLD=NEWWORD",
                   help="spelling of an old letter in new letters; repeatable")
    p.add_argument("--name", default="derived")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_change_gens)

    p = build.add_parser("extension", help="combine a normal subgroup demo with a quotient demo")
    p.add_argument("--normal", required=True)
    p.add_argument("--quotient", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--in-normal", required=True, metavar="PREDICATE")
    p.add_argument("--check-len", type=int, default=4)
    p.add_argument("--name", default="extended")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_extension)

    p = build.add_parser("fi-overgroup", help="extend a finite index subgroup demo upward")
    p.add_argument("--demo", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--coset-rep", action="append", metavar="LETTER=WORD",
                   help="transversal letter for a nontrivial coset; repeatable")
    p.add_argument("--in-subgroup", metavar="PREDICATE")
    p.add_argument("--name", default="overgroup")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_fi_overgroup)

    p = build.add_parser("fi-subgroup", help="restrict a demo to a finite index subgroup")
    p.add_argument("--demo", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--in-subgroup", metavar="PREDICATE")
    p.add_argument("--name", default="subgroup")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_fi_subgroup)

    p = build.add_parser("graph-product", help="glue vertex demos along a commutation graph")
    p.add_argument("--vertices", required=True, metavar="'U V ...'")
    p.add_argument("--edge", action="append", metavar="U-V")
    p.add_argument("--vertex", action="append", metavar="VERTEX=DEMO", required=True)
    p.add_argument("--name", default="product")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_graph_product)

    p = build.add_parser("autostackable-project",
                         help="project a padded-triple automaton to its first coordinate")
    p.add_argument("--automaton", required=True)
    p.add_argument("--base", required=True, metavar="'A B ...'",
                   help="base alphabet letters, space separated")
    p.add_argument("--name", default="normalforms")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_autostackable_project)

    p = build.add_parser("cross-section", help="turn a cross section into a demonstration")
    p.add_argument("--automaton", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--rep", default="eps",
                   help="identity representative to remove (default: eps)")
    p.add_argument("--name", default="section")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(handler=cmd_cross_section)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = load(args.files) if args.files else Workspace()
        return args.handler(ws, args)
    except (UsageError, LoadError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InputContradictionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (EpicError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
