"""Line-oriented block files naming groups, automata, and friends.

One workspace is the concatenation of its input files: five flat
namespaces (groups, automata, demonstrations, coset tables,
presentations), with references linked after parsing so blocks may appear
in any order.  Rendering is deterministic; automaton states are renamed
s0, s1, ... in search order so structurally equal inputs print the same.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .automata import (
    EPSILON,
    Letter,
    Nfa,
    Word,
    check_alphabet,
    format_word,
    parse_word,
)
from .constructions import CosetTable
from .demonstrations import Demonstration
from .errors import LoadError
from .graphproduct import GraphProductOracle, VertexGraph
from .groups import (
    FreeAbelianOracle,
    FreeGroupOracle,
    GroupOracle,
    IntegerMatrixOracle,
    PermutationOracle,
    cycles_from_perm,
    perm_from_cycles,
)
from .wordproblem import Presentation

BLOCK_KINDS = ("automaton", "group", "demonstration", "cosettable", "presentation")


@dataclass
class Workspace:
    """Named objects parsed from block files, plus the reference names
    needed to render them back out."""

    groups: dict = field(default_factory=dict)
    automata: dict = field(default_factory=dict)
    demonstrations: dict = field(default_factory=dict)
    cosettables: dict = field(default_factory=dict)
    presentations: dict = field(default_factory=dict)
    # render-side bookkeeping: references by name, not by object
    demo_refs: dict = field(default_factory=dict)        # demo -> (group, automaton)
    cosettable_refs: dict = field(default_factory=dict)  # table -> group
    graph_refs: dict = field(default_factory=dict)       # gp group -> {vertex: group}


# -- tokenising ----------------------------------------------------------


def _tokenize(text: str):
    """Yield (lineno, tokens); comment lines and inline '#' tails dropped.

    A line whose first token starts with '#' is a comment.  Within a
    line, a bare '#' token starts a trailing comment; longer tokens such
    as '#pad' or padded triples pass through untouched.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        if "#" in tokens:
            tokens = tokens[: tokens.index("#")]
        if tokens:
            yield (lineno, tokens)


@dataclass
class _Block:
    kind: str
    header: list
    body: list  # (lineno, tokens)
    path: Optional[str]
    line: int

    def fail(self, message, line=None):
        raise LoadError(message, path=self.path, line=self.line if line is None else line)


def _split_blocks(path: Optional[str], text: str) -> list[_Block]:
    blocks: list[_Block] = []
    current: Optional[_Block] = None
    for lineno, tokens in _tokenize(text):
        if current is None:
            if tokens[0] not in BLOCK_KINDS:
                raise LoadError(f"expected a block keyword, got {tokens[0]!r}",
                                path=path, line=lineno)
            if len(tokens) < 2:
                raise LoadError(f"{tokens[0]} block needs a name", path=path, line=lineno)
            current = _Block(tokens[0], tokens[1:], [], path, lineno)
        elif tokens == ["end"]:
            blocks.append(current)
            current = None
        else:
            current.body.append((lineno, tokens))
    if current is not None:
        raise LoadError(f"unterminated {current.kind} block {current.header[0]!r}",
                        path=path, line=current.line)
    return blocks


# -- parsing each block kind --------------------------------------------


def _parse_automaton(block: _Block) -> Nfa:
    alphabet: list[Letter] = []
    states: list[str] = []
    initials: list[str] = []
    accepting: list[str] = []
    transitions = []
    for lineno, tokens in block.body:
        key, rest = tokens[0], tokens[1:]
        if key == "alphabet":
            if "eps" in rest:
                block.fail("'eps' is reserved and cannot be an alphabet letter", lineno)
            alphabet.extend(Letter(n) for n in rest)
        elif key == "states":
            states.extend(rest)
        elif key == "initial":
            initials.extend(rest)
        elif key == "accept":
            accepting.extend(rest)
        elif key == "trans":
            if len(rest) != 3:
                block.fail("trans takes: source label target", lineno)
            src, label, tgt = rest
            transitions.append((lineno, src, None if label == "eps" else Letter(label), tgt))
        else:
            block.fail(f"unknown automaton line {key!r}", lineno)
    known = set(states)
    letters = set(alphabet)
    for lineno, src, label, tgt in transitions:
        for s in (src, tgt):
            if s not in known:
                block.fail(f"transition uses undeclared state {s!r}", lineno)
        if label is not None and label not in letters:
            block.fail(f"transition label {label.name!r} is not in the alphabet", lineno)
    for s in initials + accepting:
        if s not in known:
            block.fail(f"undeclared state {s!r}")
    try:
        return Nfa(tuple(alphabet), frozenset(states),
                   frozenset((src, label, tgt) for _, src, label, tgt in transitions),
                   frozenset(initials), frozenset(accepting))
    except ValueError as e:
        block.fail(str(e))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(text: str, lineno: int, block: _Block):
    stripped = re.sub(_CYCLE_RE, "", text).strip()
    if stripped:
        block.fail(f"cannot parse cycle notation {text!r}", lineno)
    cycles = []
    for group in _CYCLE_RE.findall(text):
        points = group.split()
        if not points:
            continue
        try:
            cycles.append([int(p) for p in points])
        except ValueError:
            block.fail(f"cycle points must be integers: {group!r}", lineno)
    return cycles


def _gen_lines(block: _Block):
    for lineno, tokens in block.body:
        if tokens[0] != "gen":
            block.fail(f"unknown group line {tokens[0]!r}", lineno)
        if len(tokens) < 4 or tokens[2] != "=":
            block.fail("gen takes: gen NAME = VALUE", lineno)
        yield lineno, tokens[1], tokens[3:]


def _parse_group(block: _Block):
    """Returns (name, oracle) or (name, deferred graphproduct spec)."""
    name = block.header[0]
    flavor = block.header[1] if len(block.header) > 1 else None
    try:
        if flavor == "perm":
            if len(block.header) != 4 or block.header[2] != "degree":
                block.fail("perm header: group NAME perm degree N")
            degree = int(block.header[3])
            gens = {}
            for lineno, gen_name, rhs in _gen_lines(block):
                cycles = _parse_cycles(" ".join(rhs), lineno, block)
                gens[Letter(gen_name)] = perm_from_cycles(cycles, degree)
            return name, PermutationOracle(degree, gens)
        if flavor == "matrix":
            if block.header[2] != "dim" or len(block.header) != 4:
                block.fail("matrix header: group NAME matrix dim N")
            dim = int(block.header[3])
            gens = {}
            for lineno, gen_name, rhs in _gen_lines(block):
                rows = _parse_json_value("".join(rhs), lineno, block)
                gens[Letter(gen_name)] = tuple(tuple(r) for r in rows)
            return name, IntegerMatrixOracle(dim, gens)
        if flavor == "zk":
            if block.header[2] != "rank" or len(block.header) != 4:
                block.fail("zk header: group NAME zk rank K")
            rank = int(block.header[3])
            gens = {}
            for lineno, gen_name, rhs in _gen_lines(block):
                vec = _parse_json_value("".join(rhs), lineno, block)
                gens[Letter(gen_name)] = tuple(vec)
            return name, FreeAbelianOracle(rank, gens)
        if flavor == "free":
            if block.header[2] != "rank" or len(block.header) != 4:
                block.fail("free header: group NAME free rank K")
            rank = int(block.header[3])
            names = None
            for lineno, tokens in block.body:
                if tokens[0] == "names":
                    names = tuple(tokens[1:])
                else:
                    block.fail(f"unknown free group line {tokens[0]!r}", lineno)
            return name, FreeGroupOracle(rank, names)
        if flavor == "graphproduct":
            vertices: list[str] = []
            edges = []
            uses = {}
            for lineno, tokens in block.body:
                if tokens[0] == "vertices":
                    vertices.extend(tokens[1:])
                elif tokens[0] == "edge" and len(tokens) == 3:
                    edges.append((tokens[1], tokens[2]))
                elif tokens[0] == "vertex" and len(tokens) == 4 and tokens[2] == "uses":
                    uses[tokens[1]] = tokens[3]
                else:
                    block.fail(f"unknown graphproduct line {' '.join(tokens)!r}", lineno)
            missing = [v for v in vertices if v not in uses]
            if missing:
                block.fail(f"vertices without a group: {missing}")
            return name, _GraphSpec(tuple(vertices), tuple(edges), uses)
    except (ValueError, IndexError) as e:
        block.fail(str(e))
    block.fail(f"unknown group flavor {flavor!r}; "
               "expected perm, matrix, zk, free or graphproduct")


def _parse_json_value(text: str, lineno: int, block: _Block):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        block.fail(f"cannot parse {text!r} as a vector or matrix", lineno)


@dataclass(frozen=True)
class _GraphSpec:
    vertices: tuple
    edges: tuple
    uses: dict


def _parse_demonstration(block: _Block):
    name = block.header[0]
    group_name = None
    automaton_name = None
    letters = []
    for lineno, tokens in block.body:
        if tokens[0] == "group" and len(tokens) == 2:
            group_name = tokens[1]
        elif tokens[0] == "automaton" and len(tokens) == 2:
            automaton_name = tokens[1]
        elif tokens[0] == "letter" and len(tokens) >= 4 and tokens[2] == "=":
            letters.append((lineno, Letter(tokens[1]), tokens[3:]))
        else:
            block.fail(f"unknown demonstration line {' '.join(tokens)!r}", lineno)
    if group_name is None or automaton_name is None:
        block.fail("demonstration needs both a group and an automaton line")
    return name, group_name, automaton_name, letters


def _parse_cosettable(block: _Block):
    name = block.header[0]
    if (len(block.header) != 5 or block.header[1] != "group"
            or block.header[3] != "subgroupof"):
        block.fail("cosettable header: cosettable NAME group G subgroupof N")
    group_name = block.header[2]
    try:
        count = int(block.header[4])
    except ValueError:
        block.fail(f"coset count must be an integer, got {block.header[4]!r}")
    cosets: list[str] = []
    transversal = {}
    action = {}
    for lineno, tokens in block.body:
        if tokens[0] == "coset" and len(tokens) >= 4 and tokens[2] == "rep":
            coset = tokens[1]
            if coset in transversal:
                block.fail(f"coset {coset!r} defined twice", lineno)
            cosets.append(coset)
            transversal[coset] = _parse_word_tokens(tokens[3:], lineno, block)
        elif tokens[0] == "action" and len(tokens) == 4:
            source, letter, target = tokens[1:]
            key = (source, Letter(letter))
            if key in action:
                block.fail(f"action for {source} {letter} given twice", lineno)
            action[key] = target
        else:
            block.fail(f"unknown cosettable line {' '.join(tokens)!r}", lineno)
    if len(cosets) != count:
        block.fail(f"header promises {count} cosets, block defines {len(cosets)}")
    for (source, letter), target in action.items():
        for c in (source, target):
            if c not in transversal:
                block.fail(f"action references unknown coset {c!r}")
    return name, group_name, CosetTable(tuple(cosets), transversal, action)


def _parse_word_tokens(tokens, lineno, block) -> Word:
    try:
        return parse_word(" ".join(tokens))
    except ValueError as e:
        block.fail(str(e), lineno)


def _parse_presentation(block: _Block) -> tuple[str, Presentation]:
    name = block.header[0]
    names: list[str] = []
    relators: list[Word] = []
    for lineno, tokens in block.body:
        if tokens[0] == "alphabet":
            names.extend(tokens[1:])
        elif tokens[0] == "relator":
            relators.append(_parse_word_tokens(tokens[1:], lineno, block))
        else:
            block.fail(f"unknown presentation line {tokens[0]!r}", lineno)
    try:
        return name, Presentation(tuple(names), tuple(relators))
    except ValueError as e:
        block.fail(str(e))


# -- loading and linking -------------------------------------------------


def load(paths: Iterable[str]) -> Workspace:
    """Parse and link one workspace from the concatenation of the files."""
    sources = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            sources.append((str(path), fh.read()))
    return load_text(sources)


def load_text(sources: Iterable[tuple[Optional[str], str]]) -> Workspace:
    blocks: list[_Block] = []
    for path, text in sources:
        blocks.extend(_split_blocks(path, text))

    ws = Workspace()
    pending_groups = {}
    pending_demos = {}
    pending_tables = {}
    for block in blocks:
        name = block.header[0]
        seen = {"automaton": ws.automata, "group": pending_groups,
                "demonstration": pending_demos, "cosettable": pending_tables,
                "presentation": ws.presentations}[block.kind]
        if name in seen:
            block.fail(f"duplicate {block.kind} name {name!r}")
        if block.kind == "automaton":
            ws.automata[name] = _parse_automaton(block)
        elif block.kind == "group":
            pending_groups[name] = (block, _parse_group(block)[1])
        elif block.kind == "presentation":
            ws.presentations[name] = _parse_presentation(block)[1]
        elif block.kind == "demonstration":
            pending_demos[name] = block
        else:
            pending_tables[name] = block

    _link_groups(ws, pending_groups)
    for block in pending_demos.values():
        name, group_name, automaton_name, letters = _parse_demonstration(block)
        if group_name not in ws.groups:
            block.fail(f"demonstration {name!r} references undefined group {group_name!r}")
        if automaton_name not in ws.automata:
            block.fail(f"demonstration {name!r} references undefined automaton {automaton_name!r}")
        oracle = ws.groups[group_name]
        language = ws.automata[automaton_name]
        eval_map = {x: (x,) for x in language.alphabet}
        for lineno, letter, word_tokens in letters:
            eval_map[letter] = _parse_word_tokens(word_tokens, lineno, block)
        try:
            demo = Demonstration(oracle, eval_map, language)
        except ValueError as e:
            block.fail(str(e))
        ws.demonstrations[name] = demo
        ws.demo_refs[name] = (group_name, automaton_name)
    for block in pending_tables.values():
        name, group_name, table = _parse_cosettable(block)
        if group_name not in ws.groups:
            block.fail(f"cosettable {name!r} references undefined group {group_name!r}")
        ws.cosettables[name] = table
        ws.cosettable_refs[name] = group_name
    return ws


def _link_groups(ws: Workspace, pending: dict):
    """Resolve graphproduct references; plain oracles pass straight through."""
    progress = True
    while pending and progress:
        progress = False
        for name in list(pending):
            block, parsed = pending[name]
            if not isinstance(parsed, _GraphSpec):
                ws.groups[name] = parsed
                del pending[name]
                progress = True
                continue
            needed = set(parsed.uses.values())
            if any(n in pending for n in needed):
                continue
            missing = [n for n in needed if n not in ws.groups]
            if missing:
                block.fail(f"graphproduct {name!r} references undefined groups {missing}")
            try:
                graph = VertexGraph.make(parsed.vertices, parsed.edges)
                oracle = GraphProductOracle(
                    graph, {v: ws.groups[g] for v, g in parsed.uses.items()})
            except ValueError as e:
                block.fail(str(e))
            ws.groups[name] = oracle
            ws.graph_refs[name] = dict(parsed.uses)
            del pending[name]
            progress = True
    if pending:
        name = sorted(pending)[0]
        pending[name][0].fail(
            f"circular graphproduct references involving {sorted(pending)}")


# -- rendering -----------------------------------------------------------


_NATURAL_RE = re.compile(r"(\d+)")


def _natural_key(text: str):
    return tuple(int(part) if part.isdigit() else part
                 for part in _NATURAL_RE.split(text))


def _state_key(state):
    if isinstance(state, str):
        return (0, _natural_key(state))
    return (1, _natural_key(repr(state)))


def canonical_states(nfa: Nfa) -> dict:
    """Stable renaming state -> 's0', 's1', ... by breadth-first order.

    Initial states come first (sorted), then discovery order with edges
    scanned letters-first in alphabet order; unreachable states trail,
    sorted.  The numbering is a function of the automaton's structure,
    so rendering twice gives identical text.
    """
    letter_rank = {x: i for i, x in enumerate(nfa.alphabet)}
    outgoing: dict = {}
    for (p, label, q) in nfa.transitions:
        rank = (letter_rank[label], 0) if label is not None else (len(letter_rank), 0)
        outgoing.setdefault(p, []).append((rank, q))
    names: dict = {}
    queue = sorted(nfa.initials, key=_state_key)
    for s in queue:
        names[s] = f"s{len(names)}"
    cursor = 0
    while cursor < len(queue):
        p = queue[cursor]
        cursor += 1
        for _, q in sorted(outgoing.get(p, ()),
                           key=lambda e: (e[0], _state_key(e[1]))):
            if q not in names:
                names[q] = f"s{len(names)}"
                queue.append(q)
    for s in sorted(nfa.states - set(names), key=_state_key):
        names[s] = f"s{len(names)}"
    return names


def render_automaton(name: str, nfa: Nfa) -> str:
    names = canonical_states(nfa)
    letter_rank = {x: i for i, x in enumerate(nfa.alphabet)}
    by_index = sorted(names, key=lambda s: int(names[s][1:]))
    lines = [f"automaton {name}"]
    lines.append("  alphabet " + " ".join(x.name for x in nfa.alphabet))
    lines.append("  states " + " ".join(names[s] for s in by_index))
    lines.append("  initial " + " ".join(
        names[s] for s in by_index if s in nfa.initials))
    lines.append("  accept " + " ".join(
        names[s] for s in by_index if s in nfa.accepting))
    def edge_key(edge):
        p, label, q = edge
        rank = letter_rank[label] if label is not None else len(letter_rank)
        return (int(names[p][1:]), rank, int(names[q][1:]))
    for (p, label, q) in sorted(nfa.transitions, key=edge_key):
        text = label.name if label is not None else "eps"
        lines.append(f"  trans {names[p]} {text} {names[q]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_group(ws: Workspace, name: str) -> str:
    oracle = ws.groups[name]
    if isinstance(oracle, PermutationOracle):
        lines = [f"group {name} perm degree {oracle.degree}"]
        for x in oracle.alphabet:
            cycles = cycles_from_perm(oracle.gens[x])
            text = "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)
            lines.append(f"  gen {x.name} = {text or '()'}")
    elif isinstance(oracle, IntegerMatrixOracle):
        lines = [f"group {name} matrix dim {oracle.dim}"]
        for x in oracle.alphabet:
            rows = json.dumps([list(r) for r in oracle.gens[x]], separators=(",", ":"))
            lines.append(f"  gen {x.name} = {rows}")
    elif isinstance(oracle, FreeAbelianOracle):
        lines = [f"group {name} zk rank {oracle.rank}"]
        for x in oracle.alphabet:
            vec = json.dumps(list(oracle.gens[x]), separators=(",", ":"))
            lines.append(f"  gen {x.name} = {vec}")
    elif isinstance(oracle, FreeGroupOracle):
        lines = [f"group {name} free rank {oracle.rank}"]
        lines.append("  names " + " ".join(oracle.names))
    elif isinstance(oracle, GraphProductOracle):
        uses = ws.graph_refs[name]
        lines = [f"group {name} graphproduct"]
        lines.append("  vertices " + " ".join(oracle.graph.vertices))
        rank = {v: i for i, v in enumerate(oracle.graph.vertices)}
        for (u, v) in sorted(oracle.graph.edges, key=lambda e: (rank[e[0]], rank[e[1]])):
            lines.append(f"  edge {u} {v}")
        for v in oracle.graph.vertices:
            lines.append(f"  vertex {v} uses {uses[v]}")
    else:
        raise LoadError(f"group {name!r} has no block syntax: {type(oracle).__name__}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_demonstration(ws: Workspace, name: str) -> str:
    demo = ws.demonstrations[name]
    group_name, automaton_name = ws.demo_refs[name]
    lines = [f"demonstration {name}"]
    lines.append(f"  group {group_name}")
    for x in demo.language.alphabet:
        lines.append(f"  letter {x.name} = {format_word(demo.eval_map[x])}")
    lines.append(f"  automaton {automaton_name}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_cosettable(ws: Workspace, name: str) -> str:
    table = ws.cosettables[name]
    group_name = ws.cosettable_refs[name]
    oracle = ws.groups[group_name]
    lines = [f"cosettable {name} group {group_name} subgroupof {len(table.cosets)}"]
    for c in table.cosets:
        lines.append(f"  coset {c} rep {format_word(table.transversal[c])}")
    letter_rank = {x: i for i, x in enumerate(oracle.alphabet)}
    coset_rank = {c: i for i, c in enumerate(table.cosets)}
    def action_key(item):
        (source, letter), _target = item
        return (coset_rank[source], letter_rank.get(letter, len(letter_rank)))
    for (source, letter), target in sorted(table.action.items(), key=action_key):
        lines.append(f"  action {source} {letter.name} {target}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_presentation(name: str, p: Presentation) -> str:
    lines = [f"presentation {name}"]
    lines.append("  alphabet " + " ".join(p.names))
    for r in p.relators:
        lines.append("  relator " + format_word(r))
    lines.append("end")
    return "\n".join(lines) + "\n"


def render(ws: Workspace) -> str:
    """The whole workspace as one reloadable file, kinds grouped, names sorted.

    Graph product groups render after the groups they use.
    """
    chunks = []
    done = set()
    def emit_group(name):
        if name in done:
            return
        for used in sorted(set(ws.graph_refs.get(name, {}).values())):
            emit_group(used)
        done.add(name)
        chunks.append(render_group(ws, name))
    for name in sorted(ws.groups):
        emit_group(name)
    for name in sorted(ws.automata):
        chunks.append(render_automaton(name, ws.automata[name]))
    for name in sorted(ws.demonstrations):
        chunks.append(render_demonstration(ws, name))
    for name in sorted(ws.cosettables):
        chunks.append(render_cosettable(ws, name))
    for name in sorted(ws.presentations):
        chunks.append(render_presentation(name, ws.presentations[name]))
    return "\n".join(chunks)
