"""Constructions that turn demonstrations into new demonstrations.

Each function here realizes one closure property: changing generators,
passing to finite-index overgroups or subgroups, group extensions, graph
products, and extracting demonstrations from regular cross-sections such
as the normal forms of a padded-triple language.  All constructions are
effective on automata; preconditions that cannot be decided in general
are checked at caller-supplied bounds and trusted beyond them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .automata import (
    EPSILON,
    Letter,
    Nfa,
    Word,
    check_alphabet,
    concat,
    finite_language,
    image_hom,
    intersect,
    inverse_letter_hom,
    merge_alphabets,
    normalize_no_accepting_initial,
    single_word,
    subtract_word,
    union,
)
from .demonstrations import Demonstration, identity_eval_map
from .graphproduct import GraphProductOracle, VertexGraph
from .groups import ElementKey, GroupOracle

KeyPredicate = Callable[[ElementKey], bool]


# -- change of generators ------------------------------------------------


def change_generators(demo: Demonstration,
                      target_eval_map: Mapping[Letter, Word],
                      phi: Mapping[Letter, Word]) -> Demonstration:
    """Re-express a demonstration over a different letter set.

    ``phi`` sends each old letter to a non-empty word over the new letters
    that evaluates to the same group element; the language is pushed
    through the induced substitution.  Empty images are rejected: erasing
    a letter could silently drop elements from the image.
    """
    target_alphabet = check_alphabet(target_eval_map.keys())

    def target_eval(word: Word) -> ElementKey:
        out: Word = EPSILON
        for y in word:
            if y not in target_eval_map:
                raise ValueError(f"image uses {y.name!r} which has no target evaluation")
            out = out + target_eval_map[y]
        return demo.oracle.evaluate(out)

    for x in demo.language.alphabet:
        if x not in phi:
            raise ValueError(f"no image for letter {x.name!r}")
        if not phi[x]:
            raise ValueError(f"image of {x.name!r} is the empty word")
        if target_eval(phi[x]) != demo.evaluate((x,)):
            raise ValueError(f"image of {x.name!r} evaluates to a different element")
    language = image_hom(demo.language, phi, allow_erasing=False,
                         target_alphabet=target_alphabet)
    return Demonstration(demo.oracle, dict(target_eval_map), language)


# -- extensions ----------------------------------------------------------


def extension(demo_n: Demonstration, demo_q: Demonstration,
              oracle: GroupOracle, in_normal: KeyPredicate,
              check_len: int = 4) -> Demonstration:
    """Combine demonstrations along a short exact sequence.

    ``demo_n`` covers a normal subgroup N, ``demo_q`` covers coset
    representatives of the quotient; both already evaluate in the big
    group's oracle.  The result accepts L1, L2 and L1 L2: a word of L2 or
    L1 L2 has non-trivial image in the quotient, a word of L1 is a
    non-trivial element of N.  ``in_normal`` decides membership of N on
    element keys and validates ``demo_q`` up to ``check_len``.
    """
    if demo_n.oracle != oracle or demo_q.oracle != oracle:
        raise ValueError("both demonstrations must evaluate in the supplied oracle")
    if not in_normal(oracle.identity_key):
        raise ValueError("in_normal rejects the identity, predicate looks inverted")
    n_names = {x.name for x in demo_n.language.alphabet}
    q_names = {x.name for x in demo_q.language.alphabet}
    clash = n_names & q_names
    if clash:
        raise ValueError(f"letter sets must be disjoint, both use {sorted(clash)}")
    for x in demo_n.language.alphabet:
        if not in_normal(demo_n.evaluate((x,))):
            raise ValueError(f"letter {x.name!r} of the subgroup demo is outside the subgroup")
    for w in demo_q.language.enumerate_words(check_len):
        if in_normal(demo_q.evaluate(w)):
            raise ValueError(
                f"quotient demo word evaluates into the subgroup: "
                f"{' '.join(x.name for x in w)}")
    language = union(demo_n.language,
                     union(demo_q.language, concat(demo_n.language, demo_q.language)))
    eval_map = {**demo_n.eval_map, **demo_q.eval_map}
    return Demonstration(oracle, eval_map, language)


# -- finite index overgroups --------------------------------------------


def fi_overgroup(demo: Demonstration, oracle: GroupOracle,
                 transversal: Mapping[Letter, Word],
                 in_subgroup: Optional[KeyPredicate] = None) -> Demonstration:
    """Extend a demonstration of a finite-index subgroup to the whole group.

    ``transversal`` supplies one fresh letter per non-identity coset, each
    evaluating to a representative of that coset.  The language becomes
    L, T and L T.  A transversal letter evaluating into the subgroup would
    let a word collide with the identity coset, so it is rejected (always
    for the identity itself, and via ``in_subgroup`` when supplied).
    """
    if demo.oracle != oracle:
        raise ValueError("demonstration must evaluate in the supplied oracle")
    t_alphabet = check_alphabet(transversal.keys())
    clash = {x.name for x in demo.language.alphabet} & {t.name for t in t_alphabet}
    if clash:
        raise ValueError(f"transversal letters clash with the subgroup demo: {sorted(clash)}")
    for t in t_alphabet:
        word = transversal[t]
        if oracle.is_identity(word):
            raise ValueError(f"transversal letter {t.name!r} evaluates to the identity")
        if in_subgroup is not None and in_subgroup(oracle.evaluate(word)):
            raise ValueError(f"transversal letter {t.name!r} evaluates into the subgroup")
    t_lang = finite_language([(t,) for t in t_alphabet], t_alphabet)
    language = union(demo.language, union(t_lang, concat(demo.language, t_lang)))
    eval_map = {**demo.eval_map, **{t: tuple(w) for t, w in transversal.items()}}
    return Demonstration(oracle, eval_map, language)


# -- finite index subgroups ---------------------------------------------


@dataclass
class CosetTable:
    """Right cosets of a finite-index subgroup with transversal words.

    ``cosets[0]`` is the subgroup itself; its transversal word must be
    empty.  ``action`` maps (coset, generator letter) to the coset reached
    by right multiplication and must be total.
    """

    cosets: tuple[str, ...]
    transversal: dict[str, Word]
    action: dict[tuple[str, Letter], str]

    @property
    def subgroup_coset(self) -> str:
        return self.cosets[0]

    def act(self, coset: str, letter: Letter) -> str:
        try:
            return self.action[(coset, letter)]
        except KeyError:
            raise ValueError(f"action undefined on ({coset!r}, {letter.name!r})") from None

    def validate(self, oracle: GroupOracle,
                 in_subgroup: Optional[KeyPredicate] = None):
        """Structural and, given a membership predicate, semantic checks."""
        if len(set(self.cosets)) != len(self.cosets) or not self.cosets:
            raise ValueError("coset names must be distinct and non-empty")
        home = self.subgroup_coset
        if self.transversal.get(home) != EPSILON:
            raise ValueError("the subgroup's transversal word must be empty")
        for c in self.cosets:
            if c not in self.transversal:
                raise ValueError(f"no transversal word for coset {c!r}")
        for c in self.cosets:
            for x in oracle.alphabet:
                target = self.act(c, x)
                if target not in set(self.cosets):
                    raise ValueError(f"action maps ({c!r}, {x.name!r}) to unknown coset {target!r}")
        # right multiplication by x then x^-1 must return home
        for c in self.cosets:
            for x in oracle.alphabet:
                back = self.act(self.act(c, x), oracle.inverse_letter(x))
                if back != c:
                    raise ValueError(
                        f"action is inconsistent: {c!r}.{x.name} then its inverse gives {back!r}")
        reached = {home}
        queue = deque([home])
        while queue:
            c = queue.popleft()
            for x in oracle.alphabet:
                t = self.act(c, x)
                if t not in reached:
                    reached.add(t)
                    queue.append(t)
        if reached != set(self.cosets):
            raise ValueError(f"cosets unreachable from {home!r}: {sorted(set(self.cosets) - reached)}")
        if in_subgroup is not None:
            if not in_subgroup(oracle.identity_key):
                raise ValueError("in_subgroup rejects the identity, predicate looks inverted")
            for c in self.cosets:
                for x in oracle.alphabet:
                    target = self.act(c, x)
                    word = self.transversal[c] + (x,) + oracle.inverse_word(self.transversal[target])
                    if not in_subgroup(oracle.evaluate(word)):
                        raise ValueError(
                            f"transversal words disagree with the action at ({c!r}, {x.name!r})")
            for i, c in enumerate(self.cosets):
                for d in self.cosets[i + 1:]:
                    word = self.transversal[c] + oracle.inverse_word(self.transversal[d])
                    if in_subgroup(oracle.evaluate(word)):
                        raise ValueError(f"cosets {c!r} and {d!r} share a coset")


@dataclass(frozen=True)
class EdgeLetter:
    """A coset-to-coset step reading one generator."""

    source: str
    generator: Letter
    target: str

    @property
    def letter(self) -> Letter:
        return Letter(f"({self.source}|{self.generator.name}|{self.target})")


def fi_subgroup(demo: Demonstration, table: CosetTable,
                in_subgroup: Optional[KeyPredicate] = None) -> Demonstration:
    """Restrict a demonstration to a finite-index subgroup.

    Words of the original language that multiply back into the subgroup
    are exactly the closed walks on the coset digraph spelling accepted
    words.  Each walk edge (C, x, C') becomes a letter evaluating to
    t_C x t_{C'}^{-1}, which rewrites the walk into a product of subgroup
    elements with the same value.

    The demonstration's letters must be the oracle's generators verbatim
    (identity evaluation map) and the generating set must be inverse
    closed.
    """
    oracle = demo.oracle
    lang_names = {x.name for x in demo.language.alphabet}
    oracle_names = {x.name for x in oracle.alphabet}
    if lang_names != oracle_names:
        raise ValueError("language alphabet must equal the oracle alphabet")
    for x in demo.language.alphabet:
        if demo.eval_map[x] != (x,):
            raise ValueError(f"letter {x.name!r} must evaluate to itself")
    table.validate(oracle, in_subgroup)

    edges = []
    for c in table.cosets:
        for x in oracle.alphabet:
            edges.append(EdgeLetter(c, x, table.act(c, x)))
    edge_letters = tuple(e.letter for e in edges)
    check_alphabet(edge_letters)

    home = table.subgroup_coset
    # walks from the subgroup coset back to it, with a separate accepting
    # copy of home so the empty walk is rejected
    states: set = {("c", c) for c in table.cosets} | {("fin",)}
    transitions = set()
    for e, letter in zip(edges, edge_letters):
        transitions.add(((("c", e.source)), letter, ("c", e.target)))
        if e.target == home:
            transitions.add(((("c", e.source)), letter, ("fin",)))
    walks = Nfa(edge_letters, frozenset(states), frozenset(transitions),
                frozenset({("c", home)}), frozenset({("fin",)}))

    spelled = inverse_letter_hom(
        demo.language,
        {e.letter: e.generator for e in edges},
        edge_letters)
    language = intersect(walks, spelled)

    eval_map = {
        e.letter: table.transversal[e.source] + (e.generator,)
        + oracle.inverse_word(table.transversal[e.target])
        for e in edges}
    return Demonstration(oracle, eval_map, language)


# -- graph products ------------------------------------------------------


def admissible_automaton(graph: VertexGraph) -> Nfa:
    """Deterministic automaton for the pruned type strings of a graph.

    A type string is pruned when no swap of adjacent commuting vertices
    can ever bring two equal vertices together, and it is the ShortLex
    least ordering among its swap class.  Reading left to right, a next
    vertex w is allowed unless, skipping back over vertices that commute
    with w, one first meets w itself (a merge would be possible) or a
    vertex larger than w that commutes with everything in between
    including itself (a smaller ordering would exist).

    Each state tracks, per vertex v: the letter at the last position not
    commuting with v, and whether any letter after that position exceeds
    v.  The initial state is the only non-accepting state and carries no
    epsilon transitions, so gluing constructions can substitute automata
    for states directly.
    """
    verts = graph.vertices
    rank = {v: i for i, v in enumerate(verts)}
    letters = tuple(Letter(v) for v in verts)

    initial = (tuple(None for _ in verts), tuple(False for _ in verts))

    def legal(state, w):
        lastblock, tail_gt = state
        i = rank[w]
        return lastblock[i] != w and not tail_gt[i]

    def step(state, w):
        lastblock, tail_gt = state
        lb = list(lastblock)
        tg = list(tail_gt)
        for i, v in enumerate(verts):
            if v == w or not graph.adjacent(v, w):
                lb[i] = w
                tg[i] = False
            elif rank[w] > rank[v]:
                tg[i] = True
        return (tuple(lb), tuple(tg))

    states = {initial}
    transitions = set()
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        for v, letter in zip(verts, letters):
            if not legal(state, v):
                continue
            nxt = step(state, v)
            transitions.add((state, letter, nxt))
            if nxt not in states:
                states.add(nxt)
                queue.append(nxt)
    accepting = frozenset(states - {initial})
    return Nfa(letters, frozenset(states), frozenset(transitions),
               frozenset({initial}), accepting)


def graph_product(graph: VertexGraph,
                  local: Mapping[str, Demonstration]) -> Demonstration:
    """Glue local demonstrations along the pruned type automaton.

    Every state of the admissible automaton is replaced by a copy of its
    vertex's language; epsilon edges chain accepting states of one copy to
    initial states of the next.  Accepted words are concatenations of one
    non-empty local word per letter of a pruned type string, which reach
    every non-identity element of the graph product and never the
    identity, provided the locals do.
    """
    missing = [v for v in graph.vertices if v not in local]
    if missing:
        raise ValueError(f"no local demonstration for vertices: {missing}")
    oracle = GraphProductOracle(graph, {v: local[v].oracle for v in graph.vertices})
    seen: dict[str, str] = {}
    for v in graph.vertices:
        for x in local[v].language.alphabet:
            if x.name in seen:
                raise ValueError(
                    f"language letter {x.name!r} used by vertices {seen[x.name]!r} and {v!r}")
            seen[x.name] = v
    normalized = {}
    for v in graph.vertices:
        try:
            normalized[v] = normalize_no_accepting_initial(local[v].language)
        except ValueError:
            raise ValueError(f"local demonstration at {v!r} accepts the empty word") from None

    adm = admissible_automaton(graph)
    (adm_initial,) = adm.initials
    label: dict = {}
    for (p, letter, q) in adm.transitions:
        if q in label and label[q] != letter.name:
            raise AssertionError("admissible state entered by two different vertices")
        label[q] = letter.name

    alphabet = merge_alphabets(*(local[v].language.alphabet for v in graph.vertices))
    states: set = {("glue-init",)}
    transitions: set = set()
    accepting: set = set()
    for s in adm.states:
        if s == adm_initial:
            continue
        nfa = normalized[label[s]]
        for q in nfa.states:
            states.add((s, q))
        for (p, lbl, q) in nfa.transitions:
            transitions.add(((s, p), lbl, (s, q)))
        for q in nfa.accepting:
            accepting.add((s, q))
    for (p, _letter, q) in adm.transitions:
        entry = normalized[label[q]].initials
        if p == adm_initial:
            for i in entry:
                transitions.add((("glue-init",), None, (q, i)))
        else:
            exits = normalized[label[p]].accepting
            for f in exits:
                for i in entry:
                    transitions.add(((p, f), None, (q, i)))
    language = Nfa(alphabet, frozenset(states), frozenset(transitions),
                   frozenset({("glue-init",)}), frozenset(accepting))
    eval_map: dict[Letter, Word] = {}
    for v in graph.vertices:
        eval_map.update(local[v].eval_map)
    return Demonstration(oracle, eval_map, language)


# -- padded triples and cross-sections ----------------------------------

PAD_NAME = "#pad"
PAD = Letter(PAD_NAME)


def make_triple(a: str, b: str, c: str) -> Letter:
    for comp in (a, b, c):
        if "|" in comp or not comp or any(ch.isspace() for ch in comp):
            raise ValueError(f"bad triple component {comp!r}")
    if a == b == c == PAD_NAME:
        raise ValueError("the all-padding triple is not a letter")
    return Letter(f"({a}|{b}|{c})")


def split_triple(letter: Letter) -> tuple[str, str, str]:
    name = letter.name
    if not (name.startswith("(") and name.endswith(")")):
        raise ValueError(f"not a triple letter: {name!r}")
    parts = name[1:-1].split("|")
    if len(parts) != 3:
        raise ValueError(f"triple letter needs three components: {name!r}")
    return (parts[0], parts[1], parts[2])


def pad_triple_word(u: Word, v: Word, w: Word) -> Word:
    """Align three words into one padded triple word.

    Shorter coordinates are padded at the tail, so padding persists to the
    end of the word in every coordinate.
    """
    k = max(len(u), len(v), len(w))
    out = []
    for i in range(k):
        out.append(make_triple(
            u[i].name if i < len(u) else PAD_NAME,
            v[i].name if i < len(v) else PAD_NAME,
            w[i].name if i < len(w) else PAD_NAME))
    return tuple(out)


@dataclass
class SyncTripleAutomaton:
    """An automaton over padded triple letters with a declared base alphabet."""

    nfa: Nfa
    base: tuple[Letter, ...]

    def __post_init__(self):
        self.base = check_alphabet(self.base)
        allowed = {x.name for x in self.base} | {PAD_NAME}
        for letter in self.nfa.alphabet:
            comps = split_triple(letter)
            for c in comps:
                if c not in allowed:
                    raise ValueError(f"triple component {c!r} is not a base letter")
            if all(c == PAD_NAME for c in comps):
                raise ValueError("alphabet contains the all-padding triple")


def _padding_violations(t: SyncTripleAutomaton) -> Nfa:
    """Automaton for accepted words that resume a coordinate after padding."""
    flag_states = [(a, b, c) for a in (False, True) for b in (False, True) for c in (False, True)]
    states = set(flag_states) | {"bad"}
    transitions = set()
    for letter in t.nfa.alphabet:
        comps = split_triple(letter)
        for st in flag_states:
            ok = all(not ended or comp == PAD_NAME for ended, comp in zip(st, comps))
            if ok:
                nxt = tuple(ended or comp == PAD_NAME for ended, comp in zip(st, comps))
                transitions.add((st, letter, nxt))
            else:
                transitions.add((st, letter, "bad"))
        transitions.add(("bad", letter, "bad"))
    monitor = Nfa(t.nfa.alphabet, frozenset(states), frozenset(transitions),
                  frozenset({(False, False, False)}), frozenset({"bad"}))
    return intersect(t.nfa, monitor)


def autostackable_projection(t: SyncTripleAutomaton) -> Nfa:
    """First coordinates of a padded triple language, padding erased.

    The language must respect the padding discipline (once a coordinate
    pads, it pads to the end); offending words are reported as an error.
    """
    violations = _padding_violations(t)
    if not violations.is_empty():
        example = violations.enumerate_words(len(violations.states))
        shown = " ".join(x.name for x in example[0]) if example else "?"
        raise ValueError(f"padding does not persist to the end of words, e.g.: {shown}")
    padded_base = t.base + (PAD,)
    first = image_hom(
        t.nfa,
        {letter: (Letter(split_triple(letter)[0]),) for letter in t.nfa.alphabet},
        target_alphabet=padded_base)
    return image_hom(
        first,
        {**{x: (x,) for x in t.base}, PAD: EPSILON},
        allow_erasing=True,
        target_alphabet=t.base)


def cross_section_to_demo(nfa: Nfa, oracle: GroupOracle,
                          identity_rep: Word = EPSILON) -> Demonstration:
    """Demonstration from a language with one word per group element.

    The caller asserts (and should have verified at bounds) that the
    language is a cross-section of the group; this function removes the
    stated identity representative and wires the letters straight into the
    oracle.
    """
    if not nfa.accepts(identity_rep):
        raise ValueError("claimed identity representative is not in the language")
    oracle_names = {x.name for x in oracle.alphabet}
    for x in nfa.alphabet:
        if x.name not in oracle_names:
            raise ValueError(f"letter {x.name!r} is not an oracle generator")
    if not oracle.is_identity(identity_rep):
        raise ValueError("claimed identity representative evaluates elsewhere")
    language = subtract_word(nfa, identity_rep)
    return Demonstration(oracle, identity_eval_map(language.alphabet), language)
