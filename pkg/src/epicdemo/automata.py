"""Nondeterministic finite automata over interned letter alphabets.

Letters are value objects identified by their display string, so two
automata agree on a letter exactly when they spell it the same way.  Words
are tuples of letters and the empty tuple is the empty word.  Epsilon
transitions are stored explicitly (label ``None``) and never eliminated
eagerly; decision procedures work on epsilon-closed state subsets instead.

Alphabets are ordered: declaration order fixes the lexicographic order
used by :meth:`Nfa.enumerate_words`, and every operation that merges two
alphabets keeps the left operand's order and appends unseen letters.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Optional

from .errors import AutomatonSizeError

State = Hashable

MAX_STATES_ENV = "EPIC_MAX_STATES"
DEFAULT_MAX_STATES = 10**6

_INF = float("inf")


def state_cap() -> int:
    raw = os.environ.get(MAX_STATES_ENV)
    if raw is None:
        return DEFAULT_MAX_STATES
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_STATES_ENV} must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise ValueError(f"{MAX_STATES_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True, order=True)
class Letter:
    """A single symbol, identified by its display string."""

    name: str

    def __post_init__(self):
        if not self.name or any(c.isspace() for c in self.name):
            raise ValueError(f"letter name must be non-empty without whitespace: {self.name!r}")

    def __repr__(self):
        return f"Letter({self.name!r})"

    def __str__(self):
        return self.name


Word = tuple[Letter, ...]
EPSILON: Word = ()


def make_word(*names: str) -> Word:
    return tuple(Letter(n) for n in names)


def format_word(word: Word) -> str:
    """Render a word as space-separated letter names, ``eps`` for the empty word."""
    if not word:
        return "eps"
    return " ".join(x.name for x in word)


def parse_word(text: str) -> Word:
    """Inverse of format_word.  ``eps`` alone denotes the empty word."""
    parts = text.split()
    if not parts or parts == ["eps"]:
        return EPSILON
    if "eps" in parts:
        raise ValueError("'eps' is reserved for the empty word and cannot mix with letters")
    return tuple(Letter(n) for n in parts)


def check_alphabet(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out = tuple(letters)
    seen = set()
    for x in out:
        if not isinstance(x, Letter):
            raise TypeError(f"alphabet entries must be Letter, got {x!r}")
        if x.name in seen:
            raise ValueError(f"duplicate letter {x.name!r} in alphabet")
        seen.add(x.name)
    return out


def merge_alphabets(*alphabets: Iterable[Letter]) -> tuple[Letter, ...]:
    """Order-preserving union: left operand first, then unseen letters."""
    out: list[Letter] = []
    seen: set[str] = set()
    for alphabet in alphabets:
        for x in alphabet:
            if x.name not in seen:
                seen.add(x.name)
                out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Nfa:
    """A finite automaton with epsilon transitions.

    ``transitions`` holds triples ``(source, label, target)`` where the
    label is a Letter or ``None`` for epsilon.  ``initials`` must be
    non-empty.  State identifiers are opaque hashables; constructions in
    this module tag states with tuples to keep them distinct.
    """

    alphabet: tuple[Letter, ...]
    states: frozenset
    transitions: frozenset
    initials: frozenset
    accepting: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", check_alphabet(self.alphabet))
        cap = state_cap()
        if len(self.states) > cap:
            raise AutomatonSizeError(
                f"automaton has {len(self.states)} states, cap is {cap} "
                f"(set {MAX_STATES_ENV} to raise it)")
        if not self.initials:
            raise ValueError("automaton needs at least one initial state")
        if not self.initials <= self.states or not self.accepting <= self.states:
            raise ValueError("initial and accepting states must be drawn from the state set")
        letters = set(self.alphabet)
        for (p, label, q) in self.transitions:
            if p not in self.states or q not in self.states:
                raise ValueError(f"transition endpoint not a state: {(p, label, q)!r}")
            if label is not None and label not in letters:
                raise ValueError(f"transition label {label!r} not in the alphabet")

    # -- cached structure ------------------------------------------------

    @cached_property
    def _eps_edges(self) -> dict:
        out: dict = {}
        for (p, label, q) in self.transitions:
            if label is None:
                out.setdefault(p, []).append(q)
        return out

    @cached_property
    def _letter_edges(self) -> dict:
        out: dict = {}
        for (p, label, q) in self.transitions:
            if label is not None:
                out.setdefault((p, label), []).append(q)
        return out

    @cached_property
    def _closure_memo(self) -> dict:
        return {}

    def eps_closure(self, states: Iterable[State]) -> frozenset:
        """All states reachable from ``states`` by epsilon edges alone."""
        result: set = set()
        for s in states:
            memo = self._closure_memo.get(s)
            if memo is None:
                seen = {s}
                stack = [s]
                while stack:
                    p = stack.pop()
                    for q in self._eps_edges.get(p, ()):
                        if q not in seen:
                            seen.add(q)
                            stack.append(q)
                memo = frozenset(seen)
                self._closure_memo[s] = memo
            result |= memo
        return frozenset(result)

    @cached_property
    def _letters_to_accept(self) -> dict:
        """Minimum number of letters needed to reach acceptance, per state."""
        back_eps: dict = {}
        back_letter: dict = {}
        for (p, label, q) in self.transitions:
            if label is None:
                back_eps.setdefault(q, []).append(p)
            else:
                back_letter.setdefault(q, []).append(p)
        dist = {s: 0 for s in self.accepting}
        dq = deque(self.accepting)
        while dq:
            q = dq.popleft()
            d = dist[q]
            for p in back_eps.get(q, ()):
                if p not in dist or dist[p] > d:
                    dist[p] = d
                    dq.appendleft(p)
            for p in back_letter.get(q, ()):
                if p not in dist or dist[p] > d + 1:
                    dist[p] = d + 1
                    dq.append(p)
        return dist

    # -- decision procedures --------------------------------------------

    def start_subset(self) -> frozenset:
        return self.eps_closure(self.initials)

    def step(self, subset: frozenset, letter: Letter) -> frozenset:
        moved: set = set()
        for p in subset:
            moved.update(self._letter_edges.get((p, letter), ()))
        if not moved:
            return frozenset()
        return self.eps_closure(moved)

    def accepts(self, word: Word) -> bool:
        """Membership test; letters outside the alphabet never match."""
        subset = self.start_subset()
        for x in word:
            subset = self.step(subset, x)
            if not subset:
                return False
        return bool(subset & self.accepting)

    def is_empty(self) -> bool:
        """True when no word at all is accepted."""
        seen = set(self.initials)
        stack = list(self.initials)
        forward: dict = {}
        for (p, _label, q) in self.transitions:
            forward.setdefault(p, []).append(q)
        while stack:
            p = stack.pop()
            if p in self.accepting:
                return False
            for q in forward.get(p, ()):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return True

    def enumerate_words(self, max_len: int) -> list[Word]:
        """Accepted words of length at most ``max_len`` in length-lex order.

        Lexicographic order is alphabet declaration order.  The search
        extends only prefixes that can still reach acceptance within the
        remaining length budget, so sparse languages enumerate quickly.
        """
        if max_len < 0:
            return []
        dist = self._letters_to_accept
        out: list[Word] = []
        start = self.start_subset()
        if start & self.accepting:
            out.append(EPSILON)
        frontier: list[tuple[Word, frozenset]] = [(EPSILON, start)]
        for n in range(max_len):
            remaining = max_len - n - 1
            nxt: list[tuple[Word, frozenset]] = []
            for word, subset in frontier:
                for x in self.alphabet:
                    subset2 = self.step(subset, x)
                    if not subset2:
                        continue
                    best = min((dist.get(s, _INF) for s in subset2), default=_INF)
                    if best > remaining:
                        continue
                    word2 = word + (x,)
                    if subset2 & self.accepting:
                        out.append(word2)
                    nxt.append((word2, subset2))
            frontier = nxt
        return out


# -- constructions ------------------------------------------------------


def _tag(tag: str, nfa: Nfa):
    states = frozenset((tag, s) for s in nfa.states)
    transitions = frozenset(((tag, p), label, (tag, q)) for (p, label, q) in nfa.transitions)
    initials = frozenset((tag, s) for s in nfa.initials)
    accepting = frozenset((tag, s) for s in nfa.accepting)
    return states, transitions, initials, accepting


def union(a: Nfa, b: Nfa) -> Nfa:
    """Automaton accepting the union of the two languages."""
    sa, ta, ia, fa = _tag("u0", a)
    sb, tb, ib, fb = _tag("u1", b)
    return Nfa(
        alphabet=merge_alphabets(a.alphabet, b.alphabet),
        states=sa | sb,
        transitions=ta | tb,
        initials=ia | ib,
        accepting=fa | fb,
    )


def concat(a: Nfa, b: Nfa) -> Nfa:
    """Automaton accepting every word of ``a`` followed by a word of ``b``."""
    sa, ta, ia, fa = _tag("c0", a)
    sb, tb, ib, fb = _tag("c1", b)
    bridge = frozenset((p, None, q) for p in fa for q in ib)
    return Nfa(
        alphabet=merge_alphabets(a.alphabet, b.alphabet),
        states=sa | sb,
        transitions=ta | tb | bridge,
        initials=ia,
        accepting=fb,
    )


def _epsilon_free(a: Nfa) -> Nfa:
    """Equivalent automaton without epsilon transitions."""
    transitions = set()
    accepting = set()
    for p in a.states:
        closure = a.eps_closure([p])
        if closure & a.accepting:
            accepting.add(p)
        for c in closure:
            for (src, label, q) in a.transitions:
                if src == c and label is not None:
                    transitions.add((p, label, q))
    return Nfa(a.alphabet, a.states, frozenset(transitions), a.initials, frozenset(accepting))


def intersect(a: Nfa, b: Nfa) -> Nfa:
    """Product automaton for the intersection, restricted to reachable pairs."""
    alphabet = merge_alphabets(a.alphabet, b.alphabet)
    fa = _epsilon_free(a)
    fb = _epsilon_free(b)
    in_b = {x.name for x in fb.alphabet}
    shared = [x for x in fa.alphabet if x.name in in_b]
    initials = frozenset((p, q) for p in fa.initials for q in fb.initials)
    states = set(initials)
    transitions = set()
    queue = deque(initials)
    while queue:
        (p, q) = queue.popleft()
        for x in shared:
            for p2 in fa._letter_edges.get((p, x), ()):
                for q2 in fb._letter_edges.get((q, x), ()):
                    pair = (p2, q2)
                    transitions.add(((p, q), x, pair))
                    if pair not in states:
                        states.add(pair)
                        queue.append(pair)
    accepting = frozenset(s for s in states if s[0] in fa.accepting and s[1] in fb.accepting)
    return Nfa(alphabet, frozenset(states), frozenset(transitions), initials, accepting)


def image_hom(a: Nfa, phi: Mapping[Letter, Word], allow_erasing: bool = False,
              target_alphabet: Optional[Iterable[Letter]] = None) -> Nfa:
    """Apply a letter-to-word substitution to the language.

    Every transition on ``x`` is replaced by a path spelling ``phi[x]``.
    Erasing images (empty words) become epsilon edges and must be enabled
    explicitly with ``allow_erasing``.
    """
    for x in a.alphabet:
        if x not in phi:
            raise ValueError(f"substitution is missing letter {x.name!r}")
        if not phi[x] and not allow_erasing:
            raise ValueError(f"substitution erases {x.name!r} but allow_erasing is False")
    if target_alphabet is not None:
        alphabet = check_alphabet(target_alphabet)
        target_names = {y.name for y in alphabet}
        for x in a.alphabet:
            for y in phi[x]:
                if y.name not in target_names:
                    raise ValueError(f"image of {x.name!r} uses {y.name!r} outside the target alphabet")
    else:
        alphabet = merge_alphabets(*(phi[x] for x in a.alphabet))
    states = set(("h", s) for s in a.states)
    transitions = set()
    for (p, label, q) in a.transitions:
        if label is None:
            transitions.add((("h", p), None, ("h", q)))
            continue
        image = phi[label]
        if not image:
            transitions.add((("h", p), None, ("h", q)))
        elif len(image) == 1:
            transitions.add((("h", p), image[0], ("h", q)))
        else:
            # chain of fresh states spelling the image
            prev = ("h", p)
            for k in range(len(image) - 1):
                mid = ("hp", p, label.name, q, k)
                states.add(mid)
                transitions.add((prev, image[k], mid))
                prev = mid
            transitions.add((prev, image[-1], ("h", q)))
    return Nfa(
        alphabet=alphabet,
        states=frozenset(states),
        transitions=frozenset(transitions),
        initials=frozenset(("h", s) for s in a.initials),
        accepting=frozenset(("h", s) for s in a.accepting),
    )


def inverse_letter_hom(a: Nfa, hom: Mapping[Letter, Letter],
                       domain: Iterable[Letter]) -> Nfa:
    """Pull the language back along a letter-to-letter map.

    The result accepts a word over ``domain`` exactly when its image
    letter by letter is accepted by ``a``.  Transitions are relabelled in
    place; epsilon edges are kept.
    """
    alphabet = check_alphabet(domain)
    targets = {x.name for x in a.alphabet}
    preimages: dict = {}
    for d in alphabet:
        if d not in hom:
            raise ValueError(f"letter map is missing domain letter {d.name!r}")
        x = hom[d]
        if x.name not in targets:
            raise ValueError(f"letter map sends {d.name!r} to {x.name!r} outside the automaton alphabet")
        preimages.setdefault(x, []).append(d)
    transitions = set()
    for (p, label, q) in a.transitions:
        if label is None:
            transitions.add((p, None, q))
        else:
            for d in preimages.get(label, ()):
                transitions.add((p, d, q))
    return Nfa(alphabet, a.states, frozenset(transitions), a.initials, a.accepting)


def _all_words_except(word: Word, alphabet: tuple[Letter, ...]) -> Nfa:
    """Total DFA over ``alphabet`` rejecting exactly ``word``."""
    n = len(word)
    states: set = set(range(n + 1)) | {"div"}
    transitions = set()
    for i in range(n):
        for x in alphabet:
            if x == word[i]:
                transitions.add((i, x, i + 1))
            else:
                transitions.add((i, x, "div"))
    for x in alphabet:
        transitions.add((n, x, "div"))
        transitions.add(("div", x, "div"))
    accepting = frozenset(s for s in states if s != n)
    return Nfa(alphabet, frozenset(states), frozenset(transitions), frozenset({0}), accepting)


def subtract_word(a: Nfa, word: Word) -> Nfa:
    """Automaton for the language of ``a`` with one word removed."""
    alphabet = merge_alphabets(a.alphabet, check_alphabet(dict.fromkeys(word)))
    return intersect(a, _all_words_except(word, alphabet))


def normalize_no_accepting_initial(a: Nfa) -> Nfa:
    """Check that the empty word is rejected and drop redundant epsilon loops.

    When epsilon is not accepted, no initial state is accepting and no
    accepting state is epsilon-reachable from an initial state, which is
    the structural shape gluing constructions rely on.  Raises ValueError
    if the language contains the empty word.
    """
    if a.start_subset() & a.accepting:
        raise ValueError("language contains the empty word; cannot normalize")
    transitions = frozenset(t for t in a.transitions if not (t[1] is None and t[0] == t[2]))
    return Nfa(a.alphabet, a.states, transitions, a.initials, a.accepting)


def finite_language(words: Iterable[Word], alphabet: Optional[Iterable[Letter]] = None) -> Nfa:
    """Automaton accepting exactly the given finite set of words."""
    words = list(dict.fromkeys(tuple(w) for w in words))
    if alphabet is None:
        alphabet = merge_alphabets(*(list(w) for w in words))
    else:
        alphabet = check_alphabet(alphabet)
    states: set = {"r"}
    transitions = set()
    accepting = set()
    for i, w in enumerate(words):
        if not w:
            accepting.add("r")
            continue
        prev: State = "r"
        for k, x in enumerate(w):
            s = ("w", i, k + 1)
            states.add(s)
            transitions.add((prev, x, s))
            prev = s
        accepting.add(prev)
    return Nfa(tuple(alphabet), frozenset(states), frozenset(transitions),
               frozenset({"r"}), frozenset(accepting))


def single_word(word: Word, alphabet: Optional[Iterable[Letter]] = None) -> Nfa:
    return finite_language([word], alphabet)
