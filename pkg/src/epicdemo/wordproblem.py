"""Semi-decision machinery for the word problem.

A presentation yields an enumerator of its word problem (reduced spellings
of normal-closure elements); a demonstration language yields an enumerator
of witnesses for non-triviality.  Dovetailing the two streams decides
membership in the word problem one free-group comparison at a time, with a
serializable frontier so interrupted runs resume where they left off.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import count
from typing import Callable, Iterator, Mapping, Optional

from .automata import EPSILON, Letter, Nfa, Word, format_word
from .errors import InputContradictionError
from .groups import GroupOracle, paired_letters

IN_WP = "in_wp"
NOT_IN_WP = "not_in_wp"
BUDGET_EXCEEDED = "budget_exceeded"

_INVERSE_SUFFIX = "^-1"


# -- free group arithmetic ----------------------------------------------


def inverse_name(name: str) -> str:
    if name.endswith(_INVERSE_SUFFIX):
        return name[: -len(_INVERSE_SUFFIX)]
    return name + _INVERSE_SUFFIX


def formal_inverse(word: Word) -> Word:
    """Reversed word with every letter replaced by its paired inverse."""
    return tuple(Letter(inverse_name(x.name)) for x in reversed(word))


def free_reduce(word: Word, alphabet: Optional[tuple[Letter, ...]] = None) -> Word:
    """Cancel adjacent inverse pairs until none remain.

    The result is the unique reduced form and does not depend on the
    cancellation order.  When ``alphabet`` is given, every letter and its
    formal inverse must belong to it.
    """
    if alphabet is not None:
        names = {x.name for x in alphabet}
        for x in word:
            if x.name not in names:
                raise ValueError(f"letter {x.name!r} is outside the alphabet")
            if inverse_name(x.name) not in names:
                raise ValueError(f"letter {x.name!r} has no paired inverse in the alphabet")
    stack: list[Letter] = []
    for x in word:
        if stack and stack[-1].name == inverse_name(x.name):
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True)
class Presentation:
    """A finite presentation over positive generator names.

    Relators are stored freely reduced; relators that reduce to the empty
    word are dropped since they add nothing to the normal closure.
    """

    names: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        names = tuple(self.names)
        if not names:
            raise ValueError("presentation needs at least one generator")
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator name")
        for n in names:
            if n.endswith(_INVERSE_SUFFIX):
                raise ValueError(f"generator name {n!r} must not carry an inverse marker")
        object.__setattr__(self, "names", names)
        allowed = paired_letters(names)
        reduced = []
        for r in self.relators:
            r = free_reduce(tuple(r), allowed)
            if r:
                reduced.append(r)
        object.__setattr__(self, "relators", tuple(reduced))

    @cached_property
    def alphabet(self) -> tuple[Letter, ...]:
        return paired_letters(self.names)


# -- enumerators ---------------------------------------------------------


class Enumerator:
    """Deterministic indexed stream of words.

    The i-th emission is a function of i alone, so independently built
    copies agree index by index; certificates that cite indices stay
    replayable.  Finite streams report ``None`` past the end.
    """

    def __init__(self, factory: Callable[[], Iterator[Word]], finite: bool = False):
        self._factory = factory
        self._iter = factory()
        self._cache: list[Word] = []
        self._dry = False
        self._cursor = 0
        self.finite = finite

    def get(self, i: int) -> Optional[Word]:
        if i < 0:
            raise IndexError(i)
        while len(self._cache) <= i and not self._dry:
            try:
                self._cache.append(next(self._iter))
            except StopIteration:
                if not self.finite:
                    raise RuntimeError("enumerator declared total but its stream ended")
                self._dry = True
        if i < len(self._cache):
            return self._cache[i]
        return None

    def next(self) -> Optional[tuple[int, Word]]:
        word = self.get(self._cursor)
        if word is None:
            return None
        pair = (self._cursor, word)
        self._cursor += 1
        return pair

    def restart(self) -> None:
        self._cursor = 0


def normal_closure_enumerator(p: Presentation) -> Enumerator:
    """Reduced spellings of normal-closure elements, dovetailed by size.

    Products prod u_i r_i^(+-1) u_i^-1 are visited by increasing total
    size m + sum |u_i| + sum |r_i|, then by factor count, then factorwise
    by (relator index, sign, conjugator) with conjugators in length-lex
    order.  Every element of the closure appears at some index; duplicate
    spellings are permitted.  The empty product puts the empty word at
    index 0.
    """
    if not p.relators:
        return Enumerator(lambda: iter([EPSILON]), finite=True)
    alphabet = p.alphabet
    relators = p.relators
    inverses = tuple(formal_inverse(r) for r in relators)
    min_cost = 1 + min(len(r) for r in relators)

    def reduced_of_length(n: int) -> Iterator[Word]:
        prefix: list[Letter] = []

        def extend(k: int) -> Iterator[Word]:
            if k == 0:
                yield tuple(prefix)
                return
            for x in alphabet:
                if prefix and prefix[-1].name == inverse_name(x.name):
                    continue
                prefix.append(x)
                yield from extend(k - 1)
                prefix.pop()

        yield from extend(n)

    def factor_sequences(total: int, m: int) -> Iterator[tuple]:
        if m == 0:
            if total == 0:
                yield ()
            return
        tail_min = (m - 1) * min_cost
        for ri, r in enumerate(relators):
            head = 1 + len(r)
            room = total - head - tail_min
            if room < 0:
                continue
            for sign in (1, -1):
                for u_len in range(room + 1):
                    for u in reduced_of_length(u_len):
                        for rest in factor_sequences(total - head - u_len, m - 1):
                            yield ((ri, sign, u),) + rest

    def stream() -> Iterator[Word]:
        yield EPSILON
        for total in count(min_cost):
            for m in range(1, total // min_cost + 1):
                for factors in factor_sequences(total, m):
                    spelled: list[Letter] = []
                    for (ri, sign, u) in factors:
                        spelled.extend(u)
                        spelled.extend(relators[ri] if sign == 1 else inverses[ri])
                        spelled.extend(formal_inverse(u))
                    yield free_reduce(tuple(spelled))

    return Enumerator(stream)


def _has_pumpable_cycle(a: Nfa) -> bool:
    """True when some accepting run revisits a state with a letter between."""
    forward: dict = {}
    for (pp, _label, qq) in a.transitions:
        forward.setdefault(pp, []).append(qq)

    def reach(starts):
        seen = set(starts)
        stack = list(starts)
        while stack:
            s = stack.pop()
            for t in forward.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    reachable = reach(a.initials)
    productive = set(a._letters_to_accept)
    useful = reachable & productive
    for (pp, label, qq) in a.transitions:
        if label is None or pp not in useful or qq not in useful:
            continue
        if pp in reach([qq]):
            return True
    return False


def language_enumerator(a: Nfa) -> Enumerator:
    """Accepted words in length-lex order, with finiteness detected.

    The language is infinite exactly when a useful state lies on a cycle
    through a letter edge; otherwise every word is shorter than the state
    count and the stream is declared finite.
    """
    if not _has_pumpable_cycle(a):
        words = a.enumerate_words(len(a.states))
        return Enumerator(lambda: iter(words), finite=True)

    def stream() -> Iterator[Word]:
        productive = a._letters_to_accept
        start = a.start_subset()
        if start & a.accepting:
            yield EPSILON
        frontier: list[tuple[Word, frozenset]] = [(EPSILON, start)]
        while frontier:
            nxt: list[tuple[Word, frozenset]] = []
            for word, subset in frontier:
                for x in a.alphabet:
                    subset2 = a.step(subset, x)
                    if not subset2 or not any(s in productive for s in subset2):
                        continue
                    word2 = word + (x,)
                    if subset2 & a.accepting:
                        yield word2
                    nxt.append((word2, subset2))
            frontier = nxt

    return Enumerator(stream)


def demonstration_enumerator(demo) -> Enumerator:
    """Oracle-alphabet spellings of a demonstration language.

    Emission order follows the language words length-lex; each is pushed
    through the demonstration's evaluation map before comparison in the
    free group.
    """
    inner = language_enumerator(demo.language)

    def stream() -> Iterator[Word]:
        for i in count():
            w = inner.get(i)
            if w is None:
                return
            yield demo.oracle_word(w)

    return Enumerator(stream, finite=inner.finite)


def coword_demo_from_wp(oracle: GroupOracle) -> Enumerator:
    """All non-identity words over the oracle alphabet, length-lex.

    Filtration against a terminating identity test: every word is
    generated and the identity words are dropped, leaving a stream whose
    evaluation image is exactly the non-identity elements.
    """
    alphabet = oracle.alphabet

    def stream() -> Iterator[Word]:
        level: list[Word] = [EPSILON]
        while True:
            nxt: list[Word] = []
            for w in level:
                for x in alphabet:
                    w2 = w + (x,)
                    nxt.append(w2)
                    if not oracle.is_identity(w2):
                        yield w2
            level = nxt

    return Enumerator(stream)


# -- the decision loop ---------------------------------------------------


@dataclass
class Frontier:
    """Checkpoint between comparisons; JSON round-trips for resumption."""

    word: str
    iteration: int = 0
    cursor: int = 0
    pending: list = field(default_factory=list)
    comparisons: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "word": self.word,
                "iteration": self.iteration,
                "cursor": self.cursor,
                "pending": self.pending,
                "comparisons": self.comparisons,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "Frontier":
        raw = json.loads(text)
        return Frontier(
            word=raw["word"],
            iteration=int(raw["iteration"]),
            cursor=int(raw["cursor"]),
            pending=list(raw["pending"]),
            comparisons=int(raw["comparisons"]),
        )


@dataclass(frozen=True)
class WpVerdict:
    """Outcome of a decision run.

    ``stalled`` marks budget verdicts where both streams ended, so no
    amount of extra budget can settle the word.
    """

    kind: str
    certificate: Optional[dict]
    frontier: Optional[Frontier]
    comparisons: int
    stalled: bool = False


def decide_word(
    word: Word,
    language: Enumerator,
    closure: Enumerator,
    budget: int,
    frontier: Optional[Frontier] = None,
) -> WpVerdict:
    """Dovetail a demonstration stream against a word-problem stream.

    Iteration i performs, in order: one comparison of the i-th closure
    word against the reduced input, then one comparison per new index
    pair (j, k) with max(j, k) = i, scanned in lexicographic (j, k)
    order, where j indexes the language stream and k the closure stream.
    A hit does not cut the iteration short; if both directions hit within
    one iteration the inputs contradict each other and the run raises
    InputContradictionError instead of picking a side.

    The budget counts comparisons.  When it runs out the verdict carries
    a frontier; passing that frontier back in resumes mid-iteration.
    Certificates cite stream indices and words, so they can be replayed
    against freshly built enumerators.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    target = free_reduce(tuple(word))
    target_text = format_word(target)
    if frontier is None:
        frontier = Frontier(word=target_text)
    elif frontier.word != target_text:
        raise ValueError(
            f"frontier was recorded for {frontier.word!r}, not {target_text!r}")
    inverse_target = formal_inverse(target)

    spent = 0
    i = frontier.iteration
    cursor = frontier.cursor
    pending = [dict(c) for c in frontier.pending]
    total = frontier.comparisons

    def checkpoint() -> Frontier:
        return Frontier(word=target_text, iteration=i, cursor=cursor,
                        pending=[dict(c) for c in pending], comparisons=total)

    while True:
        positions = 2 * i + 2
        performed = False
        while cursor < positions:
            if cursor == 0:
                gw = closure.get(i)
                if gw is None:
                    cursor += 1
                    continue
                left = free_reduce(gw)
                right = target
                certificate = {"kind": IN_WP, "index": i,
                               "closure_word": format_word(gw)}
            else:
                t = cursor - 1
                j, k = (t, i) if t < i else (i, t - i)
                fw = language.get(j)
                gw = closure.get(k)
                if fw is None or gw is None:
                    cursor += 1
                    continue
                left = free_reduce(fw + inverse_target)
                right = free_reduce(gw)
                certificate = {"kind": NOT_IN_WP,
                               "language_index": j, "closure_index": k,
                               "language_word": format_word(fw),
                               "closure_word": format_word(gw)}
            if spent >= budget:
                return WpVerdict(BUDGET_EXCEEDED, None, checkpoint(), total)
            spent += 1
            total += 1
            performed = True
            if left == right:
                pending.append(certificate)
            cursor += 1
        if pending:
            hits_in = [c for c in pending if c["kind"] == IN_WP]
            hits_out = [c for c in pending if c["kind"] == NOT_IN_WP]
            if hits_in and hits_out:
                raise InputContradictionError(
                    "streams certify both membership and non-membership for "
                    f"{target_text!r}: {hits_in[0]} versus {hits_out[0]}; "
                    "the language stream meets the word problem, so the "
                    "inputs do not describe the same group")
            winner = pending[0]
            return WpVerdict(winner["kind"], winner, None, total)
        stalled = not performed and closure.get(i) is None and language.get(i) is None
        i += 1
        cursor = 0
        if stalled:
            return WpVerdict(BUDGET_EXCEEDED, None, checkpoint(), total, stalled=True)


def replay(word: Word, language: Enumerator, closure: Enumerator,
           certificate: Mapping) -> bool:
    """Recheck a decide_word certificate against fresh streams."""
    target = free_reduce(tuple(word))
    kind = certificate["kind"]
    if kind == IN_WP:
        gw = closure.get(int(certificate["index"]))
        if gw is None or format_word(gw) != certificate["closure_word"]:
            return False
        return free_reduce(gw) == target
    if kind == NOT_IN_WP:
        fw = language.get(int(certificate["language_index"]))
        gw = closure.get(int(certificate["closure_index"]))
        if fw is None or gw is None:
            return False
        if format_word(fw) != certificate["language_word"]:
            return False
        if format_word(gw) != certificate["closure_word"]:
            return False
        return free_reduce(fw + formal_inverse(target)) == free_reduce(gw)
    raise ValueError(f"certificate kind {kind!r} is not replayable")
