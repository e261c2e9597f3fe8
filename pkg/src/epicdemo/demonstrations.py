"""Demonstrations: languages that hit every non-identity element and never
the identity.

A demonstration bundles a group oracle, a regular language, and an
evaluation map sending each language letter to a word over the oracle
alphabet.  Verification is bounded: identity avoidance is checked on all
accepted words up to a length, coverage is checked against a ball of
group elements.  Coverage gaps are reported, not guessed about; whether a
gap is fatal depends on the caller (finite groups can be swept totally,
infinite ones cannot).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .automata import EPSILON, Letter, Nfa, Word, check_alphabet, finite_language, \
    concat, subtract_word, union
from .groups import ElementKey, FreeAbelianOracle, FreeGroupOracle, GroupOracle, \
    PermutationOracle, _GEN_NAMES


def identity_eval_map(alphabet: Iterable[Letter]) -> dict[Letter, Word]:
    return {x: (x,) for x in alphabet}


@dataclass
class Demonstration:
    """A language over letters that evaluate into a group oracle."""

    oracle: GroupOracle
    eval_map: dict[Letter, Word]
    language: Nfa

    def __post_init__(self):
        lang_names = {x.name for x in self.language.alphabet}
        map_names = {x.name for x in self.eval_map}
        if lang_names != map_names:
            raise ValueError(
                f"evaluation map covers {sorted(map_names)} but the language "
                f"alphabet is {sorted(lang_names)}")
        oracle_names = {x.name for x in self.oracle.alphabet}
        for x, image in self.eval_map.items():
            for y in image:
                if y.name not in oracle_names:
                    raise ValueError(
                        f"letter {x.name!r} evaluates through {y.name!r} "
                        f"which the oracle does not know")

    def oracle_word(self, word: Word) -> Word:
        out: Word = EPSILON
        for x in word:
            try:
                out = out + self.eval_map[x]
            except KeyError:
                raise ValueError(f"letter {x.name!r} has no evaluation") from None
        return out

    def evaluate(self, word: Word) -> ElementKey:
        return self.oracle.evaluate(self.oracle_word(word))

    def verify_no_identity(self, max_len: int) -> list[Word]:
        """Accepted words up to ``max_len`` that evaluate to the identity."""
        return [w for w in self.language.enumerate_words(max_len)
                if self.oracle.is_identity(self.oracle_word(w))]

    def verify_coverage(self, radius: int, search_len: int) -> "CoverageReport":
        """Compare accepted words against a ball of group elements.

        Every non-identity element within ``radius`` must be the value of
        some accepted word of length at most ``search_len`` to count as
        covered.  The first witness in enumeration order (length-lex) is
        recorded per element.
        """
        ball = self.oracle.ball(radius)
        identity = self.oracle.identity_key
        targets = set(ball) - {identity}
        covered: dict[ElementKey, Word] = {}
        violations: list[Word] = []
        for w in self.language.enumerate_words(search_len):
            key = self.evaluate(w)
            if key == identity:
                violations.append(w)
            elif key in targets and key not in covered:
                covered[key] = w
        return CoverageReport(
            radius=radius,
            search_len=search_len,
            covered=covered,
            missing=frozenset(targets - covered.keys()),
            identity_violations=tuple(violations),
        )


@dataclass(frozen=True)
class CoverageReport:
    radius: int
    search_len: int
    covered: dict
    missing: frozenset
    identity_violations: tuple

    @property
    def clean(self) -> bool:
        """No accepted word evaluated to the identity."""
        return not self.identity_violations

    @property
    def complete(self) -> bool:
        """Every non-identity element of the ball was hit."""
        return not self.missing

    def sorted_covered(self) -> list:
        return sorted(self.covered.items())

    def sorted_missing(self) -> list:
        return sorted(self.missing)


# -- builtin demonstrations ---------------------------------------------


def z_demo(name: str = "a") -> Demonstration:
    """Positive powers and negative powers of one generator of Z."""
    pos, neg = Letter(name), Letter(name + "^-1")
    oracle = FreeAbelianOracle(1, {pos: (1,), neg: (-1,)})
    language = Nfa(
        alphabet=(pos, neg),
        states=frozenset({"s", "p", "n"}),
        transitions=frozenset({
            ("s", pos, "p"), ("p", pos, "p"),
            ("s", neg, "n"), ("n", neg, "n"),
        }),
        initials=frozenset({"s"}),
        accepting=frozenset({"p", "n"}),
    )
    return Demonstration(oracle, identity_eval_map((pos, neg)), language)


def finite_demo(oracle: GroupOracle) -> Demonstration:
    """Length-one words over letters for every non-identity element."""
    for x in oracle.alphabet:
        if oracle.is_identity((x,)):
            raise ValueError(f"letter {x.name!r} evaluates to the identity")
    language = finite_language([(x,) for x in oracle.alphabet], oracle.alphabet)
    return Demonstration(oracle, identity_eval_map(oracle.alphabet), language)


def free_demo(rank: int) -> Demonstration:
    """All non-empty freely reduced words over a free group's alphabet."""
    oracle = FreeGroupOracle(rank)
    letters = oracle.alphabet
    states: set = {"s"} | {("l", i) for i in range(len(letters))}
    transitions = set()
    for i, x in enumerate(letters):
        transitions.add(("s", x, ("l", i)))
        for j, y in enumerate(letters):
            if i ^ 1 != j:  # never follow a letter with its inverse
                transitions.add((("l", i), y, ("l", j)))
    language = Nfa(letters, frozenset(states), frozenset(transitions),
                   frozenset({"s"}), frozenset(("l", i) for i in range(len(letters))))
    return Demonstration(oracle, identity_eval_map(letters), language)


def zk_demo(rank: int, names: Optional[Iterable[str]] = None) -> Demonstration:
    """Sign-consistent generator blocks in a fixed order, empty word removed.

    Every element (n_1, ..., n_k) has the witness g_1^{n_1} ... g_k^{n_k}
    written with the matching sign, whose length is the l1 norm.
    """
    if rank < 1:
        raise ValueError("rank must be positive")
    if names is None:
        if rank > len(_GEN_NAMES):
            raise ValueError(f"rank {rank} too large for default generator names")
        names = _GEN_NAMES[:rank]
    names = list(names)
    if len(names) != rank:
        raise ValueError("need exactly one generator name per coordinate")
    gens: dict[Letter, tuple] = {}
    blocks = []
    for i in range(rank):
        name = names[i]
        pos, neg = Letter(name), Letter(name + "^-1")
        vec = tuple(1 if j == i else 0 for j in range(rank))
        gens[pos] = vec
        gens[neg] = tuple(-c for c in vec)
        block = union(z_demo(name).language, finite_language([EPSILON]))
        blocks.append(block)
    language = blocks[0]
    for block in blocks[1:]:
        language = concat(language, block)
    language = subtract_word(language, EPSILON)
    oracle = FreeAbelianOracle(rank, gens)
    return Demonstration(oracle, identity_eval_map(oracle.alphabet), language)


_BUILTIN_RE = re.compile(r"^(z|finite|free\((\d+)\)|zk\((\d+)\))$")


def builtin_demo(kind: str, oracle: Optional[GroupOracle] = None) -> Demonstration:
    """Dispatch on a textual description: z, finite, free(k) or zk(k).

    ``finite`` needs an oracle whose letters enumerate the non-identity
    elements; the other kinds build their own oracle.
    """
    m = _BUILTIN_RE.match(kind.strip().lower())
    if not m:
        raise ValueError(f"unknown builtin demonstration {kind!r}")
    spec = m.group(1)
    if spec == "z":
        return z_demo()
    if spec == "finite":
        if oracle is None:
            raise ValueError("builtin 'finite' needs a group oracle")
        return finite_demo(oracle)
    if spec.startswith("free"):
        return free_demo(int(m.group(2)))
    return zk_demo(int(m.group(3)))
