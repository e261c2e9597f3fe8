"""Group oracles: finite descriptions of groups that can evaluate words.

An oracle owns an ordered monoid generating alphabet and maps words over
it to canonical element keys.  Keys embed a backend tag (including degree
or rank) so keys from different oracles never collide.  Equality of keys
is equality of group elements; nothing else about the group is assumed.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .automata import EPSILON, Letter, Word, check_alphabet


@dataclass(frozen=True, order=True)
class ElementKey:
    backend: str
    data: bytes

    def render(self) -> str:
        return f"{self.backend}[{self.data.decode('ascii')}]"

    def __repr__(self):
        return f"ElementKey({self.render()})"


class GroupOracle(ABC):
    """Evaluates words over a fixed generating alphabet to element keys."""

    alphabet: tuple[Letter, ...]

    @property
    @abstractmethod
    def backend(self) -> str:
        """Tag embedded in every key, unique per group description."""

    @abstractmethod
    def evaluate(self, word: Word) -> ElementKey:
        """Canonical key of the element the word multiplies out to."""

    @property
    @abstractmethod
    def identity_key(self) -> ElementKey:
        ...

    def _key(self, data: str) -> ElementKey:
        return ElementKey(self.backend, data.encode("ascii"))

    def is_identity(self, word: Word) -> bool:
        return self.evaluate(word) == self.identity_key

    def ball(self, radius: int) -> dict[ElementKey, Word]:
        """Shortest witness per element within ``radius`` letters.

        Breadth-first over elements; among witnesses of minimal length the
        length-lex least (alphabet declaration order) is kept.
        """
        out: dict[ElementKey, Word] = {self.identity_key: EPSILON}
        frontier: list[Word] = [EPSILON]
        for _ in range(radius):
            nxt: list[Word] = []
            for w in frontier:
                for x in self.alphabet:
                    w2 = w + (x,)
                    key = self.evaluate(w2)
                    if key not in out:
                        out[key] = w2
                        nxt.append(w2)
            frontier = nxt
        return out

    def inverse_letter(self, letter: Letter) -> Letter:
        """First letter in declaration order inverting ``letter``.

        Raises ValueError when the alphabet is not inverse-closed at this
        letter.
        """
        cache = getattr(self, "_inverse_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(self, "_inverse_cache", cache)
        if letter in cache:
            return cache[letter]
        for y in self.alphabet:
            if self.is_identity((letter, y)) and self.is_identity((y, letter)):
                cache[letter] = y
                return y
        raise ValueError(f"alphabet has no inverse for letter {letter.name!r}")

    def inverse_word(self, word: Word) -> Word:
        return tuple(self.inverse_letter(x) for x in reversed(word))

    def _check_word(self, word: Word):
        names = {x.name for x in self.alphabet}
        for x in word:
            if x.name not in names:
                raise ValueError(f"letter {x.name!r} is not in the oracle alphabet")


# -- permutations --------------------------------------------------------


def perm_from_cycles(cycles: Iterable[Iterable[int]], degree: int) -> tuple[int, ...]:
    """Build an image tuple (0-based) from 1-based cycles."""
    images = list(range(degree))
    for cycle in cycles:
        pts = [p - 1 for p in cycle]
        if any(p < 0 or p >= degree for p in pts):
            raise ValueError(f"cycle point out of range for degree {degree}: {cycle}")
        if len(set(pts)) != len(pts):
            raise ValueError(f"repeated point in cycle {cycle}")
        for i, p in enumerate(pts):
            images[p] = pts[(i + 1) % len(pts)]
    return tuple(images)


def cycles_from_perm(perm: tuple[int, ...]) -> list[list[int]]:
    """Disjoint cycles (1-based, fixed points omitted), smallest point first."""
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        p = perm[start]
        while p != start:
            cycle.append(p)
            seen.add(p)
            p = perm[p]
        cycles.append([q + 1 for q in cycle])
    return cycles


@dataclass(eq=True)
class PermutationOracle(GroupOracle):
    """Subgroup of the symmetric group given by generator images.

    Generators are image tuples (0-based).  Words compose left to right:
    the first letter acts first.
    """

    degree: int
    gens: dict[Letter, tuple[int, ...]]

    def __post_init__(self):
        self.alphabet = check_alphabet(self.gens.keys())
        if self.degree < 1:
            raise ValueError("degree must be positive")
        for x, images in self.gens.items():
            if sorted(images) != list(range(self.degree)):
                raise ValueError(f"generator {x.name!r} is not a permutation of degree {self.degree}")

    @property
    def backend(self) -> str:
        return f"perm{self.degree}"

    @property
    def identity_key(self) -> ElementKey:
        return self._key(",".join(str(i + 1) for i in range(self.degree)))

    def permutation(self, word: Word) -> tuple[int, ...]:
        self._check_word(word)
        images = list(range(self.degree))
        for x in word:
            g = self.gens[x]
            images = [g[i] for i in images]
        return tuple(images)

    def evaluate(self, word: Word) -> ElementKey:
        return self._key(",".join(str(i + 1) for i in self.permutation(word)))


# -- free abelian --------------------------------------------------------


@dataclass(eq=True)
class FreeAbelianOracle(GroupOracle):
    """Z^rank with integer-vector generators."""

    rank: int
    gens: dict[Letter, tuple[int, ...]]

    def __post_init__(self):
        self.alphabet = check_alphabet(self.gens.keys())
        if self.rank < 1:
            raise ValueError("rank must be positive")
        for x, vec in self.gens.items():
            if len(vec) != self.rank:
                raise ValueError(f"generator {x.name!r} has length {len(vec)}, rank is {self.rank}")

    @property
    def backend(self) -> str:
        return f"zk{self.rank}"

    @property
    def identity_key(self) -> ElementKey:
        return self._key(",".join(["0"] * self.rank))

    def vector(self, word: Word) -> tuple[int, ...]:
        self._check_word(word)
        total = [0] * self.rank
        for x in word:
            vec = self.gens[x]
            for i in range(self.rank):
                total[i] += vec[i]
        return tuple(total)

    def evaluate(self, word: Word) -> ElementKey:
        return self._key(",".join(str(c) for c in self.vector(word)))


# -- free groups ---------------------------------------------------------

_GEN_NAMES = "abcdefghijklmnopqrstuvwxyz"


def paired_letters(names: Iterable[str]) -> tuple[Letter, ...]:
    """Interleave each name with its formal inverse ``name^-1``."""
    out = []
    for n in names:
        out.append(Letter(n))
        out.append(Letter(n + "^-1"))
    return check_alphabet(out)


@dataclass(eq=True)
class FreeGroupOracle(GroupOracle):
    """Free group of the given rank; keys are freely reduced words.

    The alphabet interleaves generators with their inverses
    (a, a^-1, b, b^-1, ...).  Custom generator names may be supplied.
    """

    rank: int
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.names is None:
            if self.rank > len(_GEN_NAMES):
                raise ValueError(f"rank {self.rank} needs explicit generator names")
            self.names = tuple(_GEN_NAMES[: self.rank])
        if len(self.names) != self.rank:
            raise ValueError("need exactly one name per generator")
        self.alphabet = paired_letters(self.names)
        # letter index pairing: 2i <-> 2i+1
        self._index = {x: i for i, x in enumerate(self.alphabet)}

    @property
    def backend(self) -> str:
        return f"free{self.rank}"

    @property
    def identity_key(self) -> ElementKey:
        return self._key("")

    def reduced(self, word: Word) -> Word:
        self._check_word(word)
        stack: list[Letter] = []
        for x in word:
            if stack and self._index[stack[-1]] ^ 1 == self._index[x]:
                stack.pop()
            else:
                stack.append(x)
        return tuple(stack)

    def evaluate(self, word: Word) -> ElementKey:
        return self._key(" ".join(x.name for x in self.reduced(word)))


# -- integer matrices ----------------------------------------------------

Matrix = tuple[tuple[int, ...], ...]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n))


def mat_det(m: Matrix) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    sign = 1
    for j in range(n):
        minor = tuple(row[:j] + row[j + 1:] for row in m[1:])
        total += sign * m[0][j] * mat_det(minor)
        sign = -sign
    return total


def identity_matrix(dim: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim))


@dataclass(eq=True)
class IntegerMatrixOracle(GroupOracle):
    """Matrix group over the integers; exact arithmetic, no floats.

    Every generator must have determinant +1 or -1 so that inverses stay
    integral.
    """

    dim: int
    gens: dict[Letter, Matrix]

    def __post_init__(self):
        self.alphabet = check_alphabet(self.gens.keys())
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        for x, m in self.gens.items():
            if len(m) != self.dim or any(len(row) != self.dim for row in m):
                raise ValueError(f"generator {x.name!r} is not {self.dim}x{self.dim}")
            if not all(isinstance(e, int) for row in m for e in row):
                raise ValueError(f"generator {x.name!r} has non-integer entries")
            if mat_det(m) not in (1, -1):
                raise ValueError(f"generator {x.name!r} has determinant {mat_det(m)}, need +-1")

    @property
    def backend(self) -> str:
        return f"mat{self.dim}"

    def _render(self, m: Matrix) -> str:
        return ";".join(",".join(str(e) for e in row) for row in m)

    @property
    def identity_key(self) -> ElementKey:
        return self._key(self._render(identity_matrix(self.dim)))

    def matrix(self, word: Word) -> Matrix:
        self._check_word(word)
        m = identity_matrix(self.dim)
        for x in word:
            m = mat_mul(m, self.gens[x])
        return m

    def evaluate(self, word: Word) -> ElementKey:
        return self._key(self._render(self.matrix(word)))
