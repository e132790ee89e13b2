"""Words in the surface group and Dehn's algorithm.

Letters are nonzero ints: generator ``a_j`` is ``2j-1``, ``b_j`` is ``2j`` and the
inverse of a letter is its negation.  The text format is whitespace separated tokens,
lowercase for generators (``a1``, ``b2``) and uppercase for inverses (``A1``, ``B2``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

_TOKEN = re.compile(r"^([abAB])([1-9][0-9]*)$")


class WordFormatError(ValueError):
    pass


def letter_from_token(token: str) -> int:
    m = _TOKEN.match(token)
    if m is None:
        raise WordFormatError(f"bad letter token {token!r}")
    kind, idx = m.group(1), int(m.group(2))
    gen = 2 * idx - 1 if kind.lower() == "a" else 2 * idx
    return gen if kind.islower() else -gen


def letter_to_token(letter: int) -> str:
    if letter == 0:
        raise WordFormatError("0 is not a letter")
    gen = abs(letter)
    kind = "a" if gen % 2 == 1 else "b"
    token = f"{kind}{(gen + 1) // 2}"
    return token if letter > 0 else token.upper()


@dataclass(frozen=True)
class Word:
    """An element of the free group on ``a1, b1, ..., ag, bg`` as a letter tuple."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if any(x == 0 for x in self.letters):
            raise WordFormatError("0 is not a letter")

    @classmethod
    def parse(cls, text: str) -> "Word":
        return cls(tuple(letter_from_token(tok) for tok in text.split()))

    def __str__(self) -> str:
        return " ".join(letter_to_token(x) for x in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item])
        return self.letters[item]

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + as_word(other).letters)

    def __invert__(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)))

    def inverse(self) -> "Word":
        return ~self

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** (-n)
        return Word(self.letters * n)

    @property
    def is_freely_reduced(self) -> bool:
        return all(x != -y for x, y in zip(self.letters, self.letters[1:]))

    @property
    def max_generator(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def to_json(self) -> list[str]:
        return [letter_to_token(x) for x in self.letters]


WordLike = Union[Word, str, Sequence[int]]

EMPTY = Word()


def as_word(w: WordLike) -> Word:
    if isinstance(w, Word):
        return w
    if isinstance(w, str):
        return Word.parse(w)
    return Word(tuple(w))


def free_reduce(w: WordLike) -> Word:
    stack: list[int] = []
    for x in as_word(w).letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(tuple(stack))


def cyclic_reduce(w: WordLike) -> tuple[Word, Word]:
    """Return ``(u, c)`` with ``w = c u c^-1`` and ``u`` cyclically reduced."""
    letters = free_reduce(w).letters
    i, j = 0, len(letters)
    while j - i >= 2 and letters[i] == -letters[j - 1]:
        i += 1
        j -= 1
    return Word(letters[i:j]), Word(letters[:i])


def min_rotation(letters: Sequence[int]) -> tuple[int, ...]:
    t = tuple(letters)
    if not t:
        return t
    return min(t[i:] + t[:i] for i in range(len(t)))


def _common_prefix(a: Sequence[int], start: int, b: Sequence[int], cap: int) -> int:
    m = 0
    n = min(len(a) - start, len(b), cap)
    while m < n and a[start + m] == b[m]:
        m += 1
    return m


class SurfaceGroup:
    """The one-relator group ``<a_i, b_i | prod [a_i, b_i]>`` of a closed genus-g surface."""

    def __init__(self, genus: int):
        if genus < 2:
            raise ValueError("genus must be >= 2")
        self.genus = genus
        rel: list[int] = []
        for j in range(1, genus + 1):
            a, b = 2 * j - 1, 2 * j
            rel += [a, b, -a, -b]
        self.relator = Word(tuple(rel))
        n = len(rel)
        # every signed letter occurs exactly once in the relator and once in its inverse
        self._rotations: dict[int, list[tuple[int, ...]]] = {}
        for base in (self.relator.letters, (~self.relator).letters):
            for i in range(n):
                rot = base[i:] + base[:i]
                self._rotations.setdefault(rot[0], []).append(rot)

    @property
    def rank(self) -> int:
        return 2 * self.genus

    def check(self, w: WordLike) -> Word:
        w = as_word(w)
        if w.max_generator > self.rank:
            raise WordFormatError(f"word {w} uses generators beyond genus {self.genus}")
        return w

    def _longest_match(self, letters: Sequence[int], i: int, cap: int):
        best, best_rot = 0, None
        for rot in self._rotations.get(letters[i], ()):
            m = _common_prefix(letters, i, rot, cap)
            if m > best:
                best, best_rot = m, rot
        return best, best_rot

    def dehn_reduce(self, w: WordLike) -> Word:
        """Greedy Dehn reduction: replace more than half of a relator by the shorter rest."""
        half = 2 * self.genus
        letters = list(free_reduce(self.check(w)).letters)
        changed = True
        while changed:
            changed = False
            for i in range(len(letters)):
                m, rot = self._longest_match(letters, i, 4 * self.genus)
                if m > half:
                    replacement = [-x for x in reversed(rot[m:])]
                    letters[i : i + m] = replacement
                    letters = list(free_reduce(letters).letters)
                    changed = True
                    break
        return Word(tuple(letters))

    def cyclic_dehn_reduce(self, w: WordLike) -> Word:
        """Dehn reduction on the cyclic word; the result is a conjugate of ``w``."""
        half = 2 * self.genus
        u, _ = cyclic_reduce(self.dehn_reduce(w))
        letters = list(u.letters)
        changed = True
        while changed and len(letters) > half:
            changed = False
            n = len(letters)
            for i in range(n):
                rotated = letters[i:] + letters[:i]
                m, rot = self._longest_match(rotated, 0, n)
                if m > half:
                    rotated[:m] = [-x for x in reversed(rot[m:])]
                    u, _ = cyclic_reduce(self.dehn_reduce(rotated))
                    letters = list(u.letters)
                    changed = True
                    break
        return Word(tuple(letters))

    def reduce(self, w: WordLike) -> Word:
        return self.dehn_reduce(w)

    def word_length(self, w: WordLike) -> int:
        return len(self.dehn_reduce(w))

    def is_trivial(self, w: WordLike) -> bool:
        return len(self.dehn_reduce(w)) == 0

    def _half_swaps(self, letters: list[int]):
        half = 2 * self.genus
        n = len(letters)
        for i in range(n):
            rotated = letters[i:] + letters[:i]
            for rot in self._rotations.get(rotated[0], ()):
                if _common_prefix(rotated, 0, rot, half) == half:
                    yield [-x for x in reversed(rot[half:])] + rotated[half:]

    def cyclic_normal_form(self, w: WordLike, max_states: int = 5000) -> Word:
        """Shortest, then lexicographically least, rotation reachable from the cyclic
        Dehn form by trading exactly half a relator for the other half.

        Used as a conjugacy-class key; it is a heuristic canonical form, not a full
        solution of the conjugacy problem (the search is capped at ``max_states``).
        """
        start = min_rotation(self.cyclic_dehn_reduce(w).letters)
        seen = {start}
        frontier = [start]
        while frontier and len(seen) < max_states:
            u = frontier.pop()
            for v in self._half_swaps(list(u)):
                v = min_rotation(self.cyclic_dehn_reduce(v).letters)
                if len(v) < len(start):
                    start = v
                    seen = {v}
                    frontier = [v]
                    break
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        best = min((s for s in seen if len(s) == len(start)), key=lambda s: s)
        return Word(best)

    def conjugacy_key(self, w: WordLike) -> str:
        return str(self.cyclic_normal_form(w))

    def random_word(self, rng: np.random.Generator, length: int) -> Word:
        gens = rng.integers(1, self.rank + 1, size=length)
        signs = rng.choice((-1, 1), size=length)
        return Word(tuple(int(x) for x in gens * signs))

    def letters(self) -> list[int]:
        return [s * i for i in range(1, self.rank + 1) for s in (1, -1)]


def concat(words: Iterable[WordLike]) -> Word:
    out: list[int] = []
    for w in words:
        out.extend(as_word(w).letters)
    return Word(tuple(out))
