"""Counting quasi-morphisms on the surface group."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .words import SurfaceGroup, Word, WordLike, as_word, cyclic_reduce


def count_linear(pattern: Sequence[int], letters: Sequence[int]) -> int:
    """Greedy left-to-right count of non-overlapping occurrences."""
    m, n = len(pattern), len(letters)
    if m == 0 or m > n:
        return 0
    pattern = tuple(pattern)
    letters = tuple(letters)
    count, i = 0, 0
    while i <= n - m:
        if letters[i : i + m] == pattern:
            count += 1
            i += m
        else:
            i += 1
    return count


def count_cyclic(pattern: Sequence[int], letters: Sequence[int]) -> int:
    """Maximum number of non-overlapping occurrences in the cyclic word.

    Taking the maximum over starting occurrences makes the count independent of the
    rotation chosen to represent the cyclic word.
    """
    m, n = len(pattern), len(letters)
    if m == 0 or n == 0 or m > n:
        return 0
    pattern = tuple(pattern)
    ext = tuple(letters) + tuple(letters[: m - 1])
    starts = [i for i in range(n) if ext[i : i + m] == pattern]
    if not starts:
        return 0
    best = 0
    for s0 in starts:
        count, last_end = 0, None
        for s in starts:
            s_rel = (s - s0) % n
            if last_end is not None and s_rel < last_end:
                continue
            if s_rel + m > n:  # would wrap onto the first chosen occurrence
                continue
            count += 1
            last_end = s_rel + m
        best = max(best, count)
    return best


@dataclass(frozen=True)
class HomogenizedValue:
    value: float
    p_used: int
    error_bound: float


class CountingQM:
    """``psi(w) = #pattern - #pattern^-1`` in a reduced representative of ``w``."""

    def __init__(self, pattern: WordLike, group: SurfaceGroup):
        pattern = group.check(as_word(pattern))
        if len(pattern) == 0:
            raise ValueError("pattern must be non-empty")
        u, c = cyclic_reduce(pattern)
        if len(c) or u != pattern:
            raise ValueError(f"pattern {pattern} is not cyclically reduced")
        if pattern == ~pattern:
            raise ValueError("pattern equals its own inverse")
        self.pattern = pattern
        self.group = group
        self._inv = (~pattern).letters

    def __repr__(self) -> str:
        return f"CountingQM({str(self.pattern)!r}, genus={self.group.genus})"

    def representative(self, w: WordLike) -> Word:
        """Dehn-reduced representative chosen so that ``rep(w^-1) = rep(w)^-1``."""
        w = as_word(w)
        r1 = self.group.dehn_reduce(w)
        r2 = ~self.group.dehn_reduce(~w)
        if r1 == r2:
            return r1

        def key(c: Word):
            a, b = c.letters, (~c).letters
            return (len(c), min(a, b), max(a, b), a)

        return min((r1, r2), key=key)

    def count(self, letters: Sequence[int]) -> int:
        return count_linear(self.pattern.letters, letters) - count_linear(self._inv, letters)

    def count_cyclic(self, letters: Sequence[int]) -> int:
        return count_cyclic(self.pattern.letters, letters) - count_cyclic(self._inv, letters)

    def evaluate(self, w: WordLike) -> int:
        return self.count(self.representative(w).letters)

    __call__ = evaluate

    def homogenize(self, w: WordLike, p_max: int = 8) -> HomogenizedValue:
        if p_max < 4 or p_max & (p_max - 1):
            raise ValueError("p_max must be a power of two >= 4")
        u, _ = cyclic_reduce(self.group.check(w))

        def at(p: int) -> float:
            return self.evaluate(u**p) / p

        value = at(p_max)
        return HomogenizedValue(value, p_max, abs(value - at(p_max // 2)))

    def defect_estimate(self, samples: int, max_len: int, seed, min_len: int = 1) -> float:
        """Running max of ``|psi(ww') - psi(w) - psi(w')|`` over random pairs."""
        if samples < 1:
            raise ValueError("samples must be >= 1")
        return float(self.defect_trace(samples, max_len, seed, min_len)[-1])

    def defect_trace(self, samples: int, max_len: int, seed, min_len: int = 1) -> np.ndarray:
        rng = np.random.default_rng(seed)
        out = np.empty(samples)
        best = 0
        for i in range(samples):
            w1 = self.group.random_word(rng, int(rng.integers(min_len, max_len + 1)))
            w2 = self.group.random_word(rng, int(rng.integers(min_len, max_len + 1)))
            best = max(best, abs(self.evaluate(w1 * w2) - self.evaluate(w1) - self.evaluate(w2)))
            out[i] = best
        return out

    def vanishes_on(self, loops: Iterable[WordLike], p_max: int = 8) -> bool:
        loops = list(loops)
        if not loops:
            raise ValueError("loops must be non-empty")
        for g in loops:
            h = self.homogenize(g, p_max)
            if abs(h.value) > h.error_bound:
                return False
        return True


def evaluate(qm: CountingQM, w: WordLike) -> int:
    return qm.evaluate(w)


def homogenize(qm: CountingQM, w: WordLike, p_max: int = 8) -> HomogenizedValue:
    return qm.homogenize(w, p_max)


def defect_estimate(qm: CountingQM, samples: int, max_len: int, seed) -> float:
    return qm.defect_estimate(samples, max_len, seed)


def vanishes_on(qm: CountingQM, loops: Iterable[WordLike], p_max: int = 8) -> bool:
    return qm.vanishes_on(loops, p_max)


def combined_error(*errors: float) -> float:
    return math.sqrt(sum(e * e for e in errors))
