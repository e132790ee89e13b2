"""High-precision matrix oracle for the word problem.

Generators are rebuilt in mpmath from the closed-form vertex radius
``cosh R = cot(pi/n)^2`` (not the bisection used by ``geometry``) so that products of
long words can be compared with the identity without float64 round-off.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath as mp

from .geometry import _partner, _side_letter
from .words import WordLike, as_word

DPS = 40


@lru_cache(maxsize=None)
def mp_generators(genus: int, dps: int = DPS) -> dict[int, mp.matrix]:
    n = 4 * genus
    with mp.workdps(dps):
        cosh_r = mp.cot(mp.pi / n) ** 2
        r = mp.sqrt((cosh_r - 1) / (cosh_r + 1))
        dist = (r * r + 1) / (2 * r * mp.cos(mp.pi / n))
        gens = {}
        for k in range(n):
            kp = _partner(k)
            c = dist * mp.expj(2 * mp.pi * k / n)
            e = mp.expj(-mp.pi * (k + kp) / n * 2)
            u = mp.matrix([[c * e, -1], [e, -mp.conj(c)]])
            u = u / mp.sqrt(mp.det(u))
            gens[_side_letter(k)] = u
        return gens


def word_matrix(w: WordLike, genus: int, dps: int = DPS) -> mp.matrix:
    gens = mp_generators(genus, dps)
    with mp.workdps(dps):
        m = mp.eye(2)
        for x in as_word(w).letters:
            m = m * gens[x]
        return m


def identity_error(w: WordLike, genus: int, dps: int = DPS) -> float:
    """``min(|M - I|, |M + I|)`` in the max norm for the disk matrix of ``w``."""
    m = word_matrix(w, genus, dps)
    with mp.workdps(dps):
        plus = max(abs(m[i, j] - (1 if i == j else 0)) for i in range(2) for j in range(2))
        minus = max(abs(m[i, j] + (1 if i == j else 0)) for i in range(2) for j in range(2))
        return float(min(plus, minus))


def oracle_is_trivial(w: WordLike, genus: int, tol: float = 1e-6) -> bool:
    return identity_error(w, genus) <= tol
