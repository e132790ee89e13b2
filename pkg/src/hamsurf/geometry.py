"""Poincare-disk model of the genus-g surface and its regular 4g-gon tiling.

Points are complex numbers ``x + iy`` with ``|z| < 1`` (scalars or numpy arrays).
Isometries are stored as real SL(2, R) matrices acting on the upper half plane and
applied to the disk through the Cayley transform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .words import SurfaceGroup, Word, WordLike, as_word, letter_to_token

EDGE_EPS = 1e-12
CLOSED_TOL = 1e-12
MAX_CROSSINGS = 10_000

# disk <- upper half plane: z = (w - i) / (w + i)
_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.array([[1.0j, 1.0j], [-1.0, 1.0]]) / 2.0j


class DiskRangeError(ValueError):
    """A point left the open unit disk."""


class NormalizationError(RuntimeError):
    """Greedy side crossing did not reach the fundamental domain."""


def as_point(p) -> complex:
    if isinstance(p, (complex, float, int, np.number)):
        return complex(p)
    x, y = p
    return complex(x, y)


def _check_disk(z):
    if np.any(np.abs(z) >= 1.0 - EDGE_EPS):
        raise DiskRangeError("point outside the open unit disk")
    return z


@dataclass(frozen=True)
class Isometry:
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m) -> "Isometry":
        m = np.asarray(m, dtype=float)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det <= 0:
            raise ValueError("isometry matrix must have positive determinant")
        m = m / math.sqrt(det)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def from_disk(cls, u) -> "Isometry":
        """From a complex matrix acting on the disk (any nonzero scalar multiple)."""
        u = np.asarray(u, dtype=complex)
        u = u / np.sqrt(np.linalg.det(u))
        m = _CAYLEY_INV @ u @ _CAYLEY
        k = np.unravel_index(np.argmax(np.abs(m)), m.shape)
        m = m * (abs(m[k]) / m[k])
        return cls.from_matrix(m.real)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @cached_property
    def disk(self) -> np.ndarray:
        return _CAYLEY @ self.matrix @ _CAYLEY_INV

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def apply(self, z):
        u = self.disk
        z = np.asarray(z, dtype=complex) if not np.isscalar(z) else complex(z)
        return _check_disk((u[0, 0] * z + u[0, 1]) / (u[1, 0] * z + u[1, 1]))

    def trace(self) -> float:
        return self.a + self.d

    def is_identity(self, tol: float = 1e-8) -> bool:
        m = self.matrix
        eye = np.eye(2)
        return bool(min(np.max(np.abs(m - eye)), np.max(np.abs(m + eye))) <= tol)

    def fixed_points(self) -> tuple[complex, complex]:
        """(repelling, attracting) boundary fixed points of a hyperbolic element."""
        u = self.disk
        al, be, ga, de = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
        if abs(self.trace()) <= 2.0:
            raise ValueError("isometry is not hyperbolic")
        roots = np.roots([ga, de - al, -be])
        roots = roots / np.abs(roots)
        deriv = [abs(1.0 / (ga * z + de) ** 2) for z in roots]
        rep, att = (roots[0], roots[1]) if deriv[0] > deriv[1] else (roots[1], roots[0])
        return complex(rep), complex(att)

    def translation_length(self) -> float:
        return 2.0 * math.acosh(abs(self.trace()) / 2.0)

    def to_json(self) -> dict:
        return {"matrix": [self.a, self.b, self.c, self.d]}


def to_origin(p: complex, z):
    """Disk isometry sending ``p`` to 0."""
    return (z - p) / (1.0 - np.conj(p) * z)


def from_origin(p: complex, z):
    return (z + p) / (1.0 + np.conj(p) * z)


def distance(p, q):
    p = np.asarray(p, dtype=complex) if not np.isscalar(p) else as_point(p)
    q = np.asarray(q, dtype=complex) if not np.isscalar(q) else as_point(q)
    _check_disk(p)
    _check_disk(q)
    return 2.0 * np.arctanh(np.abs(p - q) / np.abs(1.0 - np.conj(p) * q))


def geodesic_point(p, q, t: float) -> complex:
    """Constant-speed geodesic from ``p`` (t=0) to ``q`` (t=1)."""
    p, q = as_point(p), as_point(q)
    w = to_origin(p, q)
    if abs(w) == 0.0:
        return p
    d = 2.0 * math.atanh(abs(w))
    return complex(from_origin(p, math.tanh(t * d / 2.0) * w / abs(w)))


def area_density(p):
    """Conformal area factor 4 / (1 - |z|^2)^2 of the hyperbolic metric."""
    z = np.asarray(p, dtype=complex) if not np.isscalar(p) else as_point(p)
    _check_disk(z)
    return 4.0 / (1.0 - np.abs(z) ** 2) ** 2


def _interior_angle(r: float, n: int) -> float:
    v = [r * np.exp(1j * (2 * k - 1) * np.pi / n) for k in (-1, 0, 1)]
    t_prev = np.angle(to_origin(v[1], v[0]))
    t_next = np.angle(to_origin(v[1], v[2]))
    return float(abs(np.angle(np.exp(1j * (t_prev - t_next)))))


def regular_vertex_radius(n: int, angle: float, tol: float = 1e-12) -> float:
    """Euclidean vertex radius of the regular n-gon with the given interior angle."""
    lo, hi = 1e-9, 1.0 - 1e-12
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _interior_angle(mid, n) > angle:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class Pairing:
    side: int
    partner: int
    isometry: Isometry
    letter: int

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "partner": self.partner,
            "letter": letter_to_token(self.letter),
            **self.isometry.to_json(),
        }


@dataclass
class FundamentalDomain:
    """Regular 4g-gon centred at 0 with side pairings generating the surface group.

    Side ``k`` joins vertices ``k`` and ``k+1`` (counterclockwise).  Leaving the polygon
    through side ``k`` enters the tile ``M_k(P)`` and records the letter of ``M_k``.
    """

    genus: int
    radius: float
    vertices: np.ndarray
    pairings: list[Pairing]
    side_centers: np.ndarray = field(repr=False)
    side_radius: float = field(repr=False)

    @cached_property
    def group(self) -> SurfaceGroup:
        return SurfaceGroup(self.genus)

    @property
    def n_sides(self) -> int:
        return 4 * self.genus

    @cached_property
    def generators(self) -> dict[int, Isometry]:
        return {p.letter: p.isometry for p in self.pairings}

    @cached_property
    def tile_centers(self) -> np.ndarray:
        return np.array([p.isometry.apply(0.0) for p in self.pairings])

    @cached_property
    def _tile_weights(self) -> np.ndarray:
        return 1.0 / (1.0 - np.abs(self.tile_centers) ** 2)

    @cached_property
    def _inverse_disk(self) -> np.ndarray:
        return np.array([p.isometry.inverse().disk for p in self.pairings])

    @cached_property
    def _side_letters(self) -> np.ndarray:
        return np.array([p.letter for p in self.pairings])

    @property
    def circumradius(self) -> float:
        return float(2.0 * math.atanh(self.radius))

    @property
    def inradius(self) -> float:
        return float(distance(0.0, self.tile_centers[0]) / 2.0)

    @property
    def area(self) -> float:
        return 4.0 * math.pi * (self.genus - 1)

    @property
    def max_density(self) -> float:
        return 4.0 / (1.0 - self.radius**2) ** 2

    def matrix(self, w: WordLike) -> Isometry:
        m = np.eye(2)
        for x in as_word(w).letters:
            m = m @ self.generators[x].matrix
            m = m / math.sqrt(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        return Isometry.from_matrix(m)

    def relator_matrix(self) -> Isometry:
        return self.matrix(self.group.relator)

    def violations(self, z) -> np.ndarray:
        """Positive entries mark sides whose half-plane excludes the point.

        Side ``k`` is the bisector of 0 and ``M_k(0)``; the value compares the two
        (monotone transforms of) hyperbolic distances.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        dz = z[:, None] - self.tile_centers[None, :]
        return np.abs(z[:, None]) ** 2 - np.abs(dz) ** 2 * self._tile_weights[None, :]

    def locate(self, p):
        """``None`` if ``p`` is in the closed polygon, else the most violated side."""
        v = self.violations(as_point(p))[0]
        if np.all(v <= CLOSED_TOL):
            return None
        return int(np.argmax(v))

    def contains(self, z) -> np.ndarray:
        return np.all(self.violations(z) <= CLOSED_TOL, axis=1)

    def normalize(self, p) -> tuple[complex, Word]:
        """Move ``p`` into the polygon; returns ``(p', w)`` with ``matrix(w)(p') = p``."""
        zs, words = self.normalize_many(np.array([as_point(p)]))
        return complex(zs[0]), Word(tuple(words[0]))

    def normalize_many(self, z: np.ndarray, max_crossings: int = MAX_CROSSINGS):
        """Vectorized ``normalize``; returns new points and per-point letter lists."""
        z = np.array(z, dtype=complex, copy=True).reshape(-1)
        words: list[list[int]] = [[] for _ in range(z.size)]
        v = self.violations(z)
        bad = np.any(v > CLOSED_TOL, axis=1)
        active, v = np.nonzero(bad)[0], v[bad]
        count = 0
        while active.size:
            count += 1
            if count > max_crossings:
                raise NormalizationError("side crossing cap exceeded")
            side = np.argmax(v, axis=1)
            u = self._inverse_disk[side]
            za = z[active]
            z[active] = (u[:, 0, 0] * za + u[:, 0, 1]) / (u[:, 1, 0] * za + u[:, 1, 1])
            for i, k in zip(active, side):
                words[i].append(int(self._side_letters[k]))
            v = self.violations(z[active])
            bad = np.any(v > CLOSED_TOL, axis=1)
            active, v = active[bad], v[bad]
        _check_disk(z)
        return z, words

    def sample_uniform(self, rng: np.random.Generator, n: int, batch: int = 4096) -> np.ndarray:
        """Area-uniform points by rejection from the bounding box, weighted by density."""
        out: list[np.ndarray] = []
        have = 0
        r, top = self.radius, self.max_density
        while have < n:
            xy = rng.uniform(-r, r, size=(batch, 2))
            u = rng.uniform(0.0, top, size=batch)
            z = xy[:, 0] + 1j * xy[:, 1]
            ok = np.abs(z) < r
            ok[ok] &= self.contains(z[ok])
            ok[ok] &= u[ok] < 4.0 / (1.0 - np.abs(z[ok]) ** 2) ** 2
            out.append(z[ok])
            have += int(ok.sum())
        return np.concatenate(out)[:n]

    def orbit(self, max_dist: float) -> list[tuple[Word, Isometry]]:
        """Group elements ``g`` with ``d(0, g(0)) <= max_dist`` by breadth-first search.

        The search runs out to ``max_dist + circumradius`` so that elements reachable
        only through slightly farther tiles are not missed.
        """
        limit = max_dist + self.circumradius
        t_lim = math.tanh(limit / 2.0)
        start = (Word(), Isometry.identity())
        seen = {(0.0, 0.0)}
        frontier = [start]
        found = [start]
        while frontier:
            nxt = []
            for w, g in frontier:
                for letter, gen in self.generators.items():
                    h = g @ gen
                    c = complex(h.apply(0.0))
                    if abs(c) > t_lim:
                        continue
                    key = (round(c.real, 9), round(c.imag, 9))
                    if key in seen:
                        continue
                    seen.add(key)
                    item = (w * Word((letter,)), h)
                    nxt.append(item)
                    found.append(item)
            frontier = nxt
        t_keep = math.tanh(max_dist / 2.0)
        return [(w, g) for w, g in found if abs(g.apply(0.0)) <= t_keep + 1e-15]

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "vertex_radius": self.radius,
            "vertices": [[float(v.real), float(v.imag)] for v in self.vertices],
            "pairings": [p.to_json() for p in self.pairings],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _partner(k: int) -> int:
    return k + 2 if k % 4 in (0, 1) else k - 2


def _side_letter(k: int) -> int:
    # sides 4j, 4j+1, 4j+2, 4j+3 carry a_j, B_j, A_j, b_j; with this choice the
    # generators satisfy prod [a_j, b_j] = 1
    j = k // 4 + 1
    a, b = 2 * j - 1, 2 * j
    return (a, -b, -a, b)[k % 4]


def build_group(genus: int) -> FundamentalDomain:
    if genus < 2:
        raise ValueError("genus must be >= 2")
    n = 4 * genus
    r = regular_vertex_radius(n, 2.0 * math.pi / n)
    vertices = r * np.exp(1j * (2 * np.arange(n) - 1) * np.pi / n)
    dist = (r * r + 1.0) / (2.0 * r * math.cos(math.pi / n))
    centers = dist * np.exp(2j * np.pi * np.arange(n) / n)
    side_radius = math.sqrt(dist * dist - 1.0)
    pairings = []
    for k in range(n):
        kp = _partner(k)
        # reflect across the diameter swapping the two sides, then invert in side k
        phi = np.pi * (k + kp) / n
        c = centers[k]
        e = np.exp(-2j * phi)
        u = np.array([[c * e, -1.0], [e, -np.conj(c)]])
        pairings.append(Pairing(k, kp, Isometry.from_disk(u), _side_letter(k)))
    return FundamentalDomain(genus, r, vertices, pairings, centers, side_radius)


def side_midpoints(dom: FundamentalDomain) -> np.ndarray:
    """Hyperbolic midpoints of the sides (they lie on the rays through side centres)."""
    out = []
    for k in range(dom.n_sides):
        v0, v1 = dom.vertices[k], dom.vertices[(k + 1) % dom.n_sides]
        out.append(geodesic_point(v0, v1, 0.5))
    return np.array(out)


def relator_error(dom: FundamentalDomain) -> float:
    m = dom.relator_matrix().matrix
    eye = np.eye(2)
    return float(min(np.max(np.abs(m - eye)), np.max(np.abs(m + eye))))


def geodesic_distance_to_origin(xi1: complex, xi2: complex) -> float:
    """Distance from 0 to the geodesic with boundary endpoints ``xi1``, ``xi2``."""
    half = abs(np.angle(xi2 / xi1)) / 2.0
    return float(math.acosh(1.0 / max(math.sin(half), 1e-300)))


def points_to_array(points: Sequence) -> np.ndarray:
    return np.array([as_point(p) for p in points], dtype=complex)
