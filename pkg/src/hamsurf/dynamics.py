"""Hamiltonian flows of deck-invariant functions, traced with deck words.

A point of the surface is a point of the fundamental polygon.  Flows are integrated on
the lift: after every step the point is moved back into the polygon and the letters of
the crossed sides are appended to its deck word, so that ``matrix(deck)(z)`` is the
lifted position.  With the base point at the polygon centre and radial connecting
paths, the deck word of a flow line is exactly the based loop class it defines.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from scipy import integrate

from .geometry import (
    FundamentalDomain,
    as_point,
    distance,
    geodesic_distance_to_origin,
    to_origin,
)
from .words import Word, WordLike, as_word, free_reduce, letter_to_token

FRAME_MARGIN = 0.3
COLLAR_PEAK = 0.35897435  # max of s * exp(1 - 1/(1 - s^2)) on (0, 1)


class RegularityError(ValueError):
    """The point is (numerically) critical for the Hamiltonian."""


class ClosureError(RuntimeError):
    """A level curve did not close up within the tracing budget."""


def _bump(t):
    """exp(1 - 1/(1 - t)) for t < 1, else 0, and its derivative in t."""
    inside = t < 1.0
    tt = np.where(inside, t, 0.0)
    phi = np.where(inside, np.exp(1.0 - 1.0 / (1.0 - tt)), 0.0)
    dphi = np.where(inside, -phi / (1.0 - tt) ** 2, 0.0)
    return phi, dphi


def collar_profile(sig):
    """Odd profile sig * exp(1 - 1/(1 - sig^2)) and its derivative."""
    phi, dphi = _bump(sig * sig)
    return sig * phi, phi + 2.0 * sig * sig * dphi


@dataclass(frozen=True)
class Bump:
    center: complex
    radius: float
    amplitude: float
    kind = "bump"

    def to_json(self) -> dict:
        c = complex(self.center)
        return {"kind": "bump", "center": [c.real, c.imag], "radius": self.radius,
                "amplitude": self.amplitude}


@dataclass(frozen=True)
class Collar:
    core: Word
    width: float
    amplitude: float
    kind = "collar"

    def to_json(self) -> dict:
        return {"kind": "collar", "core": str(self.core), "width": self.width,
                "amplitude": self.amplitude}


Term = Union[Bump, Collar]


def term_from_json(d: dict) -> Term:
    if d["kind"] == "bump":
        return Bump(as_point(d["center"]), float(d["radius"]), float(d["amplitude"]))
    if d["kind"] == "collar":
        return Collar(as_word(d["core"]), float(d["width"]), float(d["amplitude"]))
    raise ValueError(f"unknown term kind {d['kind']!r}")


def _apply_boundary(m, xi: complex) -> complex:
    u = m.disk
    z = (u[0, 0] * xi + u[0, 1]) / (u[1, 0] * xi + u[1, 1])
    return complex(z / abs(z))


def _geodesic_frame(xi_minus: complex, xi_plus: complex) -> tuple[complex, complex]:
    """Isometry ``rot * (z - a) / (1 - conj(a) z)`` taking the oriented geodesic
    ``xi_minus -> xi_plus`` to the diameter ``-1 -> 1``."""
    s = xi_minus + xi_plus
    if abs(s) < 1e-14:
        a = 0j
    else:
        d0 = geodesic_distance_to_origin(xi_minus, xi_plus)
        a = math.tanh(d0 / 2.0) * s / abs(s)
    top = complex(to_origin(a, xi_plus))
    return a, complex(np.conj(top) / abs(top))


def axis_foot(domain: FundamentalDomain, core: WordLike) -> complex:
    """Point of the axis of ``core`` closest to the origin."""
    xi_m, xi_p = domain.matrix(as_word(core)).fixed_points()
    return _geodesic_frame(xi_m, xi_p)[0]


class ScalarField:
    """Zero-mean, deck-invariant function: a sum of bump and collar terms.

    Bumps use the radial profile ``exp(1 - 1/(1 - t))`` with
    ``t = sinh^2(d/2) / sinh^2(r/2)``; collars use an odd profile of
    ``sinh(s) / sinh(width)`` where ``s`` is the signed distance to the core geodesic.
    Each term is expanded into every deck translate that reaches within
    ``FRAME_MARGIN`` of the polygon, so evaluation is correct for any point in that
    neighbourhood.
    """

    def __init__(self, domain: FundamentalDomain, terms: Sequence[Term] = (),
                 margin: float = FRAME_MARGIN):
        self.domain = domain
        self.terms = tuple(terms)
        self.margin = margin
        bumps: list[tuple[complex, float, float]] = []
        collars: list[tuple[complex, complex, float, float]] = []
        total = 0.0
        for term in self.terms:
            if isinstance(term, Bump):
                bumps += self._bump_frames(term)
                total += self._bump_integral(term)
            elif isinstance(term, Collar):
                collars += self._collar_frames(term)
                total += self._collar_integral(term)
            else:
                raise TypeError(f"unsupported term {term!r}")
        self.mean_offset = total / domain.area
        self._b_a = np.array([b[0] for b in bumps], dtype=complex)
        self._b_s2 = np.array([b[1] for b in bumps])
        self._b_amp = np.array([b[2] for b in bumps])
        self._c_a = np.array([c[0] for c in collars], dtype=complex)
        self._c_rot = np.array([c[1] for c in collars], dtype=complex)
        self._c_sw = np.array([c[2] for c in collars])
        self._c_amp = np.array([c[3] for c in collars])

    # -- construction helpers -------------------------------------------------

    def _bump_frames(self, b: Bump):
        dom = self.domain
        c = as_point(b.center)
        if not dom.contains(c)[0]:
            raise ValueError(f"bump centre {c} is outside the fundamental domain")
        if b.radius <= 0:
            raise ValueError("bump radius must be positive")
        inj = injectivity_radius(dom, c)
        if b.radius >= inj:
            raise ValueError(f"bump radius {b.radius} exceeds injectivity radius {inj:.4f}")
        dc = float(distance(0.0, c))
        reach = dom.circumradius + b.radius + self.margin
        frames, seen = [], set()
        for _, g in dom.orbit(reach + dc):
            gc = complex(g.apply(c))
            key = (round(gc.real, 9), round(gc.imag, 9))
            if key in seen or distance(0.0, gc) > reach:
                continue
            seen.add(key)
            frames.append((gc, math.sinh(b.radius / 2.0) ** 2, b.amplitude))
        return frames

    def _collar_frames(self, c: Collar):
        dom = self.domain
        core = dom.group.check(c.core)
        m = dom.matrix(core)
        if abs(m.trace()) <= 2.0 + 1e-9:
            raise ValueError(f"core {core} is not a hyperbolic element")
        ell = m.translation_length()
        bound = math.asinh(1.0 / math.sinh(ell / 2.0))
        if not 0 < c.width < bound:
            raise ValueError(f"collar width must lie in (0, {bound:.4f}) for core {core}")
        xi_m, xi_p = m.fixed_points()
        d_axis = geodesic_distance_to_origin(xi_m, xi_p)
        reach = dom.circumradius + c.width + self.margin
        frames, seen = [], set()
        for _, g in dom.orbit(reach + d_axis + ell / 2.0):
            gm, gp = _apply_boundary(g, xi_m), _apply_boundary(g, xi_p)
            key = (round(gm.real, 8), round(gm.imag, 8), round(gp.real, 8), round(gp.imag, 8))
            if key in seen or geodesic_distance_to_origin(gm, gp) > reach:
                continue
            seen.add(key)
            a, rot = _geodesic_frame(gm, gp)
            frames.append((a, rot, math.sinh(c.width), c.amplitude))
        return frames

    @staticmethod
    def _bump_integral(b: Bump) -> float:
        s2 = math.sinh(b.radius / 2.0) ** 2

        def f(rho):
            return float(_bump(math.sinh(rho / 2.0) ** 2 / s2)[0]) * 2.0 * math.pi * math.sinh(rho)

        return b.amplitude * integrate.quad(f, 0.0, b.radius, epsabs=1e-13, epsrel=1e-12)[0]

    def _collar_integral(self, c: Collar) -> float:
        ell = self.domain.matrix(c.core).translation_length()
        sw = math.sinh(c.width)

        def f(s):
            return float(collar_profile(math.sinh(s) / sw)[0]) * math.cosh(s)

        val = integrate.quad(f, -c.width, c.width, epsabs=1e-13, epsrel=1e-12)[0]
        return c.amplitude * ell * val

    # -- evaluation -----------------------------------------------------------

    def _eval(self, z, want_grad: bool):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        h = np.full(z.shape, -self.mean_offset)
        grad = np.zeros(z.shape, dtype=complex)
        if self._b_a.size:
            a = self._b_a[None, :]
            den = 1.0 - np.conj(a) * z[:, None]
            w = (z[:, None] - a) / den
            r2 = np.abs(w) ** 2
            q = 1.0 - r2
            t = r2 / q / self._b_s2
            phi, dphi = _bump(t)
            h += (self._b_amp * phi).sum(axis=1)
            if want_grad:
                dw = (1.0 - np.abs(a) ** 2) / den**2
                g_w = 2.0 * w / q**2 / self._b_s2
                grad += (self._b_amp * dphi * np.conj(dw) * g_w).sum(axis=1)
        if self._c_a.size:
            a = self._c_a[None, :]
            den = 1.0 - np.conj(a) * z[:, None]
            w = self._c_rot * (z[:, None] - a) / den
            q = 1.0 - np.abs(w) ** 2
            sig = 2.0 * w.imag / q / self._c_sw
            prof, dprof = collar_profile(np.clip(sig, -1.0, 1.0))
            prof = np.where(np.abs(sig) < 1.0, prof, 0.0)
            h += (self._c_amp * prof).sum(axis=1)
            if want_grad:
                dprof = np.where(np.abs(sig) < 1.0, dprof, 0.0)
                dw = self._c_rot * (1.0 - np.abs(a) ** 2) / den**2
                u, v = w.real, w.imag
                g_w = (4.0 * u * v / q**2) + 1j * (2.0 / q + 4.0 * v * v / q**2)
                grad += (self._c_amp * dprof * np.conj(dw) * g_w / self._c_sw).sum(axis=1)
        return h, grad

    def value(self, z):
        return self._eval(z, False)[0]

    def gradient(self, z):
        """Euclidean gradient ``H_x + i H_y`` in disk coordinates."""
        return self._eval(z, True)[1]

    def vector_field(self, z):
        """X_H with dH = omega(X_H, .) for omega = lambda^2 dx^dy: (H_y, -H_x) / lambda^2."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        g = self.gradient(z)
        lam2 = 4.0 / (1.0 - np.abs(z) ** 2) ** 2
        return (g.imag - 1j * g.real) / lam2

    def speed(self, z):
        """Hyperbolic length of X_H (equal to the hyperbolic norm of dH)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.abs(self.gradient(z)) * (1.0 - np.abs(z) ** 2) / 2.0

    # -- bookkeeping ------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return all(t.amplitude == 0.0 for t in self.terms)

    @property
    def sup_norm(self) -> float:
        total = 0.0
        for t in self.terms:
            total += abs(t.amplitude) * (1.0 if isinstance(t, Bump) else COLLAR_PEAK)
        return total + abs(self.mean_offset)

    @property
    def grad_threshold(self) -> float:
        return 1e-4 * self.sup_norm / (2.0 * self.domain.circumradius)

    def scaled(self, c: float) -> "ScalarField":
        terms = [type(t)(**{**t.__dict__, "amplitude": c * t.amplitude}) for t in self.terms]
        return ScalarField(self.domain, terms, self.margin)

    def plus(self, other: "ScalarField", eps: float = 1.0) -> "ScalarField":
        return ScalarField(self.domain, list(self.terms) + list(other.scaled(eps).terms),
                           self.margin)

    def to_json(self) -> dict:
        return {"terms": [t.to_json() for t in self.terms]}

    @classmethod
    def from_json(cls, domain: FundamentalDomain, d: dict) -> "ScalarField":
        return cls(domain, [term_from_json(t) for t in d.get("terms", [])])


def injectivity_radius(dom: FundamentalDomain, c: complex) -> float:
    dc = float(distance(0.0, c))
    best = math.inf
    for w, g in dom.orbit(2.0 * dc + 2.0 * dom.inradius + 1e-9):
        if len(w) == 0:
            continue
        best = min(best, float(distance(c, g.apply(c))))
    return best / 2.0


# -- flows ----------------------------------------------------------------------

Segment = tuple[ScalarField, float]
Flow = Union[ScalarField, Sequence[Segment]]


def as_segments(flow: Flow) -> list[Segment]:
    if isinstance(flow, ScalarField):
        return [(flow, 1.0)]
    return [(f, float(t)) for f, t in flow]


def _rk4(f, z, h):
    k1 = f(z)
    k2 = f(z + 0.5 * h * k1)
    k3 = f(z + 0.5 * h * k2)
    k4 = f(z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _steps(T: float, dt: float) -> tuple[int, float]:
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = max(1, int(math.ceil(T / dt - 1e-9)))
    return n, T / n


def flow_many(H: ScalarField, z0, T: float, dt: float, words=None, track_drift=False):
    """Integrate many points for time ``T``; returns ``(z, words, drift)``.

    ``words`` (per-point letter lists) are extended in place with crossed sides.
    """
    z = np.array(z0, dtype=complex, copy=True).reshape(-1)
    if words is None:
        words = [[] for _ in range(z.size)]
    drift = np.zeros(z.size)
    if H.is_zero or T == 0:
        return z, words, drift
    dom = H.domain
    h0 = H.value(z) if track_drift else None
    n, h = _steps(T, dt)
    for _ in range(n):
        z = _rk4(H.vector_field, z, h)
        out = ~dom.contains(z)
        if out.any():
            idx = np.nonzero(out)[0]
            zn, ws = dom.normalize_many(z[idx])
            z[idx] = zn
            for i, w in zip(idx, ws):
                words[i].extend(w)
        if track_drift:
            drift = np.maximum(drift, np.abs(H.value(z) - h0))
    return z, words, drift


def run_flow(flow: Flow, z0, p: int, dt: float):
    """Apply the (composite) flow ``p`` times; returns end points and letter lists."""
    z = np.array(z0, dtype=complex, copy=True).reshape(-1)
    words: list[list[int]] = [[] for _ in range(z.size)]
    segments = as_segments(flow)
    for _ in range(p):
        for H, T in segments:
            z, words, _ = flow_many(H, z, T, dt, words)
    return z, words


@dataclass
class LoopClass:
    word: Word
    basepoint: complex = 0j

    def __str__(self) -> str:
        return str(self.word)


def loop_classes(flow: Flow, xs, p: int = 1, dt: float = 1e-2) -> list[Word]:
    _, words = run_flow(flow, xs, p, dt)
    return [free_reduce(w) for w in words]


def loop_class(flow: Flow, x, p: int = 1, dt: float = 1e-2) -> LoopClass:
    """Class of radial path to ``x``, the flow line over ``p`` iterations, radial back."""
    return LoopClass(loop_classes(flow, [as_point(x)], p, dt)[0])


@dataclass
class Trajectory:
    samples: list[tuple[float, complex]]
    crossings: dict[int, list[int]]
    deck: Word
    h_drift: float

    @property
    def endpoint(self) -> complex:
        return self.samples[-1][1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t", "x", "y", "deck_letter"])
        for i, (t, z) in enumerate(self.samples):
            letters = " ".join(letter_to_token(x) for x in self.crossings.get(i, []))
            wr.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag)), letters])
        return buf.getvalue()


def integrate_flow(H: ScalarField, x0, T: float, dt: float) -> Trajectory:
    z = np.array([as_point(x0)])
    if not H.domain.contains(z)[0]:
        raise ValueError("x0 must lie in the fundamental domain")
    h0 = float(H.value(z)[0])
    samples = [(0.0, complex(z[0]))]
    crossings: dict[int, list[int]] = {}
    deck: list[int] = []
    drift = 0.0
    if H.is_zero:
        return Trajectory(samples, crossings, Word(), 0.0)
    n, h = _steps(T, dt)
    for i in range(1, n + 1):
        words: list[list[int]] = [[]]
        z, words, _ = flow_many(H, z, h, h, words)
        if words[0]:
            crossings[i] = list(words[0])
            deck.extend(words[0])
        drift = max(drift, abs(float(H.value(z)[0]) - h0))
        samples.append((i * h, complex(z[0])))
    return Trajectory(samples, crossings, Word(tuple(deck)), drift)


def lifted_endpoints(flow: Flow, xs, p: int = 1, dt: float = 1e-2) -> np.ndarray:
    """Endpoints of the lifted flow lines starting in the polygon."""
    dom = as_segments(flow)[0][0].domain
    z, words = run_flow(flow, xs, p, dt)
    return np.array([dom.matrix(Word(tuple(w))).apply(zz) for zz, w in zip(z, words)])


def area_ratio(H: ScalarField, xs, T: float = 1.0, dt: float = 1e-3, h: float = 1e-5):
    """Hyperbolic area ratio of the time-T map at each point, by central differences."""
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    stencil = np.array([0, h, -h, 1j * h, -1j * h])
    pts = (xs[:, None] + stencil[None, :]).reshape(-1)
    ends = lifted_endpoints([(H, T)], pts, 1, dt).reshape(xs.size, 5)
    fx = (ends[:, 1] - ends[:, 2]) / (2 * h)
    fy = (ends[:, 3] - ends[:, 4]) / (2 * h)
    jac = fx.real * fy.imag - fx.imag * fy.real
    dens = lambda z: 4.0 / (1.0 - np.abs(z) ** 2) ** 2  # noqa: E731
    return jac * dens(ends[:, 0]) / dens(xs)


# -- level loops ----------------------------------------------------------------


@dataclass
class LevelLoop:
    word: Word
    period: float
    length: float


def _image_table(dom: FundamentalDomain, xs: np.ndarray, reach: float):
    """Per point, the deck images of ``x`` lying within ``reach`` of the polygon."""
    near = dom.orbit(2.0 * dom.circumradius + reach)
    imgs: list[list[tuple[complex, Word]]] = []
    lim = dom.circumradius + reach
    for x in xs:
        row = []
        for w, g in near:
            gx = complex(g.apply(x))
            if distance(0.0, gx) <= lim:
                row.append((gx, w))
        imgs.append(row)
    width = max(len(r) for r in imgs)
    table = np.full((xs.size, width), np.nan + 0j)
    for i, row in enumerate(imgs):
        table[i, : len(row)] = [r[0] for r in row]
    return table, [[r[1] for r in row] for row in imgs]


def trace_level_loops(H: ScalarField, xs, ds: float = 0.01, return_eps: float = 1e-5,
                      max_length: float | None = None):
    """Follow ``X_H / |X_H|`` from each point until it closes up.

    Returns a list with a ``LevelLoop`` or an exception instance per point.
    """
    dom = H.domain
    xs = np.atleast_1d(np.asarray(xs, dtype=complex))
    n = xs.size
    results: list = [None] * n
    if max_length is None:
        side = float(distance(dom.vertices[0], dom.vertices[1]))
        max_length = 10.0 * dom.n_sides * side
    speed0 = H.speed(xs)
    thr = H.grad_threshold
    for i in np.nonzero(speed0 < thr)[0]:
        results[i] = RegularityError(f"|grad H| = {speed0[i]:.3g} below {thr:.3g}")
    active = np.nonzero(speed0 >= thr)[0]
    if active.size == 0:
        return results

    def unit(z):
        v = H.vector_field(z)
        sp = H.speed(z)
        return v / sp, 1.0 / sp

    # step size from the curvature of the level line at the start point
    v0, _ = unit(xs[active])
    lam0 = 2.0 / (1.0 - np.abs(xs[active]) ** 2)
    dlt = 1e-4
    v1, _ = unit(xs[active] + dlt * v0)
    turn = np.abs(np.angle(v1 / v0)) / dlt
    step = np.minimum(ds, 0.05 / np.maximum(turn, 1e-12))
    del lam0

    table, table_words = _image_table(dom, xs[active], 4.0 * ds)
    z = xs[active].copy()
    tau = np.zeros(active.size)
    s = np.zeros(active.size)
    words: list[list[int]] = [[] for _ in range(active.size)]
    live = np.ones(active.size, dtype=bool)

    def rk(zz, hh):
        k1, t1 = unit(zz)
        k2, t2 = unit(zz + 0.5 * hh * k1)
        k3, t3 = unit(zz + 0.5 * hh * k2)
        k4, t4 = unit(zz + hh * k3)
        return zz + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4), hh / 6 * (t1 + 2 * t2 + 2 * t3 + t4)

    def renormalize(idx):
        out = ~dom.contains(z[idx])
        if out.any():
            sub = idx[out]
            zn, ws = dom.normalize_many(z[sub])
            z[sub] = zn
            for j, w in zip(sub, ws):
                words[j].extend(w)

    def gap(idx):
        d = np.abs(z[idx, None] - table[idx]) / np.abs(1 - np.conj(z[idx, None]) * table[idx])
        d = np.where(np.isnan(d), np.inf, d)
        j = np.argmin(d, axis=1)
        return 2.0 * np.arctanh(np.minimum(d[np.arange(idx.size), j], 1 - 1e-16)), j

    def project(idx, j):
        """Hyperbolic arc length along the unit field to the foot of the target."""
        tgt = table[idx, j]
        u, _ = unit(z[idx])
        lam = 2.0 / (1.0 - np.abs(z[idx]) ** 2)
        return lam * lam * np.real(np.conj(u) * (tgt - z[idx]))

    while live.any():
        idx = np.nonzero(live)[0]
        dist, j = gap(idx)
        closing = (s[idx] > 3.0 * step[idx]) & (dist < 2.0 * step[idx])
        if closing.any():
            cidx, cj = idx[closing], j[closing]
            delta = project(cidx, cj)
            fine = (delta >= -1e-12) & (delta <= 1.05 * step[cidx])
            cidx, cj, delta = cidx[fine], cj[fine], delta[fine]
            for _ in range(3):
                z_new, dtau = rk(z[cidx], delta)
                z[cidx] = z_new
                tau[cidx] += dtau
                s[cidx] += delta
                delta = project(cidx, cj)
            d_end, j_end = gap(cidx)
            for loc, k, jj, de in zip(cidx, range(cidx.size), j_end, d_end):
                i = active[loc]
                tgt = table[loc, jj]
                aligned = np.real(np.conj(unit(np.array([z[loc]]))[0][0]) * unit(np.array([tgt]))[0][0]) > 0
                if de < return_eps and aligned:
                    w = free_reduce(Word(tuple(words[loc])) * table_words[loc][jj])
                    results[i] = LevelLoop(w, float(tau[loc]), float(s[loc]))
                    live[loc] = False
            renormalize(cidx[live[cidx]])
        idx = np.nonzero(live)[0]
        if idx.size == 0:
            break
        z_new, dtau = rk(z[idx], step[idx])
        z[idx] = z_new
        tau[idx] += dtau
        s[idx] += step[idx]
        renormalize(idx)
        over = idx[s[idx] > max_length]
        for loc in over:
            results[active[loc]] = ClosureError(f"no return within length {max_length:.3g}")
            live[loc] = False
    return results


def level_loop(H: ScalarField, x, **kw) -> LoopClass:
    res = trace_level_loops(H, [as_point(x)], **kw)[0]
    if isinstance(res, Exception):
        raise res
    return LoopClass(res.word)


def decompose(H: ScalarField, loop: LevelLoop, word: Word, p: int, window: int = 2):
    """Best ``k`` and remainder length for ``word = gamma^k * rest``."""
    group = H.domain.group
    k_est = p / loop.period if loop.period > 0 else 0.0
    lo, hi = int(math.floor(k_est)) - window, int(math.ceil(k_est)) + window
    best = None
    for k in range(lo, hi + 1):
        rem = group.word_length((loop.word ** (-k)) * word)
        cand = (rem, abs(k - k_est), k)
        if best is None or cand < best:
            best = cand
    return best[2], best[0]


def decompose_trajectory(H: ScalarField, x, p: int, dt: float = 1e-2, **kw) -> tuple[int, int]:
    """``(k, remainder_length)`` for ``[h^p_x] = gamma_x^k * rest``."""
    if H.is_zero:
        return 0, 0
    res = trace_level_loops(H, [as_point(x)], **kw)[0]
    if isinstance(res, Exception):
        raise res
    word = loop_class(H, x, p, dt).word
    return decompose(H, res, word, p)


def l1_length(H: ScalarField, T: float, n_samples: int = 20000, seed=0) -> tuple[float, float]:
    """``T * int |X_H| omega`` by Monte Carlo; returns (value, standard error)."""
    if T <= 0:
        raise ValueError("T must be positive")
    dom = H.domain
    if H.is_zero:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    z = dom.sample_uniform(rng, n_samples)
    sp = H.speed(z)
    scale = T * dom.area
    return float(scale * sp.mean()), float(scale * sp.std(ddof=1) / math.sqrt(n_samples))


def mean_value(H: ScalarField, n_samples: int = 200000, seed=0) -> tuple[float, float]:
    dom = H.domain
    rng = np.random.default_rng(seed)
    v = H.value(dom.sample_uniform(rng, n_samples))
    return float(dom.area * v.mean()), float(dom.area * v.std(ddof=1) / math.sqrt(n_samples))


def segments_to_json(flow: Flow) -> list[dict]:
    return [{"field": f.to_json(), "duration": t} for f, t in as_segments(flow)]


def segments_from_json(domain: FundamentalDomain, items: Iterable[dict]) -> list[Segment]:
    return [(ScalarField.from_json(domain, it["field"]), float(it.get("duration", 1.0)))
            for it in items]
