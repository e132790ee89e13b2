"""Invariant checks run by ``hamsurf verify``."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .dynamics import Collar, ScalarField, area_ratio, axis_foot, flow_many, level_loop
from .geometry import build_group, relator_error, side_midpoints
from .oracle import oracle_is_trivial
from .quasimorphism import CountingQM
from .words import Word

Check = tuple[str, bool, str]


def geometry_suite(genus: int, samples: int = 10**6, seed: int = 0) -> list[Check]:
    out: list[Check] = []
    for g in sorted({genus, 2, 3}):
        dom = build_group(g)
        err = relator_error(dom)
        out.append((f"relator g={g}", err <= 1e-8, f"error {err:.2e}"))
    dom = build_group(genus)
    rng = np.random.default_rng(seed)
    v = dom.vertices
    box = max(abs(v.real).max(), abs(v.imag).max())
    z = rng.uniform(-box, box, samples) + 1j * rng.uniform(-box, box, samples)
    z = z[np.abs(z) < 1]
    inside = dom.contains(z)
    dens = 4.0 / (1.0 - np.abs(z[inside]) ** 2) ** 2
    area = dens.sum() * (2 * box) ** 2 / samples
    rel = abs(area / dom.area - 1.0)
    out.append(("area 4pi(g-1)", rel <= 0.01, f"relative error {rel:.2e}"))
    mids = side_midpoints(dom)
    worst = 0.0
    for p in dom.pairings:
        worst = max(worst, abs(p.isometry.apply(mids[p.partner]) - mids[p.side]))
    out.append(("side pairings", worst <= 1e-9, f"midpoint error {worst:.2e}"))
    pts = dom.sample_uniform(rng, 2000)
    lifted = dom.matrix("a1 b2 A1").apply(pts)
    back, words = dom.normalize_many(lifted)
    rt = max(abs(dom.matrix(w).apply(b) - l) for b, w, l in zip(back, words, lifted))
    out.append(("normalize round trip", rt <= 1e-9, f"error {rt:.2e}"))
    return out


def group_suite(genus: int, samples: int = 2000, seed: int = 0) -> list[Check]:
    dom = build_group(genus)
    grp = dom.group
    rng = np.random.default_rng(seed)
    out: list[Check] = [("relator is trivial", grp.is_trivial(grp.relator), "")]
    agree = 0
    for i in range(samples):
        if i % 2:
            w = grp.random_word(rng, int(rng.integers(0, 21)))
        else:
            k = int(rng.integers(0, 4 * genus))
            rel = grp.relator.letters
            c = grp.random_word(rng, int(rng.integers(0, 5)))
            w = c * Word(rel[k:] + rel[:k]) * ~c
        agree += grp.is_trivial(w) == oracle_is_trivial(w, genus)
    out.append(("Dehn vs matrix oracle", agree == samples, f"{agree}/{samples}"))
    qm = CountingQM("a1 b1", grp)
    bad = 0
    for _ in range(200):
        w = grp.random_word(rng, int(rng.integers(0, 15)))
        bad += qm(~w) != -qm(w)
    out.append(("quasi-morphism antisymmetry", bad == 0, f"{bad} failures"))
    return out


def dynamics_suite(genus: int, samples: int = 100, seed: int = 0) -> list[Check]:
    dom = build_group(genus)
    H = ScalarField(dom, [Collar(Word.parse("a1"), 0.5, 1.0)])
    rng = np.random.default_rng(seed)
    z = dom.sample_uniform(rng, samples)
    zb, _ = dom.normalize_many(dom.generators[1].apply(z))
    inv = float(np.abs(H.value(z) - H.value(zb)).max())
    out: list[Check] = [("field invariance", inv <= 1e-9, f"error {inv:.2e}")]
    core = axis_foot(dom, "a1")
    # drift is identically zero where H is locally constant, so sample the support
    moving = dom.sample_uniform(rng, 20 * samples)
    pts = moving[H.speed(moving) > H.grad_threshold][:samples]
    _, _, d1 = flow_many(H, pts, 1.0, 1e-3, track_drift=True)
    _, _, d2 = flow_many(H, pts, 1.0, 5e-4, track_drift=True)
    ratio = d1.max() / max(d2.max(), 1e-300)
    out.append(("energy drift dt=1e-3", d1.max() <= 1e-6, f"{d1.max():.2e}"))
    out.append(("drift ratio on halving", ratio >= 10, f"{ratio:.1f}"))
    ar = area_ratio(H, z)
    dev = float(np.abs(ar - 1).max())
    out.append(("area preservation", dev <= 1e-3, f"max deviation {dev:.2e}"))
    cls = level_loop(H, core)
    ok = dom.group.conjugacy_key(cls.word) in ("a1", "A1")
    out.append(("core level loop", ok, str(cls)))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "geometry": geometry_suite,
    "group": group_suite,
    "dynamics": dynamics_suite,
}
