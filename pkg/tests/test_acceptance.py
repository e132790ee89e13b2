"""Acceptance criteria 1-9, each at its stated tolerance.

A pass/fail line per criterion is printed in the terminal summary.
"""

import json
import re
import time

import numpy as np
import pytest

from hamsurf.cli import main
from hamsurf.config import Setup, preset
from hamsurf.dynamics import (
    area_ratio,
    decompose,
    flow_many,
    run_flow,
    trace_level_loops,
    LevelLoop,
)
from hamsurf.geometry import area_density, build_group, relator_error
from hamsurf.oracle import oracle_is_trivial
from hamsurf.polterovich import unboundedness_experiment, vanishing_experiment
from hamsurf.words import SurfaceGroup, Word, free_reduce


@pytest.fixture(scope="module")
def shipped():
    return {name: Setup.build(preset(name)) for name in
            ("vanishing", "unboundedness", "continuity")}


@pytest.fixture(scope="module")
def unbounded(shipped):
    s = shipped["unboundedness"]
    c = s.cfg
    return unboundedness_experiment(s.qm, s.composition, c["n_list"], c["p"],
                                    c["n_samples"], c["seed"], c["dt"])


def test_criterion_1_group_realization(record):
    t0 = time.perf_counter()
    errs = {g: relator_error(build_group(g)) for g in (2, 3)}
    rels = {}
    rng = np.random.default_rng(0)
    for g in (2, 3):
        dom = build_group(g)
        n = 10**6
        box = np.abs(dom.vertices).max()
        z = rng.uniform(-box, box, n) + 1j * rng.uniform(-box, box, n)
        z = z[np.abs(z) < 1]
        area = area_density(z[dom.contains(z)]).sum() * (2 * box) ** 2 / n
        rels[g] = abs(area / dom.area - 1)
    dt = time.perf_counter() - t0
    ok = all(e <= 1e-8 for e in errs.values()) and all(r <= 0.01 for r in rels.values()) \
        and dt <= 10
    assert record(1, ok, f"relator errors {errs[2]:.1e}/{errs[3]:.1e}, area rel. errors "
                         f"{rels[2]:.1e}/{rels[3]:.1e}, {dt:.1f}s")


def test_criterion_2_word_problem(record):
    grp = SurfaceGroup(2)
    rng = np.random.default_rng(2024)
    rel = grp.relator.letters
    t0 = time.perf_counter()
    agree = trivial = 0
    n = 10**4
    for i in range(n):
        if i % 2:
            w = grp.random_word(rng, int(rng.integers(0, 21)))
        else:
            # conjugates of relator rotations, cut to at most 20 letters
            k = int(rng.integers(0, 8))
            c = grp.random_word(rng, int(rng.integers(0, 7)))
            w = c * Word(rel[k:] + rel[:k]) * ~c
        d = grp.is_trivial(w)
        trivial += d
        agree += d == oracle_is_trivial(w, 2)
    dt = time.perf_counter() - t0
    ok = agree == n and dt <= 30
    assert record(2, ok, f"{agree}/{n} agree ({trivial} trivial), {dt:.1f}s")


def test_criterion_3_flow_quality(record, shipped):
    H = shipped["vanishing"].hamiltonian
    dom = H.domain
    rng = np.random.default_rng(3)
    z = dom.sample_uniform(rng, 4000)
    moving = z[H.speed(z) > H.grad_threshold][:100]
    _, _, d1 = flow_many(H, moving, 1.0, 1e-3, track_drift=True)
    _, _, d2 = flow_many(H, moving, 1.0, 5e-4, track_drift=True)
    ratio = d1.max() / d2.max()
    pts = dom.sample_uniform(rng, 100)
    dev = np.abs(area_ratio(H, pts, 1.0, 1e-3) - 1).max()
    ok = d1.max() <= 1e-6 and ratio >= 10 and dev <= 1e-3
    assert record(3, ok, f"drift {d1.max():.2e}, halving ratio {ratio:.1f}, "
                         f"area ratio deviation {dev:.1e}")


def test_criterion_4_decomposition(record, shipped):
    s = shipped["vanishing"]
    H, qm = s.hamiltonian, s.qm
    dom = H.domain
    rng = np.random.default_rng(4)
    z = dom.sample_uniform(rng, 4000)
    z = z[H.speed(z) > 10 * H.grad_threshold]
    loops = trace_level_loops(H, z[:40])
    pts = [(x, lp) for x, lp in zip(z[:40], loops) if isinstance(lp, LevelLoop)][:20]
    ps = (1, 2, 4, 8, 16)
    rem = np.zeros((len(pts), len(ps)), dtype=int)
    words = {}
    for j, p in enumerate(ps):
        _, ws = run_flow(H, [x for x, _ in pts], p, s.cfg["dt"])
        for i, ((x, lp), w) in enumerate(zip(pts, ws)):
            w = free_reduce(w)
            words[i, p] = w
            rem[i, j] = decompose(H, lp, w, p)[1]
    K = int(rem.max())
    by8 = int(rem[:, :4].max())
    defect = qm.defect_estimate(2000, 20, s.cfg["seed"])
    bound_ok = all(abs(qm(w)) / p <= 2 * defect * (K + 1) / p for (i, p), w in words.items())
    ok = len(pts) == 20 and by8 == K and bound_ok
    assert record(4, ok, f"20 regular points, K = {K} (max by p=8: {by8}), "
                         f"per-sample bound {'holds' if bound_ok else 'fails'}")


def test_criterion_5_vanishing(record, shipped):
    s = shipped["vanishing"]
    c = s.cfg
    t0 = time.perf_counter()
    rep = vanishing_experiment(s.qm, s.hamiltonian, 8, 2000, c["seed"], c["dt"])
    dt = time.perf_counter() - t0
    e = rep.estimate
    ok = rep.precondition and abs(e.mean) <= 3 * e.std_error and dt <= 600
    assert record(5, ok, f"pattern '{s.qm.pattern}' vanishes on {rep.level_classes}: "
                         f"Psi = {e.mean:.4g} +/- {e.std_error:.2g}, {dt:.0f}s")


def test_criterion_6_homogeneity(record, unbounded):
    gap, err = unbounded.homogeneity_gap, unbounded.homogeneity_error
    ok = gap <= 2 * err
    assert record(6, ok, f"|Psi(f^2) - 2 Psi(f)| = {gap:.4f} <= 2 x {err:.4f} "
                         f"(pattern '{unbounded.pattern}')")


def test_criterion_7_unboundedness(record, unbounded):
    lb = [r["lower_bound"] for r in unbounded.rows]
    ns = [r["n"] for r in unbounded.rows]
    increasing = all(b > a for a, b in zip(lb, lb[1:]))
    e = unbounded.psi
    ok = unbounded.significant and increasing and ns == list(range(1, 11))
    assert record(7, ok, f"pattern '{unbounded.pattern}' (tried {unbounded.tried}): "
                         f"Psi(f) = {e.mean:.4f} +/- {e.std_error:.4f}, "
                         f"bounds {lb[0]:.4f} .. {lb[-1]:.4f}")


def test_criterion_8_continuity(record, shipped):
    from hamsurf.polterovich import continuity_experiment

    s = shipped["continuity"]
    c = s.cfg
    rep = continuity_experiment(s.qm, s.hamiltonian, s.perturbation, [0.1, 0.05, 0.01],
                                c["p"], c["n_samples"], c["seed"], c["dt"])
    diffs = ", ".join(f"{r['difference']:.4f}+/-{r['std_error']:.4f}" for r in rep.rows)
    assert record(8, rep.monotone_within_error, f"differences {diffs}")


def test_criterion_9_determinism(record, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({**preset("unboundedness"), "n_samples": 300, "p": 2,
                               "n_list": [1, 2, 3]}))
    blobs = []
    for _ in range(2):
        for kind in ("vanishing", "unboundedness", "continuity"):
            assert main(["experiment", kind, "--config", str(cfg), "--out", str(tmp_path)]) == 0
        blobs.append([re.sub(rb'\n  "timestamp": "[^"]*",?', b"", (tmp_path / f"{k}_report.json")
                             .read_bytes()) + (tmp_path / f"{k}.csv").read_bytes()
                      for k in ("vanishing", "unboundedness", "continuity")])
    ok = blobs[0] == blobs[1]
    assert record(9, ok, "reports and tables byte-identical across repeated runs"
                  if ok else "reports differ")
