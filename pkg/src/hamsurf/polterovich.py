"""Monte Carlo estimates of the averaged, homogenized quasi-morphism of a flow.

For a (composite) Hamiltonian flow ``f`` and a counting quasi-morphism ``psi``,
``Psi(f^p) / p = Area * E_x[psi([f^p_x])] / p`` with ``x`` area-uniform on the surface.
``Psi`` vanishes on autonomous flows whose level loops are killed by ``psi``; composing
two autonomous flows can make it nonzero, which bounds the autonomous norm from below.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    Flow,
    LevelLoop,
    ScalarField,
    as_segments,
    decompose,
    run_flow,
    trace_level_loops,
)
from .geometry import FundamentalDomain, NormalizationError
from .quasimorphism import CountingQM, combined_error
from .words import Word, WordLike, as_word, free_reduce

SKIP_BUDGET = 0.05
CHUNK = 500
DEFECT_SAMPLES = 2000
DEFECT_MAX_LEN = 20
# tried in order when the configured pattern gives an estimate within 3 sigma of zero
FALLBACK_PATTERNS = ("a1 b1", "b1 a1", "a1 B1", "a1 a1 b1", "a1 b1 b1", "a1 b1 A1 B1")


@dataclass
class PsiEstimate:
    mean: float
    std_error: float
    samples: int
    p_used: int
    skipped: int
    values: np.ndarray = field(default=None, repr=False)
    words: list = field(default=None, repr=False)
    points: np.ndarray = field(default=None, repr=False)

    @property
    def unreliable(self) -> bool:
        return self.skipped > SKIP_BUDGET * self.samples

    def to_json(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "samples": self.samples,
                "p_used": self.p_used, "skipped": self.skipped, "unreliable": self.unreliable}


def _domain(flow: Flow) -> FundamentalDomain:
    return as_segments(flow)[0][0].domain


def _is_identity(flow: Flow) -> bool:
    return all(H.is_zero or T == 0 for H, T in as_segments(flow))


def sample_loops(flow: Flow, p: int, n_samples: int, seed, dt: float = 1e-2):
    """Area-uniform points and the words of their ``p``-fold flow loops.

    Points whose normalization caps out are returned with ``None`` words.
    """
    dom = _domain(flow)
    rng = np.random.default_rng(seed)
    xs = dom.sample_uniform(rng, n_samples)
    words: list = []
    for start in range(0, n_samples, CHUNK):
        chunk = xs[start : start + CHUNK]
        try:
            _, ws = run_flow(flow, chunk, p, dt)
            words += [free_reduce(w) for w in ws]
        except NormalizationError:
            for x in chunk:
                try:
                    words.append(free_reduce(run_flow(flow, [x], p, dt)[1][0]))
                except NormalizationError:
                    words.append(None)
    return xs, words


def _reduce(area: float, values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return 0.0, 0.0
    sd = values.std(ddof=1) if values.size > 1 else 0.0
    return float(area * values.mean()), float(area * sd / math.sqrt(values.size))


def estimate_psi(qm: CountingQM, flow: Flow, p: int, n_samples: int, seed,
                 dt: float = 1e-2) -> PsiEstimate:
    """``Area * mean(psi([f^p_x]) / p)`` over area-uniform samples."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    dom = _domain(flow)
    if _is_identity(flow):
        zeros = np.zeros(n_samples)
        return PsiEstimate(0.0, 0.0, n_samples, p, 0, zeros, [Word()] * n_samples,
                           dom.sample_uniform(np.random.default_rng(seed), n_samples))
    xs, words = sample_loops(flow, p, n_samples, seed, dt)
    ok = np.array([w is not None for w in words])
    values = np.array([qm(w) / p if w is not None else np.nan for w in words])
    mean, se = _reduce(dom.area, values[ok])
    est = PsiEstimate(mean, se, n_samples, p, int((~ok).sum()), values, words, xs)
    if est.unreliable:
        warnings.warn(f"{est.skipped} of {n_samples} samples skipped; estimate unreliable")
    return est


def norm_lower_bound(psi_value: float, defect: float, n: int) -> float:
    """Empirical lower bound ``n |Psi(f)| / D`` for the autonomous norm of ``f^n``."""
    if defect <= 0:
        raise ValueError("defect must be positive")
    return n * abs(psi_value) / defect


def averaged_defect(qm: CountingQM, area: float, seed, samples: int = DEFECT_SAMPLES,
                    max_len: int = DEFECT_MAX_LEN) -> tuple[float, float]:
    """``(D_psi, D_Psi)`` with ``D_Psi = 2 * Area * D_psi`` from the empirical defect."""
    d = qm.defect_estimate(samples, max_len, seed)
    return d, 2.0 * area * d


def power(flow: Flow, n: int) -> list:
    return as_segments(flow) * n


# -- experiments ------------------------------------------------------------------


@dataclass
class VanishingReport:
    estimate: PsiEstimate
    level_classes: list
    precondition: bool
    empirical_K: int
    defect: float
    bound_ok_fraction: float
    regular: int
    stationary: int
    trace_failures: int
    k_values: list = field(default_factory=list, repr=False)
    remainders: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate.to_json(),
            "within_3_sigma": abs(self.estimate.mean) <= 3 * self.estimate.std_error,
            "level_classes": self.level_classes,
            "precondition_vanishes_on": self.precondition,
            "empirical_K": self.empirical_K,
            "defect": self.defect,
            "bound_ok_fraction": self.bound_ok_fraction,
            "regular_samples": self.regular,
            "stationary_samples": self.stationary,
            "trace_failures": self.trace_failures,
        }


def vanishing_experiment(qm: CountingQM, H: ScalarField, p: int, n_samples: int, seed,
                         dt: float = 1e-2) -> VanishingReport:
    est = estimate_psi(qm, H, p, n_samples, seed, dt)
    dom = H.domain
    group = dom.group
    defect = qm.defect_estimate(DEFECT_SAMPLES, DEFECT_MAX_LEN, seed)
    if H.is_zero:
        return VanishingReport(est, [], True, 0, defect, 1.0, 0, n_samples, 0,
                               [0] * n_samples, [0] * n_samples)
    loops = trace_level_loops(H, est.points)
    classes: dict[str, Word] = {}
    ks, rems = [], []
    regular = stationary = failures = 0
    for res, w in zip(loops, est.words):
        if w is None:
            continue
        if isinstance(res, LevelLoop):
            regular += 1
            classes.setdefault(group.conjugacy_key(res.word), res.word)
            k, rem = decompose(H, res, w, p)
        elif res.__class__.__name__ == "RegularityError":
            # H is locally (nearly) constant: the orbit barely moves
            stationary += 1
            k, rem = 0, group.word_length(w)
        else:
            failures += 1
            continue
        ks.append(k)
        rems.append(rem)
    K = max(rems, default=0)
    precondition = qm.vanishes_on(classes.values()) if classes else True
    if not precondition:
        warnings.warn("pattern does not vanish on the occurring level loops")
    bound = 2.0 * defect * (K + 1) / p
    vals = est.values[~np.isnan(est.values)]
    ok_fraction = float(np.mean(np.abs(vals) <= bound + 1e-12)) if vals.size else 1.0
    return VanishingReport(est, sorted(classes), precondition, int(K), defect, ok_fraction,
                           regular, stationary, failures, ks, rems)


@dataclass
class UnboundednessReport:
    pattern: str
    psi: PsiEstimate
    psi_squared: PsiEstimate
    significant: bool
    defect: float
    defect_averaged: float
    rows: list
    tried: list

    @property
    def homogeneity_gap(self) -> float:
        return abs(self.psi_squared.mean - 2.0 * self.psi.mean)

    @property
    def homogeneity_error(self) -> float:
        return combined_error(self.psi_squared.std_error, 2.0 * self.psi.std_error)

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "psi": self.psi.to_json(),
            "psi_squared": self.psi_squared.to_json(),
            "significant_3_sigma": self.significant,
            "homogeneity_gap": self.homogeneity_gap,
            "homogeneity_error": self.homogeneity_error,
            "defect": self.defect,
            "defect_averaged": self.defect_averaged,
            "rows": self.rows,
            "patterns_tried": self.tried,
        }


def _unbounded_once(qm, f, n_list, p, n_samples, seed, dt):
    dom = _domain(f)
    psi = estimate_psi(qm, f, p, n_samples, seed, dt)
    psi2 = estimate_psi(qm, power(f, 2), p, n_samples, seed, dt)
    d, d_avg = averaged_defect(qm, dom.area, seed)
    rows = []
    for n in n_list:
        row = {"n": n, "psi": n * psi.mean, "std_error": n * psi.std_error,
               "lower_bound": norm_lower_bound(psi.mean, d_avg, n)}
        if n == 1:
            row["direct"] = psi.mean
        elif n == 2:
            row["direct"] = psi2.mean
        rows.append(row)
    significant = abs(psi.mean) > 3.0 * psi.std_error
    return UnboundednessReport(str(qm.pattern), psi, psi2, significant, d, d_avg, rows, [])


def unboundedness_experiment(qm: CountingQM, f: Flow, n_list, p: int, n_samples: int, seed,
                             dt: float = 1e-2, fallback=FALLBACK_PATTERNS) -> UnboundednessReport:
    """Lower-bound table for ``||f^n||_Aut``; falls back through ``fallback`` patterns."""
    n_list = list(n_list)
    tried = [str(qm.pattern)]
    rep = _unbounded_once(qm, f, n_list, p, n_samples, seed, dt)
    for pat in fallback or ():
        if rep.significant:
            break
        if pat in tried:
            continue
        tried.append(pat)
        rep = _unbounded_once(CountingQM(pat, qm.group), f, n_list, p, n_samples, seed, dt)
    rep.tried = tried
    return rep


@dataclass
class ContinuityReport:
    base: PsiEstimate
    rows: list

    @property
    def monotone_within_error(self) -> bool:
        for a, b in zip(self.rows, self.rows[1:]):
            if b["difference"] > a["difference"] + math.hypot(a["std_error"], b["std_error"]):
                return False
        return True

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "rows": self.rows,
                "monotone_within_error": self.monotone_within_error}


def continuity_experiment(qm: CountingQM, H: ScalarField, G: ScalarField, epsilons, p: int,
                          n_samples: int, seed, dt: float = 1e-2) -> ContinuityReport:
    """``|Psi(h_eps) - Psi(h)|`` for ``H + eps G``, paired on common sample points."""
    epsilons = [float(e) for e in epsilons]
    if any(e < 0 for e in epsilons) or any(a <= b for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilons must be non-negative and strictly decreasing")
    area = H.domain.area
    base = estimate_psi(qm, H, p, n_samples, seed, dt)
    rows = []
    for eps in epsilons:
        if eps == 0:
            rows.append({"epsilon": 0.0, "psi": base.mean, "difference": 0.0, "std_error": 0.0})
            continue
        est = estimate_psi(qm, H.plus(G, eps), p, n_samples, seed, dt)
        ok = ~np.isnan(est.values) & ~np.isnan(base.values)
        diff, se = _reduce(area, est.values[ok] - base.values[ok])
        rows.append({"epsilon": eps, "psi": est.mean, "difference": abs(diff), "std_error": se})
    return ContinuityReport(base, rows)


def rotate_word(w: WordLike, quarter_turns: int, genus: int) -> Word:
    """Image of ``w`` under the rotation of the polygon by ``quarter_turns * 4`` sides."""
    shift = quarter_turns % genus

    def img(x: int) -> int:
        j, r = divmod(abs(x) - 1, 2)
        y = 2 * ((j + shift) % genus) + r + 1
        return y if x > 0 else -y

    return Word(tuple(img(x) for x in as_word(w).letters))


def rotate_field(H: ScalarField, turns: int) -> ScalarField:
    """Conjugate of ``H`` by the rotation through ``turns * 4`` sides of the polygon."""
    from .dynamics import Bump, Collar

    g = H.domain.genus
    rot = complex(np.exp(2j * np.pi * turns / g))
    terms = []
    for t in H.terms:
        if isinstance(t, Bump):
            terms.append(Bump(rot * complex(t.center), t.radius, t.amplitude))
        else:
            terms.append(Collar(rotate_word(t.core, turns, g), t.width, t.amplitude))
    return ScalarField(H.domain, terms, H.margin)
