"""Command line entry point: ``hamsurf verify | flow | experiment``.

Exit codes: 0 success, 1 failed verification, 2 configuration error, 3 numerical failure.
Scientific outcomes never change the exit code.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ConfigError, Setup, config_hash, load, validate
from .dynamics import integrate_flow
from .geometry import NormalizationError, as_point
from .polterovich import continuity_experiment, unboundedness_experiment, vanishing_experiment
from .verify import SUITES


EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

CAVEAT = ("the counting quasi-morphism is not known to extend to the mapping class group; "
          "the run checks the predicted consequence, not that hypothesis")


def _config(args) -> dict:
    cfg = load(args.config) if args.config else validate({"genus": 2})
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if args.out is not None:
        overrides["output"] = args.out
    return validate({**cfg, **overrides}) if overrides else cfg


def cmd_verify(args) -> int:
    cfg = _config(args)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rows = []
    for name in names:
        kw = {"seed": cfg["seed"]}
        if args.samples is not None:
            kw["samples"] = args.samples
        for check, ok, detail in SUITES[name](cfg["genus"], **kw):
            rows.append((name, check, ok, detail))
    width = max(len(r[1]) for r in rows)
    for name, check, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<9} {check:<{width}}  {detail}")
    return EXIT_OK if all(r[2] for r in rows) else EXIT_FAIL


def cmd_flow(args) -> int:
    cfg = _config(args)
    setup = Setup.build(cfg)
    H = setup.hamiltonian
    fl = cfg["flow"]
    try:
        x0 = as_point([float(v) for v in args.x0.split(",")]) if args.x0 else as_point(fl["x0"])
    except ValueError as exc:
        raise ConfigError(f"flow/x0: {exc}") from exc
    T = args.T if args.T is not None else fl["T"]
    dt = args.dt if args.dt is not None else fl["dt"]
    if not setup.domain.contains(x0)[0]:
        raise ConfigError("flow/x0: point is outside the fundamental domain")
    try:
        traj = integrate_flow(H, x0, T, dt)
    except NormalizationError as exc:
        print(f"integrator diverged: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "trajectory.csv").write_text(traj.to_csv(), encoding="utf-8")
    end = traj.endpoint
    print(f"deck={str(traj.deck) or 'e'} h_drift={traj.h_drift:.3e} "
          f"endpoint={end.real:.12f},{end.imag:.12f}")
    return EXIT_OK


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)


def run_experiment(kind: str, cfg: dict) -> tuple[dict, list[str], list[list]]:
    """Run one experiment; returns the result JSON plus a CSV table."""
    setup = Setup.build(cfg)
    qm = setup.qm
    p, n, seed, dt = cfg["p"], cfg["n_samples"], cfg["seed"], cfg["dt"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if kind == "vanishing":
            rep = vanishing_experiment(qm, setup.hamiltonian, p, n, seed, dt)
            est = rep.estimate
            header = ["index", "x", "y", "psi_over_p", "k", "remainder"]
            rows = [[i, repr(float(x.real)), repr(float(x.imag)), repr(float(v)), k, r]
                    for i, (x, v, k, r) in enumerate(zip(est.points, est.values, rep.k_values,
                                                         rep.remainders))]
        elif kind == "unboundedness":
            rep = unboundedness_experiment(qm, setup.composition, cfg["n_list"], p, n, seed, dt)
            est = rep.psi
            header = ["n", "psi", "std_error", "direct", "lower_bound"]
            rows = [[r["n"], repr(r["psi"]), repr(r["std_error"]), repr(r.get("direct", "")),
                     repr(r["lower_bound"])] for r in rep.rows]
        elif kind == "continuity":
            rep = continuity_experiment(qm, setup.hamiltonian, setup.perturbation,
                                        cfg["epsilons"], p, n, seed, dt)
            est = rep.base
            header = ["epsilon", "psi", "difference", "std_error"]
            rows = [[repr(r["epsilon"]), repr(r["psi"]), repr(r["difference"]),
                     repr(r["std_error"])] for r in rep.rows]
        else:
            raise ConfigError(f"kind: unknown experiment {kind!r}")
    result = rep.to_json()
    result["warnings"] = sorted({str(w.message) for w in caught})
    result["unreliable"] = est.unreliable
    return result, header, rows


def report(kind: str, cfg: dict, result: dict) -> dict:
    return {
        "experiment": kind,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "seed": cfg["seed"],
        "code_version": __version__,
        "note": CAVEAT,
        "result": result,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def cmd_experiment(args) -> int:
    cfg = _config(args)
    result, header, rows = run_experiment(args.kind, cfg)
    rep = report(args.kind, cfg, result)
    out = Path(cfg["output"])
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{args.kind}_report.json").write_text(
        json.dumps(rep, sort_keys=True, indent=2, default=float) + "\n", encoding="utf-8")
    _write_csv(out / f"{args.kind}.csv", header, rows)
    _headline(args.kind, result)
    return EXIT_NUMERIC if result["unreliable"] else EXIT_OK


def _headline(kind: str, r: dict) -> None:
    if kind == "vanishing":
        e = r["estimate"]
        print(f"Psi = {e['mean']:.6g} +/- {e['std_error']:.3g}  K = {r['empirical_K']}  "
              f"classes = {r['level_classes']}  precondition = {r['precondition_vanishes_on']}")
    elif kind == "unboundedness":
        e = r["psi"]
        print(f"pattern {r['pattern']}: Psi(f) = {e['mean']:.6g} +/- {e['std_error']:.3g}  "
              f"D = {r['defect_averaged']:.6g}")
        for row in r["rows"]:
            print(f"  n={row['n']:>3}  lower bound {row['lower_bound']:.6g}")
    else:
        for row in r["rows"]:
            print(f"  eps={row['epsilon']:<6g} |dPsi| = {row['difference']:.6g} "
                  f"+/- {row['std_error']:.3g}")
    for w in r["warnings"]:
        print(f"warning: {w}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--out", help="output directory")
    ap = argparse.ArgumentParser(prog="hamsurf", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("suite", nargs="?", default="all", choices=["geometry", "group", "dynamics", "all"])
    v.set_defaults(func=cmd_verify)
    f = sub.add_parser("flow", parents=[common], help="integrate one trajectory")
    f.add_argument("--x0", help="start point as 'x,y'")
    f.add_argument("--T", type=float)
    f.add_argument("--dt", type=float)
    f.set_defaults(func=cmd_flow)
    e = sub.add_parser("experiment", parents=[common], help="run an experiment")
    e.add_argument("kind", choices=["vanishing", "unboundedness", "continuity"])
    e.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NormalizationError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
