"""Command-line interface: ``neumann-holes <subcommand> [options]``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .. import __version__
from ..analytic import DiskRadial, disk_gamma_radii, predict_shift_2d
from ..assembly import assemble_all, normal_derivative
from ..eigensolve import solve_lowest
from ..errors import NeumannHolesError, Unfittable
from ..geometry import generate_mesh, mesh_quality, mesh_to_string
from ..smalleig import random_instance, tightness_probe, verify_small_eig
from ..torsion import solve_interior_torsion
from .classify import classify_sign
from .config import ExperimentConfig, load_config
from .emit import disk_figure, disk_gamma_rows, emit, report_json, sweep_csv, table_csv
from .fit import fit_table
from .sweep import analytic_eigenfunction, run_sweep
from .verify import MUTATIONS, SUITES, verify_all


def _out_dir(args, config: Optional[ExperimentConfig] = None) -> Path:
    if args.out:
        return Path(args.out)
    return Path(config.out_dir) if config is not None else Path("out")


def _need_config(args) -> ExperimentConfig:
    if not args.config:
        raise SystemExit(f"{args.command}: --config is required")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    return cfg


def _report(args, out: Path, stem: str, payload: dict) -> Path:
    path = emit(report_json(payload), out, f"{stem}.json")
    print(path)
    return path


def cmd_mesh(args) -> int:
    cfg = _need_config(args)
    eps = args.eps if args.eps is not None else cfg.eps[0]
    mesh = generate_mesh(cfg.domain(eps), cfg.h0, seed=cfg.seed)
    out = _out_dir(args, cfg)
    print(emit(mesh_to_string(mesh), out, "mesh.txt"))
    _report(args, out, "mesh_quality", {"eps": eps, "quality": dataclasses.asdict(mesh_quality(mesh))})
    return 0


def cmd_eig(args) -> int:
    cfg = _need_config(args)
    eps = None if args.no_hole else (args.eps if args.eps is not None else cfg.eps[0])
    mesh = generate_mesh(cfg.domain(eps), cfg.h0, seed=cfg.seed)
    _, K, M = assemble_all(mesh, cfg.order)
    spec = solve_lowest(K, M, args.count, cfg.tol)
    out = _out_dir(args, cfg)
    rows = [[i, p.lam, p.residual] for i, p in enumerate(spec.pairs)]
    if args.format == "csv":
        print(emit(table_csv(["index", "lambda", "residual"], rows), out, "eigenvalues.csv"))
    else:
        _report(args, out, "eigenvalues", {"eps": eps, "dofs": K.shape[0], "order": cfg.order,
                                           "eigenvalues": [r[1] for r in rows],
                                           "residuals": [r[2] for r in rows]})
    return 0


def cmd_torsion(args) -> int:
    cfg = _need_config(args)
    phi = analytic_eigenfunction(cfg)
    if phi is None:
        raise SystemExit("torsion: needs a rectangle anchored at the origin for the boundary data")
    out = _out_dir(args, cfg)
    rows = []
    for eps in cfg.eps:
        mesh = generate_mesh(cfg.domain(eps), cfg.h0, seed=cfg.seed)
        space, K, M = assemble_all(mesh, cfg.order)
        sol = solve_interior_torsion(space, K, M, normal_derivative(phi.gradient))
        rows.append([eps, sol.T, sol.load_identity, sol.energy_identity])
    header = ["eps", "T", "load_identity", "energy_identity"]
    if args.format == "csv":
        print(emit(table_csv(header, rows), out, "torsion.csv"))
    else:
        _report(args, out, "torsion", {"rows": [dict(zip(header, r)) for r in rows]})
    return 0


def cmd_sweep(args) -> int:
    cfg = _need_config(args)
    table = run_sweep(cfg)
    out = _out_dir(args, cfg)
    if args.format == "csv":
        print(emit(sweep_csv(table.rows), out, "sweep.csv"))
        return 0
    payload = {"config": cfg.to_dict(), "reference": table.reference, "lambda_ref": table.lam_ref,
               "rows": [{"eps": r.eps, "lambda_eps": r.lambda_eps, "delta_lambda": r.delta_lambda,
                         "error_bar": r.error_bar, "observed_order": r.observed_order} for r in table.rows]}
    try:
        fit = fit_table(table, cfg.fit_model)
        payload["fit"] = dataclasses.asdict(fit)
    except Unfittable as exc:
        payload["fit"] = {"unfittable": str(exc)}
    phi = analytic_eigenfunction(cfg)
    if phi is not None and cfg.hole_vertices is None:
        pred = predict_shift_2d(phi, cfg.hole_center)
        payload["prediction"] = {"exponent": pred.exponent, "coefficient": pred.coefficient,
                                 "case": pred.case, "region": classify_sign(cfg.hole_center, phi).value}
    _report(args, out, "sweep", payload)
    return 0


def cmd_gamma(args) -> int:
    out = _out_dir(args)
    modes = [DiskRadial(args.radius, k) for k in range(1, args.modes + 1)]
    rows = disk_gamma_rows(modes)
    if args.format == "csv":
        print(emit(table_csv(["k", "alpha", "kind", "radius"], rows), out, "disk_gamma.csv"))
    elif args.format == "svg":
        for phi in modes:
            svg = disk_figure(phi, disk_gamma_radii(phi), phi.nodal_radii())
            print(emit(svg, out, f"disk_gamma_k{phi.k}.svg"))
    else:
        _report(args, out, "disk_gamma", {"radius": args.radius,
                                          "rows": [dict(zip(["k", "alpha", "kind", "radius"], r)) for r in rows]})
    return 0


def cmd_smalleig(args) -> int:
    seed = 0 if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    passed = 0
    for _ in range(args.count):
        inst = random_instance(rng, int(rng.integers(2, 16)), float(10 ** rng.uniform(-6, -0.3)))
        passed += verify_small_eig(inst).passed
    inst = random_instance(np.random.default_rng(seed + 1), 10, 0.1)
    d, l1, l2 = tightness_probe(inst, np.logspace(-1, -4, 7), seed)
    payload = {"seed": seed, "instances": args.count, "passed": passed,
               "slope1": float(np.polyfit(np.log(d), np.log(l1), 1)[0]),
               "slope2": float(np.polyfit(np.log(d), np.log(l2), 1)[0])}
    _report(args, _out_dir(args), "smalleig", payload)
    return 0 if passed == args.count else 1


def cmd_verify(args) -> int:
    seed = 0 if args.seed is None else args.seed
    report = verify_all(seed, args.suite or None, args.inject)
    for r in report.results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.checks - r.failures}/{r.checks})")
    _report(args, _out_dir(args), "verify", report.to_dict())
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="neumann-holes", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment TOML file")
    common.add_argument("--out", help="output directory (default: config output.dir or ./out)")
    common.add_argument("--seed", type=int, help="random seed (u64)")
    common.add_argument("--format", choices=("csv", "json", "svg"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mesh", parents=[common], help="generate the perforated mesh of a config")
    s.add_argument("--eps", type=float, help="hole scale (default: first eps of the config)")
    s.set_defaults(func=cmd_mesh)

    s = sub.add_parser("eig", parents=[common], help="lowest eigenvalues on one mesh")
    s.add_argument("--eps", type=float)
    s.add_argument("--no-hole", action="store_true", help="use the unperforated domain")
    s.add_argument("--count", type=int, default=6)
    s.set_defaults(func=cmd_eig)

    s = sub.add_parser("torsion", parents=[common], help="torsional rigidity for each eps of a config")
    s.set_defaults(func=cmd_torsion)

    s = sub.add_parser("sweep", parents=[common], help="eps sweep with extrapolation and fit")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("gamma", parents=[common], help="interface and nodal circles of radial disk modes")
    s.add_argument("--radius", type=float, default=2.0)
    s.add_argument("--modes", type=int, default=2)
    s.set_defaults(func=cmd_gamma)

    s = sub.add_parser("smalleig", parents=[common], help="random small-eigenvalue lemma instances")
    s.add_argument("--count", type=int, default=500)
    s.set_defaults(func=cmd_smalleig)

    s = sub.add_parser("verify", parents=[common], help="run the property-verification suites")
    s.add_argument("--suite", action="append", choices=sorted(SUITES), help="run only this suite (repeatable)")
    s.add_argument("--inject", choices=MUTATIONS, help="inject a known defect")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return int(args.func(args))
    except NeumannHolesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
