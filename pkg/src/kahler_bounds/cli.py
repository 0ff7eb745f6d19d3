"""Command-line verifier: ``kahler-bounds <subcommand> [options]``.

Each subcommand writes ``report.json``, ``tables.csv`` and ``plot_data.csv``
into ``--out`` and exits 0 iff every asserted check passes (1 on a failed
check, 2 on bad input).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .config import ConfigError, ExperimentConfig
from .meshes import MeshError, bumpy_sphere
from .spectra import SpectrumError

log = logging.getLogger("kahler_bounds")


def _plain(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.17g}") if math.isfinite(x) else None
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True, allow_nan=False)


def _write_csv(path: Path, rows: list) -> None:
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys or ["empty"])
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in _plain(r).items()})


def write_outputs(out: Path, report: dict, table: list, plot: list) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps_report(report) + "\n")
    _write_csv(out / "tables.csv", table)
    _write_csv(out / "plot_data.csv", plot)


def _check_rows(report):
    return [{"name": c["name"], "passed": c["passed"], "lhs": c["lhs"], "op": c["op"], "rhs": c["rhs"]}
            for c in ex.iter_checks(report)]


def _pmap(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, items))


# ------------------------------------------------------------ subcommands

def cmd_geometry_suite(cfg: ExperimentConfig):
    rep = ex.geometry_suite(cfg.seed, scale=cfg.sample_scale, psi_threshold=cfg.psi_threshold,
                            psi_bar_threshold=cfg.psi_bar_threshold)
    return rep, _check_rows(rep), []


def cmd_bly_check(cfg: ExperimentConfig):
    if cfg.generator == "bumpy":
        seeds = range(cfg.conformal_seed, cfg.conformal_seed + cfg.metrics)
        meshes = [bumpy_sphere(cfg.level, s, cfg.bandwidth, cfg.amplitude) for s in seeds]
    else:
        meshes = [cfg.build_mesh()]
    f = cfg.build_map()
    runs = _pmap(lambda mesh: ex.bly_check(mesh, f, cfg.seed), meshes, cfg.threads)
    rep = {"schema": ex.SCHEMA, "command": "bly-check", "runs": runs,
           "max_ratio": max(r["ratio"] for r in runs)}
    table = [{"mesh": r["mesh"], "lambda_1": r["lambda_1"], "bound": r["bound"], "ratio": r["ratio"],
              "passed": r["checks"][0]["passed"]} for r in runs]
    return rep, table, [{"k": 1, "lambda_k": r["lambda_1"], "bound": r["bound"]} for r in runs]


def cmd_eigenfunction_check(cfg: ExperimentConfig):
    rep = ex.eigenfunction_check(cfg.build_mesh(), rayleigh_tol=cfg.rayleigh_tol, residual_tol=cfg.residual_tol)
    return rep, _check_rows(rep), []


def _record_rows(records):
    table, plot = [], []
    for r in records:
        row = {"k": r["k"], "lambda_k": r["lambda_k"], "satisfied": r["satisfied"]}
        for key in ("holomorphic_degree", "max_rayleigh", "cross_slack", "constant_slack",
                    "max_dirichlet_ratio", "C", "korevaar_ratio"):
            if key in r:
                row[key] = r[key]
        row["all_checks_passed"] = all(c["passed"] for c in r["checks"])
        table.append(row)
        if "C" in r:
            plot.append({"k": r["k"], "lambda_k": r["lambda_k"], "bound": r["C"] * r["holomorphic_degree"] * r["k"]})
    return table, plot


def cmd_certify(cfg: ExperimentConfig):
    mesh, f = cfg.build_mesh(), cfg.build_map()
    ks = sorted(set(cfg.k))
    dom = ex.Domain.build(mesh, ks[-1] + 1, seed=cfg.seed)
    cloud = ex.pushforward_measure(f, mesh)
    area = ex.pullback_area(f, mesh, dom.stiffness)
    records = _pmap(lambda k: ex.certify_k(dom, f, k, cfg.c_target, cfg.strict, cfg.seed, cloud, area),
                    ks, cfg.threads)
    rep = {"schema": ex.SCHEMA, "command": "certify", "mesh": mesh.name, "map": f.to_json(), "m": f.m,
           "degree": f.degree, "volume": mesh.total_area(), "constant_derivation": ex.DERIVATION,
           "c_target": cfg.c_target, "strict": cfg.strict,
           "constant": ex.certified_constant(f.m, cfg.c_target, cfg.strict),
           "records": records, "satisfied": all(r["satisfied"] for r in records)}
    return (rep, *_record_rows(records))


def cmd_korevaar_sweep(cfg: ExperimentConfig):
    cases = ex.random_cases(cfg.cases, cfg.seed, cfg.max_degree, cfg.max_k, cfg.level)
    records = _pmap(lambda c: ex.run_case(c, cfg.c_target, cfg.strict), cases, cfg.threads)
    rep = ex.korevaar_sweep(records, cfg.c_target, cfg.strict, reference=ex.round_reference(cfg.level))
    rep["records"] = records
    table, plot = _record_rows(records)
    for row, c in zip(table, cases):
        row.update(seed=c.seed, degree=c.degree)
    return rep, table, plot


def cmd_weyl(cfg: ExperimentConfig):
    rep = ex.weyl_check(cfg.build_mesh(), cfg.eig_count, cfg.seed, cfg.build_map() if cfg.generator != "torus" else None,
                        cfg.c_target)
    table = [{"slope": rep["slope"], "count": cfg.eig_count, "passed": rep["checks"][0]["passed"]}]
    return rep, table, rep["trend"]


COMMANDS = {
    "geometry-suite": cmd_geometry_suite,
    "bly-check": cmd_bly_check,
    "eigenfunction-check": cmd_eigenfunction_check,
    "certify": cmd_certify,
    "korevaar-sweep": cmd_korevaar_sweep,
    "weyl": cmd_weyl,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path)
    common.add_argument("--strict", action="store_true", default=None,
                        help="use the theoretical packing constant c = 1/(8 N^12)")
    common.add_argument("--threads", type=int)
    common.add_argument("--generator", choices=("icosphere", "bumpy", "torus", "file"))
    common.add_argument("--mesh-path")
    common.add_argument("--conformal-path")
    common.add_argument("--level", type=int)
    common.add_argument("--map-kind", choices=("identity", "random", "file"))
    common.add_argument("--map-path")
    common.add_argument("--degree", type=int)
    common.add_argument("--k", type=int, nargs="+")
    common.add_argument("--c-target", type=float)
    common.add_argument("--eig-count", type=int)
    common.add_argument("--cases", type=int)
    common.add_argument("--metrics", type=int)
    common.add_argument("--sample-scale", type=float)
    common.add_argument("--psi-threshold", type=float, help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="kahler-bounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args) -> ExperimentConfig:
    skip = {"config", "command", "verbose"}
    overrides = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError(f"no such config file {args.config}")
        return ExperimentConfig.from_toml(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None}).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
        report, table, plot = COMMANDS[args.command](cfg)
    except (ConfigError, MeshError, SpectrumError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report["config"] = cfg.to_json()
    report["all_passed"] = ex.all_passed(report)
    write_outputs(Path(cfg.out), report, table, plot)
    for c in ex.iter_checks(report):
        if not c["passed"]:
            log.warning("FAIL %s: %s %s %s", c["name"], c["lhs"], c["op"], c["rhs"])
    print(f"{args.command}: {'PASS' if report['all_passed'] else 'FAIL'} -> {cfg.out}")
    return 0 if report["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
