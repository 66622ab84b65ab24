"""Command line entry point: ``snnw run``, ``snnw sweep`` and ``snnw check``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench.experiment import ExperimentConfig, parse_nodes, run_experiment, run_sweep
from .bench.problems import get_problem
from .checks import run_checks
from .errors import ConfigurationError, SNNWError

COMMON = ("depth", "width", "subspace_dim", "epsilon", "n_max", "drm_epochs", "seed", "rank_tol")


def _add_run(sub):
    p = sub.add_parser("run", help="run one experiment and write a JSON result")
    p.add_argument("--problem", required=True, choices=["helmholtz", "poisson2d", "anisotropic"])
    p.add_argument("--variant", required=True, choices=["p", "g", "r"])
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--width", type=int, default=100)
    p.add_argument("--subspace-dim", type=int, default=300)
    p.add_argument("--nodes", default=None, help="subintervals x points per axis, e.g. 100x10")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--n-max", type=int, default=5000)
    p.add_argument("--drm-epochs", type=int, default=2000)
    p.add_argument("--k-ratio", type=float, default=1.0, help="k2/k1 for the anisotropic problem (k1 = 1)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--rank-tol", type=float, default=ExperimentConfig.rank_tol)
    p.add_argument("--lift-during-training", choices=["auto", "yes", "no"], default="auto")
    p.add_argument("--out", default="result.json")
    p.add_argument("--dump-system", default=None, metavar="PATH")
    p.add_argument("--dump-pointwise", default=None, metavar="PATH")
    p.add_argument("--log", default=None, metavar="PATH", help="per-epoch training log (CSV)")


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="run a grid of experiments described by a JSON file")
    p.add_argument("--spec", required=True, help="sweep description (JSON)")
    p.add_argument("--out", required=True, help="output table (CSV)")
    p.add_argument("--workers", type=int, default=1, help="cells to run concurrently")


def _cmd_run(args) -> int:
    overrides = {k: getattr(args, k) for k in COMMON}
    overrides["nodes"] = parse_nodes(args.nodes) if args.nodes else None
    overrides["lift_during_training"] = {"auto": None, "yes": True, "no": False}[args.lift_during_training]
    problem = get_problem(args.problem, args.k_ratio)
    result = run_experiment(problem, args.variant, overrides, out=args.out, dump_system=args.dump_system,
                            dump_pointwise=args.dump_pointwise, log_path=args.log)
    print(f"{result.problem} {result.variant}: rel_l2 = {result.rel_l2_error:.3e}, "
          f"epochs = {result.epochs} ({result.stop_reason}), rank = {result.rank}")
    return 0


def load_sweep_spec(path) -> dict:
    """Read a sweep description.

    Keys: ``problem``, ``variant``, ``rows`` (list), ``M`` (list), optional
    ``row_kind`` (``points``/``depth``), ``pts_per_sub``, ``k_ratio`` and
    ``config`` (overrides for :class:`ExperimentConfig`).
    """
    spec = json.loads(Path(path).read_text())
    missing = {"problem", "variant", "rows", "M"} - set(spec)
    if missing:
        raise ConfigurationError(f"sweep spec missing keys: {sorted(missing)}")
    return spec


def _cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.spec)
    problem = get_problem(spec["problem"], spec.get("k_ratio", 1.0))
    base = ExperimentConfig().with_overrides(spec.get("config"))
    table = run_sweep(problem, spec["variant"], spec["rows"], spec["M"], spec.get("row_kind", "points"), base,
                      spec.get("pts_per_sub"), workers=args.workers)
    table.to_csv(args.out)
    failed = sum(c.result is None for c in table.cells)
    print(f"wrote {len(table.cells)} cells to {args.out} ({failed} failed)")
    return 0


def _cmd_check(args) -> int:
    results = run_checks()
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.name}: {r.detail} ({r.seconds:.2f} s)")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snnw", description="Neural-network subspaces solved in weak form.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run(sub)
    _add_sweep(sub)
    sub.add_parser("check", help="run the built-in oracle suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return {"run": _cmd_run, "sweep": _cmd_sweep, "check": _cmd_check}[args.command](args)
    except SNNWError as exc:
        print(f"snnw: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
