"""End-to-end experiments: init -> train -> freeze -> lift -> assemble -> solve -> measure."""

from __future__ import annotations

import csv
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .. import galerkin
from ..errors import ConfigurationError, StageError
from ..network import NetworkConfig, freeze_basis, init
from ..quadrature import box_rule
from ..training import TrainConfig, canonical_variant, train
from .metrics import evaluation_grid, relative_l2
from .problems import ProblemSpec

log = logging.getLogger(__name__)

RESULT_SCHEMA = "snnw-result/1"
TIMING_FIELDS = ("train_seconds", "assemble_seconds", "solve_seconds")


@dataclass(frozen=True)
class ExperimentConfig:
    depth: int = 4
    width: int = 100
    subspace_dim: int = 300
    # (n_sub, n_pts) per axis; None uses the problem's default
    nodes: tuple | None = None
    epsilon: float = 1e-3
    n_max: int = 5000
    drm_epochs: int = 2000
    seed: int = 1
    rank_tol: float = 1e-15
    lift_during_training: bool | None = None
    subspace_activation: bool = True

    def with_overrides(self, overrides=None) -> "ExperimentConfig":
        if not overrides:
            return self
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigurationError(f"unknown experiment options: {sorted(unknown)}")
        ov = dict(overrides)
        if "nodes" in ov and ov["nodes"] is not None:
            ov["nodes"] = parse_nodes(ov["nodes"])
        return replace(self, **ov)


def parse_nodes(spec) -> tuple:
    """``"100x10"`` or ``(100, 10)`` -> ``(n_sub, n_pts)``."""
    if isinstance(spec, str):
        parts = spec.lower().split("x")
        if len(parts) != 2:
            raise ConfigurationError(f"nodes must look like '16x4', got {spec!r}")
        spec = parts
    n_sub, n_pts = (int(v) for v in spec)
    return n_sub, n_pts


@dataclass
class ExperimentResult:
    problem: str
    variant: str
    config: dict
    rel_l2_error: float
    epochs: int
    stop_reason: str
    initial_loss: float
    final_loss: float
    rank: int
    residual_norm: float
    n_nodes: int
    train_seconds: float = 0.0
    assemble_seconds: float = 0.0
    solve_seconds: float = 0.0
    problem_params: dict = field(default_factory=dict)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"schema": RESULT_SCHEMA, **asdict(self)}
        if not timing:
            for k in TIMING_FIELDS:
                d.pop(k)
        return d

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def run_experiment(problem: ProblemSpec, variant: str, overrides=None, *, out=None, dump_system=None,
                   dump_pointwise=None, log_path=None) -> ExperimentResult:
    """Run the full pipeline for one problem/variant and return its result.

    ``overrides`` is an :class:`ExperimentConfig` or a dict of its fields.
    Deterministic for a fixed seed; only the timing fields vary between runs.
    """
    variant = canonical_variant(variant)
    cfg = overrides if isinstance(overrides, ExperimentConfig) else ExperimentConfig().with_overrides(overrides)
    n_sub, n_pts = cfg.nodes or problem.default_nodes
    rule = _stage("quadrature", box_rule, problem.domain, n_sub, n_pts)

    net_cfg = NetworkConfig(problem.dim, cfg.depth, cfg.width, cfg.subspace_dim, cfg.seed,
                            subspace_activation=cfg.subspace_activation)
    net = _stage("init", init, net_cfg)
    train_cfg = TrainConfig(variant, cfg.epsilon, cfg.n_max, cfg.drm_epochs,
                            lift_during_training=cfg.lift_during_training)

    t0 = time.perf_counter()
    trained, report = _stage("train", train, net, problem, rule, train_cfg, log_path=log_path)
    t1 = time.perf_counter()
    basis = galerkin.LiftedBasis(freeze_basis(trained), problem.lift, problem.domain)
    system = _stage("assemble", galerkin.assemble, basis, problem.form, problem.f, rule)
    t2 = time.perf_counter()
    omega = _stage("solve", galerkin.solve, system, cfg.rank_tol)
    t3 = time.perf_counter()

    grid = evaluation_grid(problem.domain)
    uh = galerkin.evaluate_uh(basis, omega, grid)
    us = problem.exact(grid)
    err = _stage("metric", relative_l2, uh, us, grid)
    log.info("%s %s: rel_l2=%.3e epochs=%d (%s) rank=%d/%d", problem.name, variant, err, report.epochs_run,
             report.stop_reason, system.rank, system.size)

    result = ExperimentResult(
        problem=problem.name,
        variant=variant,
        config={**asdict(cfg), "nodes": [n_sub, n_pts]},
        rel_l2_error=err,
        epochs=report.epochs_run,
        stop_reason=report.stop_reason,
        initial_loss=report.initial_loss,
        final_loss=report.final_loss,
        rank=int(system.rank),
        residual_norm=float(system.residual_norm),
        n_nodes=rule.size,
        train_seconds=t1 - t0,
        assemble_seconds=t2 - t1,
        solve_seconds=t3 - t2,
        problem_params=dict(problem.params),
    )
    if out:
        result.write_json(out)
    if dump_system:
        galerkin.dump_system(system, dump_system)
    if dump_pointwise:
        write_pointwise(dump_pointwise, grid, uh, us)
    return result


def write_pointwise(path, grid, uh, us) -> None:
    """CSV of ``x..., u_h, u_exact, abs_error`` on the evaluation grid."""
    d = grid.shape[1]
    names = ["x", "y", "z"][:d] if d <= 3 else [f"x{i}" for i in range(d)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["u_h", "u_exact", "abs_error"])
        for row, a, b in zip(grid, uh, us):
            w.writerow([*map(repr, row.tolist()), repr(float(a)), repr(float(b)), repr(abs(float(a - b)))])


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


@dataclass
class SweepCell:
    row: int
    col: int
    result: ExperimentResult | None = None
    error: str | None = None


@dataclass
class SweepTable:
    problem: str
    variant: str
    row_kind: str
    rows: list
    cols: list
    cells: list = field(default_factory=list)

    def cell(self, row, col) -> SweepCell:
        for c in self.cells:
            if c.row == row and c.col == col:
                return c
        raise KeyError((row, col))

    def to_csv(self, path) -> None:
        """Table layout: one error line and one epochs line per row value."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([self.row_kind, "metric"] + [f"M={c}" for c in self.cols])
            for r in self.rows:
                errs, eps = [], []
                for c in self.cols:
                    cell = self.cell(r, c)
                    if cell.result is None:
                        errs.append(f"failed: {cell.error}")
                        eps.append("")
                    else:
                        errs.append(f"{cell.result.rel_l2_error:.2e}")
                        eps.append(str(cell.result.epochs))
                w.writerow([r, "rel_l2"] + errs)
                w.writerow([r, "epochs"] + eps)


def run_sweep(problem: ProblemSpec, variant: str, rows, cols, row_kind: str = "points", base=None,
              pts_per_sub: int | None = None, workers: int = 1) -> SweepTable:
    """One experiment per (row, M) cell.

    ``row_kind="points"``: rows are node counts per axis, split into
    subintervals of ``pts_per_sub`` Gauss points (default: the problem's).
    ``row_kind="depth"``: rows are hidden-layer counts. Failing cells are
    recorded and the sweep continues. Cells are independent, so
    ``workers > 1`` runs them on a thread pool with the same results.
    """
    if row_kind not in ("points", "depth"):
        raise ConfigurationError(f"row_kind must be 'points' or 'depth', got {row_kind!r}")
    base = base if isinstance(base, ExperimentConfig) else ExperimentConfig().with_overrides(base)
    npts = pts_per_sub or (base.nodes or problem.default_nodes)[1]
    table = SweepTable(problem.name, canonical_variant(variant), row_kind, list(rows), list(cols))

    def one(r, m):
        if row_kind == "points":
            if r % npts:
                return SweepCell(r, m, error=f"{r} points is not a multiple of {npts}")
            cfg = replace(base, nodes=(r // npts, npts), subspace_dim=int(m))
        else:
            cfg = replace(base, depth=int(r), subspace_dim=int(m))
        try:
            return SweepCell(r, m, run_experiment(problem, variant, cfg))
        except Exception as exc:  # recorded per cell; the sweep goes on
            log.warning("sweep cell (%s, %s) failed: %s", r, m, exc)
            return SweepCell(r, m, error=str(exc))

    jobs = [(r, m) for r in table.rows for m in table.cols]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            table.cells = list(pool.map(lambda job: one(*job), jobs))
    else:
        table.cells = [one(r, m) for r, m in jobs]
    return table
