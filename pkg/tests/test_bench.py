import json

import numpy as np
import pytest

from snnw.bench.experiment import ExperimentConfig, parse_nodes, run_experiment, run_sweep
from snnw.bench.metrics import evaluation_grid, relative_l2
from snnw.bench.problems import get_problem, problem_anisotropic, problem_helmholtz, problem_poisson2d
from snnw.errors import ConfigurationError, MetricError, StageError

PI = np.pi
PROBLEMS = [problem_helmholtz(), problem_poisson2d(), problem_anisotropic(1.0, 1e6)]

# a quick configuration for pipeline tests
TINY = dict(depth=1, width=10, subspace_dim=10, n_max=20, drm_epochs=20, nodes=(8, 4))


def test_helmholtz_values():
    p = problem_helmholtz()
    assert p.exact(np.array([[0.5]]))[0] == pytest.approx(-1.0, abs=1e-15)
    assert np.abs(p.exact(np.array([[0.0], [2.0]]))).max() <= 1e-15
    x = np.linspace(0.1, 1.9, 9)
    h = 1e-4
    # five-point second difference of u* against the source
    u = lambda t: p.exact(t[:, None])
    d2 = (-u(x + 2 * h) + 16 * u(x + h) - 30 * u(x) + 16 * u(x - h) - u(x - 2 * h)) / (12 * h * h)
    np.testing.assert_allclose(-d2 + u(x), p.f(x[:, None]), rtol=1e-6, atol=1e-5)


def test_poisson_values():
    p = problem_poisson2d()
    c = np.array([[0.5, 0.5]])
    assert p.exact(c)[0] == pytest.approx(1.0, abs=1e-15)
    assert p.f(c)[0] == pytest.approx(2 * PI**2, rel=1e-15)
    assert p.f(c)[0] == pytest.approx(19.7392, abs=1e-4)
    t = np.linspace(0, 1, 11)
    edges = np.concatenate([np.c_[t, 0 * t], np.c_[t, 0 * t + 1], np.c_[0 * t, t], np.c_[0 * t + 1, t]])
    assert np.abs(p.exact(edges)).max() <= 1e-15


def test_anisotropic_values():
    p = problem_anisotropic(1.0, 10.0)
    assert p.f(np.array([[0.5, 0.5]]))[0] == pytest.approx(11 * PI**2, rel=1e-15)
    q, r = problem_anisotropic(1.0, 1.0), problem_poisson2d()
    x = np.random.default_rng(0).uniform(size=(20, 2))
    np.testing.assert_array_equal(q.f(x), r.f(x))
    assert q.form.kappa == r.form.kappa
    assert get_problem("anisotropic", 1e6).form.kappa == (1.0, 1e6)
    with pytest.raises(ConfigurationError):
        problem_anisotropic(-1.0, 1.0)
    with pytest.raises(ConfigurationError):
        get_problem("wave")


@pytest.mark.parametrize("p", PROBLEMS, ids=lambda p: p.name)
def test_manufactured_consistency(p):
    from scipy.stats import qmc  # test-only dependency

    x = qmc.Halton(d=p.dim, seed=0).random(100)
    lo = np.array([a for a, _ in p.domain])
    hi = np.array([b for _, b in p.domain])
    x = lo + (hi - lo) * x
    r = p.residual(p.exact_jet(x), x)
    assert np.abs(r).max() <= 1e-8 * max(1.0, max(p.form.kappa))


def test_relative_l2_examples():
    grid = evaluation_grid(((0.0, 1.0),))
    us = lambda x: np.sin(PI * x[:, 0])
    assert relative_l2(us, us, grid) == 0.0
    assert relative_l2(lambda x: 1.01 * us(x), us, grid) == pytest.approx(0.01, abs=1e-12)
    uh = lambda x: us(x) + 0.001 * np.sin(2 * PI * x[:, 0])
    num = sum((uh(g[None])[0] - us(g[None])[0]) ** 2 for g in grid)
    den = sum(us(g[None])[0] ** 2 for g in grid)
    assert relative_l2(uh, us, grid) == pytest.approx(np.sqrt(num / den), abs=1e-12)


def test_relative_l2_errors():
    grid = evaluation_grid(((0.0, 1.0),), 5)
    with pytest.raises(MetricError):
        relative_l2(np.ones(5), np.zeros(5), grid)
    with pytest.raises(ConfigurationError):
        relative_l2(np.ones(1), np.ones(1), grid[:1])


def test_evaluation_grids():
    assert evaluation_grid(((0.0, 2.0),)).shape == (1001, 1)
    g = evaluation_grid(((0, 1), (0, 1)))
    assert g.shape == (101 * 101, 2)
    assert g.min() == 0.0 and g.max() == 1.0


def test_parse_nodes():
    assert parse_nodes("100x10") == (100, 10)
    assert parse_nodes([16, 4]) == (16, 4)
    with pytest.raises(ConfigurationError):
        parse_nodes("16-4")


def test_unknown_override():
    with pytest.raises(ConfigurationError):
        ExperimentConfig().with_overrides({"learning_rate": 1.0})


@pytest.mark.parametrize("variant", ["p", "g", "r"])
def test_pipeline_smoke(variant, tmp_path):
    res = run_experiment(problem_helmholtz(), variant, TINY, out=tmp_path / "r.json",
                         dump_system=tmp_path / "s.json", dump_pointwise=tmp_path / "u.csv",
                         log_path=tmp_path / "log.csv")
    assert np.isfinite(res.rel_l2_error) and res.rank >= 1
    rec = json.loads((tmp_path / "r.json").read_text())
    assert rec["schema"] == "snnw-result/1" and rec["variant"] == res.variant
    header = (tmp_path / "u.csv").read_text().splitlines()[0]
    assert header == "x,u_h,u_exact,abs_error"
    assert len((tmp_path / "u.csv").read_text().splitlines()) == 1002


def test_one_function_subspace():
    res = run_experiment(problem_poisson2d(), "p", {**TINY, "subspace_dim": 1})
    assert res.rel_l2_error < 1.0


def test_results_are_reproducible():
    a = run_experiment(problem_helmholtz(), "g", TINY).to_dict(timing=False)
    b = run_experiment(problem_helmholtz(), "g", TINY).to_dict(timing=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_stage_errors_are_labelled():
    with pytest.raises(StageError, match="quadrature"):
        run_experiment(problem_helmholtz(), "p", {**TINY, "nodes": (8, 40)})


def test_sweep_layout(tmp_path):
    table = run_sweep(problem_helmholtz(), "p", [20, 25], [5, 8], "points", TINY, pts_per_sub=4)
    assert len(table.cells) == 4
    assert table.cell(25, 5).error and table.cell(20, 8).result is not None
    table.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "points,metric,M=5,M=8"
    assert lines[1].startswith("20,rel_l2,") and lines[2].startswith("20,epochs,")
    assert "failed" in lines[3]


def test_sweep_threads_match_serial():
    serial = run_sweep(problem_helmholtz(), "r", [1, 2], [4], "depth", TINY)
    threaded = run_sweep(problem_helmholtz(), "r", [1, 2], [4], "depth", TINY, workers=2)
    assert [c.result.rel_l2_error for c in serial.cells] == [c.result.rel_l2_error for c in threaded.cells]


def test_empty_sweep(tmp_path):
    table = run_sweep(problem_helmholtz(), "p", [], [300])
    assert table.cells == []
    table.to_csv(tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text().splitlines() == ["points,metric,M=300"]
