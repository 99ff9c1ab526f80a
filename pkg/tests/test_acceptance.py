"""Acceptance suite: ten end-to-end checks at committed seeds.

Each test prints one ``[criterion N] PASS/FAIL`` line (capture is
disabled around the print, so the lines show up in any pytest run)
and asserts the same condition.
"""

import math
import time

import numpy as np
import pytest

from gwexplore import (
    RateParams,
    RenormParams,
    alive_count,
    feller_convergence_report,
    forest_to_path,
    martingale_diagnostic,
    moment_report,
    path_to_forest,
    sample_feller,
    sample_forest,
    sample_path,
    verify_discrete_rk,
    verify_excision,
    verify_law_equality,
    verify_rk_limit,
)
from gwexplore.cli import main as cli_main

TIME_TOL = 1e-12

THREE_REGIMES = (
    RateParams(1.2, 1.0, math.inf, 1),
    RateParams(1.0, 1.0, 4.0, 1),
    RateParams(0.8, 1.0, 2.0, 1),
)


@pytest.fixture
def announce(capsys):
    def _announce(number, ok, detail):
        with capsys.disabled():
            print("[criterion %d] %s  %s"
                  % (number, "PASS" if ok else "FAIL", detail))
        return ok
    return _announce


def assert_forests_match(left, right):
    """Topology identical, birth and death times within TIME_TOL."""
    assert len(left.roots) == len(right.roots)
    assert left.ceiling_a == right.ceiling_a
    by_id_l = {n.id: n for n in left.nodes}
    by_id_r = {n.id: n for n in right.nodes}
    stack = list(zip(left.roots, right.roots))
    seen = 0
    while stack:
        lid, rid = stack.pop()
        a, b = by_id_l[lid], by_id_r[rid]
        assert abs(a.birth_time - b.birth_time) <= TIME_TOL
        assert abs(a.death_time - b.death_time) <= TIME_TOL
        kids_l = sorted(a.children, key=lambda i: by_id_l[i].birth_time)
        kids_r = sorted(b.children, key=lambda i: by_id_r[i].birth_time)
        assert len(kids_l) == len(kids_r)
        stack.extend(zip(kids_l, kids_r))
        seen += 1
    assert seen == len(left.nodes) == len(right.nodes)


def assert_paths_match(left, right):
    assert left.slope_p == right.slope_p
    assert left.ceiling_a == right.ceiling_a
    assert left.n_extrema == right.n_extrema
    assert np.max(np.abs(np.asarray(left.heights)
                         - np.asarray(right.heights))) <= TIME_TOL
    assert np.max(np.abs(np.asarray(left.times)
                         - np.asarray(right.times))) <= TIME_TOL


def test_criterion_01_bijection_round_trips(announce):
    n = 10000
    start = time.perf_counter()
    for r in range(n):
        params = RateParams(1.0, 1.0, 2.0, (r % 5) + 1)
        forest = sample_forest(params, seed=0, stream=r)
        assert_forests_match(forest, path_to_forest(forest_to_path(forest)))
    for r in range(n):
        params = RateParams(1.0, 1.0, 2.0, (r % 5) + 1)
        path = sample_path(params, seed=1, stream=r)
        assert_paths_match(path, forest_to_path(path_to_forest(path)))
    elapsed = time.perf_counter() - start
    ok = elapsed < 30.0
    assert announce(
        1, ok, "2x10^4 round trips exact in %.1fs (limit 30s)" % elapsed)


def test_criterion_02_discrete_ray_knight_exact(announce):
    start = time.perf_counter()
    violations = 0
    checked = 0
    for params in THREE_REGIMES:
        rep = verify_discrete_rk(params, replicas=1000, seed=0, workers=1)
        assert rep.passed
        violations += sum(int(row.mean) for row in rep.rows)
        checked += sum(row.n for row in rep.rows)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 60.0
    assert announce(
        2, ok, "0 of %d level checks violated in %.1fs (limit 60s)"
        % (checked, elapsed))


def test_criterion_03_law_equality(announce):
    worst = 1.0
    for params in THREE_REGIMES:
        rep = verify_law_equality(params, replicas=10000, seed=0, workers=1)
        assert rep.passed
        worst = min(worst, min(row.p_adjusted for row in rep.rows))
    ok = worst > 0.001
    assert announce(
        3, ok, "3 statistics x 3 regimes, worst adjusted p = %.4f" % worst)


def test_criterion_04_excision_law(announce):
    params = RateParams(0.8, 1.0, 3.0, 1)
    rep = verify_excision(params, excise_at=1.5, replicas=10000, seed=0,
                          workers=1)
    worst = min(row.p_adjusted for row in rep.rows)
    ok = rep.passed and worst > 0.001
    assert announce(
        4, ok, "clipped-at-1.5 vs direct, worst adjusted p = %.4f" % worst)


def test_criterion_05_branching_mean(announce):
    params = RateParams(1.2, 1.0, math.inf, 10)
    counts = np.array([
        alive_count(sample_forest(params, seed=2, stream=r), 1.0)
        for r in range(10000)], dtype=float)
    summary = moment_report(counts)
    target = 10.0 * math.exp(-0.2)
    ok = abs(summary.mean - target) <= 3.0 * summary.se_mean
    assert announce(
        5, ok, "mean alive(1) = %.4f vs %.4f (3 SE = %.4f)"
        % (summary.mean, target, 3.0 * summary.se_mean))


def test_criterion_06_feller_moments(announce):
    final = np.array([
        sample_feller(1.0, 0.0, 0.0, 2.0, 1.0, 1e-3, seed=3, stream=r)
        .values[-1]
        for r in range(10000)])
    summary = moment_report(final)
    mean_ok = abs(summary.mean - 1.0) <= 3.0 * summary.se_mean
    var_tol = 3.0 * summary.se_variance + 0.05 * 4.0
    var_ok = abs(summary.variance - 4.0) <= var_tol
    ok = mean_ok and var_ok
    assert announce(
        6, ok, "mean X_1 = %.4f (target 1), var = %.4f (target 4 +/- %.3f)"
        % (summary.mean, summary.variance, var_tol))


def test_criterion_07_renormalized_convergence(announce):
    start = time.perf_counter()
    rep = feller_convergence_report(
        sigma=2.0, x=1.0, alpha=1.0, beta=0.5, n_values=(10, 100, 500),
        replicas=5000, horizon=1.0, dt=1e-3, seed=1, workers=1)
    elapsed = time.perf_counter() - start
    dists = {row.statistic: row.ks_distance for row in rep.rows
             if row.ks_distance is not None}
    last = [row for row in rep.rows
            if row.statistic == "ks_vs_diffusion_N_500"][0]
    ok = rep.passed and elapsed < 600.0
    assert announce(
        7, ok, "KS %.4f > %.4f > %.4f, p(500) = %.4f, %.0fs (limit 600s)"
        % (dists["ks_vs_diffusion_N_10"], dists["ks_vs_diffusion_N_100"],
           dists["ks_vs_diffusion_N_500"], last.p_adjusted, elapsed))


def test_criterion_08_generalized_ray_knight(announce):
    renorm = RenormParams(2.0, 0.0, 0.0, 200, 1.0, 4.0)
    rep = verify_rk_limit(renorm, levels=(0.25, 0.5, 1.0), replicas=10000,
                          dt=1e-3, seed=0, workers=1)
    means = [row.mean for row in rep.rows
             if row.statistic.startswith("mean_L")]
    worst_p = min(row.p_adjusted for row in rep.rows
                  if row.p_adjusted is not None)
    ok = rep.passed
    assert announce(
        8, ok, "mean L = %.3f/%.3f/%.3f (target 1), worst adjusted p = %.4f"
        % (means[0], means[1], means[2], worst_p))


def test_criterion_09_martingale_reconstruction(announce):
    renorm = RenormParams(2.0, 0.0, 0.0, 200, 1.0, 4.0)
    rep = martingale_diagnostic(renorm, horizon=1.0, replicas=2000, seed=0,
                                workers=1, eval_times=(0.5, 1.0))
    rows = {row.statistic: row for row in rep.rows}
    bracket = rows["bracket_slope_at_1"].mean
    jump_err = max(rows["interior_jump_relative_error"].mean,
                   rows["boundary_jump_relative_size"].mean)
    ok = rep.passed
    assert announce(
        9, ok, "mean M1 within 3 SE of 0, bracket %.4f (target 1 +/- 10%%),"
        " worst jump error %.2e" % (bracket, jump_err))


def test_criterion_10_determinism(tmp_path, monkeypatch, capsys, announce):
    monkeypatch.chdir(tmp_path)
    cases = [
        ["verify-rk-discrete", "--ceiling", "3", "--replicas", "200"],
        ["verify-law", "--ceiling", "2", "--replicas", "300"],
        ["verify-chop", "--replicas", "300"],
        ["verify-martingale", "--big-n", "20", "--replicas", "100"],
        ["verify-rk-limit", "--big-n", "25", "--levels", "0.5",
         "--replicas", "200"],
    ]
    ok = True
    for argv in cases:
        texts = []
        for workers, out in (("1", "a.json"), ("2", "b.json")):
            code = cli_main(argv + ["--seed", "12", "--workers", workers,
                                    "--out", out])
            assert code == 0
            lines = (tmp_path / out).read_text().splitlines()
            texts.append("\n".join(
                ln for ln in lines if '"generated_at"' not in ln))
        ok = ok and texts[0] == texts[1]
    capsys.readouterr()
    assert announce(
        10, ok, "5 verify verbs byte-identical across reruns and 1 vs 2"
        " workers (timestamp excluded)")
