import math

import numpy as np
import pytest

from gwexplore.errors import ResourceLimitError, ValidationError
from gwexplore.paths import local_time
from gwexplore.samplers import (FellerPath, RateParams, RenormParams,
                                feller_values_at, population_values_at,
                                renormalized_crossings, sample_feller,
                                sample_forest, sample_path,
                                sample_population,
                                sample_renormalized_path)


def test_rate_params_validation():
    with pytest.raises(ValidationError):
        RateParams(0.0, 1.0)
    with pytest.raises(ValidationError):
        RateParams(1.0, -1.0)
    with pytest.raises(ValidationError):
        RateParams(1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        RateParams(1.0, 1.0, 2.0, 0)
    # supercritical without a ceiling cannot be path-sampled
    with pytest.raises(ValidationError):
        RateParams(1.0, 2.0, math.inf)
    RateParams(1.0, 2.0, 5.0)
    RateParams(1.0, 1.0, math.inf)


def test_renorm_params_derived_quantities():
    rn = RenormParams(sigma=2.0, alpha=0.5, beta=0.25, big_n=100, x=1.5)
    assert rn.mu_n == 2.0 * 100 + 0.5
    assert rn.lambda_n == 2.0 * 100 + 0.25
    assert rn.slope == 200.0
    assert rn.ancestors == 150
    assert rn.local_time_scale == pytest.approx(0.01)
    with pytest.raises(ValidationError):
        RenormParams(sigma=0.0, alpha=0.0, beta=0.0, big_n=10, x=1.0)
    with pytest.raises(ValidationError):
        RenormParams(sigma=2.0, alpha=-1.0, beta=0.0, big_n=10, x=1.0)
    with pytest.raises(ValidationError):
        # floor(N x) = 0: nothing to explore
        RenormParams(sigma=2.0, alpha=0.0, beta=0.0, big_n=3, x=0.2)


def test_renorm_supercritical_needs_ceiling_for_paths():
    rn = RenormParams(sigma=2.0, alpha=1.0, beta=0.5, big_n=10, x=1.0)
    with pytest.raises(ValidationError):
        sample_renormalized_path(rn, seed=0)
    with pytest.raises(ValidationError):
        renormalized_crossings(rn, np.array([0.5]), seed=0)
    # the population sampler has no such restriction
    sample_population(rn, 0.5, seed=0)


def test_sample_path_shape():
    params = RateParams(1.0, 1.0, 2.0, 4)
    path = sample_path(params, seed=0)
    assert path.excursion_count == 4
    assert path.heights[0] == 0.0 and path.heights[-1] == 0.0
    assert path.max_height <= 2.0
    assert path.ceiling_a == 2.0


def test_sample_path_determinism():
    params = RateParams(1.2, 1.0, 3.0, 2)
    a = sample_path(params, seed=9, stream=4)
    b = sample_path(params, seed=9, stream=4)
    assert a == b
    assert a != sample_path(params, seed=9, stream=5)


def test_tiny_birth_rate_gives_single_triangles():
    params = RateParams(1.0, 1e-9, math.inf, 5)
    path = sample_path(params, seed=1)
    assert path.n_extrema == 11  # five triangles

    forest = sample_forest(params, seed=1)
    assert len(forest.nodes) == 5


def test_no_offspring_probability():
    # the first individual dies childless with probability lam/(lam+mu);
    # single-triangle excursions count them (subcritical rates keep the
    # excursion sizes light-tailed)
    params = RateParams(1.2, 1.0, math.inf, 1)
    target = 1.2 / 2.2
    n = 5000
    se = math.sqrt(target * (1 - target) / n)
    hits = sum(sample_path(params, seed=0, stream=r).n_extrema == 3
               for r in range(n))
    assert abs(hits / n - target) < 4 * se

    hits = sum(len(sample_forest(params, seed=0, stream=r).nodes) == 1
               for r in range(n))
    assert abs(hits / n - target) < 4 * se


def test_forest_respects_ceiling():
    params = RateParams(0.5, 1.0, 1.5, 10)
    forest = sample_forest(params, seed=2)
    assert np.all(forest.deaths <= 1.5)
    assert np.any(forest.deaths == 1.5)  # killings happen at these rates
    assert forest.m == 10


def test_forest_guard():
    with pytest.raises(ResourceLimitError):
        sample_forest(RateParams(0.5, 1.0, 50.0, 1), seed=3, node_guard=10)


def test_population_starts_at_floor_nx():
    rn = RenormParams(sigma=2.0, alpha=0.0, beta=0.0, big_n=7, x=1.4)
    traj = sample_population(rn, 0.5, seed=0)
    assert traj.initial_count == 9
    vals = population_values_at(rn, np.array([1e-9]), seed=1)
    assert vals.dtype == np.int64


def test_population_values_match_trajectory():
    rn = RenormParams(sigma=2.0, alpha=0.5, beta=0.0, big_n=5, x=1.0)
    at = np.array([0.1, 0.3, 0.7, 1.0])
    vals = population_values_at(rn, at, seed=4, stream=2)
    traj = sample_population(rn, 1.0, seed=4, stream=2)
    assert np.array_equal(vals, traj.values_at(at))


def test_renormalized_path_reduces_to_plain_sampler_at_n1():
    rn = RenormParams(sigma=2.0, alpha=0.25, beta=0.5, big_n=1, x=1.0,
                      ceiling_a=3.0)
    plain = RateParams(2.0 + 0.5, 2.0 + 0.25, 3.0, 1)
    for seed in range(5):
        a = sample_renormalized_path(rn, seed=seed, stream=77)
        b = sample_path(plain, slope_p=2.0, seed=seed, stream=77)
        assert np.array_equal(a.heights, b.heights)
        assert a.slope_p == b.slope_p


def test_renormalized_level_zero_local_time_is_exact():
    rn = RenormParams(sigma=2.0, alpha=0.0, beta=0.0, big_n=20, x=1.0,
                      ceiling_a=4.0)
    for seed in range(3):
        path = sample_renormalized_path(rn, seed=seed)
        assert path.excursion_count == rn.ancestors
        assert local_time(path, 0.0, scale=rn.local_time_scale) \
            == pytest.approx(rn.local_time_scale * rn.ancestors)


def test_renormalized_min_duration_mode():
    rn = RenormParams(sigma=2.0, alpha=0.0, beta=0.0, big_n=10, x=1.0,
                      ceiling_a=4.0)
    path = sample_renormalized_path(rn, seed=5, min_duration=1.0)
    assert path.duration >= 1.0
    assert path.heights[-1] == 0.0


def test_crossings_match_stored_path():
    rn = RenormParams(sigma=2.0, alpha=0.0, beta=0.25, big_n=10, x=1.0,
                      ceiling_a=2.0)
    levels = np.array([0.25, 0.5, 1.0])
    for seed in range(4):
        res = renormalized_crossings(rn, levels, seed=seed, stream=3)
        path = sample_renormalized_path(rn, seed=seed, stream=3)
        from gwexplore.paths import ceiling_local_time, crossing_count
        for j, lv in enumerate(levels):
            up, down = crossing_count(path, float(lv))
            assert res["up"][j] == up
            assert res["down"][j] == down
        assert res["returns"] == path.excursion_count
        assert res["ceiling_hits"] == ceiling_local_time(path)
        assert res["travel"] == pytest.approx(
            path.duration * path.slope_p)


def test_crossings_rejects_levels_outside_range():
    rn = RenormParams(sigma=2.0, alpha=0.0, beta=0.0, big_n=10, x=1.0,
                      ceiling_a=2.0)
    with pytest.raises(ValidationError):
        renormalized_crossings(rn, np.array([0.0, 1.0]), seed=0)
    with pytest.raises(ValidationError):
        renormalized_crossings(rn, np.array([2.0]), seed=0)


def test_feller_path_basics():
    fp = sample_feller(1.0, 0.5, 0.25, 2.0, 1.0, 1e-3, seed=0)
    assert fp.values.shape[0] == 1001
    assert fp.values[0] == 1.0
    assert np.all(fp.values >= 0.0)
    assert fp.times[-1] == pytest.approx(1.0)
    assert fp.value_at(0.5) == fp.values[500]
    with pytest.raises(ValidationError):
        fp.value_at(0.0005)


def test_feller_absorbed_at_zero():
    fp = sample_feller(0.0, 1.0, 0.0, 2.0, 1.0, 1e-3, seed=1)
    assert np.all(fp.values == 0.0)


def test_feller_determinism_and_values_at():
    at = np.array([0.25, 0.5, 1.0])
    a = feller_values_at(1.0, 1.0, 0.5, 2.0, 1e-3, at, seed=3, stream=1)
    b = feller_values_at(1.0, 1.0, 0.5, 2.0, 1e-3, at, seed=3, stream=1)
    assert np.array_equal(a, b)
    fp = sample_feller(1.0, 1.0, 0.5, 2.0, 1.0, 1e-3, seed=3, stream=1)
    assert np.array_equal(a, fp.values[[250, 500, 1000]])
    with pytest.raises(ValidationError):
        feller_values_at(1.0, 1.0, 0.5, 2.0, 1e-3, np.array([0.0005]),
                         seed=3)


def test_feller_mean_matches_moment_ode():
    # E X_t = x exp((alpha-beta) t)
    n = 4000
    vals = np.array([
        float(feller_values_at(1.0, 0.5, 0.0, 1.0, 1e-3, np.array([1.0]),
                               seed=0, stream=r)[0])
        for r in range(n)])
    target = math.exp(0.5)
    se = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - target) < 4 * se


def test_feller_validation():
    with pytest.raises(ValidationError):
        sample_feller(-1.0, 0.0, 0.0, 2.0, 1.0, 1e-3)
    with pytest.raises(ValidationError):
        sample_feller(1.0, 0.0, 0.0, 0.0, 1.0, 1e-3)
    with pytest.raises(ValidationError):
        sample_feller(1.0, 0.0, 0.0, 2.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        FellerPath(1.0, 0.0, 0.0, 2.0, 1e-3, np.array([2.0, 1.0]))


def test_branching_mean_alive_count():
    # per ancestor: E alive(t) = exp((mu - lam) t)
    from gwexplore.trees import alive_count
    params = RateParams(1.2, 1.0, math.inf, 10)
    n = 2000
    t_eval = 1.0
    target = 10 * math.exp(-0.2)
    vals = np.empty(n)
    for r in range(n):
        forest = sample_forest(params, seed=0, stream=r)
        vals[r] = alive_count(forest, t_eval)
    se = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - target) < 4 * se
