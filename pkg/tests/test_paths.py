import math

import numpy as np
import pytest

from gwexplore.errors import ValidationError
from gwexplore.paths import (ExplorationPath, LevelStepFunction,
                             ceiling_local_time, crossing_count,
                             excise_above, local_time, local_time_profile,
                             midpoint_levels, occupation_integral, read_path,
                             tau, write_path)
from gwexplore.samplers import RateParams, sample_path

# reference path: up to 3, down to 1, up to 2.5, down to 0, slope 2
HEIGHTS = [0.0, 3.0, 1.0, 2.5, 0.0]


def fixture_path(**kw):
    return ExplorationPath(HEIGHTS, 2.0, **kw)


def test_times_derived_from_heights():
    path = fixture_path()
    assert np.array_equal(path.times, [0.0, 1.5, 2.5, 3.25, 4.5])
    assert path.duration == 4.5
    assert path.n_extrema == 5
    assert path.max_height == 3.0
    assert path.excursion_count == 1


def test_heights_immutable():
    path = fixture_path()
    with pytest.raises(ValueError):
        path.heights[1] = 9.0


@pytest.mark.parametrize("bad", [
    [0.0, 1.0],                      # even length
    [0.5, 1.0, 0.0],                 # does not start at zero
    [0.0, 1.0, 0.5],                 # does not end at zero
    [0.0, -1.0, 0.0],                # negative
    [0.0, 1.0, 2.0, 3.0, 0.0],       # not alternating
    [0.0, 3.0, 1.0, 1.0, 0.0],       # max equals min neighbor
    [0.0, 3.0, 1.0, 2.5, 1.0, 2.0, 0.0],  # duplicate minima in excursion
    [0.0, math.inf, 0.0],            # nonfinite
])
def test_rejects_malformed_extrema(bad):
    with pytest.raises(ValidationError):
        ExplorationPath(bad, 2.0)


def test_rejects_heights_above_ceiling():
    with pytest.raises(ValidationError):
        ExplorationPath(HEIGHTS, 2.0, ceiling_a=2.0)
    # exactly at the ceiling is fine (reflected maxima sit there)
    ExplorationPath(HEIGHTS, 2.0, ceiling_a=3.0)


def test_rejects_wrong_excursion_count():
    with pytest.raises(ValidationError):
        ExplorationPath(HEIGHTS, 2.0, excursion_count=2)
    assert fixture_path(excursion_count=1).excursion_count == 1


def test_duplicate_minima_allowed_across_excursions():
    # the same minimum height may repeat in different excursions
    ExplorationPath([0.0, 2.0, 1.0, 3.0, 0.0, 2.0, 1.0, 3.0, 0.0], 2.0)


def test_crossing_counts():
    path = fixture_path()
    assert crossing_count(path, 2.0) == (2, 2)
    assert crossing_count(path, 2.7) == (1, 1)
    assert crossing_count(path, 3.1) == (0, 0)
    # a minimum exactly at the level closes and reopens a pair
    assert crossing_count(path, 1.0) == (2, 2)
    # a maximum exactly at the level does not cross
    assert crossing_count(path, 3.0) == (0, 0)
    with pytest.raises(ValidationError):
        crossing_count(path, 0.0)


def test_local_time_values():
    path = fixture_path()
    assert local_time(path, 2.0) == 2
    assert local_time(path, 2.7) == 1
    assert local_time(path, 0.0) == 1
    assert local_time(path, 0.5) == 1
    assert local_time(path, 5.0) == 0
    assert local_time(path, 2.0, scale=0.25) == 0.5


def test_local_time_partial_horizon():
    path = fixture_path()
    # at t=0.5 the path has only reached height 1 on its first ascent
    assert crossing_count(path, 0.5, up_to=0.5) == (1, 0)
    assert local_time(path, 0.5, up_to=0.5) == 0
    # at t=2.0 the path is at height 2 on the first descent
    assert crossing_count(path, 2.5, up_to=2.0) == (1, 1)
    assert local_time(path, 2.5, up_to=2.0) == 1
    assert local_time(path, 0.0, up_to=4.4) == 0
    assert local_time(path, 0.0, up_to=4.5) == 1
    with pytest.raises(ValidationError):
        local_time(path, 1.0, up_to=5.0)


def test_midpoint_levels():
    path = fixture_path()
    assert np.array_equal(midpoint_levels(path), [0.5, 1.75, 2.75])


def test_profile_matches_pointwise_local_time():
    path = fixture_path()
    prof = local_time_profile(path)
    for lv, val in zip(prof.levels, prof.values):
        assert val == local_time(path, float(lv))
    assert prof.ceiling_value == 0.0


def test_profile_ceiling_value():
    path = ExplorationPath([0.0, 2.0, 1.0, 2.0, 0.0], 2.0, ceiling_a=2.0)
    prof = local_time_profile(path)
    assert prof.ceiling_value == 2
    assert ceiling_local_time(path) == 2
    assert ceiling_local_time(path, up_to=1.2) == 1
    assert ceiling_local_time(fixture_path()) == 0.0


def test_step_function_evaluation():
    g = LevelStepFunction([0.0, 1.0, 3.0], [2.0, 0.5])
    assert g(0.5) == 2.0
    assert g(1.0) == 0.5
    assert g(3.0) == 0.0
    assert g(-1.0) == 0.0
    assert g.antiderivative(0.5) == 1.0
    assert g.antiderivative(2.0) == 2.5
    assert g.antiderivative(10.0) == 3.0
    assert g.antiderivative(-1.0) == 0.0
    with pytest.raises(ValidationError):
        LevelStepFunction([0.0, 1.0], [1.0, 2.0])


def test_occupation_integral_fixture():
    path = fixture_path()
    assert occupation_integral(path, LevelStepFunction.indicator(0, 3)) \
        == path.duration
    assert occupation_integral(
        path, LevelStepFunction.indicator(1.0, 2.5)) == 3.0
    zero = LevelStepFunction([0.0, 5.0], [0.0])
    assert occupation_integral(path, zero) == 0.0
    with pytest.raises(ValidationError):
        occupation_integral(path, lambda y: y)


def test_occupation_equals_level_integral_of_local_time():
    # integral of g along the path == integral of g(t) L(t) dt over levels;
    # L is constant between consecutive distinct extrema heights, so the
    # right side is exact too
    params = RateParams(1.0, 1.0, 2.5, 2)
    g = LevelStepFunction([0.0, 0.4, 1.1, 2.2], [1.0, 3.0, 0.25])
    for seed in range(5):
        path = sample_path(params, seed=seed)
        lhs = occupation_integral(path, g)
        uniq = np.unique(path.heights)
        mids = (uniq[:-1] + uniq[1:]) / 2.0
        rhs = 0.0
        for lo, hi, mid in zip(uniq[:-1], uniq[1:], mids):
            band = g.antiderivative(hi) - g.antiderivative(lo)
            rhs += band * local_time(path, float(mid))
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_profile_values_are_scale_multiples():
    params = RateParams(1.2, 1.0, math.inf, 3)
    for seed in range(3):
        path = sample_path(params, seed=seed)
        prof = local_time_profile(path, scale=0.125)
        ratios = prof.values / 0.125
        assert np.array_equal(ratios, np.round(ratios))


def test_tau_returns_to_zero():
    path = fixture_path()
    assert tau(path, 1) == 4.5
    double = ExplorationPath([0.0, 3.0, 1.0, 2.5, 0.0, 1.0, 0.0], 2.0)
    assert tau(double, 1) == 4.5
    assert tau(double, 2) == 5.5
    with pytest.raises(ValidationError):
        tau(double, 3)
    with pytest.raises(ValidationError):
        tau(double, 0)


def test_excise_fixture():
    path = fixture_path()
    cut = excise_above(path, 2.0)
    assert np.array_equal(cut.heights, [0.0, 2.0, 1.0, 2.0, 0.0])
    assert cut.ceiling_a == 2.0
    assert cut.slope_p == path.slope_p
    assert cut.excursion_count == path.excursion_count


def test_excise_above_max_only_sets_ceiling():
    path = fixture_path()
    cut = excise_above(path, 4.0)
    assert np.array_equal(cut.heights, path.heights)
    assert cut.ceiling_a == 4.0


def test_excise_deletes_whole_subexcursions():
    # both maxima exceed the level and the interior minimum does too, so
    # the middle is glued away entirely
    path = ExplorationPath([0.0, 3.0, 2.0, 2.5, 0.0], 2.0)
    cut = excise_above(path, 1.5)
    assert np.array_equal(cut.heights, [0.0, 1.5, 0.0])
    assert cut.excursion_count == 1


def test_excise_at_minimum_height_is_an_error():
    with pytest.raises(ValidationError):
        excise_above(fixture_path(), 1.0)
    with pytest.raises(ValidationError):
        excise_above(fixture_path(), 0.0)


def test_excise_idempotent_and_projective():
    params = RateParams(1.0, 1.0, math.inf, 2)
    for seed in range(6):
        path = sample_path(params, seed=seed)
        once = excise_above(path, 1.7)
        assert excise_above(once, 1.7) == once
        via_wide = excise_above(excise_above(path, 2.9), 1.7)
        assert via_wide == once
        assert once.excursion_count == path.excursion_count


def test_excision_preserves_profile_below_the_level():
    params = RateParams(1.0, 1.0, math.inf, 1)
    for seed in range(4):
        path = sample_path(params, seed=seed)
        cut = excise_above(path, 1.3)
        for lv in (0.2, 0.7, 1.1):
            assert local_time(cut, lv) == local_time(path, lv)


def test_path_equality():
    assert fixture_path() == fixture_path()
    assert fixture_path() != fixture_path(ceiling_a=3.0)
    assert fixture_path() != ExplorationPath(HEIGHTS, 1.0)


def test_write_read_round_trip(tmp_path):
    path = fixture_path(ceiling_a=3.0)
    file = tmp_path / "p.csv"
    write_path(path, file, seed=11, params={"lambda": 1.0})
    back, sidecar = read_path(file)
    assert back == path
    assert sidecar["seed"] == 11
    assert sidecar["a"] == 3.0
    assert sidecar["params"] == {"lambda": 1.0}


def test_write_read_infinite_ceiling(tmp_path):
    path = fixture_path()
    file = tmp_path / "p.csv"
    write_path(path, file)
    back, sidecar = read_path(file)
    assert back == path
    assert math.isinf(back.ceiling_a)
    assert sidecar["a"] is None


def test_read_rejects_missing_sidecar(tmp_path):
    file = tmp_path / "p.csv"
    file.write_text("time,height\n0,0\n")
    with pytest.raises(ValidationError):
        read_path(file)


def test_read_rejects_inconsistent_times(tmp_path):
    path = fixture_path()
    file = tmp_path / "p.csv"
    write_path(path, file)
    text = file.read_text().replace("1.5,3", "1.25,3")
    file.write_text(text)
    with pytest.raises(ValidationError):
        read_path(file)


def test_sampled_round_trip_exact(tmp_path):
    params = RateParams(1.0, 1.0, 2.0, 4)
    path = sample_path(params, seed=3)
    file = tmp_path / "p.csv"
    write_path(path, file, seed=3)
    back, _ = read_path(file)
    assert back == path
    assert np.array_equal(back.times, path.times)
