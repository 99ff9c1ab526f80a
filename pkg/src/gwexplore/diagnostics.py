"""Statistical machinery and the verification experiments.

Each verify_* function runs replicated simulations on independent Philox
substreams, reduces them to per-statistic rows with declared targets and
tolerances, and returns an ExperimentReport whose pass/fail is a pure
function of the recorded numbers.  Replicas may be spread over worker
processes; results are identical for every parallelism degree.
"""

import csv
import functools
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from gwexplore.bijection import path_to_forest
from gwexplore.errors import ValidationError
from gwexplore.paths import (crossing_count, excise_above,
                             local_time_profile, midpoint_levels)
from gwexplore.rng import substream
from gwexplore.samplers import (DEFAULT_PAIR_GUARD, RateParams,
                                RenormParams, feller_values_at,
                                population_values_at,
                                renormalized_crossings, sample_forest,
                                sample_path, sample_renormalized_path)
from gwexplore.trees import alive_count, extinction_time, total_individuals

__all__ = [
    "KS_THRESHOLD",
    "MomentSummary",
    "StatRow",
    "ExperimentReport",
    "moment_report",
    "ks_two_sample",
    "run_replicated",
    "verify_discrete_rk",
    "verify_law_equality",
    "verify_excision",
    "martingale_diagnostic",
    "verify_rk_limit",
    "feller_convergence_report",
]

KS_THRESHOLD = 0.001

# Substream component bands: every sample family in every experiment draws
# from its own band, so families never share randomness even under one seed.
COMP_RK = 1
COMP_LAW_PATH = 2
COMP_LAW_FOREST = 3
COMP_CHOP_WIDE = 4
COMP_CHOP_DIRECT = 5
COMP_MART = 6
COMP_RKL_PATH = 7
COMP_RKL_FELLER = 8
COMP_RKL_POP = 9
COMP_CONV_FELLER = 10
COMP_CONV_POP = 16  # + index of the N value


# ---------------------------------------------------------------------------
# moments and the two-sample KS test

@dataclass(frozen=True)
class MomentSummary:
    n: int
    mean: float
    variance: float
    se_mean: float
    se_variance: float


def moment_report(samples):
    """Sample mean, unbiased variance, and their standard errors.

    The variance standard error uses the fourth central moment:
    Var(s^2) ~ (m4 - s^4 (n-3)/(n-1)) / n.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ValidationError("need at least two samples")
    n = int(x.shape[0])
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    m4 = float(np.mean((x - mean) ** 4))
    var_of_var = (m4 - var * var * (n - 3) / (n - 1)) / n
    return MomentSummary(n=n, mean=mean, variance=var,
                         se_mean=math.sqrt(var / n),
                         se_variance=math.sqrt(max(var_of_var, 0.0)))


def _kolmogorov_sf(lam):
    """Asymptotic Kolmogorov survival function 2 sum (-1)^(k-1) e^(-2k^2 x^2)."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov distance and asymptotic p-value
    (Stephens small-sample correction on the effective sample size)."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValidationError("ks_two_sample needs nonempty samples")
    everything = np.concatenate((a, b))
    cdf_a = np.searchsorted(a, everything, side="right") / a.shape[0]
    cdf_b = np.searchsorted(b, everything, side="right") / b.shape[0]
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = math.sqrt(a.shape[0] * b.shape[0] / (a.shape[0] + b.shape[0]))
    return d, _kolmogorov_sf((en + 0.12 + 0.11 / en) * d)


# ---------------------------------------------------------------------------
# reports

@dataclass
class StatRow:
    """One per-statistic line of an experiment report."""

    statistic: str
    n: int | None = None
    mean: float | None = None
    variance: float | None = None
    se_mean: float | None = None
    se_variance: float | None = None
    ks_distance: float | None = None
    p_value: float | None = None
    p_adjusted: float | None = None
    target: float | None = None
    tolerance: float | None = None
    passed: bool | None = None


_CSV_COLUMNS = ["statistic", "n", "mean", "variance", "se_mean",
                "se_variance", "ks_distance", "p_value", "p_adjusted",
                "target", "tolerance", "passed"]


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float) and math.isinf(value):
        return None
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    return value


@dataclass
class ExperimentReport:
    """Replicated-experiment outcome; pass/fail is a pure function of the
    rows' recorded numbers and declared tolerances."""

    name: str
    params: dict
    replicas: int
    seed: int
    rows: list
    passed: bool
    extra: dict = field(default_factory=dict)
    generated_at: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "params": self.params,
            "replicas": self.replicas,
            "seed": self.seed,
            "passed": self.passed,
            "statistics": [asdict(r) for r in self.rows],
            "extra": self.extra,
            "generated_at": self.generated_at,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write_json(self, file):
        Path(file).write_text(self.to_json())

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for row in self.rows:
            rec = asdict(row)
            cells = []
            for col in _CSV_COLUMNS:
                v = rec[col]
                if v is None:
                    cells.append("")
                elif isinstance(v, bool):
                    cells.append("true" if v else "false")
                elif isinstance(v, float):
                    cells.append(repr(v))
                else:
                    cells.append(str(v))
            writer.writerow(cells)
        return buf.getvalue()

    def write_csv(self, file):
        Path(file).write_text(self.to_csv())


def _finish_report(name, params, replicas, seed, rows, extra=None):
    decided = [r.passed for r in rows if r.passed is not None]
    return ExperimentReport(
        name=name,
        params=_jsonable(params),
        replicas=replicas,
        seed=seed,
        rows=rows,
        passed=bool(decided) and all(decided),
        extra=_jsonable(extra or {}),
        generated_at=datetime.now(timezone.utc).isoformat(),
    )


def _mean_row(name, samples, target, n_se=3.0, slack=0.0):
    ms = moment_report(samples)
    tol = n_se * ms.se_mean + slack * abs(target)
    return StatRow(statistic=name, n=ms.n, mean=ms.mean,
                   variance=ms.variance, se_mean=ms.se_mean,
                   se_variance=ms.se_variance, target=float(target),
                   tolerance=tol, passed=abs(ms.mean - target) <= tol)


def _variance_row(name, samples, target, n_se=3.0, slack=0.0):
    ms = moment_report(samples)
    tol = n_se * ms.se_variance + slack * abs(target)
    return StatRow(statistic=name, n=ms.n, mean=ms.mean,
                   variance=ms.variance, se_mean=ms.se_mean,
                   se_variance=ms.se_variance, target=float(target),
                   tolerance=tol, passed=abs(ms.variance - target) <= tol)


def _ks_row(name, a, b, n_tests):
    d, p = ks_two_sample(a, b)
    padj = min(1.0, p * n_tests)
    return StatRow(statistic=name, n=int(len(a)), ks_distance=d, p_value=p,
                   p_adjusted=padj, passed=padj > KS_THRESHOLD)


def _exact_row(name, violations, checked):
    return StatRow(statistic=name, n=int(checked), mean=float(violations),
                   target=0.0, tolerance=0.0, passed=violations == 0)


# ---------------------------------------------------------------------------
# replica orchestration

def _chunk(task, lo, hi):
    return [task(r) for r in range(lo, hi)]


def run_replicated(task, replicas, workers=1):
    """Evaluate task(r) for r in range(replicas), optionally over worker
    processes.  task must be picklable and deterministic in r; results come
    back ordered by r, so the output is independent of `workers`."""
    if replicas < 1:
        raise ValidationError("need at least one replica")
    if workers is None or workers < 1:
        workers = 1
    workers = min(workers, replicas)
    if workers == 1:
        return _chunk(task, 0, replicas)
    bounds = np.linspace(0, replicas, workers + 1).astype(np.int64)
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_chunk, task, int(lo), int(hi))
                   for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        for fut in futures:
            out.extend(fut.result())
    return out


# ---------------------------------------------------------------------------
# discrete coupling: local time profile == population count, pathwise

def _rk_replica(r, params, seed):
    path = sample_path(params, 2.0, seed, substream(COMP_RK, r))
    forest = path_to_forest(path)
    levels = midpoint_levels(path)
    prof = local_time_profile(path, levels)
    violations = 0
    for lv, val in zip(levels, prof.values):
        if int(val) != alive_count(forest, float(lv)):
            violations += 1
    if math.isfinite(forest.ceiling_a):
        killed = int(np.count_nonzero(forest.deaths == forest.ceiling_a))
    else:
        killed = 0
    ceiling_violation = int(prof.ceiling_value != killed)
    return np.array([levels.shape[0], violations, ceiling_violation],
                    dtype=np.int64)


def verify_discrete_rk(params, replicas=1000, seed=0, workers=1):
    """Exact coupling check: for sampled paths, the local time at every
    midpoint level equals the alive count of the coupled forest, and the
    local time at the ceiling equals the number of killed individuals.
    Any violation fails the report."""
    task = functools.partial(_rk_replica, params=params, seed=seed)
    rows = np.stack(run_replicated(task, replicas, workers))
    levels_checked = int(rows[:, 0].sum())
    level_viol = int(rows[:, 1].sum())
    ceil_viol = int(rows[:, 2].sum())
    bad = np.flatnonzero(rows[:, 1] + rows[:, 2])
    report_rows = [
        _exact_row("local_time_equals_alive_count", level_viol,
                   levels_checked),
        _exact_row("ceiling_local_time_equals_killed_count", ceil_viol,
                   replicas),
    ]
    extra = {"first_violating_replica": int(bad[0]) if bad.size else None}
    return _finish_report(
        "discrete-ray-knight", _rate_params_echo(params), replicas, seed,
        report_rows, extra)


# ---------------------------------------------------------------------------
# law equality of the two samplers through the bijection

LAW_EVAL_TIME = 0.5


def _forest_stats(forest, t_eval):
    return (float(total_individuals(forest)), extinction_time(forest),
            float(alive_count(forest, t_eval)))


def _law_path_replica(r, params, seed, t_eval):
    path = sample_path(params, 2.0, seed, substream(COMP_LAW_PATH, r))
    return np.array(_forest_stats(path_to_forest(path), t_eval))


def _law_forest_replica(r, params, seed, t_eval):
    forest = sample_forest(params, seed, substream(COMP_LAW_FOREST, r))
    return np.array(_forest_stats(forest, t_eval))


def verify_law_equality(params, replicas=10000, seed=0, workers=1):
    """KS-compare summary statistics (total individuals, extinction time,
    alive count at t=0.5) of forests read off sampled paths against
    directly sampled forests."""
    if params.ceiling_a <= LAW_EVAL_TIME:
        raise ValidationError(
            "ceiling must exceed the evaluation time %g" % LAW_EVAL_TIME)
    a = np.stack(run_replicated(
        functools.partial(_law_path_replica, params=params, seed=seed,
                          t_eval=LAW_EVAL_TIME), replicas, workers))
    b = np.stack(run_replicated(
        functools.partial(_law_forest_replica, params=params, seed=seed,
                          t_eval=LAW_EVAL_TIME), replicas, workers))
    names = ["total_individuals", "extinction_time",
             "alive_count_at_%g" % LAW_EVAL_TIME]
    rows = [_ks_row("ks_" + nm, a[:, j], b[:, j], n_tests=len(names))
            for j, nm in enumerate(names)]
    return _finish_report(
        "law-equality", _rate_params_echo(params), replicas, seed, rows)


# ---------------------------------------------------------------------------
# excision against direct reflection

CHOP_EVAL_LEVEL = 0.5


def _path_stats(path, level):
    n_max = (path.n_extrema - 1) // 2
    up, down = crossing_count(path, level)
    return (float(n_max), path.max_height, float(min(up, down)))


def _chop_wide_replica(r, params, excise_at, seed, level):
    path = sample_path(params, 2.0, seed, substream(COMP_CHOP_WIDE, r))
    return np.array(_path_stats(excise_above(path, excise_at), level))


def _chop_direct_replica(r, params, seed, level):
    path = sample_path(params, 2.0, seed, substream(COMP_CHOP_DIRECT, r))
    return np.array(_path_stats(path, level))


def verify_excision(params, excise_at, replicas=10000, seed=0, workers=1):
    """KS-compare paths sampled under a wide ceiling then excised above
    `excise_at` against paths sampled directly under ceiling `excise_at`.

    Statistics per path: number of maxima, maximum height, and crossing
    pairs at level 0.5 (under the exact coupling these are the total
    individuals, extinction time, and alive count of the encoded forest).
    """
    if not (0 < excise_at < params.ceiling_a):
        raise ValidationError(
            "excision level must lie strictly below the sampling ceiling")
    if excise_at <= CHOP_EVAL_LEVEL:
        raise ValidationError(
            "excision level must exceed the evaluation level %g"
            % CHOP_EVAL_LEVEL)
    direct_params = RateParams(params.lam, params.mu, excise_at,
                               params.ancestors_m)
    a = np.stack(run_replicated(
        functools.partial(_chop_wide_replica, params=params,
                          excise_at=excise_at, seed=seed,
                          level=CHOP_EVAL_LEVEL), replicas, workers))
    b = np.stack(run_replicated(
        functools.partial(_chop_direct_replica, params=direct_params,
                          seed=seed, level=CHOP_EVAL_LEVEL),
        replicas, workers))
    names = ["maxima_count", "max_height",
             "crossing_pairs_at_%g" % CHOP_EVAL_LEVEL]
    rows = [_ks_row("ks_" + nm, a[:, j], b[:, j], n_tests=len(names))
            for j, nm in enumerate(names)]
    params_echo = dict(_rate_params_echo(params), excise_at=excise_at)
    return _finish_report(
        "excision-law", params_echo, replicas, seed, rows)


# ---------------------------------------------------------------------------
# martingale reconstruction from renormalized paths

def _martingale_values(path, renorm, eval_times):
    """M1 at the given times, reconstructed from one renormalized path."""
    h = path.heights
    t = path.times
    n_seg = h.shape[0] - 1
    c = 1.0 / (renorm.big_n * renorm.sigma ** 2)
    scale = 4.0 * c
    drift_minus = 4.0 * renorm.alpha / renorm.sigma ** 2
    drift_plus = 4.0 * renorm.beta / renorm.sigma ** 2
    durations = np.diff(t)
    asc_mask = (np.arange(n_seg) % 2) == 0
    asc_cum = np.concatenate(
        ([0.0], np.cumsum(np.where(asc_mask, durations, 0.0))))
    zero_times = t[1:][h[1:] == 0.0]
    if math.isfinite(path.ceiling_a):
        hit_times = t[h == path.ceiling_a]
    else:
        hit_times = np.empty(0)
    out = np.empty(len(eval_times), dtype=np.float64)
    for i, s in enumerate(eval_times):
        if s > t[-1]:
            raise ValidationError(
                "path too short for evaluation time %g" % s)
        j = min(int(np.searchsorted(t, s, side="right")) - 1, n_seg - 1)
        if j % 2 == 0:
            h_s = h[j] + (s - t[j]) * path.slope_p
            a_plus = asc_cum[j] + (s - t[j])
            v = 1.0
        else:
            h_s = h[j] - (s - t[j]) * path.slope_p
            a_plus = asc_cum[j]
            v = -1.0
        a_minus = s - a_plus
        r0 = int(np.searchsorted(zero_times, s, side="right"))
        ra = int(np.searchsorted(hit_times, s, side="right"))
        out[i] = (h_s + v * c - c - drift_minus * a_minus
                  + drift_plus * a_plus - 0.5 * (scale * r0)
                  + 0.5 * (scale * ra))
    return out


def _martingale_jumps(path, renorm):
    """(worst interior jump error, worst boundary jump) for one path.

    M1 jumps by exactly 2/(N sigma^2) in magnitude at interior extrema; at
    returns to zero and at ceiling maxima the slope-flip jump cancels
    against the local-time jump, so M1 is continuous there.  Both are
    reported relative to 2/(N sigma^2).
    """
    h = path.heights
    c = 1.0 / (renorm.big_n * renorm.sigma ** 2)
    two_c = 2.0 * c
    ks = np.arange(1, h.shape[0] - 1)
    v_after = np.where(ks % 2 == 0, 1.0, -1.0)
    base = 2.0 * v_after * c
    at_zero = h[ks] == 0.0
    at_top = h[ks] == path.ceiling_a
    jump = base + np.where(at_top, two_c, 0.0) - np.where(at_zero, two_c, 0.0)
    interior = ~(at_zero | at_top)
    worst_int = 0.0
    if np.any(interior):
        worst_int = float(
            np.max(np.abs(np.abs(jump[interior]) - two_c)) / two_c)
    worst_bnd = 0.0
    if np.any(~interior):
        worst_bnd = float(np.max(np.abs(jump[~interior])) / two_c)
    return worst_int, worst_bnd


def _mart_replica(r, renorm, horizon, eval_times, seed):
    # Long renormalized paths can collide two minima on the float64 grid,
    # which path validation rejects (the event is a.s. absent in exact
    # arithmetic).  Redraw such replicas from a disjoint stream band: the
    # sampled law is conditioned on the tie-free event, i.e. unchanged.
    path = None
    for attempt in range(4):
        try:
            path = sample_renormalized_path(
                renorm, seed, substream(COMP_MART, r + (attempt << 30)),
                min_duration=horizon)
            break
        except ValidationError:
            if attempt == 3:
                raise
    values = _martingale_values(path, renorm, eval_times)
    worst_int, worst_bnd = _martingale_jumps(path, renorm)
    return np.concatenate((values, [worst_int, worst_bnd]))


def martingale_diagnostic(renorm, horizon=1.0, replicas=2000, seed=0,
                          workers=1, eval_times=(0.5, 1.0)):
    """Reconstruct the height-process martingale from sampled renormalized
    paths: its mean must vanish at every evaluation time, its jump
    magnitudes must equal 2/(N sigma^2) exactly, and (for alpha = beta) the
    empirical bracket slope mean(M1_s^2)/s must sit within 10% of
    4/sigma^2 at the latest evaluation time."""
    eval_times = tuple(float(s) for s in eval_times)
    if not eval_times or any(s <= 0 for s in eval_times):
        raise ValidationError("evaluation times must be positive")
    if max(eval_times) > horizon:
        raise ValidationError("evaluation times must not exceed the horizon")
    task = functools.partial(_mart_replica, renorm=renorm, horizon=horizon,
                             eval_times=eval_times, seed=seed)
    data = np.stack(run_replicated(task, replicas, workers))
    n_s = len(eval_times)
    rows = []
    for i, s in enumerate(eval_times):
        rows.append(_mean_row("mean_M1_at_%g" % s, data[:, i], 0.0))
    s_last = eval_times[-1]
    bracket_target = 4.0 / renorm.sigma ** 2
    slope_samples = data[:, n_s - 1] ** 2 / s_last
    ms = moment_report(slope_samples)
    rows.append(StatRow(
        statistic="bracket_slope_at_%g" % s_last, n=ms.n, mean=ms.mean,
        variance=ms.variance, se_mean=ms.se_mean, se_variance=ms.se_variance,
        target=bracket_target, tolerance=0.1 * bracket_target,
        passed=abs(ms.mean - bracket_target) <= 0.1 * bracket_target))
    worst_int = float(data[:, n_s].max())
    rows.append(StatRow(
        statistic="interior_jump_relative_error", n=replicas, mean=worst_int,
        target=0.0, tolerance=1e-12, passed=worst_int <= 1e-12))
    worst_bnd = float(data[:, n_s + 1].max())
    rows.append(StatRow(
        statistic="boundary_jump_relative_size", n=replicas, mean=worst_bnd,
        target=0.0, tolerance=1e-12, passed=worst_bnd <= 1e-12))
    return _finish_report(
        "martingale-reconstruction",
        dict(_renorm_params_echo(renorm), horizon=horizon,
             eval_times=list(eval_times)),
        replicas, seed, rows)


# ---------------------------------------------------------------------------
# generalized Ray-Knight: local time marginals vs diffusion and population

def _bd_moments(birth, death, t, n0):
    """Exact mean and variance of a linear birth-death count at time t
    from n0 independent ancestors."""
    r = birth - death
    if r == 0.0:
        m = 1.0
        v = 2.0 * birth * t
    else:
        g = math.exp(r * t)
        m = g
        v = (birth + death) / r * g * (g - 1.0)
    return n0 * m, n0 * v


def _rkl_path_replica(r, renorm, levels, seed, guard):
    res = renormalized_crossings(renorm, levels, seed,
                                 substream(COMP_RKL_PATH, r), guard)
    pairs = np.minimum(res["up"], res["down"]).astype(np.float64)
    return np.concatenate((pairs, [float(res["returns"])]))


def _rkl_feller_replica(r, renorm, levels, dt, seed):
    vals = feller_values_at(renorm.x, renorm.alpha, renorm.beta,
                            renorm.sigma, dt, levels, seed,
                            substream(COMP_RKL_FELLER, r))
    return (4.0 / renorm.sigma ** 2) * vals


def _rkl_pop_replica(r, renorm, levels, seed):
    vals = population_values_at(renorm, levels, seed,
                                substream(COMP_RKL_POP, r))
    return (4.0 / renorm.sigma ** 2) * (vals / renorm.big_n)


def verify_rk_limit(renorm, levels=(0.25, 0.5, 1.0), replicas=10000,
                    dt=1e-3, seed=0, workers=1):
    """Level-t local times at the inverse stopping time against the scaled
    diffusion and the same-N population.

    Per level t < a: the local time sample L(t) of renormalized paths is
    compared in mean and variance to exact birth-death moments, and by KS
    against (4/sigma^2) X_t from the diffusion and against
    (4/sigma^2) X^N_t from a same-N Gillespie chain (the latter is an
    identity in law at every N, not only in the limit).  The level-0 local
    time equals scale x floor(N x) by the stopping rule, checked exactly.
    """
    levels = np.ascontiguousarray(sorted(float(t) for t in levels))
    if levels.shape[0] == 0:
        raise ValidationError("need at least one level")
    if np.any(levels <= 0) or np.any(levels >= renorm.ceiling_a):
        raise ValidationError(
            "levels must lie strictly between 0 and the ceiling")
    n_lev = levels.shape[0]
    scale = renorm.local_time_scale
    path_rows = np.stack(run_replicated(
        functools.partial(_rkl_path_replica, renorm=renorm, levels=levels,
                          seed=seed, guard=DEFAULT_PAIR_GUARD),
        replicas, workers))
    feller_rows = np.stack(run_replicated(
        functools.partial(_rkl_feller_replica, renorm=renorm, levels=levels,
                          dt=dt, seed=seed), replicas, workers))
    pop_rows = np.stack(run_replicated(
        functools.partial(_rkl_pop_replica, renorm=renorm, levels=levels,
                          seed=seed), replicas, workers))
    local_times = scale * path_rows[:, :n_lev]
    returns = path_rows[:, n_lev]
    stop_violations = int(np.count_nonzero(returns != renorm.ancestors))
    n_ks = 2 * n_lev
    rows = [_exact_row("returns_equal_ancestors", stop_violations, replicas)]
    x_n = renorm.ancestors / renorm.big_n
    for j in range(n_lev):
        t = float(levels[j])
        mean_pairs, var_pairs = _bd_moments(
            renorm.mu_n, renorm.lambda_n, t, renorm.ancestors)
        rows.append(_mean_row("mean_L_at_%g" % t, local_times[:, j],
                              scale * mean_pairs))
        rows.append(_variance_row("variance_L_at_%g" % t, local_times[:, j],
                                  scale ** 2 * var_pairs, slack=0.05))
        rows.append(_ks_row("ks_vs_diffusion_at_%g" % t, local_times[:, j],
                            feller_rows[:, j], n_ks))
        rows.append(_ks_row("ks_vs_population_at_%g" % t, local_times[:, j],
                            pop_rows[:, j], n_ks))
    extra = {"x_n": x_n, "local_time_scale": scale,
             "level_zero_local_time": scale * renorm.ancestors}
    return _finish_report(
        "generalized-ray-knight",
        dict(_renorm_params_echo(renorm), levels=list(levels), dt=dt),
        replicas, seed, rows, extra)


# ---------------------------------------------------------------------------
# convergence of the rescaled population to the diffusion

def _conv_feller_replica(r, x, alpha, beta, sigma, horizon, dt, seed):
    vals = feller_values_at(x, alpha, beta, sigma, dt,
                            np.array([horizon]), seed,
                            substream(COMP_CONV_FELLER, r))
    return float(vals[0])


def _conv_pop_replica(r, renorm, horizon, seed, comp):
    vals = population_values_at(renorm, np.array([horizon]), seed,
                                substream(comp, r))
    return float(vals[0]) / renorm.big_n


def feller_convergence_report(sigma, x, alpha, beta, n_values=(10, 100, 500),
                              replicas=5000, horizon=1.0, dt=1e-3, seed=0,
                              workers=1):
    """KS distance between the rescaled population at the horizon and the
    diffusion marginal, for increasing N: the distance must decrease
    monotonically and the largest N must pass the KS test."""
    n_values = tuple(int(n) for n in n_values)
    if len(n_values) < 2 or any(n < 1 for n in n_values) or any(
            b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValidationError("n_values must be increasing integers")
    feller_sample = np.array(run_replicated(
        functools.partial(_conv_feller_replica, x=x, alpha=alpha, beta=beta,
                          sigma=sigma, horizon=horizon, dt=dt, seed=seed),
        replicas, workers))
    rows = []
    distances = []
    for idx, n in enumerate(n_values):
        renorm = _make_renorm(sigma, alpha, beta, n, x)
        sample = np.array(run_replicated(
            functools.partial(_conv_pop_replica, renorm=renorm,
                              horizon=horizon, seed=seed,
                              comp=COMP_CONV_POP + idx),
            replicas, workers))
        d, p = ks_two_sample(sample, feller_sample)
        distances.append(d)
        is_last = idx == len(n_values) - 1
        rows.append(StatRow(
            statistic="ks_vs_diffusion_N_%d" % n, n=replicas, ks_distance=d,
            p_value=p, p_adjusted=p,
            passed=(p > KS_THRESHOLD) if is_last else None))
    monotone = all(b < a for a, b in zip(distances, distances[1:]))
    rows.append(StatRow(
        statistic="ks_distance_monotone_decreasing",
        mean=1.0 if monotone else 0.0, target=1.0, tolerance=0.0,
        passed=monotone))
    return _finish_report(
        "diffusion-convergence",
        {"sigma": sigma, "x": x, "alpha": alpha, "beta": beta,
         "n_values": list(n_values), "horizon": horizon, "dt": dt},
        replicas, seed, rows)


def _make_renorm(sigma, alpha, beta, big_n, x):
    return RenormParams(sigma=sigma, alpha=alpha, beta=beta, big_n=big_n,
                        x=x)


def _rate_params_echo(params):
    return {"lambda": params.lam, "mu": params.mu,
            "ceiling": params.ceiling_a, "ancestors": params.ancestors_m}


def _renorm_params_echo(renorm):
    return {"sigma": renorm.sigma, "alpha": renorm.alpha,
            "beta": renorm.beta, "big_n": renorm.big_n, "x": renorm.x,
            "ceiling": renorm.ceiling_a}
