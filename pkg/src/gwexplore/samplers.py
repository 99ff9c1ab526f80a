"""Random generation: excursion paths, forests, birth-death populations,
renormalized exploration paths, and the limiting square-root diffusion.

Every sampler is a pure function of (params, seed, stream): replicas use
independent Philox substreams and can be farmed out to any number of
workers without changing a single draw.
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from gwexplore._core import kernels
from gwexplore.errors import ResourceLimitError, ValidationError
from gwexplore.paths import ExplorationPath
from gwexplore.rng import ExponentialSource, UniformSource, make_generator
from gwexplore.trees import PopulationTrajectory, build_forest

__all__ = [
    "RateParams",
    "RenormParams",
    "FellerPath",
    "sample_path",
    "sample_forest",
    "sample_population",
    "population_values_at",
    "sample_renormalized_path",
    "renormalized_crossings",
    "sample_feller",
    "feller_values_at",
    "DEFAULT_NODE_GUARD",
    "DEFAULT_PAIR_GUARD",
    "DEFAULT_EVENT_GUARD",
]

DEFAULT_NODE_GUARD = 10_000_000
DEFAULT_PAIR_GUARD = 500_000_000
DEFAULT_EVENT_GUARD = 2_000_000_000


@dataclass(frozen=True)
class RateParams:
    """Death rate lam, birth rate mu, reflection/killing ceiling, and the
    number of ancestors (excursions)."""

    lam: float
    mu: float
    ceiling_a: float = math.inf
    ancestors_m: int = 1

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValidationError("lam must be positive and finite")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValidationError("mu must be positive and finite")
        if not self.ceiling_a > 0:
            raise ValidationError("ceiling_a must be positive")
        if self.ancestors_m < 1 or self.ancestors_m != int(self.ancestors_m):
            raise ValidationError("ancestors_m must be an integer >= 1")
        if math.isinf(self.ceiling_a) and self.mu > self.lam:
            raise ValidationError(
                "an infinite ceiling requires mu <= lam (supercritical "
                "paths need not return to zero)")


@dataclass(frozen=True)
class RenormParams:
    """Scaling-regime parameters.

    Derived rates: birth mu_n = sigma^2 N / 2 + alpha, death
    lambda_n = sigma^2 N / 2 + beta, path slope 2N, floor(N x) ancestors,
    local time scale 4/(N sigma^2).
    """

    sigma: float
    alpha: float
    beta: float
    big_n: int
    x: float
    ceiling_a: float = math.inf

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError("sigma must be positive and finite")
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("alpha and beta must be nonnegative")
        if self.big_n < 1 or self.big_n != int(self.big_n):
            raise ValidationError("big_n must be an integer >= 1")
        if not self.x > 0:
            raise ValidationError("x must be positive")
        if not self.ceiling_a > 0:
            raise ValidationError("ceiling_a must be positive")
        if self.ancestors < 1:
            raise ValidationError(
                "floor(big_n * x) must be >= 1 (no ancestors to explore)")

    @property
    def mu_n(self):
        return self.sigma ** 2 * self.big_n / 2.0 + self.alpha

    @property
    def lambda_n(self):
        return self.sigma ** 2 * self.big_n / 2.0 + self.beta

    @property
    def slope(self):
        return 2.0 * self.big_n

    @property
    def ancestors(self):
        return int(math.floor(self.big_n * self.x))

    @property
    def local_time_scale(self):
        return 4.0 / (self.big_n * self.sigma ** 2)

    def require_returns(self):
        """Path samplers need a.s. returns to zero: supercritical rates
        (alpha > beta) demand a finite ceiling."""
        if self.mu_n > self.lambda_n and math.isinf(self.ceiling_a):
            raise ValidationError(
                "alpha > beta requires a finite ceiling for path sampling")


@dataclass(frozen=True)
class FellerPath:
    """Euler-discretized trajectory of dX = (alpha-beta) X dt
    + sigma sqrt(X) dB, clamped at 0."""

    x: float
    alpha: float
    beta: float
    sigma: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.shape[0] < 1 or v[0] != self.x:
            raise ValidationError("values must start at x")
        if np.any(v < 0):
            raise ValidationError("values must be nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def times(self):
        return np.arange(self.values.shape[0]) * self.dt

    def value_at(self, t):
        k = _step_index(t, self.dt)
        if k >= self.values.shape[0]:
            raise ValidationError("time beyond the simulated horizon")
        return float(self.values[k])


def sample_path(params, slope_p=2.0, seed=0, stream=0,
                guard=DEFAULT_PAIR_GUARD):
    """Sample the excursion path law: ascents Exp(lam) reflected at the
    ceiling, descents Exp(mu) stopped at zero, halted at the ancestors_m-th
    return to zero."""
    if not slope_p > 0:
        raise ValidationError("slope_p must be positive")
    exps = ExponentialSource(make_generator(seed, stream))
    heights, returns = kernels.zigzag_extrema(
        exps, params.lam, params.mu, params.ceiling_a, params.ancestors_m,
        0.0, 1.0 / slope_p, guard)
    return ExplorationPath(heights, slope_p, ceiling_a=params.ceiling_a,
                           excursion_count=returns)


def sample_forest(params, seed=0, stream=0, node_guard=DEFAULT_NODE_GUARD):
    """Sample the forest law directly: ancestors_m independent trees,
    Exp(lam) lifetimes truncated at the ceiling (a truncated death marks a
    killed individual), and birth instants from a rate-mu Poisson process
    over each lifetime."""
    rng = make_generator(seed, stream)
    a = params.ceiling_a
    records = []
    queue = deque()
    for _ in range(params.ancestors_m):
        queue.append((None, 0.0))
        while queue:
            parent_ref, birth = queue.popleft()
            death = birth + rng.standard_exponential() / params.lam
            if death >= a:
                death = a
            rec = len(records)
            records.append((parent_ref, birth, death))
            if len(records) > node_guard:
                raise ResourceLimitError(
                    "forest exceeded the node guard (%d nodes); "
                    "use a ceiling or fewer ancestors" % node_guard)
            span = death - birth
            n_births = int(rng.poisson(params.mu * span))
            if n_births:
                offsets = np.sort(rng.random(n_births)) * span
                for off in offsets:
                    queue.append((rec, birth + off))
    return build_forest(records, ceiling_a=a)


def sample_population(renorm, horizon, seed=0, stream=0,
                      guard=DEFAULT_EVENT_GUARD):
    """Gillespie birth-death chain from floor(N x) individuals with
    per-individual birth rate mu_n and death rate lambda_n, run to the
    horizon.  Returns the full event trajectory."""
    if not horizon > 0:
        raise ValidationError("horizon must be positive")
    rng = make_generator(seed, stream)
    exps = ExponentialSource(rng)
    unis = UniformSource(rng)
    times, deltas = kernels.gillespie_events(
        exps, unis, renorm.ancestors, renorm.mu_n, renorm.lambda_n,
        float(horizon), guard)
    counts = renorm.ancestors + np.cumsum(deltas, dtype=np.int64)
    return PopulationTrajectory(jump_times=times, counts=counts,
                                initial_count=renorm.ancestors)


def population_values_at(renorm, at_times, seed=0, stream=0,
                         guard=DEFAULT_EVENT_GUARD):
    """Population counts at the given sorted times, without storing the
    event list (the hot path for Monte Carlo marginals)."""
    at_times = np.ascontiguousarray(at_times, dtype=np.float64)
    if at_times.ndim != 1 or at_times.shape[0] == 0:
        raise ValidationError("at_times must be a nonempty 1-D array")
    if np.any(at_times < 0) or np.any(np.diff(at_times) < 0):
        raise ValidationError("at_times must be nonnegative and sorted")
    rng = make_generator(seed, stream)
    exps = ExponentialSource(rng)
    unis = UniformSource(rng)
    values, _events = kernels.gillespie_values_at(
        exps, unis, renorm.ancestors, renorm.mu_n, renorm.lambda_n,
        at_times, guard)
    return values


def sample_renormalized_path(renorm, seed=0, stream=0, min_duration=None,
                             guard=DEFAULT_PAIR_GUARD):
    """Renormalized exploration path: the zigzag with rates (lambda_n,
    mu_n), slope 2N, reflected at the ceiling.

    With min_duration=None the walk stops at the floor(N x)-th return to
    zero (so its level-0 local time is exactly the scale times that count).
    With a min_duration it stops at the first return to zero at or past
    that time, which leaves the law on [0, min_duration] unbiased for
    fixed-time functionals.
    """
    renorm.require_returns()
    if min_duration is None:
        m_target = renorm.ancestors
        min_dur = 0.0
    else:
        if not min_duration > 0:
            raise ValidationError("min_duration must be positive")
        m_target = 0
        min_dur = float(min_duration)
    exps = ExponentialSource(make_generator(seed, stream))
    heights, returns = kernels.zigzag_extrema(
        exps, renorm.lambda_n, renorm.mu_n, renorm.ceiling_a, m_target,
        min_dur, 1.0 / renorm.slope, guard)
    return ExplorationPath(heights, renorm.slope, ceiling_a=renorm.ceiling_a,
                           excursion_count=returns)


def renormalized_crossings(renorm, levels, seed=0, stream=0,
                           guard=DEFAULT_PAIR_GUARD):
    """Stream one renormalized path (stopped at the floor(N x)-th return)
    and return its crossing counts without storing extrema.

    Returns a dict: up/down counts per level, returns to zero, ceiling
    hits, and total height travel.  Local times are scale x min(up, down).
    """
    renorm.require_returns()
    levels = np.ascontiguousarray(levels, dtype=np.float64)
    if np.any(levels <= 0) or np.any(levels >= renorm.ceiling_a):
        raise ValidationError("levels must lie strictly between 0 and the "
                              "ceiling")
    exps = ExponentialSource(make_generator(seed, stream))
    up, down, returns, hits, travel = kernels.zigzag_crossings(
        exps, renorm.lambda_n, renorm.mu_n, renorm.ceiling_a,
        renorm.ancestors, levels, guard)
    return {"up": up, "down": down, "returns": returns,
            "ceiling_hits": hits, "travel": travel}


def _step_index(t, dt):
    k = round(float(t) / dt)
    if abs(k * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise ValidationError(
            "time %r is not a multiple of dt=%r" % (t, dt))
    return int(k)


def sample_feller(x, alpha, beta, sigma, horizon, dt, seed=0, stream=0):
    """Full-truncation Euler path of the square-root diffusion on a uniform
    dt grid over [0, horizon]."""
    _validate_feller(x, alpha, beta, sigma, dt)
    n_steps = _step_index(horizon, dt)
    if n_steps < 1:
        raise ValidationError("horizon must cover at least one step")
    rng = make_generator(seed, stream)
    normals = rng.standard_normal(n_steps)
    record = np.arange(1, n_steps + 1, dtype=np.int64)
    vals = kernels.feller_values(
        float(x), (alpha - beta) * dt, sigma * math.sqrt(dt), normals, record)
    values = np.concatenate(([float(x)], vals))
    return FellerPath(x=float(x), alpha=float(alpha), beta=float(beta),
                      sigma=float(sigma), dt=float(dt), values=values)


def feller_values_at(x, alpha, beta, sigma, dt, at_times, seed=0, stream=0):
    """Diffusion values at the given times only (hot path for marginals).
    Times must be positive multiples of dt, sorted ascending."""
    _validate_feller(x, alpha, beta, sigma, dt)
    record = np.array([_step_index(t, dt) for t in at_times], dtype=np.int64)
    if record.shape[0] == 0 or np.any(record < 1) or np.any(
            np.diff(record) <= 0):
        raise ValidationError(
            "at_times must be distinct positive multiples of dt, ascending")
    rng = make_generator(seed, stream)
    normals = rng.standard_normal(int(record[-1]))
    return kernels.feller_values(
        float(x), (alpha - beta) * dt, sigma * math.sqrt(dt), normals, record)


def _validate_feller(x, alpha, beta, sigma, dt):
    if x < 0:
        raise ValidationError("x must be nonnegative")
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ValidationError("sigma must be positive and finite")
    if alpha < 0 or beta < 0:
        raise ValidationError("alpha and beta must be nonnegative")
    if not 0 < dt:
        raise ValidationError("dt must be positive")
