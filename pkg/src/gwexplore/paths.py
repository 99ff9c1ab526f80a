"""Canonical piecewise-linear exploration paths and their exact geometry.

A path is stored as the heights of its successive local extrema plus the
slope magnitude p; breakpoint times are always derived (consecutive extrema
are |dh|/p apart), which makes serialization round-trips, crossing counts,
occupation integrals, and the excision operator exact on doubles.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gwexplore.errors import ValidationError

__all__ = [
    "ExplorationPath",
    "LocalTimeProfile",
    "LevelStepFunction",
    "crossing_count",
    "local_time",
    "ceiling_local_time",
    "local_time_profile",
    "midpoint_levels",
    "occupation_integral",
    "tau",
    "excise_above",
    "write_path",
    "read_path",
]


class ExplorationPath:
    """Excursion path with slopes +-p, stored as extrema heights.

    heights alternate 0, max, min, max, ..., 0; strictly between
    consecutive zeros every local minimum height is distinct.  The path is
    stopped at its excursion_count-th return to zero, so the final extremum
    is that zero.  Values are immutable after construction.
    """

    __slots__ = ("heights", "slope_p", "ceiling_a", "excursion_count",
                 "_times")

    def __init__(self, heights, slope_p, ceiling_a=math.inf,
                 excursion_count=None):
        h = np.ascontiguousarray(heights, dtype=np.float64).copy()
        if h.ndim != 1 or h.shape[0] < 3 or h.shape[0] % 2 == 0:
            raise ValidationError(
                "extrema sequence must be 1-D with odd length >= 3")
        if not (slope_p > 0 and math.isfinite(slope_p)):
            raise ValidationError("slope_p must be positive and finite")
        if not ceiling_a > 0:
            raise ValidationError("ceiling_a must be positive")
        if not np.all(np.isfinite(h)):
            raise ValidationError("extrema heights must be finite")
        if h[0] != 0.0 or h[-1] != 0.0:
            raise ValidationError("path must start and end at height 0")
        maxima = h[1::2]
        if not (np.all(maxima > h[0:-1:2]) and np.all(maxima > h[2::2])):
            raise ValidationError(
                "extrema must alternate strictly (each maximum above its "
                "neighbors)")
        if np.any(h < 0.0):
            raise ValidationError("heights must be nonnegative")
        if np.any(maxima > ceiling_a):
            raise ValidationError("heights must not exceed the ceiling")
        zeros = np.flatnonzero(h[1:] == 0.0) + 1
        m = int(zeros.shape[0])
        if excursion_count is not None and excursion_count != m:
            raise ValidationError(
                "excursion_count %r does not match the %d returns to zero"
                % (excursion_count, m))
        bounds = np.concatenate(([0], zeros))
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            mins = h[lo + 2:hi:2]
            if mins.shape[0] != np.unique(mins).shape[0]:
                raise ValidationError(
                    "local minima within one excursion must be distinct")
        h.setflags(write=False)
        self.heights = h
        self.slope_p = float(slope_p)
        self.ceiling_a = float(ceiling_a)
        self.excursion_count = m
        self._times = None

    @property
    def times(self):
        """Breakpoint times derived from the extrema (t_0 = 0)."""
        if self._times is None:
            steps = np.abs(np.diff(self.heights)) / self.slope_p
            t = np.empty(self.heights.shape[0], dtype=np.float64)
            t[0] = 0.0
            np.cumsum(steps, out=t[1:])
            t.setflags(write=False)
            self._times = t
        return self._times

    @property
    def duration(self):
        return float(self.times[-1])

    @property
    def n_extrema(self):
        return int(self.heights.shape[0])

    @property
    def max_height(self):
        return float(self.heights.max())

    def __eq__(self, other):
        if not isinstance(other, ExplorationPath):
            return NotImplemented
        return (self.slope_p == other.slope_p
                and self.ceiling_a == other.ceiling_a
                and self.excursion_count == other.excursion_count
                and np.array_equal(self.heights, other.heights))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self):
        return ("ExplorationPath(n_extrema=%d, p=%g, a=%g, m=%d)"
                % (self.n_extrema, self.slope_p, self.ceiling_a,
                   self.excursion_count))


@dataclass(frozen=True)
class LocalTimeProfile:
    """Scaled crossing-pair counts over a level grid.

    values[j] = scale x (crossing pairs of levels[j]); right-continuous in
    the level by the half-open crossing convention.  ceiling_value carries
    the separately reported local time just under the ceiling.
    """

    levels: np.ndarray
    values: np.ndarray
    scale: float
    ceiling_value: float

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if levels.shape != values.shape or levels.ndim != 1:
            raise ValidationError("levels and values must be 1-D and aligned")
        if np.any(np.diff(levels) <= 0):
            raise ValidationError("levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "values", values)


class LevelStepFunction:
    """Piecewise-constant function of height: values[i] on
    [breaks[i], breaks[i+1]), zero outside [breaks[0], breaks[-1])."""

    def __init__(self, breaks, values):
        b = np.asarray(breaks, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if b.ndim != 1 or v.ndim != 1 or b.shape[0] != v.shape[0] + 1:
            raise ValidationError(
                "need n+1 breaks for n values")
        if np.any(np.diff(b) <= 0):
            raise ValidationError("breaks must be strictly increasing")
        self.breaks = b
        self.values = v
        widths = np.diff(b)
        self._cum = np.concatenate(([0.0], np.cumsum(v * widths)))

    @classmethod
    def indicator(cls, lo, hi):
        return cls([lo, hi], [1.0])

    def __call__(self, y):
        y = np.asarray(y, dtype=np.float64)
        idx = np.searchsorted(self.breaks, y, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.shape[0])
        out = np.zeros(y.shape, dtype=np.float64)
        out[inside] = self.values[idx[inside]]
        return out if out.ndim else float(out)

    def antiderivative(self, y):
        """Exact integral of the function over (-inf, y], vectorized."""
        y = np.asarray(y, dtype=np.float64)
        idx = np.searchsorted(self.breaks, y, side="right") - 1
        idx_c = np.clip(idx, 0, self.values.shape[0] - 1)
        out = self._cum[idx_c] + self.values[idx_c] * (y - self.breaks[idx_c])
        out = np.where(idx < 0, 0.0, out)
        out = np.where(idx >= self.values.shape[0], self._cum[-1], out)
        return out if out.ndim else float(out)


def _check_up_to(path, up_to):
    if up_to is None:
        return path.duration
    up_to = float(up_to)
    if not 0.0 <= up_to <= path.duration * (1 + 1e-12):
        raise ValidationError("up_to must lie in [0, duration]")
    return min(up_to, path.duration)


def _traversed(path, up_to):
    """Segment endpoint heights covered by time up_to.

    Returns (starts, ends) including, when up_to cuts a segment, a final
    partial pair whose end is the height reached at up_to.
    """
    h = path.heights
    t = path.times
    kfull = int(np.searchsorted(t[1:], up_to, side="right"))
    starts = h[:kfull]
    ends = h[1:kfull + 1]
    if kfull < h.shape[0] - 1 and up_to > t[kfull]:
        dh = (up_to - t[kfull]) * path.slope_p
        if h[kfull + 1] > h[kfull]:
            stop = h[kfull] + dh
        else:
            stop = h[kfull] - dh
        starts = np.concatenate((starts, [h[kfull]]))
        ends = np.concatenate((ends, [stop]))
    return starts, ends


def crossing_count(path, level, up_to=None):
    """(up, down) strict crossings of `level` by time `up_to`.

    A segment from lo to hi crosses iff lo <= level < hi, so a local minimum
    sitting exactly at the level counts as one down- plus one up-crossing
    and a local maximum there counts as none.
    """
    level = float(level)
    if not level > 0.0:
        raise ValidationError("crossing level must be positive; level 0 is "
                              "handled by local_time via returns to zero")
    up_to = _check_up_to(path, up_to)
    starts, ends = _traversed(path, up_to)
    asc = ends > starts
    up = int(np.count_nonzero(asc & (starts <= level) & (level < ends)))
    down = int(np.count_nonzero(~asc & (ends <= level) & (level < starts)))
    return up, down


def _returns_by(path, up_to):
    h = path.heights
    t = path.times
    zero_times = t[1:][h[1:] == 0.0]
    return int(np.searchsorted(zero_times, up_to, side="right"))


def local_time(path, level, up_to=None, scale=1.0):
    """scale x (crossing pairs of `level` by `up_to`).

    Level 0 counts completed returns to zero (the initial departure and each
    arrival close one pair).  For p = 2 and scale 1 this is the plain
    crossing-pair count.
    """
    level = float(level)
    if level < 0.0:
        raise ValidationError("level must be nonnegative")
    up_to = _check_up_to(path, up_to)
    if level == 0.0:
        return scale * _returns_by(path, up_to)
    up, down = crossing_count(path, level, up_to)
    return scale * min(up, down)


def ceiling_local_time(path, up_to=None, scale=1.0):
    """scale x (maxima lying exactly at the ceiling by `up_to`):
    the separately reported local time just below the ceiling."""
    if not math.isfinite(path.ceiling_a):
        return 0.0
    up_to = _check_up_to(path, up_to)
    h = path.heights
    t = path.times
    at_top = (h == path.ceiling_a) & (t <= up_to)
    return scale * int(np.count_nonzero(at_top))


def midpoint_levels(path):
    """Midpoints between consecutive distinct extrema heights: every level
    grid point is crossed strictly, so no crossing is ambiguous."""
    uniq = np.unique(path.heights)
    return (uniq[:-1] + uniq[1:]) / 2.0


def local_time_profile(path, levels=None, up_to=None, scale=1.0):
    """LocalTimeProfile over `levels` (default: midpoint grid)."""
    if levels is None:
        levels = midpoint_levels(path)
    levels = np.asarray(levels, dtype=np.float64)
    up_to = _check_up_to(path, up_to)
    starts, ends = _traversed(path, up_to)
    asc = ends > starts
    a_lo, a_hi = starts[asc], ends[asc]
    d_lo, d_hi = ends[~asc], starts[~asc]
    values = np.empty(levels.shape[0], dtype=np.float64)
    for j, lv in enumerate(levels):
        if lv == 0.0:
            values[j] = scale * _returns_by(path, up_to)
            continue
        if lv < 0.0:
            raise ValidationError("profile levels must be nonnegative")
        u = int(np.count_nonzero((a_lo <= lv) & (lv < a_hi)))
        d = int(np.count_nonzero((d_lo <= lv) & (lv < d_hi)))
        values[j] = scale * min(u, d)
    return LocalTimeProfile(levels=levels, values=values, scale=scale,
                            ceiling_value=ceiling_local_time(
                                path, up_to, scale))


def occupation_integral(path, g, up_to=None):
    """Time integral of g(height) along the path, segment-exact.

    Each linear segment traversing [lo, hi] contributes
    (antiderivative(hi) - antiderivative(lo)) / p.  Collisions between g
    breakpoints and extrema heights are harmless by this convention (the
    integral does not depend on values at single points).
    """
    if not isinstance(g, LevelStepFunction):
        raise ValidationError("g must be a LevelStepFunction")
    up_to = _check_up_to(path, up_to)
    starts, ends = _traversed(path, up_to)
    d = np.abs(g.antiderivative(ends) - g.antiderivative(starts))
    return float(d.sum() / path.slope_p)


def tau(path, threshold_pairs):
    """Time of the threshold_pairs-th return to zero."""
    k = int(threshold_pairs)
    if k != threshold_pairs or k < 1:
        raise ValidationError("threshold must be a positive integer")
    if k > path.excursion_count:
        raise ValidationError(
            "threshold %d exceeds the %d recorded returns (path stopped too "
            "early)" % (k, path.excursion_count))
    h = path.heights
    t = path.times
    zero_times = t[1:][h[1:] == 0.0]
    return float(zero_times[k - 1])


def excise_above(path, a):
    """Delete the sub-excursions above level `a` and glue time.

    Every deleted piece leaves a local maximum exactly at `a`; minima and
    zeros below `a` are untouched, so the number of excursions is preserved.
    The result has ceiling `a`.  Exact on the extrema representation.
    """
    a = float(a)
    if not a > 0.0:
        raise ValidationError("excision level must be positive")
    h = path.heights
    mins = np.concatenate((h[0:-1:2], h[-1:]))
    if np.any(mins == a):
        raise ValidationError(
            "excision level coincides with a local minimum height")
    out = [0.0]
    above = False
    for k in range(1, h.shape[0]):
        hk = h[k]
        if not above:
            if k % 2 == 1 and hk > a:
                out.append(a)
                above = True
            else:
                out.append(hk)
        else:
            if k % 2 == 0 and hk < a:
                out.append(hk)
                above = False
    return ExplorationPath(out, path.slope_p, ceiling_a=a,
                           excursion_count=path.excursion_count)


def _fmt(x):
    return "%.17g" % x


def write_path(path, file, seed=None, params=None):
    """Write the breakpoints as CSV (time,height) plus a JSON sidecar
    {p, a, m, seed, params}; 17 significant digits throughout."""
    file = Path(file)
    lines = ["time,height"]
    for t, h in zip(path.times, path.heights):
        lines.append("%s,%s" % (_fmt(t), _fmt(h)))
    file.write_text("\n".join(lines) + "\n")
    a = path.ceiling_a
    sidecar = {
        "p": path.slope_p,
        "a": None if math.isinf(a) else a,
        "m": path.excursion_count,
        "seed": seed,
        "params": params,
    }
    file.with_suffix(".json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return file


def read_path(file):
    """Read a CSV + sidecar pair back into an ExplorationPath.

    Returns (path, sidecar).  The stored times are re-derived from the
    heights and must agree to 1e-9 relative error.
    """
    file = Path(file)
    side_file = file.with_suffix(".json")
    if not side_file.exists():
        raise ValidationError("missing path sidecar %s" % side_file)
    sidecar = json.loads(side_file.read_text())
    raw = file.read_text().strip().splitlines()
    if not raw or raw[0].strip() != "time,height":
        raise ValidationError("path file must start with 'time,height'")
    times = []
    heights = []
    for line in raw[1:]:
        st, sh = line.split(",")
        times.append(float(st))
        heights.append(float(sh))
    a = sidecar.get("a")
    path = ExplorationPath(
        heights, sidecar["p"],
        ceiling_a=math.inf if a is None else float(a),
        excursion_count=sidecar.get("m"))
    derived = path.times
    stored = np.asarray(times, dtype=np.float64)
    tol = 1e-9 * max(1.0, path.duration)
    if stored.shape[0] != derived.shape[0] or np.any(
            np.abs(stored - derived) > tol):
        raise ValidationError(
            "stored breakpoint times disagree with the heights and slope")
    return path, sidecar
