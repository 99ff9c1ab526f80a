"""Pure Python reference kernels.

These are the fallback implementations of the hot loops.  The compiled
backend (speedups.pyx) mirrors them statement for statement: same draw
sources, same block schedule, same order of floating point operations, so
both backends produce bit-identical results.  Keep the two files in sync.
"""

import math

import numpy as np

from gwexplore.errors import ResourceLimitError

__all__ = [
    "zigzag_extrema",
    "zigzag_crossings",
    "gillespie_values_at",
    "gillespie_events",
    "feller_values",
]


def zigzag_extrema(exps, lam, mu, ceiling, m_target, min_duration, inv_slope,
                   guard):
    """Sample the excursion zigzag and return (extrema heights, returns).

    Ascend by Exp(lam) capped at `ceiling`, descend by Exp(mu) floored at 0;
    a descent reaching 0 completes an excursion.  If m_target > 0 the walk
    stops at the m_target-th return to zero; otherwise it stops at the first
    return to zero with elapsed time (height travel times `inv_slope`) at or
    past `min_duration`.
    """
    heights = [0.0]
    cur = 0.0
    travel = 0.0
    returns = 0
    pairs = 0
    while True:
        u = exps.next() / lam
        top = cur + u
        if top >= ceiling:
            top = ceiling
        v = exps.next() / mu
        nxt = top - v
        if nxt <= 0.0:
            nxt = 0.0
            returns += 1
        heights.append(top)
        heights.append(nxt)
        travel += (top - cur) + (top - nxt)
        cur = nxt
        pairs += 1
        if pairs > guard:
            raise ResourceLimitError(
                "zigzag exceeded the segment guard (%d pairs)" % guard)
        if cur == 0.0:
            if m_target > 0:
                if returns >= m_target:
                    break
            elif travel * inv_slope >= min_duration:
                break
    return np.array(heights, dtype=np.float64), returns


def zigzag_crossings(exps, lam, mu, ceiling, m_target, levels, guard):
    """Stream the zigzag and count level crossings without storing the path.

    Returns (up, down, returns, ceiling_hits, travel): crossing counts per
    level (a segment from lo to hi crosses t iff lo <= t < hi), the number
    of returns to zero, the number of maxima capped at the ceiling, and the
    total height travel.  Stops at the m_target-th return to zero.
    """
    nlev = len(levels)
    up = np.zeros(nlev, dtype=np.int64)
    down = np.zeros(nlev, dtype=np.int64)
    cur = 0.0
    travel = 0.0
    returns = 0
    hits = 0
    pairs = 0
    while True:
        u = exps.next() / lam
        top = cur + u
        if top >= ceiling:
            top = ceiling
            hits += 1
        for j in range(nlev):
            t = levels[j]
            if cur <= t < top:
                up[j] += 1
        v = exps.next() / mu
        nxt = top - v
        if nxt <= 0.0:
            nxt = 0.0
            returns += 1
        for j in range(nlev):
            t = levels[j]
            if nxt <= t < top:
                down[j] += 1
        travel += (top - cur) + (top - nxt)
        cur = nxt
        pairs += 1
        if pairs > guard:
            raise ResourceLimitError(
                "zigzag exceeded the segment guard (%d pairs)" % guard)
        if cur == 0.0 and returns >= m_target:
            break
    return up, down, returns, hits, travel


def gillespie_values_at(exps, unis, n0, birth_rate, death_rate, at_times,
                        guard):
    """Birth-death population values at the given sorted times.

    The chain starts at n0; each individual gives birth at `birth_rate` and
    dies at `death_rate`.  Values are right-continuous: at_times falling in
    [t_k, t_{k+1}) get the count on that interval.  Returns (values, events).
    """
    n_times = len(at_times)
    out = np.zeros(n_times, dtype=np.int64)
    total = birth_rate + death_rate
    pbirth = birth_rate / total
    n = n0
    t = 0.0
    ti = 0
    events = 0
    while True:
        if n == 0:
            while ti < n_times:
                out[ti] = 0
                ti += 1
            break
        w = exps.next() / (n * total)
        tnext = t + w
        while ti < n_times and at_times[ti] < tnext:
            out[ti] = n
            ti += 1
        if ti == n_times:
            break
        t = tnext
        if unis.next() < pbirth:
            n += 1
        else:
            n -= 1
        events += 1
        if events > guard:
            raise ResourceLimitError(
                "population exceeded the event guard (%d events)" % guard)
    return out, events


def gillespie_events(exps, unis, n0, birth_rate, death_rate, horizon, guard):
    """Full birth-death event list up to `horizon`.

    Returns (times, deltas) for every jump with time <= horizon, deltas
    being +1 for a birth and -1 for a death.
    """
    times = []
    deltas = []
    total = birth_rate + death_rate
    pbirth = birth_rate / total
    n = n0
    t = 0.0
    events = 0
    while n > 0:
        w = exps.next() / (n * total)
        t = t + w
        if t > horizon:
            break
        if unis.next() < pbirth:
            n += 1
            d = 1
        else:
            n -= 1
            d = -1
        times.append(t)
        deltas.append(d)
        events += 1
        if events > guard:
            raise ResourceLimitError(
                "population exceeded the event guard (%d events)" % guard)
    return (np.array(times, dtype=np.float64),
            np.array(deltas, dtype=np.int64))


def feller_values(x0, dt_drift, sig_sqdt, normals, record_idx):
    """Full-truncation Euler steps of the square-root diffusion.

    One step: x <- x + dt_drift*x + sig_sqdt*(sqrt(x)*z), clamped at 0.
    `record_idx` are sorted 1-based step counts at which to record the state;
    returns the recorded values.
    """
    n_rec = len(record_idx)
    out = np.zeros(n_rec, dtype=np.float64)
    x = x0
    ri = 0
    zs = normals.tolist()
    for k in range(len(zs)):
        x = x + dt_drift * x + sig_sqdt * (math.sqrt(x) * zs[k])
        if x < 0.0:
            x = 0.0
        if ri < n_rec and record_idx[ri] == k + 1:
            out[ri] = x
            ri += 1
    return out
