# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Statement-for-statement mirror of pykernels.py: same draw sources, same
block schedule, same floating point operation order (the extension is built
with -ffp-contract=off), so results are bit-identical to the pure backend.
Keep the two files in sync.
"""

from libc.math cimport sqrt

import numpy as np

from gwexplore.errors import ResourceLimitError

__all__ = [
    "zigzag_extrema",
    "zigzag_crossings",
    "gillespie_values_at",
    "gillespie_events",
    "feller_values",
]


cdef class _Taker:
    """C-side cursor over a block-buffered draw source."""

    cdef object source
    cdef double[::1] buf
    cdef Py_ssize_t pos
    cdef Py_ssize_t n

    def __cinit__(self, source):
        self.source = source
        self.buf = source.buf
        self.pos = source.pos
        self.n = self.buf.shape[0]

    cdef double take(self):
        cdef double v
        if self.pos >= self.n:
            self.buf = self.source.refill()
            self.pos = 0
            self.n = self.buf.shape[0]
        v = self.buf[self.pos]
        self.pos += 1
        return v

    cdef void close(self):
        # Hand the cursor back so later consumers of the source continue
        # exactly where the kernel stopped.
        self.source.pos = self.pos


def zigzag_extrema(exps, double lam, double mu, double ceiling,
                   long long m_target, double min_duration, double inv_slope,
                   long long guard):
    """See pykernels.zigzag_extrema."""
    cdef _Taker src = _Taker(exps)
    cdef Py_ssize_t cap = 1024
    cdef Py_ssize_t n = 1
    arr = np.empty(cap, dtype=np.float64)
    cdef double[::1] hv = arr
    cdef double cur = 0.0
    cdef double travel = 0.0
    cdef double u, v, top, nxt
    cdef long long returns = 0
    cdef long long pairs = 0
    hv[0] = 0.0
    try:
        while True:
            u = src.take() / lam
            top = cur + u
            if top >= ceiling:
                top = ceiling
            v = src.take() / mu
            nxt = top - v
            if nxt <= 0.0:
                nxt = 0.0
                returns += 1
            if n + 2 > cap:
                cap = cap * 2
                grown = np.empty(cap, dtype=np.float64)
                grown[:n] = arr[:n]
                arr = grown
                hv = arr
            hv[n] = top
            hv[n + 1] = nxt
            n += 2
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
    finally:
        src.close()
    return arr[:n].copy(), returns


def zigzag_crossings(exps, double lam, double mu, double ceiling,
                     long long m_target, double[::1] levels, long long guard):
    """See pykernels.zigzag_crossings."""
    cdef _Taker src = _Taker(exps)
    cdef Py_ssize_t nlev = levels.shape[0]
    up_arr = np.zeros(nlev, dtype=np.int64)
    down_arr = np.zeros(nlev, dtype=np.int64)
    cdef long long[::1] up = up_arr
    cdef long long[::1] down = down_arr
    cdef double cur = 0.0
    cdef double travel = 0.0
    cdef double u, v, top, nxt, t
    cdef long long returns = 0
    cdef long long hits = 0
    cdef long long pairs = 0
    cdef Py_ssize_t j
    try:
        while True:
            u = src.take() / lam
            top = cur + u
            if top >= ceiling:
                top = ceiling
                hits += 1
            for j in range(nlev):
                t = levels[j]
                if cur <= t < top:
                    up[j] += 1
            v = src.take() / mu
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
    finally:
        src.close()
    return up_arr, down_arr, returns, hits, travel


def gillespie_values_at(exps, unis, long long n0, double birth_rate,
                        double death_rate, double[::1] at_times,
                        long long guard):
    """See pykernels.gillespie_values_at."""
    cdef _Taker esrc = _Taker(exps)
    cdef _Taker usrc = _Taker(unis)
    cdef Py_ssize_t n_times = at_times.shape[0]
    out_arr = np.zeros(n_times, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef double total = birth_rate + death_rate
    cdef double pbirth = birth_rate / total
    cdef long long n = n0
    cdef double t = 0.0
    cdef double w, tnext
    cdef Py_ssize_t ti = 0
    cdef long long events = 0
    try:
        while True:
            if n == 0:
                while ti < n_times:
                    out[ti] = 0
                    ti += 1
                break
            w = esrc.take() / (n * total)
            tnext = t + w
            while ti < n_times and at_times[ti] < tnext:
                out[ti] = n
                ti += 1
            if ti == n_times:
                break
            t = tnext
            if usrc.take() < pbirth:
                n += 1
            else:
                n -= 1
            events += 1
            if events > guard:
                raise ResourceLimitError(
                    "population exceeded the event guard (%d events)" % guard)
    finally:
        esrc.close()
        usrc.close()
    return out_arr, events


def gillespie_events(exps, unis, long long n0, double birth_rate,
                     double death_rate, double horizon, long long guard):
    """See pykernels.gillespie_events."""
    cdef _Taker esrc = _Taker(exps)
    cdef _Taker usrc = _Taker(unis)
    cdef Py_ssize_t cap = 1024
    cdef Py_ssize_t m = 0
    times_arr = np.empty(cap, dtype=np.float64)
    deltas_arr = np.empty(cap, dtype=np.int64)
    cdef double[::1] times = times_arr
    cdef long long[::1] deltas = deltas_arr
    cdef double total = birth_rate + death_rate
    cdef double pbirth = birth_rate / total
    cdef long long n = n0
    cdef double t = 0.0
    cdef double w
    cdef long long d
    cdef long long events = 0
    try:
        while n > 0:
            w = esrc.take() / (n * total)
            t = t + w
            if t > horizon:
                break
            if usrc.take() < pbirth:
                n += 1
                d = 1
            else:
                n -= 1
                d = -1
            if m + 1 > cap:
                cap = cap * 2
                tgrown = np.empty(cap, dtype=np.float64)
                tgrown[:m] = times_arr[:m]
                times_arr = tgrown
                times = times_arr
                dgrown = np.empty(cap, dtype=np.int64)
                dgrown[:m] = deltas_arr[:m]
                deltas_arr = dgrown
                deltas = deltas_arr
            times[m] = t
            deltas[m] = d
            m += 1
            events += 1
            if events > guard:
                raise ResourceLimitError(
                    "population exceeded the event guard (%d events)" % guard)
    finally:
        esrc.close()
        usrc.close()
    return times_arr[:m].copy(), deltas_arr[:m].copy()


def feller_values(double x0, double dt_drift, double sig_sqdt,
                  double[::1] normals, long long[::1] record_idx):
    """See pykernels.feller_values."""
    cdef Py_ssize_t n_rec = record_idx.shape[0]
    out_arr = np.zeros(n_rec, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double x = x0
    cdef Py_ssize_t ri = 0
    cdef Py_ssize_t k
    cdef Py_ssize_t n_steps = normals.shape[0]
    for k in range(n_steps):
        x = x + dt_drift * x + sig_sqdt * (sqrt(x) * normals[k])
        if x < 0.0:
            x = 0.0
        if ri < n_rec and record_idx[ri] == k + 1:
            out[ri] = x
            ri += 1
    return out_arr
