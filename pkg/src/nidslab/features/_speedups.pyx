# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled damped streaming-statistics pool.

Mirror of `_pystats.StatsPool`; every arithmetic step happens in the same
order so both backends agree bit for bit.
"""

import numpy as np

from libc.math cimport isnan, pow, sqrt

DEF GROW = 64


cdef class StatsPool:
    cdef public object lambdas
    cdef double[::1] _lam
    cdef public Py_ssize_t n_lam
    cdef public Py_ssize_t size
    cdef double[:, ::1] _w
    cdef double[:, ::1] _ls
    cdef double[:, ::1] _ss
    cdef double[::1] _last_t

    def __init__(self, lambdas):
        lam = np.asarray(lambdas, dtype=np.float64)
        if lam.ndim != 1 or lam.shape[0] == 0:
            raise ValueError("need at least one decay rate")
        self.lambdas = lam
        self._lam = lam
        self.n_lam = lam.shape[0]
        self.size = 0
        self._w = np.zeros((GROW, self.n_lam))
        self._ls = np.zeros((GROW, self.n_lam))
        self._ss = np.zeros((GROW, self.n_lam))
        self._last_t = np.full(GROW, np.nan)

    cpdef Py_ssize_t new_slot(self):
        if self.size == self._last_t.shape[0]:
            self._grow()
        cdef Py_ssize_t slot = self.size
        self.size += 1
        return slot

    cdef void _grow(self):
        cdef Py_ssize_t cap = self._last_t.shape[0] * 2
        w = np.zeros((cap, self.n_lam))
        ls = np.zeros((cap, self.n_lam))
        ss = np.zeros((cap, self.n_lam))
        last = np.full(cap, np.nan)
        w[: self.size] = np.asarray(self._w)[: self.size]
        ls[: self.size] = np.asarray(self._ls)[: self.size]
        ss[: self.size] = np.asarray(self._ss)[: self.size]
        last[: self.size] = np.asarray(self._last_t)[: self.size]
        self._w = w
        self._ls = ls
        self._ss = ss
        self._last_t = last

    def clone(self):
        cdef StatsPool other = StatsPool.__new__(StatsPool)
        other.lambdas = self.lambdas
        other._lam = self._lam
        other.n_lam = self.n_lam
        other.size = self.size
        other._w = np.asarray(self._w).copy()
        other._ls = np.asarray(self._ls).copy()
        other._ss = np.asarray(self._ss).copy()
        other._last_t = np.asarray(self._last_t).copy()
        return other

    def last_time(self, Py_ssize_t slot):
        return self._last_t[slot]

    cdef void _insert_c(self, Py_ssize_t slot, double t, double v):
        cdef double last = self._last_t[slot]
        cdef bint fresh = isnan(last)
        cdef Py_ssize_t k
        cdef double w, ls, ss, dt, f
        for k in range(self.n_lam):
            w = self._w[slot, k]
            ls = self._ls[slot, k]
            ss = self._ss[slot, k]
            if not fresh:
                dt = t - last
                if dt < 0.0:
                    dt = 0.0
                f = pow(2.0, -self._lam[k] * dt)
                w *= f
                ls *= f
                ss *= f
            self._w[slot, k] = w + 1.0
            self._ls[slot, k] = ls + v
            self._ss[slot, k] = ss + v * v
        self._last_t[slot] = t

    cdef void _stats_c(self, Py_ssize_t slot, Py_ssize_t k, double t,
                       double* w_out, double* mean_out, double* std_out):
        cdef double last = self._last_t[slot]
        cdef double dt, w, mean, var
        if isnan(last):
            w_out[0] = 0.0
            mean_out[0] = 0.0
            std_out[0] = 0.0
            return
        dt = t - last
        if dt < 0.0:
            dt = 0.0
        w = self._w[slot, k] * pow(2.0, -self._lam[k] * dt)
        mean = self._ls[slot, k] / self._w[slot, k]
        var = self._ss[slot, k] / self._w[slot, k] - mean * mean
        if var < 0.0:
            var = 0.0
        w_out[0] = w
        mean_out[0] = mean
        std_out[0] = sqrt(var)

    cpdef void update3(self, Py_ssize_t slot, double t, double v,
                       double[::1] out, Py_ssize_t off, Py_ssize_t stride):
        self._insert_c(slot, t, v)
        cdef Py_ssize_t k, base
        cdef double w, mean, std
        for k in range(self.n_lam):
            self._stats_c(slot, k, t, &w, &mean, &std)
            base = off + k * stride
            out[base] = w
            out[base + 1] = mean
            out[base + 2] = std

    cpdef void query3(self, Py_ssize_t slot, double t,
                      double[::1] out, Py_ssize_t off, Py_ssize_t stride):
        cdef Py_ssize_t k, base
        cdef double w, mean, std
        for k in range(self.n_lam):
            self._stats_c(slot, k, t, &w, &mean, &std)
            base = off + k * stride
            out[base] = w
            out[base + 1] = mean
            out[base + 2] = std

    cpdef void jitter3(self, Py_ssize_t slot, double t,
                       double[::1] out, Py_ssize_t off, Py_ssize_t stride):
        cdef double last = self._last_t[slot]
        cdef double gap
        if isnan(last):
            gap = 0.0
        else:
            gap = t - last
            if gap < 0.0:
                gap = 0.0
        self.update3(slot, t, gap, out, off, stride)

    cpdef void pair5(self, Py_ssize_t slot_fwd, Py_ssize_t slot_rev,
                     double t, double v,
                     double[::1] out, Py_ssize_t off, Py_ssize_t stride):
        self._insert_c(slot_fwd, t, v)
        cdef Py_ssize_t k, base
        cdef double w, mean, std, w_r, mean_r, std_r, var, var_r
        for k in range(self.n_lam):
            self._stats_c(slot_fwd, k, t, &w, &mean, &std)
            self._stats_c(slot_rev, k, t, &w_r, &mean_r, &std_r)
            var = std * std
            var_r = std_r * std_r
            base = off + k * stride
            out[base] = w
            out[base + 1] = mean
            out[base + 2] = std
            out[base + 3] = sqrt(mean * mean + mean_r * mean_r)
            out[base + 4] = sqrt(var * var + var_r * var_r)
