# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled serial schedule generation kernels (same interface as ``_sgs_py``)."""

from libc.stdlib cimport calloc, free, malloc

import numpy as np

from .errors import UnschedulableMode

BACKEND = "cython"


cdef class KernelData:
    cdef public int n, R, width, horizon
    cdef long[::1] dur        # [j * width + m]
    cdef long[::1] req        # [(j * width + m) * R + k]
    cdef long[::1] cap
    cdef long[::1] pred_ptr, pred_idx, succ_ptr, succ_idx

    def __init__(self, instance):
        modes = instance.modes
        self.n = len(modes)
        self.R = instance.n_renewable
        self.width = max(len(ms) for ms in modes)
        dur = np.zeros(self.n * self.width, dtype=np.int_)
        req = np.zeros(self.n * self.width * max(self.R, 1), dtype=np.int_)
        horizon = 0
        for j, ms in enumerate(modes):
            horizon += max(m.duration for m in ms)
            for mi, mode in enumerate(ms):
                dur[j * self.width + mi] = mode.duration
                for k in range(self.R):
                    req[(j * self.width + mi) * self.R + k] = mode.renewable[k]
        self.horizon = horizon
        self.dur = dur
        self.req = req
        self.cap = np.asarray(instance.renewable_capacity, dtype=np.int_).reshape(-1)
        self.pred_ptr, self.pred_idx = _csr(instance.predecessors)
        self.succ_ptr, self.succ_idx = _csr(instance.successors)


def _csr(lists):
    ptr = np.zeros(len(lists) + 1, dtype=np.int_)
    flat = []
    for i, lst in enumerate(lists):
        flat.extend(lst)
        ptr[i + 1] = len(flat)
    return ptr, np.asarray(flat if flat else [0], dtype=np.int_)


cdef int _check_demand(KernelData data, long j, long base) except -1:
    cdef int k
    for k in range(data.R):
        if data.req[base * data.R + k] > data.cap[k]:
            raise UnschedulableMode(
                f"activity {j} requests {data.req[base * data.R + k]} of renewable {k + 1} "
                f"(capacity {data.cap[k]})"
            )
    return 0


def forward(KernelData data, order, modes):
    cdef int n = data.n
    cdef int R = data.R
    cdef int H = data.horizon + 1
    cdef long j, m, d, t, tau, f, base, p, r, end
    cdef int k, i, conflict
    cdef long n_order = len(order)
    cdef long *start = <long *> calloc(n, sizeof(long))
    cdef long *finish = <long *> calloc(n, sizeof(long))
    cdef long *usage = <long *> calloc(H * (R if R > 0 else 1), sizeof(long))
    cdef long *mode_of = <long *> malloc(n * sizeof(long))
    cdef long *seq = <long *> malloc((n_order if n_order > 0 else 1) * sizeof(long))
    if start == NULL or finish == NULL or usage == NULL or mode_of == NULL or seq == NULL:
        free(start); free(finish); free(usage); free(mode_of); free(seq)
        raise MemoryError()
    try:
        for i in range(n):
            mode_of[i] = modes[i]
        for i in range(n_order):
            seq[i] = order[i]
        for i in range(n_order):
            j = seq[i]
            m = mode_of[j]
            base = j * data.width + m
            d = data.dur[base]
            t = 0
            for p in range(data.pred_ptr[j], data.pred_ptr[j + 1]):
                f = finish[data.pred_idx[p]]
                if f > t:
                    t = f
            if d > 0 and R > 0:
                _check_demand(data, j, base)
                tau = t
                while tau < t + d:
                    for k in range(R):
                        r = data.req[base * R + k]
                        if r and usage[tau * R + k] + r > data.cap[k]:
                            t = tau + 1
                            break
                    tau += 1
                for tau in range(t, t + d):
                    for k in range(R):
                        usage[tau * R + k] += data.req[base * R + k]
            start[j] = t
            finish[j] = t + d
        end = 0
        for i in range(1, n - 1):
            if finish[i] > end:
                end = finish[i]
        start[n - 1] = end
        return [start[i] for i in range(n)]
    finally:
        free(start); free(finish); free(usage); free(mode_of); free(seq)


def backward(KernelData data, order, modes, long deadline):
    cdef int n = data.n
    cdef int R = data.R
    cdef long H = deadline if deadline > 0 else 1
    cdef long j, m, d, t, tau, base, s, r, lf
    cdef int k, i
    cdef bint failed = False
    cdef long n_order = len(order)
    cdef long *start = <long *> calloc(n, sizeof(long))
    cdef long *usage = <long *> calloc(H * (R if R > 0 else 1), sizeof(long))
    cdef long *mode_of = <long *> malloc(n * sizeof(long))
    cdef long *seq = <long *> malloc((n_order if n_order > 0 else 1) * sizeof(long))
    if start == NULL or usage == NULL or mode_of == NULL or seq == NULL:
        free(start); free(usage); free(mode_of); free(seq)
        raise MemoryError()
    try:
        for i in range(n):
            mode_of[i] = modes[i]
        for i in range(n_order):
            seq[i] = order[i]
        start[n - 1] = deadline
        for i in range(n_order - 1, -1, -1):
            j = seq[i]
            m = mode_of[j]
            base = j * data.width + m
            d = data.dur[base]
            lf = deadline
            for s in range(data.succ_ptr[j], data.succ_ptr[j + 1]):
                if start[data.succ_idx[s]] < lf:
                    lf = start[data.succ_idx[s]]
            t = lf - d
            if t < 0:
                failed = True
                break
            if d > 0 and R > 0:
                _check_demand(data, j, base)
                tau = t + d - 1
                while tau >= t:
                    for k in range(R):
                        r = data.req[base * R + k]
                        if r and usage[tau * R + k] + r > data.cap[k]:
                            t = tau - d
                            break
                    if t < 0:
                        break
                    tau -= 1
                if t < 0:
                    failed = True
                    break
                for tau in range(t, t + d):
                    for k in range(R):
                        usage[tau * R + k] += data.req[base * R + k]
            start[j] = t
        if failed:
            return None
        return [start[i] for i in range(n)]
    finally:
        free(start); free(usage); free(mode_of); free(seq)
