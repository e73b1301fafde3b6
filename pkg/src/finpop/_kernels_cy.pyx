# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo kernels.

Float-for-float twin of finpop._kernels_py: same uniform-stream
consumption order, same operation order per replication.  The inner
loops draw doubles straight from the generator's BitGenerator, so the
stream is the one numpy's Generator.random would produce.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.float cimport DBL_EPSILON
from libc.math cimport sqrt
from numpy.random cimport bitgen_t

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef bitgen_t *_bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("rng does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


def count_sum_tail(values, Py_ssize_t n, double threshold, Py_ssize_t reps, object rng):
    """Number of replications with sample sum >= threshold."""
    v_arr = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef Py_ssize_t N = v.shape[0]
    idx_arr = np.empty(N, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t r, i, j, k, tmp
    cdef double u, s
    cdef Py_ssize_t hits = 0
    with nogil:
        for r in range(reps):
            for k in range(N):
                idx[k] = k
            s = 0.0
            for i in range(n):
                u = bg.next_double(bg.state)
                j = i + <Py_ssize_t>(u * (N - i))
                tmp = idx[j]
                idx[j] = idx[i]
                idx[i] = tmp
                s += v[tmp]
            if s >= threshold:
                hits += 1
    return int(hits)


def count_t_tail(values, double mu, Py_ssize_t n, double q, double x,
                 Py_ssize_t reps, object rng):
    """Count sqrt(n)(Xbar - mu) >= x sqrt(q ssq/(n-1)); returns (hits, degenerate)."""
    v_arr = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef Py_ssize_t N = v.shape[0]
    idx_arr = np.empty(N, dtype=np.intp)
    cdef Py_ssize_t[::1] idx = idx_arr
    buf_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t r, i, j, k, tmp
    cdef double u, s, sumsq, mean, ssq, dev, val, lhs, rhs
    cdef double sqrt_n = sqrt(<double> n)
    cdef double deg_tol = (n * DBL_EPSILON) * (n * DBL_EPSILON)
    cdef double nm1 = <double> (n - 1)
    cdef Py_ssize_t hits = 0
    cdef Py_ssize_t degenerate = 0
    with nogil:
        for r in range(reps):
            for k in range(N):
                idx[k] = k
            s = 0.0
            sumsq = 0.0
            for i in range(n):
                u = bg.next_double(bg.state)
                j = i + <Py_ssize_t>(u * (N - i))
                tmp = idx[j]
                idx[j] = idx[i]
                idx[i] = tmp
                val = v[tmp]
                buf[i] = val
                s += val
                sumsq += val * val
            mean = s / n
            ssq = 0.0
            for i in range(n):
                dev = buf[i] - mean
                ssq += dev * dev
            if ssq <= sumsq * deg_tol:
                degenerate += 1
            else:
                lhs = sqrt_n * (mean - mu)
                rhs = x * sqrt(q * ssq / nm1)
                if lhs >= rhs:
                    hits += 1
    return int(hits), int(degenerate)


def count_bernoulli_sum(values, double p, Py_ssize_t n, double threshold,
                        Py_ssize_t accept_target, Py_ssize_t max_attempts, object rng):
    """Rejection sampler on i.i.d. Bernoulli(p) inclusion vectors; keeps
    exactly-n vectors; returns (hits, accepted, attempts)."""
    v_arr = np.ascontiguousarray(values, dtype=np.float64)
    cdef double[::1] v = v_arr
    cdef Py_ssize_t N = v.shape[0]
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t k, cnt
    cdef double u, s
    cdef Py_ssize_t hits = 0
    cdef Py_ssize_t accepted = 0
    cdef Py_ssize_t attempts = 0
    with nogil:
        while accepted < accept_target and attempts < max_attempts:
            cnt = 0
            s = 0.0
            for k in range(N):
                u = bg.next_double(bg.state)
                if u < p:
                    cnt += 1
                    s += v[k]
            attempts += 1
            if cnt == n:
                accepted += 1
                if s >= threshold:
                    hits += 1
    return int(hits), int(accepted), int(attempts)
