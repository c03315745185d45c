# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled path generator; bit-for-bit mirror of ``_paths_py.simulate_block``."""
import numpy as np
from libc.math cimport sqrt, log, cos, M_PI
from libc.stdint cimport uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_M53 = 1.1102230246251565e-16


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double normal(uint64_t key, Py_ssize_t slot) noexcept nogil:
    cdef uint64_t r1 = mix64(key + <uint64_t>(2 * slot + 1) * GOLDEN)
    cdef uint64_t r2 = mix64(key + <uint64_t>(2 * slot + 2) * GOLDEN)
    cdef double u1 = (<double>(r1 >> 11) + 1.0) * TWO_M53
    cdef double u2 = <double>(r2 >> 11) * TWO_M53
    return sqrt(-2.0 * log(u1)) * cos((2.0 * M_PI) * u2)


def simulate_block(double[::1] u, double[::1] theta, double[::1] lam,
                   double[::1] gamma, double[::1] gamma_prime, double[::1] eta,
                   double[::1] sz, double p0, double sd0, double sigma_mu,
                   seed, Py_ssize_t start, Py_ssize_t count, bint disclose):
    cdef Py_ssize_t N = u.shape[0]
    cdef uint64_t base = mix64(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    v_arr = np.empty(count)
    x_arr = np.empty((count, N))
    mu_arr = np.empty((count, N))
    p_arr = np.empty((count, N))
    ps_arr = np.empty((count, N))
    cdef double[::1] v = v_arr
    cdef double[:, ::1] x = x_arr
    cdef double[:, ::1] mu = mu_arr
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] ps = ps_arr
    cdef Py_ssize_t i, k
    cdef uint64_t key
    cdef double vi, P, m, z, xk, pk
    with nogil:
        for i in range(count):
            key = mix64(base + <uint64_t>(start + i) * GOLDEN)
            vi = p0 + sd0 * normal(key, 0)
            v[i] = vi
            P = p0
            for k in range(N):
                m = sigma_mu * normal(key, 1 + 2 * k)
                z = sz[k] * normal(key, 2 + 2 * k)
                xk = u[k] * (vi - P) + theta[k] * vi + z
                pk = (1.0 + gamma[k]) * P + lam[k] * (xk + m)
                if disclose:
                    P = (1.0 + gamma_prime[k]) * P + eta[k] * xk
                else:
                    P = pk
                x[i, k] = xk
                mu[i, k] = m
                p[i, k] = pk
                ps[i, k] = P
    return v_arr, x_arr, mu_arr, p_arr, ps_arr
