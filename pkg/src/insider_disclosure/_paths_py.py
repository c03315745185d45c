"""Vectorized numpy path generator; reference for the compiled kernel.

Random numbers come from a counter-based SplitMix64 construction: the
``j``-th 64-bit word of path ``i`` is a pure function of
``(seed, i, j)``, so any partition of the path range into blocks yields
the same draws.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))
TWO_M53 = 2.0 ** -53
TWO_PI = 2.0 * np.pi


def mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def path_keys(seed: int, paths: np.ndarray) -> np.ndarray:
    # uint64 wraparound is the intended modular arithmetic
    with np.errstate(over="ignore"):
        base = mix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
        return mix64(base + paths.astype(np.uint64) * GOLDEN)


def uniform_words(keys: np.ndarray, counter: int) -> np.ndarray:
    with np.errstate(over="ignore"):
        step = np.array([counter + 1], dtype=np.uint64) * GOLDEN
        return mix64(keys + step)


def normals(keys: np.ndarray, slot: int) -> np.ndarray:
    """Standard normal number ``slot`` of each path (Box-Muller, cosine branch)."""
    r1 = uniform_words(keys, 2 * slot)
    r2 = uniform_words(keys, 2 * slot + 1)
    u1 = ((r1 >> _S11).astype(np.float64) + 1.0) * TWO_M53
    u2 = (r2 >> _S11).astype(np.float64) * TWO_M53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)


def simulate_block(u, theta, lam, gamma, gamma_prime, eta, sz,
                   p0, sd0, sigma_mu, seed, start, count, disclose):
    """Simulate paths ``start .. start+count-1``.

    Returns ``(v, x, mu, p, pstar)``; the last four have shape ``(count, N)``
    and ``pstar[:, k]`` is the adjusted price after auction ``k + 1``.
    """
    N = len(u)
    keys = path_keys(seed, np.arange(start, start + count, dtype=np.uint64))
    v = p0 + sd0 * normals(keys, 0)
    x = np.empty((count, N))
    mu = np.empty((count, N))
    p = np.empty((count, N))
    ps = np.empty((count, N))
    P = np.full(count, float(p0))
    for k in range(N):
        m = sigma_mu * normals(keys, 1 + 2 * k)
        z = sz[k] * normals(keys, 2 + 2 * k)
        xk = u[k] * (v - P) + theta[k] * v + z
        pk = (1.0 + gamma[k]) * P + lam[k] * (xk + m)
        if disclose:
            P = (1.0 + gamma_prime[k]) * P + eta[k] * xk
        else:
            P = pk
        x[:, k], mu[:, k], p[:, k], ps[:, k] = xk, m, pk, P
    return v, x, mu, p, ps
