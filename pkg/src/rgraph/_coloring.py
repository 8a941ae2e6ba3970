"""Compiled local search for the ANOVA coloring objective.

``Q`` is evaluated from sufficient statistics instead of the ``O(n^2)``
residuals::

    D[i, t]   neighbours of i with color t
    E[s, t]   sum over i in s of D[i, t]   (E[s, s] = twice the inner edges)
    S2[s, t]  sum over i in s of D[i, t]^2
    sizes[s]  class sizes

Cross cells are the interaction sum of squares of a two-way layout,
``E + E^2 / (n_s n_t) - S2[s, t] / n_t - S2[t, s] / n_s``. Diagonal cells
use the closed form of ``sum_{i<j} (eps - w_i - w_j)^2`` with
``w_i = D[i, s] / (n_s - 1) - u / 2``. Moving one vertex touches only its
neighbours' rows, so a candidate costs ``O(deg + k^2)``.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def q_from_stats(S2, E, sizes):
    k = sizes.shape[0]
    q = 0.0
    for s in range(k):
        N = sizes[s]
        if N >= 2:
            es = E[s, s] / 2.0
            u = es / (N * (N - 1) / 2.0)
            S = float(S2[s, s])
            swd = S / (N - 1) - u * es
            sww = S / ((N - 1) * (N - 1)) - 0.75 * N * u * u
            sw = N * u / 2.0
            q += es - 2.0 * swd + (N - 2) * sww + sw * sw
        for t in range(s + 1, k):
            Nt = sizes[t]
            if N >= 1 and Nt >= 1:
                e = float(E[s, t])
                q += e + e * e / (N * Nt) - S2[s, t] / Nt - S2[t, s] / N
    return q


@njit(cache=True)
def build_stats(indptr, indices, lab, k):
    n = lab.shape[0]
    D = np.zeros((n, k), dtype=np.int64)
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            D[i, lab[indices[p]]] += 1
    E = np.zeros((k, k), dtype=np.int64)
    S2 = np.zeros((k, k), dtype=np.int64)
    sizes = np.zeros(k, dtype=np.int64)
    for i in range(n):
        s = lab[i]
        sizes[s] += 1
        for t in range(k):
            E[s, t] += D[i, t]
            S2[s, t] += D[i, t] * D[i, t]
    return D, E, S2, sizes


@njit(cache=True)
def move(indptr, indices, lab, D, E, S2, sizes, x, t):
    """Recolor vertex ``x`` to ``t`` in place, updating all statistics."""
    s = lab[x]
    k = sizes.shape[0]
    for p in range(indptr[x], indptr[x + 1]):
        y = indices[p]
        cy = lab[y]
        S2[cy, s] += 1 - 2 * D[y, s]
        S2[cy, t] += 2 * D[y, t] + 1
        D[y, s] -= 1
        D[y, t] += 1
        E[cy, s] -= 1
        E[cy, t] += 1
    for r in range(k):
        dx = D[x, r]
        S2[s, r] -= dx * dx
        S2[t, r] += dx * dx
        E[s, r] -= dx
        E[t, r] += dx
    sizes[s] -= 1
    sizes[t] += 1
    lab[x] = t


@njit(cache=True, nogil=True)
def single_sweep(indptr, indices, lab, D, E, S2, sizes, order, color_offsets, q, rtol):
    """One pass over ``order`` accepting the first improving recolor of each
    vertex. Returns ``(accepted, q)``. Never empties a color class."""
    k = sizes.shape[0]
    accepted = 0
    for ii in range(order.shape[0]):
        x = order[ii]
        s = lab[x]
        if sizes[s] <= 1:
            continue
        for jj in range(k - 1):
            t = (s + 1 + (color_offsets[ii] + jj) % (k - 1)) % k
            move(indptr, indices, lab, D, E, S2, sizes, x, t)
            q_new = q_from_stats(S2, E, sizes)
            if q_new < q - rtol * max(1.0, abs(q)):
                q = q_new
                accepted += 1
                break
            move(indptr, indices, lab, D, E, S2, sizes, x, s)
    return accepted, q


@njit(cache=True, nogil=True)
def pair_scan(indptr, indices, lab, D, E, S2, sizes, order, q, rtol):
    """Find and apply the first improving label exchange between two
    differently colored vertices. Returns ``(found, q)``."""
    n = order.shape[0]
    for ii in range(n):
        x = order[ii]
        for jj in range(ii + 1, n):
            y = order[jj]
            s = lab[x]
            t = lab[y]
            if s == t:
                continue
            move(indptr, indices, lab, D, E, S2, sizes, x, t)
            move(indptr, indices, lab, D, E, S2, sizes, y, s)
            q_new = q_from_stats(S2, E, sizes)
            if q_new < q - rtol * max(1.0, abs(q)):
                return True, q_new
            move(indptr, indices, lab, D, E, S2, sizes, y, t)
            move(indptr, indices, lab, D, E, S2, sizes, x, s)
    return False, q
