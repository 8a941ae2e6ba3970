"""Compiled kernels for the degree-preserving swap chain.

State is a dense ``uint8`` adjacency plus a ``uint64`` bitset copy of it.
The meta-degree ``M`` (number of admissible swaps) equals the number of
4-cycles alternating edge / non-edge, ``tr((A B)^2) / 4`` with ``B`` the
complement. Toggling pair ``uv`` changes ``M`` by ``(ABA - BAB)[u, v]``
(sign flipped when adding an edge); expanding ``B = J - I - A`` leaves only
degrees, ``A d``, ``A^2[u, v]`` and ``A^3[u, v]``, all cheap on bitsets.

Random numbers come from a caller-supplied buffer of uniforms, so the
numpy generator stays the only source of randomness.
"""
import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True)
def _codegree(bits, u, v):
    total = 0
    for w in range(bits.shape[1]):
        total += _popcount(bits[u, w] & bits[v, w])
    return total


_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_INDEX = np.array([
    0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
    62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
    63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
    46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6,
], dtype=np.int64)


@njit(cache=True, inline="always")
def _lowbit_index(low):
    return _DEBRUIJN_INDEX[(low * _DEBRUIJN) >> np.uint64(58)]


@njit(cache=True)
def _toggle_delta(bits, deg, m, u, v):
    """Change in meta-degree if pair ``uv`` is toggled in the current state."""
    a_uv = np.int64((bits[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1))
    a2 = _codegree(bits, u, v)
    a3 = 0
    su = 0
    for w in range(bits.shape[1]):
        word = bits[u, w]
        while word:
            low = word & (~word + np.uint64(1))
            x = (w << 6) + _lowbit_index(low)
            su += deg[x]
            a3 += _codegree(bits, x, v)
            word ^= low
    sv = 0
    for w in range(bits.shape[1]):
        word = bits[v, w]
        while word:
            low = word & (~word + np.uint64(1))
            sv += deg[(w << 6) + _lowbit_index(low)]
            word ^= low
    du = deg[u]
    dv = deg[v]
    f = du * dv - 2 * m + du + dv - a_uv + su + sv - 3 * a2 - 2 * a3
    if a_uv:
        return f
    return -f


@njit(cache=True)
def _toggle(adj, bits, deg, u, v):
    bits[u, v >> 6] ^= np.uint64(1) << np.uint64(v & 63)
    bits[v, u >> 6] ^= np.uint64(1) << np.uint64(u & 63)
    step = -1 if adj[u, v] else 1
    adj[u, v] = 1 if step > 0 else 0
    adj[v, u] = adj[u, v]
    deg[u] += step
    deg[v] += step
    return step


@njit(cache=True)
def _pair_bit(u, v, n):
    if u > v:
        u, v = v, u
    return u * n - (u * (u + 1)) // 2 + (v - u - 1)


@njit(cache=True)
def _propose(adj, edges, rnd, pos):
    """One proposal attempt: returns (ok, i, j, a, b, c, d, pos)."""
    m = edges.shape[0]
    i = np.int64(rnd[pos] * m)
    j = np.int64(rnd[pos + 1] * (m - 1))
    flip = rnd[pos + 2] < 0.5
    pos += 3
    if i >= m:
        i = m - 1
    if j >= m - 1:
        j = m - 2
    if j >= i:
        j += 1
    a = edges[i, 0]
    c = edges[i, 1]
    if flip:
        b = edges[j, 1]
        d = edges[j, 0]
    else:
        b = edges[j, 0]
        d = edges[j, 1]
    ok = a != b and a != d and c != b and c != d
    if ok:
        ok = adj[a, d] == 0 and adj[b, c] == 0
    return ok, i, j, a, b, c, d, pos


@njit(cache=True, nogil=True)
def metropolis_steps(adj, bits, deg, edges, state, steps, rnd, trace, code):
    """Advance the meta-degree-corrected chain.

    ``state`` is ``int64[3]``: meta-degree, edge count, accepted swaps.
    Runs until ``steps`` steps are done or the random buffer runs low and
    returns ``(steps_done, code)``. ``trace`` (length 0 to disable) receives
    the pair-bitmask code of the state after every step.
    """
    n = adj.shape[0]
    m = state[1]
    pos = 0
    done = 0
    nr = rnd.shape[0]
    record = trace.shape[0] > 0
    while done < steps:
        found = False
        while pos + 4 <= nr:
            ok, i, j, a, b, c, d, pos = _propose(adj, edges, rnd, pos)
            if ok:
                found = True
                break
        if not found:
            break
        M = state[0]
        delta = _toggle_delta(bits, deg, m, a, c)
        m += _toggle(adj, bits, deg, a, c)
        delta += _toggle_delta(bits, deg, m, b, d)
        m += _toggle(adj, bits, deg, b, d)
        delta += _toggle_delta(bits, deg, m, a, d)
        m += _toggle(adj, bits, deg, a, d)
        delta += _toggle_delta(bits, deg, m, b, c)
        m += _toggle(adj, bits, deg, b, c)
        M_new = M + delta
        u = rnd[pos]
        pos += 1
        if M_new <= M or u * M_new < M:
            edges[i, 0] = a
            edges[i, 1] = d
            edges[j, 0] = b
            edges[j, 1] = c
            state[0] = M_new
            state[2] += 1
            if record:
                code ^= np.int64(1) << _pair_bit(a, c, n)
                code ^= np.int64(1) << _pair_bit(b, d, n)
                code ^= np.int64(1) << _pair_bit(a, d, n)
                code ^= np.int64(1) << _pair_bit(b, c, n)
        else:
            m += _toggle(adj, bits, deg, b, c)
            m += _toggle(adj, bits, deg, a, d)
            m += _toggle(adj, bits, deg, b, d)
            m += _toggle(adj, bits, deg, a, c)
        if record:
            trace[done] = code
        done += 1
    return done, code


@njit(cache=True, nogil=True)
def lazy_steps(adj, edges, state, steps, rnd, trace, code):
    """Advance the lazy switch chain: one uniform (edge pair, rewiring)
    candidate per step, applied when admissible, otherwise hold.

    Proposal probabilities are symmetric, so no correction is needed.
    Consumes exactly 3 uniforms per step.
    """
    n = adj.shape[0]
    done = 0
    pos = 0
    nr = rnd.shape[0]
    record = trace.shape[0] > 0
    while done < steps and pos + 3 <= nr:
        ok, i, j, a, b, c, d, pos = _propose(adj, edges, rnd, pos)
        if ok:
            adj[a, c] = 0
            adj[c, a] = 0
            adj[b, d] = 0
            adj[d, b] = 0
            adj[a, d] = 1
            adj[d, a] = 1
            adj[b, c] = 1
            adj[c, b] = 1
            edges[i, 0] = a
            edges[i, 1] = d
            edges[j, 0] = b
            edges[j, 1] = c
            state[2] += 1
            if record:
                code ^= np.int64(1) << _pair_bit(a, c, n)
                code ^= np.int64(1) << _pair_bit(b, d, n)
                code ^= np.int64(1) << _pair_bit(a, d, n)
                code ^= np.int64(1) << _pair_bit(b, c, n)
        if record:
            trace[done] = code
        done += 1
    return done, code


def pack_bits(adj):
    """``uint64`` bitset rows of a boolean adjacency matrix (little-endian bits)."""
    n = adj.shape[0]
    words = (n + 63) // 64
    padded = np.zeros((n, words * 64), dtype=bool)
    padded[:, :n] = adj
    packed = np.packbits(padded.reshape(n, words * 8, 8), axis=-1, bitorder="little")
    return np.ascontiguousarray(packed.reshape(n, words * 8)).view(np.uint64).copy()
