"""Compiled enumeration kernels.

The exhaustive pass walks every input pair (u, v) with v <= N (coprime or
not) and records the integer cost index j = C(u, v)/L in one histogram row
per denominator v.  Coprime-only rows follow by Moebius inversion, since a
non-coprime pair has the same digits as its reduced form.

A suffix table of total costs for all states with denominator <= B cuts the
per-pair iteration to a few division steps; states reached from above are
looked up instead of iterated.  int32 arithmetic throughout, so N is capped
well below 2**30.
"""

from __future__ import annotations

import numpy as np
from numba import njit

ALGO_CODE = {"G": 0, "K": 1, "O": 2}

# denominator bound of the suffix table; small enough to stay cache-resident
SUFFIX_B = 1024

N_KERNEL_MAX = 1 << 20


@njit(cache=True)
def _suffix_table(code, B, lut_p, lut_m):
    """Total cost index to termination for every state (a, b), b <= B.

    Triangular packing: index off[b] + (a - 1) for 1 <= a <= b.
    """
    off = np.zeros(B + 1, np.int64)
    for b in range(1, B + 1):
        off[b] = b * (b - 1) // 2
    suf = np.zeros(B * (B + 1) // 2, np.int32)
    for b in range(1, B + 1):
        ob = off[b]
        if code == 0:
            a_hi = b - 1
        elif code == 1:
            a_hi = b // 2
        else:
            a_hi = b
        for a in range(1, a_hi + 1):
            if code == 0:
                m = b // a
                s = b - m * a
                j = lut_p[m]
                r = s
            elif code == 1:
                m = (2 * b + a) // (2 * a)
                s = b - m * a
                if s >= 0:
                    j = lut_p[m]
                    r = s
                else:
                    j = lut_m[m]
                    r = -s
            else:
                m = 2 * (b // (2 * a)) + 1
                s = b - m * a
                if s >= 0:
                    j = lut_p[m]
                    r = s
                else:
                    j = lut_m[m]
                    r = -s
            if r != 0:
                j += suf[off[a] + (r - 1)]
            suf[ob + (a - 1)] = j
    return suf, off


@njit(cache=True)
def _enumerate_rows(code, N, B, lut_p, lut_m, suf, off, J):
    """Histogram rows M[v, j] = #pairs (u, v), all u, with cost index j.

    Column J is an overflow guard; the caller must check it stays empty.
    """
    M = np.zeros((N + 1, J + 1), np.int64)
    top = min(B, N)
    for v in range(1, top + 1):
        row = M[v]
        ov = off[v]
        if code == 0:
            u_hi = v - 1
        elif code == 1:
            u_hi = v // 2
        else:
            u_hi = v
        for u in range(1, u_hi + 1):
            j = suf[ov + (u - 1)]
            if j > J:
                j = J
            row[j] += 1
    for v in range(B + 1, N + 1):
        row = M[v]
        if code == 0:
            u_hi = v - 1
        elif code == 1:
            u_hi = v // 2
        else:
            u_hi = v
        for u in range(1, u_hi + 1):
            a = u
            b = v
            j = 0
            while True:
                if code == 0:
                    m = b // a
                    s = b - m * a
                    j += lut_p[m]
                    r = s
                elif code == 1:
                    m = (2 * b + a) // (2 * a)
                    s = b - m * a
                    if s >= 0:
                        j += lut_p[m]
                        r = s
                    else:
                        j += lut_m[m]
                        r = -s
                else:
                    m = 2 * (b // (2 * a)) + 1
                    s = b - m * a
                    if s >= 0:
                        j += lut_p[m]
                        r = s
                    else:
                        j += lut_m[m]
                        r = -s
                if r == 0:
                    break
                if a <= B:
                    j += suf[off[a] + (r - 1)]
                    break
                b = a
                a = r
            if j > J:
                j = J
            row[j] += 1
    return M


def mobius_sieve(n: int) -> np.ndarray:
    """Moebius function mu(1..n) as an int64 array (index 0 unused)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, n + 1):
        if is_prime[p]:
            is_prime[2 * p :: p] = False
            mu[p::p] *= -1
            sq = p * p
            if sq <= n:
                mu[sq::sq] = 0
    return mu


def enumerate_rows(code: int, N: int, lut_p: np.ndarray, lut_m: np.ndarray, J: int) -> np.ndarray:
    """All-pairs histogram rows for denominators 1..N (see _enumerate_rows)."""
    if N > N_KERNEL_MAX:
        raise ValueError(f"N = {N} exceeds the int32 kernel bound {N_KERNEL_MAX}")
    B = min(SUFFIX_B, max(N, 2))
    lp = np.ascontiguousarray(lut_p, dtype=np.int32)
    lm = np.ascontiguousarray(lut_m, dtype=np.int32)
    suf, off = _suffix_table(np.int32(code), np.int32(B), lp, lm)
    M = _enumerate_rows(np.int32(code), np.int32(N), np.int32(B), lp, lm, suf, off, np.int32(J))
    if M[:, J].any():
        raise OverflowError("cost index exceeded the histogram bound J; raise J")
    return M[:, :J]


def mobius_invert_rows(M: np.ndarray) -> np.ndarray:
    """Coprime-only rows from all-pairs rows: m[v] = sum_{d|v} mu(d) M[v/d]."""
    N = M.shape[0] - 1
    mu = mobius_sieve(N)
    out = np.zeros_like(M)
    for d in range(1, N + 1):
        f = mu[d]
        if f == 0:
            continue
        k = N // d
        out[d :: d] += f * M[1 : k + 1]
    return out
