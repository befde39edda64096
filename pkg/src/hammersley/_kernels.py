"""Compiled inner loops. Arrays are indexed [i, j] with i the horizontal coordinate."""
from __future__ import annotations

import numpy as np
from numba import njit

NEG = -(1 << 30)


@njit(cache=True)
def passage_full(w):
    m1, n1 = w.shape
    G = np.zeros((m1, n1), np.int32)
    for i in range(1, m1):
        G[i, 0] = G[i - 1, 0] + w[i, 0]
    for j in range(1, n1):
        G[0, j] = G[0, j - 1] + w[0, j]
    for i in range(1, m1):
        for j in range(1, n1):
            a = G[i, j - 1]
            b = G[i - 1, j]
            c = G[i - 1, j - 1] + w[i, j]
            if b > a:
                a = b
            if c > a:
                a = c
            G[i, j] = a
    return G


@njit(cache=True)
def passage_corner(w):
    """(G[m,n], G[m,0], G[0,n]) with O(n) memory."""
    m1, n1 = w.shape
    row = np.zeros(n1, np.int32)
    for j in range(1, n1):
        row[j] = row[j - 1] + w[0, j]
    g0n = row[n1 - 1]
    for i in range(1, m1):
        diag = row[0]
        row[0] = row[0] + w[i, 0]
        for j in range(1, n1):
            up = row[j]
            a = row[j - 1]
            c = diag + w[i, j]
            if up > a:
                a = up
            if c > a:
                a = c
            diag = up
            row[j] = a
    return row[n1 - 1], row[0], g0n


@njit(cache=True)
def threshold_corner(eta, p, u, west):
    """passage_corner on the environment realized from a uniform field, without materializing it."""
    m1, n1 = eta.shape
    row = np.zeros(n1, np.int32)
    for j in range(1, n1):
        row[j] = row[j - 1] + (1 if eta[0, j] < west else 0)
    g0n = row[n1 - 1]
    for i in range(1, m1):
        diag = row[0]
        row[0] = row[0] + (1 if eta[i, 0] < u else 0)
        for j in range(1, n1):
            up = row[j]
            a = row[j - 1]
            c = diag + (1 if eta[i, j] < p else 0)
            if up > a:
                a = up
            if c > a:
                a = c
            diag = up
            row[j] = a
    return row[n1 - 1], row[0], g0n


@njit(cache=True)
def bulk_passage(w, a, b):
    m1, n1 = w.shape
    H = np.zeros((m1 - a, n1 - b), np.int32)
    for x in range(1, m1 - a):
        for y in range(1, n1 - b):
            v = H[x, y - 1]
            t = H[x - 1, y]
            c = H[x - 1, y - 1] + w[a + x, b + y]
            if t > v:
                v = t
            if c > v:
                v = c
            H[x, y] = v
    return H


@njit(cache=True)
def bulk_corner(w, a, b):
    """Bulk passage value from (a,b) to the far corner with O(n) memory."""
    m1, n1 = w.shape
    k = n1 - b
    row = np.zeros(k, np.int32)
    for x in range(1, m1 - a):
        diag = row[0]
        for y in range(1, k):
            up = row[y]
            v = row[y - 1]
            c = diag + w[a + x, b + y]
            if up > v:
                v = up
            if c > v:
                v = c
            diag = up
            row[y] = v
    return row[k - 1]


@njit(cache=True)
def downmost_path(G, w):
    """Backward walk from the far corner, returned in forward order as a (k,2) array."""
    m = G.shape[0] - 1
    n = G.shape[1] - 1
    out = np.empty((m + n + 1, 2), np.int64)
    k = 0
    i = m
    j = n
    out[k, 0] = i
    out[k, 1] = j
    k += 1
    while i > 0 and j > 0:
        if G[i, j] == G[i, j - 1]:
            j -= 1
        elif w[i, j] == 1:
            i -= 1
            j -= 1
        else:
            i -= 1
        out[k, 0] = i
        out[k, 1] = j
        k += 1
    while i > 0:
        i -= 1
        out[k, 0] = i
        out[k, 1] = j
        k += 1
    while j > 0:
        j -= 1
        out[k, 0] = i
        out[k, 1] = j
        k += 1
    return out[:k][::-1].copy()


@njit(cache=True)
def downmost_exit(G, w):
    """(xi_e1, xi_e2) of the down-most maximal path without storing it."""
    i = G.shape[0] - 1
    j = G.shape[1] - 1
    while i > 0 and j > 0:
        if G[i, j] == G[i, j - 1]:
            j -= 1
        elif w[i, j] == 1:
            i -= 1
            j -= 1
        else:
            i -= 1
    return i, j


@njit(cache=True)
def competition_interface(G):
    m = G.shape[0] - 1
    n = G.shape[1] - 1
    out = np.empty((m + n + 1, 2), np.int64)
    a = 0
    b = 0
    out[0, 0] = 0
    out[0, 1] = 0
    k = 1
    while a < m and b < n:
        I = G[a + 1, b] - G[a, b]
        J = G[a, b + 1] - G[a, b]
        if I == 1 and J == 1:
            a += 1
            b += 1
        elif I == 0 and J == 1:
            a += 1
        else:
            b += 1
        out[k, 0] = a
        out[k, 1] = b
        k += 1
    return out[:k].copy()


@njit(cache=True)
def alpha_field(G, w, beta, p):
    """alpha[i-1, j-1] for 1 <= i <= m, 1 <= j <= n; ``beta`` holds fresh uniforms."""
    m = G.shape[0] - 1
    n = G.shape[1] - 1
    al = np.zeros((m, n), np.uint8)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            Iin = G[i, j - 1] - G[i - 1, j - 1]
            Jin = G[i - 1, j] - G[i - 1, j - 1]
            if Iin == 1 and Jin == 1:
                al[i - 1, j - 1] = 1
            elif Iin == 0 and Jin == 0 and w[i, j] == 0:
                al[i - 1, j - 1] = 0
            elif beta[i - 1, j - 1] < p:
                al[i - 1, j - 1] = 1
    return al


@njit(cache=True)
def upper_cluster(G, w):
    """Sites reachable by some maximal path whose first step is vertical or diagonal."""
    m1, n1 = G.shape
    A = np.empty((m1, n1), np.int32)
    A[0, 0] = 0
    for i in range(1, m1):
        A[i, 0] = NEG
    for j in range(1, n1):
        A[0, j] = G[0, j]
    for i in range(1, m1):
        for j in range(1, n1):
            a = A[i, j - 1]
            b = A[i - 1, j]
            c = A[i - 1, j - 1] + w[i, j]
            if b > a:
                a = b
            if c > a:
                a = c
            A[i, j] = a
    out = np.zeros((m1, n1), np.bool_)
    for i in range(m1):
        for j in range(n1):
            out[i, j] = A[i, j] == G[i, j]
    return out


@njit(cache=True)
def cluster_boundary(G, w, member):
    m = G.shape[0] - 1
    n = G.shape[1] - 1
    out = np.empty((m + n + 1, 2), np.int64)
    a = 0
    b = 0
    out[0, 0] = 0
    out[0, 1] = 0
    k = 1
    while True:
        while a < m and member[a + 1, b]:
            a += 1
            out[k, 0] = a
            out[k, 1] = b
            k += 1
        if a == m or b == n:
            break
        om = w[a + 1, b + 1]
        I = G[a + 1, b] - G[a, b]
        J = G[a, b + 1] - G[a, b]
        if I == 0 and J == 1:
            a += 1
        elif om == 0 and I == 1 and J == 0:
            b += 1
        else:
            a += 1
            b += 1
        out[k, 0] = a
        out[k, 1] = b
        k += 1
    return out[:k].copy()
