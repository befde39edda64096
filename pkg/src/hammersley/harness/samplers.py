"""Per-sample Monte Carlo kernels.

Every function takes a picklable payload plus an index range [start, stop) and returns a
dict of equally long arrays.  Sample k draws only from ``substream(seed, *key, k)``, so the
output for a given k does not depend on how the range was split across workers.
"""
from __future__ import annotations

import numpy as np

from .. import _kernels as K
from ..env import substream, west_parameter
from ..geometry import (
    INFINITY,
    LatticePath,
    curve_order_violations,
    interface_projections,
)


def _boundary_weights(eta: np.ndarray, p: float, u: float, wp: float) -> np.ndarray:
    w = (eta < p).astype(np.uint8)
    w[1:, 0] = eta[1:, 0] < u
    w[0, 1:] = eta[0, 1:] < wp
    w[0, 0] = 0
    return w


def _bulk_weights(eta: np.ndarray, p: float) -> np.ndarray:
    w = (eta < p).astype(np.uint8)
    w[0, :] = 0
    w[:, 0] = 0
    return w


def corner(payload, start, stop):
    """G[m,n], S and W for the boundary model."""
    p, u, m, n, seed, key = payload
    wp = west_parameter(p, u)
    k = stop - start
    g = np.empty(k, np.int64)
    s = np.empty(k, np.int64)
    w = np.empty(k, np.int64)
    for t, idx in enumerate(range(start, stop)):
        eta = substream(seed, *key, idx).random((m + 1, n + 1))
        g[t], s[t], w[t] = K.threshold_corner(eta, p, u, wp)
    return {"G": g, "S": s, "W": w}


def identity(payload, start, stop):
    """Passage time, compass sums, exit points, the exit functionals, and coupled
    south-perturbed north increments for each epsilon in ``eps``."""
    p, u, m, n, seed, key, eps = payload
    wp = west_parameter(p, u)
    k = stop - start
    out = {name: np.empty(k, np.int64) for name in ("G", "S", "W", "xi1", "xi2", "a_fun", "b_fun")}
    pert = np.empty((k, len(eps)), np.int64)
    for t, idx in enumerate(range(start, stop)):
        rng = substream(seed, *key, idx)
        eta = rng.random((m + 1, n + 1))
        zeta = rng.random(m)
        w = _boundary_weights(eta, p, u, wp)
        G = K.passage_full(w)
        x1, x2 = K.downmost_exit(G, w)
        g, s, wv = int(G[m, n]), int(G[m, 0]), int(G[0, n])
        out["G"][t], out["S"][t], out["W"][t] = g, s, wv
        out["xi1"][t], out["xi2"][t] = x1, x2
        out["a_fun"][t] = x1 - int(w[1:x1 + 1, 0].sum())
        out["b_fun"][t] = int(w[0, 1:x2 + 1].sum())
        for e, ep in enumerate(eps):
            wq = w.copy()
            wq[1:, 0] |= (zeta < ep / (1.0 - u)).astype(np.uint8)
            gq, _, wq0 = K.passage_corner(wq)
            pert[t, e] = gq - wq0
    out["N_pert"] = pert
    return out


def exits(payload, start, stop):
    p, u, m, n, seed, key = payload
    wp = west_parameter(p, u)
    k = stop - start
    x1 = np.empty(k, np.int64)
    x2 = np.empty(k, np.int64)
    for t, idx in enumerate(range(start, stop)):
        eta = substream(seed, *key, idx).random((m + 1, n + 1))
        w = _boundary_weights(eta, p, u, wp)
        x1[t], x2[t] = K.downmost_exit(K.passage_full(w), w)
    return {"xi1": x1, "xi2": x2}


def path_levels(payload, start, stop):
    """Down-most path crossings of the horizontal line floor(tau n) and the vertical line
    floor(tau m), its level-0 exit, and the distance from the tau-point."""
    p, u, m, n, tau, seed, key = payload
    wp = west_parameter(p, u)
    lv, lh = int(np.floor(tau * n)), int(np.floor(tau * m))
    k = stop - start
    names = ("v0", "v1", "w0", "w1", "xi1", "xi2", "v1_level0", "dist")
    out = {name: np.empty(k, np.int64) for name in names}
    for t, idx in enumerate(range(start, stop)):
        eta = substream(seed, *key, idx).random((m + 1, n + 1))
        w = _boundary_weights(eta, p, u, wp)
        G = K.passage_full(w)
        s = K.downmost_path(G, w)
        row = s[s[:, 1] == lv, 0]
        col = s[s[:, 0] == lh, 1]
        out["v0"][t], out["v1"][t] = row.min(), row.max()
        out["w0"][t], out["w1"][t] = col.min(), col.max()
        out["v1_level0"][t] = s[s[:, 1] == 0, 0].max()
        x1, x2 = K.downmost_exit(G, w)
        out["xi1"][t], out["xi2"][t] = x1, x2
        d = np.maximum(np.abs(s[:, 0] - tau * m), np.abs(s[:, 1] - tau * n))
        out["dist"][t] = int(np.ceil(d.min()))
    return out


def bulk_corner(payload, start, stop):
    """Passage time over bulk weights only, with paths leaving the origin (so the site
    (1,1) counts when entered diagonally), plus the variant that starts at (1,1) and
    excludes it."""
    p, m, n, seed, key = payload
    k = stop - start
    g = np.empty(k, np.int64)
    g_excl = np.empty(k, np.int64)
    for t, idx in enumerate(range(start, stop)):
        eta = substream(seed, *key, idx).random((m + 1, n + 1))
        w = _bulk_weights(eta, p)
        g[t] = K.passage_corner(w)[0]
        g_excl[t] = K.bulk_corner(w, 1, 1)
    return {"G": g, "G_excl": g_excl}


def staircase(m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Down-right staircase from (0,n) to (m,0) alternating e1 and -e2 while possible.

    Returns (sites of the edge variables, kind) with kind 0 for an I variable at a site
    reached by e1 and 1 for a J variable at the upper end of a -e2 edge.
    """
    x, y = 0, n
    sites, kinds = [], []
    while x < m or y > 0:
        if x < m:
            x += 1
            sites.append((x, y))
            kinds.append(0)
        if y > 0:
            sites.append((x, y))
            kinds.append(1)
            y -= 1
    return np.array(sites, np.int64), np.array(kinds, np.int64)


def burke(payload, start, stop):
    """Edge increments along a staircase, alpha at chosen interior cells, north-edge
    increments, and forward/reversed exit points."""
    p, u, m, n, seed, key, cells = payload
    wp = west_parameter(p, u)
    sites, kinds = staircase(m, n)
    cells = np.asarray(cells, np.int64)
    k = stop - start
    L = np.empty((k, len(sites)), np.uint8)
    A = np.empty((k, len(cells)), np.uint8)
    north = np.empty((k, m), np.uint8)
    xi = np.empty(k, np.int64)
    xi_rev = np.empty(k, np.int64)
    for t, idx in enumerate(range(start, stop)):
        rng = substream(seed, *key, idx)
        eta = rng.random((m + 1, n + 1))
        beta = rng.random((m, n))
        w = _boundary_weights(eta, p, u, wp)
        G = K.passage_full(w)
        x, y = sites[:, 0], sites[:, 1]
        L[t] = np.where(kinds == 0, G[x, y] - G[np.maximum(x - 1, 0), y], G[x, y] - G[x, np.maximum(y - 1, 0)])
        al = K.alpha_field(G, w, beta, p)
        A[t] = al[cells[:, 0], cells[:, 1]]
        north[t] = np.diff(G[:, n])
        xi[t] = K.downmost_exit(G, w)[0]
        Gs = (G[m, n] - G[::-1, ::-1]).astype(np.int32)
        ws = np.zeros_like(w)
        ws[1:, 1:] = al[::-1, ::-1]
        ws[1:, 0] = np.diff(Gs[:, 0])
        ws[0, 1:] = np.diff(Gs[0, :])
        xi_rev[t] = K.downmost_exit(K.passage_full(ws), ws)[0]
    return {"L": L, "alpha": A, "north": north, "xi1": xi, "xi1_rev": xi_rev}


def _dominance(Ia, Ja, Ib, Jb) -> int:
    """Cells where I_a > I_b or J_a < J_b."""
    return int(np.count_nonzero((Ia[1:, :] > Ib[1:, :]))) + int(np.count_nonzero(Ja[:, 1:] < Jb[:, 1:]))


def _increments(G):
    return np.diff(G, axis=0, prepend=G[:1]), np.diff(G, axis=1, prepend=G[:, :1])


def coupling(payload, start, stop):
    """Violation counts of the exact per-sample invariants."""
    p, u, r1, r2, m, n, seed, key = payload
    checks = ("exit_monotone", "dominance_coupled", "dominance_west_zeroed", "comparison_ineq",
              "comparison_eq", "reversal_recursion", "reversal_field", "cocycle", "interface_order",
              "interface_vs_reversed_exit", "dichotomy_noncorner", "dichotomy_corner", "equal_params_exit")
    k = stop - start
    out = {c: np.zeros(k, np.int64) for c in checks}
    wp = west_parameter(p, u)
    for t, idx in enumerate(range(start, stop)):
        rng = substream(seed, *key, idx)
        eta = rng.random((m + 1, n + 1))
        beta = rng.random((m, n))
        # monotone coupling of exits and increments under common uniforms
        wa = _boundary_weights(eta, p, r1, west_parameter(p, r1))
        wb = _boundary_weights(eta, p, r2, west_parameter(p, r2))
        Ga, Gb = K.passage_full(wa), K.passage_full(wb)
        xa, xb = K.downmost_exit(Ga, wa), K.downmost_exit(Gb, wb)
        out["exit_monotone"][t] = int(not (xa[0] <= xb[0] and xa[1] >= xb[1]))
        Ia, Ja = _increments(Ga)
        Ib, Jb = _increments(Gb)
        out["dominance_coupled"][t] = _dominance(Ia, Ja, Ib, Jb)
        wc = _boundary_weights(eta, p, r1, west_parameter(p, r1))
        xc = K.downmost_exit(K.passage_full(wc), wc)
        out["equal_params_exit"][t] = int(xc != xa)

        w = _boundary_weights(eta, p, u, wp)
        G = K.passage_full(w)
        I, J = _increments(G)
        w0 = w.copy()
        w0[0, 1:] = 0
        G0 = K.passage_full(w0)
        I0, J0 = _increments(G0)
        out["dominance_west_zeroed"][t] = _dominance(I, J, I0, J0)

        # boundary comparison along the north line, split by the interface projection
        phi = K.competition_interface(G)
        on_top = phi[phi[:, 1] == n, 0]
        on_right = phi[phi[:, 0] == m, 1]
        v = int(on_top.min()) if on_top.size else INFINITY
        wv = int(on_right.min()) if on_right.size else INFINITY
        z = w.copy()
        z[1:, 0] = 0
        z[0, 1:] = 0
        s0 = w.copy()
        s0[1:, 0] = 0
        dz = np.diff(K.passage_full(z)[:, n])
        dw = np.diff(K.passage_full(w0)[:, n])
        ds = np.diff(K.passage_full(s0)[:, n])
        dg = np.diff(G[:, n])
        x = np.arange(1, m + 1)
        right = x - 1 > v
        left = x < v
        out["comparison_ineq"][t] = int(np.count_nonzero(right & (dz > dw))) + int(np.count_nonzero(left & (dz < ds)))
        out["comparison_eq"][t] = int(np.count_nonzero(right & (dw != dg))) + int(np.count_nonzero(left & (ds != dg)))

        # reversal
        al = K.alpha_field(G, w, beta, p)
        Gs = (G[m, n] - G[::-1, ::-1]).astype(np.int32)
        Is, Js = _increments(Gs)
        ws = np.zeros_like(w)
        ws[1:, 1:] = al[::-1, ::-1]
        top = np.maximum(np.maximum(ws[1:, 1:], Is[1:, :-1]), Js[:-1, 1:]).astype(np.int64)
        out["reversal_recursion"][t] = int(np.count_nonzero((top - Js[:-1, 1:] != Is[1:, 1:]) | (top - Is[1:, :-1] != Js[1:, 1:])))
        ws[1:, 0] = Is[1:, 0]
        ws[0, 1:] = Js[0, 1:]
        Gr = K.passage_full(ws)
        out["reversal_field"][t] = int(np.count_nonzero(Gr != Gs))

        # cocycle from independent edge sums
        W, S = int(w[0, 1:].sum()), int(w[1:, 0].sum())
        Nn, E = int(I[1:, n].sum()), int(J[m, 1:].sum())
        out["cocycle"][t] = int(W + Nn != S + E)

        member = K.upper_cluster(G, w)
        tilde = K.cluster_boundary(G, w, member)
        out["interface_order"][t] = curve_order_violations(LatticePath(phi, "interface"), LatticePath(tilde, "cluster-boundary"))
        if v < m:
            xr = K.downmost_exit(Gr, ws)[0]
            out["interface_vs_reversed_exit"][t] = int(m - v > xr)
        if v >= m and not wv < n:
            corner_case = v == m and wv == n
            out["dichotomy_corner" if corner_case else "dichotomy_noncorner"][t] = 1
    return out


def shape(payload, start, stop):
    """Boundary-model G at (m, n) and bulk-only G at each extent in ``bulk_dims``."""
    p, u, m, n, bulk_dims, seed, key = payload
    wp = west_parameter(p, u)
    k = stop - start
    g = np.empty(k, np.int64)
    gb = np.empty((k, len(bulk_dims)), np.int64)
    for t, idx in enumerate(range(start, stop)):
        rng = substream(seed, *key, idx)
        eta = rng.random((m + 1, n + 1))
        g[t] = K.threshold_corner(eta, p, u, wp)[0]
        for d, (mb, nb) in enumerate(bulk_dims):
            eb = rng.random((mb + 1, nb + 1))
            gb[t, d] = K.passage_corner(_bulk_weights(eb, p))[0]
    return {"G": g, "G_bulk": gb}
