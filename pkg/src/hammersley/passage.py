"""Passage times, increment fields, the alpha field, compass sums, reversal, and the
brute-force path-enumeration oracle."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional

import numpy as np

from . import _kernels as K
from .env import Environment, ParameterError, Params, make_environment

Mode = Literal["boundary", "bulk"]

ENUMERATION_LIMIT = 14


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PassageField:
    """Passage times G over [origin..(m,n)].

    ``G[x, y]`` is the passage time to ``origin + (x, y)``.  ``I`` and ``J`` are padded to
    the shape of ``G``: ``I[x, y] = G[x, y] - G[x-1, y]`` for x >= 1 and 0 in row 0;
    likewise ``J`` along the second axis.
    """

    G: np.ndarray
    mode: Mode = "boundary"
    origin: tuple[int, int] = (0, 0)

    @property
    def dims(self) -> tuple[int, int]:
        return self.origin[0] + self.G.shape[0] - 1, self.origin[1] + self.G.shape[1] - 1

    @property
    def I(self) -> np.ndarray:
        out = np.zeros_like(self.G)
        out[1:, :] = np.diff(self.G, axis=0)
        return out

    @property
    def J(self) -> np.ndarray:
        out = np.zeros_like(self.G)
        out[:, 1:] = np.diff(self.G, axis=1)
        return out

    @property
    def last(self) -> int:
        return int(self.G[-1, -1])


def compute_passage(env: Environment) -> PassageField:
    if env.kind != "boundary":
        raise ParameterError("compute_passage needs a boundary-model environment")
    return PassageField(_frozen(K.passage_full(env.weights)), "boundary", (0, 0))


def corner_values(env: Environment) -> tuple[int, int, int]:
    """(G[m,n], G[m,0], G[0,n]) by a rolling-row evaluation."""
    g, s, w = K.passage_corner(env.weights)
    return int(g), int(s), int(w)


def compute_bulk_passage(env: Environment, start=(1, 1)) -> PassageField:
    """Passage times from ``start`` using bulk weights only.

    Horizontal and vertical steps gain nothing, a site counts only when entered
    diagonally, and the starting site never counts.
    """
    m, n = env.dims
    a, b = int(start[0]), int(start[1])
    if not (1 <= a <= m and 1 <= b <= n):
        raise ParameterError(f"start {start} must lie in the bulk of a {m}x{n} lattice")
    return PassageField(_frozen(K.bulk_passage(env.weights, a, b)), "bulk", (a, b))


def increment_step(omega: int, J_west: int, I_south: int) -> tuple[int, int]:
    """One cell of the increment recursion: (I, J) from (w_ij, J_{i-1,j}, I_{i,j-1})."""
    top = max(omega, J_west, I_south)
    return top - J_west, top - I_south


ALPHA_RANDOM_TRIPLES = frozenset({(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 1), (1, 1, 0)})


def alpha_rule(omega: int, I_south: int, J_west: int, beta: int) -> int:
    """alpha_{i-1,j-1} from (w_ij, I_{i,j-1}, J_{i-1,j}) and an independent Ber(p) bit."""
    if I_south == 1 and J_west == 1:
        return 1
    if (omega, I_south, J_west) in ALPHA_RANDOM_TRIPLES:
        return beta
    return 0


def alpha_field(field: PassageField, env: Environment, stream: np.random.Generator,
                uniforms: Optional[np.ndarray] = None, p: Optional[float] = None) -> np.ndarray:
    """alpha as an (m, n) array with ``alpha[i, j]`` for 0 <= i < m, 0 <= j < n.

    ``p`` defaults to the environment's recorded bulk parameter.
    """
    if field.mode != "boundary":
        raise ParameterError("alpha field is defined for boundary-mode passage fields")
    m, n = env.dims
    beta = stream.random((m, n)) if uniforms is None else uniforms
    if p is None:
        if env.params is None:
            raise ParameterError("bulk parameter unknown: pass p explicitly")
        p = env.params.p
    return _frozen(K.alpha_field(field.G, env.weights, beta, p))


@dataclass(frozen=True)
class CompassIncrements:
    W: int
    N: int
    E: int
    S: int

    @property
    def total(self) -> int:
        return self.W + self.N


def compass(field: PassageField) -> CompassIncrements:
    if field.mode != "boundary":
        raise ParameterError("compass sums are defined for boundary-mode fields")
    G = field.G
    g = int(G[-1, -1])
    w0n, gm0 = int(G[0, -1]), int(G[-1, 0])
    return CompassIncrements(W=w0n, N=g - w0n, E=g - gm0, S=gm0)


def compass_from_corner(g: int, s: int, w: int) -> CompassIncrements:
    return CompassIncrements(W=w, N=g - w, E=g - s, S=s)


@dataclass(frozen=True, eq=False)
class ReversedField:
    """Reversed process seen from the far corner; arrays padded like PassageField.

    ``omega_star[i, j]`` is defined for i, j >= 1 (row/column 0 hold the reversed
    axis increments so the array is a valid boundary-model weight lattice).
    """

    G_star: np.ndarray
    I_star: np.ndarray
    J_star: np.ndarray
    omega_star: np.ndarray
    params: Optional[Params] = None

    def environment(self) -> Environment:
        w = self.omega_star.copy()
        w[1:, 0] = self.I_star[1:, 0]
        w[0, 1:] = self.J_star[0, 1:]
        w[0, 0] = 0
        return make_environment(w, "boundary", self.params)


def reverse(field: PassageField, env: Environment, alpha: np.ndarray) -> ReversedField:
    G = field.G
    g = G[-1, -1]
    Gs = (g - G[::-1, ::-1]).astype(np.int32)
    Is = np.zeros_like(Gs)
    Is[1:, :] = np.diff(Gs, axis=0)
    Js = np.zeros_like(Gs)
    Js[:, 1:] = np.diff(Gs, axis=1)
    ws = np.zeros(Gs.shape, np.uint8)
    ws[1:, 1:] = alpha[::-1, ::-1]
    return ReversedField(_frozen(Gs), _frozen(Is), _frozen(Js), _frozen(ws), env.params)


def reversed_recursion_violations(rev: ReversedField) -> int:
    """Interior cells where I*, J* fail the increment recursion driven by w*."""
    Is, Js, ws = rev.I_star.astype(np.int64), rev.J_star.astype(np.int64), rev.omega_star.astype(np.int64)
    top = np.maximum(np.maximum(ws[1:, 1:], Is[1:, :-1]), Js[:-1, 1:])
    bad_i = top - Js[:-1, 1:] != Is[1:, 1:]
    bad_j = top - Is[1:, :-1] != Js[1:, 1:]
    return int(np.count_nonzero(bad_i | bad_j))


def boundary_sum(env: Environment, w) -> int:
    a, b = int(w[0]), int(w[1])
    m, n = env.dims
    if (a != 0 and b != 0) or not (0 <= a <= m and 0 <= b <= n):
        raise ParameterError(f"{w} is not an axis site of the {m}x{n} lattice")
    return int(env.weights[1:a + 1, 0].sum()) + int(env.weights[0, 1:b + 1].sum())


FIRST_EXIT_READINGS = ("exit-step", "display", "no-extra-term")


def first_exit_value(env: Environment, reading: str = "exit-step") -> int:
    """G[m,n] rebuilt from the last axis site of a path and a bulk passage time.

    ``exit-step`` leaves axis site (k,0) by an up step into (k,1) or a diagonal step
    collecting w[k+1,1] (and symmetrically on the west axis), k >= 0.  ``display`` uses
    max_k S_k + G(k,1) over k >= 1 together with max_k W_k + w[1,k] + G(1,k).
    ``no-extra-term`` drops the w[1,k] term.  Bulk passage times exclude their start.
    """
    if reading not in FIRST_EXIT_READINGS:
        raise ParameterError(f"unknown reading {reading!r}")
    m, n = env.dims
    w = env.weights
    S = np.cumsum(w[:, 0], dtype=np.int64)
    W = np.cumsum(w[0, :], dtype=np.int64)

    def bulk(a: int, b: int) -> int:
        return int(K.bulk_corner(w, a, b))

    if reading == "exit-step":
        best = 0
        for k in range(m + 1):
            if k >= 1:
                best = max(best, S[k] + bulk(k, 1))
            if k < m:
                best = max(best, S[k] + w[k + 1, 1] + bulk(k + 1, 1))
        for k in range(n + 1):
            if k >= 1:
                best = max(best, W[k] + bulk(1, k))
            if k < n:
                best = max(best, W[k] + w[1, k + 1] + bulk(1, k + 1))
        return int(best)
    extra = 1 if reading == "display" else 0
    south = max(S[k] + bulk(k, 1) for k in range(1, m + 1))
    west = max(W[k] + extra * w[1, k] + bulk(1, k) for k in range(1, n + 1))
    return int(max(south, west))


# --- exhaustive oracle -------------------------------------------------------

STEPS = ((1, 0), (0, 1), (1, 1))


@lru_cache(maxsize=None)
def _all_paths(dx: int, dy: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Every up-right path with steps e1, e2, e1+e2 from (0,0) to (dx,dy), as step tuples."""
    if dx == 0 and dy == 0:
        return ((),)
    out = []
    for s in STEPS:
        if s[0] <= dx and s[1] <= dy:
            for tail in _all_paths(dx - s[0], dy - s[1]):
                out.append((s,) + tail)
    return tuple(out)


def _path_sites(start, steps) -> list[tuple[int, int]]:
    x, y = start
    sites = [(x, y)]
    for sx, sy in steps:
        x, y = x + sx, y + sy
        sites.append((x, y))
    return sites


def _collected(sites, steps, weights, mode: Mode) -> list[tuple[int, int]]:
    """Sites whose weight a path collects.

    Boundary mode: axis sites entered while the path is still on an axis, plus bulk
    sites entered diagonally.  Bulk mode: only sites entered diagonally.
    """
    got = []
    on_axis = mode == "boundary" and (sites[0][0] == 0 or sites[0][1] == 0)
    for (x, y), (sx, sy) in zip(sites[1:], steps):
        if x == 0 or y == 0:
            if on_axis:
                got.append((x, y))
            continue
        on_axis = False
        if sx == 1 and sy == 1:
            got.append((x, y))
    return got


def _check_size(dims, start):
    m, n = dims
    if (m - start[0]) + (n - start[1]) > ENUMERATION_LIMIT:
        raise ParameterError("instance too large for exhaustive enumeration")


def enumerate_lpp(env: Environment, mode: Mode = "boundary", start=None):
    """Exhaustive maximum over admissible paths; returns (G, list of maximal site lists)."""
    m, n = env.dims
    if start is None:
        start = (0, 0) if mode == "boundary" else (1, 1)
    start = (int(start[0]), int(start[1]))
    _check_size((m, n), start)
    w = env.weights
    best = -1
    winners: list[list[tuple[int, int]]] = []
    for steps in _all_paths(m - start[0], n - start[1]):
        sites = _path_sites(start, steps)
        val = sum(int(w[x, y]) for x, y in _collected(sites, steps, w, mode))
        if val > best:
            best, winners = val, [sites]
        elif val == best:
            winners.append(sites)
    return best, winners


@lru_cache(maxsize=None)
def _incidence(m: int, n: int, mode: Mode, start: tuple[int, int]) -> np.ndarray:
    """Path-by-site 0/1 matrix of collected sites for every admissible path."""
    rows = []
    for steps in _all_paths(m - start[0], n - start[1]):
        sites = _path_sites(start, steps)
        r = np.zeros((m + 1) * (n + 1), np.int64)
        for x, y in _collected(sites, steps, None, mode):
            r[x * (n + 1) + y] = 1
        rows.append(r)
    return np.array(rows)


def enumerate_lpp_batch(weights: np.ndarray, mode: Mode = "boundary", start=None) -> np.ndarray:
    """Oracle values for a stack of weight lattices of shape (k, m+1, n+1)."""
    k, m1, n1 = weights.shape
    if start is None:
        start = (0, 0) if mode == "boundary" else (1, 1)
    start = (int(start[0]), int(start[1]))
    _check_size((m1 - 1, n1 - 1), start)
    inc = _incidence(m1 - 1, n1 - 1, mode, start)
    vals = weights.reshape(k, -1).astype(np.int64) @ inc.T
    return vals.max(axis=1)
