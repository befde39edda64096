"""Maximal paths, exit points, level crossings, the competition interface and the
cluster boundary."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from . import _kernels as K
from .env import Environment, ParameterError, make_environment
from .passage import PassageField, enumerate_lpp

PathKind = Literal["maximal", "interface", "cluster-boundary"]
INFINITY = math.inf


@dataclass(frozen=True, eq=False)
class LatticePath:
    """Sites in forward order as a (k, 2) integer array."""

    sites: np.ndarray
    kind: PathKind = "maximal"

    def __len__(self) -> int:
        return len(self.sites)

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.sites, axis=0)

    def is_admissible(self) -> bool:
        st = self.steps
        ok = ((st[:, 0] == 1) & (st[:, 1] == 0)) | ((st[:, 0] == 0) & (st[:, 1] == 1)) | ((st[:, 0] == 1) & (st[:, 1] == 1))
        return bool(np.all(ok))

    def as_tuples(self) -> list[tuple[int, int]]:
        return [(int(x), int(y)) for x, y in self.sites]


def path_weight(path: LatticePath, env: Environment) -> int:
    """Weight a boundary-model path from the origin collects: axis sites while still on an
    axis, then bulk sites entered diagonally."""
    s = path.sites
    w = env.weights
    total = 0
    on_axis = True
    for k in range(1, len(s)):
        x, y = int(s[k, 0]), int(s[k, 1])
        if x == 0 or y == 0:
            if on_axis:
                total += int(w[x, y])
            continue
        on_axis = False
        if s[k, 0] - s[k - 1, 0] == 1 and s[k, 1] - s[k - 1, 1] == 1:
            total += int(w[x, y])
    return total


def downmost_maximal_path(field: PassageField, env: Environment) -> LatticePath:
    if field.mode != "boundary":
        raise ParameterError("down-most path needs a boundary-mode field")
    return LatticePath(K.downmost_path(field.G, env.weights), "maximal")


def exit_point(path: LatticePath) -> tuple[int, int]:
    """(xi_e1, xi_e2): coordinate of the last axis site on the path."""
    s = path.sites
    on = (s[:, 0] == 0) | (s[:, 1] == 0)
    x, y = s[np.flatnonzero(on)[-1]]
    return (int(x), 0) if y == 0 else (0, int(y))


def level_crossings(path: LatticePath, level: int, axis: Literal["horizontal", "vertical"] = "horizontal") -> tuple[int, int]:
    """Entry and exit coordinate of the path on a horizontal line y=level (v0, v1)
    or a vertical line x=level (w0, w1)."""
    s = path.sites
    if axis == "horizontal":
        along, across = s[:, 1], s[:, 0]
    elif axis == "vertical":
        along, across = s[:, 0], s[:, 1]
    else:
        raise ParameterError(f"axis must be horizontal or vertical, got {axis!r}")
    top = int(s[-1, 1] if axis == "horizontal" else s[-1, 0])
    if not (0 <= level <= top):
        raise ParameterError(f"level {level} outside [0, {top}]")
    hit = across[along == level]
    return int(hit.min()), int(hit.max())


@dataclass(frozen=True, eq=False)
class PathStats:
    xi_e1: int
    xi_e2: int
    v0: np.ndarray
    v1: np.ndarray
    w0: np.ndarray
    w1: np.ndarray


def path_stats(path: LatticePath) -> PathStats:
    s = path.sites
    m, n = int(s[-1, 0]), int(s[-1, 1])
    v0 = np.full(n + 1, m + 1, np.int64)
    v1 = np.full(n + 1, -1, np.int64)
    w0 = np.full(m + 1, n + 1, np.int64)
    w1 = np.full(m + 1, -1, np.int64)
    np.minimum.at(v0, s[:, 1], s[:, 0])
    np.maximum.at(v1, s[:, 1], s[:, 0])
    np.minimum.at(w0, s[:, 0], s[:, 1])
    np.maximum.at(w1, s[:, 0], s[:, 1])
    x1, x2 = exit_point(path)
    return PathStats(x1, x2, v0, v1, w0, w1)


def competition_interface(field: PassageField) -> LatticePath:
    """Follow the smaller neighbouring passage time from the origin until the path reaches
    the north or east edge.  Ties go up when both neighbours equal the current value and
    diagonally when both exceed it."""
    if field.mode != "boundary":
        raise ParameterError("competition interface needs a boundary-mode field")
    return LatticePath(K.competition_interface(field.G), "interface")


def upper_cluster(field: PassageField, env: Environment) -> np.ndarray:
    """Boolean lattice: site admits a maximal path whose first step is not e1.
    The origin is included by convention."""
    return K.upper_cluster(field.G, env.weights)


def upper_cluster_enumerated(env: Environment) -> np.ndarray:
    """Same membership as :func:`upper_cluster`, by listing every maximal path (small grids)."""
    m, n = env.dims
    out = np.zeros((m + 1, n + 1), bool)
    out[0, :] = True
    for x in range(1, m + 1):
        for y in range(1, n + 1):
            sub = make_environment(env.weights[: x + 1, : y + 1], "boundary")
            _, paths = enumerate_lpp(sub, "boundary")
            out[x, y] = any(p[1] != (1, 0) for p in paths)
    return out


def cluster_boundary(field: PassageField, env: Environment, membership: Literal["dp", "enumerate"] = "dp") -> LatticePath:
    """Curve separating sites reachable with a vertical/diagonal first step from the rest.

    From each site the first-step table on (w[a+1,b+1], I[a+1,b], J[a,b+1]) picks the next
    step; after every level change the curve runs right through the upper cluster.
    """
    if field.mode != "boundary":
        raise ParameterError("cluster boundary needs a boundary-mode field")
    member = upper_cluster(field, env) if membership == "dp" else upper_cluster_enumerated(env)
    return LatticePath(K.cluster_boundary(field.G, env.weights, member), "cluster-boundary")


def first_step_table(omega11: int, I10: int, J01: int) -> tuple[int, int]:
    if I10 == 0 and J01 == 1:
        return (1, 0)
    if (omega11, I10, J01) == (0, 1, 0):
        return (0, 1)
    return (1, 1)


def side_of_curve(curve: LatticePath, dims) -> np.ndarray:
    """+1 strictly above the curve, -1 strictly below, 0 on it (lattice sites only)."""
    m, n = int(dims[0]), int(dims[1])
    s = curve.sites
    lo = np.full(m + 1, n + 1, np.int64)
    hi = np.full(m + 1, -1, np.int64)
    np.minimum.at(lo, s[:, 0], s[:, 1])
    np.maximum.at(hi, s[:, 0], s[:, 1])
    out = np.zeros((m + 1, n + 1), np.int8)
    ys = np.arange(n + 1)
    for x in range(m + 1):
        if hi[x] < 0:
            out[x, :] = -1 if x > s[-1, 0] else 1
            continue
        out[x, ys > hi[x]] = 1
        out[x, ys < lo[x]] = -1
    return out


@dataclass(frozen=True)
class InterfaceProjection:
    v_of_n: Union[int, float]
    w_of_m: Union[int, float]


def interface_projections(interface: LatticePath, dims) -> InterfaceProjection:
    """Left-most point of the interface on y=n and lowest point on x=m (inf if missed)."""
    m, n = int(dims[0]), int(dims[1])
    s = interface.sites
    on_top = s[s[:, 1] == n, 0]
    on_right = s[s[:, 0] == m, 1]
    v = int(on_top.min()) if on_top.size else INFINITY
    w = int(on_right.min()) if on_right.size else INFINITY
    return InterfaceProjection(v, w)


def curve_order_violations(upper: LatticePath, lower: LatticePath) -> int:
    """Count lattice columns and rows where ``lower`` rises above ``upper``.

    Column x: the lowest and highest y of ``lower`` must not exceed those of ``upper``.
    Row y: the left-most and right-most x of ``upper`` must not exceed those of ``lower``.
    Only columns/rows visited by both curves are compared.
    """
    def envelopes(s, a, b, size):
        lo = np.full(size, np.iinfo(np.int64).max, np.int64)
        hi = np.full(size, -1, np.int64)
        np.minimum.at(lo, s[:, a], s[:, b])
        np.maximum.at(hi, s[:, a], s[:, b])
        return lo, hi

    su, sl = upper.sites, lower.sites
    mx = int(max(su[:, 0].max(), sl[:, 0].max())) + 1
    my = int(max(su[:, 1].max(), sl[:, 1].max())) + 1
    bad = 0
    ulo, uhi = envelopes(su, 0, 1, mx)
    llo, lhi = envelopes(sl, 0, 1, mx)
    both = (uhi >= 0) & (lhi >= 0)
    bad += int(np.count_nonzero(both & ((llo > ulo) | (lhi > uhi))))
    ulo, uhi = envelopes(su, 1, 0, my)
    llo, lhi = envelopes(sl, 1, 0, my)
    both = (uhi >= 0) & (lhi >= 0)
    bad += int(np.count_nonzero(both & ((ulo > llo) | (uhi > lhi))))
    return bad
