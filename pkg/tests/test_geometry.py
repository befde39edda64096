import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hammersley.env import Params, ParameterError, make_environment, realize, sample_environment, sample_uniform_field, substream
from hammersley.geometry import (
    INFINITY,
    LatticePath,
    cluster_boundary,
    competition_interface,
    curve_order_violations,
    downmost_maximal_path,
    exit_point,
    first_step_table,
    interface_projections,
    level_crossings,
    path_stats,
    path_weight,
    side_of_curve,
    upper_cluster,
    upper_cluster_enumerated,
)
from hammersley.passage import alpha_field, compute_passage, enumerate_lpp, reverse

GRID = (0.25, 0.5, 0.75)
small = st.tuples(st.integers(1, 4), st.integers(1, 4), st.sampled_from(GRID), st.sampled_from(GRID), st.integers(0, 2**32))


def env_field(seed, m, n, p=0.5, u=0.5):
    env = sample_environment(Params(p, u), (m, n), substream(seed))
    return env, compute_passage(env)


def lowest(sites, m):
    lo = np.full(m + 1, 10**9)
    for x, y in sites:
        lo[x] = min(lo[x], y)
    return lo


# --- down-most path ---------------------------------------------------------

def test_south_only_environment():
    m, n = 5, 4
    w = np.zeros((m + 1, n + 1), int)
    w[1:, 0] = 1
    env = make_environment(w)
    path = downmost_maximal_path(compute_passage(env), env)
    assert exit_point(path) == (m, 0)
    assert path.as_tuples()[: m + 1] == [(i, 0) for i in range(m + 1)]


@settings(max_examples=150, deadline=None)
@given(small)
def test_downmost_path_against_enumeration(case):
    m, n, p, u, seed = case
    env, f = env_field(seed, m, n, p, u)
    path = downmost_maximal_path(f, env)
    assert path.is_admissible()
    assert path.as_tuples()[0] == (0, 0) and path.as_tuples()[-1] == (m, n)
    g, paths = enumerate_lpp(env)
    assert path_weight(path, env) == g == f.last
    assert path.as_tuples() in paths
    # no maximal path visits a site strictly below the chosen one in any column
    lo = lowest(path.as_tuples(), m)
    for q in paths:
        assert np.all(lowest(q, m) >= lo)
    # down-most and right-most coincide: no maximal path strays further right on any row
    right = np.full(n + 1, -1)
    for x, y in path.as_tuples():
        right[y] = max(right[y], x)
    for q in paths:
        for x, y in q:
            assert x <= right[y]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2**32))
def test_path_weight_equals_passage_time(m, n, seed):
    env, f = env_field(seed, m, n)
    path = downmost_maximal_path(f, env)
    assert path_weight(path, env) == f.last
    x1, x2 = exit_point(path)
    assert x1 == 0 or x2 == 0


def test_exit_point_examples():
    assert exit_point(LatticePath(np.array([[0, 0], [1, 1], [2, 2]]))) == (0, 0)
    assert exit_point(LatticePath(np.array([[0, 0], [1, 0], [2, 0], [3, 1], [3, 2]]))) == (2, 0)
    assert exit_point(LatticePath(np.array([[0, 0], [0, 1], [1, 2]]))) == (0, 1)


def test_level_crossings_examples():
    path = LatticePath(np.array([[0, 0], [1, 1], [2, 2], [2, 3], [3, 3], [4, 4]]))
    assert level_crossings(path, 3) == (2, 3)
    assert level_crossings(path, 2, "vertical") == (2, 3)
    diag = LatticePath(np.array([[k, k] for k in range(6)]))
    for j in range(6):
        assert level_crossings(diag, j) == (j, j)
    with pytest.raises(ParameterError):
        level_crossings(diag, 7)
    with pytest.raises(ParameterError):
        level_crossings(diag, 1, "diagonal")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(1, 25), st.integers(0, 2**32))
def test_path_stats_ordering(m, n, seed):
    env, f = env_field(seed, m, n)
    ps = path_stats(downmost_maximal_path(f, env))
    assert np.all(ps.v0 <= ps.v1) and np.all(ps.w0 <= ps.w1)
    assert ps.xi_e1 == 0 or ps.xi_e2 == 0
    assert ps.v1[0] == ps.xi_e1


# --- interface and cluster --------------------------------------------------

def _field_from(w):
    env = make_environment(w)
    return env, compute_passage(env)


def test_interface_first_step_up_when_north_smaller():
    env, f = _field_from([[0, 0, 0], [1, 0, 0], [0, 0, 0]])
    assert f.G[0, 1] < f.G[1, 0]
    assert tuple(competition_interface(f).sites[1]) == (0, 1)


def test_interface_first_step_diagonal_on_raised_tie():
    env, f = _field_from([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    assert f.G[0, 1] == f.G[1, 0] > f.G[0, 0]
    assert tuple(competition_interface(f).sites[1]) == (1, 1)


@pytest.mark.parametrize("triple,step", [((0, 1, 0), (0, 1)), ((1, 0, 1), (1, 0)), ((0, 0, 1), (1, 0)), ((1, 1, 1), (1, 1))])
def test_first_step_table(triple, step):
    assert first_step_table(*triple) == step


@settings(max_examples=150, deadline=None)
@given(small)
def test_cluster_against_enumeration(case):
    m, n, p, u, seed = case
    env, f = env_field(seed, m, n, p, u)
    enum = upper_cluster_enumerated(env)
    assert np.array_equal(upper_cluster(f, env), enum)
    curve = cluster_boundary(f, env)
    assert curve.is_admissible()
    assert np.array_equal(curve.sites, cluster_boundary(f, env, "enumerate").sites)
    side = side_of_curve(curve, (m, n))
    assert np.all(enum[side == 1])
    assert not np.any(enum[side == -1])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 25), st.integers(1, 25), st.sampled_from(GRID), st.sampled_from(GRID), st.integers(0, 2**32))
def test_interface_above_cluster_boundary(m, n, p, u, seed):
    env, f = env_field(seed, m, n, p, u)
    phi = competition_interface(f)
    assert phi.is_admissible()
    assert curve_order_violations(phi, cluster_boundary(f, env)) == 0


def test_curve_order_detects_crossing():
    low = LatticePath(np.array([[0, 0], [1, 0], [2, 0], [2, 1], [2, 2]]))
    high = LatticePath(np.array([[0, 0], [0, 1], [0, 2], [1, 2], [2, 2]]))
    assert curve_order_violations(high, low) == 0
    assert curve_order_violations(low, high) > 0


def test_projection_north_exit():
    phi = LatticePath(np.array([[0, 0], [0, 1], [1, 2], [1, 3]]), "interface")
    pr = interface_projections(phi, (4, 3))
    assert pr.v_of_n == 1 and pr.w_of_m == INFINITY


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.sampled_from(GRID), st.sampled_from(GRID), st.integers(0, 2**32))
def test_projection_dichotomy_and_reversed_exit(m, n, p, u, seed):
    env, f = env_field(seed, m, n, p, u)
    pr = interface_projections(competition_interface(f), (m, n))
    v, w = pr.v_of_n, pr.w_of_m
    # the interface ends on the north or east edge; both only at the corner
    assert v < INFINITY or w < INFINITY
    if v >= m and w >= n:
        assert v == m and w == n
    if v < m:
        al = alpha_field(f, env, substream(seed, 1))
        rev = reverse(f, env, al).environment()
        xr = exit_point(downmost_maximal_path(compute_passage(rev), rev))[0]
        assert m - v <= xr


# --- coupled monotonicity ---------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(st.integers(1, 25), st.integers(1, 25), st.sampled_from(GRID), st.floats(0.05, 0.95), st.floats(0.05, 0.95),
       st.integers(0, 2**32))
def test_exit_monotone_under_common_uniforms(m, n, p, r1, r2, seed):
    r1, r2 = sorted((r1, r2))
    field = sample_uniform_field((m, n), substream(seed))
    ea, eb = realize(field, Params(p, r1)), realize(field, Params(p, r2))
    xa = exit_point(downmost_maximal_path(compute_passage(ea), ea))
    xb = exit_point(downmost_maximal_path(compute_passage(eb), eb))
    assert xa[0] <= xb[0] and xa[1] >= xb[1]
    fa, fb = compute_passage(ea), compute_passage(eb)
    assert np.all(fa.I[1:] <= fb.I[1:]) and np.all(fa.J[:, 1:] >= fb.J[:, 1:])
