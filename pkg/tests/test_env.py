import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from hammersley.env import (
    Params,
    ParameterError,
    PerturbationSpec,
    make_environment,
    perturb_south,
    perturb_west,
    realize,
    sample_environment,
    sample_uniform_field,
    substream,
    transpose,
    west_keep_probability,
    west_parameter,
)

probs = st.floats(0.01, 0.99)
dims = st.tuples(st.integers(1, 8), st.integers(1, 8))


def within_3sigma(x, q):
    x = np.asarray(x, dtype=float)
    return abs(x.mean() - q) <= 3 * np.sqrt(q * (1 - q) / x.size)


@pytest.mark.parametrize("p,u", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.2), (-0.1, 0.3)])
def test_invalid_params_rejected(p, u):
    with pytest.raises(ParameterError):
        Params(p, u)


def test_west_parameter_range_and_monotone():
    us = np.linspace(0.01, 1.0, 200)
    for p in (0.1, 0.5, 0.9):
        vals = np.array([west_parameter(p, u) for u in us])
        assert np.all((vals >= 0) & (vals < 1))
        assert np.all(np.diff(vals) < 0)
    assert west_parameter(0.5, 1.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(probs, probs, dims, st.integers(0, 2**32))
def test_sampled_environment_is_binary_with_empty_origin(p, u, d, seed):
    env = sample_environment(Params(p, u), d, substream(seed))
    assert env.weights[0, 0] == 0
    assert set(np.unique(env.weights)) <= {0, 1}
    assert env.dims == d


def test_u_one_fills_south_and_empties_west():
    env = sample_environment(Params(0.5, 1.0), (20, 20), substream(1))
    assert np.all(env.south == 1)
    assert np.all(env.west == 0)


def test_south_axis_frequency():
    rng = substream(2)
    x = [sample_environment(Params(0.5, 0.5), (1, 1), rng).weights[1, 0] for _ in range(100_000)]
    assert within_3sigma(x, 0.5)


def test_uniform_field_range_and_determinism():
    f = sample_uniform_field((1, 1), substream(3))
    assert f.values.shape == (2, 2)
    assert np.all((f.values >= 0) & (f.values < 1))
    g = sample_uniform_field((1, 1), substream(3))
    assert np.array_equal(f.values, g.values)


def test_uniform_field_ks_against_uniform():
    v = sample_uniform_field((99, 999), substream(4)).values.ravel()
    assert v.size == 100_000
    assert sps.kstest(v, "uniform").statistic < 0.01


def test_realize_high_field_is_empty():
    from hammersley.env import UniformField

    env = realize(UniformField(np.full((5, 6), 0.99)), Params(0.5, 0.5))
    assert not env.weights.any()


@settings(max_examples=50, deadline=None)
@given(probs, probs, probs, dims, st.integers(0, 2**32))
def test_realize_monotone_in_u(p, u1, u2, d, seed):
    u1, u2 = sorted((u1, u2))
    f = sample_uniform_field(d, substream(seed))
    a, b = realize(f, Params(p, u1)), realize(f, Params(p, u2))
    assert np.all(a.south <= b.south)
    assert np.all(a.west >= b.west)
    assert np.array_equal(a.bulk, b.bulk)


def test_make_environment_validates():
    with pytest.raises(ParameterError):
        make_environment([[0, 2], [1, 1]])
    with pytest.raises(ParameterError):
        make_environment([[1, 0], [0, 0]])
    bulk = make_environment([[0, 1, 1], [1, 1, 1], [1, 1, 1]], "bulk")
    assert bulk.south.sum() == 0 and bulk.west.sum() == 0 and bulk.bulk.sum() == 4


# --- perturbations -----------------------------------------------------------

def _env(p, u, d, seed):
    return sample_environment(Params(p, u), d, substream(seed))


@settings(max_examples=40, deadline=None)
@given(probs, st.floats(0.01, 0.8), st.floats(0.001, 0.15), dims, st.integers(0, 2**32))
def test_perturb_south_only_raises_south(p, u, eps, d, seed):
    env = _env(p, u, d, seed)
    out = perturb_south(env, PerturbationSpec(eps, "south"), substream(seed, 1))
    assert np.all(out.south >= env.south)
    assert np.array_equal(out.west, env.west)
    assert np.array_equal(out.bulk, env.bulk)


@settings(max_examples=40, deadline=None)
@given(probs, st.floats(0.01, 0.8), st.floats(0.001, 0.15), dims, st.integers(0, 2**32))
def test_perturb_west_only_lowers_west(p, u, eps, d, seed):
    env = _env(p, u, d, seed)
    out = perturb_west(env, PerturbationSpec(eps, "west"), substream(seed, 1))
    assert np.all(out.west <= env.west)
    assert np.array_equal(out.south, env.south)
    assert np.array_equal(out.bulk, env.bulk)


def test_perturb_identities():
    env = make_environment(np.array([[0, 1, 0], [1, 1, 0], [0, 0, 1]]), params=Params(0.5, 0.5))
    spec_s, spec_w = PerturbationSpec(0.1, "south"), PerturbationSpec(0.1, "west")
    none_flip = np.ones(2)  # uniforms above every flip probability
    assert np.array_equal(perturb_south(env, spec_s, None, none_flip).weights, env.weights)
    all_keep = np.zeros(2)
    assert np.array_equal(perturb_west(env, spec_w, None, all_keep).weights, env.weights)
    # a present south weight survives any draw, an absent west weight stays absent
    out = perturb_south(env, spec_s, substream(9))
    assert out.weights[1, 0] == 1
    out = perturb_west(env, spec_w, substream(9))
    assert out.weights[0, 2] == 0


def test_perturb_rejects_bad_specs():
    env = _env(0.5, 0.5, (4, 4), 0)
    with pytest.raises(ParameterError):
        PerturbationSpec(0.0, "south")
    with pytest.raises(ParameterError):
        PerturbationSpec(0.1, "north")
    with pytest.raises(ParameterError):
        perturb_south(env, PerturbationSpec(0.5, "south"), substream(0))
    with pytest.raises(ParameterError):
        perturb_south(env, PerturbationSpec(0.1, "west"), substream(0))
    with pytest.raises(ParameterError):
        perturb_west(make_environment(env.weights), PerturbationSpec(0.1, "west"), substream(0))


def test_perturb_south_frequency():
    env = _env(0.5, 0.5, (100_000, 1), 5)
    out = perturb_south(env, PerturbationSpec(0.1, "south"), substream(6))
    assert within_3sigma(out.south, 0.6)


def test_perturb_west_frequency_matches_shifted_parameter():
    target = west_parameter(0.5, 0.55)
    assert target == pytest.approx(0.5 * 0.45 / (0.55 + 0.225))
    assert target == pytest.approx(0.29032, abs=1e-5)
    env = _env(0.5, 0.5, (1, 100_000), 7)
    out = perturb_west(env, PerturbationSpec(0.05, "west"), substream(8))
    assert within_3sigma(out.west, target)


@settings(max_examples=200)
@given(probs, st.floats(0.01, 0.9), st.floats(0.0001, 0.09))
def test_west_keep_probability_maps_law(p, u, eps):
    keep = west_keep_probability(p, u, eps)
    assert keep == pytest.approx(west_parameter(p, u + eps) / west_parameter(p, u), rel=1e-9)


# --- transpose ---------------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(probs, probs, dims, st.integers(0, 2**32))
def test_transpose_involution_and_axes(p, u, d, seed):
    env = _env(p, u, d, seed)
    t = transpose(env)
    assert np.array_equal(transpose(t).weights, env.weights)
    assert np.array_equal(t.south, env.west)
    assert np.array_equal(t.west, env.south)


def test_transpose_marginals():
    env = _env(0.5, 0.5, (300, 300), 11)
    south, west = [], []
    rng = substream(12)
    for _ in range(350):
        t = transpose(sample_environment(Params(0.5, 0.5), (300, 300), rng))
        south.append(t.south)
        west.append(t.west)
    assert within_3sigma(np.concatenate(south), west_parameter(0.5, 0.5))
    assert within_3sigma(np.concatenate(west), 0.5)
    assert transpose(env).params == Params(0.5, west_parameter(0.5, 0.5))
