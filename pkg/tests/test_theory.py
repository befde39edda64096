import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hammersley.env import ParameterError
from hammersley.theory import (
    characteristic_endpoint,
    characteristic_ratio,
    minimizer_u,
    shape_boundary,
    shape_pp,
    variance_identity_rhs,
    variance_identity_rhs_east,
)

ps = st.floats(0.02, 0.98)
coords = st.floats(0.0, 10.0)


def test_shape_pp_examples():
    assert shape_pp(0.5, 1, 3) == 1
    assert shape_pp(0.5, 1, 1) == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-12)
    assert shape_pp(0.5, 1, 1) == pytest.approx(0.828427, abs=1e-6)
    assert shape_pp(0.3, 0, 2.0) == 0
    assert shape_pp(0.5, 1, 0.3) == pytest.approx(0.3)


def test_shape_pp_rejects_bad_input():
    with pytest.raises(ParameterError):
        shape_pp(1.0, 1, 1)
    with pytest.raises(ParameterError):
        shape_pp(0.5, -1, 1)


@settings(max_examples=300)
@given(ps, coords, coords)
def test_shape_pp_symmetric_and_homogeneous(p, s, t):
    assert shape_pp(p, s, t) == pytest.approx(shape_pp(p, t, s), abs=1e-9)
    assert shape_pp(p, 3 * s, 3 * t) == pytest.approx(3 * shape_pp(p, s, t), abs=1e-9)
    assert shape_pp(p, s, t) <= min(s, t) + 1e-12


@settings(max_examples=200)
@given(ps, st.floats(0.1, 5.0))
def test_shape_pp_continuous_at_branch_lines(p, s):
    for t in (p * s, s / p):
        for d in (1e-10, -1e-10):
            assert shape_pp(p, s, t + d * s) == pytest.approx(shape_pp(p, s, t), abs=1e-9)
    mid = (2 * math.sqrt(p * s * (p * s)) - p * (p * s + s)) / (1 - p)
    assert mid == pytest.approx(p * s, abs=1e-9)


@settings(max_examples=200)
@given(ps, st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_shape_pp_concave_on_segments(p, s1, t1, s2, t2):
    for lam in (0.25, 0.5, 0.75):
        mid = shape_pp(p, lam * s1 + (1 - lam) * s2, lam * t1 + (1 - lam) * t2)
        assert mid >= lam * shape_pp(p, s1, t1) + (1 - lam) * shape_pp(p, s2, t2) - 1e-9


def test_shape_boundary_examples():
    assert shape_boundary(0.5, 0.5, 1, 1) == pytest.approx(5 / 6)
    assert shape_boundary(0.3, 0.4, 2.0, 0) == pytest.approx(0.8)
    assert shape_boundary(0.3, 1.0, 2.0, 5.0) == pytest.approx(2.0)


@settings(max_examples=300)
@given(ps, st.floats(0.01, 1.0), coords, coords)
def test_shape_boundary_dominates(p, u, s, t):
    assert shape_boundary(p, u, s, t) >= shape_pp(p, s, t) - 1e-12


def test_minimizer_examples():
    assert minimizer_u(0.25, 1.0) == pytest.approx(1 / 3)
    assert minimizer_u(0.5, 0.3) == 1.0
    assert minimizer_u(0.5, 0.5) == 1.0
    with pytest.raises(ParameterError):
        minimizer_u(0.5, 1.5)


@settings(max_examples=200)
@given(st.floats(0.02, 0.97), st.floats(0.0, 1.0))
def test_minimizer_attains_shape(p, frac):
    x = p + (1 - p) * frac
    if x <= p or x > 1:
        return
    u = minimizer_u(p, x)
    assert 0 < u <= 1
    assert shape_boundary(p, u, x, 1.0) == pytest.approx(shape_pp(p, x, 1.0), abs=1e-12)


def test_characteristic_endpoint_examples():
    assert characteristic_endpoint(0.5, 0.5, 100) == (100, 112)
    assert characteristic_endpoint(0.5, 0.5, 64) == (64, 72)
    assert characteristic_ratio(0.3, 1.0) == pytest.approx(1 / 0.3)
    for u in np.linspace(0.001, 0.999, 100):
        r = characteristic_ratio(0.3, u)
        assert 0.3 < r < 1 / 0.3


def test_characteristic_direction_balances_boundaries():
    # the boundary shape is stationary in u along the characteristic ratio
    for p, u in ((0.5, 0.5), (0.25, 0.6), (0.7, 0.2)):
        r = characteristic_ratio(p, u)
        h = 1e-6
        d = (shape_boundary(p, u + h, 1.0, r) - shape_boundary(p, u - h, 1.0, r)) / (2 * h)
        assert abs(d) < 1e-6


def test_variance_rhs_examples():
    assert variance_identity_rhs(0.4, 1.0, 10, 7, 3.3) == 0.0
    m = 36
    # 0.25 (0.5/0.5625 - 1) m evaluates to -m/36
    assert variance_identity_rhs(0.5, 0.5, m, m, 0.0) == pytest.approx(-m / 36)
    assert variance_identity_rhs(0.5, 0.5, m, m, 0.0) == pytest.approx(0.25 * (0.5 / 0.5625 - 1) * m)


@settings(max_examples=200)
@given(ps, st.floats(0.05, 0.95), st.integers(1, 100), st.integers(1, 100), st.floats(-50, 50))
def test_east_form_is_mirror(p, u, m, n, a):
    assert variance_identity_rhs_east(p, u, m, n, a) == pytest.approx(-variance_identity_rhs(p, u, m, n, a), abs=1e-9)
