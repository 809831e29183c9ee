import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rgboost import FnVec, SampleSpace, combine, inner, norm
from rgboost.errors import SpaceMismatchError


def test_inner_examples(two_points):
    f = FnVec(two_points, [2, 4])
    g = FnVec(two_points, [1, 3])
    assert inner(f, g) == pytest.approx(7.0)
    assert inner(FnVec(two_points, [1, 1]), FnVec(two_points, [1, -1])) == 0.0


def test_inner_single_coordinate():
    n = 7
    S = SampleSpace.uniform(n)
    e = np.zeros(n)
    e[0] = 1
    f = FnVec(S, e)
    assert inner(f, f) == pytest.approx(1 / n)


def test_norm_examples(two_points):
    assert norm(FnVec(two_points, [3, 4])) == pytest.approx(math.sqrt(12.5), abs=1e-12)
    assert norm(two_points.zeros()) == 0.0
    S = SampleSpace([[0.0]], output_dim=2)
    assert norm(FnVec(S, [[1, 1]])) == pytest.approx(math.sqrt(2))


def test_combine_examples(two_points):
    f = FnVec(two_points, [1, 2])
    g = FnVec(two_points, [3, -1])
    np.testing.assert_array_equal(combine(1, f, 0, g).values, f.values)
    np.testing.assert_array_equal(combine(1, f, -1, f).values, np.zeros((2, 1)))
    np.testing.assert_array_equal(combine(2, f, 1, g).values, [[5], [3]])
    np.testing.assert_array_equal((2 * f + g).values, [[5], [3]])


def test_space_binding_is_by_identity():
    a = SampleSpace.uniform(2)
    b = SampleSpace.uniform(2)
    with pytest.raises(SpaceMismatchError):
        inner(a.zeros(), b.zeros())
    with pytest.raises(SpaceMismatchError):
        combine(1, a.zeros(), 1, b.zeros())
    with pytest.raises(SpaceMismatchError):
        a.zeros() + b.zeros()


def test_weights_renormalized_with_warning():
    with pytest.warns(UserWarning):
        S = SampleSpace([[0.0], [1.0]], weights=[1.0, 3.0])
    np.testing.assert_allclose(S.weights, [0.25, 0.75])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        SampleSpace([[0.0], [1.0]], weights=[0.5, 0.5 + 1e-12])


@pytest.mark.parametrize("w", [[0.0, 1.0], [-1.0, 2.0], [np.nan, 1.0]])
def test_weights_must_be_positive(w):
    with pytest.raises(ValueError):
        SampleSpace([[0.0], [1.0]], weights=w)


def test_fnvec_is_immutable_and_finite(two_points):
    f = FnVec(two_points, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0, 0] = 5.0
    with pytest.raises(AttributeError):
        f.values = None
    with pytest.raises(ValueError):
        FnVec(two_points, [np.inf, 0.0])
    with pytest.raises(ValueError):
        FnVec(two_points, [1.0, 2.0, 3.0])


def test_uniform_weights_match_empirical_average(rng):
    n, k = 9, 3
    S = SampleSpace(rng.normal(size=(n, 2)), output_dim=k)
    F, G = rng.normal(size=(n, k)), rng.normal(size=(n, k))
    expected = sum(float(F[i] @ G[i]) for i in range(n)) / n
    assert inner(FnVec(S, F), FnVec(S, G)) == pytest.approx(expected, rel=1e-14)


vals = arrays(np.float64, (5, 2), elements=st.floats(-1e3, 1e3, allow_nan=False))
wts = arrays(np.float64, (5,), elements=st.floats(0.01, 1.0))


@settings(max_examples=100, deadline=None)
@given(vals, vals, wts)
def test_cauchy_schwarz(a, b, w):
    S = SampleSpace(np.arange(5.0), weights=w / w.sum(), output_dim=2)
    f, g = FnVec(S, a), FnVec(S, b)
    assert abs(inner(f, g)) <= norm(f) * norm(g) * (1 + 1e-12) + 1e-10


@settings(max_examples=100, deadline=None)
@given(vals, vals, wts)
def test_parallelogram_law(a, b, w):
    S = SampleSpace(np.arange(5.0), weights=w / w.sum(), output_dim=2)
    f, g = FnVec(S, a), FnVec(S, b)
    lhs = norm(f + g) ** 2 + norm(f - g) ** 2
    rhs = 2 * norm(f) ** 2 + 2 * norm(g) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(vals, st.floats(-100, 100, allow_nan=False))
def test_norm_scaling(a, c):
    S = SampleSpace(np.arange(5.0), output_dim=2)
    f = FnVec(S, a)
    assert norm(combine(c, f, 0, f)) == pytest.approx(abs(c) * norm(f), rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(vals, vals)
def test_inner_symmetric_and_nonnegative(a, b):
    S = SampleSpace(np.arange(5.0), output_dim=2)
    f, g = FnVec(S, a), FnVec(S, b)
    assert inner(f, g) == pytest.approx(inner(g, f), rel=1e-14, abs=1e-14)
    assert inner(f, f) >= 0
