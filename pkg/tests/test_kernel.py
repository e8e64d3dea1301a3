import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kcmtest.exceptions import DataError
from kcmtest.kernel import (
    KernelSpec,
    build_kernel_matrix,
    cross_kernel,
    eval_kernel,
    gamma_grid,
    median_heuristic,
)


def test_identical_rows_give_all_ones():
    K = build_kernel_matrix(KernelSpec(3.7), np.array([[1.0, 2.0], [1.0, 2.0]]))
    np.testing.assert_array_equal(K.values, np.ones((2, 2)))


def test_two_point_closed_form():
    K = build_kernel_matrix(KernelSpec(1.0), np.array([[0.0], [1.0]]))
    np.testing.assert_allclose(K.values, [[1, math.exp(-1)], [math.exp(-1), 1]], rtol=1e-15)


def test_matches_double_loop(rng):
    X = rng.standard_normal((5, 4))
    K = build_kernel_matrix(KernelSpec(0.3), X).values
    for i in range(5):
        for j in range(5):
            d2 = sum((X[i, k] - X[j, k]) ** 2 for k in range(4))
            assert K[i, j] == pytest.approx(math.exp(-0.3 * d2), rel=1e-13)


def test_needs_two_rows():
    with pytest.raises(DataError):
        build_kernel_matrix(KernelSpec(1.0), np.zeros((1, 3)))


def test_spec_rejects_bad_gamma():
    for g in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            KernelSpec(g)


def test_cross_kernel_agrees_with_eval(rng):
    X, Z = rng.standard_normal((4, 2)), rng.standard_normal((3, 2))
    spec = KernelSpec(0.8)
    C = cross_kernel(spec, Z, X)
    assert C.shape == (3, 4)
    for i in range(3):
        for j in range(4):
            assert C[i, j] == pytest.approx(eval_kernel(spec, Z[i], X[j]), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 12), st.integers(1, 4)),
              elements=st.floats(-5, 5, allow_nan=False)),
       st.floats(1e-3, 10))
def test_matrix_invariants(X, gamma):
    K = build_kernel_matrix(KernelSpec(gamma), X).values
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
    assert np.all((K >= 0) & (K <= 1))
    assert np.linalg.eigvalsh(K).min() >= -1e-8 * len(K)


def test_monotone_in_distance_and_gamma():
    x = np.zeros(2)
    near, far = np.array([0.5, 0.0]), np.array([1.5, 0.0])
    spec = KernelSpec(0.7)
    assert eval_kernel(spec, x, near) > eval_kernel(spec, x, far)
    assert eval_kernel(KernelSpec(0.5), x, far) > eval_kernel(KernelSpec(2.0), x, far)


def test_median_heuristic_small_cases():
    assert median_heuristic(np.array([[0.0], [2.0]])) == 0.5
    assert median_heuristic(np.array([[0.0], [1.0], [3.0]])) == 0.5
    # distances {1,2,3,4,6,7}: the lower middle 3 wins over the average 3.5
    assert median_heuristic(np.array([[0.0], [1.0], [3.0], [7.0]])) == pytest.approx(1 / 3)


def test_median_heuristic_sort_oracle(rng):
    X = rng.standard_normal((20, 10))
    d = sorted(
        math.sqrt(sum((X[i, k] - X[j, k]) ** 2 for k in range(10)))
        for i in range(20) for j in range(i + 1, 20)
    )
    assert median_heuristic(X) == pytest.approx(1.0 / d[(len(d) - 1) // 2], rel=1e-12)


def test_median_heuristic_permutation_invariant(rng):
    X = rng.standard_normal((15, 3))
    assert median_heuristic(X) == median_heuristic(X[rng.permutation(15)])


def test_median_heuristic_degenerate():
    with pytest.raises(DataError):
        median_heuristic(np.ones((5, 2)))


def test_grid_shapes(rng):
    X = rng.standard_normal((30, 4))
    g = median_heuristic(X)
    assert [s.gamma for s in gamma_grid(X, 1)] == [g]
    np.testing.assert_allclose([s.gamma for s in gamma_grid(X, 3)], [g / 16, g, 16 * g], rtol=1e-12)
    grid = np.array([s.gamma for s in gamma_grid(X, 9)])
    assert np.all(np.diff(grid) > 0)
    ratios = grid[1:] / grid[:-1]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)
    assert g in grid
    assert grid[0] == pytest.approx(g / 16) and grid[-1] == pytest.approx(16 * g)


def test_even_grid_contains_median(rng):
    X = rng.standard_normal((30, 4))
    g = median_heuristic(X)
    for m in (2, 4, 8):
        grid = [s.gamma for s in gamma_grid(X, m)]
        assert len(grid) == m and g in grid
        assert grid[0] == pytest.approx(g / 16)
