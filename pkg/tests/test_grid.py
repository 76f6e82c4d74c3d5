"""Dyadic geometry: ancestry, intersections, pointwise Haar functions."""

import numpy as np
import pytest

from dyadic_lab.core.grid import (
    ancestor,
    block_reduce,
    contains,
    cube_of_point,
    haar_eval,
    haar_product,
    merge_children,
    sign_matrix,
    split_children,
    upsample,
)
from dyadic_lab.core.types import CubeId, DomainError, GridSpec, HaarSignature, all_signatures, cancellative_signatures


def test_ancestor_examples():
    assert ancestor(CubeId(2, (0,)), 1) == CubeId(1, (0,))
    assert ancestor(CubeId(2, (2,)), 2) == CubeId(0, (0,))
    q = CubeId(3, (5, 2))
    assert ancestor(q, 0) == q


def test_ancestor_beyond_top_cube():
    with pytest.raises(DomainError, match="no such ancestor"):
        ancestor(CubeId(1, (1,)), 2)


def test_intersect_measure():
    from dyadic_lab.core.grid import intersect_measure

    left, right, top = CubeId(1, (0,)), CubeId(1, (1,)), CubeId(0, (0,))
    assert intersect_measure(left, right) == 0.0
    assert intersect_measure(left, top) == 0.5
    assert intersect_measure(top, left) == 0.5
    assert intersect_measure(left, left) == 0.5


def test_contains_is_dyadic_nesting():
    assert contains(CubeId(1, (1, 0)), CubeId(3, (6, 1)))
    assert not contains(CubeId(1, (1, 0)), CubeId(3, (1, 6)))
    assert not contains(CubeId(3, (6, 1)), CubeId(1, (1, 0)))


def test_haar_eval_unit_interval():
    top = CubeId.top(1)
    oscillating = HaarSignature((0,))
    assert haar_eval(top, oscillating, 0.1) == 1.0
    assert haar_eval(top, oscillating, 0.6) == -1.0
    assert haar_eval(top, HaarSignature((1,)), 0.6) == 1.0


def test_haar_eval_zero_outside_cube_and_scaled_inside():
    q = CubeId(2, (1, 3))
    sig = HaarSignature((0, 1))
    assert haar_eval(q, sig, (0.1, 0.1)) == 0.0
    assert abs(haar_eval(q, sig, (0.3, 0.8))) == pytest.approx(q.measure**-0.5)


def test_haar_eval_rejects_points_outside_unit_cube():
    with pytest.raises(DomainError):
        haar_eval(CubeId.top(1), HaarSignature((0,)), 1.0)
    with pytest.raises(DomainError):
        cube_of_point((-0.1,), 2)


def test_haar_product_rule_pointwise():
    q = CubeId(1, (1, 0))
    for eps in all_signatures(2):
        for eta in all_signatures(2):
            exponent, combined = haar_product(eps, eta)
            for x in [(0.55, 0.1), (0.8, 0.3), (0.6, 0.45), (0.95, 0.05)]:
                lhs = haar_eval(q, eps, x) * haar_eval(q, eta, x)
                rhs = q.measure**exponent * haar_eval(q, combined, x)
                assert lhs == pytest.approx(rhs, abs=1e-12)


def test_combined_signature_of_equal_pair_is_non_cancellative():
    for eps in cancellative_signatures(2):
        assert not eps.combine(eps).cancellative


def test_cancellative_signature_count():
    for n in (1, 2, 3):
        assert len(cancellative_signatures(n)) == 2**n - 1


def test_sign_matrix_columns_have_zero_sum_and_are_orthogonal():
    for n in (1, 2):
        signs = sign_matrix(n)
        np.testing.assert_allclose(signs.sum(axis=0), 0.0)
        np.testing.assert_allclose(signs.T @ signs, 2**n * np.eye(2**n - 1))


def test_split_and_merge_children_are_inverse(rng):
    grid = rng.normal(size=(8, 8))
    np.testing.assert_array_equal(merge_children(split_children(grid, 2), 2), grid)
    assert split_children(grid, 2).shape == (4, 4, 4)


def test_upsample_then_block_mean_is_identity(rng):
    coarse = rng.normal(size=(2, 2))
    fine = upsample(coarse, 2, 2)
    assert fine.shape == (8, 8)
    np.testing.assert_allclose(block_reduce(fine, 2, 2, np.mean), coarse)


def test_grid_spec_counts():
    spec = GridSpec(2, 3)
    assert spec.cells == 64
    assert spec.cell_volume == 2.0**-6
    with pytest.raises(DomainError):
        GridSpec(0, 3)
