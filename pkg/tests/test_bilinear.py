"""Bilinear commutators and the Lambda/Delta/Xi/Theta decomposition."""

import numpy as np
import pytest

from dyadic_lab.core.fracops import c_alpha
from dyadic_lab.core.multiscale import haar_function
from dyadic_lab.core.paraproducts import (
    bilinear_paraproduct,
    commutator_bilinear,
    decompose_bilinear,
    delta_2,
    domination_gap,
    dual_test_function,
    lambda_1,
    lambda_2,
    lambda_31_cross,
    lambda_31_equal,
    lambda_32,
    lambda_33,
)
from dyadic_lab.core.types import BilinearParaproduct, CellFunction, CubeId, DomainError, GridSpec, HaarSignature
from tests.oracles import dense_bilinear_commutator, dense_bilinear_paraproduct, recover_coefficients


def _h0(spec: GridSpec) -> CellFunction:
    return haar_function(spec, CubeId.top(spec.n), HaarSignature((0,) * spec.n))


@pytest.mark.parametrize("spec,alpha", [(GridSpec(1, 4), 0.5), (GridSpec(1, 3), 1.5), (GridSpec(2, 2), 2.5)])
def test_commutator_matches_definition(spec, alpha, random_function):
    b, f1, f2 = (random_function(spec) for _ in range(3))
    np.testing.assert_allclose(
        commutator_bilinear(b, f1, f2, alpha).values,
        dense_bilinear_commutator(b, f1, f2, alpha).values,
        atol=1e-11,
    )


def test_haar_b_on_constants():
    spec = GridSpec(1, 4)
    ones = CellFunction.constant(spec, 1.0)
    h = _h0(spec)
    np.testing.assert_allclose(commutator_bilinear(h, ones, ones, 1.0).values, h.values, atol=1e-12)
    np.testing.assert_allclose(commutator_bilinear(h, h, ones, 1.0).values, -1.0, atol=1e-12)


def test_slot_symmetry(spec_2d, random_function):
    b, f1, f2 = (random_function(spec_2d) for _ in range(3))
    second = commutator_bilinear(b, f1, f2, 1.0, slot=2)
    np.testing.assert_allclose(second.values, commutator_bilinear(b, f2, f1, 1.0, slot=1).values, atol=1e-12)
    with pytest.raises(DomainError):
        commutator_bilinear(b, f1, f2, 1.0, slot=3)


def test_constant_b_gives_zero(spec_1d, random_function):
    b = CellFunction.constant(spec_1d, -4.0)
    assert commutator_bilinear(b, random_function(spec_1d), random_function(spec_1d), 0.5).max_abs() == 0.0


@pytest.mark.parametrize(
    "spec,alpha", [(GridSpec(1, 5), 0.5), (GridSpec(1, 5), 1.5), (GridSpec(2, 3), 0.75), (GridSpec(2, 3), 3.0)]
)
def test_bilinear_decomposition_residual(spec, alpha, rng):
    for _ in range(10):
        b, f1, f2 = (CellFunction(spec, rng.normal(size=spec.cells)) for _ in range(3))
        assert decompose_bilinear(b, f1, f2, alpha).residual() <= 1e-10


@pytest.mark.parametrize("spec", [GridSpec(1, 4), GridSpec(2, 2)])
def test_coefficients_recovered_by_least_squares(spec, rng):
    alpha = 0.5
    columns, targets = [], []
    for _ in range(6):
        b, f1, f2 = (CellFunction(spec, rng.normal(size=spec.cells)) for _ in range(3))
        columns.append(list(decompose_bilinear(b, f1, f2, alpha).terms))
        targets.append(dense_bilinear_commutator(b, f1, f2, alpha))
    c = c_alpha(alpha)
    np.testing.assert_allclose(recover_coefficients(columns, targets), (c, -c, -1.0, -1.0), atol=1e-8)


def test_lambda_is_the_sum_of_its_splittings(spec_2d, random_function):
    alpha = 1.0
    b, f1, f2 = (random_function(spec_2d) for _ in range(3))
    parts = [lambda_1, lambda_2, lambda_31_equal, lambda_31_cross, lambda_32, lambda_33]
    total = sum((part(b, f1, f2, alpha) for part in parts), CellFunction.zeros(spec_2d))
    np.testing.assert_allclose(
        bilinear_paraproduct(BilinearParaproduct.LAMBDA, b, f1, f2, alpha).values, total.values, atol=1e-12
    )
    delta = lambda_31_equal(b, f1, f2, alpha) + lambda_31_cross(b, f1, f2, alpha)
    delta = delta + delta_2(b, f1, f2, alpha) + lambda_32(b, f1, f2, alpha)
    np.testing.assert_allclose(bilinear_paraproduct("delta", b, f1, f2, alpha).values, delta.values, atol=1e-12)


def test_lambda_33_exchanges_the_inputs(spec_1d, random_function):
    b, f1, f2 = (random_function(spec_1d) for _ in range(3))
    swapped = lambda_33(b, f1, f2, 0.5)
    np.testing.assert_allclose(swapped.values, lambda_1(b, f2, f1, 0.5).values)
    assert (swapped - lambda_1(b, f1, f2, 0.5)).max_abs() > 1e-6


def test_lambda_31_cross_vanishes_in_one_dimension(spec_1d, random_function):
    b, f1, f2 = (random_function(spec_1d) for _ in range(3))
    assert lambda_31_cross(b, f1, f2, 0.5).max_abs() == 0.0


def test_xi_with_constant_second_input():
    spec = GridSpec(1, 3)
    h = _h0(spec)
    ones = CellFunction.constant(spec, 1.0)
    np.testing.assert_allclose(bilinear_paraproduct("xi", h, h, ones, 0.5).values, 1.0)
    assert bilinear_paraproduct("xi", h, h, h, 0.5).max_abs() == pytest.approx(0.0, abs=1e-12)


def test_theta_vanishes_without_fine_coefficients():
    spec = GridSpec(1, 3)
    h = _h0(spec)
    # only coefficient pairs strictly below a cube contribute, and h has none
    theta = bilinear_paraproduct(BilinearParaproduct.THETA, h, h, CellFunction.constant(spec, 1.0), 0.5)
    assert theta.max_abs() == 0.0


def test_paraproducts_ignore_constant_shift_of_b(spec_2d, random_function):
    b, f1, f2 = (random_function(spec_2d) for _ in range(3))
    for which in BilinearParaproduct:
        reference = bilinear_paraproduct(which, b, f1, f2, 1.0)
        moved = bilinear_paraproduct(which, b + 3.7, f1, f2, 1.0)
        np.testing.assert_allclose(moved.values, reference.values, atol=1e-12 * max(reference.max_abs(), 1.0))


def test_dual_test_function_pairs_with_lambda_1(spec_1d, random_function):
    b, g, f1, f2 = (random_function(spec_1d) for _ in range(4))
    lhs = lambda_1(b, f1, f2, 0.5).inner(g)
    rhs = b.inner(dual_test_function(g, f1, f2, 0.5))
    assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("spec,alpha", [(GridSpec(1, 6), 0.5), (GridSpec(2, 3), 1.5)])
def test_square_function_domination(spec, alpha, rng):
    for _ in range(10):
        g, f1, f2 = (CellFunction(spec, rng.normal(size=spec.cells)) for _ in range(3))
        assert domination_gap(g, f1, f2, alpha) <= 1e-12


@pytest.mark.parametrize("which", list(BilinearParaproduct))
@pytest.mark.parametrize(
    "spec,alpha", [(GridSpec(1, 3), 0.5), (GridSpec(1, 2), 1.5), (GridSpec(2, 2), 2.5), (GridSpec(2, 3), 0.75)]
)
def test_each_paraproduct_matches_its_triple_sum(which, spec, alpha, rng):
    b, f1, f2 = (CellFunction(spec, rng.normal(size=spec.cells)) for _ in range(3))
    fast = bilinear_paraproduct(which, b, f1, f2, alpha)
    dense = dense_bilinear_paraproduct(which, b, f1, f2, alpha)
    np.testing.assert_allclose(fast.values, dense.values, rtol=1e-10, atol=1e-11)
