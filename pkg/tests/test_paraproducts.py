"""Linear paraproducts, commutators and the four-term commutator identity."""

import numpy as np
import pytest

from dyadic_lab.core import fracops
from dyadic_lab.core.multiscale import analyze, haar_function, synthesize
from dyadic_lab.core.paraproducts import (
    LINEAR_SIGNS,
    b_shift,
    b_shift_series,
    commutator_linear,
    decompose_linear,
    gamma,
    pi,
    pi_star,
)
from dyadic_lab.core.types import CellFunction, CubeId, DomainError, GridSpec, HaarCoeffs, HaarSignature, ShiftMode
from tests.oracles import dense_commutator, dense_pi, dense_pi_star, recover_coefficients


@pytest.mark.parametrize("spec", [GridSpec(1, 4), GridSpec(2, 2)])
def test_pi_and_pi_star_match_definitions(spec, random_function):
    b, f = random_function(spec), random_function(spec)
    np.testing.assert_allclose(pi(b, f).values, dense_pi(b, f).values, atol=1e-12)
    np.testing.assert_allclose(pi_star(b, f).values, dense_pi_star(b, f).values, atol=1e-12)


def test_gamma_vanishes_in_one_dimension(spec_1d, random_function):
    assert gamma(random_function(spec_1d), random_function(spec_1d)).max_abs() == 0.0


def test_gamma_is_active_in_two_dimensions(spec_2d, random_function):
    assert gamma(random_function(spec_2d), random_function(spec_2d)).max_abs() > 1e-3


@pytest.mark.parametrize("spec", [GridSpec(1, 5), GridSpec(2, 3)])
def test_zero_shift_is_pi_star_plus_gamma(spec, random_function):
    b, f = random_function(spec), random_function(spec)
    np.testing.assert_allclose(b_shift(b, f, 0).values, (pi_star(b, f) + gamma(b, f)).values, atol=1e-12)


def test_zero_shift_is_the_pointwise_product_without_the_paraproducts(spec_1d, random_function):
    b, f = random_function(spec_1d), random_function(spec_1d)
    b0 = b - b.integral()
    # b0 f = Pi_b0 f + Pi_f b0 + B_0(b0, f) when <b0> = 0
    expected = b0 * f - pi(b0, f) - pi(f, b0)
    np.testing.assert_allclose(b_shift(b, f, 0).values, expected.values, atol=1e-12)


def test_shift_pairs_coefficient_with_ancestor():
    spec = GridSpec(1, 3)
    top, child = CubeId(0, (0,)), CubeId(1, (1,))
    sig = HaarSignature((0,))
    b = haar_function(spec, child, sig)
    g = haar_function(spec, top, sig)
    # B_1(b, g) = <b,h_child> <g,h_top> h_top h_child = h_top(child) h_child
    np.testing.assert_allclose(b_shift(b, g, 1).values, (-1.0 * b).values)
    assert b_shift(b, g, 2).max_abs() == 0.0
    np.testing.assert_allclose(b_shift(g, b, 1, ShiftMode.F_FIRST).values, b_shift(b, g, 1).values)


def test_shift_series_is_the_weighted_sum_of_shifts(spec_1d, random_function):
    alpha = 0.5
    b, g = random_function(spec_1d), random_function(spec_1d)
    total = sum((2.0 ** (-k * alpha) * b_shift(b, g, k) for k in range(1, spec_1d.L + 1)), CellFunction.zeros(spec_1d))
    coeffs = analyze(b)
    closing = HaarCoeffs(
        spec_1d,
        0.0,
        tuple(slab * 2.0 ** (-(level + 1) * alpha) * g.integral() for level, slab in enumerate(coeffs.levels)),
    )
    total = total + synthesize(closing)
    np.testing.assert_allclose(b_shift_series(b, g, alpha).values, total.values, atol=1e-12)


def test_negative_shift_rejected(spec_1d, random_function):
    with pytest.raises(DomainError):
        b_shift(random_function(spec_1d), random_function(spec_1d), -1)


@pytest.mark.parametrize("spec,alpha", [(GridSpec(1, 4), 0.5), (GridSpec(2, 2), 1.25)])
def test_commutator_matches_definition(spec, alpha, random_function):
    b, f = random_function(spec), random_function(spec)
    np.testing.assert_allclose(
        commutator_linear(b, f, alpha).values, dense_commutator(b, f, alpha).values, atol=1e-11
    )


def test_second_order_commutator_is_iterated(spec_1d, random_function):
    b, f = random_function(spec_1d), random_function(spec_1d)
    once = commutator_linear(b, f, 0.5, 1)
    iterated = b * once - commutator_linear(b, b * f, 0.5, 1)
    np.testing.assert_allclose(commutator_linear(b, f, 0.5, 2).values, iterated.values, atol=1e-10)


def test_commutator_with_constant_b_vanishes(spec_1d, random_function):
    b = CellFunction.constant(spec_1d, 2.5)
    assert commutator_linear(b, random_function(spec_1d), 0.5, 3).max_abs() == 0.0
    with pytest.raises(DomainError):
        commutator_linear(b, b, 0.5, 0)


@pytest.mark.parametrize("spec,alpha", [(GridSpec(1, 6), 0.25), (GridSpec(1, 6), 0.75), (GridSpec(2, 4), 0.5), (GridSpec(2, 3), 1.5)])
def test_linear_decomposition_residual(spec, alpha, rng):
    for _ in range(10):
        b = CellFunction(spec, rng.normal(size=spec.cells))
        f = CellFunction(spec, rng.normal(size=spec.cells))
        assert decompose_linear(b, f, alpha).residual() <= 1e-10


def test_linear_decomposition_of_plain_haar_pair():
    spec = GridSpec(1, 3)
    b = haar_function(spec, CubeId.top(1), HaarSignature((0,)))
    f = CellFunction.constant(spec, 1.0)
    decomposition = decompose_linear(b, f, 0.5)
    # [h, I] 1 = (1 + c) h - c h = h
    np.testing.assert_allclose(decomposition.commutator.values, b.values)
    assert decomposition.residual() <= 1e-12


@pytest.mark.parametrize("spec", [GridSpec(1, 4), GridSpec(2, 2)])
def test_sign_vector_recovered_by_least_squares(spec, rng):
    alpha = 0.5
    columns, targets = [], []
    for _ in range(6):
        b = CellFunction(spec, rng.normal(size=spec.cells))
        f = CellFunction(spec, rng.normal(size=spec.cells))
        columns.append(list(decompose_linear(b, f, alpha).terms))
        targets.append(dense_commutator(b, f, alpha))
    np.testing.assert_allclose(recover_coefficients(columns, targets), LINEAR_SIGNS, atol=1e-8)


def test_tampered_constant_breaks_the_identity(spec_1d, random_function, monkeypatch):
    b, f = random_function(spec_1d), random_function(spec_1d)
    monkeypatch.setattr(fracops, "c_alpha", lambda alpha: 1.0 / (2.0**alpha - 1.0) + 0.1)
    assert decompose_linear(b, f, 0.5).residual() > 1e-6
