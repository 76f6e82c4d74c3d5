"""Haar transforms, cube averages and the sampled Haar functions."""

import numpy as np
import pytest

from dyadic_lab.core.grid import haar_eval
from dyadic_lab.core.multiscale import (
    analyze,
    average_pyramid,
    coarsen,
    cube_average,
    haar_function,
    indicator,
    restrict_levels,
    synthesize,
    to_resolution,
)
from dyadic_lab.core.types import (
    CellFunction,
    CubeId,
    DomainError,
    GridSpec,
    HaarCoeffs,
    HaarSignature,
    cancellative_signatures,
)
from tests.oracles import all_cubes, haar_basis


@pytest.mark.parametrize("spec", [GridSpec(1, 4), GridSpec(2, 3)])
def test_haar_basis_is_orthonormal(spec):
    functions = [CellFunction.constant(spec, 1.0)] + [h for _, _, h in haar_basis(spec)]
    assert len(functions) == spec.cells
    matrix = np.array([h.values for h in functions])
    np.testing.assert_allclose(matrix @ matrix.T * spec.cell_volume, np.eye(spec.cells), atol=1e-12)


def test_analyze_matches_inner_products(spec_2d, random_function):
    f = random_function(spec_2d)
    coeffs = analyze(f)
    for cube, signature, h in haar_basis(spec_2d):
        assert coeffs.get(cube, signature) == pytest.approx(f.inner(h), abs=1e-12)
    assert coeffs.mean == pytest.approx(f.integral())


def test_average_formula(spec_1d, random_function):
    f = random_function(spec_1d)
    coeffs = analyze(f)
    q = CubeId(4, (11,))
    centre = [(q.index[0] + 0.5) * q.side]
    expected = coeffs.mean
    for level in range(q.level):
        parent = CubeId(level, (q.index[0] >> (q.level - level),))
        expected += coeffs.get(parent, HaarSignature((0,))) * haar_eval(parent, HaarSignature((0,)), centre)
    assert cube_average(f, q) == pytest.approx(expected, abs=1e-12)


def test_cube_average_examples():
    spec = GridSpec(1, 2)
    f = CellFunction(spec, [1.0, 3.0, 5.0, 7.0])
    assert cube_average(f, CubeId(0, (0,))) == 4.0
    assert cube_average(f, CubeId(1, (1,))) == 6.0
    with pytest.raises(DomainError):
        cube_average(f, CubeId(3, (0,)))


def test_average_pyramid_levels(spec_2d, random_function):
    f = random_function(spec_2d)
    pyramid = average_pyramid(f)
    assert [p.shape for p in pyramid] == [(1, 1), (2, 2), (4, 4), (8, 8)]
    assert pyramid[1][1, 0] == pytest.approx(cube_average(f, CubeId(1, (1, 0))))


def test_coarsen_is_conditional_expectation(spec_1d, random_function):
    f = random_function(spec_1d)
    coarse = coarsen(f, 2)
    assert coarse.integral() == pytest.approx(f.integral())
    for k in range(4):
        q = CubeId(2, (k,))
        assert cube_average(coarse, q) == pytest.approx(cube_average(f, q))
    np.testing.assert_allclose(coarsen(coarse, 2).values, coarse.values)
    np.testing.assert_allclose(coarsen(f, spec_1d.L).values, f.values)


@pytest.mark.parametrize("fine,coarse", [(GridSpec(1, 6), GridSpec(1, 3)), (GridSpec(2, 3), GridSpec(2, 2))])
def test_to_resolution_keeps_cell_averages(fine, coarse, random_function):
    f = random_function(fine)
    sampled = to_resolution(f, coarse)
    assert sampled.spec == coarse
    for q in all_cubes(coarse):
        assert cube_average(sampled, q) == pytest.approx(cube_average(f, q))
    assert to_resolution(f, fine) is f
    with pytest.raises(DomainError):
        to_resolution(sampled, fine)
    with pytest.raises(DomainError):
        to_resolution(f, GridSpec(fine.n % 3 + 1, 1))


def test_haar_function_coefficients():
    spec = GridSpec(2, 3)
    q, sig = CubeId(1, (0, 1)), HaarSignature((1, 0))
    coeffs = analyze(haar_function(spec, q, sig))
    assert coeffs.get(q, sig) == pytest.approx(1.0)
    assert coeffs.energy() == pytest.approx(1.0)
    assert coeffs.mean == pytest.approx(0.0)


def test_haar_function_needs_resolved_cube():
    spec = GridSpec(1, 2)
    with pytest.raises(DomainError):
        haar_function(spec, CubeId(2, (0,)), HaarSignature((0,)))
    plateau = haar_function(spec, CubeId(2, (1,)), HaarSignature((1,)))
    assert plateau.values.tolist() == [0.0, 2.0, 0.0, 0.0]


def test_indicator_and_restrict_levels(spec_1d, random_function):
    f = random_function(spec_1d)
    fine = synthesize(restrict_levels(analyze(f), min_level=2))
    for k in range(4):
        assert cube_average(fine, CubeId(2, (k,))) == pytest.approx(0.0, abs=1e-12)
    assert indicator(spec_1d, CubeId(1, (1,))).integral() == 0.5


def test_from_mapping_round_trip_of_sparse_view():
    spec = GridSpec(2, 2)
    mapping = {(CubeId(1, (1, 0)), cancellative_signatures(2)[2]): -0.5, (CubeId(0, (0, 0)), cancellative_signatures(2)[0]): 2.0}
    coeffs = HaarCoeffs.from_mapping(spec, 1.5, mapping)
    assert dict(coeffs.items()) == mapping
    assert analyze(synthesize(coeffs)).get(CubeId(1, (1, 0)), cancellative_signatures(2)[2]) == pytest.approx(-0.5)
