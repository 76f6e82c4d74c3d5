"""
Forward/inverse Haar transforms on the finite tree, cube averages, and the level-wise
helpers (average pyramid, details, spreading) that the operator fast paths share.

Both transforms are a single lifting pass over the levels, O(N) in the number of cells.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from dyadic_lab.core.grid import (
    block_reduce,
    merge_children,
    sign_matrix,
    split_children,
    upsample,
)
from dyadic_lab.core.types import (
    CellFunction,
    CubeId,
    DomainError,
    GridSpec,
    HaarCoeffs,
    HaarSignature,
    signature_slot,
)

logger = logging.getLogger(__name__)


def level_scale(n: int, level: int) -> float:
    """|Q|^{1/2} for a level-l cube."""
    return 2.0 ** (-n * level / 2)


def average_pyramid(f: CellFunction) -> list[np.ndarray]:
    """Cube averages for levels 0..L; entry l has shape (2^l,)*n."""
    n, L = f.spec.n, f.spec.L
    pyramid = [None] * (L + 1)
    pyramid[L] = f.grid
    for level in reversed(range(L)):
        pyramid[level] = split_children(pyramid[level + 1], n).mean(axis=-1)
    return pyramid


def detail_levels(pyramid: Sequence[np.ndarray], n: int) -> list[np.ndarray | None]:
    """d[l] = <f>_{child} - <f>_{parent} on level-l cubes (d[0] is None).

    d[l] evaluated on a level-l cube P is sum_eps <f,h_Q^eps> h_Q^eps(P) for Q its parent.
    """
    return [None] + [pyramid[level] - upsample(pyramid[level - 1], n) for level in range(1, len(pyramid))]


def analyze(f: CellFunction) -> HaarCoeffs:
    """Exact <f, h_Q^eps> for every cube below resolution, plus the global mean."""
    n, L = f.spec.n, f.spec.L
    pyramid = average_pyramid(f)
    signs = sign_matrix(n)
    levels = []
    for level in range(L):
        kids = split_children(pyramid[level + 1], n)
        beta = kids @ signs / 2**n
        levels.append(np.moveaxis(beta * level_scale(n, level), -1, 0))
    return HaarCoeffs(f.spec, float(pyramid[0].reshape(-1)[0]), tuple(levels))


def expand_levels(spec: GridSpec, mean: float, levels: Sequence[np.ndarray], depth: int | None = None) -> np.ndarray:
    """Top-down synthesis of coefficient slabs; returns the level-`depth` average grid."""
    n = spec.n
    depth = spec.L if depth is None else depth
    signs_t = sign_matrix(n).T
    current = np.full((1,) * n, float(mean))
    for level in range(depth):
        slab = np.moveaxis(levels[level], 0, -1)
        kids = current[..., None] + (slab @ signs_t) / level_scale(n, level)
        current = merge_children(kids, n)
    return current


def synthesize(c: HaarCoeffs) -> CellFunction:
    """Left inverse of analyze."""
    return CellFunction.from_grid(c.spec, expand_levels(c.spec, c.mean, c.levels))


def spread(spec: GridSpec, per_level: Sequence[np.ndarray]) -> np.ndarray:
    """Cell grid of sum_l sum_{Q at level l containing x} per_level[l][Q]."""
    n = spec.n
    acc = np.zeros((1,) * n)
    for level, values in enumerate(per_level):
        acc = (upsample(acc, n) if level else acc) + values
    return upsample(acc, n, spec.L - (len(per_level) - 1))


def cube_average(f: CellFunction, q: CubeId) -> float:
    """|q|^{-1} times the integral of f over q."""
    if q.n != f.spec.n:
        raise DomainError(f"cube dimension {q.n} does not match grid dimension {f.spec.n}")
    if q.level > f.spec.L:
        raise DomainError(f"cube level {q.level} exceeds resolution L={f.spec.L}")
    return float(np.mean(f.grid[q.slices(f.spec)]))


def coarsen(f: CellFunction, level: int) -> CellFunction:
    """Conditional expectation onto level-l cells, kept at resolution L."""
    if not 0 <= level <= f.spec.L:
        raise DomainError(f"coarsening level {level} outside [0, {f.spec.L}]")
    block = block_reduce(f.grid, f.spec.n, f.spec.L - level, np.mean)
    return CellFunction.from_grid(f.spec, upsample(block, f.spec.n, f.spec.L - level))


def to_resolution(f: CellFunction, spec: GridSpec) -> CellFunction:
    """Cell averages of f on the coarser grid `spec` of the same dimension."""
    if f.spec.n != spec.n or f.spec.L < spec.L:
        raise DomainError(f"cannot sample a function on n={f.spec.n}, L={f.spec.L} at n={spec.n}, L={spec.L}")
    if f.spec.L == spec.L:
        return f
    return CellFunction.from_grid(spec, block_reduce(f.grid, spec.n, f.spec.L - spec.L, np.mean))


def indicator(spec: GridSpec, q: CubeId) -> CellFunction:
    grid = np.zeros(spec.shape())
    grid[q.slices(spec)] = 1.0
    return CellFunction.from_grid(spec, grid)


def haar_function(spec: GridSpec, q: CubeId, signature: HaarSignature) -> CellFunction:
    """h_Q^eps sampled on cells; cancellative profiles need q finer than resolution."""
    if signature.cancellative and q.level >= spec.L:
        raise DomainError(f"cancellative Haar function on a level-{q.level} cube is not resolved at L={spec.L}")
    if not signature.cancellative:
        return indicator(spec, q) * q.measure**-0.5
    mapping = {(q, signature): 1.0}
    return synthesize(HaarCoeffs.from_mapping(spec, 0.0, mapping))


def restrict_levels(c: HaarCoeffs, min_level: int = 0, max_level: int | None = None) -> HaarCoeffs:
    """Keep coefficients of cubes with min_level <= level < max_level; mean dropped."""
    max_level = c.spec.L if max_level is None else max_level
    levels = tuple(
        slab if min_level <= level < max_level else np.zeros_like(slab) for level, slab in enumerate(c.levels)
    )
    return HaarCoeffs(c.spec, 0.0, levels)


def coefficient_slot(c: HaarCoeffs, q: CubeId, signature: HaarSignature) -> float:
    return float(c.levels[q.level][(signature_slot(signature), *q.index)])
