"""
Dyadic fractional integrals (linear and bilinear), fractional maximal operators and
square functions.

Every cube finer than the resolution sees a constant function, so the infinite tail
below level L collapses to the geometric factor 2^{-L alpha} c_alpha and the Haar
eigenrelation holds exactly on the grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dyadic_lab.core.grid import block_reduce, haar_eval, upsample
from dyadic_lab.core.multiscale import analyze, average_pyramid, spread
from dyadic_lab.core.types import CellFunction, CubeId, DomainError, cancellative_signatures

logger = logging.getLogger(__name__)


def c_alpha(alpha: float) -> float:
    """Sum over k >= 1 of 2^{-k alpha}."""
    return 1.0 / (2.0**alpha - 1.0)


@dataclass(frozen=True)
class FracParams:
    """Order alpha of a linear (0 < alpha < n) or bilinear (0 < alpha < 2n) operator."""

    alpha: float
    n: int
    bilinear: bool = False

    def __post_init__(self):
        upper = 2 * self.n if self.bilinear else self.n
        kind = "bilinear" if self.bilinear else "linear"
        if not 0.0 < self.alpha < upper:
            raise DomainError(f"{kind} fractional order must lie in (0, {upper}), got alpha={self.alpha}")

    @property
    def c(self) -> float:
        return c_alpha(self.alpha)

    def size_factor(self, level: int) -> float:
        """|Q|^{alpha/n} for a level-l cube."""
        return 2.0 ** (-level * self.alpha)


def _accumulate(spec, per_level: Sequence[np.ndarray], params: FracParams) -> np.ndarray:
    """sum_l 2^{-l alpha} per_level[l] spread down to the cells."""
    return spread(spec, [params.size_factor(level) * values for level, values in enumerate(per_level)])


def frac_integral(f: CellFunction, alpha: float) -> CellFunction:
    """I_alpha f = sum_Q |Q|^{alpha/n} <f>_Q 1_Q, sub-resolution tail included."""
    params = FracParams(alpha, f.spec.n)
    pyramid = average_pyramid(f)
    tail = params.size_factor(f.spec.L) * c_alpha(alpha) * f.grid
    return CellFunction.from_grid(f.spec, _accumulate(f.spec, pyramid, params) + tail)


def bifrac_integral(f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    """Bilinear I_alpha(f1, f2) = sum_Q |Q|^{alpha/n} <f1>_Q <f2>_Q 1_Q."""
    if f1.spec != f2.spec:
        raise DomainError(f"grid mismatch: {f1.spec} vs {f2.spec}")
    params = FracParams(alpha, f1.spec.n, bilinear=True)
    products = [a1 * a2 for a1, a2 in zip(average_pyramid(f1), average_pyramid(f2))]
    tail = params.size_factor(f1.spec.L) * c_alpha(alpha) * f1.grid * f2.grid
    return CellFunction.from_grid(f1.spec, _accumulate(f1.spec, products, params) + tail)


def frac_maximal(fs: Sequence[CellFunction], alpha: float) -> CellFunction:
    """Dyadic M_alpha(f_1..f_m): sup over grid cubes Q containing x of |Q|^{alpha/n} prod_i <|f_i|>_Q."""
    m = len(fs)
    if m not in (1, 2):
        raise DomainError(f"fractional maximal operator supports m in {{1, 2}}, got m={m}")
    spec = fs[0].spec
    if any(f.spec != spec for f in fs):
        raise DomainError("grid mismatch between maximal operator arguments")
    if not 0.0 <= alpha < m * spec.n:
        raise DomainError(f"maximal order must lie in [0, {m * spec.n}), got alpha={alpha}")

    pyramids = [average_pyramid(abs(f)) for f in fs]
    running = None
    for level in range(spec.L + 1):
        value = 2.0 ** (-level * alpha) * np.prod([pyr[level] for pyr in pyramids], axis=0)
        running = value if running is None else np.maximum(upsample(running, spec.n), value)
    return CellFunction.from_grid(spec, running)


def _level_energy(f: CellFunction) -> list[np.ndarray]:
    """sum_eps <f, h_Q^eps>^2 per cube, levels 0..L-1."""
    return [np.sum(slab**2, axis=0) for slab in analyze(f).levels]


def square_function(f: CellFunction) -> CellFunction:
    """S f = (sum_Q sum_eps |<f,h_Q^eps>|^2 1_Q/|Q|)^{1/2}."""
    spec = f.spec
    if spec.L == 0:
        return CellFunction.zeros(spec)
    energy = [e * 2.0 ** (spec.n * level) for level, e in enumerate(_level_energy(f))]
    return CellFunction.from_grid(spec, np.sqrt(spread(spec, energy)))


def shifted_square_function(f: CellFunction, k: int) -> CellFunction:
    """S_k: the energy of every cube I is charged to J = I^{(k)} and spread as 1_J/|J|."""
    if k < 0:
        raise DomainError(f"shift must be non-negative, got k={k}")
    if k == 0:
        return square_function(f)
    spec = f.spec
    energy = _level_energy(f)
    top_level = spec.L - 1 - k
    if top_level < 0:
        return CellFunction.zeros(spec)
    charged = [
        block_reduce(energy[level + k], spec.n, k, np.sum) * 2.0 ** (spec.n * level) for level in range(top_level + 1)
    ]
    return CellFunction.from_grid(spec, np.sqrt(spread(spec, charged)))


def image_average(f: CellFunction, alpha: float, cube: CubeId) -> float:
    """<I_alpha f>_J from the Haar coefficients of f alone.

    (1 + c) <f> + sum_{I strictly containing J} c |I|^{alpha/n} sum_eps <f,h_I^eps> h_I^eps(J)
    """
    params = FracParams(alpha, f.spec.n)
    if cube.level > f.spec.L:
        raise DomainError(f"cube level {cube.level} exceeds resolution L={f.spec.L}")
    coeffs = analyze(f)
    c = c_alpha(alpha)
    centre = [(k + 0.5) * cube.side for k in cube.index]
    total = (1.0 + c) * coeffs.mean
    for level in range(cube.level):
        parent = CubeId(level, tuple(k >> (cube.level - level) for k in cube.index))
        for signature in cancellative_signatures(f.spec.n):
            coefficient = coeffs.get(parent, signature)
            if coefficient:
                total += c * params.size_factor(level) * coefficient * haar_eval(parent, signature, centre)
    return total
