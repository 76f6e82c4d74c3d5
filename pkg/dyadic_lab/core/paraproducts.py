"""
Linear and bilinear paraproducts, commutators of every order, and the two exact
decompositions of commutators with fractional integrals.

All fast paths work level by level on coefficient slabs (see core.types.HaarCoeffs):
  - h_Q^eps h_Q^eta = |Q|^{-1/2} h_Q^{eps+eta}, so products of two expansions on the
    same cube split into a diagonal part (eps = eta, a multiple of 1_Q/|Q|) that is
    spread over cells, and a cross part that is re-synthesized;
  - a sum over strict ancestors of a cube is a top-down recurrence on per-level arrays.

Only cancellative coefficients of b ever enter, so every operator here is unchanged by
b -> b + const. The global means of f, f1, f2 enter as the coefficient of a virtual
parent of the top cube: Haar function 1, size factor 2^alpha.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from dyadic_lab.core import fracops
from dyadic_lab.core.fracops import FracParams, bifrac_integral, frac_integral, square_function
from dyadic_lab.core.grid import block_reduce, upsample
from dyadic_lab.core.multiscale import analyze, average_pyramid, detail_levels, expand_levels, spread
from dyadic_lab.core.types import (
    BilinearParaproduct,
    CellFunction,
    DomainError,
    GridSpec,
    ShiftMode,
    cancellative_signatures,
    signature_slot,
)

logger = logging.getLogger(__name__)

LINEAR_SIGNS = (1.0, -1.0, 1.0, -1.0)


@lru_cache(maxsize=None)
def _signature_pairs(n: int) -> tuple[tuple[int, int, int | None], ...]:
    """(slot eps, slot eta, slot of eps+eta or None when eps = eta)."""
    sigs = cancellative_signatures(n)
    pairs = []
    for i, eps in enumerate(sigs):
        for j, eta in enumerate(sigs):
            combined = eps.combine(eta)
            pairs.append((i, j, signature_slot(combined) if combined.cancellative else None))
    return tuple(pairs)


def _check_grids(*fs: CellFunction) -> GridSpec:
    spec = fs[0].spec
    for f in fs[1:]:
        if f.spec != spec:
            raise DomainError(f"grid mismatch: {spec} vs {f.spec}")
    return spec


def _expand(spec: GridSpec, slabs: Sequence[np.ndarray]) -> CellFunction:
    """sum_Q sum_eps slabs[l][eps, Q] h_Q^eps (no mean)."""
    return CellFunction.from_grid(spec, expand_levels(spec, 0.0, slabs))


def _haar_products(
    spec: GridSpec,
    left: Sequence[np.ndarray],
    right: Sequence[np.ndarray],
    scale: Sequence[np.ndarray | float],
    diagonal: bool = True,
    cross: bool = True,
) -> CellFunction:
    """sum_Q sum_{eps,eta} left[eps,Q] right[eta,Q] scale[Q] h_Q^eps h_Q^eta."""
    n = spec.n
    slots = 2**n - 1
    diag_levels, cross_levels = [], []
    for level, (lhs, rhs, s) in enumerate(zip(left, right, scale)):
        if diagonal:
            diag_levels.append(np.sum(lhs * rhs, axis=0) * s * 2.0 ** (n * level))
        if cross:
            slab = np.zeros((slots,) + spec.shape(level))
            for i, j, target in _signature_pairs(n):
                if target is not None:
                    slab[target] += lhs[i] * rhs[j] * s * 2.0 ** (n * level / 2)
            cross_levels.append(slab)
    result = CellFunction.zeros(spec)
    if diag_levels:
        result = result + CellFunction.from_grid(spec, spread(spec, diag_levels))
    if cross_levels:
        result = result + _expand(spec, cross_levels)
    return result


# ── Linear paraproducts ──────────────────────────────────────────────────────


def pi(b: CellFunction, f: CellFunction) -> CellFunction:
    """Pi_b f = sum_Q sum_eps <b,h_Q^eps> <f>_Q h_Q^eps."""
    spec = _check_grids(b, f)
    avg = average_pyramid(f)
    return _expand(spec, [slab * avg[level] for level, slab in enumerate(analyze(b).levels)])


def pi_star(b: CellFunction, f: CellFunction) -> CellFunction:
    """Pi*_b f = sum_Q sum_eps <b,h_Q^eps> <f,h_Q^eps> 1_Q/|Q|."""
    spec = _check_grids(b, f)
    ones = [1.0] * spec.L
    return _haar_products(spec, analyze(b).levels, analyze(f).levels, ones, cross=False)


def gamma(b: CellFunction, f: CellFunction) -> CellFunction:
    """Gamma_b f: the eps != eta cross terms; identically zero for n = 1."""
    spec = _check_grids(b, f)
    ones = [1.0] * spec.L
    return _haar_products(spec, analyze(b).levels, analyze(f).levels, ones, diagonal=False)


def b_shift(b: CellFunction, f: CellFunction, k: int, mode: ShiftMode = ShiftMode.B_FIRST) -> CellFunction:
    """B_k(b,f) = sum_Q sum_{eps,eta} <b,h_Q^eps> <f,h_{Q^(k)}^eta> h_{Q^(k)}^eta h_Q^eps.

    ``mode=f_first`` evaluates B_k(f,b).
    """
    if k < 0:
        raise DomainError(f"shift must be non-negative, got k={k}")
    spec = _check_grids(b, f)
    fine, coarse = (b, f) if ShiftMode(mode) is ShiftMode.B_FIRST else (f, b)
    fine_levels = analyze(fine).levels
    if k == 0:
        return _haar_products(spec, fine_levels, analyze(coarse).levels, [1.0] * spec.L)

    # On Q, sum_eta <g,h_{Q^(k)}^eta> h_{Q^(k)}^eta is the detail of g one level below Q^(k).
    details = detail_levels(average_pyramid(coarse), spec.n)
    slabs = []
    for level, slab in enumerate(fine_levels):
        if level < k:
            slabs.append(np.zeros_like(slab))
        else:
            slabs.append(slab * upsample(details[level - k + 1], spec.n, k - 1))
    return _expand(spec, slabs)


def b_shift_series(b: CellFunction, g: CellFunction, alpha: float) -> CellFunction:
    """sum_{k>=1} 2^{-k alpha} B_k(b, g), closed by the virtual-parent term.

    The k = l(Q)+1 ancestor of Q is the virtual parent, contributing
    2^{-(l(Q)+1) alpha} <b,h_Q^eps> <g> h_Q^eps.
    """
    spec = _check_grids(b, g)
    decay = 2.0**-alpha
    pyramid = average_pyramid(g)
    details = detail_levels(pyramid, spec.n)
    weight = decay * pyramid[0]
    slabs = []
    for level, slab in enumerate(analyze(b).levels):
        slabs.append(slab * weight)
        if level + 1 < spec.L:
            weight = decay * (upsample(weight, spec.n) + details[level + 1])
    return _expand(spec, slabs)


# ── Commutators ──────────────────────────────────────────────────────────────


def commutator_linear(b: CellFunction, f: CellFunction, alpha: float, k: int = 1) -> CellFunction:
    """C_b^k(I_alpha) f = sum_j binom(k,j) (-1)^{k-j} b^j I_alpha(b^{k-j} f)."""
    if k < 1:
        raise DomainError(f"commutator order must be >= 1, got k={k}")
    spec = _check_grids(b, f)
    FracParams(alpha, spec.n)
    if b.is_constant():
        return CellFunction.zeros(spec)
    result = CellFunction.zeros(spec)
    for j in range(k + 1):
        inner = frac_integral(CellFunction(spec, b.values ** (k - j)) * f, alpha)
        result = result + comb(k, j) * (-1.0) ** (k - j) * CellFunction(spec, b.values**j) * inner
    return result


def commutator_bilinear(
    b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float, slot: int = 1
) -> CellFunction:
    """[b, I_alpha]_1 = b I(f1,f2) - I(b f1, f2); slot 2 multiplies f2 instead."""
    if slot not in (1, 2):
        raise DomainError(f"commutator slot must be 1 or 2, got {slot}")
    spec = _check_grids(b, f1, f2)
    FracParams(alpha, spec.n, bilinear=True)
    if b.is_constant():
        return CellFunction.zeros(spec)
    moved = bifrac_integral(b * f1, f2, alpha) if slot == 1 else bifrac_integral(f1, b * f2, alpha)
    return b * bifrac_integral(f1, f2, alpha) - moved


@dataclass(frozen=True)
class LinearDecomposition:
    """[b, I_alpha] f as a signed sum of four composed paraproduct terms."""

    pi_of_image: CellFunction  # Pi_b (I f)
    image_of_pi_star: CellFunction  # I (Pi*_b f)
    pi_star_of_image: CellFunction  # Pi*_b (I f)
    shift_series: CellFunction  # sum_k 2^{-k alpha} B_k(b, I f)
    commutator: CellFunction
    signs: tuple[float, float, float, float] = LINEAR_SIGNS

    @property
    def terms(self) -> tuple[CellFunction, ...]:
        return (self.pi_of_image, self.image_of_pi_star, self.pi_star_of_image, self.shift_series)

    def combined(self) -> CellFunction:
        total = CellFunction.zeros(self.commutator.spec)
        for sign, term in zip(self.signs, self.terms):
            total = total + sign * term
        return total

    def residual(self) -> float:
        """Relative sup-norm residual of the signed sum against the commutator."""
        scale = max(self.commutator.max_abs(), 1e-300)
        return (self.combined() - self.commutator).max_abs() / scale


def decompose_linear(b: CellFunction, f: CellFunction, alpha: float) -> LinearDecomposition:
    spec = _check_grids(b, f)
    FracParams(alpha, spec.n)
    image = frac_integral(f, alpha)
    return LinearDecomposition(
        pi_of_image=pi(b, image),
        image_of_pi_star=frac_integral(pi_star(b, f), alpha),
        pi_star_of_image=pi_star(b, image),
        shift_series=b_shift_series(b, image, alpha),
        commutator=commutator_linear(b, f, alpha, 1),
    )


# ── Bilinear paraproducts ────────────────────────────────────────────────────


@dataclass(frozen=True)
class _BilinearLevels:
    """Per-level arrays shared by the collapsed bilinear forms."""

    spec: GridSpec
    b: tuple[np.ndarray, ...]
    c1: tuple[np.ndarray, ...]
    c2: tuple[np.ndarray, ...]
    a1: tuple[np.ndarray, ...]
    a2: tuple[np.ndarray, ...]
    d1: tuple[np.ndarray | None, ...]
    d2: tuple[np.ndarray | None, ...]
    db: tuple[np.ndarray | None, ...]
    weights: tuple[float, ...]
    alpha: float

    @classmethod
    def build(cls, b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> _BilinearLevels:
        spec = _check_grids(b, f1, f2)
        params = FracParams(alpha, spec.n, bilinear=True)
        a1, a2, ab = average_pyramid(f1), average_pyramid(f2), average_pyramid(b)
        return cls(
            spec=spec,
            b=analyze(b).levels,
            c1=analyze(f1).levels,
            c2=analyze(f2).levels,
            a1=tuple(a1),
            a2=tuple(a2),
            d1=tuple(detail_levels(a1, spec.n)),
            d2=tuple(detail_levels(a2, spec.n)),
            db=tuple(detail_levels(ab, spec.n)),
            weights=tuple(params.size_factor(level) for level in range(spec.L + 1)),
            alpha=alpha,
        )

    def swapped(self) -> _BilinearLevels:
        return _BilinearLevels(
            self.spec, self.b, self.c2, self.c1, self.a2, self.a1, self.d2, self.d1, self.db, self.weights, self.alpha
        )

    def up(self, a: np.ndarray) -> np.ndarray:
        return upsample(a, self.spec.n)


def _lambda_1(lv: _BilinearLevels) -> CellFunction:
    # P strictly inside Q1, f2 collapsed to <f2>_{Q1}
    running = np.zeros(lv.spec.shape(0))
    slabs = []
    for level in range(lv.spec.L):
        slabs.append(lv.b[level] * running)
        running = lv.up(running) + lv.d1[level + 1] * lv.up(lv.a2[level]) * lv.weights[level]
    return _expand(lv.spec, slabs)


def _lambda_2(lv: _BilinearLevels) -> CellFunction:
    # Q1 = Q2 strictly above P, virtual parent included
    running = 2.0**lv.alpha * lv.a1[0] * lv.a2[0]
    slabs = []
    for level in range(lv.spec.L):
        slabs.append(lv.b[level] * running)
        running = lv.up(running) + lv.weights[level] * lv.d1[level + 1] * lv.d2[level + 1]
    return _expand(lv.spec, slabs)


def _lambda_31(lv: _BilinearLevels, diagonal: bool) -> CellFunction:
    scale = [lv.a1[level] * lv.weights[level] for level in range(lv.spec.L)]
    return _haar_products(lv.spec, lv.b, lv.c2, scale, diagonal=diagonal, cross=not diagonal)


def _lambda_32(lv: _BilinearLevels) -> CellFunction:
    # P strictly above Q2, f1 collapsed to <f1>_P
    running = np.zeros(lv.spec.shape(0))
    slabs = []
    for level in range(lv.spec.L):
        slabs.append(lv.c2[level] * lv.weights[level] * running)
        running = lv.up(running) + lv.up(lv.a1[level]) * lv.db[level + 1]
    return _expand(lv.spec, slabs)


def _delta_2(lv: _BilinearLevels) -> CellFunction:
    slabs = [lv.b[level] * lv.weights[level] * lv.a1[level] * lv.a2[level] for level in range(lv.spec.L)]
    return _expand(lv.spec, slabs)


def _xi(lv: _BilinearLevels) -> CellFunction:
    scale = [lv.a2[level] * lv.weights[level] for level in range(lv.spec.L)]
    return _haar_products(lv.spec, lv.b, lv.c1, scale, cross=False)


def _theta(lv: _BilinearLevels) -> CellFunction:
    spec = lv.spec
    if spec.L == 0:
        return CellFunction.zeros(spec)
    energy = [np.sum(lv.b[level] * lv.c1[level], axis=0) for level in range(spec.L)]
    below = [None] * spec.L
    below[spec.L - 1] = np.zeros(spec.shape(spec.L - 1))
    for level in reversed(range(spec.L - 1)):
        below[level] = block_reduce(energy[level + 1] + below[level + 1], spec.n, 1, np.sum)
    per_level = [
        lv.weights[level] * lv.a2[level] * below[level] * 2.0 ** (spec.n * level) for level in range(spec.L)
    ]
    return CellFunction.from_grid(spec, spread(spec, per_level))


def lambda_1(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    return _lambda_1(_BilinearLevels.build(b, f1, f2, alpha))


def lambda_2(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    return _lambda_2(_BilinearLevels.build(b, f1, f2, alpha))


def lambda_31_equal(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    return _lambda_31(_BilinearLevels.build(b, f1, f2, alpha), diagonal=True)


def lambda_31_cross(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    return _lambda_31(_BilinearLevels.build(b, f1, f2, alpha), diagonal=False)


def lambda_32(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    return _lambda_32(_BilinearLevels.build(b, f1, f2, alpha))


def lambda_33(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    """Q2 strictly inside Q1: the lambda_1 form with f1 and f2 exchanged."""
    return _lambda_1(_BilinearLevels.build(b, f1, f2, alpha).swapped())


def delta_2(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    return _delta_2(_BilinearLevels.build(b, f1, f2, alpha))


def _paraproduct(which: BilinearParaproduct, lv: _BilinearLevels) -> CellFunction:
    if which is BilinearParaproduct.LAMBDA:
        return (
            _lambda_1(lv)
            + _lambda_2(lv)
            + _lambda_31(lv, diagonal=True)
            + _lambda_31(lv, diagonal=False)
            + _lambda_32(lv)
            + _lambda_1(lv.swapped())
        )
    if which is BilinearParaproduct.DELTA:
        return _lambda_31(lv, diagonal=True) + _lambda_31(lv, diagonal=False) + _delta_2(lv) + _lambda_32(lv)
    if which is BilinearParaproduct.XI:
        return _xi(lv)
    return _theta(lv)


def bilinear_paraproduct(
    which: BilinearParaproduct | str, b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float
) -> CellFunction:
    """Lambda_b, Delta_b, Xi_b or Theta_b applied to (f1, f2) through the collapsed forms."""
    return _paraproduct(BilinearParaproduct(which), _BilinearLevels.build(b, f1, f2, alpha))


@dataclass(frozen=True)
class BilinearDecomposition:
    """c Lambda_b - c Delta_b - Xi_b - Theta_b against [b, I_alpha]_1(f1, f2)."""

    lambda_: CellFunction
    delta: CellFunction
    xi: CellFunction
    theta: CellFunction
    commutator: CellFunction
    coefficients: tuple[float, float, float, float]

    @property
    def terms(self) -> tuple[CellFunction, ...]:
        return (self.lambda_, self.delta, self.xi, self.theta)

    def combined(self) -> CellFunction:
        total = CellFunction.zeros(self.commutator.spec)
        for coefficient, term in zip(self.coefficients, self.terms):
            total = total + coefficient * term
        return total

    def residual(self) -> float:
        scale = max(self.commutator.max_abs(), 1e-300)
        return (self.combined() - self.commutator).max_abs() / scale


def decompose_bilinear(b: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> BilinearDecomposition:
    lv = _BilinearLevels.build(b, f1, f2, alpha)
    c = fracops.c_alpha(alpha)
    return BilinearDecomposition(
        lambda_=_paraproduct(BilinearParaproduct.LAMBDA, lv),
        delta=_paraproduct(BilinearParaproduct.DELTA, lv),
        xi=_xi(lv),
        theta=_theta(lv),
        commutator=commutator_bilinear(b, f1, f2, alpha, slot=1),
        coefficients=(c, -c, -1.0, -1.0),
    )


# ── Pointwise domination ─────────────────────────────────────────────────────


def dual_test_function(g: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> CellFunction:
    """Phi with <Lambda^1_b(f1,f2), g> = <b, Phi>: the lambda_1 form with g in place of b."""
    return lambda_1(g, f1, f2, alpha)


def domination_gap(g: CellFunction, f1: CellFunction, f2: CellFunction, alpha: float) -> float:
    """max over cells of S Phi - (2^n - 1) S g I_alpha(|f1|, |f2|); non-positive when domination holds."""
    spec = _check_grids(g, f1, f2)
    phi = dual_test_function(g, f1, f2, alpha)
    bound = (2**spec.n - 1) * square_function(g) * bifrac_integral(abs(f1), abs(f2), alpha)
    return float(np.max((square_function(phi) - bound).values))
