"""
Weights on the finite tree: A_p, A_{p,q} and A_infinity constants, Bloom weights,
the BMO family, and generators for test weights and BMO functions.

Every supremum runs over the grid cubes of levels 0..L.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from dyadic_lab.core.fracops import shifted_square_function, square_function
from dyadic_lab.core.grid import block_reduce, upsample
from dyadic_lab.core.multiscale import analyze, average_pyramid, haar_function, synthesize, to_resolution
from dyadic_lab.core.types import (
    BloomFlavor,
    CellFunction,
    CubeId,
    DomainError,
    GeneratorKind,
    GridSpec,
    HaarCoeffs,
    HaarSignature,
)

logger = logging.getLogger(__name__)


def conjugate(p: float) -> float:
    """Hoelder conjugate p' = p / (p - 1)."""
    if not 1.0 < p < np.inf:
        raise DomainError(f"exponent must lie in (1, inf), got p={p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Weight:
    """Strictly positive cell function with lazily cached average pyramids of its powers."""

    base: CellFunction
    p: float = 2.0
    _pyramids: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if np.min(self.base.values) <= 0.0:
            raise DomainError(f"weights must be strictly positive, min value {np.min(self.base.values)}")

    @classmethod
    def constant(cls, spec: GridSpec, value: float = 1.0, p: float = 2.0) -> Weight:
        return cls(CellFunction.constant(spec, value), p)

    @property
    def spec(self) -> GridSpec:
        return self.base.spec

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def power(self, exponent: float) -> Weight:
        return Weight(CellFunction(self.spec, self.values**exponent), self.p)

    def averages(self, exponent: float = 1.0) -> list[np.ndarray]:
        """Cube averages of w^exponent, levels 0..L."""
        if exponent not in self._pyramids:
            self._pyramids[exponent] = average_pyramid(CellFunction(self.spec, self.values**exponent))
        return self._pyramids[exponent]


def _sup(per_level: Sequence[np.ndarray]) -> float:
    return float(max(np.max(values) for values in per_level))


def a_p_constant(w: Weight, p: float) -> float:
    """[w]_{A_p} = sup_Q <w>_Q <w^{1-p'}>_Q^{p-1}."""
    dual = 1.0 - conjugate(p)
    return _sup([a * d ** (p - 1.0) for a, d in zip(w.averages(1.0), w.averages(dual))])


def a_pq_constant(w: Weight, p: float, q: float) -> float:
    """[w]_{A_{p,q}} = sup_Q <w^q>_Q^{1/q} <w^{-p'}>_Q^{1/p'}."""
    p_dual = conjugate(p)
    if not 1.0 < q < np.inf:
        raise DomainError(f"target exponent must lie in (1, inf), got q={q}")
    return _sup([a ** (1.0 / q) * d ** (1.0 / p_dual) for a, d in zip(w.averages(q), w.averages(-p_dual))])


def a_pq_via_power(w: Weight, p: float, q: float) -> float:
    """[w^q]_{A_{q0}}^{1/q} with q0 = 1 + q/p'; coincides with a_pq_constant."""
    q0 = 1.0 + q / conjugate(p)
    return a_p_constant(w.power(q), q0) ** (1.0 / q)


def a_vec_pq_constant(ws: Sequence[Weight], ps: Sequence[float], q: float, target: Weight | None = None) -> float:
    """Multilinear [w]_{A_(p,q)} = sup_Q <nu^q>_Q^{1/q} prod_i <w_i^{-p_i'}>_Q^{1/p_i'}, nu = prod w_i by default."""
    if len(ws) != len(ps):
        raise DomainError(f"{len(ws)} weights for {len(ps)} exponents")
    if not 1.0 < q < np.inf:
        raise DomainError(f"target exponent must lie in (1, inf), got q={q}")
    if target is None:
        target = Weight(CellFunction(ws[0].spec, np.prod([w.values for w in ws], axis=0)))
    per_level = [a ** (1.0 / q) for a in target.averages(q)]
    for w, p in zip(ws, ps):
        p_dual = conjugate(p)
        per_level = [acc * d ** (1.0 / p_dual) for acc, d in zip(per_level, w.averages(-p_dual))]
    return _sup(per_level)


def a_infty_constant(w: Weight) -> float:
    """Fujii-Wilson constant sup_Q w(Q)^{-1} int_Q M(w 1_Q), dyadic maximal operator."""
    spec = w.spec
    pyramid = w.averages(1.0)
    grid = w.base.grid
    running = grid.copy()
    best = 1.0
    for level in reversed(range(spec.L)):
        running = np.maximum(running, upsample(pyramid[level], spec.n, spec.L - level))
        depth = spec.L - level
        ratio = block_reduce(running, spec.n, depth, np.sum) / block_reduce(grid, spec.n, depth, np.sum)
        best = max(best, float(np.max(ratio)))
    return best


def a_infty_pair(w: Weight, s: float) -> float:
    """(w)_{A_s} = max([w]_{A_inf}, [w^{1-s'}]_{A_inf})."""
    return max(a_infty_constant(w), a_infty_constant(w.power(1.0 - conjugate(s))))


def bloom_weight(mu: Weight, lam: Weight, p: float, flavor: BloomFlavor | str = BloomFlavor.RATIO) -> Weight:
    if mu.spec != lam.spec:
        raise DomainError(f"grid mismatch: {mu.spec} vs {lam.spec}")
    ratio = mu.values / lam.values
    if BloomFlavor(flavor) is BloomFlavor.P_ROOT:
        ratio = ratio ** (1.0 / p)
    return Weight(CellFunction(mu.spec, ratio), p)


def bmo_weighted(b: CellFunction, w: Weight | None = None) -> float:
    """sup_Q w(Q)^{-1} int_Q |b - <b>_Q| dx; w = None is dyadic BMO."""
    spec = b.spec
    w = w or Weight.constant(spec)
    if w.spec != spec:
        raise DomainError(f"grid mismatch: {spec} vs {w.spec}")
    pyramid = average_pyramid(b)
    best = 0.0
    for level in range(spec.L):
        depth = spec.L - level
        oscillation = np.abs(b.grid - upsample(pyramid[level], spec.n, depth))
        ratio = block_reduce(oscillation, spec.n, depth, np.sum) / block_reduce(w.base.grid, spec.n, depth, np.sum)
        best = max(best, float(np.max(ratio)))
    return best


def bmo_haar2(b: CellFunction, w: Weight | None = None, r: float | None = None) -> float:
    """Haar-coefficient BMO norm, or the weighted BMO^r(w) norm when w or r is given.

    Unweighted: sup_J (|J|^{-1} sum_{I in J} sum_eps <b,h_I^eps>^2)^{1/2}.
    Weighted: (sup_Q w(Q)^{-1} int_Q |b - <b>_Q|^r w^{1-p'} dx)^{1/r}, p carried by w.
    """
    spec = b.spec
    if w is None and r is None:
        if spec.L == 0:
            return 0.0
        energy = [np.sum(slab**2, axis=0) for slab in analyze(b).levels]
        subtree = energy[-1]
        best = float(np.max(subtree)) * 2.0 ** (spec.n * (spec.L - 1))
        for level in reversed(range(spec.L - 1)):
            subtree = energy[level] + block_reduce(subtree, spec.n, 1, np.sum)
            best = max(best, float(np.max(subtree)) * 2.0 ** (spec.n * level))
        return float(np.sqrt(best))

    r = 2.0 if r is None else r
    if r < 1.0:
        raise DomainError(f"BMO exponent must be >= 1, got r={r}")
    w = w or Weight.constant(spec)
    dual = w.values.reshape(spec.shape()) ** (1.0 - conjugate(w.p))
    pyramid = average_pyramid(b)
    best = 0.0
    for level in range(spec.L):
        depth = spec.L - level
        oscillation = np.abs(b.grid - upsample(pyramid[level], spec.n, depth)) ** r * dual
        ratio = block_reduce(oscillation, spec.n, depth, np.sum) / block_reduce(w.base.grid, spec.n, depth, np.sum)
        best = max(best, float(np.max(ratio)))
    return best ** (1.0 / r)


# ── Exponents ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Exponents:
    """Lebesgue exponents of a two-weight experiment; p is the joint exponent in the bilinear case."""

    p: float
    q: float
    p1: float | None = None
    p2: float | None = None

    def __post_init__(self):
        if not 1.0 < self.q < np.inf:
            raise DomainError(f"target exponent must lie in (1, inf), got q={self.q}")

    @classmethod
    def linear(cls, p: float, alpha: float, n: int) -> Exponents:
        """1/q = 1/p - alpha/n."""
        conjugate(p)
        inverse_q = 1.0 / p - alpha / n
        if inverse_q <= 0.0:
            raise DomainError(f"scaling law gives 1/q = {inverse_q:.6g} <= 0 for p={p}, alpha={alpha}, n={n}")
        return cls(p, 1.0 / inverse_q)

    @classmethod
    def bilinear(cls, p1: float, p2: float, alpha: float, n: int) -> Exponents:
        """1/q = 1/p1 + 1/p2 - alpha/n."""
        conjugate(p1)
        conjugate(p2)
        inverse_p = 1.0 / p1 + 1.0 / p2
        inverse_q = inverse_p - alpha / n
        if inverse_q <= 0.0:
            raise DomainError(f"scaling law gives 1/q = {inverse_q:.6g} <= 0 for p1={p1}, p2={p2}, alpha={alpha}")
        return cls(1.0 / inverse_p, 1.0 / inverse_q, p1, p2)

    @property
    def p_dual(self) -> float:
        return conjugate(self.p)

    @property
    def q0(self) -> float:
        return 1.0 + self.q / self.p_dual


# ── Generators ───────────────────────────────────────────────────────────────


def power_weight(spec: GridSpec, beta: float, x0: Sequence[float] | float = 0.5) -> Weight:
    """dist(x, x0)^beta at cell centres, distance clamped below at half a cell."""
    if not np.isfinite(beta):
        raise DomainError(f"power weight exponent must be finite, got beta={beta}")
    point = np.broadcast_to(np.asarray(x0, dtype=float), (spec.n,))
    axes = [(np.arange(spec.side) + 0.5) / spec.side for _ in range(spec.n)]
    centres = np.meshgrid(*axes, indexing="ij")
    distance = np.sqrt(sum((c - x) ** 2 for c, x in zip(centres, point)))
    distance = np.maximum(distance, 0.5 / spec.side)
    return Weight(CellFunction.from_grid(spec, distance**beta))


def exp_bmo(b0: CellFunction, delta: float) -> Weight:
    """e^{delta b0}."""
    return Weight(CellFunction(b0.spec, np.exp(delta * b0.values)))


def haar_random(spec: GridSpec, seed: int, packing: float = 1.0, decay: float = 1.0) -> CellFunction:
    """Random BMO function: <b,h_I^eps> = sigma |I|^{1/2} 2^{-decay l/2}, sigma uniform in [-packing, packing].

    Levels are drawn in order from one stream, so coarse levels agree across resolutions.
    """
    if not 0.0 < packing <= 1.0:
        raise DomainError(f"packing must lie in (0, 1], got {packing}")
    if decay < 0.0:
        raise DomainError(f"decay must be non-negative, got {decay}")
    rng = np.random.default_rng(seed)
    slots = 2**spec.n - 1
    levels = []
    for level in range(spec.L):
        sigma = rng.uniform(-packing, packing, size=(slots,) + spec.shape(level))
        levels.append(sigma * 2.0 ** (-spec.n * level / 2) * 2.0 ** (-decay * level / 2))
    return synthesize(HaarCoeffs(spec, 0.0, tuple(levels)))


def generate(kind: GeneratorKind | str, spec: GridSpec, **params) -> Weight | CellFunction:
    """Dispatch to a named generator; weights for power_weight/exp_bmo/constant with ``as_weight``."""
    kind = GeneratorKind(kind)
    as_weight = params.pop("as_weight", kind in (GeneratorKind.POWER_WEIGHT, GeneratorKind.EXP_BMO))
    if kind is GeneratorKind.POWER_WEIGHT:
        result = power_weight(spec, params.get("beta", 0.0), params.get("x0", 0.5))
        return result if as_weight else result.base
    if kind is GeneratorKind.EXP_BMO:
        b0 = params.get("b0")
        if b0 is None:
            raise DomainError("exp_bmo needs a base function b0")
        result = exp_bmo(b0, params.get("delta", 0.0))
        return result if as_weight else result.base
    if kind is GeneratorKind.HAAR_RANDOM:
        result = haar_random(spec, params.get("seed", 0), params.get("packing", 1.0), params.get("decay", 1.0))
    elif kind is GeneratorKind.CONSTANT:
        result = CellFunction.constant(spec, params.get("value", 1.0))
    elif kind is GeneratorKind.CSV:
        source = params.get("source")
        if source is None:
            raise DomainError("csv generator needs a stored source function")
        result = to_resolution(source, spec) * params.get("scale", 1.0)
    else:
        signature = HaarSignature(tuple(params.get("signature", (0,) * spec.n)))
        cube = CubeId(params.get("level", 0), tuple(params.get("index", (0,) * spec.n)))
        result = haar_function(spec, cube, signature) * params.get("scale", 1.0)
    return Weight(result) if as_weight else result


# ── Measured diagnostics ─────────────────────────────────────────────────────


def lp_norm(f: CellFunction, p: float, density: np.ndarray | None = None) -> float:
    """(int |f|^p density dx)^{1/p}."""
    integrand = np.abs(f.values) ** p
    if density is not None:
        integrand = integrand * density
    return float(np.sum(integrand) * f.spec.cell_volume) ** (1.0 / p)


def square_function_chain(f: CellFunction, w: Weight, k: int) -> tuple[float, float]:
    """(||S_k f||^2_{L^2(w)}, 2^{nk} [w]_{A_2} ||S f||^2_{L^2(w)}); the first never exceeds the second."""
    shifted = lp_norm(shifted_square_function(f, k), 2.0, w.values) ** 2
    plain = lp_norm(square_function(f), 2.0, w.values) ** 2
    return shifted, 2.0 ** (f.spec.n * k) * a_p_constant(w, 2.0) * plain


def square_function_ratio(f: CellFunction, w: Weight, p: float) -> tuple[float, float]:
    """Measured ||S f||_{L^p(w)} / ||f - <f>||_{L^p(w)} and the reference [w]_{A_p}^{max(1/2, 1/(p-1))}."""
    centred = f - f.integral()
    denominator = lp_norm(centred, p, w.values)
    ratio = lp_norm(square_function(f), p, w.values) / denominator if denominator > 0 else 0.0
    return ratio, a_p_constant(w, p) ** max(0.5, 1.0 / (p - 1.0))


def bmo_ordering(b: CellFunction, w: Weight, r: float = 2.0) -> tuple[float, float]:
    """(||b||_BMO, ||b||_{BMO^r(w)}), reported without asserting the ordering."""
    return bmo_weighted(b), bmo_haar2(b, w, r)
