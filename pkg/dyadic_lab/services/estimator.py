"""Operator-norm lower estimation between weighted Lebesgue spaces.

Norms follow the two-weight convention ||f||_{L^p(w^p)} = ||w f||_{L^p}. Every reported
value is the Rayleigh quotient of a returned witness, so it is a certified lower bound.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from dyadic_lab.core.fracops import FracParams, bifrac_integral, frac_integral
from dyadic_lab.core.grid import block_reduce
from dyadic_lab.core.multiscale import analyze, indicator, restrict_levels, synthesize
from dyadic_lab.core.paraproducts import commutator_bilinear, commutator_linear
from dyadic_lab.core.types import CellFunction, CubeId, DomainError, GridSpec, HaarCoeffs
from dyadic_lab.core.weights import Exponents, Weight, bmo_haar2, conjugate
from dyadic_lab.schemas import Budget

logger = logging.getLogger(__name__)

START_FAMILIES = ("indicator", "haar_sparse", "smooth")
CONVERGENCE_TOLERANCE = 1e-12


def weighted_norm(f: CellFunction, p: float, w: Weight | None = None) -> float:
    """(sum_cells |f|^p w^p |cell|)^{1/p}."""
    if p < 1.0:
        raise DomainError(f"norm exponent must be >= 1, got p={p}")
    values = np.abs(f.values) if w is None else np.abs(f.values) * w.values
    return float(np.sum(values**p) * f.spec.cell_volume) ** (1.0 / p)


# ── Operator handles ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class LinearOperator:
    name: str
    apply: Callable[[CellFunction], CellFunction]
    adjoint: Callable[[CellFunction], CellFunction]

    @classmethod
    def identity(cls) -> LinearOperator:
        return cls("identity", lambda f: f, lambda g: g)

    @classmethod
    def frac(cls, alpha: float) -> LinearOperator:
        def apply(f: CellFunction) -> CellFunction:
            return frac_integral(f, alpha)

        return cls(f"I_{alpha:g}", apply, apply)

    @classmethod
    def commutator(cls, b: CellFunction, alpha: float, k: int = 1) -> LinearOperator:
        """C_b^k(I_alpha); its adjoint is (-1)^k C_b^k(I_alpha)."""
        sign = (-1.0) ** k

        def apply(f: CellFunction) -> CellFunction:
            return commutator_linear(b, f, alpha, k)

        def adjoint(g: CellFunction) -> CellFunction:
            return sign * commutator_linear(b, g, alpha, k)

        return cls(f"C^{k}_b(I_{alpha:g})", apply, adjoint)


@dataclass(frozen=True)
class BilinearOperator:
    """T(f1, f2) with partial adjoints: <T(f1,f2), g> = <f1, T*_1(g,f2)> = <f2, T*_2(f1,g)>."""

    name: str
    apply: Callable[[CellFunction, CellFunction], CellFunction]
    adjoint_first: Callable[[CellFunction, CellFunction], CellFunction]
    adjoint_second: Callable[[CellFunction, CellFunction], CellFunction]

    @classmethod
    def bifrac(cls, alpha: float) -> BilinearOperator:
        def apply(f1: CellFunction, f2: CellFunction) -> CellFunction:
            return bifrac_integral(f1, f2, alpha)

        return cls(f"I_{alpha:g}(.,.)", apply, apply, apply)

    @classmethod
    def commutator(cls, b: CellFunction, alpha: float, slot: int = 1) -> BilinearOperator:
        def first(f1: CellFunction, f2: CellFunction) -> CellFunction:
            return commutator_bilinear(b, f1, f2, alpha, slot=1)

        def first_adjoint_1(g: CellFunction, f2: CellFunction) -> CellFunction:
            return -first(g, f2)

        def first_adjoint_2(f1: CellFunction, g: CellFunction) -> CellFunction:
            return bifrac_integral(f1, b * g, alpha) - bifrac_integral(b * f1, g, alpha)

        if slot == 1:
            return cls(f"[b,I_{alpha:g}]_1", first, first_adjoint_1, first_adjoint_2)
        if slot == 2:
            return cls(
                f"[b,I_{alpha:g}]_2",
                lambda f1, f2: first(f2, f1),
                lambda g, f2: first_adjoint_2(f2, g),
                lambda f1, g: first_adjoint_1(g, f1),
            )
        raise DomainError(f"commutator slot must be 1 or 2, got {slot}")


Operator = LinearOperator | BilinearOperator


@dataclass(frozen=True)
class NormEstimate:
    value: float
    witness: tuple[CellFunction, ...]
    iterations: int
    seed: int
    pool: int
    max_iterations: int
    exhausted: bool = False
    zero_operator: bool = False
    start_index: int = 0


# ── Quotient and ascent ──────────────────────────────────────────────────────


def _dual_map(values: np.ndarray, s: float) -> np.ndarray:
    """sign(x) |x|^{s-1}."""
    return np.sign(values) * np.abs(values) ** (s - 1.0)


def _input_exponents(op: Operator, exponents: Exponents) -> tuple[float, ...]:
    if isinstance(op, LinearOperator):
        return (exponents.p,)
    if exponents.p1 is None or exponents.p2 is None:
        raise DomainError("bilinear estimates need p1 and p2")
    return (exponents.p1, exponents.p2)


def quotient(
    op: Operator, witness: Sequence[CellFunction], exponents: Exponents, mu: Weight | None, lam: Weight | None
) -> float:
    """||T(witness)||_{L^q(lam^q)} / prod_i ||witness_i||_{L^p_i(mu^p_i)}."""
    denominator = 1.0
    for f, p in zip(witness, _input_exponents(op, exponents)):
        denominator *= weighted_norm(f, p, mu)
    if denominator == 0.0:
        return 0.0
    return weighted_norm(op.apply(*witness), exponents.q, lam) / denominator


def _normalize(f: CellFunction, p: float, mu: Weight | None) -> CellFunction | None:
    size = weighted_norm(f, p, mu)
    return f / size if size > 0.0 else None


def _ascent_update(
    apply: Callable[[CellFunction], CellFunction],
    adjoint: Callable[[CellFunction], CellFunction],
    f: CellFunction,
    p: float,
    q: float,
    mu: Weight | None,
    lam: Weight | None,
) -> CellFunction | None:
    """One dual-exponent step: f <- psi_{p'}(T*(lam psi_q(lam T f)) / mu) / mu, renormalized."""
    spec = f.spec
    lam_values = 1.0 if lam is None else lam.values
    mu_values = 1.0 if mu is None else mu.values
    image = apply(f).values * lam_values
    pulled = adjoint(CellFunction(spec, lam_values * _dual_map(image, q))).values / mu_values
    if not np.any(pulled):
        return None
    step = CellFunction(spec, _dual_map(pulled, conjugate(p)) / mu_values)
    return _normalize(step, p, mu)


def _ascend(
    op: Operator,
    start: tuple[CellFunction, ...],
    exponents: Exponents,
    mu: Weight | None,
    lam: Weight | None,
    iterations: int,
) -> tuple[float, tuple[CellFunction, ...], int, bool]:
    """Monotone ascent from one start; returns (value, witness, iterations used, converged)."""
    ps = _input_exponents(op, exponents)
    current = tuple(_normalize(f, p, mu) for f, p in zip(start, ps))
    if any(f is None for f in current):
        return 0.0, start, 0, True
    best = quotient(op, current, exponents, mu, lam)
    for step in range(1, iterations + 1):
        if isinstance(op, LinearOperator):
            candidate = _ascent_update(op.apply, op.adjoint, current[0], ps[0], exponents.q, mu, lam)
            proposals = None if candidate is None else (candidate,)
        else:
            f1, f2 = current
            new_f1 = _ascent_update(
                lambda u: op.apply(u, f2), lambda g: op.adjoint_first(g, f2), f1, ps[0], exponents.q, mu, lam
            )
            new_f1 = f1 if new_f1 is None else new_f1
            new_f2 = _ascent_update(
                lambda u: op.apply(new_f1, u), lambda g: op.adjoint_second(new_f1, g), f2, ps[1], exponents.q, mu, lam
            )
            proposals = (new_f1, f2 if new_f2 is None else new_f2)
        if proposals is None:
            return best, current, step, True
        value = quotient(op, proposals, exponents, mu, lam)
        if value <= best * (1.0 + CONVERGENCE_TOLERANCE):
            if value > best:
                best, current = value, proposals
            return best, current, step, True
        best, current = value, proposals
    return best, current, iterations, False


# ── Start pool ───────────────────────────────────────────────────────────────


def _random_start(spec: GridSpec, family: str, rng: np.random.Generator) -> CellFunction:
    if family == "indicator":
        level = int(rng.integers(0, spec.L + 1))
        index = tuple(int(k) for k in rng.integers(0, 2**level, size=spec.n))
        return indicator(spec, CubeId(level, index))
    if family == "haar_sparse":
        slots = 2**spec.n - 1
        levels = [np.zeros((slots,) + spec.shape(level)) for level in range(spec.L)]
        for _ in range(3):
            level = int(rng.integers(0, spec.L))
            position = (int(rng.integers(0, slots)),) + tuple(int(k) for k in rng.integers(0, 2**level, size=spec.n))
            levels[level][position] = rng.normal() * 2.0 ** (-spec.n * level / 2)
        return synthesize(HaarCoeffs(spec, float(rng.normal()), tuple(levels)))
    axes = np.meshgrid(*[(np.arange(spec.side) + 0.5) / spec.side for _ in range(spec.n)], indexing="ij")
    frequencies = rng.integers(1, 4, size=spec.n)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    wave = np.cos(2.0 * np.pi * sum(freq * axis for freq, axis in zip(frequencies, axes)) + phase)
    return CellFunction.from_grid(spec, rng.uniform(-1.0, 1.0) + wave)


def start_pool(spec: GridSpec, arity: int, pool: int, seed: int) -> list[tuple[CellFunction, ...]]:
    """Start 0 is the constant function; later starts cycle through the random families."""
    streams = np.random.SeedSequence(seed).spawn(pool)
    starts = []
    for index, stream in enumerate(streams):
        if index == 0:
            starts.append((CellFunction.constant(spec, 1.0),) * arity)
            continue
        rng = np.random.default_rng(stream)
        family = START_FAMILIES[(index - 1) % len(START_FAMILIES)]
        starts.append(tuple(_random_start(spec, family, rng) for _ in range(arity)))
    return starts


def norm_estimate(
    op: Operator,
    spec: GridSpec,
    exponents: Exponents,
    mu: Weight | None = None,
    lam: Weight | None = None,
    budget: Budget | None = None,
    seed: int = 0,
    threads: int = 1,
    extra_starts: Sequence[Sequence[CellFunction]] = (),
) -> NormEstimate:
    """Best certified quotient over a seeded start pool; ties go to the lowest start index."""
    budget = budget or Budget()
    arity = 1 if isinstance(op, LinearOperator) else 2
    starts = start_pool(spec, arity, budget.pool, seed) + [tuple(extra) for extra in extra_starts]

    def run(start: tuple[CellFunction, ...]):
        return _ascend(op, start, exponents, mu, lam, budget.iterations)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(run, starts))
    else:
        results = [run(start) for start in starts]

    best_index = 0
    for index, (value, *_rest) in enumerate(results):
        if value > results[best_index][0]:
            best_index = index
    value, witness, used, converged = results[best_index]
    if not converged:
        logger.warning(f"{op.name}: ascent budget of {budget.iterations} iterations exhausted at start {best_index}")
    zero = value == 0.0
    logger.debug(f"{op.name}: estimate {value:.6g} from start {best_index} after {used} iterations")
    return NormEstimate(
        value=value,
        witness=witness,
        iterations=used,
        seed=seed,
        pool=len(starts),
        max_iterations=budget.iterations,
        exhausted=not converged,
        zero_operator=zero,
        start_index=best_index,
    )


# ── Lower-bound probe ────────────────────────────────────────────────────────


def probe_cube(b: CellFunction) -> CubeId:
    """The cube J maximizing |J|^{-1} sum_{I in J} sum_eps <b,h_I^eps>^2 (first in level order)."""
    spec = b.spec
    energy = [np.sum(slab**2, axis=0) for slab in analyze(b).levels]
    if not energy:
        raise DomainError("no Haar coefficients at resolution L=0")
    subtree = [None] * spec.L
    subtree[-1] = energy[-1]
    for level in reversed(range(spec.L - 1)):
        subtree[level] = energy[level] + block_reduce(subtree[level + 1], spec.n, 1, np.sum)
    best_level, best_value = 0, -1.0
    for level, values in enumerate(subtree):
        density = float(np.max(values)) * 2.0 ** (spec.n * level)
        if density > best_value * (1.0 + 1e-12):
            best_level, best_value = level, density
    index = np.unravel_index(int(np.argmax(subtree[best_level])), spec.shape(best_level))
    return CubeId(best_level, tuple(int(k) for k in index))


def lower_bound_probe(
    b: CellFunction, alpha: float, p1: float, p2: float, q: float | None = None
) -> tuple[float, CubeId]:
    """||1_J [b', I_alpha]_1(1_J, 1_J)||_{L^q} / |J|^{1/p} for b normalized in Haar BMO.

    b' keeps the coefficients of cubes no larger than J; on J its commutator agrees with
    that of b, so the value is the quotient of the witness (1_J, 1_J).
    """
    spec = b.spec
    if b.is_constant():
        raise DomainError("lower-bound probe needs a non-constant b")
    FracParams(alpha, spec.n, bilinear=True)
    exponents = Exponents(1.0 / (1.0 / p1 + 1.0 / p2), q, p1, p2) if q else Exponents.bilinear(p1, p2, alpha, spec.n)
    normalized = b / bmo_haar2(b)
    cube = probe_cube(normalized)
    fine = synthesize(restrict_levels(analyze(normalized), min_level=cube.level))
    mask = indicator(spec, cube)
    image = mask * commutator_bilinear(fine, mask, mask, alpha, slot=1)
    value = weighted_norm(image, exponents.q) / cube.measure ** (1.0 / exponents.p)
    logger.debug(f"probe cube level {cube.level} index {cube.index}: {value:.6g}")
    return value, cube
