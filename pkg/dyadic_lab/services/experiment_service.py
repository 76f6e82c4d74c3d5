"""Two-weight norm sweeps and the contour convergence table."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from dyadic_lab.core.paraproducts import commutator_linear
from dyadic_lab.core.multiscale import indicator
from dyadic_lab.core.types import CellFunction, DomainError, GridSpec
from dyadic_lab.core.weights import (
    Weight,
    a_pq_constant,
    a_vec_pq_constant,
    bloom_weight,
    bmo_haar2,
    bmo_weighted,
)
from dyadic_lab.schemas import ExperimentConfig, GeneratorSpec, WeightPair
from dyadic_lab.services.contour import (
    ContourSpec,
    cauchy_commutator,
    cauchy_radius,
    contour_weight_report,
    quadrature_radius,
)
from dyadic_lab.services.estimator import BilinearOperator, LinearOperator, lower_bound_probe, norm_estimate

logger = logging.getLogger(__name__)

LINEAR_COLUMNS = ("n", "L", "alpha", "k", "p", "q", "A_pq_mu", "A_pq_lambda", "bmo_nu", "bmo", "norm_lower", "ratio")
BILINEAR_COLUMNS = LINEAR_COLUMNS + ("p1", "p2", "probe")
CAUCHY_COLUMNS = ("k", "M", "r", "rel_err")


@dataclass(frozen=True)
class SweepPoint:
    index: int
    alpha: float
    k: int
    pair: int
    b: int
    L: int


def sweep_points(config: ExperimentConfig) -> list[SweepPoint]:
    """Lexicographic product over (alpha, k, weight pair, b, L); L varies fastest."""
    axes = product(config.alpha, config.k, range(len(config.weights)), range(len(config.b)), config.L)
    return [SweepPoint(index, *values) for index, values in enumerate(axes)]


def point_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1)[0])


def columns(config: ExperimentConfig) -> tuple[str, ...]:
    return BILINEAR_COLUMNS if config.mode == "bilinear" else LINEAR_COLUMNS


def _build_pair(pair: WeightPair, spec: GridSpec, p: float) -> tuple[Weight, Weight]:
    return pair.mu.build_weight(spec, p), pair.lam.build_weight(spec, p)


def _build_b(generator: GeneratorSpec, spec: GridSpec) -> CellFunction:
    return generator.build_function(spec)


def run_point(config: ExperimentConfig, point: SweepPoint, seed: int) -> dict:
    spec = GridSpec(config.n, point.L)
    exponents = config.exponents(point.alpha)
    mu, lam = _build_pair(config.weights[point.pair], spec, exponents.p if config.mode == "linear" else 2.0)
    b = _build_b(config.b[point.b], spec)
    if config.mode == "bilinear" and not b.is_constant():
        # bilinear rows describe b normalized in Haar BMO, the scale lower_bound_probe works at
        b = b / bmo_haar2(b)
    nu = bloom_weight(mu, lam, exponents.p)
    bmo_nu, bmo = bmo_weighted(b, nu), bmo_weighted(b)

    row = {"n": config.n, "L": point.L, "alpha": point.alpha, "k": point.k, "p": exponents.p, "q": exponents.q}
    if config.mode == "linear":
        row["A_pq_mu"] = a_pq_constant(mu, exponents.p, exponents.q)
        row["A_pq_lambda"] = a_pq_constant(lam, exponents.p, exponents.q)
        op = LinearOperator.commutator(b, point.alpha, point.k)
        extra = ()
    else:
        slots = (exponents.p1, exponents.p2)
        row["A_pq_mu"] = a_vec_pq_constant((mu, mu), slots, exponents.q, target=mu)
        row["A_pq_lambda"] = a_vec_pq_constant((lam, lam), slots, exponents.q, target=lam)
        op = BilinearOperator.commutator(b, point.alpha, slot=1)
        extra = ()
        probe = None
        if not b.is_constant():
            explicit_q = exponents.q if config.scaling == "disabled" else None
            probe, cube = lower_bound_probe(b, point.alpha, exponents.p1, exponents.p2, explicit_q)
            mask = indicator(spec, cube)
            extra = ((mask, mask),)
        row.update({"p1": exponents.p1, "p2": exponents.p2, "probe": probe})

    row["bmo_nu"], row["bmo"] = bmo_nu, bmo
    if b.is_constant():
        row["norm_lower"] = 0.0
    else:
        estimate = norm_estimate(op, spec, exponents, mu, lam, config.budget, seed, threads=1, extra_starts=extra)
        row["norm_lower"] = estimate.value
    denominator = bmo_nu * bmo ** (point.k - 1)
    row["ratio"] = row["norm_lower"] / denominator if denominator > 0.0 else None
    logger.debug(f"point {point.index} (alpha={point.alpha}, k={point.k}, L={point.L}): norm {row['norm_lower']:.6g}")
    return row


def run_sweep(config: ExperimentConfig, seed: int | None = None, threads: int = 1) -> list[dict]:
    """One row per sweep point in lexicographic order, independent of ``threads``."""
    seed = config.seed if seed is None else seed
    points = sweep_points(config)
    logger.info(f"Sweeping {len(points)} points in {config.mode} mode with {threads} thread(s)")

    def run(point: SweepPoint) -> dict:
        try:
            return run_point(config, point, point_seed(seed, point.index))
        except Exception:
            logger.error(f"sweep point {point.index} failed: {point}")
            raise

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            rows = list(executor.map(run, points))
    else:
        rows = [run(point) for point in points]
    logger.info(f"Sweep finished: {len(rows)} rows")
    return rows


def plot_series(config: ExperimentConfig, rows: list[dict]) -> dict[tuple[float, int, int, int], list[tuple[int, float | None]]]:
    """(alpha, k, weight pair, b) -> [(L, ratio), ...] in sweep order."""
    series: dict[tuple[float, int, int, int], list[tuple[int, float | None]]] = {}
    for point, row in zip(sweep_points(config), rows):
        series.setdefault((point.alpha, point.k, point.pair, point.b), []).append((point.L, row["ratio"]))
    return series



def sweep_cells(config: ExperimentConfig) -> dict[str, CellFunction]:
    """Every generated b and weight of the sweep, keyed by export file name."""
    cells: dict[str, CellFunction] = {}
    for level in config.L:
        spec = GridSpec(config.n, level)
        for index, generator in enumerate(config.b):
            cells[f"b{index}_L{level}.csv"] = _build_b(generator, spec)
        for index, pair in enumerate(config.weights):
            mu, lam = _build_pair(pair, spec, 2.0)
            cells[f"mu{index}_L{level}.csv"] = mu.base
            cells[f"lambda{index}_L{level}.csv"] = lam.base
    return cells


# ── Contour table ────────────────────────────────────────────────────────────


@dataclass
class CauchyResult:
    rows: list[dict]
    report: dict


def _relative_error(approx: CellFunction, oracle: CellFunction) -> float:
    scale = oracle.max_abs()
    if scale == 0.0:
        return approx.max_abs()
    return (approx - oracle).max_abs() / scale


def run_cauchy(config: ExperimentConfig, seed: int | None = None) -> CauchyResult:
    """Contour vs binomial commutators for every k and M at two radii r and r/2.

    Without a configured r, each row uses min(radius rule, quadrature_radius(b, M, k - 1)).

    Uses the first alpha, b and weight pair at the finest configured L.
    """
    if config.mode != "linear":
        raise DomainError("contour experiments are defined for the linear commutator only")
    seed = config.seed if seed is None else seed
    spec = GridSpec(config.n, max(config.L))
    alpha = config.alpha[0]
    exponents = config.exponents(alpha)
    mu, lam = _build_pair(config.weights[0], spec, exponents.p)
    b = _build_b(config.b[0], spec)
    f = CellFunction(spec, np.random.default_rng(seed).normal(size=spec.cells))

    if config.contour.r is not None:
        radius = config.contour.r
    elif b.is_constant():
        radius = 1.0
    else:
        radius = cauchy_radius(b, mu, lam, exponents.p, exponents.q, config.contour.c)
    logger.info(f"Contour radius r={radius:.6g} on L={spec.L}, alpha={alpha}")

    rows = []
    for k, nodes in product(config.k, config.contour.M):
        oracle = commutator_linear(b, f, alpha, k)
        if nodes < 4 * (k - 1):
            logger.warning(f"skipping k={k}, M={nodes}: fewer than 4(k-1) nodes")
            continue
        # the radius rule is capped per node count; a configured r is used as given
        base = radius if config.contour.r is not None else min(radius, quadrature_radius(b, nodes, k - 1))
        for r in (base, base / 2.0):
            approx = cauchy_commutator(b, f, alpha, k - 1, ContourSpec(r, nodes, k - 1))
            rows.append({"k": k, "M": nodes, "r": r, "rel_err": _relative_error(approx, oracle)})

    report: dict = {"radius": radius, "L": spec.L, "alpha": alpha, "p": exponents.p, "q": exponents.q, "nodes": []}
    if not b.is_constant():
        report["nodes"] = contour_weight_report(
            b, mu, lam, exponents.p, exponents.q, radius, config.contour.samples, alpha, config.budget, seed
        )
    return CauchyResult(rows, report)
