"""
Higher-order commutators through the Cauchy integral of the conjugated family
F(z) = e^{bz} [b, I_alpha] e^{-bz}, whose k-th derivative at 0 is C_b^{k+1}(I_alpha).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from math import factorial, lgamma, log

import numpy as np

from dyadic_lab.core.paraproducts import commutator_linear
from dyadic_lab.core.types import CellFunction, DomainError
from dyadic_lab.core.weights import (
    Exponents,
    Weight,
    a_infty_pair,
    a_pq_constant,
    bmo_weighted,
)
from dyadic_lab.schemas import Budget
from dyadic_lab.services.estimator import LinearOperator, norm_estimate

logger = logging.getLogger(__name__)

QUADRATURE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class ContourSpec:
    """Trapezoidal rule with `nodes` points on |z| = radius for a derivative of order `order`."""

    radius: float
    nodes: int = 128
    order: int = 0

    def __post_init__(self):
        if self.radius <= 0.0:
            raise DomainError(f"contour radius must be positive, got r={self.radius}")
        if self.order < 0:
            raise DomainError(f"derivative order must be non-negative, got k={self.order}")
        if self.nodes < 1 or self.nodes & (self.nodes - 1):
            raise DomainError(f"quadrature node count must be a power of two, got M={self.nodes}")
        if self.nodes < 4 * self.order:
            raise DomainError(f"insufficient quadrature nodes: M={self.nodes} < 4k={4 * self.order}")

    def points(self) -> np.ndarray:
        return self.radius * np.exp(2j * np.pi * np.arange(self.nodes) / self.nodes)


def cauchy_radius(
    b: CellFunction, mu: Weight | None, lam: Weight | None, p: float, q: float, c: float = 1.0
) -> float:
    """c / (||b||_BMO max((mu^q)_{A_q0}, (lam^q)_{A_q0})), q0 = 1 + q/p'."""
    if b.is_constant():
        raise DomainError("radius is unbounded for a constant b")
    q0 = Exponents(p, q).q0
    spread = [a_infty_pair(w.power(q), q0) for w in (mu, lam) if w is not None]
    return c / (bmo_weighted(b) * max(spread, default=1.0))


def quadrature_radius(b: CellFunction, nodes: int, order: int, tolerance: float = QUADRATURE_TOLERANCE) -> float:
    """Largest r with (osc(b) r)^M order!/(order + M)! <= tolerance.

    The Taylor coefficients of F are bounded by osc(b)^j / j!, so this caps the aliasing of
    the M-point rule. Infinite for a constant b.
    """
    spread = float(b.values.max() - b.values.min())
    if spread == 0.0:
        return float("inf")
    exponent = (log(tolerance) + lgamma(order + nodes + 1) - lgamma(order + 1)) / nodes
    return float(np.exp(exponent)) / spread


def cauchy_commutator(
    b: CellFunction, f: CellFunction, alpha: float, k: int, contour: ContourSpec | None = None
) -> CellFunction:
    """C_b^{k+1}(I_alpha) f = k!/M sum_m F(z_m) z_m^{-k}, with F(z) = e^{bz} T(e^{-bz} f)."""
    if contour is None:
        radius = cauchy_radius(b, None, None, 2.0, 2.0) if not b.is_constant() else 1.0
        contour = ContourSpec(min(radius, quadrature_radius(b, 128, k)), 128, k)
    elif contour.order != k:
        contour = ContourSpec(contour.radius, contour.nodes, k)
    spec = f.spec

    def apply(values: np.ndarray) -> np.ndarray:
        return commutator_linear(b, CellFunction(spec, values), alpha, 1).values

    total = np.zeros(spec.cells, dtype=complex)
    for z in contour.points():
        conjugated = np.exp(-b.values * z) * f.values
        image = apply(conjugated.real) + 1j * apply(conjugated.imag)
        total += np.exp(b.values * z) * image * z ** (-k)
    return CellFunction(spec, (factorial(k) / contour.nodes * total).real)


def contour_weight_report(
    b: CellFunction,
    mu: Weight,
    lam: Weight,
    p: float,
    q: float,
    radius: float,
    samples: int = 8,
    alpha: float | None = None,
    budget: Budget | None = None,
    seed: int = 0,
) -> list[dict]:
    """[e^{Re(bz)} w]_{A_{p,q}} / [w]_{A_{p,q}} on sampled contour nodes, with the k = 1 norm there.

    Measured only: the constants relating both sides are left open.
    """
    base_mu, base_lam = a_pq_constant(mu, p, q), a_pq_constant(lam, p, q)
    exponents = Exponents(p, q)
    rows = []
    for index, z in enumerate(radius * np.exp(2j * np.pi * np.arange(samples) / samples)):
        factor = np.exp(b.values * z.real)
        moved_mu = Weight(CellFunction(b.spec, factor * mu.values), p)
        moved_lam = Weight(CellFunction(b.spec, factor * lam.values), p)
        row = {
            "node": index,
            "z_real": float(z.real),
            "z_imag": float(z.imag),
            "mu_ratio": a_pq_constant(moved_mu, p, q) / base_mu,
            "lambda_ratio": a_pq_constant(moved_lam, p, q) / base_lam,
        }
        if alpha is not None:
            estimate = norm_estimate(
                LinearOperator.commutator(b, alpha, 1), b.spec, exponents, moved_mu, moved_lam, budget, seed
            )
            row["norm_k1"] = estimate.value
        rows.append(row)
    logger.debug(f"contour weight report over {samples} nodes at r={radius:.6g}")
    return rows
