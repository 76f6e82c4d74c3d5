"""
Dyadic geometry of the unit cube: ancestry, Haar evaluation, the Haar product rule,
and the array plumbing (child splitting, upsampling, block reductions) every
multiscale operator is built on.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from dyadic_lab.core.types import (
    CubeId,
    DomainError,
    HaarSignature,
    all_signatures,
    cancellative_signatures,
)

logger = logging.getLogger(__name__)

PRODUCT_SCALE_EXPONENT = -0.5  # h^eps_Q h^eta_Q = |Q|^{-1/2} h^{eps+eta}_Q


def ancestor(q: CubeId, k: int) -> CubeId:
    """The unique level-(l-k) cube containing q."""
    if k < 0:
        raise DomainError(f"ancestor order must be non-negative, got k={k}")
    if k > q.level:
        raise DomainError(f"no such ancestor inside the top cube: k={k} > level {q.level}")
    return CubeId(q.level - k, tuple(i >> k for i in q.index))


def contains(outer: CubeId, inner: CubeId) -> bool:
    """True when inner is a subset of outer."""
    if outer.n != inner.n:
        raise DomainError("cubes of different dimension")
    if inner.level < outer.level:
        return False
    return ancestor(inner, inner.level - outer.level) == outer


def intersect_measure(q1: CubeId, q2: CubeId) -> float:
    """|q1 cap q2|: dyadic cubes are nested or disjoint."""
    if contains(q1, q2):
        return q2.measure
    if contains(q2, q1):
        return q1.measure
    return 0.0


def cube_of_point(x: Sequence[float], level: int) -> CubeId:
    """Level-l cube containing x, with the left-closed boundary convention."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0.0) or np.any(x >= 1.0):
        raise DomainError(f"point {tuple(x)} lies outside the unit cube")
    return CubeId(level, tuple(int(np.floor(xi * 2**level)) for xi in x))


def haar_eval(q: CubeId, signature: HaarSignature, x: Sequence[float]) -> float:
    """h_Q^eps(x): tensor product of 1-D profiles, zero outside q."""
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.size != q.n or signature.n != q.n:
        raise DomainError("point, cube and signature must share the dimension")
    child = cube_of_point(point, q.level + 1)
    if ancestor(child, 1) != q:
        return 0.0
    sign = 1.0
    for bit, k_child in zip(signature.bits, child.index):
        if bit == 0 and k_child % 2 == 1:
            sign = -sign
    return sign * q.measure ** PRODUCT_SCALE_EXPONENT


def haar_product(eps: HaarSignature, eta: HaarSignature) -> tuple[float, HaarSignature]:
    """Exponent of |Q| and the combined signature of h_Q^eps h_Q^eta."""
    return PRODUCT_SCALE_EXPONENT, eps.combine(eta)


def child_sign(signature: HaarSignature, child_bits: Sequence[int]) -> float:
    """Sign of h^eps_Q on the child of Q with position bits child_bits."""
    return float(np.prod([-1.0 if (b == 0 and c == 1) else 1.0 for b, c in zip(signature.bits, child_bits)]))


@lru_cache(maxsize=None)
def sign_matrix(n: int, include_constant: bool = False) -> np.ndarray:
    """Rows: children in product order; columns: signatures (cancellative, optionally all)."""
    sigs = all_signatures(n) if include_constant else cancellative_signatures(n)
    children = all_signatures(n)  # child positions share the bit-vector enumeration
    matrix = np.array([[child_sign(sig, child.bits) for sig in sigs] for child in children])
    matrix.flags.writeable = False
    return matrix


# ── Array plumbing ──────────────────────────────────────────────────────────


def split_children(a: np.ndarray, n: int) -> np.ndarray:
    """(2m,)*n -> (m,)*n + (2^n,), children flattened in product order."""
    m = a.shape[0] // 2
    interleaved = a.reshape(sum(((m, 2) for _ in range(n)), ()))
    order = tuple(range(0, 2 * n, 2)) + tuple(range(1, 2 * n, 2))
    return interleaved.transpose(order).reshape((m,) * n + (2**n,))


def merge_children(a: np.ndarray, n: int) -> np.ndarray:
    """Inverse of split_children."""
    m = a.shape[0]
    nested = a.reshape((m,) * n + (2,) * n)
    order = tuple(axis for i in range(n) for axis in (i, n + i))
    return nested.transpose(order).reshape((2 * m,) * n)


def upsample(a: np.ndarray, n: int, times: int = 1) -> np.ndarray:
    """Repeat every entry over its 2^times-fold descendants along each axis."""
    if times == 0:
        return a
    for axis in range(n):
        a = np.repeat(a, 2**times, axis=axis)
    return a


def block_reduce(a: np.ndarray, n: int, times: int, reducer: Callable = np.sum) -> np.ndarray:
    """Reduce 2^times-wide blocks along every axis (sum, mean, max ...)."""
    if times == 0:
        return a
    m = a.shape[0] // 2**times
    blocks = a.reshape(sum(((m, 2**times) for _ in range(n)), ()))
    return reducer(blocks, axis=tuple(range(1, 2 * n, 2)))
