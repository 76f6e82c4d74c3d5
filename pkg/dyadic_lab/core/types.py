from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import product

import numpy as np


class DomainError(ValueError):
    """Raised when an operation is called outside its mathematical domain."""


class ShiftMode(str, Enum):
    B_FIRST = "b_first"  # B_k(b, f): b carries the fine cube
    F_FIRST = "f_first"  # B_k(f, b): roles exchanged


class BloomFlavor(str, Enum):
    RATIO = "ratio"  # mu / lambda, used with A_{p,q} hypotheses
    P_ROOT = "p_root"  # (mu / lambda)^{1/p}, used with A_p hypotheses


class BilinearParaproduct(str, Enum):
    LAMBDA = "lambda"
    DELTA = "delta"
    XI = "xi"
    THETA = "theta"


class GeneratorKind(str, Enum):
    POWER_WEIGHT = "power_weight"
    EXP_BMO = "exp_bmo"
    HAAR_RANDOM = "haar_random"
    CONSTANT = "constant"
    HAAR = "haar"
    CSV = "csv"


@dataclass(frozen=True)
class GridSpec:
    """Resolution-L dyadic grid on the unit cube [0,1)^n."""

    n: int
    L: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"dimension must be positive, got n={self.n}")
        if self.L < 0:
            raise DomainError(f"resolution level must be non-negative, got L={self.L}")

    @property
    def side(self) -> int:
        return 2**self.L

    @property
    def cells(self) -> int:
        return 2 ** (self.n * self.L)

    @property
    def cell_volume(self) -> float:
        return 2.0 ** (-self.n * self.L)

    def shape(self, level: int | None = None) -> tuple[int, ...]:
        level = self.L if level is None else level
        return (2**level,) * self.n


@dataclass(frozen=True)
class CubeId:
    """Dyadic cube prod_i [k_i 2^-l, (k_i+1) 2^-l)."""

    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(int(k) for k in self.index))
        if self.level < 0:
            raise DomainError(f"cube level must be non-negative, got {self.level}")
        if any(k < 0 or k >= 2**self.level for k in self.index):
            raise DomainError(f"cube index {self.index} out of range at level {self.level}")

    @classmethod
    def top(cls, n: int) -> CubeId:
        return cls(0, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.index)

    @property
    def measure(self) -> float:
        return 2.0 ** (-self.n * self.level)

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    def children(self) -> list[CubeId]:
        return [
            CubeId(self.level + 1, tuple(2 * k + c for k, c in zip(self.index, bits)))
            for bits in product((0, 1), repeat=self.n)
        ]

    def slices(self, spec: GridSpec) -> tuple[slice, ...]:
        """Cell-index slices of this cube inside a grid of resolution spec.L."""
        if self.level > spec.L:
            raise DomainError(f"cube level {self.level} is finer than resolution L={spec.L}")
        width = 2 ** (spec.L - self.level)
        return tuple(slice(k * width, (k + 1) * width) for k in self.index)


@dataclass(frozen=True)
class HaarSignature:
    """Bit vector eps in {0,1}^n; eps_i = 0 is the oscillating 1-D profile."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise DomainError(f"signature bits must be 0 or 1, got {self.bits}")

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def cancellative(self) -> bool:
        return any(b == 0 for b in self.bits)

    def combine(self, other: HaarSignature) -> HaarSignature:
        """eps + eta: bit i is 1 exactly when the two signatures agree there."""
        if self.n != other.n:
            raise DomainError("signatures of different dimension")
        return HaarSignature(tuple(int(a == b) for a, b in zip(self.bits, other.bits)))


@lru_cache(maxsize=None)
def all_signatures(n: int) -> tuple[HaarSignature, ...]:
    """All 2^n signatures in product order; the all-ones signature is last."""
    return tuple(HaarSignature(bits) for bits in product((0, 1), repeat=n))


@lru_cache(maxsize=None)
def cancellative_signatures(n: int) -> tuple[HaarSignature, ...]:
    return all_signatures(n)[:-1]


def signature_slot(signature: HaarSignature) -> int:
    """Position of a cancellative signature inside a coefficient slab."""
    if not signature.cancellative:
        raise DomainError(f"signature {signature.bits} is not cancellative")
    return cancellative_signatures(signature.n).index(signature)


@dataclass(frozen=True)
class CellFunction:
    """Real function constant on the resolution-L cells, stored row-major."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size != self.spec.cells:
            raise DomainError(f"expected {self.spec.cells} cell values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DomainError("cell values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, spec: GridSpec) -> CellFunction:
        return cls(spec, np.zeros(spec.cells))

    @classmethod
    def constant(cls, spec: GridSpec, value: float) -> CellFunction:
        return cls(spec, np.full(spec.cells, float(value)))

    @classmethod
    def from_grid(cls, spec: GridSpec, grid: np.ndarray) -> CellFunction:
        return cls(spec, np.asarray(grid).reshape(-1))

    @property
    def grid(self) -> np.ndarray:
        return self.values.reshape(self.spec.shape())

    def _other(self, other) -> np.ndarray | float:
        if isinstance(other, CellFunction):
            if other.spec != self.spec:
                raise DomainError(f"grid mismatch: {self.spec} vs {other.spec}")
            return other.values
        return float(other)

    def __add__(self, other) -> CellFunction:
        return CellFunction(self.spec, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other) -> CellFunction:
        return CellFunction(self.spec, self.values - self._other(other))

    def __rsub__(self, other) -> CellFunction:
        return CellFunction(self.spec, self._other(other) - self.values)

    def __mul__(self, other) -> CellFunction:
        return CellFunction(self.spec, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> CellFunction:
        return CellFunction(self.spec, self.values / self._other(other))

    def __neg__(self) -> CellFunction:
        return CellFunction(self.spec, -self.values)

    def __abs__(self) -> CellFunction:
        return CellFunction(self.spec, np.abs(self.values))

    def inner(self, other: CellFunction) -> float:
        """Discrete L^2 pairing: sum over cells of f*g*|cell|."""
        return float(np.dot(self.values, self._other(other)) * self.spec.cell_volume)

    def integral(self) -> float:
        return float(np.sum(self.values) * self.spec.cell_volume)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_constant(self) -> bool:
        return bool(np.ptp(self.values) == 0.0)


@dataclass(frozen=True)
class HaarCoeffs:
    """Haar coefficients of a CellFunction.

    ``levels[l]`` has shape ``(2^n - 1,) + (2^l,) * n``: one slab per cancellative
    signature in ``cancellative_signatures(n)`` order, indexed by cube position.
    ``mean`` is the coefficient of the top non-cancellative function.
    """

    spec: GridSpec
    mean: float
    levels: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        if len(self.levels) != self.spec.L:
            raise DomainError(f"expected {self.spec.L} coefficient levels, got {len(self.levels)}")

    def _slot(self, cube: CubeId, signature: HaarSignature) -> tuple[int, tuple[int, ...]]:
        if cube.level >= self.spec.L:
            raise DomainError(f"no Haar coefficients at level {cube.level} for L={self.spec.L}")
        return signature_slot(signature), cube.index

    def get(self, cube: CubeId, signature: HaarSignature) -> float:
        slot, index = self._slot(cube, signature)
        return float(self.levels[cube.level][(slot, *index)])

    def items(self):
        """Sparse view: ((CubeId, HaarSignature), value) for every non-zero coefficient."""
        sigs = cancellative_signatures(self.spec.n)
        for level, slab in enumerate(self.levels):
            for position in zip(*np.nonzero(slab)):
                slot, index = int(position[0]), tuple(int(k) for k in position[1:])
                yield (CubeId(level, index), sigs[slot]), float(slab[position])

    def energy(self) -> float:
        return float(sum(np.sum(slab**2) for slab in self.levels))

    @classmethod
    def from_mapping(cls, spec: GridSpec, mean: float, mapping: dict) -> HaarCoeffs:
        slots = 2**spec.n - 1
        levels = [np.zeros((slots,) + spec.shape(level)) for level in range(spec.L)]
        for (cube, signature), value in mapping.items():
            if cube.level >= spec.L:
                raise DomainError(f"no Haar coefficients at level {cube.level} for L={spec.L}")
            levels[cube.level][(signature_slot(signature), *cube.index)] = value
        return cls(spec, float(mean), tuple(levels))
