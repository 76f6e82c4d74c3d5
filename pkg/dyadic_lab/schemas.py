"""
Experiment configuration models.

One JSON file describes an experiment: the grid, the sweep axes, the exponents, the
weight and b generators, and the estimator/contour budgets.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dyadic_lab.core.fracops import FracParams
from dyadic_lab.core.types import CellFunction, GeneratorKind, GridSpec
from dyadic_lab.core.weights import Exponents, Weight, generate
from dyadic_lab.io.cell_csv import read_cell_csv

logger = logging.getLogger(__name__)


class GeneratorSpec(BaseModel):
    """A named generator and its parameters; unused parameters are ignored by the kind."""

    model_config = ConfigDict(extra="forbid")

    kind: GeneratorKind
    beta: float = 0.0  # power_weight exponent
    x0: list[float] | float = 0.5  # power_weight singularity
    delta: float = 0.0  # exp_bmo strength
    b0: Optional["GeneratorSpec"] = None  # exp_bmo base function
    seed: int = 0  # haar_random
    packing: float = Field(default=1.0, gt=0.0, le=1.0)
    decay: float = Field(default=1.0, ge=0.0)
    value: float = 1.0  # constant
    level: int = Field(default=0, ge=0)  # haar
    index: list[int] | None = None
    signature: list[int] | None = None
    scale: float = 1.0
    path: str | None = None  # csv file written by write_cell_csv, relative to the working directory

    @model_validator(mode="after")
    def check_kind(self):
        if self.kind is GeneratorKind.EXP_BMO and self.b0 is None:
            raise ValueError("exp_bmo needs a base function b0")
        if self.kind is GeneratorKind.CSV:
            if self.path is None:
                raise ValueError("csv needs a path")
            if not Path(self.path).is_file():
                raise ValueError(f"csv source not found: {self.path}")
        return self

    def build_function(self, spec: GridSpec) -> CellFunction:
        return generate(self.kind, spec, as_weight=False, **self._params(spec))

    def build_weight(self, spec: GridSpec, p: float = 2.0) -> Weight:
        w = generate(self.kind, spec, as_weight=True, **self._params(spec))
        return Weight(w.base, p)

    def _params(self, spec: GridSpec) -> dict:
        params = self.model_dump(exclude={"kind", "b0", "index", "signature", "path"})
        params["index"] = tuple(self.index) if self.index is not None else (0,) * spec.n
        params["signature"] = tuple(self.signature) if self.signature is not None else (0,) * spec.n
        if self.b0 is not None:
            params["b0"] = self.b0.build_function(spec)
        if self.path is not None:
            params["source"] = read_cell_csv(self.path)
        return params


class WeightPair(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    mu: GeneratorSpec
    lam: GeneratorSpec = Field(alias="lambda")


class Budget(BaseModel):
    pool: int = Field(default=8, ge=1)
    iterations: int = Field(default=30, ge=0)


class ContourConfig(BaseModel):
    r: float | None = Field(default=None, gt=0.0)  # overrides the radius rule
    M: list[int] = Field(default_factory=lambda: [8, 128])
    c: float = Field(default=1.0, gt=0.0)  # constant of the radius rule
    samples: int = Field(default=8, ge=1)  # contour nodes in the weight report

    @field_validator("M", mode="before")
    @classmethod
    def promote(cls, value):
        return value if isinstance(value, list) else [value]


def _unit_pair() -> list[WeightPair]:
    unit = GeneratorSpec(kind=GeneratorKind.CONSTANT, value=1.0)
    return [WeightPair(mu=unit, lam=unit)]


def _default_b() -> list[GeneratorSpec]:
    return [GeneratorSpec(kind=GeneratorKind.HAAR_RANDOM, seed=7)]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(default=1, ge=1, le=3)
    L: list[int] = Field(default_factory=lambda: [5])
    alpha: list[float] = Field(default_factory=lambda: [0.5])
    k: list[int] = Field(default_factory=lambda: [1])
    mode: Literal["linear", "bilinear"] = "linear"
    p: float = 1.5
    q: float | None = None
    p1: float | None = None
    p2: float | None = None
    scaling: Literal["enforce", "disabled"] = "enforce"
    weights: list[WeightPair] = Field(default_factory=_unit_pair)
    b: list[GeneratorSpec] = Field(default_factory=_default_b)
    seed: int = 0
    trials: int = Field(default=25, ge=1)
    budget: Budget = Field(default_factory=Budget)
    contour: ContourConfig = Field(default_factory=ContourConfig)
    out: str = "out"
    plot_data: bool = False
    export_cells: bool = False  # sweep writes every generated b and weight under cells/

    @field_validator("L", "alpha", "k", "weights", "b", mode="before")
    @classmethod
    def promote_axis(cls, value):
        value = value if isinstance(value, list) else [value]
        if not value:
            raise ValueError("empty sweep axis")
        return value

    @field_validator("L")
    @classmethod
    def check_levels(cls, value: list[int]) -> list[int]:
        if any(level < 2 for level in value):
            raise ValueError("L must be >= 2 for commutator suites")
        return value

    @field_validator("k")
    @classmethod
    def check_orders(cls, value: list[int]) -> list[int]:
        if any(order < 1 for order in value):
            raise ValueError("commutator order k must be >= 1")
        return value

    @model_validator(mode="after")
    def check_exponents(self):
        if self.scaling == "disabled" and self.q is None:
            raise ValueError("scaling 'disabled' needs an explicit q")
        if self.mode == "bilinear":
            if self.p1 is None or self.p2 is None:
                raise ValueError("bilinear mode needs p1 and p2")
            if self.k != [1]:
                raise ValueError("bilinear commutators are first order: k must be [1]")
        for alpha in self.alpha:
            FracParams(alpha, self.n, bilinear=self.mode == "bilinear")
            self.exponents(alpha)
        return self

    def exponents(self, alpha: float) -> Exponents:
        if self.mode == "linear":
            if self.scaling == "enforce":
                return Exponents.linear(self.p, alpha, self.n)
            return Exponents(self.p, self.q)
        if self.scaling == "enforce":
            return Exponents.bilinear(self.p1, self.p2, alpha, self.n)
        return Exponents(1.0 / (1.0 / self.p1 + 1.0 / self.p2), self.q, self.p1, self.p2)

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json", by_alias=True, exclude={"out"}), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


GeneratorSpec.model_rebuild()
