from dyadic_lab.core.types import (
    DomainError,
    ShiftMode,
    BloomFlavor,
    BilinearParaproduct,
    GeneratorKind,
    GridSpec,
    CubeId,
    HaarSignature,
    CellFunction,
    HaarCoeffs,
)
from dyadic_lab.core.multiscale import analyze, synthesize, cube_average, coarsen, indicator, haar_function
from dyadic_lab.core.fracops import FracParams, c_alpha, frac_integral, bifrac_integral
from dyadic_lab.core.paraproducts import (
    LinearDecomposition,
    BilinearDecomposition,
    commutator_linear,
    commutator_bilinear,
    decompose_linear,
    decompose_bilinear,
    bilinear_paraproduct,
)
from dyadic_lab.core.weights import Weight, Exponents

__all__ = [
    "DomainError",
    "ShiftMode",
    "BloomFlavor",
    "BilinearParaproduct",
    "GeneratorKind",
    "GridSpec",
    "CubeId",
    "HaarSignature",
    "CellFunction",
    "HaarCoeffs",
    "analyze",
    "synthesize",
    "cube_average",
    "coarsen",
    "indicator",
    "haar_function",
    "FracParams",
    "c_alpha",
    "frac_integral",
    "bifrac_integral",
    "LinearDecomposition",
    "BilinearDecomposition",
    "commutator_linear",
    "commutator_bilinear",
    "decompose_linear",
    "decompose_bilinear",
    "bilinear_paraproduct",
    "Weight",
    "Exponents",
]
