"""Service Layer Package"""

from dyadic_lab.services.estimator import NormEstimate, norm_estimate, lower_bound_probe
from dyadic_lab.services.contour import ContourSpec, cauchy_commutator, cauchy_radius
from dyadic_lab.services.verify_service import VerifyReport, run_verify
from dyadic_lab.services.experiment_service import run_sweep, run_cauchy

__all__ = [
    "NormEstimate",
    "norm_estimate",
    "lower_bound_probe",
    "ContourSpec",
    "cauchy_commutator",
    "cauchy_radius",
    "VerifyReport",
    "run_verify",
    "run_sweep",
    "run_cauchy",
]
