"""Experiment configuration validation."""

import pytest
from pydantic import ValidationError

from dyadic_lab.core.types import GeneratorKind, GridSpec
from dyadic_lab.core.weights import Weight
from dyadic_lab.schemas import ExperimentConfig, GeneratorSpec


def test_scalars_are_promoted_to_axes():
    config = ExperimentConfig.model_validate({"L": 4, "alpha": 0.25, "k": 2, "b": {"kind": "constant"}})
    assert config.L == [4]
    assert config.alpha == [0.25]
    assert config.k == [2]
    assert len(config.b) == 1


def test_small_resolution_rejected():
    with pytest.raises(ValidationError, match="L must be >= 2 for commutator suites"):
        ExperimentConfig.model_validate({"L": 0})


def test_empty_axis_rejected():
    with pytest.raises(ValidationError, match="empty sweep axis"):
        ExperimentConfig.model_validate({"alpha": []})


def test_scaling_law_checked_for_every_alpha():
    with pytest.raises(ValidationError, match="scaling law"):
        ExperimentConfig.model_validate({"p": 2.0, "alpha": [0.25, 0.75]})
    with pytest.raises(ValidationError, match="fractional order"):
        ExperimentConfig.model_validate({"alpha": 1.0})


def test_disabled_scaling_needs_q():
    with pytest.raises(ValidationError, match="explicit q"):
        ExperimentConfig.model_validate({"scaling": "disabled"})
    config = ExperimentConfig.model_validate({"scaling": "disabled", "q": 2.0, "p": 2.0})
    assert config.exponents(0.5).q == 2.0


def test_bilinear_mode_requirements():
    with pytest.raises(ValidationError, match="p1 and p2"):
        ExperimentConfig.model_validate({"mode": "bilinear"})
    with pytest.raises(ValidationError, match="first order"):
        ExperimentConfig.model_validate({"mode": "bilinear", "p1": 4.0, "p2": 4.0, "alpha": 0.25, "k": [1, 2]})
    config = ExperimentConfig.model_validate({"mode": "bilinear", "p1": 4.0, "p2": 4.0, "alpha": 0.25})
    exponents = config.exponents(0.25)
    assert (exponents.p, exponents.q) == pytest.approx((2.0, 4.0))


def test_unknown_fields_rejected():
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate({"levels": 4})
    with pytest.raises(ValidationError):
        GeneratorSpec.model_validate({"kind": "haar_random", "sigma": 2})


def test_exp_bmo_needs_base():
    with pytest.raises(ValidationError, match="b0"):
        GeneratorSpec(kind=GeneratorKind.EXP_BMO, delta=0.2)


def test_weight_pair_alias_and_builders():
    config = ExperimentConfig.model_validate(
        {
            "weights": [
                {
                    "mu": {"kind": "exp_bmo", "delta": 0.2, "b0": {"kind": "haar_random", "seed": 11}},
                    "lambda": {"kind": "power_weight", "beta": 0.3, "x0": 0.25},
                }
            ]
        }
    )
    spec = GridSpec(1, 4)
    pair = config.weights[0]
    mu, lam = pair.mu.build_weight(spec, 1.5), pair.lam.build_weight(spec, 1.5)
    assert isinstance(mu, Weight) and isinstance(lam, Weight)
    assert mu.p == 1.5
    dumped = config.model_dump(by_alias=True)
    assert "lambda" in dumped["weights"][0]


def test_haar_generator_builds_function():
    spec = GridSpec(2, 2)
    h = GeneratorSpec(kind="haar", level=1, index=[1, 0], signature=[0, 1]).build_function(spec)
    assert h.inner(h) == pytest.approx(1.0)


def test_config_hash_is_stable_and_ignores_output_directory():
    first = ExperimentConfig.model_validate({"L": [4, 5], "out": "a"})
    second = ExperimentConfig.model_validate({"L": [4, 5], "out": "b"})
    third = ExperimentConfig.model_validate({"L": [4, 6]})
    assert first.config_hash() == second.config_hash()
    assert first.config_hash() != third.config_hash()
    assert len(first.config_hash()) == 16
