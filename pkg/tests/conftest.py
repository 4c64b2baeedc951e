"""Shared builders for the test suite."""

import pytest

from bop2te import DesignSpec, Look, StoppingBoundaries


def standard_schedule():
    """Toxicity checks at 9/18/36, efficacy checks at 18/36."""
    return (Look(9, check_efficacy=False), Look(18), Look(36))


def make_spec(eta_e, eta_e_null, eta_t, eta_t_null,
              alpha_targets=(0.025, 0.10, 0.10), **kwargs):
    return DesignSpec(
        eta_e=eta_e,
        eta_e_null=eta_e_null,
        eta_t=eta_t,
        eta_t_null=eta_t_null,
        alpha_targets=alpha_targets,
        schedule=kwargs.pop("schedule", standard_schedule()),
        **kwargs,
    )


@pytest.fixture
def spec4():
    """The workhorse design: rates (0.60, 0.30) efficacy, (0.20, 0.40) toxicity."""
    return make_spec(0.60, 0.30, 0.20, 0.40)


@pytest.fixture
def boundaries4():
    """Optimal boundaries for spec4, cross-validated in test_search."""
    return StoppingBoundaries(efficacy=(5, 14), toxicity=(4, 7, 11))


@pytest.fixture
def store_path(tmp_path):
    return str(tmp_path / "store.jsonl")
