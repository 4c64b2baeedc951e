"""Design specification, cutoff functions, boundary derivation, decisions.

derive_boundaries is checked against a deliberately slow oracle that scans
every count with scipy.stats.beta posterior tails and applies the same
monotone repair, sharing no code with the engine's vectorized path.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from bop2te import (
    CutoffParameters,
    DesignSpec,
    Look,
    PriorHyperparameters,
    StoppingBoundaries,
    TrialData,
    ValidationError,
    cutoff_efficacy,
    cutoff_toxicity,
    derive_boundaries,
    interim_decision,
)
from conftest import make_spec, standard_schedule

TIE = 1e-12


def oracle_boundaries(spec, q):
    """Reference boundary derivation: per-count scipy tails, then repair."""
    total = spec.prior_hyperparameters.total
    tau_e = spec.prior_hyperparameters.tau_e
    tau_t = spec.prior_hyperparameters.tau_t
    n_max = spec.n_max
    eff = []
    for look in spec.efficacy_looks():
        n = look.n
        ce = q.lambda_e * (n / n_max) ** q.gamma
        best = -1
        for x in range(n + 1):
            tail = stats.beta.sf(spec.eta_e_null, tau_e + x, n + total - tau_e - x)
            if tail <= ce + TIE:
                best = x
        eff.append(best)
    tox = []
    for look in spec.toxicity_looks():
        n = look.n
        ct = q.lambda_t * (n / n_max) ** (q.gamma / spec.attenuation)
        first = n + 1
        for x in range(n + 1):
            prob_safe = stats.beta.cdf(spec.eta_t_null, tau_t + x, n + total - tau_t - x)
            if prob_safe <= ct + TIE:
                first = x
                break
        tox.append(first)
    eff = np.maximum.accumulate(eff).tolist()
    tox = np.maximum.accumulate(tox).tolist()
    return tuple(eff), tuple(tox)


class TestLookAndSpecValidation:
    def test_look_must_check_something(self):
        with pytest.raises(ValidationError):
            Look(9, check_efficacy=False, check_toxicity=False)

    def test_schedule_strictly_increasing(self):
        with pytest.raises(ValidationError):
            make_spec(0.6, 0.3, 0.2, 0.4, schedule=(Look(18), Look(18), Look(36)))

    def test_final_look_checks_both(self):
        with pytest.raises(ValidationError):
            make_spec(0.6, 0.3, 0.2, 0.4,
                      schedule=(Look(18), Look(36, check_toxicity=False)))

    def test_rate_ordering_enforced(self):
        with pytest.raises(ValidationError) as err:
            make_spec(0.3, 0.6, 0.2, 0.4)
        assert "eta" in str(err.value)
        with pytest.raises(ValidationError):
            make_spec(0.6, 0.3, 0.4, 0.2)

    def test_alpha_targets_in_unit_interval(self):
        with pytest.raises(ValidationError) as err:
            make_spec(0.6, 0.3, 0.2, 0.4, alpha_targets=(1.5, 0.1, 0.1))
        assert "alpha_targets" in str(err.value)

    def test_prior_conventions(self):
        spec = make_spec(0.6, 0.3, 0.2, 0.4)
        assert spec.prior == "reference"
        ref = spec.prior_hyperparameters
        assert ref.tau_e == pytest.approx(0.5)
        assert ref.tau_t == pytest.approx(0.2)
        null = make_spec(0.6, 0.3, 0.2, 0.4, prior="null-centered").prior_hyperparameters
        assert null.tau_e == pytest.approx(0.3)
        assert null.tau_t == pytest.approx(0.4)
        alt = make_spec(0.6, 0.3, 0.2, 0.4, prior="alternative-centered").prior_hyperparameters
        assert alt.tau_e == pytest.approx(0.6)
        assert alt.tau_t == pytest.approx(0.2)
        explicit = PriorHyperparameters((0.1, 0.2, 0.3, 0.4))
        assert make_spec(0.6, 0.3, 0.2, 0.4, prior=explicit).prior_hyperparameters is explicit
        with pytest.raises(ValidationError):
            make_spec(0.6, 0.3, 0.2, 0.4, prior="flat-ish")

    def test_hypothesis_corners(self, spec4):
        assert spec4.hypothesis("h00").pi_e == pytest.approx(0.30)
        assert spec4.hypothesis("h00").pi_t == pytest.approx(0.40)
        assert spec4.hypothesis("h01").pi_t == pytest.approx(0.20)
        assert spec4.hypothesis("h10").pi_e == pytest.approx(0.60)
        h11 = spec4.hypothesis("h11")
        assert (h11.pi_e, h11.pi_t) == (0.60, 0.20)
        # independence corner under the default design odds ratio
        assert h11.pi_et == pytest.approx(0.12)
        with pytest.raises(ValidationError):
            spec4.hypothesis("h22")

    def test_design_phi_shifts_corners(self):
        spec = make_spec(0.6, 0.3, 0.2, 0.4, design_phi=3.0)
        assert spec.hypothesis("h11").phi().value == pytest.approx(3.0, rel=1e-9)


class TestCutoffFunctions:
    def test_efficacy_power_form(self):
        assert cutoff_efficacy(9, 36, 0.8, 1.0) == pytest.approx(0.2)
        assert cutoff_efficacy(36, 36, 0.77, 2.5) == pytest.approx(0.77)

    def test_toxicity_attenuated_exponent(self):
        got = cutoff_toxicity(9, 36, 0.8, 0.9, attenuation=3.0)
        assert got == pytest.approx(0.8 * 0.25 ** 0.3, rel=1e-14)

    def test_attenuation_relaxes_early_cutoff_growth(self):
        plain = cutoff_toxicity(9, 36, 0.8, 0.9, attenuation=1.0)
        attenuated = cutoff_toxicity(9, 36, 0.8, 0.9, attenuation=3.0)
        assert attenuated > plain

    def test_cutoff_parameter_ranges(self):
        with pytest.raises(ValidationError):
            CutoffParameters(1.2, 0.5, 1.0)
        with pytest.raises(ValidationError):
            CutoffParameters(0.5, -0.1, 1.0)


class TestDeriveBoundaries:
    def test_matches_scipy_scan_oracle(self, spec4):
        qs = [
            CutoffParameters(0.7, 0.7, 1.0),
            CutoffParameters(0.95, 0.85, 0.4150374992788437),
            CutoffParameters(0.55, 0.98, 0.0),
        ]
        for q in qs:
            b = derive_boundaries(spec4, q)
            eff, tox = oracle_boundaries(spec4, q)
            assert b.efficacy == eff
            assert b.toxicity == tox

    @settings(max_examples=40, deadline=None)
    @given(
        lam_e=st.floats(min_value=0.5, max_value=0.99),
        lam_t=st.floats(min_value=0.5, max_value=0.99),
        gamma=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_matches_oracle_across_cutoffs(self, lam_e, lam_t, gamma):
        spec = make_spec(0.5, 0.2, 0.1, 0.3)
        q = CutoffParameters(lam_e, lam_t, gamma)
        b = derive_boundaries(spec, q)
        eff, tox = oracle_boundaries(spec, q)
        assert b.efficacy == eff
        assert b.toxicity == tox

    def test_zero_cutoffs_stop_only_at_negligible_posteriors(self, spec4):
        # Zero cutoffs disable stopping except where the posterior tail is
        # itself within the tie tolerance of zero (x_t=35 of 36 here).
        b = derive_boundaries(spec4, CutoffParameters(0.0, 0.0, 1.0))
        assert b.efficacy == (-1, -1)
        assert b.toxicity == (10, 19, 35)
        assert b == StoppingBoundaries(*oracle_boundaries(spec4, CutoffParameters(0.0, 0.0, 1.0)))

    def test_gamma_validated_to_unit_interval(self):
        with pytest.raises(ValidationError):
            CutoffParameters(0.7, 0.7, 2.0)

    def test_boundaries_monotone_nondecreasing(self, spec4):
        for lam in (0.6, 0.8, 0.95):
            b = derive_boundaries(spec4, CutoffParameters(lam, lam, 1.0))
            assert all(x <= y for x, y in zip(b.efficacy, b.efficacy[1:]))
            assert all(x <= y for x, y in zip(b.toxicity, b.toxicity[1:]))

    def test_tie_handling_is_deterministic(self, spec4):
        q = CutoffParameters(0.9, 0.9, 1.0)
        assert derive_boundaries(spec4, q) == derive_boundaries(spec4, q)


class TestStoppingBoundariesValidation:
    def test_length_must_match_active_looks(self, spec4):
        with pytest.raises(ValidationError):
            StoppingBoundaries((5,), (4, 7, 11)).validate_against(spec4)
        with pytest.raises(ValidationError):
            StoppingBoundaries((5, 14), (4, 7)).validate_against(spec4)

    def test_value_ranges(self, spec4):
        with pytest.raises(ValidationError):
            StoppingBoundaries((5, 37), (4, 7, 11)).validate_against(spec4)
        with pytest.raises(ValidationError):
            StoppingBoundaries((5, 14), (0, 7, 11)).validate_against(spec4)
        with pytest.raises(ValidationError):
            StoppingBoundaries((14, 5), (4, 7, 11))

    def test_sentinels_accepted(self, spec4):
        StoppingBoundaries((-1, -1), (10, 19, 37)).validate_against(spec4)


class TestTrialData:
    def test_margins_fill_maximal_overlap(self):
        data = TrialData.from_margins(5, 3, 4)
        assert data.x == (3, 0, 1, 1)
        assert data.x_e == 3
        assert data.x_t == 4

    def test_counts_must_sum(self):
        with pytest.raises(ValidationError):
            TrialData(5, (1, 1, 1, 1))

    def test_margins_must_fit(self):
        with pytest.raises(ValidationError):
            TrialData.from_margins(5, 6, 0)
        with pytest.raises(ValidationError):
            TrialData.from_margins(5, -1, 0)


class TestInterimDecision:
    def test_go_when_both_clear(self, spec4, boundaries4):
        d = interim_decision(spec4, boundaries4, TrialData.from_margins(18, 6, 5))
        assert d.decision == "go"
        assert d.reasons == ()
        assert d.boundary_efficacy == 5
        assert d.boundary_toxicity == 7

    def test_futility_at_boundary_count(self, spec4, boundaries4):
        d = interim_decision(spec4, boundaries4, TrialData.from_margins(18, 5, 5))
        assert d.decision == "no-go"
        assert d.reasons == ("futility",)

    def test_toxicity_only_look_ignores_responses(self, spec4, boundaries4):
        d = interim_decision(spec4, boundaries4, TrialData.from_margins(9, 0, 3))
        assert d.decision == "go"
        assert d.boundary_efficacy is None
        d2 = interim_decision(spec4, boundaries4, TrialData.from_margins(9, 0, 4))
        assert d2.decision == "no-go"
        assert d2.reasons == ("toxicity",)

    def test_both_reasons_reported(self, spec4, boundaries4):
        d = interim_decision(spec4, boundaries4, TrialData.from_margins(36, 14, 12))
        assert d.decision == "no-go"
        assert d.reasons == ("futility", "toxicity")

    def test_posterior_probabilities_attached_with_cutoffs(self, spec4, boundaries4):
        q = CutoffParameters(0.9, 0.9, 1.0)
        d = interim_decision(spec4, boundaries4, TrialData.from_margins(18, 6, 5), q)
        assert d.posterior_prob_efficacy is not None
        assert 0.0 < d.posterior_prob_efficacy < 1.0
        assert d.cutoff_efficacy_value == pytest.approx(0.9 * 0.5)

    def test_rejects_non_look_n(self, spec4, boundaries4):
        with pytest.raises(ValidationError):
            interim_decision(spec4, boundaries4, TrialData.from_margins(10, 4, 2))
