"""Exact operating characteristics: recursion vs independent oracles.

The convolution recursion is cross-checked against two independent routes:
a per-sequence itertools enumeration for stage tables, and the package's own
brute-force enumerator for whole designs (which shares no code with the
recursion beyond the boundary maps).
"""

import itertools
import math

import numpy as np
import pytest

from bop2te import (
    DesignSpec,
    Look,
    OutcomeProbabilities,
    SizeLimitError,
    StoppingBoundaries,
    ValidationError,
    brute_force_claim_probability,
    claim_probability,
    continuation_distribution,
    hypothesis_claim_probabilities,
    operating_characteristics,
    phi_sensitivity_curve,
    stage_pmf_table,
    theorem1_residual,
)
from bop2te.oc import joint_stage_pmf
from conftest import make_spec, standard_schedule

# cell order: (both, efficacy only, toxicity only, neither)
EVENT_E = (True, True, False, False)
EVENT_T = (True, False, True, False)


def enumerate_stage_table(m, dist):
    """Joint count pmf by summing over all 4^m per-patient outcome sequences."""
    cells = dist.cells()
    table = np.zeros((m + 1, m + 1))
    for seq in itertools.product(range(4), repeat=m):
        p = math.prod(cells[c] for c in seq)
        x_e = sum(EVENT_E[c] for c in seq)
        x_t = sum(EVENT_T[c] for c in seq)
        table[x_e, x_t] += p
    return table


class TestStagePmfTable:
    @pytest.mark.parametrize("m", [0, 1, 2, 3, 5])
    def test_matches_sequence_enumeration(self, m):
        dist = OutcomeProbabilities(0.6, 0.4, 0.3)
        got = stage_pmf_table(m, dist)
        want = enumerate_stage_table(m, dist)
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)

    def test_matches_enumeration_on_random_laws(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            p11, p10, p01, _ = rng.dirichlet((1.0, 1.0, 1.0, 1.0))
            dist = OutcomeProbabilities(p11 + p10, p11 + p01, p11)
            got = stage_pmf_table(4, dist)
            want = enumerate_stage_table(4, dist)
            np.testing.assert_allclose(got, want, rtol=0, atol=1e-14)

    def test_degenerate_toxicity_rates(self):
        never = OutcomeProbabilities(0.5, 0.0, 0.0)
        table = stage_pmf_table(3, never)
        assert table[:, 1:].sum() == 0.0
        np.testing.assert_allclose(table[:, 0], [0.125, 0.375, 0.375, 0.125], atol=1e-15)
        always = OutcomeProbabilities(0.5, 1.0, 0.5)
        table = stage_pmf_table(3, always)
        assert table[:, :3].sum() == 0.0
        np.testing.assert_allclose(table[:, 3], [0.125, 0.375, 0.375, 0.125], atol=1e-15)

    def test_single_patient_cells(self):
        dist = OutcomeProbabilities(0.6, 0.4, 0.24)
        assert joint_stage_pmf(0, 0, 1, dist) == pytest.approx(0.24)
        assert joint_stage_pmf(1, 0, 1, dist) == pytest.approx(0.36)
        assert joint_stage_pmf(0, 1, 1, dist) == pytest.approx(0.16)
        assert joint_stage_pmf(1, 1, 1, dist) == pytest.approx(0.24)

    def test_table_sums_to_one(self):
        dist = OutcomeProbabilities(0.35, 0.55, 0.2)
        for m in (1, 4, 17, 40):
            assert stage_pmf_table(m, dist).sum() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_bad_arguments(self):
        dist = OutcomeProbabilities.independent(0.5, 0.5)
        with pytest.raises(ValidationError):
            stage_pmf_table(-1, dist)
        with pytest.raises(ValidationError):
            joint_stage_pmf(3, 0, 2, dist)


def random_small_design(rng):
    """A random schedule, boundary set, and outcome law with n_max <= 8."""
    n_max = int(rng.integers(3, 9))
    n_looks = int(rng.integers(2, 4))
    ns = sorted(rng.choice(np.arange(1, n_max), size=n_looks - 1, replace=False).tolist())
    looks = []
    for n in ns:
        kind = int(rng.integers(0, 3))
        looks.append(Look(int(n), check_efficacy=kind != 1, check_toxicity=kind != 2))
    looks.append(Look(n_max))
    spec = make_spec(0.6, 0.3, 0.2, 0.4, schedule=tuple(looks))
    eff = []
    for look in spec.efficacy_looks():
        eff.append(int(rng.integers(-1, look.n + 1)))
    tox = []
    for look in spec.toxicity_looks():
        tox.append(int(rng.integers(1, look.n + 2)))
    boundaries = StoppingBoundaries(
        tuple(np.maximum.accumulate(eff)) if eff else (),
        tuple(np.maximum.accumulate(tox)) if tox else (),
    )
    p11, p10, p01, _ = rng.dirichlet((1.0, 1.0, 1.0, 1.0))
    dist = OutcomeProbabilities(p11 + p10, p11 + p01, p11)
    return spec, boundaries, dist


class TestBruteForceAgreement:
    def test_recursion_matches_enumeration_on_random_designs(self):
        rng = np.random.default_rng(20260814)
        for _ in range(60):
            spec, boundaries, dist = random_small_design(rng)
            fast = claim_probability(spec, boundaries, dist)
            slow = brute_force_claim_probability(spec, boundaries, dist)
            assert abs(fast - slow) <= 1e-12, (spec.schedule, boundaries, dist)

    def test_always_stopping_boundaries(self):
        spec = make_spec(0.6, 0.3, 0.2, 0.4, schedule=(Look(2), Look(4)))
        boundaries = StoppingBoundaries((2, 4), (1, 1))
        dist = OutcomeProbabilities.independent(0.7, 0.1)
        assert claim_probability(spec, boundaries, dist) == 0.0
        assert brute_force_claim_probability(spec, boundaries, dist) == 0.0

    def test_never_stopping_boundaries(self):
        spec = make_spec(0.6, 0.3, 0.2, 0.4, schedule=(Look(2), Look(4)))
        boundaries = StoppingBoundaries((-1, -1), (3, 5))
        dist = OutcomeProbabilities.independent(0.7, 0.1)
        assert claim_probability(spec, boundaries, dist) == pytest.approx(1.0, abs=1e-12)

    def test_one_sided_interim_looks(self):
        spec = make_spec(
            0.6, 0.3, 0.2, 0.4,
            schedule=(Look(2, check_efficacy=False), Look(4, check_toxicity=False), Look(6)),
        )
        boundaries = StoppingBoundaries((1, 3), (1, 2))
        dist = OutcomeProbabilities(0.55, 0.25, 0.2)
        fast = claim_probability(spec, boundaries, dist)
        slow = brute_force_claim_probability(spec, boundaries, dist)
        assert abs(fast - slow) <= 1e-12

    def test_brute_force_guarded(self):
        spec = make_spec(0.6, 0.3, 0.2, 0.4, schedule=(Look(6), Look(12)))
        boundaries = StoppingBoundaries((1, 5), (3, 6))
        with pytest.raises(SizeLimitError):
            brute_force_claim_probability(spec, boundaries, OutcomeProbabilities.independent(0.5, 0.2))


class TestOperatingCharacteristics:
    def test_hand_computed_two_stage_design(self):
        # Uniform cells; pass look 1 iff the first patient responds; claim iff
        # both respond and at most one has toxicity: 0.25 * 0.75.
        spec = make_spec(0.6, 0.3, 0.2, 0.4, schedule=(Look(1), Look(2)))
        boundaries = StoppingBoundaries((0, 1), (2, 2))
        dist = OutcomeProbabilities(0.5, 0.5, 0.25)
        oc = operating_characteristics(spec, boundaries, dist)
        assert oc.pcp == pytest.approx(0.1875, abs=1e-15)
        assert oc.pet == pytest.approx(0.5, abs=1e-15)
        assert oc.ess == pytest.approx(1.5, abs=1e-15)
        assert brute_force_claim_probability(spec, boundaries, dist) == pytest.approx(0.1875, abs=1e-15)

    def test_single_look_design_has_zero_pet(self):
        spec = make_spec(0.6, 0.3, 0.2, 0.4, schedule=(Look(4),))
        boundaries = StoppingBoundaries((1,), (3,))
        oc = operating_characteristics(spec, boundaries, OutcomeProbabilities.independent(0.6, 0.2))
        assert oc.pet == 0.0
        assert oc.ess == 4.0

    def test_ess_accumulates_pass_probabilities(self, spec4, boundaries4):
        dist = spec4.hypothesis("h11")
        oc = operating_characteristics(spec4, boundaries4, dist)
        p = oc.stage_pass_probs
        assert oc.ess == pytest.approx(9 + 9 * p[0] + 18 * p[1], abs=1e-12)
        assert oc.pet == pytest.approx(1.0 - p[1], abs=1e-12)
        assert oc.pcp == p[2]
        assert all(b <= a + 1e-15 for a, b in zip(p, p[1:]))

    def test_continuation_mass_tracks_pass_probabilities(self, spec4, boundaries4):
        dist = spec4.hypothesis("h01")
        oc = operating_characteristics(spec4, boundaries4, dist)
        assert continuation_distribution(spec4, boundaries4, dist, 1).sum() == pytest.approx(1.0)
        for stage in (2, 3):
            got = continuation_distribution(spec4, boundaries4, dist, stage).sum()
            assert got == pytest.approx(oc.stage_pass_probs[stage - 2], abs=1e-12)

    def test_stage_bounds_validated(self, spec4, boundaries4):
        dist = spec4.hypothesis("h11")
        for stage in (0, 4):
            with pytest.raises(ValidationError):
                continuation_distribution(spec4, boundaries4, dist, stage)


TABLE_DESIGNS = [
    ((0.50, 0.20, 0.10, 0.30), (3, 10), (3, 5, 8)),
    ((0.50, 0.20, 0.20, 0.40), (3, 10), (4, 7, 11)),
    ((0.60, 0.30, 0.10, 0.30), (5, 14), (3, 5, 8)),
    ((0.60, 0.30, 0.20, 0.40), (5, 14), (4, 7, 11)),
    ((0.70, 0.40, 0.15, 0.35), (6, 18), (4, 6, 9)),
    ((0.70, 0.40, 0.20, 0.40), (6, 18), (4, 7, 11)),
    ((0.80, 0.50, 0.15, 0.35), (8, 22), (4, 6, 9)),
    ((0.80, 0.50, 0.20, 0.40), (8, 21), (4, 7, 11)),
]


class TestErrorRateIdentity:
    @pytest.mark.parametrize("rates,eff,tox", TABLE_DESIGNS)
    def test_residual_vanishes_under_independence(self, rates, eff, tox):
        spec = make_spec(*rates)
        assert abs(theorem1_residual(spec, StoppingBoundaries(eff, tox))) <= 1e-10

    def test_claim_probability_factorizes(self, spec4, boundaries4):
        # with an independent design law the joint claim probability is the
        # product of the marginal pass probabilities
        a = hypothesis_claim_probabilities(spec4, boundaries4)
        assert a["h00"] * a["h11"] == pytest.approx(a["h01"] * a["h10"], abs=1e-12)

    def test_residual_needs_positive_power(self, spec4):
        dead = StoppingBoundaries((18, 36), (10, 19, 37))
        with pytest.raises(ValidationError):
            theorem1_residual(spec4, dead)


class TestPhiSensitivity:
    def test_error_rates_nonincreasing_in_association(self, spec4, boundaries4):
        curve = phi_sensitivity_curve(spec4, boundaries4, [0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0])
        for code in ("h00", "h01", "h10"):
            vals = curve[code]
            assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:])), code
        h11 = curve["h11"]
        assert max(h11) - min(h11) < 0.01

    def test_rejects_bad_grids(self, spec4, boundaries4):
        with pytest.raises(ValidationError):
            phi_sensitivity_curve(spec4, boundaries4, [])
        with pytest.raises(ValidationError):
            phi_sensitivity_curve(spec4, boundaries4, [1.0, -2.0])

    def test_phi_one_reproduces_corner_probabilities(self, spec4, boundaries4):
        curve = phi_sensitivity_curve(spec4, boundaries4, [1.0])
        a = hypothesis_claim_probabilities(spec4, boundaries4)
        for code in ("h00", "h01", "h10", "h11"):
            assert curve[code][0] == pytest.approx(a[code], abs=1e-14)
