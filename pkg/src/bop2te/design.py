"""Trial design specification, posterior cutoff rules, and stopping boundaries.

A design jointly monitors a binary efficacy endpoint and a binary toxicity
endpoint over a schedule of looks. At each look the trial continues only if
the posterior probability of promising efficacy clears a sample-size-dependent
cutoff and the posterior probability of acceptable toxicity clears a second,
more slowly tightening cutoff. Both rules reduce to integer stopping
boundaries on the event counts, which is the form used everywhere downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .probability import (
    OutcomeProbabilities,
    PriorHyperparameters,
    beta_posterior_tail,
    pi_et_from_phi,
)

# Posterior probabilities within this distance of a cutoff count as failing it,
# so boundary derivation is stable against rounding in the cutoff arithmetic.
TIE_TOLERANCE = 1e-12

PRIOR_CONVENTIONS = ("reference", "null-centered", "alternative-centered")


@dataclass(frozen=True)
class Look:
    """One analysis point: cumulative sample size and which endpoints it checks."""

    n: int
    check_efficacy: bool = True
    check_toxicity: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("n", f"look sample size must be >= 1, got {self.n}")
        if not (self.check_efficacy or self.check_toxicity):
            raise ValidationError("look", f"look at n={self.n} checks neither endpoint")


@dataclass(frozen=True)
class DesignSpec:
    """Hypothesis rates, error targets, analysis schedule, and prior.

    eta_e / eta_t are the target (alternative) efficacy and toxicity rates;
    eta_e_null / eta_t_null are the unacceptable rates used as posterior
    thresholds. alpha_targets caps the claim probability under the three null
    configurations (both rates null, efficacy null only, toxicity null only).
    """

    eta_e: float
    eta_e_null: float
    eta_t: float
    eta_t_null: float
    alpha_targets: tuple[float, float, float]
    schedule: tuple[Look, ...]
    prior: PriorHyperparameters | str = "reference"
    attenuation: float = 3.0
    design_phi: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(self.schedule))
        object.__setattr__(self, "alpha_targets", tuple(self.alpha_targets))
        if not 0.0 < self.eta_e_null < self.eta_e < 1.0:
            raise ValidationError(
                "eta_e", f"need 0 < eta_e_null < eta_e < 1, got ({self.eta_e_null}, {self.eta_e})"
            )
        if not 0.0 < self.eta_t < self.eta_t_null < 1.0:
            raise ValidationError(
                "eta_t", f"need 0 < eta_t < eta_t_null < 1, got ({self.eta_t}, {self.eta_t_null})"
            )
        if len(self.alpha_targets) != 3:
            raise ValidationError("alpha_targets", f"need 3 targets, got {len(self.alpha_targets)}")
        for a in self.alpha_targets:
            if not 0.0 < a < 1.0:
                raise ValidationError("alpha_targets", f"targets must be in (0,1), got {a}")
        if not self.schedule:
            raise ValidationError("schedule", "need at least one look")
        ns = [look.n for look in self.schedule]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValidationError("schedule", f"look sample sizes must strictly increase, got {ns}")
        last = self.schedule[-1]
        if not (last.check_efficacy and last.check_toxicity):
            raise ValidationError("schedule", "the final look must check both endpoints")
        if self.attenuation <= 0.0:
            raise ValidationError("attenuation", f"need attenuation > 0, got {self.attenuation}")
        if self.design_phi <= 0.0:
            raise ValidationError("design_phi", f"need design_phi > 0, got {self.design_phi}")
        if isinstance(self.prior, str) and self.prior not in PRIOR_CONVENTIONS:
            raise ValidationError(
                "prior", f"unknown prior convention {self.prior!r}; options: {PRIOR_CONVENTIONS}"
            )

    @property
    def n_max(self) -> int:
        return self.schedule[-1].n

    @property
    def prior_hyperparameters(self) -> PriorHyperparameters:
        """Resolve a named prior convention to concrete hyperparameters.

        All conventions use a prior effective sample size of 1 with cells
        filled by independence. "reference" centers efficacy at 1/2 and
        toxicity at the target rate; "null-centered" uses the unacceptable
        rates; "alternative-centered" uses the target rates.
        """
        if isinstance(self.prior, PriorHyperparameters):
            return self.prior
        if self.prior == "reference":
            return PriorHyperparameters.from_means(0.5, self.eta_t)
        if self.prior == "null-centered":
            return PriorHyperparameters.from_means(self.eta_e_null, self.eta_t_null)
        return PriorHyperparameters.from_means(self.eta_e, self.eta_t)

    def efficacy_looks(self) -> tuple[Look, ...]:
        return tuple(look for look in self.schedule if look.check_efficacy)

    def toxicity_looks(self) -> tuple[Look, ...]:
        return tuple(look for look in self.schedule if look.check_toxicity)

    def look_at(self, n: int) -> Look:
        for look in self.schedule:
            if look.n == n:
                return look
        raise ValidationError("n", f"n={n} is not an analysis point of this design")

    def hypothesis(self, code: str) -> OutcomeProbabilities:
        """True outcome law for one of the four hypothesis corners.

        Codes: "h00" both rates unacceptable, "h01" efficacy unacceptable
        with target toxicity, "h10" target efficacy with unacceptable
        toxicity, "h11" both rates on target. Cells follow design_phi.
        """
        rates = {
            "h00": (self.eta_e_null, self.eta_t_null),
            "h01": (self.eta_e_null, self.eta_t),
            "h10": (self.eta_e, self.eta_t_null),
            "h11": (self.eta_e, self.eta_t),
        }
        if code not in rates:
            raise ValidationError("hypothesis", f"unknown hypothesis {code!r}")
        pi_e, pi_t = rates[code]
        return OutcomeProbabilities(pi_e, pi_t, pi_et_from_phi(pi_e, pi_t, self.design_phi))


@dataclass(frozen=True)
class CutoffParameters:
    """Parameters of the sample-size-dependent posterior cutoffs."""

    lambda_e: float
    lambda_t: float
    gamma: float

    def __post_init__(self):
        for name, v in (("lambda_e", self.lambda_e), ("lambda_t", self.lambda_t), ("gamma", self.gamma)):
            if not 0.0 <= v <= 1.0:
                raise ValidationError(name, f"need a value in [0,1], got {v}")


def cutoff_efficacy(n: int, n_max: int, lambda_e: float, gamma: float) -> float:
    """Efficacy cutoff lambda_e * (n / n_max) ** gamma."""
    if not 1 <= n <= n_max:
        raise ValidationError("n", f"need 1 <= n <= n_max, got n={n}, n_max={n_max}")
    return lambda_e * (n / n_max) ** gamma


def cutoff_toxicity(
    n: int, n_max: int, lambda_t: float, gamma: float, attenuation: float = 3.0
) -> float:
    """Toxicity cutoff lambda_t * (n / n_max) ** (gamma / attenuation).

    The attenuation keeps the toxicity rule comparatively strict at small n,
    so safety monitoring starts earlier than futility monitoring.
    """
    if not 1 <= n <= n_max:
        raise ValidationError("n", f"need 1 <= n <= n_max, got n={n}, n_max={n_max}")
    if attenuation <= 0.0:
        raise ValidationError("attenuation", f"need attenuation > 0, got {attenuation}")
    return lambda_t * (n / n_max) ** (gamma / attenuation)


@dataclass(frozen=True)
class StoppingBoundaries:
    """Integer stopping boundaries aligned with the active looks.

    efficacy[i] is the largest event count that stops for futility at the
    i-th efficacy look (-1 means stopping is impossible there, n means the
    look always stops). toxicity[j] is the smallest count that stops for
    toxicity at the j-th toxicity look (n+1 means stopping is impossible).
    """

    efficacy: tuple[int, ...]
    toxicity: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "efficacy", tuple(int(v) for v in self.efficacy))
        object.__setattr__(self, "toxicity", tuple(int(v) for v in self.toxicity))
        for name, vals in (("efficacy", self.efficacy), ("toxicity", self.toxicity)):
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ValidationError(name, f"boundaries must be non-decreasing, got {vals}")

    def validate_against(self, spec: DesignSpec) -> None:
        eff_looks = spec.efficacy_looks()
        tox_looks = spec.toxicity_looks()
        if len(self.efficacy) != len(eff_looks):
            raise ValidationError(
                "efficacy", f"need {len(eff_looks)} values, got {len(self.efficacy)}"
            )
        if len(self.toxicity) != len(tox_looks):
            raise ValidationError(
                "toxicity", f"need {len(tox_looks)} values, got {len(self.toxicity)}"
            )
        for look, l_e in zip(eff_looks, self.efficacy):
            if not -1 <= l_e <= look.n:
                raise ValidationError("efficacy", f"need -1 <= l_e <= {look.n}, got {l_e}")
        for look, l_t in zip(tox_looks, self.toxicity):
            if not 1 <= l_t <= look.n + 1:
                raise ValidationError("toxicity", f"need 1 <= l_t <= {look.n + 1}, got {l_t}")


def posterior_tail_efficacy(spec: DesignSpec, n: int, x_e: int) -> float:
    """Pr(efficacy rate > eta_e_null) after x_e responses in n patients."""
    prior = spec.prior_hyperparameters
    return beta_posterior_tail(x_e, n, prior.tau_e, prior.total, spec.eta_e_null, "above")


def posterior_tail_toxicity(spec: DesignSpec, n: int, x_t: int) -> float:
    """Pr(toxicity rate <= eta_t_null) after x_t events in n patients."""
    prior = spec.prior_hyperparameters
    return beta_posterior_tail(x_t, n, prior.tau_t, prior.total, spec.eta_t_null, "at_or_below")


def derive_boundaries(spec: DesignSpec, q: CutoffParameters) -> StoppingBoundaries:
    """Translate posterior cutoff parameters into integer stopping boundaries.

    At each efficacy look the boundary is the largest count whose posterior
    tail fails the cutoff; at each toxicity look, the smallest such count.
    Probabilities within TIE_TOLERANCE of a cutoff count as failing. A final
    running-maximum pass enforces monotonicity across looks for both
    endpoints, which never changes the reject region of a coherent rule but
    protects downstream recursions from pathological cutoff choices.
    """
    n_max = spec.n_max
    efficacy = []
    for look in spec.efficacy_looks():
        ce = cutoff_efficacy(look.n, n_max, q.lambda_e, q.gamma)
        tails = np.array([posterior_tail_efficacy(spec, look.n, x) for x in range(look.n + 1)])
        # tails increase in x, so the boundary is the count of failing values minus 1
        efficacy.append(int(np.searchsorted(tails, ce + TIE_TOLERANCE, side="right")) - 1)
    toxicity = []
    for look in spec.toxicity_looks():
        ct = cutoff_toxicity(look.n, n_max, q.lambda_t, q.gamma, spec.attenuation)
        tails = np.array([posterior_tail_toxicity(spec, look.n, y) for y in range(look.n + 1)])
        # tails decrease in y; find the first failing count, n+1 if none fails
        failing = tails <= ct + TIE_TOLERANCE
        toxicity.append(int(np.argmax(failing)) if failing.any() else look.n + 1)
    efficacy = np.maximum.accumulate(efficacy).tolist() if efficacy else []
    toxicity = np.maximum.accumulate(toxicity).tolist() if toxicity else []
    return StoppingBoundaries(tuple(efficacy), tuple(toxicity))


@dataclass(frozen=True)
class TrialData:
    """Observed outcome counts after n patients.

    x = (both, efficacy-only, toxicity-only, neither) event counts.
    """

    n: int
    x: tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(int(v) for v in self.x))
        if len(self.x) != 4:
            raise ValidationError("x", f"need 4 cell counts, got {len(self.x)}")
        if any(v < 0 for v in self.x):
            raise ValidationError("x", f"counts must be >= 0, got {self.x}")
        if sum(self.x) != self.n:
            raise ValidationError("x", f"counts must sum to n={self.n}, got {self.x}")

    @property
    def x_e(self) -> int:
        return self.x[0] + self.x[1]

    @property
    def x_t(self) -> int:
        return self.x[0] + self.x[2]

    @classmethod
    def from_margins(cls, n: int, x_e: int, x_t: int) -> "TrialData":
        """Counts with the given margins; the overlap cell is set maximal.

        Interim decisions depend on the margins only, so any consistent
        fill yields the same decision.
        """
        if not 0 <= x_e <= n or not 0 <= x_t <= n:
            raise ValidationError("x_e", f"need margins in [0,n], got x_e={x_e}, x_t={x_t}, n={n}")
        x11 = min(x_e, x_t)
        return cls(n, (x11, x_e - x11, x_t - x11, n - x_e - x_t + x11))


@dataclass(frozen=True)
class InterimDecision:
    """Outcome of applying the stopping rule to observed data at one look."""

    decision: str
    reasons: tuple[str, ...]
    n: int
    x_e: int
    x_t: int
    boundary_efficacy: int | None
    boundary_toxicity: int | None
    posterior_prob_efficacy: float
    posterior_prob_toxicity: float
    cutoff_efficacy_value: float | None = None
    cutoff_toxicity_value: float | None = None


def interim_decision(
    spec: DesignSpec,
    boundaries: StoppingBoundaries,
    data: TrialData,
    q: CutoffParameters | None = None,
) -> InterimDecision:
    """Apply the stopping rule at the look matching data.n.

    The trial stops (decision "no-go") when the efficacy count is at or
    below the futility boundary or the toxicity count is at or above the
    toxicity boundary, considering only the endpoints checked at that look.
    """
    boundaries.validate_against(spec)
    look = spec.look_at(data.n)
    eff_ns = [lk.n for lk in spec.efficacy_looks()]
    tox_ns = [lk.n for lk in spec.toxicity_looks()]
    l_e = boundaries.efficacy[eff_ns.index(look.n)] if look.check_efficacy else None
    l_t = boundaries.toxicity[tox_ns.index(look.n)] if look.check_toxicity else None
    reasons = []
    if l_e is not None and data.x_e <= l_e:
        reasons.append("futility")
    if l_t is not None and data.x_t >= l_t:
        reasons.append("toxicity")
    ce = ct = None
    if q is not None:
        if look.check_efficacy:
            ce = cutoff_efficacy(look.n, spec.n_max, q.lambda_e, q.gamma)
        if look.check_toxicity:
            ct = cutoff_toxicity(look.n, spec.n_max, q.lambda_t, q.gamma, spec.attenuation)
    return InterimDecision(
        decision="no-go" if reasons else "go",
        reasons=tuple(reasons),
        n=data.n,
        x_e=data.x_e,
        x_t=data.x_t,
        boundary_efficacy=l_e,
        boundary_toxicity=l_t,
        posterior_prob_efficacy=posterior_tail_efficacy(spec, data.n, data.x_e),
        posterior_prob_toxicity=posterior_tail_toxicity(spec, data.n, data.x_t),
        cutoff_efficacy_value=ce,
        cutoff_toxicity_value=ct,
    )
