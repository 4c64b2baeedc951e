"""Probability kernels for a bivariate binary endpoint.

Covers the binomial pmf, Beta posterior tail probabilities for a
Dirichlet-multinomial model collapsed to one margin, and the algebra that
connects marginal rates, the joint cell table, and the odds ratio phi.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, isfinite, lgamma, log, sqrt

import numpy as np
from scipy.special import gammaln

from .betainc import betainc_regularized
from .errors import ValidationError

_EPS = 1e-12


def log_binomial_pmf(k: int, n: int, p: float) -> float:
    """Log of the binomial pmf C(n,k) p^k (1-p)^(n-k), with 0*log(0) = 0."""
    if not 0 <= k <= n:
        raise ValidationError("k", f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p", f"need p in [0,1], got {p}")
    if p == 0.0:
        return 0.0 if k == 0 else -inf
    if p == 1.0:
        return 0.0 if k == n else -inf
    log_comb = lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)
    return log_comb + k * log(p) + (n - k) * log(1.0 - p)


def binomial_pmf_vector(n: int, p: float) -> np.ndarray:
    """Binomial pmf over k = 0..n as a dense vector."""
    if n < 0:
        raise ValidationError("n", f"need n >= 0, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p", f"need p in [0,1], got {p}")
    k = np.arange(n + 1)
    if p == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if p == 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    log_comb = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    return np.exp(log_comb + k * np.log(p) + (n - k) * np.log1p(-p))


def frechet_bounds(pi_e: float, pi_t: float) -> tuple[float, float]:
    """Feasible range of the joint probability given the two margins."""
    return max(0.0, pi_e + pi_t - 1.0), min(pi_e, pi_t)


@dataclass(frozen=True)
class OutcomeProbabilities:
    """True joint law of (efficacy, toxicity): margins plus the joint cell."""

    pi_e: float
    pi_t: float
    pi_et: float

    def __post_init__(self):
        for name, v in (("pi_e", self.pi_e), ("pi_t", self.pi_t), ("pi_et", self.pi_et)):
            if not 0.0 <= v <= 1.0:
                raise ValidationError(name, f"need a probability in [0,1], got {v}")
        lo, hi = frechet_bounds(self.pi_e, self.pi_t)
        if self.pi_et < lo - _EPS or self.pi_et > hi + _EPS:
            raise ValidationError(
                "pi_et", f"joint probability {self.pi_et} outside feasible range [{lo}, {hi}]"
            )

    @classmethod
    def independent(cls, pi_e: float, pi_t: float) -> "OutcomeProbabilities":
        return cls(pi_e, pi_t, pi_e * pi_t)

    @classmethod
    def from_phi(cls, pi_e: float, pi_t: float, phi: float) -> "OutcomeProbabilities":
        return cls(pi_e, pi_t, pi_et_from_phi(pi_e, pi_t, phi))

    def cells(self) -> tuple[float, float, float, float]:
        return cells_from_margins(self)

    def phi(self) -> "OddsRatio":
        return phi_from_pi_et(self.pi_e, self.pi_t, self.pi_et)


def cells_from_margins(p: OutcomeProbabilities) -> tuple[float, float, float, float]:
    """Four cell probabilities (both, efficacy-only, toxicity-only, neither)."""
    c11 = p.pi_et
    c10 = p.pi_e - p.pi_et
    c01 = p.pi_t - p.pi_et
    c00 = 1.0 - p.pi_e - p.pi_t + p.pi_et
    cells = (c11, c10, c01, c00)
    if min(cells) < -_EPS:
        raise ValidationError("pi_et", f"margins produce a negative cell: {cells}")
    return tuple(max(0.0, c) for c in cells)


@dataclass(frozen=True)
class OddsRatio:
    """Odds ratio of the 2x2 outcome table, with explicit degenerate cases.

    value is None when the ratio is not a finite positive number; boundary
    then names the degenerate regime so callers branch deliberately instead
    of propagating inf/nan.
    """

    value: float | None
    boundary: str | None = None

    @property
    def is_finite(self) -> bool:
        return self.value is not None


def phi_from_pi_et(pi_e: float, pi_t: float, pi_et: float) -> OddsRatio:
    """Odds ratio phi = c11*c00 / (c10*c01) of the outcome table."""
    c11, c10, c01, c00 = cells_from_margins(OutcomeProbabilities(pi_e, pi_t, pi_et))
    num = c11 * c00
    den = c10 * c01
    if den == 0.0 and num == 0.0:
        return OddsRatio(None, "indeterminate")
    if den == 0.0:
        return OddsRatio(None, "infinite")
    if num == 0.0:
        return OddsRatio(0.0, "zero")
    return OddsRatio(num / den)


def pi_et_from_phi(pi_e: float, pi_t: float, phi: float) -> float:
    """Joint probability implied by the margins and odds ratio phi."""
    if not 0.0 < pi_e < 1.0 or not 0.0 < pi_t < 1.0:
        raise ValidationError("pi_e", f"margins must be in (0,1), got ({pi_e}, {pi_t})")
    if phi <= 0.0 or not isfinite(phi):
        raise ValidationError("phi", f"need a finite odds ratio > 0, got {phi}")
    if phi == 1.0:
        return pi_e * pi_t
    # c11*c00 = phi*c10*c01 is quadratic in the joint cell z:
    # (1-phi) z^2 + (1 - pi_e - pi_t + phi (pi_e + pi_t)) z - phi pi_e pi_t = 0
    a = 1.0 - phi
    b = 1.0 - pi_e - pi_t + phi * (pi_e + pi_t)
    c = -phi * pi_e * pi_t
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise ArithmeticError(f"negative discriminant for ({pi_e}, {pi_t}, {phi})")
    sq = sqrt(disc)
    q = -0.5 * (b + sq) if b >= 0 else -0.5 * (b - sq)
    roots = [q / a, c / q]
    lo, hi = frechet_bounds(pi_e, pi_t)
    valid = [z for z in roots if lo - 1e-9 <= z <= hi + 1e-9]
    if not valid:
        raise ArithmeticError(f"no feasible root for ({pi_e}, {pi_t}, {phi}); roots {roots}")
    z = min(valid) if phi > 1.0 else max(valid)
    return min(max(z, lo), hi)


@dataclass(frozen=True)
class PriorHyperparameters:
    """Dirichlet prior over the four outcome cells.

    tau = (both, efficacy-only, toxicity-only, neither); the sum acts as a
    prior effective sample size. Marginal Beta priors follow from the sums
    tau_e = tau1 + tau2 and tau_t = tau1 + tau3.
    """

    tau: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.tau) != 4:
            raise ValidationError("tau", f"need 4 cell parameters, got {len(self.tau)}")
        if any(t < 0.0 for t in self.tau):
            raise ValidationError("tau", f"cell parameters must be >= 0, got {self.tau}")
        if sum(self.tau) <= 0.0:
            raise ValidationError("tau", "prior effective sample size must be positive")

    @property
    def total(self) -> float:
        return sum(self.tau)

    @property
    def tau_e(self) -> float:
        return self.tau[0] + self.tau[1]

    @property
    def tau_t(self) -> float:
        return self.tau[0] + self.tau[2]

    @classmethod
    def from_means(cls, mean_e: float, mean_t: float, total: float = 1.0) -> "PriorHyperparameters":
        """Prior with the given marginal means, cells filled by independence."""
        if not 0.0 < mean_e < 1.0 or not 0.0 < mean_t < 1.0:
            raise ValidationError("prior", f"prior means must be in (0,1), got ({mean_e}, {mean_t})")
        if total <= 0.0:
            raise ValidationError("prior", f"prior effective sample size must be > 0, got {total}")
        return cls((
            total * mean_e * mean_t,
            total * mean_e * (1.0 - mean_t),
            total * (1.0 - mean_e) * mean_t,
            total * (1.0 - mean_e) * (1.0 - mean_t),
        ))


def beta_posterior_tail(
    x: int,
    n: int,
    tau_marginal: float,
    total_tau: float,
    threshold: float,
    direction: str,
) -> float:
    """Posterior tail probability of one margin after x events in n patients.

    The posterior is Beta(tau_marginal + x, n + total_tau - tau_marginal - x).
    direction "above" returns Pr(rate > threshold); "at_or_below" returns the
    complement.
    """
    if not 0 <= x <= n:
        raise ValidationError("x", f"need 0 <= x <= n, got x={x}, n={n}")
    if not 0.0 < tau_marginal < total_tau:
        raise ValidationError("tau_marginal", f"need 0 < tau_marginal < total_tau, got {tau_marginal}, {total_tau}")
    if not 0.0 < threshold < 1.0:
        raise ValidationError("threshold", f"need threshold in (0,1), got {threshold}")
    if direction not in ("above", "at_or_below"):
        raise ValidationError("direction", f"unknown direction {direction!r}")
    a = tau_marginal + x
    b = n + total_tau - tau_marginal - x
    below = betainc_regularized(a, b, threshold)
    return 1.0 - below if direction == "above" else below
