"""Exact operating characteristics of a two-endpoint stopping rule.

The count pair (efficacy events, toxicity events) is tracked jointly across
looks by convolving per-stage count distributions and zeroing the stopped
region at each look. Everything here is deterministic arithmetic on dense
probability tables; no simulation is involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .design import DesignSpec, StoppingBoundaries
from .errors import SizeLimitError, ValidationError
from .probability import OutcomeProbabilities, binomial_pmf_vector, pi_et_from_phi

BRUTE_FORCE_MAX_N = 10


def _conditional_rates(dist: OutcomeProbabilities) -> tuple[float, float]:
    """Efficacy rate given toxicity and given no toxicity, clipped to [0,1]."""
    if dist.pi_t > 0.0:
        pe_t = min(max(dist.pi_et / dist.pi_t, 0.0), 1.0)
    else:
        pe_t = 0.0
    if dist.pi_t < 1.0:
        pe_nt = min(max((dist.pi_e - dist.pi_et) / (1.0 - dist.pi_t), 0.0), 1.0)
    else:
        pe_nt = 0.0
    return pe_t, pe_nt


def stage_pmf_table(m: int, dist: OutcomeProbabilities) -> np.ndarray:
    """Joint pmf of (efficacy count, toxicity count) among m patients.

    Returns an (m+1, m+1) table indexed [x_e, x_t]. Given the toxicity count,
    the efficacy count is a sum of two independent binomials (patients with
    and without toxicity), computed by convolution.
    """
    if m < 0:
        raise ValidationError("m", f"need m >= 0, got {m}")
    pe_t, pe_nt = _conditional_rates(dist)
    tox_weights = binomial_pmf_vector(m, dist.pi_t)
    table = np.zeros((m + 1, m + 1))
    for x_t in range(m + 1):
        w = tox_weights[x_t]
        if w == 0.0:
            continue
        among_tox = binomial_pmf_vector(x_t, pe_t)
        among_rest = binomial_pmf_vector(m - x_t, pe_nt)
        table[:, x_t] = w * np.convolve(among_tox, among_rest)
    return table


def joint_stage_pmf(x_e: int, x_t: int, m: int, dist: OutcomeProbabilities) -> float:
    """Probability of exactly x_e efficacy and x_t toxicity events in m patients."""
    if not 0 <= x_t <= m or not 0 <= x_e <= m:
        raise ValidationError("x_e", f"need counts in [0,m], got x_e={x_e}, x_t={x_t}, m={m}")
    return float(stage_pmf_table(m, dist)[x_e, x_t])


def _boundary_maps(spec: DesignSpec, boundaries: StoppingBoundaries) -> tuple[dict, dict]:
    boundaries.validate_against(spec)
    eff = {look.n: l for look, l in zip(spec.efficacy_looks(), boundaries.efficacy)}
    tox = {look.n: l for look, l in zip(spec.toxicity_looks(), boundaries.toxicity)}
    return eff, tox


def _apply_continuation_mask(table: np.ndarray, l_e: int | None, l_t: int | None) -> np.ndarray:
    masked = table.copy()
    if l_e is not None and l_e >= 0:
        masked[: l_e + 1, :] = 0.0
    if l_t is not None:
        masked[:, l_t:] = 0.0
    return masked


def continuation_distribution(
    spec: DesignSpec,
    boundaries: StoppingBoundaries,
    dist: OutcomeProbabilities,
    stage: int,
) -> np.ndarray:
    """Sub-probability table of counts at the given look (1-based stage index).

    Entry [x_e, x_t] is the probability of reaching that look without having
    stopped earlier and observing those cumulative counts. Entries sum to the
    probability of passing all earlier looks.
    """
    if not 1 <= stage <= len(spec.schedule):
        raise ValidationError("stage", f"need 1 <= stage <= {len(spec.schedule)}, got {stage}")
    eff_map, tox_map = _boundary_maps(spec, boundaries)
    table = None
    prev_n = 0
    for look in spec.schedule[:stage]:
        stage_table = stage_pmf_table(look.n - prev_n, dist)
        if table is None:
            table = stage_table
        else:
            table = convolve2d(table, stage_table)
        prev_n = look.n
        if look.n == spec.schedule[stage - 1].n:
            break
        table = _apply_continuation_mask(table, eff_map.get(look.n), tox_map.get(look.n))
    return table


def _stage_pass_probs(
    spec: DesignSpec, boundaries: StoppingBoundaries, dist: OutcomeProbabilities
) -> list[float]:
    eff_map, tox_map = _boundary_maps(spec, boundaries)
    passes = []
    table = None
    prev_n = 0
    for look in spec.schedule:
        stage_table = stage_pmf_table(look.n - prev_n, dist)
        table = stage_table if table is None else convolve2d(table, stage_table)
        table = _apply_continuation_mask(table, eff_map.get(look.n), tox_map.get(look.n))
        passes.append(float(table.sum()))
        prev_n = look.n
    return passes


def claim_probability(
    spec: DesignSpec, boundaries: StoppingBoundaries, dist: OutcomeProbabilities
) -> float:
    """Probability the trial passes every look and claims the treatment promising."""
    return _stage_pass_probs(spec, boundaries, dist)[-1]


@dataclass(frozen=True)
class OperatingCharacteristics:
    """Exact frequentist summary of a stopping rule under one outcome law.

    pcp is the probability of a promising claim, pet the probability of
    stopping at an interim look, ess the expected number of patients
    enrolled. stage_pass_probs[r] is the probability of passing looks
    1 through r+1.
    """

    pcp: float
    pet: float
    ess: float
    stage_pass_probs: tuple[float, ...]


def operating_characteristics(
    spec: DesignSpec, boundaries: StoppingBoundaries, dist: OutcomeProbabilities
) -> OperatingCharacteristics:
    passes = _stage_pass_probs(spec, boundaries, dist)
    ns = [look.n for look in spec.schedule]
    ess = float(ns[0])
    for r in range(1, len(ns)):
        ess += (ns[r] - ns[r - 1]) * passes[r - 1]
    pet = 1.0 - passes[-2] if len(passes) > 1 else 0.0
    return OperatingCharacteristics(
        pcp=passes[-1], pet=pet, ess=ess, stage_pass_probs=tuple(passes)
    )


def hypothesis_claim_probabilities(
    spec: DesignSpec, boundaries: StoppingBoundaries
) -> dict[str, float]:
    """Claim probability at each of the four hypothesis corners."""
    return {
        code: claim_probability(spec, boundaries, spec.hypothesis(code))
        for code in ("h00", "h01", "h10", "h11")
    }


def theorem1_residual(spec: DesignSpec, boundaries: StoppingBoundaries) -> float:
    """Residual of the error-rate identity alpha00 = alpha01 * alpha10 / power.

    The identity holds exactly when the two endpoints are independent
    (design odds ratio 1), because the claim probability then factorizes
    into per-endpoint pass probabilities.
    """
    a = hypothesis_claim_probabilities(spec, boundaries)
    if a["h11"] == 0.0:
        raise ValidationError("boundaries", "power is zero; the identity ratio is undefined")
    return a["h00"] - a["h01"] * a["h10"] / a["h11"]


def brute_force_claim_probability(
    spec: DesignSpec, boundaries: StoppingBoundaries, dist: OutcomeProbabilities
) -> float:
    """Claim probability by enumerating every per-patient outcome sequence.

    Exponential in the total sample size; guarded to small designs. Exists
    as an independent cross-check of the convolution recursion.
    """
    n_max = spec.n_max
    if n_max > BRUTE_FORCE_MAX_N:
        raise SizeLimitError(f"brute force needs n_max <= {BRUTE_FORCE_MAX_N}, got {n_max}")
    eff_map, tox_map = _boundary_maps(spec, boundaries)
    cells = np.array(dist.cells())
    seqs = np.array(list(itertools.product(range(4), repeat=n_max)), dtype=np.int8)
    probs = cells[seqs].prod(axis=1)
    cum_e = np.cumsum((seqs <= 1).astype(np.int32), axis=1)
    cum_t = np.cumsum(((seqs == 0) | (seqs == 2)).astype(np.int32), axis=1)
    passing = np.ones(len(seqs), dtype=bool)
    for look in spec.schedule:
        if look.n in eff_map:
            passing &= cum_e[:, look.n - 1] > eff_map[look.n]
        if look.n in tox_map:
            passing &= cum_t[:, look.n - 1] < tox_map[look.n]
    return float(probs[passing].sum())


def phi_sensitivity_curve(
    spec: DesignSpec,
    boundaries: StoppingBoundaries,
    phis: list[float],
) -> dict[str, list[float]]:
    """Claim probabilities at the four hypothesis corners across odds ratios.

    For each odds ratio the joint cell of every corner is recomputed from its
    margins, so the curves show how error rates and power respond to
    association between the endpoints.
    """
    if not phis:
        raise ValidationError("phis", "need at least one odds ratio")
    if any(p <= 0.0 for p in phis):
        raise ValidationError("phis", f"odds ratios must be > 0, got {phis}")
    out: dict[str, list[float]] = {"phi": [float(p) for p in phis]}
    for code in ("h00", "h01", "h10", "h11"):
        base = spec.hypothesis(code)
        out[code] = [
            claim_probability(
                spec,
                boundaries,
                OutcomeProbabilities(base.pi_e, base.pi_t, pi_et_from_phi(base.pi_e, base.pi_t, p)),
            )
            for p in phis
        ]
    return out
