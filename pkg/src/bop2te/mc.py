"""Monte Carlo simulation: single trials, operating-characteristic estimates,
and randomized multi-dose optimization with isotonic adjustment.

Randomness comes from counter-based Philox streams keyed by (seed, arm
index); replicate r reads row r of the pre-generated uniform matrix, so
results are bit-identical however replicates are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import CutoffParameters, DesignSpec, StoppingBoundaries, derive_boundaries
from .errors import ValidationError
from .probability import OutcomeProbabilities


@dataclass(frozen=True)
class SimulationConfig:
    """Replicate count, stream seed, and optionally the per-arm truth."""

    replicates: int
    seed: int
    truth: tuple[OutcomeProbabilities, ...] | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValidationError("replicates", f"need >= 1 replicate, got {self.replicates}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed", f"need an unsigned 64-bit seed, got {self.seed}")
        if self.truth is not None:
            object.__setattr__(self, "truth", tuple(self.truth))


def _arm_rng(seed: int, arm: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, arm]))


def _outcome_matrix(truth: OutcomeProbabilities, uniforms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map uniforms to per-patient indicators; returns (is_efficacy, is_toxicity)."""
    edges = np.cumsum(truth.cells())
    idx = np.searchsorted(edges, uniforms, side="right")
    return idx <= 1, (idx == 0) | (idx == 2)


def _boundary_maps(spec: DesignSpec, boundaries: StoppingBoundaries) -> tuple[dict, dict]:
    boundaries.validate_against(spec)
    eff = {look.n: l for look, l in zip(spec.efficacy_looks(), boundaries.efficacy)}
    tox = {look.n: l for look, l in zip(spec.toxicity_looks(), boundaries.toxicity)}
    return eff, tox


def simulate_trial(
    spec: DesignSpec,
    boundaries: StoppingBoundaries,
    truth: OutcomeProbabilities,
    rng: np.random.Generator,
) -> tuple[bool, int | None, int]:
    """Run one sequential trial; returns (claimed, stopped_at_stage, enrolled).

    stopped_at_stage is the 1-based look index at which a stopping boundary
    was crossed, or None if the trial passed every look.
    """
    eff_map, tox_map = _boundary_maps(spec, boundaries)
    is_e, is_t = _outcome_matrix(truth, rng.random(spec.n_max))
    cum_e = np.cumsum(is_e)
    cum_t = np.cumsum(is_t)
    for stage, look in enumerate(spec.schedule, start=1):
        l_e = eff_map.get(look.n)
        l_t = tox_map.get(look.n)
        stop = (l_e is not None and cum_e[look.n - 1] <= l_e) or (
            l_t is not None and cum_t[look.n - 1] >= l_t
        )
        if stop:
            return False, stage, look.n
    return True, None, spec.n_max


@dataclass(frozen=True)
class MonteCarloOC:
    """Simulation estimates of the operating characteristics with standard errors."""

    pcp: float
    pet: float
    ess: float
    pcp_se: float
    pet_se: float
    ess_se: float
    replicates: int


def estimate_oc(
    spec: DesignSpec,
    boundaries: StoppingBoundaries,
    truth: OutcomeProbabilities,
    config: SimulationConfig,
) -> MonteCarloOC:
    """Replicate-averaged claim, early-stop, and enrollment estimates.

    Uses the same uniform stream layout as simulate_trial with a fresh
    generator: replicate r consumes draws r*N .. (r+1)*N - 1 of the
    (seed, arm 0) stream.
    """
    eff_map, tox_map = _boundary_maps(spec, boundaries)
    reps, n_max = config.replicates, spec.n_max
    is_e, is_t = _outcome_matrix(truth, _arm_rng(config.seed, 0).random((reps, n_max)))
    cum_e = np.cumsum(is_e, axis=1)
    cum_t = np.cumsum(is_t, axis=1)
    active = np.ones(reps, dtype=bool)
    enrolled = np.full(reps, n_max, dtype=np.int64)
    early = np.zeros(reps, dtype=bool)
    last_n = spec.schedule[-1].n
    for look in spec.schedule:
        stop = np.zeros(reps, dtype=bool)
        l_e = eff_map.get(look.n)
        if l_e is not None:
            stop |= cum_e[:, look.n - 1] <= l_e
        l_t = tox_map.get(look.n)
        if l_t is not None:
            stop |= cum_t[:, look.n - 1] >= l_t
        newly = active & stop
        enrolled[newly] = look.n
        if look.n != last_n:
            early |= newly
        active &= ~stop
    pcp = float(active.mean())
    pet = float(early.mean())
    ess = float(enrolled.mean())
    ess_sd = float(enrolled.std(ddof=1)) if reps > 1 else 0.0
    return MonteCarloOC(
        pcp=pcp,
        pet=pet,
        ess=ess,
        pcp_se=math.sqrt(pcp * (1.0 - pcp) / reps),
        pet_se=math.sqrt(pet * (1.0 - pet) / reps),
        ess_se=ess_sd / math.sqrt(reps),
        replicates=reps,
    )


def pava(values, weights, direction: str = "non-decreasing") -> np.ndarray:
    """Weighted least-squares monotone fit by pool-adjacent-violators.

    Pooled blocks take the weighted mean of their members, so the weighted
    total is preserved exactly.
    """
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.shape != w.shape or v.ndim != 1:
        raise ValidationError("values", f"need equal-length 1-d inputs, got {v.shape} and {w.shape}")
    if (w <= 0).any():
        raise ValidationError("weights", "weights must be positive")
    if direction not in ("non-decreasing", "non-increasing"):
        raise ValidationError("direction", f"unknown direction {direction!r}")
    if direction == "non-increasing":
        return -pava(-v, w, "non-decreasing")
    # blocks of (mean, weight, count); merge while the tail violates order
    means: list[float] = []
    wsum: list[float] = []
    count: list[int] = []
    for val, wt in zip(v, w):
        means.append(float(val))
        wsum.append(float(wt))
        count.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, w2, c2 = means.pop(), wsum.pop(), count.pop()
            means[-1] = (means[-1] * wsum[-1] + m2 * w2) / (wsum[-1] + w2)
            wsum[-1] += w2
            count[-1] += c2
    return np.repeat(means, count)


def select_optimal_dose(
    eff_estimates,
    surviving,
    delta: float,
    labels=None,
) -> object | None:
    """Lowest surviving dose whose adjusted efficacy clears the margin.

    eff_estimates must already be isotonically adjusted across arms. A dose
    qualifies when its estimate exceeds delta times the estimate of the
    highest surviving dose. Returns the arm label (or index when labels is
    None); None when no arm survives.
    """
    est = list(eff_estimates)
    surv = list(surviving)
    if len(est) != len(surv):
        raise ValidationError("surviving", f"need equal lengths, got {len(est)} and {len(surv)}")
    if not 0.0 < delta <= 1.0:
        raise ValidationError("delta", f"need delta in (0,1], got {delta}")
    alive = [i for i, s in enumerate(surv) if s]
    if not alive:
        return None
    ref = est[alive[-1]]
    chosen = next(i for i in alive if est[i] > delta * ref or i == alive[-1])
    return labels[chosen] if labels is not None else chosen


@dataclass(frozen=True)
class DoseOptimizationSpec:
    """Parallel-arm dose optimization: shared per-arm design plus selection margin.

    arms lists dose labels in ascending dose order. Monitoring uses the
    boundaries resolved in this order of precedence: the explicit boundaries
    field, boundaries derived from the cutoffs field, or the grid-search
    optimum of per_arm_design.
    """

    arms: tuple[str, ...]
    per_arm_design: DesignSpec
    delta: float = 0.8
    cutoffs: CutoffParameters | None = None
    boundaries: StoppingBoundaries | None = None

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(str(a) for a in self.arms))
        if len(self.arms) < 1:
            raise ValidationError("arms", "need at least one arm")
        if len(set(self.arms)) != len(self.arms):
            raise ValidationError("arms", f"arm labels must be unique, got {self.arms}")
        if not 0.0 < self.delta <= 1.0:
            raise ValidationError("delta", f"need delta in (0,1], got {self.delta}")

    def resolve_boundaries(self) -> StoppingBoundaries:
        if self.boundaries is not None:
            self.boundaries.validate_against(self.per_arm_design)
            return self.boundaries
        if self.cutoffs is not None:
            return derive_boundaries(self.per_arm_design, self.cutoffs)
        from .search import optimize

        return optimize(self.per_arm_design).boundaries


@dataclass(frozen=True)
class ArmResult:
    """Aggregate outcome of one dose arm across replicates."""

    label: str
    selection_pct: float
    early_stop_pct: float
    average_enrolled: float


@dataclass(frozen=True)
class MultiDoseResult:
    arms: tuple[ArmResult, ...]
    none_selected_pct: float
    replicates: int


def simulate_multidose(
    dspec: DoseOptimizationSpec,
    truths,
    config: SimulationConfig,
) -> MultiDoseResult:
    """Simulate parallel dose arms with isotonic monitoring and final selection.

    Per replicate: arms accrue in lockstep to the shared schedule. At each
    look the per-arm posterior means (prior included) are made monotone in
    dose by pava over the still-active arms, weighted by the per-arm sample
    size; an arm stops permanently when its adjusted efficacy mean falls to
    or below the futility boundary, or its adjusted toxicity mean rises to
    or above the toxicity boundary, with the integer boundary mapped onto
    the posterior-mean scale so an unadjusted arm reproduces the raw-count
    rule exactly. At the end pava runs afresh over the surviving arms and
    the lowest dose within the equivalence margin of the highest surviving
    dose is selected.
    """
    truths = tuple(truths)
    if len(truths) != len(dspec.arms):
        raise ValidationError("truths", f"need {len(dspec.arms)} truths, got {len(truths)}")
    spec = dspec.per_arm_design
    boundaries = dspec.resolve_boundaries()
    eff_map, tox_map = _boundary_maps(spec, boundaries)
    prior = spec.prior_hyperparameters
    tau_e, tau_t, tau_total = prior.tau_e, prior.tau_t, prior.total
    reps, n_max, n_arms = config.replicates, spec.n_max, len(dspec.arms)
    cum_e = np.empty((n_arms, reps, n_max), dtype=np.int64)
    cum_t = np.empty((n_arms, reps, n_max), dtype=np.int64)
    for a, truth in enumerate(truths):
        is_e, is_t = _outcome_matrix(truth, _arm_rng(config.seed, a).random((reps, n_max)))
        cum_e[a] = np.cumsum(is_e, axis=1)
        cum_t[a] = np.cumsum(is_t, axis=1)
    active = np.ones((reps, n_arms), dtype=bool)
    enrolled = np.full((reps, n_arms), n_max, dtype=np.int64)
    early = np.zeros((reps, n_arms), dtype=bool)
    last_n = spec.schedule[-1].n
    for look in spec.schedule:
        n = look.n
        pe = (tau_e + cum_e[:, :, n - 1].T) / (n + tau_total)
        pt = (tau_t + cum_t[:, :, n - 1].T) / (n + tau_total)
        l_e = eff_map.get(n)
        l_t = tox_map.get(n)
        # integer boundaries expressed on the posterior-mean scale
        mean_bound_e = (tau_e + l_e) / (n + tau_total) if l_e is not None else None
        mean_bound_t = (tau_t + l_t) / (n + tau_total) if l_t is not None else None
        weights = np.full(n_arms, float(n))
        for r in range(reps):
            idx = np.nonzero(active[r])[0]
            if idx.size == 0:
                continue
            pe_adj = pava(pe[r, idx], weights[idx]) if idx.size > 1 else pe[r, idx]
            pt_adj = pava(pt[r, idx], weights[idx]) if idx.size > 1 else pt[r, idx]
            stop = np.zeros(idx.size, dtype=bool)
            if mean_bound_e is not None:
                stop |= pe_adj <= mean_bound_e
            if mean_bound_t is not None:
                stop |= pt_adj >= mean_bound_t
            hit = idx[stop]
            active[r, hit] = False
            enrolled[r, hit] = n
            if n != last_n:
                early[r, hit] = True
    selections = np.zeros(n_arms, dtype=np.int64)
    none_selected = 0
    final_pe = (tau_e + cum_e[:, :, n_max - 1].T) / (n_max + tau_total)
    weights = np.full(n_arms, float(n_max))
    for r in range(reps):
        idx = np.nonzero(active[r])[0]
        if idx.size == 0:
            none_selected += 1
            continue
        pe_adj = pava(final_pe[r, idx], weights[idx]) if idx.size > 1 else final_pe[r, idx]
        chosen = select_optimal_dose(pe_adj, [True] * idx.size, dspec.delta)
        selections[idx[chosen]] += 1
    arms = tuple(
        ArmResult(
            label=dspec.arms[a],
            selection_pct=100.0 * selections[a] / reps,
            early_stop_pct=100.0 * float(early[:, a].mean()),
            average_enrolled=float(enrolled[:, a].mean()),
        )
        for a in range(n_arms)
    )
    return MultiDoseResult(
        arms=arms, none_selected_pct=100.0 * none_selected / reps, replicates=reps
    )
