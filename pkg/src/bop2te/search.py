"""Design optimization: cutoff-grid search and exhaustive boundary search.

The grid search sweeps posterior cutoff parameters, maps each point to its
integer stopping boundaries, deduplicates, and keeps the feasible design with
the highest power. When the design odds ratio is 1 the claim probability
factorizes into independent per-endpoint pass probabilities, so each distinct
boundary vector needs only a cheap one-dimensional recursion; the general
case falls back to the full two-dimensional recursion per candidate.

The exhaustive search drops the cutoff parameterization entirely and
enumerates every monotone integer boundary vector, optionally restricted to
boundaries near the expected event counts (the practical variant).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .design import (
    TIE_TOLERANCE,
    CutoffParameters,
    DesignSpec,
    StoppingBoundaries,
    cutoff_efficacy,
    cutoff_toxicity,
    posterior_tail_efficacy,
    posterior_tail_toxicity,
)
from .errors import SizeLimitError, ValidationError
from .oc import OperatingCharacteristics, operating_characteristics, stage_pmf_table
from .probability import binomial_pmf_vector

GRID_VARIANTS = ("compact", "specified")

GLOBAL_MAX_EFFICACY_LOOKS = 2
GLOBAL_MAX_TOXICITY_LOOKS = 3


def _lambda_values(variant: str) -> list[float]:
    if variant == "compact":
        coarse = [0.525 + 0.025 * i for i in range(11)]
        fine = [0.81 + 0.01 * i for i in range(18)]
    else:
        coarse = [0.5 + 0.025 * i for i in range(12)]
        fine = [0.8 + 0.01 * i for i in range(20)]
    return [round(v, 6) for v in coarse + fine]


def _gamma_values() -> list[float]:
    # power exponents chosen so the final-look cutoff fraction sweeps
    # (n/2N)-shaped curvature evenly: gamma = log(v)/log(1/2), v = 1.00..0.50
    vs = [1.0 - 0.025 * i for i in range(21)]
    return [math.log(v) / math.log(0.5) for v in vs]


def parameter_grid(variant: str = "compact") -> list[CutoffParameters]:
    """Cutoff parameter grid in (lambda_e, lambda_t, gamma) major-to-minor order.

    "compact" uses 29 lambda values (0.525..0.775 by 0.025, then 0.81..0.98
    by 0.01) for 29 * 29 * 21 = 17,661 points. "specified" widens the lambda
    range to 32 values (0.5..0.775 by 0.025, then 0.8..0.99 by 0.01). The
    gamma grid always holds 21 values including 0 and 1.
    """
    if variant not in GRID_VARIANTS:
        raise ValidationError("variant", f"unknown grid variant {variant!r}; options: {GRID_VARIANTS}")
    lams = _lambda_values(variant)
    gammas = _gamma_values()
    return [
        CutoffParameters(le, lt, g)
        for le, lt, g in itertools.product(lams, lams, gammas)
    ]


@dataclass(frozen=True)
class OptimizationResult:
    """Winning design of a search plus the bookkeeping needed to audit it.

    q is the cutoff parameter point that generates the boundaries (None for
    the exhaustive search, which has no cutoff parameterization). oc maps
    each hypothesis corner to its exact operating characteristics. feasible
    is False when no candidate met all three error targets; the returned
    design is then the least-violating one.
    """

    q: CutoffParameters | None
    boundaries: StoppingBoundaries
    oc: dict[str, OperatingCharacteristics]
    feasible: bool
    candidates_evaluated: int
    distinct_boundaries: int
    method: str = "grid"

    @property
    def alphas(self) -> dict[str, float]:
        return {
            "alpha00": self.oc["h00"].pcp,
            "alpha01": self.oc["h01"].pcp,
            "alpha10": self.oc["h10"].pcp,
            "power": self.oc["h11"].pcp,
        }


def _tail_arrays(spec: DesignSpec) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray]]:
    """Monotone posterior tail arrays per look, reused across the whole grid."""
    eff = {}
    for look in spec.efficacy_looks():
        eff[look.n] = np.array(
            [posterior_tail_efficacy(spec, look.n, x) for x in range(look.n + 1)]
        )
    tox = {}
    for look in spec.toxicity_looks():
        tox[look.n] = np.array(
            [posterior_tail_toxicity(spec, look.n, y) for y in range(look.n + 1)]
        )
    return eff, tox


def _efficacy_vectors(spec, eff_tails, lam_grid, gamma) -> np.ndarray:
    """Efficacy boundary vectors for every lambda_e at one gamma; rows per lambda."""
    looks = spec.efficacy_looks()
    out = np.empty((len(lam_grid), len(looks)), dtype=np.int64)
    for j, look in enumerate(looks):
        ce = np.asarray(lam_grid) * (look.n / spec.n_max) ** gamma
        out[:, j] = np.searchsorted(eff_tails[look.n], ce + TIE_TOLERANCE, side="right") - 1
    return np.maximum.accumulate(out, axis=1)


def _toxicity_vectors(spec, tox_tails, lam_grid, gamma) -> np.ndarray:
    looks = spec.toxicity_looks()
    out = np.empty((len(lam_grid), len(looks)), dtype=np.int64)
    for j, look in enumerate(looks):
        ct = np.asarray(lam_grid) * (look.n / spec.n_max) ** (gamma / spec.attenuation)
        # tails decrease in the count, so search the reversed array
        rev = tox_tails[look.n][::-1]
        failing = np.searchsorted(rev, ct + TIE_TOLERANCE, side="right")
        out[:, j] = look.n + 1 - failing
    return np.maximum.accumulate(out, axis=1)


def _endpoint_pass(vec: tuple[int, ...], look_ns: list[int], p: float, endpoint: str) -> float:
    """Probability one endpoint's count path clears its boundaries at every look."""
    d = binomial_pmf_vector(look_ns[0], p)
    prev = look_ns[0]
    for i, n in enumerate(look_ns):
        if i > 0:
            d = np.convolve(d, binomial_pmf_vector(n - prev, p))
            prev = n
        if endpoint == "efficacy":
            if vec[i] >= 0:
                d[: vec[i] + 1] = 0.0
        else:
            d[vec[i]:] = 0.0
    return float(d.sum())


class _FactorizedScorer:
    """Error rates via per-endpoint pass probabilities (design odds ratio 1)."""

    def __init__(self, spec: DesignSpec):
        self.spec = spec
        self.eff_ns = [look.n for look in spec.efficacy_looks()]
        self.tox_ns = [look.n for look in spec.toxicity_looks()]
        self._eff_cache: dict[tuple[int, ...], tuple[float, float]] = {}
        self._tox_cache: dict[tuple[int, ...], tuple[float, float]] = {}

    def _eff(self, vec: tuple[int, ...]) -> tuple[float, float]:
        if vec not in self._eff_cache:
            self._eff_cache[vec] = (
                _endpoint_pass(vec, self.eff_ns, self.spec.eta_e_null, "efficacy"),
                _endpoint_pass(vec, self.eff_ns, self.spec.eta_e, "efficacy"),
            )
        return self._eff_cache[vec]

    def _tox(self, vec: tuple[int, ...]) -> tuple[float, float]:
        if vec not in self._tox_cache:
            self._tox_cache[vec] = (
                _endpoint_pass(vec, self.tox_ns, self.spec.eta_t_null, "toxicity"),
                _endpoint_pass(vec, self.tox_ns, self.spec.eta_t, "toxicity"),
            )
        return self._tox_cache[vec]

    def alphas(self, eff_vec, tox_vec) -> tuple[float, float, float, float]:
        e0, e1 = self._eff(eff_vec)
        t0, t1 = self._tox(tox_vec)
        return (e0 * t0, e0 * t1, e1 * t0, e1 * t1)


class _FullScorer:
    """Error rates via the full joint recursion; valid for any design odds ratio."""

    def __init__(self, spec: DesignSpec):
        self.spec = spec
        self.dists = {code: spec.hypothesis(code) for code in ("h00", "h01", "h10", "h11")}
        ns = [look.n for look in spec.schedule]
        increments = [ns[0]] + [b - a for a, b in zip(ns, ns[1:])]
        self.stage_tables = {
            code: [stage_pmf_table(m, dist) for m in increments]
            for code, dist in self.dists.items()
        }

    def _claim(self, code: str, eff_map: dict[int, int], tox_map: dict[int, int]) -> float:
        table = None
        for look, stage in zip(self.spec.schedule, self.stage_tables[code]):
            # copy before masking; the cached stage tables are shared across calls
            table = stage.copy() if table is None else convolve2d(table, stage)
            l_e = eff_map.get(look.n)
            if l_e is not None and l_e >= 0:
                table[: l_e + 1, :] = 0.0
            l_t = tox_map.get(look.n)
            if l_t is not None:
                table[:, l_t:] = 0.0
        return float(table.sum())

    def alphas(self, eff_vec, tox_vec) -> tuple[float, float, float, float]:
        eff_map = {look.n: l for look, l in zip(self.spec.efficacy_looks(), eff_vec)}
        tox_map = {look.n: l for look, l in zip(self.spec.toxicity_looks(), tox_vec)}
        return tuple(self._claim(code, eff_map, tox_map) for code in ("h00", "h01", "h10", "h11"))


def _result_for(spec, q, eff_vec, tox_vec, feasible, evaluated, distinct, method) -> OptimizationResult:
    boundaries = StoppingBoundaries(eff_vec, tox_vec)
    oc = {
        code: operating_characteristics(spec, boundaries, spec.hypothesis(code))
        for code in ("h00", "h01", "h10", "h11")
    }
    return OptimizationResult(
        q=q,
        boundaries=boundaries,
        oc=oc,
        feasible=feasible,
        candidates_evaluated=evaluated,
        distinct_boundaries=distinct,
        method=method,
    )


def _select_winner(spec, candidates, scorer):
    """Apply the feasibility filter and the tie-break chain.

    candidates is a list of (order_index, q_or_none, eff_vec, tox_vec).
    Returns (winner, feasible). Ties in power break to smaller alpha00, then
    smaller alpha01 + alpha10, then larger early-stop probability under the
    double-null corner, then enumeration order.
    """
    a00t, a01t, a10t = spec.alpha_targets
    scored = []
    for order, q, eff_vec, tox_vec in candidates:
        a00, a01, a10, power = scorer.alphas(eff_vec, tox_vec)
        scored.append((order, q, eff_vec, tox_vec, a00, a01, a10, power))
    feasible = [s for s in scored if s[4] <= a00t and s[5] <= a01t and s[6] <= a10t]
    if not feasible:
        def excess(s):
            return (max(0.0, s[4] - a00t) + max(0.0, s[5] - a01t) + max(0.0, s[6] - a10t), s[0])
        return min(scored, key=excess), False
    best_power = max(s[7] for s in feasible)
    tied = [s for s in feasible if s[7] == best_power]
    if len(tied) > 1:
        best_a00 = min(s[4] for s in tied)
        tied = [s for s in tied if s[4] == best_a00]
    if len(tied) > 1:
        best_sum = min(s[5] + s[6] for s in tied)
        tied = [s for s in tied if s[5] + s[6] == best_sum]
    if len(tied) > 1:
        pets = [
            operating_characteristics(
                spec, StoppingBoundaries(s[2], s[3]), spec.hypothesis("h00")
            ).pet
            for s in tied
        ]
        best_pet = max(pets)
        tied = [s for s, pet in zip(tied, pets) if pet == best_pet]
    return min(tied, key=lambda s: s[0]), True


def optimize(spec: DesignSpec, grid_variant: str = "compact") -> OptimizationResult:
    """Search the cutoff grid for the feasible design with the highest power.

    Every grid point is mapped to its boundary vectors; identical vectors are
    scored once. Feasibility compares the three null claim probabilities
    against alpha_targets; among feasible candidates power is maximized with
    the deterministic tie-break chain of _select_winner.
    """
    lam_grid = _lambda_values(grid_variant) if grid_variant in GRID_VARIANTS else None
    if lam_grid is None:
        raise ValidationError("grid_variant", f"unknown grid variant {grid_variant!r}; options: {GRID_VARIANTS}")
    gammas = _gamma_values()
    eff_tails, tox_tails = _tail_arrays(spec)
    L, G = len(lam_grid), len(gammas)
    seen: dict[tuple, tuple] = {}
    for ig, gamma in enumerate(gammas):
        eff_mat = _efficacy_vectors(spec, eff_tails, lam_grid, gamma)
        tox_mat = _toxicity_vectors(spec, tox_tails, lam_grid, gamma)
        eff_rows = [tuple(r) for r in eff_mat.tolist()]
        tox_rows = [tuple(r) for r in tox_mat.tolist()]
        for ie in range(L):
            base = ie * L * G + ig
            eff_vec = eff_rows[ie]
            for it in range(L):
                key = (eff_vec, tox_rows[it])
                order = base + it * G
                prev = seen.get(key)
                if prev is None or order < prev[0]:
                    seen[key] = (order, CutoffParameters(lam_grid[ie], lam_grid[it], gamma))
    candidates = [
        (order, q, eff_vec, tox_vec) for (eff_vec, tox_vec), (order, q) in seen.items()
    ]
    scorer = _FactorizedScorer(spec) if spec.design_phi == 1.0 else _FullScorer(spec)
    winner, feasible = _select_winner(spec, candidates, scorer)
    return _result_for(
        spec, winner[1], winner[2], winner[3], feasible, L * L * G, len(seen), "grid"
    )


def _monotone_vectors(lows: list[int], highs: list[int]) -> list[tuple[int, ...]]:
    """All non-decreasing integer vectors within per-position bounds."""
    vecs: list[tuple[int, ...]] = []

    def rec(i: int, floor: int, cur: list[int]):
        if i == len(lows):
            vecs.append(tuple(cur))
            return
        for v in range(max(lows[i], floor), highs[i] + 1):
            cur.append(v)
            rec(i + 1, v, cur)
            cur.pop()

    rec(0, -(10**9), [])
    return vecs


def global_boundary_search(spec: DesignSpec, practical_constraint: bool = False) -> OptimizationResult:
    """Exhaustively search integer boundary vectors instead of the cutoff grid.

    Requires design odds ratio 1 (the search relies on the per-endpoint
    factorization) and a small number of active looks per endpoint. With
    practical_constraint the efficacy boundary may not fall below the
    expected null event count minus one, and the toxicity boundary may not
    exceed the expected unacceptable count plus one, keeping interim stops
    clinically explainable.

    Power is compared at four-decimal resolution: among feasible pairs whose
    rounded power attains the maximum, the winner is the first in enumeration
    order (efficacy vectors ascending, toxicity vectors ascending within
    each), which favours the least aggressive boundaries among designs that
    are indistinguishable at reporting precision.
    """
    if spec.design_phi != 1.0:
        raise ValidationError("design_phi", "the exhaustive search requires a design odds ratio of 1")
    eff_looks = spec.efficacy_looks()
    tox_looks = spec.toxicity_looks()
    if len(eff_looks) > GLOBAL_MAX_EFFICACY_LOOKS:
        raise SizeLimitError(
            f"exhaustive search supports <= {GLOBAL_MAX_EFFICACY_LOOKS} efficacy looks, got {len(eff_looks)}"
        )
    if len(tox_looks) > GLOBAL_MAX_TOXICITY_LOOKS:
        raise SizeLimitError(
            f"exhaustive search supports <= {GLOBAL_MAX_TOXICITY_LOOKS} toxicity looks, got {len(tox_looks)}"
        )
    if practical_constraint:
        eff_lows = [max(0, math.ceil(look.n * spec.eta_e_null) - 1) for look in eff_looks]
        tox_highs = [min(look.n + 1, math.floor(look.n * spec.eta_t_null) + 1) for look in tox_looks]
    else:
        eff_lows = [0 for _ in eff_looks]
        tox_highs = [look.n + 1 for look in tox_looks]
    eff_vecs = _monotone_vectors(eff_lows, [look.n for look in eff_looks])
    tox_vecs = _monotone_vectors([1 for _ in tox_looks], tox_highs)
    eff_ns = [look.n for look in eff_looks]
    tox_ns = [look.n for look in tox_looks]
    e0 = np.array([_endpoint_pass(v, eff_ns, spec.eta_e_null, "efficacy") for v in eff_vecs])
    e1 = np.array([_endpoint_pass(v, eff_ns, spec.eta_e, "efficacy") for v in eff_vecs])
    t0 = np.array([_endpoint_pass(v, tox_ns, spec.eta_t_null, "toxicity") for v in tox_vecs])
    t1 = np.array([_endpoint_pass(v, tox_ns, spec.eta_t, "toxicity") for v in tox_vecs])
    a00t, a01t, a10t = spec.alpha_targets
    feas = (
        (np.outer(e0, t0) <= a00t) & (np.outer(e0, t1) <= a01t) & (np.outer(e1, t0) <= a10t)
    )
    method = "global-practical" if practical_constraint else "global"
    evaluated = len(eff_vecs) * len(tox_vecs)
    if not feas.any():
        scorer = _FactorizedScorer(spec)
        candidates = [
            (i * len(tox_vecs) + j, None, ev, tv)
            for i, ev in enumerate(eff_vecs)
            for j, tv in enumerate(tox_vecs)
        ]
        winner, feasible = _select_winner(spec, candidates, scorer)
        return _result_for(spec, None, winner[2], winner[3], feasible, evaluated, evaluated, method)
    power = np.round(np.outer(e1, t1), 4)
    best = power[feas].max()
    ei, tj = np.nonzero(feas & (power == best))
    order = ei.astype(np.int64) * len(tox_vecs) + tj.astype(np.int64)
    pick = int(np.argmin(order))
    eff_win = eff_vecs[int(ei[pick])]
    tox_win = tox_vecs[int(tj[pick])]
    return _result_for(spec, None, eff_win, tox_win, True, evaluated, evaluated, method)
