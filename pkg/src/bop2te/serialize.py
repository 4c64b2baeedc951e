"""JSON mapping for the domain types.

One schema is used everywhere (store records, CLI config files, service
payloads): snake_case keys named exactly like the dataclass fields. Parsing
is strict and reports the offending field, so transport layers can surface
precise errors without a schema library.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .design import (
    CutoffParameters,
    DesignSpec,
    InterimDecision,
    Look,
    StoppingBoundaries,
    TrialData,
)
from .errors import ValidationError
from .mc import (
    ArmResult,
    DoseOptimizationSpec,
    MonteCarloOC,
    MultiDoseResult,
    SimulationConfig,
)
from .oc import OperatingCharacteristics
from .probability import OutcomeProbabilities, PriorHyperparameters
from .search import OptimizationResult


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def sha256_of(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def _require(obj: dict, field: str, kinds, *, optional: bool = False, default=None):
    if not isinstance(obj, dict):
        raise ValidationError(field, f"expected an object, got {type(obj).__name__}")
    if field not in obj:
        if optional:
            return default
        raise ValidationError(field, "missing required field")
    value = obj[field]
    if kinds is bool:
        if not isinstance(value, bool):
            raise ValidationError(field, f"expected a boolean, got {type(value).__name__}")
        return value
    if kinds is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(field, f"expected a number, got {type(value).__name__}")
        return float(value)
    if kinds is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(field, f"expected an integer, got {type(value).__name__}")
        return value
    if not isinstance(value, kinds):
        raise ValidationError(field, f"expected {kinds}, got {type(value).__name__}")
    return value


def look_to_dict(look: Look) -> dict:
    return {"n": look.n, "check_efficacy": look.check_efficacy, "check_toxicity": look.check_toxicity}


def parse_look(obj: dict) -> Look:
    return Look(
        n=_require(obj, "n", int),
        check_efficacy=_require(obj, "check_efficacy", bool, optional=True, default=True),
        check_toxicity=_require(obj, "check_toxicity", bool, optional=True, default=True),
    )


def prior_to_jsonable(prior: PriorHyperparameters | str) -> Any:
    if isinstance(prior, str):
        return prior
    return {"tau": list(prior.tau)}


def parse_prior(value: Any) -> PriorHyperparameters | str:
    if isinstance(value, str):
        return value
    tau = _require(value, "tau", list)
    if len(tau) != 4 or any(isinstance(t, bool) or not isinstance(t, (int, float)) for t in tau):
        raise ValidationError("prior", f"tau must hold 4 numbers, got {tau}")
    return PriorHyperparameters(tuple(float(t) for t in tau))


def spec_to_dict(spec: DesignSpec) -> dict:
    return {
        "eta_e": spec.eta_e,
        "eta_e_null": spec.eta_e_null,
        "eta_t": spec.eta_t,
        "eta_t_null": spec.eta_t_null,
        "alpha_targets": list(spec.alpha_targets),
        "schedule": [look_to_dict(look) for look in spec.schedule],
        "prior": prior_to_jsonable(spec.prior),
        "attenuation": spec.attenuation,
        "design_phi": spec.design_phi,
    }


def parse_design_spec(obj: dict) -> DesignSpec:
    targets = _require(obj, "alpha_targets", list)
    if len(targets) != 3 or any(isinstance(t, bool) or not isinstance(t, (int, float)) for t in targets):
        raise ValidationError("alpha_targets", f"expected 3 numbers, got {targets}")
    schedule_raw = _require(obj, "schedule", list)
    if not schedule_raw:
        raise ValidationError("schedule", "need at least one look")
    return DesignSpec(
        eta_e=_require(obj, "eta_e", float),
        eta_e_null=_require(obj, "eta_e_null", float),
        eta_t=_require(obj, "eta_t", float),
        eta_t_null=_require(obj, "eta_t_null", float),
        alpha_targets=tuple(float(t) for t in targets),
        schedule=tuple(parse_look(lk) for lk in schedule_raw),
        prior=parse_prior(obj.get("prior", "reference")),
        attenuation=_require(obj, "attenuation", float, optional=True, default=3.0),
        design_phi=_require(obj, "design_phi", float, optional=True, default=1.0),
    )


def cutoffs_to_dict(q: CutoffParameters) -> dict:
    return {"lambda_e": q.lambda_e, "lambda_t": q.lambda_t, "gamma": q.gamma}


def parse_cutoffs(obj: dict) -> CutoffParameters:
    return CutoffParameters(
        lambda_e=_require(obj, "lambda_e", float),
        lambda_t=_require(obj, "lambda_t", float),
        gamma=_require(obj, "gamma", float),
    )


def boundaries_to_dict(b: StoppingBoundaries) -> dict:
    return {"efficacy": list(b.efficacy), "toxicity": list(b.toxicity)}


def parse_boundaries(obj: dict) -> StoppingBoundaries:
    eff = _require(obj, "efficacy", list)
    tox = _require(obj, "toxicity", list)
    for name, vals in (("efficacy", eff), ("toxicity", tox)):
        if any(isinstance(v, bool) or not isinstance(v, int) for v in vals):
            raise ValidationError(name, f"expected integers, got {vals}")
    return StoppingBoundaries(tuple(eff), tuple(tox))


def oc_to_dict(oc: OperatingCharacteristics) -> dict:
    return {
        "pcp": oc.pcp,
        "pet": oc.pet,
        "ess": oc.ess,
        "stage_pass_probs": list(oc.stage_pass_probs),
    }


def mc_oc_to_dict(oc: MonteCarloOC) -> dict:
    return {
        "pcp": oc.pcp,
        "pet": oc.pet,
        "ess": oc.ess,
        "pcp_se": oc.pcp_se,
        "pet_se": oc.pet_se,
        "ess_se": oc.ess_se,
        "replicates": oc.replicates,
    }


def result_to_dict(result: OptimizationResult) -> dict:
    return {
        "q": None if result.q is None else cutoffs_to_dict(result.q),
        "boundaries": boundaries_to_dict(result.boundaries),
        "oc": {code: oc_to_dict(oc) for code, oc in result.oc.items()},
        "alphas": result.alphas,
        "feasible": result.feasible,
        "candidates_evaluated": result.candidates_evaluated,
        "distinct_boundaries": result.distinct_boundaries,
        "method": result.method,
    }


def parse_result(obj: dict) -> OptimizationResult:
    q_raw = obj.get("q")
    oc_raw = _require(obj, "oc", dict)
    oc = {}
    for code in ("h00", "h01", "h10", "h11"):
        entry = _require(oc_raw, code, dict)
        oc[code] = OperatingCharacteristics(
            pcp=_require(entry, "pcp", float),
            pet=_require(entry, "pet", float),
            ess=_require(entry, "ess", float),
            stage_pass_probs=tuple(_require(entry, "stage_pass_probs", list)),
        )
    return OptimizationResult(
        q=None if q_raw is None else parse_cutoffs(q_raw),
        boundaries=parse_boundaries(_require(obj, "boundaries", dict)),
        oc=oc,
        feasible=_require(obj, "feasible", bool),
        candidates_evaluated=_require(obj, "candidates_evaluated", int),
        distinct_boundaries=_require(obj, "distinct_boundaries", int),
        method=_require(obj, "method", str, optional=True, default="grid"),
    )


def outcome_to_dict(dist: OutcomeProbabilities) -> dict:
    return {"pi_e": dist.pi_e, "pi_t": dist.pi_t, "pi_et": dist.pi_et}


def parse_outcome(obj: dict) -> OutcomeProbabilities:
    pi_e = _require(obj, "pi_e", float)
    pi_t = _require(obj, "pi_t", float)
    if "pi_et" in obj and "phi" in obj:
        raise ValidationError("pi_et", "give either pi_et or phi, not both")
    if "phi" in obj:
        return OutcomeProbabilities.from_phi(pi_e, pi_t, _require(obj, "phi", float))
    if "pi_et" in obj:
        return OutcomeProbabilities(pi_e, pi_t, _require(obj, "pi_et", float))
    return OutcomeProbabilities.independent(pi_e, pi_t)


def parse_trial_data(obj: dict) -> TrialData:
    n = _require(obj, "n", int)
    if "x" in obj:
        x = _require(obj, "x", list)
        if len(x) != 4 or any(isinstance(v, bool) or not isinstance(v, int) for v in x):
            raise ValidationError("x", f"expected 4 integer counts, got {x}")
        return TrialData(n, tuple(x))
    return TrialData.from_margins(n, _require(obj, "x_e", int), _require(obj, "x_t", int))


def decision_to_dict(decision: InterimDecision) -> dict:
    return {
        "decision": decision.decision,
        "reasons": list(decision.reasons),
        "n": decision.n,
        "x_e": decision.x_e,
        "x_t": decision.x_t,
        "boundary_efficacy": decision.boundary_efficacy,
        "boundary_toxicity": decision.boundary_toxicity,
        "posterior_prob_efficacy": decision.posterior_prob_efficacy,
        "posterior_prob_toxicity": decision.posterior_prob_toxicity,
        "cutoff_efficacy_value": decision.cutoff_efficacy_value,
        "cutoff_toxicity_value": decision.cutoff_toxicity_value,
    }


def parse_simulation_config(obj: dict) -> SimulationConfig:
    truth_raw = obj.get("truth")
    truth = None
    if truth_raw is not None:
        if not isinstance(truth_raw, list):
            raise ValidationError("truth", f"expected a list of outcome laws, got {type(truth_raw).__name__}")
        truth = tuple(parse_outcome(t) for t in truth_raw)
    return SimulationConfig(
        replicates=_require(obj, "replicates", int),
        seed=_require(obj, "seed", int),
        truth=truth,
    )


def dose_spec_to_dict(dspec: DoseOptimizationSpec) -> dict:
    return {
        "arms": list(dspec.arms),
        "per_arm_design": spec_to_dict(dspec.per_arm_design),
        "delta": dspec.delta,
        "cutoffs": None if dspec.cutoffs is None else cutoffs_to_dict(dspec.cutoffs),
        "boundaries": None if dspec.boundaries is None else boundaries_to_dict(dspec.boundaries),
    }


def parse_dose_spec(obj: dict) -> DoseOptimizationSpec:
    arms = _require(obj, "arms", list)
    if not all(isinstance(a, str) for a in arms):
        raise ValidationError("arms", f"expected string labels, got {arms}")
    cutoffs_raw = obj.get("cutoffs")
    boundaries_raw = obj.get("boundaries")
    return DoseOptimizationSpec(
        arms=tuple(arms),
        per_arm_design=parse_design_spec(_require(obj, "per_arm_design", dict)),
        delta=_require(obj, "delta", float, optional=True, default=0.8),
        cutoffs=None if cutoffs_raw is None else parse_cutoffs(cutoffs_raw),
        boundaries=None if boundaries_raw is None else parse_boundaries(boundaries_raw),
    )


def multidose_result_to_dict(result: MultiDoseResult) -> dict:
    return {
        "arms": [
            {
                "label": arm.label,
                "selection_pct": arm.selection_pct,
                "early_stop_pct": arm.early_stop_pct,
                "average_enrolled": arm.average_enrolled,
            }
            for arm in result.arms
        ],
        "none_selected_pct": result.none_selected_pct,
        "replicates": result.replicates,
    }


def parse_multidose_result(obj: dict) -> MultiDoseResult:
    arms = tuple(
        ArmResult(
            label=_require(a, "label", str),
            selection_pct=_require(a, "selection_pct", float),
            early_stop_pct=_require(a, "early_stop_pct", float),
            average_enrolled=_require(a, "average_enrolled", float),
        )
        for a in _require(obj, "arms", list)
    )
    return MultiDoseResult(
        arms=arms,
        none_selected_pct=_require(obj, "none_selected_pct", float),
        replicates=_require(obj, "replicates", int),
    )
