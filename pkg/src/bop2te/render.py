"""Human-readable tables, deterministic protocol text, and report files.

Display rounding is fixed here and only here: boundaries as integers,
probabilities to 4 decimals, expected sample sizes to 2 decimals. JSON
output always carries full precision; rounding is a display concern.
"""

from __future__ import annotations

import csv
import json
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .design import DesignSpec, InterimDecision, StoppingBoundaries
from .mc import MonteCarloOC, MultiDoseResult
from .oc import OperatingCharacteristics
from .search import OptimizationResult

HYPOTHESIS_LABELS = {
    "h00": "efficacy null, toxicity null",
    "h01": "efficacy null, toxicity target",
    "h10": "efficacy target, toxicity null",
    "h11": "efficacy target, toxicity target",
}


def fmt_prob(x: float) -> str:
    return f"{x:.4f}"


def fmt_ess(x: float) -> str:
    return f"{x:.2f}"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, row)]
    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(row) for row in rows)
    return "\n".join(out)


def boundary_rows(spec: DesignSpec, boundaries: StoppingBoundaries) -> list[list[str]]:
    eff = {look.n: l for look, l in zip(spec.efficacy_looks(), boundaries.efficacy)}
    tox = {look.n: l for look, l in zip(spec.toxicity_looks(), boundaries.toxicity)}
    rows = []
    for i, look in enumerate(spec.schedule, start=1):
        rows.append([
            str(i),
            str(look.n),
            str(eff[look.n]) if look.n in eff else "-",
            str(tox[look.n]) if look.n in tox else "-",
        ])
    return rows


def format_boundary_table(spec: DesignSpec, boundaries: StoppingBoundaries) -> str:
    return _table(
        ["look", "n", "stop if responses <=", "stop if toxicities >="],
        boundary_rows(spec, boundaries),
    )


def format_design(spec: DesignSpec, result: OptimizationResult, label: str = "") -> str:
    parts = []
    if label:
        parts.append(label)
    if result.q is not None:
        parts.append(
            "cutoffs: lambda_e={:.4f} lambda_t={:.4f} gamma={:.6f}".format(
                result.q.lambda_e, result.q.lambda_t, result.q.gamma
            )
        )
    parts.append(format_boundary_table(spec, result.boundaries))
    a = result.alphas
    parts.append(
        _table(
            ["alpha00", "alpha01", "alpha10", "power", "feasible"],
            [[
                fmt_prob(a["alpha00"]),
                fmt_prob(a["alpha01"]),
                fmt_prob(a["alpha10"]),
                fmt_prob(a["power"]),
                "yes" if result.feasible else "NO",
            ]],
        )
    )
    parts.append(
        f"candidates evaluated: {result.candidates_evaluated}"
        f" (distinct boundary sets: {result.distinct_boundaries})"
    )
    parts.append(format_oc_table(result.oc))
    return "\n\n".join(parts)


def format_oc_table(
    ocs: dict[str, OperatingCharacteristics],
    mc: dict[str, MonteCarloOC] | None = None,
) -> str:
    headers = ["hypothesis", "claim", "early stop", "expected n"]
    if mc is not None:
        headers += ["mc claim (se)", "mc early stop (se)", "mc expected n (se)"]
    rows = []
    for code in ("h00", "h01", "h10", "h11"):
        oc = ocs[code]
        row = [HYPOTHESIS_LABELS[code], fmt_prob(oc.pcp), fmt_prob(oc.pet), fmt_ess(oc.ess)]
        if mc is not None:
            est = mc[code]
            row += [
                f"{fmt_prob(est.pcp)} ({fmt_prob(est.pcp_se)})",
                f"{fmt_prob(est.pet)} ({fmt_prob(est.pet_se)})",
                f"{fmt_ess(est.ess)} ({fmt_ess(est.ess_se)})",
            ]
        rows.append(row)
    return _table(headers, rows)


def format_decision(decision: InterimDecision) -> str:
    lines = [
        f"decision: {decision.decision.upper()}",
        f"reasons: {', '.join(decision.reasons) if decision.reasons else 'none'}",
        f"n={decision.n} responses={decision.x_e} toxicities={decision.x_t}",
    ]
    if decision.boundary_efficacy is not None:
        lines.append(
            f"futility boundary: stop if responses <= {decision.boundary_efficacy}"
        )
    if decision.boundary_toxicity is not None:
        lines.append(
            f"toxicity boundary: stop if toxicities >= {decision.boundary_toxicity}"
        )
    lines.append(
        "posterior Pr(efficacy rate above unacceptable) = "
        + fmt_prob(decision.posterior_prob_efficacy)
    )
    lines.append(
        "posterior Pr(toxicity rate at or below unacceptable) = "
        + fmt_prob(decision.posterior_prob_toxicity)
    )
    if decision.cutoff_efficacy_value is not None:
        lines.append("efficacy cutoff = " + fmt_prob(decision.cutoff_efficacy_value))
    if decision.cutoff_toxicity_value is not None:
        lines.append("toxicity cutoff = " + fmt_prob(decision.cutoff_toxicity_value))
    return "\n".join(lines)


def format_multidose(result: MultiDoseResult) -> str:
    rows = [
        [
            arm.label,
            f"{arm.selection_pct:.1f}",
            f"{arm.early_stop_pct:.1f}",
            f"{arm.average_enrolled:.2f}",
        ]
        for arm in result.arms
    ]
    table = _table(["arm", "selected %", "early stop %", "avg enrolled"], rows)
    return (
        table
        + f"\n\nno dose selected: {result.none_selected_pct:.1f}%"
        + f"\nreplicates: {result.replicates}"
    )


def protocol_text(
    design_id: str, spec: DesignSpec, result: OptimizationResult, annotation: str = ""
) -> str:
    """Deterministic protocol rendering; identical inputs give identical bytes."""
    prior = spec.prior if isinstance(spec.prior, str) else f"tau={list(spec.prior.tau)}"
    lines = [
        "TRIAL MONITORING PROTOCOL",
        "=========================",
        "",
        f"design id: {design_id}",
    ]
    if annotation:
        lines.append(f"annotation: {annotation}")
    lines += [
        "",
        "Design parameters",
        "-----------------",
        f"unacceptable efficacy rate: {spec.eta_e_null}",
        f"target efficacy rate:       {spec.eta_e}",
        f"unacceptable toxicity rate: {spec.eta_t_null}",
        f"target toxicity rate:       {spec.eta_t}",
        "error targets (both null / efficacy null / toxicity null): "
        + " / ".join(str(a) for a in spec.alpha_targets),
        f"prior: {prior}",
        f"toxicity cutoff attenuation: {spec.attenuation}",
        f"design odds ratio: {spec.design_phi}",
        "",
        "Stopping rule",
        "-------------",
        "At each look, stop for futility when the response count is at or",
        "below the futility boundary; stop for toxicity when the toxicity",
        "count is at or above the toxicity boundary. Otherwise continue.",
        "A trial that passes every look claims the treatment promising.",
        "",
        format_boundary_table(spec, result.boundaries),
        "",
        "Operating characteristics",
        "-------------------------",
        format_oc_table(result.oc),
        "",
    ]
    a = result.alphas
    lines.append(
        "error rates: alpha00={} alpha01={} alpha10={} power={}".format(
            fmt_prob(a["alpha00"]), fmt_prob(a["alpha01"]), fmt_prob(a["alpha10"]), fmt_prob(a["power"])
        )
    )
    return "\n".join(lines) + "\n"


def write_json(path: str, payload: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def design_report_rows(spec: DesignSpec, result: OptimizationResult) -> list[dict]:
    eff = {look.n: l for look, l in zip(spec.efficacy_looks(), result.boundaries.efficacy)}
    tox = {look.n: l for look, l in zip(spec.toxicity_looks(), result.boundaries.toxicity)}
    return [
        {
            "look": i,
            "n": look.n,
            "futility_boundary": eff.get(look.n, ""),
            "toxicity_boundary": tox.get(look.n, ""),
        }
        for i, look in enumerate(spec.schedule, start=1)
    ]


def oc_report_rows(
    ocs: dict[str, OperatingCharacteristics], mc: dict[str, MonteCarloOC] | None = None
) -> list[dict]:
    rows = []
    for code in ("h00", "h01", "h10", "h11"):
        oc = ocs[code]
        row = {"hypothesis": code, "pcp": oc.pcp, "pet": oc.pet, "ess": oc.ess}
        if mc is not None:
            est = mc[code]
            row.update(
                mc_pcp=est.pcp, mc_pcp_se=est.pcp_se,
                mc_pet=est.pet, mc_pet_se=est.pet_se,
                mc_ess=est.ess, mc_ess_se=est.ess_se,
            )
        rows.append(row)
    return rows


def phi_report_rows(curve: dict[str, list[float]]) -> list[dict]:
    return [
        {
            "phi": curve["phi"][i],
            "h00": curve["h00"][i],
            "h01": curve["h01"][i],
            "h10": curve["h10"][i],
            "h11": curve["h11"][i],
        }
        for i in range(len(curve["phi"]))
    ]


def multidose_report_rows(result: MultiDoseResult) -> list[dict]:
    return [
        {
            "arm": arm.label,
            "selection_pct": arm.selection_pct,
            "early_stop_pct": arm.early_stop_pct,
            "average_enrolled": arm.average_enrolled,
        }
        for arm in result.arms
    ]


def figure_boundaries(spec: DesignSpec, boundaries: StoppingBoundaries, path: str) -> None:
    """Staircase view of both stopping boundaries across the schedule."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    eff_ns = [look.n for look in spec.efficacy_looks()]
    tox_ns = [look.n for look in spec.toxicity_looks()]
    ax.step(eff_ns, boundaries.efficacy, where="post", marker="o", label="stop if responses <=")
    ax.step(tox_ns, boundaries.toxicity, where="post", marker="s", label="stop if toxicities >=")
    ax.set_xlabel("patients enrolled")
    ax.set_ylabel("event count")
    ax.set_title("stopping boundaries")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_phi_sensitivity(
    curve: dict[str, list[float]], alpha_targets: tuple[float, float, float], path: str
) -> None:
    """Error rates and power against the outcome odds ratio, with nominal lines."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for code, style in (("h00", "o-"), ("h01", "s-"), ("h10", "^-"), ("h11", "d-")):
        ax.plot(curve["phi"], curve[code], style, label=HYPOTHESIS_LABELS[code], markersize=4)
    for target, ls in zip(alpha_targets, (":", "--", "-.")):
        ax.axhline(target, color="grey", linestyle=ls, linewidth=1, label=f"nominal {target}")
    ax.set_xscale("log")
    ax.set_xlabel("outcome odds ratio")
    ax.set_ylabel("claim probability")
    ax.set_title("sensitivity to efficacy-toxicity association")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_oc(ocs: dict[str, OperatingCharacteristics], path: str) -> None:
    """Claim and early-stop probabilities per hypothesis corner."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    codes = ["h00", "h01", "h10", "h11"]
    xs = range(len(codes))
    width = 0.35
    ax.bar([x - width / 2 for x in xs], [ocs[c].pcp for c in codes], width, label="claim")
    ax.bar([x + width / 2 for x in xs], [ocs[c].pet for c in codes], width, label="early stop")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([HYPOTHESIS_LABELS[c] for c in codes], fontsize=7)
    ax.set_ylabel("probability")
    ax.set_title("operating characteristics")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_multidose(result: MultiDoseResult, path: str) -> None:
    """Selection and early-stop percentages per dose arm."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = [arm.label for arm in result.arms]
    xs = range(len(labels))
    width = 0.35
    ax.bar([x - width / 2 for x in xs], [a.selection_pct for a in result.arms], width, label="selected %")
    ax.bar([x + width / 2 for x in xs], [a.early_stop_pct for a in result.arms], width, label="early stop %")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylabel("percent of replicates")
    ax.set_title("dose optimization outcomes")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
