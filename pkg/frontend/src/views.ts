/**
 * Pure HTML renderers. Every number shown here is read verbatim from an API
 * payload and passed through the shared formatters; no statistic is derived
 * client-side.
 */

import { escapeHtml, fmtEss, fmtPct, fmtProb, fmtSlack } from "./format.js";
import {
  HYPOTHESES,
  type Boundaries,
  type Decision,
  type DecisionLog,
  type DesignDocument,
  type DesignSpecJson,
  type HypothesisCode,
  type MultidosePayload,
  type OcPayload,
  type OptimizationResult,
} from "./schema.js";

const HYPOTHESIS_LABEL: Record<HypothesisCode, string> = {
  h00: "futile and toxic",
  h01: "futile, safe",
  h10: "efficacious, toxic",
  h11: "efficacious and safe",
};

export function hypothesisMargins(
  spec: DesignSpecJson,
  code: HypothesisCode
): { piE: number; piT: number } {
  return {
    piE: code === "h10" || code === "h11" ? spec.eta_e : spec.eta_e_null,
    piT: code === "h00" || code === "h10" ? spec.eta_t_null : spec.eta_t,
  };
}

/** Look sizes as columns, one row per monitored endpoint. */
export function boundaryTableHtml(spec: DesignSpecJson, boundaries: Boundaries): string {
  const ns = spec.schedule.map((look) => look.n);
  let effIdx = 0;
  let toxIdx = 0;
  const effCells: string[] = [];
  const toxCells: string[] = [];
  for (const look of spec.schedule) {
    effCells.push(look.check_efficacy ? String(boundaries.efficacy[effIdx++]) : "&ndash;");
    toxCells.push(look.check_toxicity ? String(boundaries.toxicity[toxIdx++]) : "&ndash;");
  }
  const header = ns.map((n) => `<th>${n}</th>`).join("");
  return `<table class="boundary-table" data-testid="boundary-table">
<thead><tr><th>patients enrolled</th>${header}</tr></thead>
<tbody>
<tr data-endpoint="efficacy"><td>stop if responses &le;</td>${effCells
    .map((c) => `<td>${c}</td>`)
    .join("")}</tr>
<tr data-endpoint="toxicity"><td>stop if toxicities &ge;</td>${toxCells
    .map((c) => `<td>${c}</td>`)
    .join("")}</tr>
</tbody></table>`;
}

/** One badge per error-rate constraint showing target, achieved, and slack. */
export function slackBadgesHtml(spec: DesignSpecJson, result: OptimizationResult): string {
  const entries: [string, number, number][] = [
    ["joint error", result.alphas.alpha00, spec.alpha_targets[0]],
    ["futility-only error", result.alphas.alpha01, spec.alpha_targets[1]],
    ["toxicity-only error", result.alphas.alpha10, spec.alpha_targets[2]],
  ];
  const badges = entries
    .map(([label, achieved, target]) => {
      const slack = target - achieved;
      const cls = slack >= 0 ? "ok" : "bad";
      return `<span class="badge ${cls}" data-constraint="${label}">${label}: ${fmtProb(
        achieved
      )} / ${fmtProb(target)} (slack ${fmtSlack(slack)})</span>`;
    })
    .join("\n");
  const power = `<span class="badge power">power: ${fmtProb(result.alphas.power)}</span>`;
  const feasible = result.feasible
    ? `<span class="badge ok">all constraints met</span>`
    : `<span class="badge bad">constraints violated</span>`;
  return `<div class="badges">${badges}\n${power}\n${feasible}</div>`;
}

export function designSummaryHtml(doc: DesignDocument): string {
  const result = doc.result;
  const method = result ? escapeHtml(result.method) : "none";
  const candidates = result ? `${result.candidates_evaluated}` : "0";
  const annotation = doc.annotation
    ? `<div class="annotation">${escapeHtml(doc.annotation)}</div>`
    : "";
  return `<div class="design-summary" data-design-id="${escapeHtml(doc.id)}">
<span class="design-id">design ${escapeHtml(doc.id)}</span>
<span>search: ${method}</span>
<span>candidates evaluated: ${candidates}</span>
${annotation}</div>`;
}

export function ocTableHtml(spec: DesignSpecJson, payload: OcPayload): string {
  const withMc = payload.mc !== undefined;
  const mcHeader = withMc
    ? "<th>simulated claim (se)</th><th>simulated stop (se)</th><th>simulated n (se)</th>"
    : "";
  const rows = HYPOTHESES.map((code) => {
    const oc = payload.oc[code];
    const { piE, piT } = hypothesisMargins(spec, code);
    let mcCells = "";
    if (withMc) {
      const mc = payload.mc![code];
      mcCells =
        `<td>${fmtProb(mc.pcp)} (${fmtProb(mc.pcp_se)})</td>` +
        `<td>${fmtProb(mc.pet)} (${fmtProb(mc.pet_se)})</td>` +
        `<td>${fmtEss(mc.ess)} (${fmtEss(mc.ess_se)})</td>`;
    }
    return `<tr data-hypothesis="${code}"><td>${code.toUpperCase()} (${
      HYPOTHESIS_LABEL[code]
    })</td><td>(${piE}, ${piT})</td><td>${fmtProb(oc.pcp)}</td><td>${fmtProb(
      oc.pet
    )}</td><td>${fmtEss(oc.ess)}</td>${mcCells}</tr>`;
  }).join("\n");
  return `<table class="oc-table" data-testid="oc-table">
<thead><tr><th>hypothesis</th><th>(&pi;<sub>E</sub>, &pi;<sub>T</sub>)</th><th>claim</th><th>early stop</th><th>expected n</th>${mcHeader}</tr></thead>
<tbody>${rows}</tbody></table>`;
}

export function decisionPanelHtml(decision: Decision): string {
  const go = decision.decision === "go";
  const badge = go
    ? `<span class="decision-badge go" data-testid="decision-badge">GO</span>`
    : `<span class="decision-badge no-go" data-testid="decision-badge">NO-GO</span>`;
  const reasons = decision.reasons.length
    ? `<div class="reasons" data-testid="decision-reasons">stopping reasons: ${decision.reasons.join(
        ", "
      )}</div>`
    : "";
  const lines: string[] = [];
  if (decision.posterior_prob_efficacy !== null) {
    const cutoff =
      decision.cutoff_efficacy_value !== null
        ? ` vs cutoff ${fmtProb(decision.cutoff_efficacy_value)}`
        : "";
    lines.push(
      `<div>response probability exceeds the unacceptable rate: ${fmtProb(
        decision.posterior_prob_efficacy
      )}${cutoff}</div>`
    );
  }
  if (decision.posterior_prob_toxicity !== null) {
    const cutoff =
      decision.cutoff_toxicity_value !== null
        ? ` vs cutoff ${fmtProb(decision.cutoff_toxicity_value)}`
        : "";
    lines.push(
      `<div>toxicity probability within the acceptable rate: ${fmtProb(
        decision.posterior_prob_toxicity
      )}${cutoff}</div>`
    );
  }
  return `<div class="decision-panel">
<div>at n=${decision.n}: ${decision.x_e} responses, ${decision.x_t} toxicities</div>
${badge}
${reasons}
${lines.join("\n")}
</div>`;
}

export function historyTableHtml(log: DecisionLog): string {
  if (log.decisions.length === 0) {
    return `<p class="muted">no recorded decisions yet</p>`;
  }
  const rows = log.decisions
    .map(
      (entry) =>
        `<tr><td>${entry.n}</td><td>${entry.x_e}</td><td>${entry.x_t}</td><td>${entry.decision.toUpperCase()}</td><td>${entry.reasons.join(", ")}</td><td>${escapeHtml(entry.recorded_at)}</td></tr>`
    )
    .join("\n");
  return `<table class="history-table" data-testid="decision-history">
<thead><tr><th>n</th><th>responses</th><th>toxicities</th><th>decision</th><th>reasons</th><th>recorded</th></tr></thead>
<tbody>${rows}</tbody></table>`;
}

export function multidoseTableHtml(payload: MultidosePayload): string {
  const rows = payload.result.arms
    .map(
      (arm) =>
        `<tr data-arm="${escapeHtml(arm.label)}"><td>${escapeHtml(arm.label)}</td><td>${fmtPct(
          arm.selection_pct
        )}</td><td>${fmtPct(arm.early_stop_pct)}</td><td>${fmtEss(arm.average_enrolled)}</td></tr>`
    )
    .join("\n");
  const boundaries = payload.boundaries;
  return `<div class="multidose-report">
<div>per-arm boundaries: responses &le; (${boundaries.efficacy.join(", ")}), toxicities &ge; (${boundaries.toxicity.join(", ")})</div>
<table class="multidose-table" data-testid="multidose-table">
<thead><tr><th>dose</th><th>selection %</th><th>early stop %</th><th>average patients</th></tr></thead>
<tbody>${rows}</tbody></table>
<div>no dose selected: ${fmtPct(payload.result.none_selected_pct)}%</div>
<div>replicates: ${payload.result.replicates}</div>
</div>`;
}

export function errorBannerHtml(message: string): string {
  return `<div class="error-banner" data-testid="error-banner">${escapeHtml(message)}</div>`;
}
