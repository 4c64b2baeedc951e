/**
 * Page actions as pure async functions over an Api. The DOM layer calls these
 * and injects the returned HTML/SVG strings; tests call them directly with a
 * fixture-backed Api, so the scripted console flow exercises the same code
 * the browser runs.
 */

import { ApiError, type Api, type OcRequestBody } from "./api.js";
import { phiChartSvg } from "./chart.js";
import {
  type DecisionLog,
  type Decision,
  type DesignDocument,
  type MultidosePayload,
  type OcPayload,
} from "./schema.js";
import { validateDesignForm, type FieldErrors, type UiDesignForm } from "./validate.js";
import {
  boundaryTableHtml,
  decisionPanelHtml,
  designSummaryHtml,
  errorBannerHtml,
  historyTableHtml,
  multidoseTableHtml,
  ocTableHtml,
  slackBadgesHtml,
} from "./views.js";

export type ActionFailure =
  | { kind: "invalid"; errors: FieldErrors }
  | { kind: "error"; message: string; field: string | null };

function failure(err: unknown): ActionFailure {
  if (err instanceof ApiError) {
    if (err.status === 400 && err.field !== null) {
      return { kind: "invalid", errors: { [err.field]: err.message } };
    }
    return { kind: "error", message: err.message, field: err.field };
  }
  throw err;
}

export interface DesignSaved {
  kind: "saved";
  doc: DesignDocument;
  html: string;
}

export async function submitDesign(
  api: Api,
  form: UiDesignForm
): Promise<DesignSaved | ActionFailure> {
  const checked = validateDesignForm(form);
  if (checked.spec === undefined) {
    return { kind: "invalid", errors: checked.errors };
  }
  try {
    const doc = await api.createDesign({
      spec: checked.spec,
      method: form.method,
      grid: form.grid,
      annotation: form.annotation.trim() === "" ? undefined : form.annotation.trim(),
    });
    const result = doc.result;
    const html =
      result === null
        ? designSummaryHtml(doc) + errorBannerHtml("the design has no stored result")
        : designSummaryHtml(doc) +
          slackBadgesHtml(doc.spec, result) +
          boundaryTableHtml(doc.spec, result.boundaries);
    return { kind: "saved", doc, html };
  } catch (err) {
    return failure(err);
  }
}

export interface OcComputed {
  kind: "oc";
  payload: OcPayload;
  tableHtml: string;
  chartSvg: string | null;
}

export interface OcOptions {
  mc?: { replicates: number; seed: number };
  phiGrid?: number[];
}

export async function computeOc(
  api: Api,
  designId: string,
  options: OcOptions = {}
): Promise<OcComputed | ActionFailure> {
  try {
    const doc = await api.getDesign(designId);
    const body: OcRequestBody = {};
    if (options.mc) body.mc = options.mc;
    if (options.phiGrid) body.phi_grid = options.phiGrid;
    const payload = await api.computeOc(designId, body);
    const tableHtml = ocTableHtml(doc.spec, payload);
    const chartSvg = payload.phi_curve
      ? phiChartSvg(payload.phi_curve, doc.spec.alpha_targets, {
          mc: payload.mc,
          designPhi: doc.spec.design_phi,
        })
      : null;
    return { kind: "oc", payload, tableHtml, chartSvg };
  } catch (err) {
    return failure(err);
  }
}

export interface DecisionRecorded {
  kind: "decision";
  decision: Decision;
  log: DecisionLog;
  panelHtml: string;
  historyHtml: string;
}

export interface UiTrialEntry {
  n: string;
  xE: string;
  xT: string;
}

function parseCount(value: string, field: string, errors: FieldErrors): number {
  const v = Number(value.trim());
  if (!Number.isInteger(v) || v < 0) {
    errors[field] = "enter a non-negative whole number";
    return 0;
  }
  return v;
}

export async function submitDecision(
  api: Api,
  designId: string,
  entry: UiTrialEntry
): Promise<DecisionRecorded | ActionFailure> {
  const errors: FieldErrors = {};
  const n = parseCount(entry.n, "n", errors);
  const xE = parseCount(entry.xE, "x_e", errors);
  const xT = parseCount(entry.xT, "x_t", errors);
  if (Object.keys(errors).length === 0 && xE > n) {
    errors.x_e = "responses cannot exceed the number of patients";
  }
  if (Object.keys(errors).length === 0 && xT > n) {
    errors.x_t = "toxicities cannot exceed the number of patients";
  }
  if (Object.keys(errors).length > 0) {
    return { kind: "invalid", errors };
  }
  try {
    const decision = await api.postDecision(designId, { n, x_e: xE, x_t: xT });
    const log = await api.getDecisions(designId);
    return {
      kind: "decision",
      decision,
      log,
      panelHtml: decisionPanelHtml(decision),
      historyHtml: historyTableHtml(log),
    };
  } catch (err) {
    return failure(err);
  }
}

export async function refreshHistory(
  api: Api,
  designId: string
): Promise<{ kind: "history"; log: DecisionLog; historyHtml: string } | ActionFailure> {
  try {
    const log = await api.getDecisions(designId);
    return { kind: "history", log, historyHtml: historyTableHtml(log) };
  } catch (err) {
    return failure(err);
  }
}

export interface UiArmRow {
  label: string;
  piE: string;
  piT: string;
}

export interface UiMultidoseForm {
  arms: UiArmRow[];
  designId: string;
  replicates: string;
  seed: string;
  delta: string;
}

export interface MultidoseRun {
  kind: "multidose";
  payload: MultidosePayload;
  html: string;
}

export async function runMultidose(
  api: Api,
  form: UiMultidoseForm
): Promise<MultidoseRun | ActionFailure> {
  const errors: FieldErrors = {};
  if (form.arms.length === 0) {
    errors.arms = "add at least one dose arm";
  }
  const truth: { pi_e: number; pi_t: number }[] = [];
  form.arms.forEach((arm, i) => {
    if (arm.label.trim() === "") errors[`arms.${i}`] = "label the arm";
    const piE = Number(arm.piE);
    const piT = Number(arm.piT);
    if (!(piE >= 0 && piE <= 1)) errors[`truth.${i}.pi_e`] = "enter a probability in [0, 1]";
    if (!(piT >= 0 && piT <= 1)) errors[`truth.${i}.pi_t`] = "enter a probability in [0, 1]";
    truth.push({ pi_e: piE, pi_t: piT });
  });
  const replicates = Number(form.replicates.trim());
  if (!Number.isInteger(replicates) || replicates <= 0) {
    errors.replicates = "enter a positive whole number of replicates";
  }
  const seed = Number(form.seed.trim() === "" ? "0" : form.seed.trim());
  if (!Number.isInteger(seed) || seed < 0) {
    errors.seed = "enter a non-negative whole-number seed";
  }
  const delta = Number(form.delta.trim());
  if (!(delta > 0 && delta <= 1)) {
    errors.delta = "enter an equivalence fraction in (0, 1]";
  }
  if (form.designId.trim() === "") {
    errors.design_id = "pick the stored design used for every arm";
  }
  if (Object.keys(errors).length > 0) {
    return { kind: "invalid", errors };
  }
  try {
    const doc = await api.getDesign(form.designId.trim());
    const body: Record<string, unknown> = {
      arms: form.arms.map((a) => a.label.trim()),
      per_arm_design: doc.spec,
      delta,
      replicates,
      seed,
      truth,
    };
    if (doc.result !== null) {
      body.boundaries = doc.result.boundaries;
    }
    const payload = await api.simulateMultidose(body);
    return { kind: "multidose", payload, html: multidoseTableHtml(payload) };
  } catch (err) {
    return failure(err);
  }
}
