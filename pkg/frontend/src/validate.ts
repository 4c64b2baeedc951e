/**
 * Client-side form model and validation. The rules mirror the service's
 * design constraints so impossible settings are rejected inline, before any
 * request leaves the browser. Error keys reuse the service's field names so
 * 400 responses land in the same message slots.
 */

import type { DesignSpecJson } from "./schema.js";

export interface UiLookRow {
  n: string;
  checkEfficacy: boolean;
  checkToxicity: boolean;
}

export interface UiDesignForm {
  etaE: string;
  etaENull: string;
  etaT: string;
  etaTNull: string;
  alpha00: string;
  alpha01: string;
  alpha10: string;
  schedule: UiLookRow[];
  prior: string;
  attenuation: string;
  designPhi: string;
  method: "grid" | "global" | "global-practical";
  grid: "compact" | "specified";
  annotation: string;
}

export type FieldErrors = Record<string, string>;

export interface ValidatedForm {
  spec?: DesignSpecJson;
  errors: FieldErrors;
}

export function defaultDesignForm(): UiDesignForm {
  return {
    etaE: "0.60",
    etaENull: "0.30",
    etaT: "0.20",
    etaTNull: "0.40",
    alpha00: "0.025",
    alpha01: "0.10",
    alpha10: "0.10",
    schedule: [
      { n: "9", checkEfficacy: false, checkToxicity: true },
      { n: "18", checkEfficacy: true, checkToxicity: true },
      { n: "36", checkEfficacy: true, checkToxicity: true },
    ],
    prior: "reference",
    attenuation: "3",
    designPhi: "1",
    method: "grid",
    grid: "compact",
    annotation: "",
  };
}

function parseNumber(raw: string): number | null {
  const value = Number(raw.trim());
  return raw.trim() === "" || Number.isNaN(value) ? null : value;
}

function parseRate(raw: string, field: string, errors: FieldErrors): number | null {
  const value = parseNumber(raw);
  if (value === null) {
    errors[field] = "enter a number";
    return null;
  }
  if (value <= 0 || value >= 1) {
    errors[field] = "must lie strictly between 0 and 1";
    return null;
  }
  return value;
}

export function validateDesignForm(form: UiDesignForm): ValidatedForm {
  const errors: FieldErrors = {};
  const etaE = parseRate(form.etaE, "eta_e", errors);
  const etaENull = parseRate(form.etaENull, "eta_e_null", errors);
  const etaT = parseRate(form.etaT, "eta_t", errors);
  const etaTNull = parseRate(form.etaTNull, "eta_t_null", errors);
  if (etaE !== null && etaENull !== null && etaENull >= etaE) {
    errors.eta_e = "the target response rate must exceed the unacceptable rate";
  }
  if (etaT !== null && etaTNull !== null && etaT >= etaTNull) {
    errors.eta_t = "the acceptable toxicity rate must be below the unacceptable rate";
  }

  const alphas = [form.alpha00, form.alpha01, form.alpha10].map((raw, i) =>
    parseRate(raw, `alpha_targets.${i}`, errors)
  );

  const looks: { n: number; check_efficacy: boolean; check_toxicity: boolean }[] = [];
  if (form.schedule.length === 0) {
    errors.schedule = "add at least one analysis";
  }
  form.schedule.forEach((row, i) => {
    const n = parseNumber(row.n);
    if (n === null || !Number.isInteger(n) || n < 1) {
      errors[`schedule.${i}`] = "sample size must be a positive integer";
      return;
    }
    if (!row.checkEfficacy && !row.checkToxicity) {
      errors[`schedule.${i}`] = "an analysis must monitor at least one endpoint";
      return;
    }
    looks.push({ n, check_efficacy: row.checkEfficacy, check_toxicity: row.checkToxicity });
  });
  if (!("schedule" in errors) && looks.length === form.schedule.length) {
    for (let i = 1; i < looks.length; i++) {
      if (looks[i].n <= looks[i - 1].n) {
        errors.schedule = "sample sizes must strictly increase";
        break;
      }
    }
    const last = looks[looks.length - 1];
    if (last && (!last.check_efficacy || !last.check_toxicity)) {
      errors.schedule = "the final analysis must monitor both endpoints";
    }
  }

  const attenuation = parseNumber(form.attenuation);
  if (attenuation === null || attenuation <= 0) {
    errors.attenuation = "must be a positive number";
  }
  const designPhi = parseNumber(form.designPhi);
  if (designPhi === null || designPhi <= 0) {
    errors.design_phi = "must be a positive number";
  }

  if (Object.keys(errors).length > 0) {
    return { errors };
  }
  return {
    errors,
    spec: {
      eta_e: etaE!,
      eta_e_null: etaENull!,
      eta_t: etaT!,
      eta_t_null: etaTNull!,
      alpha_targets: [alphas[0]!, alphas[1]!, alphas[2]!],
      schedule: looks,
      prior: form.prior,
      attenuation: attenuation!,
      design_phi: designPhi!,
    },
  };
}
