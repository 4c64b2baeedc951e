/**
 * Zod mirrors of the service's JSON schema. Every payload that enters or
 * leaves the console passes through these parsers, so a drifting server
 * contract fails loudly instead of rendering garbage.
 */

import { z } from "zod";

export const lookSchema = z.object({
  n: z.number().int().min(1),
  check_efficacy: z.boolean().default(true),
  check_toxicity: z.boolean().default(true),
});

export const priorSchema = z.union([
  z.string(),
  z.object({ tau: z.array(z.number()).length(4) }),
]);

export const designSpecSchema = z.object({
  eta_e: z.number(),
  eta_e_null: z.number(),
  eta_t: z.number(),
  eta_t_null: z.number(),
  alpha_targets: z.array(z.number()).length(3),
  schedule: z.array(lookSchema).min(1),
  prior: priorSchema.default("reference"),
  attenuation: z.number().default(3.0),
  design_phi: z.number().default(1.0),
});

export const cutoffsSchema = z.object({
  lambda_e: z.number(),
  lambda_t: z.number(),
  gamma: z.number(),
});

export const boundariesSchema = z.object({
  efficacy: z.array(z.number().int()),
  toxicity: z.array(z.number().int()),
});

export const ocSchema = z.object({
  pcp: z.number(),
  pet: z.number(),
  ess: z.number(),
  stage_pass_probs: z.array(z.number()),
});

export const mcOcSchema = z.object({
  pcp: z.number(),
  pet: z.number(),
  ess: z.number(),
  pcp_se: z.number(),
  pet_se: z.number(),
  ess_se: z.number(),
  replicates: z.number().int(),
});

const hypothesisCodes = ["h00", "h01", "h10", "h11"] as const;
export type HypothesisCode = (typeof hypothesisCodes)[number];
export const HYPOTHESES: readonly HypothesisCode[] = hypothesisCodes;

const perHypothesis = <T extends z.ZodType>(value: T) =>
  z.object({ h00: value, h01: value, h10: value, h11: value });

export const resultSchema = z.object({
  q: cutoffsSchema.nullable(),
  boundaries: boundariesSchema,
  oc: perHypothesis(ocSchema),
  alphas: z.object({
    alpha00: z.number(),
    alpha01: z.number(),
    alpha10: z.number(),
    power: z.number(),
  }),
  feasible: z.boolean(),
  candidates_evaluated: z.number().int(),
  distinct_boundaries: z.number().int(),
  method: z.string().default("grid"),
});

export const designDocumentSchema = z.object({
  id: z.string(),
  spec: designSpecSchema,
  spec_hash: z.string(),
  result: resultSchema.nullable(),
  result_hash: z.string().nullable(),
  annotation: z.string(),
  created_at: z.string(),
  updated_at: z.string(),
});

export const designListSchema = z.object({
  designs: z.array(designDocumentSchema),
});

export const phiCurveSchema = z.object({
  phi: z.array(z.number()),
  h00: z.array(z.number()),
  h01: z.array(z.number()),
  h10: z.array(z.number()),
  h11: z.array(z.number()),
});

export const ocPayloadSchema = z.object({
  design_id: z.string(),
  boundaries: boundariesSchema,
  oc: perHypothesis(ocSchema),
  mc: perHypothesis(mcOcSchema).optional(),
  phi_curve: phiCurveSchema.optional(),
});

export const decisionSchema = z.object({
  decision: z.enum(["go", "no-go"]),
  reasons: z.array(z.enum(["futility", "toxicity"])),
  n: z.number().int(),
  x_e: z.number().int(),
  x_t: z.number().int(),
  boundary_efficacy: z.number().int().nullable(),
  boundary_toxicity: z.number().int().nullable(),
  posterior_prob_efficacy: z.number().nullable(),
  posterior_prob_toxicity: z.number().nullable(),
  cutoff_efficacy_value: z.number().nullable(),
  cutoff_toxicity_value: z.number().nullable(),
});

export const decisionLogSchema = z.object({
  decisions: z.array(
    z.object({
      design_id: z.string(),
      n: z.number().int(),
      x_e: z.number().int(),
      x_t: z.number().int(),
      decision: z.string(),
      reasons: z.array(z.string()),
      recorded_at: z.string(),
    })
  ),
});

export const multidosePayloadSchema = z.object({
  dose_spec: z.object({
    arms: z.array(z.string()),
    per_arm_design: designSpecSchema,
    cutoffs: cutoffsSchema.nullable().optional(),
    boundaries: boundariesSchema.nullable().optional(),
    delta: z.number(),
  }),
  boundaries: boundariesSchema,
  config: z.object({ replicates: z.number().int(), seed: z.number().int() }),
  result: z.object({
    arms: z.array(
      z.object({
        label: z.string(),
        selection_pct: z.number(),
        early_stop_pct: z.number(),
        average_enrolled: z.number(),
      })
    ),
    none_selected_pct: z.number(),
    replicates: z.number().int(),
  }),
});

export const errorEnvelopeSchema = z.object({
  error: z.object({ field: z.string().optional(), message: z.string() }),
});

export type Look = z.infer<typeof lookSchema>;
export type DesignSpecJson = z.infer<typeof designSpecSchema>;
export type Boundaries = z.infer<typeof boundariesSchema>;
export type OperatingCharacteristics = z.infer<typeof ocSchema>;
export type MonteCarloOC = z.infer<typeof mcOcSchema>;
export type OptimizationResult = z.infer<typeof resultSchema>;
export type DesignDocument = z.infer<typeof designDocumentSchema>;
export type PhiCurve = z.infer<typeof phiCurveSchema>;
export type OcPayload = z.infer<typeof ocPayloadSchema>;
export type Decision = z.infer<typeof decisionSchema>;
export type DecisionLog = z.infer<typeof decisionLogSchema>;
export type MultidosePayload = z.infer<typeof multidosePayloadSchema>;
