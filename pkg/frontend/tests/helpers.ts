/**
 * Fixture-backed Api used by the console tests. Every response is a frozen
 * recording of the real service (see scripts/record_fixtures.py), so the
 * rendered values the tests assert on are byte-for-byte API output.
 */

import { readFileSync } from "node:fs";

import { ApiError, type Api, type CreateDesignBody, type OcRequestBody } from "../src/api.js";
import {
  decisionLogSchema,
  decisionSchema,
  designDocumentSchema,
  designListSchema,
  multidosePayloadSchema,
  ocPayloadSchema,
  type Decision,
  type DecisionLog,
  type DesignDocument,
  type MultidosePayload,
  type OcPayload,
} from "../src/schema.js";

export function loadFixture(name: string): unknown {
  const url = new URL(`./fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8"));
}

export function loadText(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

const DECISION_FIXTURES: Record<string, string> = {
  "18,5,5": "decision-nogo-futility.json",
  "18,6,5": "decision-go.json",
  "36,14,12": "decision-nogo-both.json",
};

export class FixtureApi implements Api {
  calls: string[] = [];
  private recorded = 0;
  readonly design = designDocumentSchema.parse(loadFixture("design-scenario4.json"));
  readonly multidoseDesign = designDocumentSchema.parse(loadFixture("design-multidose.json"));
  private readonly fullLog = decisionLogSchema.parse(loadFixture("decision-log.json"));

  async createDesign(body: CreateDesignBody): Promise<DesignDocument> {
    this.calls.push("createDesign");
    if (body.spec.eta_e_null >= body.spec.eta_e) {
      throw new ApiError(400, "eta_e", "ordering violated");
    }
    return this.design;
  }

  async listDesigns(): Promise<DesignDocument[]> {
    this.calls.push("listDesigns");
    return designListSchema.parse(loadFixture("designs-list.json")).designs;
  }

  async getDesign(id: string): Promise<DesignDocument> {
    this.calls.push(`getDesign ${id}`);
    if (id === this.multidoseDesign.id) return this.multidoseDesign;
    if (id === this.design.id) return this.design;
    throw new ApiError(404, null, `no design with id ${id}`);
  }

  async computeOc(id: string, body: OcRequestBody): Promise<OcPayload> {
    this.calls.push(`computeOc ${id}`);
    const name = body.phi_grid || body.mc ? "oc-scenario4.json" : "oc-bare-scenario4.json";
    return ocPayloadSchema.parse(loadFixture(name));
  }

  async postDecision(
    id: string,
    data: { n: number; x_e: number; x_t: number }
  ): Promise<Decision> {
    this.calls.push(`postDecision ${data.n},${data.x_e},${data.x_t}`);
    const name = DECISION_FIXTURES[`${data.n},${data.x_e},${data.x_t}`];
    if (name === undefined) {
      throw new ApiError(400, "n", `no recorded decision for ${JSON.stringify(data)}`);
    }
    this.recorded += 1;
    return decisionSchema.parse(loadFixture(name));
  }

  async getDecisions(id: string): Promise<DecisionLog> {
    this.calls.push(`getDecisions ${id}`);
    // the recording posted the same three decisions in this order, so the
    // visible history after k submissions is the first k log entries
    return { decisions: this.fullLog.decisions.slice(0, this.recorded) };
  }

  async protocolText(id: string): Promise<string> {
    this.calls.push(`protocolText ${id}`);
    return loadText("protocol-scenario4.txt");
  }

  async simulateMultidose(body: unknown): Promise<MultidosePayload> {
    this.calls.push("simulateMultidose");
    if (typeof body !== "object" || body === null) {
      throw new ApiError(400, null, "expected an object body");
    }
    return multidosePayloadSchema.parse(loadFixture("multidose-scenario1.json"));
  }
}
