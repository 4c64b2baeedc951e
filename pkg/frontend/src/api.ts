/**
 * Typed client over the service's JSON API. All console statistics come
 * from these calls; nothing is computed locally.
 */

import {
  decisionLogSchema,
  decisionSchema,
  designDocumentSchema,
  designListSchema,
  errorEnvelopeSchema,
  multidosePayloadSchema,
  ocPayloadSchema,
  type Decision,
  type DecisionLog,
  type DesignDocument,
  type DesignSpecJson,
  type MultidosePayload,
  type OcPayload,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly field: string | null,
    message: string
  ) {
    super(message);
  }
}

export interface CreateDesignBody {
  spec: DesignSpecJson;
  method?: string;
  grid?: string;
  annotation?: string;
}

export interface OcRequestBody {
  mc?: { replicates: number; seed: number };
  phi_grid?: number[];
}

export interface Api {
  createDesign(body: CreateDesignBody): Promise<DesignDocument>;
  listDesigns(): Promise<DesignDocument[]>;
  getDesign(id: string): Promise<DesignDocument>;
  computeOc(id: string, body: OcRequestBody): Promise<OcPayload>;
  postDecision(id: string, data: { n: number; x_e: number; x_t: number }): Promise<Decision>;
  getDecisions(id: string): Promise<DecisionLog>;
  protocolText(id: string): Promise<string>;
  simulateMultidose(body: unknown): Promise<MultidosePayload>;
}

async function raiseFor(response: Response): Promise<never> {
  let field: string | null = null;
  let message = `request failed with status ${response.status}`;
  try {
    const body = errorEnvelopeSchema.parse(await response.json());
    field = body.error.field ?? null;
    message = body.error.message;
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, field, message);
}

export class HttpApi implements Api {
  constructor(private readonly base: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      await raiseFor(response);
    }
    return response;
  }

  private async json(path: string, init?: RequestInit): Promise<unknown> {
    return (await this.request(path, init)).json();
  }

  private post(path: string, body: unknown): Promise<unknown> {
    return this.json(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createDesign(body: CreateDesignBody): Promise<DesignDocument> {
    return designDocumentSchema.parse(await this.post("/designs", body));
  }

  async listDesigns(): Promise<DesignDocument[]> {
    return designListSchema.parse(await this.json("/designs")).designs;
  }

  async getDesign(id: string): Promise<DesignDocument> {
    return designDocumentSchema.parse(await this.json(`/designs/${id}`));
  }

  async computeOc(id: string, body: OcRequestBody): Promise<OcPayload> {
    return ocPayloadSchema.parse(await this.post(`/designs/${id}/oc`, body));
  }

  async postDecision(
    id: string,
    data: { n: number; x_e: number; x_t: number }
  ): Promise<Decision> {
    return decisionSchema.parse(await this.post(`/designs/${id}/decisions`, data));
  }

  async getDecisions(id: string): Promise<DecisionLog> {
    return decisionLogSchema.parse(await this.json(`/designs/${id}/decisions`));
  }

  async protocolText(id: string): Promise<string> {
    return (await this.request(`/designs/${id}/protocol`)).text();
  }

  async simulateMultidose(body: unknown): Promise<MultidosePayload> {
    return multidosePayloadSchema.parse(await this.post("/simulations/multidose", body));
  }
}
