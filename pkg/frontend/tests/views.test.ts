import { describe, expect, it } from "vitest";

import {
  decisionLogSchema,
  decisionSchema,
  designDocumentSchema,
  multidosePayloadSchema,
  ocPayloadSchema,
} from "../src/schema.js";
import {
  boundaryTableHtml,
  decisionPanelHtml,
  designSummaryHtml,
  historyTableHtml,
  hypothesisMargins,
  multidoseTableHtml,
  ocTableHtml,
  slackBadgesHtml,
} from "../src/views.js";
import { loadFixture } from "./helpers.js";

const design = designDocumentSchema.parse(loadFixture("design-scenario4.json"));
const result = design.result!;

describe("boundary table", () => {
  const html = boundaryTableHtml(design.spec, result.boundaries);

  it("lays out look sizes as columns", () => {
    expect(html).toContain("<th>9</th><th>18</th><th>36</th>");
  });

  it("shows the recorded efficacy bounds with a dash at unchecked looks", () => {
    expect(html).toContain(
      '<tr data-endpoint="efficacy"><td>stop if responses &le;</td><td>&ndash;</td><td>5</td><td>14</td></tr>'
    );
  });

  it("shows the recorded toxicity bounds at every look", () => {
    expect(html).toContain(
      '<tr data-endpoint="toxicity"><td>stop if toxicities &ge;</td><td>4</td><td>7</td><td>11</td></tr>'
    );
  });
});

describe("constraint badges", () => {
  const html = slackBadgesHtml(design.spec, result);

  it("shows achieved versus target error rates to 4 decimals", () => {
    expect(html).toContain("joint error: 0.0063 / 0.0250 (slack +0.0187)");
    expect(html).toContain("futility-only error: 0.0728 / 0.1000");
    expect(html).toContain("toxicity-only error: 0.0724 / 0.1000");
  });

  it("shows power and feasibility", () => {
    expect(html).toContain("power: 0.8337");
    expect(html).toContain("all constraints met");
    expect(html).not.toContain('badge bad');
  });
});

describe("design summary", () => {
  it("names the stored document and escapes the annotation", () => {
    const doc = { ...design, annotation: "<script>alert(1)</script>" };
    const html = designSummaryHtml(doc);
    expect(html).toContain(`design ${design.id}`);
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("operating characteristics table", () => {
  const payload = ocPayloadSchema.parse(loadFixture("oc-scenario4.json"));
  const html = ocTableHtml(design.spec, payload);

  it("shows the analytic values to 4 decimals and expected n to 2", () => {
    expect(html).toContain("<td>0.8337</td><td>0.1127</td><td>33.20</td>");
    expect(html).toContain("<td>0.0063</td>");
  });

  it("labels each hypothesis with its outcome rates", () => {
    expect(hypothesisMargins(design.spec, "h10")).toEqual({ piE: 0.6, piT: 0.4 });
    expect(html).toContain("H11 (efficacious and safe)</td><td>(0.6, 0.2)</td>");
    expect(html).toContain("H00 (futile and toxic)</td><td>(0.3, 0.4)</td>");
  });

  it("adds simulated columns with standard errors when present", () => {
    expect(html).toContain("simulated claim (se)");
    const mc = payload.mc!.h11;
    expect(html).toContain(`${mc.pcp.toFixed(4)} (${mc.pcp_se.toFixed(4)})`);
  });

  it("omits simulated columns otherwise", () => {
    const bare = ocPayloadSchema.parse(loadFixture("oc-bare-scenario4.json"));
    expect(ocTableHtml(design.spec, bare)).not.toContain("simulated claim");
  });
});

describe("decision panel", () => {
  it("renders GO with both posterior probabilities against their cutoffs", () => {
    const go = decisionSchema.parse(loadFixture("decision-go.json"));
    const html = decisionPanelHtml(go);
    expect(html).toContain(">GO</span>");
    expect(html).toContain("at n=18: 6 responses, 5 toxicities");
    expect(html).toContain("0.6327 vs cutoff 0.5280");
    expect(html).not.toContain("stopping reasons");
  });

  it("renders NO-GO with the futility reason", () => {
    const nogo = decisionSchema.parse(loadFixture("decision-nogo-futility.json"));
    const html = decisionPanelHtml(nogo);
    expect(html).toContain(">NO-GO</span>");
    expect(html).toContain("stopping reasons: futility");
    expect(html).toContain("0.4323");
  });

  it("renders both reasons at the final look", () => {
    const both = decisionSchema.parse(loadFixture("decision-nogo-both.json"));
    expect(decisionPanelHtml(both)).toContain("stopping reasons: futility, toxicity");
  });
});

describe("decision history", () => {
  it("mirrors the recorded log in order", () => {
    const log = decisionLogSchema.parse(loadFixture("decision-log.json"));
    const html = historyTableHtml(log);
    const first = html.indexOf("NO-GO");
    const second = html.indexOf(">GO<");
    expect(first).toBeGreaterThan(-1);
    expect(second).toBeGreaterThan(first);
    expect((html.match(/<tr>/g) ?? []).length).toBe(4); // header + 3 entries
  });

  it("says so when the log is empty", () => {
    expect(historyTableHtml({ decisions: [] })).toContain("no recorded decisions yet");
  });
});

describe("multidose report", () => {
  const payload = multidosePayloadSchema.parse(loadFixture("multidose-scenario1.json"));
  const html = multidoseTableHtml(payload);

  it("shows the per-arm selection, early-stop, and enrollment grid", () => {
    expect(html).toContain("<td>dose L</td><td>10.1</td><td>24.9</td><td>21.01</td>");
    expect(html).toContain("<td>dose H</td><td>73.6</td><td>7.9</td><td>23.06</td>");
  });

  it("shows the shared boundaries, the none-selected share, and the replicate count", () => {
    expect(html).toContain("responses &le; (2, 8), toxicities &ge; (5, 7)");
    expect(html).toContain("no dose selected: 16.2%");
    expect(html).toContain("replicates: 3000");
  });
});
