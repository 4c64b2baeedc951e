/**
 * Odds-ratio sensitivity chart rendered as an SVG string. Uses d3 scales and
 * line generators only, so it runs identically in the browser and in node
 * tests; no DOM is touched.
 */

import { line } from "d3-shape";
import { scaleLinear, scaleLog } from "d3-scale";
import {
  HYPOTHESES,
  type HypothesisCode,
  type MonteCarloOC,
  type PhiCurve,
} from "./schema.js";

const WIDTH = 680;
const HEIGHT = 360;
const MARGIN = { top: 20, right: 170, bottom: 48, left: 60 };

const SERIES_COLOR: Record<HypothesisCode, string> = {
  h00: "#c0392b",
  h01: "#e67e22",
  h10: "#8e44ad",
  h11: "#2980b9",
};

const SERIES_LABEL: Record<HypothesisCode, string> = {
  h00: "claim under H00 (joint error)",
  h01: "claim under H01 (futility error)",
  h10: "claim under H10 (toxicity error)",
  h11: "claim under H11 (power)",
};

export interface ChartOptions {
  mc?: Record<HypothesisCode, MonteCarloOC>;
  designPhi?: number;
}

function trimNumber(v: number): string {
  return String(parseFloat(v.toPrecision(6)));
}

export function phiChartSvg(
  curve: PhiCurve,
  alphaTargets: readonly number[],
  options: ChartOptions = {}
): string {
  const phis = curve.phi;
  if (phis.length === 0) {
    return `<svg xmlns="http://www.w3.org/2000/svg" class="phi-chart"></svg>`;
  }
  const x = scaleLog()
    .domain([Math.min(...phis), Math.max(...phis)])
    .range([MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLinear()
    .domain([0, 1])
    .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" class="phi-chart" data-testid="phi-chart">`
  );

  // axes
  const axisY = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line class="axis" x1="${MARGIN.left}" y1="${axisY}" x2="${WIDTH - MARGIN.right}" y2="${axisY}"/>`
  );
  parts.push(
    `<line class="axis" x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}"/>`
  );
  for (const phi of phis) {
    const px = x(phi);
    parts.push(`<line class="tick" x1="${px}" y1="${axisY}" x2="${px}" y2="${axisY + 5}"/>`);
    parts.push(
      `<text class="tick-label" x="${px}" y="${axisY + 18}" text-anchor="middle">${trimNumber(phi)}</text>`
    );
  }
  for (let v = 0; v <= 10; v += 2) {
    const py = y(v / 10);
    parts.push(`<line class="tick" x1="${MARGIN.left - 5}" y1="${py}" x2="${MARGIN.left}" y2="${py}"/>`);
    parts.push(
      `<text class="tick-label" x="${MARGIN.left - 9}" y="${py + 4}" text-anchor="end">${(v / 10).toFixed(1)}</text>`
    );
  }
  parts.push(
    `<text class="axis-label" x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 8}" text-anchor="middle">association odds ratio</text>`
  );
  parts.push(
    `<text class="axis-label" x="16" y="${(MARGIN.top + axisY) / 2}" text-anchor="middle" transform="rotate(-90 16 ${(MARGIN.top + axisY) / 2})">probability of claiming the treatment promising</text>`
  );

  // dashed reference lines at the three error-rate targets
  for (const target of alphaTargets) {
    const py = y(target);
    parts.push(
      `<line class="nominal" data-target="${target}" x1="${MARGIN.left}" y1="${py}" x2="${WIDTH - MARGIN.right}" y2="${py}" stroke-dasharray="5 4"/>`
    );
  }

  // one path per hypothesis corner
  const path = line<number>()
    .x((_, i) => x(phis[i]))
    .y((v) => y(v));
  for (const code of HYPOTHESES) {
    const d = path(curve[code]);
    if (d === null) continue;
    parts.push(
      `<path class="series" data-hypothesis="${code}" d="${d}" fill="none" stroke="${SERIES_COLOR[code]}" stroke-width="2"/>`
    );
  }

  // simulated estimates with a +/- 3.5 standard-error band at the design phi
  if (options.mc && options.designPhi !== undefined) {
    const px = x(options.designPhi);
    for (const code of HYPOTHESES) {
      const mc = options.mc[code];
      const lo = y(Math.max(0, mc.pcp - 3.5 * mc.pcp_se));
      const hi = y(Math.min(1, mc.pcp + 3.5 * mc.pcp_se));
      parts.push(
        `<line class="mc-band" data-hypothesis="${code}" x1="${px}" y1="${lo}" x2="${px}" y2="${hi}" stroke="${SERIES_COLOR[code]}" stroke-width="4" stroke-opacity="0.35"/>`
      );
      parts.push(
        `<circle class="mc-point" data-hypothesis="${code}" cx="${px}" cy="${y(mc.pcp)}" r="3.5" fill="${SERIES_COLOR[code]}"/>`
      );
    }
  }

  // legend
  let legendY = MARGIN.top + 8;
  for (const code of HYPOTHESES) {
    const lx = WIDTH - MARGIN.right + 12;
    parts.push(
      `<line x1="${lx}" y1="${legendY - 4}" x2="${lx + 18}" y2="${legendY - 4}" stroke="${SERIES_COLOR[code]}" stroke-width="2"/>`
    );
    parts.push(
      `<text class="legend" x="${lx + 24}" y="${legendY}" font-size="11">${SERIES_LABEL[code]}</text>`
    );
    legendY += 18;
  }

  parts.push("</svg>");
  return parts.join("\n");
}
