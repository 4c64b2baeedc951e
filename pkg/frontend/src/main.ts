/**
 * DOM glue: hash routing, form wiring, and injection of the HTML produced by
 * the page actions. All statistics arrive from the service; this file only
 * moves strings.
 */

import { ApiError, HttpApi } from "./api.js";
import { escapeHtml } from "./format.js";
import {
  computeOc,
  refreshHistory,
  runMultidose,
  submitDecision,
  submitDesign,
  type ActionFailure,
  type UiMultidoseForm,
} from "./pages.js";
import type { DesignDocument } from "./schema.js";
import { defaultDesignForm, type UiDesignForm, type UiLookRow } from "./validate.js";

const api = new HttpApi("");

const state = {
  designForm: defaultDesignForm(),
  lastSavedId: "",
  multidose: {
    arms: [
      { label: "dose A", piE: "0.30", piT: "0.10" },
      { label: "dose B", piE: "0.60", piT: "0.20" },
    ],
    designId: "",
    replicates: "2000",
    seed: "0",
    delta: "0.8",
  } as UiMultidoseForm,
};

function app(): HTMLElement {
  const node = document.getElementById("app");
  if (node === null) throw new Error("missing #app container");
  return node;
}

function field(label: string, name: string, value: string, size = 8): string {
  return `<label class="field">${escapeHtml(label)}
<input name="${name}" value="${escapeHtml(value)}" size="${size}">
<span class="field-error" data-error-for="${name}"></span></label>`;
}

function clearErrors(root: HTMLElement): void {
  root.querySelectorAll(".field-error").forEach((n) => (n.textContent = ""));
  const banner = root.querySelector("[data-role=banner]");
  if (banner) banner.innerHTML = "";
}

function showFailure(root: HTMLElement, failure: ActionFailure): void {
  const banner = root.querySelector("[data-role=banner]");
  if (failure.kind === "error") {
    if (banner)
      banner.innerHTML = `<div class="error-banner" data-testid="error-banner">${escapeHtml(
        failure.message
      )}</div>`;
    return;
  }
  const leftovers: string[] = [];
  for (const [key, message] of Object.entries(failure.errors)) {
    const slot = root.querySelector(`[data-error-for="${CSS.escape(key)}"]`);
    if (slot) slot.textContent = message;
    else leftovers.push(`${key}: ${message}`);
  }
  if (leftovers.length && banner)
    banner.innerHTML = `<div class="error-banner" data-testid="error-banner">${escapeHtml(
      leftovers.join("; ")
    )}</div>`;
}

function readInput(root: HTMLElement, name: string): string {
  const node = root.querySelector<HTMLInputElement | HTMLSelectElement>(`[name="${name}"]`);
  return node ? node.value : "";
}

async function designOptions(selected: string): Promise<string> {
  let docs: DesignDocument[] = [];
  try {
    docs = await api.listDesigns();
  } catch (err) {
    if (!(err instanceof ApiError)) throw err;
  }
  const options = docs
    .map((doc) => {
      const mark = doc.id === selected ? " selected" : "";
      const note = doc.annotation ? ` (${doc.annotation})` : "";
      return `<option value="${escapeHtml(doc.id)}"${mark}>${escapeHtml(doc.id + note)}</option>`;
    })
    .join("");
  return `<select name="design_id" data-role="design-picker">${options}</select>`;
}

// --- design page ---

function scheduleRowsHtml(rows: UiLookRow[]): string {
  return rows
    .map(
      (row, i) => `<tr data-index="${i}">
<td><input name="schedule.${i}.n" value="${escapeHtml(row.n)}" size="4"></td>
<td><input type="checkbox" name="schedule.${i}.efficacy"${row.checkEfficacy ? " checked" : ""}></td>
<td><input type="checkbox" name="schedule.${i}.toxicity"${row.checkToxicity ? " checked" : ""}></td>
<td><button type="button" data-action="drop-look" data-index="${i}">remove</button></td>
<td><span class="field-error" data-error-for="schedule.${i}"></span></td>
</tr>`
    )
    .join("\n");
}

function renderDesignPage(): void {
  const form = state.designForm;
  app().innerHTML = `<section class="page" data-page="design">
<h2>design settings</h2>
<form data-role="design-form">
<fieldset><legend>rates</legend>
${field("target response rate", "etaE", form.etaE)}
${field("unacceptable response rate", "etaENull", form.etaENull)}
${field("acceptable toxicity rate", "etaT", form.etaT)}
${field("unacceptable toxicity rate", "etaTNull", form.etaTNull)}
</fieldset>
<fieldset><legend>error-rate targets</legend>
${field("joint (both null)", "alpha00", form.alpha00)}
${field("futile but safe", "alpha01", form.alpha01)}
${field("efficacious but toxic", "alpha10", form.alpha10)}
</fieldset>
<fieldset><legend>analysis schedule</legend>
<table class="schedule"><thead><tr><th>patients</th><th>efficacy</th><th>toxicity</th><th></th><th></th></tr></thead>
<tbody data-role="schedule-rows">${scheduleRowsHtml(form.schedule)}</tbody></table>
<button type="button" data-action="add-look">add look</button>
<span class="field-error" data-error-for="schedule"></span>
</fieldset>
<fieldset><legend>model</legend>
<label class="field">prior
<select name="prior">
<option value="reference"${form.prior === "reference" ? " selected" : ""}>reference</option>
<option value="null-centered"${form.prior === "null-centered" ? " selected" : ""}>null-centered</option>
<option value="alternative-centered"${form.prior === "alternative-centered" ? " selected" : ""}>alternative-centered</option>
</select></label>
${field("toxicity attenuation", "attenuation", form.attenuation)}
${field("outcome odds ratio", "designPhi", form.designPhi)}
<label class="field">search
<select name="method">
<option value="grid"${form.method === "grid" ? " selected" : ""}>cutoff grid</option>
<option value="global"${form.method === "global" ? " selected" : ""}>global</option>
<option value="global-practical"${form.method === "global-practical" ? " selected" : ""}>global, practical</option>
</select></label>
<label class="field">cutoff grid
<select name="grid">
<option value="compact"${form.grid === "compact" ? " selected" : ""}>compact</option>
<option value="specified"${form.grid === "specified" ? " selected" : ""}>specified</option>
</select></label>
${field("annotation", "annotation", form.annotation, 28)}
</fieldset>
<button type="submit" data-action="calculate">calculate stopping boundaries</button>
</form>
<div data-role="banner"></div>
<div data-role="design-output" class="output"></div>
</section>`;

  const root = app();
  const formNode = root.querySelector<HTMLFormElement>("[data-role=design-form]");
  if (!formNode) return;

  formNode.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const action = target.getAttribute("data-action");
    if (action === "add-look") {
      captureDesignForm(root);
      state.designForm.schedule.push({ n: "", checkEfficacy: true, checkToxicity: true });
      renderDesignPage();
    } else if (action === "drop-look") {
      captureDesignForm(root);
      const index = Number(target.getAttribute("data-index"));
      state.designForm.schedule.splice(index, 1);
      renderDesignPage();
    }
  });

  formNode.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      captureDesignForm(root);
      clearErrors(root);
      const outcome = await submitDesign(api, state.designForm);
      const output = root.querySelector("[data-role=design-output]");
      if (outcome.kind === "saved") {
        state.lastSavedId = outcome.doc.id;
        if (output) output.innerHTML = outcome.html;
      } else {
        if (output) output.innerHTML = "";
        showFailure(root, outcome);
      }
    })();
  });
}

function captureDesignForm(root: HTMLElement): void {
  const form = state.designForm;
  const keys: (keyof UiDesignForm)[] = [
    "etaE",
    "etaENull",
    "etaT",
    "etaTNull",
    "alpha00",
    "alpha01",
    "alpha10",
    "attenuation",
    "designPhi",
    "annotation",
  ];
  for (const key of keys) {
    const value = readInput(root, key);
    (form[key] as string) = value;
  }
  form.prior = readInput(root, "prior");
  form.method = readInput(root, "method") as UiDesignForm["method"];
  form.grid = readInput(root, "grid") as UiDesignForm["grid"];
  form.schedule = form.schedule.map((_, i): UiLookRow => {
    const eff = root.querySelector<HTMLInputElement>(`[name="schedule.${i}.efficacy"]`);
    const tox = root.querySelector<HTMLInputElement>(`[name="schedule.${i}.toxicity"]`);
    return {
      n: readInput(root, `schedule.${i}.n`),
      checkEfficacy: eff ? eff.checked : false,
      checkToxicity: tox ? tox.checked : false,
    };
  });
}

// --- operating characteristics page ---

async function renderOcPage(): Promise<void> {
  const picker = await designOptions(state.lastSavedId);
  app().innerHTML = `<section class="page" data-page="oc">
<h2>operating characteristics</h2>
<form data-role="oc-form">
<label class="field">design ${picker}</label>
${field("simulation replicates (blank for none)", "replicates", "")}
${field("seed", "seed", "0")}
${field("odds-ratio grid", "phi_grid", "0.25, 0.5, 1, 2, 4, 10, 100", 24)}
<button type="submit">compute</button>
</form>
<div data-role="banner"></div>
<div data-role="oc-output" class="output"></div>
<div data-role="chart" class="chart"></div>
</section>`;

  const root = app();
  const formNode = root.querySelector<HTMLFormElement>("[data-role=oc-form]");
  if (!formNode) return;
  formNode.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      clearErrors(root);
      const designId = readInput(root, "design_id");
      const repsRaw = readInput(root, "replicates").trim();
      const phiRaw = readInput(root, "phi_grid").trim();
      const options: { mc?: { replicates: number; seed: number }; phiGrid?: number[] } = {};
      if (repsRaw !== "") {
        options.mc = { replicates: Number(repsRaw), seed: Number(readInput(root, "seed") || "0") };
      }
      if (phiRaw !== "") {
        options.phiGrid = phiRaw.split(",").map((s) => Number(s.trim()));
      }
      const outcome = await computeOc(api, designId, options);
      const output = root.querySelector("[data-role=oc-output]");
      const chart = root.querySelector("[data-role=chart]");
      if (outcome.kind === "oc") {
        if (output) output.innerHTML = outcome.tableHtml;
        if (chart) chart.innerHTML = outcome.chartSvg ?? "";
      } else {
        if (output) output.innerHTML = "";
        if (chart) chart.innerHTML = "";
        showFailure(root, outcome);
      }
    })();
  });
}

// --- decision page ---

async function renderDecidePage(): Promise<void> {
  const picker = await designOptions(state.lastSavedId);
  app().innerHTML = `<section class="page" data-page="decide">
<h2>interim decision</h2>
<form data-role="decide-form">
<label class="field">design ${picker}</label>
${field("patients enrolled", "n", "")}
${field("responses", "x_e", "")}
${field("toxicities", "x_t", "")}
<button type="submit">evaluate and record</button>
<button type="button" data-action="protocol">view protocol</button>
</form>
<div data-role="banner"></div>
<div data-role="decision-output" class="output"></div>
<div data-role="history" class="output"></div>
<pre data-role="protocol" class="protocol"></pre>
</section>`;

  const root = app();
  const formNode = root.querySelector<HTMLFormElement>("[data-role=decide-form]");
  if (!formNode) return;

  const loadHistory = async () => {
    const designId = readInput(root, "design_id");
    if (designId === "") return;
    const outcome = await refreshHistory(api, designId);
    const history = root.querySelector("[data-role=history]");
    if (history && outcome.kind === "history") history.innerHTML = outcome.historyHtml;
  };
  void loadHistory();

  root.querySelector("[data-role=design-picker]")?.addEventListener("change", () => {
    void loadHistory();
  });

  formNode.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.getAttribute("data-action") !== "protocol") return;
    void (async () => {
      clearErrors(root);
      const designId = readInput(root, "design_id");
      const pre = root.querySelector("[data-role=protocol]");
      try {
        const text = await api.protocolText(designId);
        if (pre) pre.textContent = text;
      } catch (err) {
        if (!(err instanceof ApiError)) throw err;
        showFailure(root, { kind: "error", message: err.message, field: err.field });
      }
    })();
  });

  formNode.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      clearErrors(root);
      const designId = readInput(root, "design_id");
      const outcome = await submitDecision(api, designId, {
        n: readInput(root, "n"),
        xE: readInput(root, "x_e"),
        xT: readInput(root, "x_t"),
      });
      const output = root.querySelector("[data-role=decision-output]");
      const history = root.querySelector("[data-role=history]");
      if (outcome.kind === "decision") {
        if (output) output.innerHTML = outcome.panelHtml;
        if (history) history.innerHTML = outcome.historyHtml;
      } else {
        showFailure(root, outcome);
      }
    })();
  });
}

// --- multidose page ---

function armRowsHtml(arms: UiMultidoseForm["arms"]): string {
  return arms
    .map(
      (arm, i) => `<tr data-index="${i}">
<td><input name="arms.${i}.label" value="${escapeHtml(arm.label)}" size="10"></td>
<td><input name="arms.${i}.piE" value="${escapeHtml(arm.piE)}" size="6"></td>
<td><input name="arms.${i}.piT" value="${escapeHtml(arm.piT)}" size="6"></td>
<td><button type="button" data-action="drop-arm" data-index="${i}">remove</button></td>
<td><span class="field-error" data-error-for="arms.${i}"></span>
<span class="field-error" data-error-for="truth.${i}.pi_e"></span>
<span class="field-error" data-error-for="truth.${i}.pi_t"></span></td>
</tr>`
    )
    .join("\n");
}

async function renderMultidosePage(): Promise<void> {
  const picker = await designOptions(state.multidose.designId || state.lastSavedId);
  app().innerHTML = `<section class="page" data-page="multidose">
<h2>dose-optimization simulation</h2>
<form data-role="multidose-form">
<label class="field">per-arm design ${picker}
<span class="field-error" data-error-for="design_id"></span></label>
<table class="arms"><thead><tr><th>dose</th><th>true response rate</th><th>true toxicity rate</th><th></th><th></th></tr></thead>
<tbody data-role="arm-rows">${armRowsHtml(state.multidose.arms)}</tbody></table>
<button type="button" data-action="add-arm">add arm</button>
<span class="field-error" data-error-for="arms"></span>
${field("replicates", "replicates", state.multidose.replicates)}
${field("seed", "seed", state.multidose.seed)}
${field("equivalence fraction", "delta", state.multidose.delta)}
<button type="submit">simulate</button>
</form>
<div data-role="banner"></div>
<div data-role="multidose-output" class="output"></div>
</section>`;

  const root = app();
  const formNode = root.querySelector<HTMLFormElement>("[data-role=multidose-form]");
  if (!formNode) return;

  formNode.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const action = target.getAttribute("data-action");
    if (action === "add-arm") {
      captureMultidoseForm(root);
      state.multidose.arms.push({ label: "", piE: "", piT: "" });
      void renderMultidosePage();
    } else if (action === "drop-arm") {
      captureMultidoseForm(root);
      state.multidose.arms.splice(Number(target.getAttribute("data-index")), 1);
      void renderMultidosePage();
    }
  });

  formNode.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      captureMultidoseForm(root);
      clearErrors(root);
      const outcome = await runMultidose(api, state.multidose);
      const output = root.querySelector("[data-role=multidose-output]");
      if (outcome.kind === "multidose") {
        if (output) output.innerHTML = outcome.html;
      } else {
        if (output) output.innerHTML = "";
        showFailure(root, outcome);
      }
    })();
  });
}

function captureMultidoseForm(root: HTMLElement): void {
  const form = state.multidose;
  form.designId = readInput(root, "design_id");
  form.replicates = readInput(root, "replicates");
  form.seed = readInput(root, "seed");
  form.delta = readInput(root, "delta");
  form.arms = form.arms.map((_, i) => ({
    label: readInput(root, `arms.${i}.label`),
    piE: readInput(root, `arms.${i}.piE`),
    piT: readInput(root, `arms.${i}.piT`),
  }));
}

// --- router ---

const ROUTES: Record<string, () => void | Promise<void>> = {
  "#/design": renderDesignPage,
  "#/oc": renderOcPage,
  "#/decide": renderDecidePage,
  "#/multidose": renderMultidosePage,
};

function route(): void {
  const hash = window.location.hash || "#/design";
  const render = ROUTES[hash] ?? renderDesignPage;
  document.querySelectorAll("nav a").forEach((a) => {
    a.classList.toggle("active", a.getAttribute("href") === hash);
  });
  void render();
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
