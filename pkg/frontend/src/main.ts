// Page wiring: session lifecycle, cohort entry, pathway exploration, contour.

import { ApiClient, ApiRequestError } from "./api.js";
import { parseOutcomes, validCohortLetters, type AlphabetName } from "./outcomes.js";
import type { SessionDoc } from "./types.js";
import {
  buildContourView,
  buildPathwayView,
  buildSessionView,
  widePathsCsv,
} from "./viewmodel.js";
import { el, renderContour, renderPathways, renderSession, renderTable, fmt } from "./render.js";

const CRM_TEMPLATE = {
  skeleton: [0.05, 0.12, 0.25, 0.4, 0.55],
  target: 0.25,
  model: "logistic",
  a0: 3,
  beta_mean: 0,
  beta_sd: 1.1576,
};

const EFFTOX_TEMPLATE = {
  real_doses: [1, 2, 4, 6.6, 10],
  efficacy_hurdle: 0.5,
  toxicity_hurdle: 0.3,
  p_e: 0.1,
  p_t: 0.1,
  eff0: 0.5,
  tox1: 0.65,
  eff_star: 0.7,
  tox_star: 0.25,
  alpha_mean: -7.9593,
  alpha_sd: 3.5487,
  beta_mean: 1.5482,
  beta_sd: 3.5018,
  gamma_mean: 0.7367,
  gamma_sd: 2.5423,
  zeta_mean: 3.4181,
  zeta_sd: 2.4406,
  eta_mean: 0,
  eta_sd: 0.2,
  psi_mean: 0,
  psi_sd: 1,
};

interface AppState {
  api: ApiClient;
  session: SessionDoc | null;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showError(message: string): void {
  const box = byId<HTMLDivElement>("error-box");
  box.textContent = message;
  box.hidden = message.length === 0;
}

function describeApiError(err: unknown): string {
  if (err instanceof ApiRequestError) {
    if (err.payload.node_count !== undefined) {
      return `Pathway budget exceeded: ${err.payload.node_count} fits needed, budget ${err.payload.budget}.`;
    }
    return `${err.status}: ${err.message}`;
  }
  return String(err);
}

function refreshSessionPanel(state: AppState): void {
  const target = byId<HTMLDivElement>("session-panel");
  target.replaceChildren();
  if (!state.session) return;
  const view = buildSessionView(state.session);
  target.append(renderSession(view));
  byId<HTMLFieldSetElement>("entry-fields").disabled = !view.entryEnabled;
  byId<HTMLDivElement>("contour-section").hidden = state.session.design !== "efftox";
}

async function createSession(state: AppState): Promise<void> {
  showError("");
  const design = byId<HTMLSelectElement>("design").value as "crm" | "efftox";
  let spec: Record<string, unknown>;
  try {
    spec = JSON.parse(byId<HTMLTextAreaElement>("spec").value);
  } catch {
    showError("Spec is not valid JSON.");
    return;
  }
  const policyName = byId<HTMLSelectElement>("policy").value;
  const policy =
    policyName === "careful"
      ? {
          name: "careful",
          tox_threshold: Number(byId<HTMLInputElement>("tox-threshold").value),
          certainty_threshold: Number(byId<HTMLInputElement>("certainty-threshold").value),
          reference_dose: Number(byId<HTMLInputElement>("reference-dose").value),
        }
      : { name: "default" };
  const seed = Number(byId<HTMLInputElement>("seed").value) || 1234;
  try {
    state.session = await state.api.createSession({
      design,
      crm_spec: design === "crm" ? spec : undefined,
      efftox_spec: design === "efftox" ? spec : undefined,
      outcomes: byId<HTMLInputElement>("initial-outcomes").value.trim(),
      policy,
      sampler: { seed },
    });
    byId<HTMLInputElement>("session-id").value = state.session.session_id;
    refreshSessionPanel(state);
  } catch (err) {
    showError(describeApiError(err));
  }
}

async function loadSession(state: AppState): Promise<void> {
  showError("");
  const sid = byId<HTMLInputElement>("session-id").value.trim();
  if (!sid) {
    showError("Enter a session id to load.");
    return;
  }
  try {
    state.session = await state.api.getSession(sid);
    refreshSessionPanel(state);
  } catch (err) {
    showError(describeApiError(err));
  }
}

async function recordCohort(state: AppState): Promise<void> {
  showError("");
  if (!state.session) {
    showError("Create or load a session first.");
    return;
  }
  const dose = byId<HTMLInputElement>("cohort-dose").value.trim();
  const letters = byId<HTMLInputElement>("cohort-letters").value.trim().toUpperCase();
  const alphabet: AlphabetName = state.session.design === "crm" ? "binary" : "quaternary";
  if (!validCohortLetters(letters, alphabet)) {
    showError(`Outcomes must use the letters ${alphabet === "binary" ? "T/N" : "E/T/B/N"}.`);
    return;
  }
  const token = `${dose}${letters}`;
  const parsed = parseOutcomes(token, alphabet);
  if (!parsed.ok) {
    showError(parsed.error);
    return;
  }
  try {
    state.session = await state.api.appendOutcomes(
      state.session.session_id, token, state.session.revision,
    );
    byId<HTMLInputElement>("cohort-letters").value = "";
    refreshSessionPanel(state);
  } catch (err) {
    showError(describeApiError(err));
  }
}

async function explorePathways(state: AppState): Promise<void> {
  showError("");
  if (!state.session) {
    showError("Create or load a session first.");
    return;
  }
  const sizes = byId<HTMLInputElement>("cohort-sizes").value
    .split(",").map((s) => parseInt(s.trim(), 10)).filter((n) => n > 0);
  if (sizes.length === 0) {
    showError("Enter future cohort sizes, e.g. 3,3.");
    return;
  }
  try {
    const doc = await state.api.sessionDtp(state.session.session_id, sizes);
    const view = buildPathwayView(doc);
    const panel = byId<HTMLDivElement>("pathway-panel");
    panel.replaceChildren();
    panel.append(
      renderPathways(view, (node) => {
        const snap = byId<HTMLDivElement>("node-snapshot");
        snap.replaceChildren(
          el("h4", {}, [`Node ${node.id}: ${node.edgeLabel || "start"} → ${node.label}`]),
          renderTable(node.summaryColumns, node.summaryRows),
        );
      }),
    );
    const link = byId<HTMLAnchorElement>("wide-download");
    link.href = URL.createObjectURL(new Blob([widePathsCsv(doc)], { type: "text/csv" }));
    link.download = "pathways_wide.csv";
    link.hidden = false;
  } catch (err) {
    showError(describeApiError(err));
  }
}

async function showContour(state: AppState): Promise<void> {
  showError("");
  if (!state.session || state.session.design !== "efftox") return;
  try {
    const doc = await state.api.sessionContour(state.session.session_id);
    const view = buildContourView(doc);
    renderContour(
      view,
      byId<HTMLCanvasElement>("contour-canvas"),
      byId<HTMLDivElement>("contour-readout"),
    );
  } catch (err) {
    showError(describeApiError(err));
  }
}

export function start(): void {
  const params = new URLSearchParams(window.location.search);
  const state: AppState = {
    api: new ApiClient(params.get("api") ?? "http://127.0.0.1:8000"),
    session: null,
  };
  byId<HTMLSelectElement>("design").addEventListener("change", (ev) => {
    const design = (ev.target as HTMLSelectElement).value;
    byId<HTMLTextAreaElement>("spec").value = JSON.stringify(
      design === "crm" ? CRM_TEMPLATE : EFFTOX_TEMPLATE, null, 2,
    );
  });
  byId<HTMLTextAreaElement>("spec").value = JSON.stringify(CRM_TEMPLATE, null, 2);
  byId<HTMLButtonElement>("create-session").addEventListener("click", () => createSession(state));
  byId<HTMLButtonElement>("load-session").addEventListener("click", () => loadSession(state));
  byId<HTMLButtonElement>("record-cohort").addEventListener("click", () => recordCohort(state));
  byId<HTMLButtonElement>("explore").addEventListener("click", () => explorePathways(state));
  byId<HTMLButtonElement>("show-contour").addEventListener("click", () => showContour(state));
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
