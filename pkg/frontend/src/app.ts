// Single-page monitor: design form, live trial page, session dashboard.
// Hash routes: #/ (dashboard), #/new (form), #/trial/<id> (live page).

import { ApiClient, ApiError } from "./api.js";
import { buildChartModel, renderChartSVG } from "./chart.js";
import {
  applyObservation,
  errorBanner,
  fromSnapshot,
  TrialViewState,
} from "./session.js";
import type { Family, TrialSummary } from "./types.js";
import { validateObservation, validateSpecForm } from "./validate.js";

const POLL_MS = 1000;

const api = new ApiClient("");
const root = document.getElementById("app") as HTMLElement;

let pollTimer: number | null = null;
let lastListPayload = "";

function stopPolling(): void {
  if (pollTimer !== null) {
    clearInterval(pollTimer);
    pollTimer = null;
  }
}

function el(html: string): HTMLElement {
  const tpl = document.createElement("template");
  tpl.innerHTML = html.trim();
  return tpl.content.firstElementChild as HTMLElement;
}

function fmt(x: number): string {
  return Number.isFinite(x) ? x.toPrecision(5) : String(x);
}

// ---------------------------------------------------------------------------
// Dashboard
// ---------------------------------------------------------------------------

function sparkline(trajectory: [number, number][]): string {
  if (trajectory.length === 0) return `<svg class="spark" viewBox="0 0 80 24"></svg>`;
  const logs = trajectory.map(([, L]) => Math.log(L));
  const lo = Math.min(...logs);
  const hi = Math.max(...logs);
  const span = hi - lo || 1;
  const pts = trajectory
    .map(([n], i) => {
      const x = (n / trajectory[trajectory.length - 1][0]) * 76 + 2;
      const y = 22 - ((logs[i] - lo) / span) * 20;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
  return (
    `<svg class="spark" viewBox="0 0 80 24">` +
    `<polyline points="${pts}" fill="none" stroke="#2c3e50"/></svg>`
  );
}

function renderDashboard(summaries: TrialSummary[]): void {
  const rows = summaries
    .map(
      (s) => `
      <tr>
        <td><a href="#/trial/${s.id}">${s.id}</a></td>
        <td>${s.family}</td>
        <td><span class="chip ${s.status}">${s.status}</span></td>
        <td>${s.n}</td>
        <td>${fmt(s.gamma)}</td>
        <td>${sparkline(s.trajectory)}</td>
      </tr>`,
    )
    .join("");
  const body =
    summaries.length === 0
      ? `<p class="empty">No trials yet. <a href="#/new">Design one.</a></p>`
      : `<table>
          <thead><tr><th>id</th><th>family</th><th>status</th><th>n</th>
          <th>γ</th><th>trajectory</th></tr></thead>
          <tbody>${rows}</tbody>
        </table>`;
  root.replaceChildren(
    el(`<section>
      <header><h1>Sequential trials</h1>
        <a class="button" href="#/new">New trial</a></header>
      ${body}
    </section>`),
  );
}

async function showDashboard(): Promise<void> {
  stopPolling();
  lastListPayload = "";
  const refresh = async () => {
    try {
      const summaries = await api.listTrials();
      const payload = JSON.stringify(summaries);
      if (payload === lastListPayload) return; // unchanged: skip re-render
      lastListPayload = payload;
      renderDashboard(summaries);
    } catch {
      const banner = document.getElementById("net-banner");
      if (!banner) {
        root.prepend(
          el(`<p id="net-banner" class="banner error">service unreachable;` +
             ` showing cached view</p>`),
        );
      }
    }
  };
  await refresh();
  pollTimer = window.setInterval(refresh, POLL_MS);
}

// ---------------------------------------------------------------------------
// Design form
// ---------------------------------------------------------------------------

function showForm(): void {
  stopPolling();
  const form = el(`
    <section>
      <h1>Design a trial</h1>
      <form id="design-form">
        <label>Family
          <select name="family">
            <option value="one_z">one-sample mean, known SD</option>
            <option value="one_t">one-sample mean, unknown SD</option>
            <option value="one_prop">success rate</option>
            <option value="two_z">two-sample mean, known SD</option>
            <option value="two_t">two-sample mean, unknown SD</option>
          </select></label>
        <label>Side
          <select name="side">
            <option value="right">right</option>
            <option value="left">left</option>
            <option value="two_sided">two-sided</option>
          </select></label>
        <label>Null value <input name="nullValue" value="0"></label>
        <label>α <input name="alpha" value="0.005"></label>
        <label>β <input name="beta" value="0.2"></label>
        <label>Max sample size N <input name="nMax" value="30"></label>
        <label>Known SD σ₀ <input name="sigma0" value=""></label>
        <label><input type="checkbox" name="exact"> exact calibration
          (success rates only)</label>
        <label>Fixed γ (leave blank to calibrate)
          <input name="gamma" value=""></label>
        <p id="form-status"></p>
        <button type="submit">Create trial</button>
      </form>
    </section>`);
  root.replaceChildren(form);

  const f = form.querySelector("#design-form") as HTMLFormElement;
  const status = form.querySelector("#form-status") as HTMLElement;
  f.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    for (const e of f.querySelectorAll(".field-error")) e.remove();
    const data = new FormData(f);
    const result = validateSpecForm({
      family: String(data.get("family") ?? ""),
      side: String(data.get("side") ?? ""),
      nullValue: String(data.get("nullValue") ?? ""),
      alpha: String(data.get("alpha") ?? ""),
      beta: String(data.get("beta") ?? ""),
      nMax: String(data.get("nMax") ?? ""),
      sigma0: String(data.get("sigma0") ?? ""),
    });
    if (!result.ok) {
      for (const [field, message] of Object.entries(result.errors)) {
        const input = f.querySelector(`[name="${field}"]`);
        input?.parentElement?.append(
          el(`<span class="field-error">${message}</span>`),
        );
      }
      return;
    }
    const gammaRaw = String(data.get("gamma") ?? "").trim();
    const req =
      gammaRaw === ""
        ? {
            spec: result.spec,
            calibrate: true,
            exact: data.get("exact") === "on",
          }
        : { spec: result.spec, gamma: Number(gammaRaw) };
    status.textContent =
      gammaRaw === "" ? "calibrating termination threshold…" : "creating…";
    try {
      const snap = await api.createTrial(req);
      location.hash = `#/trial/${snap.id}`;
    } catch (err) {
      status.textContent =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
  });
}

// ---------------------------------------------------------------------------
// Trial page
// ---------------------------------------------------------------------------

function renderTrial(state: TrialViewState, family: Family): void {
  const model = buildChartModel({
    trajectory: state.trajectory,
    A: state.A,
    B: state.B,
    gamma: state.gamma,
    nMax: state.nMax,
  });
  const page = el(`
    <section>
      <header><h1>Trial ${state.id}</h1><a href="#/">← all trials</a></header>
      <p class="limits">A = ${fmt(state.A)} · B = ${fmt(state.B)} ·
        γ = ${fmt(state.gamma)} · N = ${state.nMax} · n = ${state.n}</p>
      <p class="banner ${state.banner.tone}">${state.banner.text}</p>
      <div id="chart">${renderChartSVG(model)}</div>
      <form id="obs-form">
        <input name="value" placeholder="next observation"
          ${state.inputLocked ? "disabled" : ""} autocomplete="off">
        <button type="submit" ${state.inputLocked ? "disabled" : ""}>
          Record</button>
        <span id="obs-error" class="field-error"></span>
      </form>
    </section>`);
  root.replaceChildren(page);

  const form = page.querySelector("#obs-form") as HTMLFormElement;
  const input = form.querySelector("input") as HTMLInputElement;
  const button = form.querySelector("button") as HTMLButtonElement;
  const errorSpan = page.querySelector("#obs-error") as HTMLElement;
  form.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const check = validateObservation(input.value, family);
    if (!check.ok) {
      errorSpan.textContent = check.error; // no request on invalid input
      return;
    }
    errorSpan.textContent = "";
    input.disabled = true; // one in-flight append at a time
    button.disabled = true;
    const key = `ui-${state.id}-${state.n + 1}-${Date.now()}`;
    try {
      const resp = await api.appendObservation(state.id, check.value, key);
      renderTrial(applyObservation(state, resp), family);
    } catch (err) {
      const text =
        err instanceof ApiError && err.status === 409
          ? "trial already decided"
          : err instanceof ApiError
            ? `${err.code}: ${err.message}`
            : String(err);
      renderTrial(errorBanner(state, text), family);
    }
  });
  if (!state.inputLocked) input.focus();
}

async function showTrial(id: string): Promise<void> {
  stopPolling();
  try {
    const snap = await api.getTrial(id);
    renderTrial(fromSnapshot(snap), snap.spec.family);
  } catch (err) {
    root.replaceChildren(
      el(`<p class="banner error">` +
         `${err instanceof ApiError ? err.message : String(err)}</p>`),
    );
  }
}

// ---------------------------------------------------------------------------
// Router
// ---------------------------------------------------------------------------

function route(): void {
  const hash = location.hash || "#/";
  if (hash === "#/new") {
    showForm();
  } else if (hash.startsWith("#/trial/")) {
    void showTrial(hash.slice("#/trial/".length));
  } else {
    void showDashboard();
  }
}

window.addEventListener("hashchange", route);
route();
