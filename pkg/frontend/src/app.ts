/** Explorer app: pick a run, drag objective weights, watch the weighted
 * selection update live across the scatter / ternary / heatmap panels, and
 * open behavior reports by clicking points. The client mirrors the
 * scalarization for responsiveness; on slider release it cross-checks the
 * authoritative POST /select and flags any mismatch loudly. */

import { ApiClient } from "./api";
import { applySliderChange, normalizeWeights, selectFromFront } from "./scoring";
import { SessionLog } from "./session";
import type { FrontPayload, RunMeta, Weights } from "./types";
import { heatmapCells, scatterData, ternaryToSvg } from "./views";

const SVG_NS = "http://www.w3.org/2000/svg";

interface AppState {
  api: ApiClient;
  runs: RunMeta[];
  run: RunMeta | null;
  front: FrontPayload | null;
  weights: Weights;
  selected: number | null;
  log: SessionLog | null;
}

const state: AppState = {
  api: new ApiClient(localStorage.getItem("fairhpo_api") ?? "http://127.0.0.1:8400"),
  runs: [], run: null, front: null, weights: {}, selected: null, log: null,
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, attrs: Record<string, string> = {}, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function setStatus(msg: string, warn = false) {
  const bar = byId("status");
  bar.textContent = msg;
  bar.className = warn ? "warn" : "";
}

async function boot() {
  state.runs = await state.api.runs();
  const picker = byId("run-picker") as HTMLSelectElement;
  picker.innerHTML = "";
  for (const r of state.runs) {
    picker.appendChild(el("option", { value: r.run_id }, r.run_id));
  }
  picker.onchange = () => loadRun(picker.value);
  if (state.runs.length) await loadRun(state.runs[0].run_id);
  byId("export-log").onclick = exportLog;
  (byId("import-log") as HTMLInputElement).onchange = importLog;
}

async function loadRun(runId: string) {
  state.run = state.runs.find((r) => r.run_id === runId) ?? null;
  state.front = await state.api.front(runId);
  state.log = new SessionLog(runId);
  const ids = state.front.objective_ids;
  state.weights = normalizeWeights(
    Object.fromEntries(ids.map((m) => [m, 1 / ids.length])));
  buildWeightPanel();
  await reselect(true);
  void drawTernary();
  void drawHeatmap();
}

function buildWeightPanel() {
  const panel = byId("weights");
  panel.innerHTML = "";
  if (!state.front) return;
  for (const metric of state.front.objective_ids) {
    const row = el("div", { class: "weight-row" });
    row.appendChild(el("label", {}, metric));
    const slider = el("input", {
      type: "range", min: "0", max: "1", step: "0.01",
      value: String(state.weights[metric] ?? 0), "data-metric": metric,
    });
    const readout = el("span", { id: `w-${metric}` },
                       (state.weights[metric] ?? 0).toFixed(2));
    slider.oninput = () => {
      const { weights, warning } = applySliderChange(
        state.weights, metric, Number(slider.value));
      state.weights = weights;
      if (warning) {
        setStatus(warning, true);
        slider.value = String(state.weights[metric]);
      }
      refreshReadouts();
      void reselect(false); // live mirror while dragging
    };
    slider.onchange = () => void reselect(true); // authoritative cross-check
    row.appendChild(slider);
    row.appendChild(readout);
    panel.appendChild(row);
  }
  refreshReadouts();
}

function refreshReadouts() {
  for (const [metric, w] of Object.entries(state.weights)) {
    const node = document.getElementById(`w-${metric}`);
    if (node) node.textContent = w.toFixed(2);
  }
}

async function reselect(authoritative: boolean) {
  if (!state.front || !state.run) return;
  const mirror = selectFromFront(state.front, state.weights);
  state.selected = mirror.eval_id;
  if (authoritative) {
    const server = await state.api.select(state.run.run_id, state.weights);
    if (server.eval_id !== mirror.eval_id) {
      setStatus(`selection mismatch: client ${mirror.eval_id} vs server ` +
                `${server.eval_id}; trusting server`, true);
      state.selected = server.eval_id;
    } else {
      setStatus(`selected eval ${server.eval_id} ` +
                `(score ${server.score.toFixed(4)})`);
    }
    state.log?.record(state.weights, state.selected);
  }
  drawScatter();
  highlightTernary();
  void showBehavior(state.selected);
}

function drawScatter() {
  const host = byId("scatter");
  host.innerHTML = "";
  if (!state.front) return;
  const ids = state.front.objective_ids;
  const xIdx = ids.indexOf("f1_obj") >= 0 ? ids.indexOf("f1_obj") : 0;
  const yIdx = xIdx === 0 ? 1 : (ids.length > 1 ? (xIdx + 1) % ids.length : 0);
  const data = scatterData(state.front.points, xIdx, yIdx);
  const size = 320;
  const pad = 30;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size));
  const xs = data.map((d) => d.x);
  const ys = data.map((d) => d.y);
  const sx = (v: number) => pad + (size - 2 * pad) *
    (Math.max(...xs) === Math.min(...xs) ? 0.5
      : (v - Math.min(...xs)) / (Math.max(...xs) - Math.min(...xs)));
  const sy = (v: number) => size - pad - (size - 2 * pad) *
    (Math.max(...ys) === Math.min(...ys) ? 0.5
      : (v - Math.min(...ys)) / (Math.max(...ys) - Math.min(...ys)));
  for (const d of data) {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("cx", String(sx(d.x)));
    c.setAttribute("cy", String(sy(d.y)));
    c.setAttribute("r", d.eval_id === state.selected ? "7" : (d.onFront ? "5" : "3"));
    c.setAttribute("fill", d.eval_id === state.selected ? "#0a7d3b"
      : d.onFront ? "#1f4e9c" : "#b9c2d0");
    c.setAttribute("data-eval", String(d.eval_id));
    c.addEventListener("click", () => void showBehavior(d.eval_id));
    svg.appendChild(c);
  }
  host.appendChild(svg);
  byId("scatter-caption").textContent =
    `${ids[xIdx]} vs ${ids[yIdx]} (front emphasized)`;
}

async function drawTernary() {
  const host = byId("ternary");
  host.innerHTML = "";
  if (!state.run || !state.front || state.front.objective_ids.length < 3) return;
  const objectives = state.front.objective_ids.slice(0, 3);
  const pts = await state.api.ternary(state.run.run_id, objectives);
  const size = 320;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(size));
  svg.setAttribute("height", String(size * 0.9));
  const tri = document.createElementNS(SVG_NS, "path");
  const h = Math.sqrt(3) / 2;
  tri.setAttribute("d", `M0 ${h * size} L${size} ${h * size} ` +
    `L${size / 2} 0 Z`);
  tri.setAttribute("fill", "none");
  tri.setAttribute("stroke", "#555");
  svg.appendChild(tri);
  for (const p of ternaryToSvg(pts, size)) {
    const c = document.createElementNS(SVG_NS, "circle");
    c.setAttribute("cx", String(p.px));
    c.setAttribute("cy", String(p.py));
    c.setAttribute("r", "4");
    c.setAttribute("data-eval", String(p.eval_id));
    c.setAttribute("fill", p.degenerate ? "#999" : "#c77014");
    c.addEventListener("click", () => void showBehavior(p.eval_id));
    svg.appendChild(c);
  }
  host.appendChild(svg);
  byId("ternary-caption").textContent =
    `corners (worst): ${objectives.join(" / ")}`;
  highlightTernary();
}

function highlightTernary() {
  document.querySelectorAll("#ternary circle[data-eval]").forEach((node) => {
    const evalId = Number(node.getAttribute("data-eval"));
    node.setAttribute("stroke", evalId === state.selected ? "#0a7d3b" : "none");
    node.setAttribute("stroke-width", evalId === state.selected ? "3" : "0");
  });
}

async function drawHeatmap() {
  const host = byId("heatmap");
  host.innerHTML = "";
  const experiment = state.run?.experiment;
  if (!experiment) return;
  let matrices;
  try {
    matrices = await state.api.contrast(experiment);
  } catch {
    host.appendChild(el("p", { class: "empty" },
      "no contrast grid stored for this experiment"));
    const retry = el("button", {}, "retry");
    retry.onclick = () => void drawHeatmap();
    host.appendChild(retry);
    return;
  }
  for (const m of matrices) {
    const table = el("table", { class: "heatmap" });
    const head = el("tr");
    head.appendChild(el("th", {}, `${m.dataset}/${m.learner}`));
    for (const col of m.metric_ids) head.appendChild(el("th", {}, col));
    table.appendChild(head);
    const cells = heatmapCells(m);
    for (const rowId of m.metric_ids) {
      const tr = el("tr");
      tr.appendChild(el("th", {}, rowId));
      for (const colId of m.metric_ids) {
        const cell = cells.find((c) => c.row === rowId && c.col === colId)!;
        const td = el("td", { style: `background:${cell.color}` },
                      cell.value.toFixed(3));
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    host.appendChild(table);
  }
}

async function showBehavior(evalId: number | null) {
  const host = byId("behavior");
  if (evalId === null || !state.run) {
    host.innerHTML = "<p class='empty'>no selection</p>";
    return;
  }
  host.innerHTML = "<p class='empty'>retraining…</p>";
  try {
    const rep = await state.api.behavior(state.run.run_id, evalId);
    host.innerHTML = "";
    host.appendChild(el("h3", {}, `behavior of eval ${evalId}`));
    const tbl = el("table");
    const rows: [string, string][] = [];
    for (const [k, v] of Object.entries(rep.acceptance_rates)) {
      rows.push([`P(accept | ${k})`, v === null ? "undefined" : v.toFixed(3)]);
    }
    for (const [k, v] of Object.entries(rep.conditional_rates)) {
      rows.push([`P(accept | ${k})`, v === null ? "undefined" : v.toFixed(3)]);
    }
    for (const [k, v] of Object.entries(rep.metric_values)) {
      rows.push([k, v === null ? "undefined" : v.toFixed(4)]);
    }
    for (const [k, v] of rows) {
      const tr = el("tr");
      tr.appendChild(el("td", {}, k));
      tr.appendChild(el("td", {}, v));
      tbl.appendChild(tr);
    }
    host.appendChild(tbl);
  } catch (err) {
    host.innerHTML = "";
    host.appendChild(el("p", { class: "empty" }, `behavior unavailable: ${err}`));
    const retry = el("button", {}, "retry");
    retry.onclick = () => void showBehavior(evalId);
    host.appendChild(retry);
  }
}

function exportLog() {
  if (!state.log) return;
  const blob = new Blob([state.log.exportJson()], { type: "application/json" });
  const a = el("a", { download: `${state.log.runId}-session.json` });
  a.href = URL.createObjectURL(blob);
  a.click();
  URL.revokeObjectURL(a.href);
}

async function importLog(ev: Event) {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file || !state.front) return;
  const log = SessionLog.importJson(await file.text());
  const last = log.last();
  if (last) {
    state.weights = normalizeWeights(last.weights);
    buildWeightPanel();
    await reselect(true);
    setStatus(`imported session log (${log.length} events); weights restored`);
  }
  state.log = log;
}

window.addEventListener("DOMContentLoaded", () => {
  boot().catch((err) => setStatus(`failed to reach API: ${err}`, true));
});
