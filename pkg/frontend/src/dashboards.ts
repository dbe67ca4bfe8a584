// Dashboard tab: per-pattern FP table with exclusion flags, the
// inter-annotator kappa panel, and the iteration-history F1 chart. Each
// panel fails independently so partial data still renders.

import type { ApiClient } from "./api.js";
import {
  fpTableRows,
  iterationChartGeometry,
  renderIterationChartSvg,
} from "./charts.js";

function panel(title: string): { root: HTMLElement; body: HTMLElement } {
  const root = document.createElement("section");
  root.className = "panel";
  const heading = document.createElement("h2");
  heading.textContent = title;
  const body = document.createElement("div");
  body.className = "panel-body";
  root.append(heading, body);
  return { root, body };
}

function panelError(body: HTMLElement, message: string): void {
  const p = document.createElement("p");
  p.className = "panel-error";
  p.textContent = message;
  body.replaceChildren(p);
}

async function renderFpPanel(api: ApiClient, body: HTMLElement): Promise<void> {
  try {
    const dashboard = await api.fpDashboard();
    const table = document.createElement("table");
    table.className = "fp-table";
    table.innerHTML =
      "<thead><tr><th>pattern</th><th>type</th><th>status</th>" +
      "<th>annotated</th><th>FP rate</th></tr></thead>";
    const tbody = document.createElement("tbody");
    for (const row of fpTableRows(dashboard)) {
      const tr = document.createElement("tr");
      if (row.flagged) tr.className = "flagged";
      for (const value of [
        row.pattern,
        row.type,
        row.status,
        String(row.annotatedMatches),
        row.rateText + (row.flagged ? " ⚑ exclude" : ""),
      ]) {
        const td = document.createElement("td");
        td.textContent = value;
        tr.appendChild(td);
      }
      tbody.appendChild(tr);
    }
    table.appendChild(tbody);
    const note = document.createElement("p");
    note.className = "panel-note";
    note.textContent = `patterns above ${(dashboard.fp_threshold * 100).toFixed(0)}% FP are flagged for exclusion`;
    body.replaceChildren(note, table);
  } catch (err) {
    panelError(body, `FP rates unavailable: ${String(err)}`);
  }
}

async function renderKappaPanel(api: ApiClient, body: HTMLElement): Promise<void> {
  const form = document.createElement("form");
  form.className = "kappa-form";
  const inputA = document.createElement("input");
  inputA.placeholder = "annotator a";
  const inputB = document.createElement("input");
  inputB.placeholder = "annotator b";
  const button = document.createElement("button");
  button.textContent = "compute agreement";
  const output = document.createElement("div");
  output.className = "kappa-output";
  form.append(inputA, inputB, button);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      try {
        const report = await api.agreement(inputA.value.trim(), inputB.value.trim());
        const cells = Object.entries(report.contingency)
          .map(([key, count]) => `${key}: ${count}`)
          .join("   ");
        output.textContent =
          `kappa ${report.kappa.toFixed(3)} over ${report.n_joint} jointly ` +
          `annotated comments\n${cells}`;
      } catch (err) {
        output.textContent = `agreement unavailable: ${String(err)}`;
      }
    })();
  });
  body.replaceChildren(form, output);
}

async function renderIterationPanel(api: ApiClient, body: HTMLElement): Promise<void> {
  try {
    const { iterations } = await api.iterations();
    const geometry = iterationChartGeometry(iterations);
    const holder = document.createElement("div");
    holder.className = "iteration-chart";
    holder.innerHTML = renderIterationChartSvg(geometry);
    body.replaceChildren(holder);
    if (iterations.length) {
      const table = document.createElement("table");
      table.className = "iteration-table";
      table.innerHTML =
        "<thead><tr><th>#</th><th>patterns</th><th>detected</th>" +
        "<th>precision</th><th>F1</th><th>excluded</th><th>stopped</th></tr></thead>";
      const tbody = document.createElement("tbody");
      for (const row of iterations) {
        const tr = document.createElement("tr");
        for (const value of [
          String(row.iteration_no),
          String(row.active_pattern_count),
          String(row.total_saad_detected),
          row.precision.toFixed(3),
          row.f1.toFixed(3),
          String(row.excluded_patterns.length),
          row.stopped ? "yes" : "no",
        ]) {
          const td = document.createElement("td");
          td.textContent = value;
          tr.appendChild(td);
        }
        tbody.appendChild(tr);
      }
      table.appendChild(tbody);
      body.appendChild(table);
    }
  } catch (err) {
    panelError(body, `iteration history unavailable: ${String(err)}`);
  }
}

export async function renderDashboards(
  container: HTMLElement,
  api: ApiClient,
): Promise<void> {
  container.replaceChildren();
  const fp = panel("Pattern false-positive rates");
  const kappa = panel("Inter-annotator agreement");
  const iterations = panel("Refinement iterations (F1 per pass)");
  container.append(fp.root, kappa.root, iterations.root);
  await Promise.all([
    renderFpPanel(api, fp.body),
    renderKappaPanel(api, kappa.body),
    renderIterationPanel(api, iterations.body),
  ]);
}
