// Presentation helpers for the dashboards. Every displayed number comes
// from an API response; this module only maps values to table rows and
// SVG coordinates.

import type { FpDashboard, FpRow, IterationRow } from "./types.js";

export interface FpTableRow {
  pattern: string;
  type: string;
  status: string;
  annotatedMatches: number;
  rateText: string;
  flagged: boolean;
}

export function fpTableRows(dashboard: FpDashboard): FpTableRow[] {
  const toRow = (row: FpRow): FpTableRow => ({
    pattern: row.pattern,
    type: row.type ?? "",
    status: row.status,
    annotatedMatches: row.annotated_matches,
    rateText: row.fp_rate === null ? "–" : `${(row.fp_rate * 100).toFixed(1)}%`,
    flagged: row.flagged,
  });
  // flagged rows first, then by pattern for a stable reading order
  return dashboard.patterns
    .map(toRow)
    .sort((a, b) =>
      a.flagged === b.flagged ? a.pattern.localeCompare(b.pattern) : a.flagged ? -1 : 1,
    );
}

export interface ChartPoint {
  x: number;
  y: number;
  iteration: number;
  f1: number;
}

export interface ChartGeometry {
  width: number;
  height: number;
  padding: number;
  points: ChartPoint[];
  polyline: string;
  targetY: number;
  target: number;
}

export function iterationChartGeometry(
  iterations: IterationRow[],
  width = 560,
  height = 180,
  target = 0.95,
  padding = 24,
): ChartGeometry {
  const innerWidth = width - 2 * padding;
  const innerHeight = height - 2 * padding;
  const yFor = (value: number) => padding + (1 - value) * innerHeight;
  const n = iterations.length;
  const points = iterations.map((row, i) => ({
    x: padding + (n <= 1 ? innerWidth / 2 : (i * innerWidth) / (n - 1)),
    y: yFor(row.f1),
    iteration: row.iteration_no,
    f1: row.f1,
  }));
  return {
    width,
    height,
    padding,
    points,
    polyline: points.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" "),
    targetY: yFor(target),
    target,
  };
}

export function renderIterationChartSvg(geom: ChartGeometry): string {
  const { width, height, padding } = geom;
  const targetLine =
    `<line class="target" x1="${padding}" y1="${geom.targetY.toFixed(1)}" ` +
    `x2="${width - padding}" y2="${geom.targetY.toFixed(1)}" ` +
    `stroke="#c0392b" stroke-dasharray="6 4"/>`;
  const label =
    `<text x="${width - padding}" y="${(geom.targetY - 4).toFixed(1)}" ` +
    `text-anchor="end" class="target-label">${geom.target.toFixed(2)} target</text>`;
  const line = geom.points.length
    ? `<polyline points="${geom.polyline}" fill="none" stroke="#2c6fb3" stroke-width="2"/>`
    : "";
  const dots = geom.points
    .map(
      (p) =>
        `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="3.5" fill="#2c6fb3">` +
        `<title>iteration ${p.iteration}: F1 ${p.f1.toFixed(3)}</title></circle>`,
    )
    .join("");
  const empty = geom.points.length
    ? ""
    : `<text x="${width / 2}" y="${height / 2}" text-anchor="middle" class="empty">no iterations yet</text>`;
  return (
    `<svg viewBox="0 0 ${width} ${height}" width="${width}" height="${height}" role="img">` +
    targetLine +
    label +
    line +
    dots +
    empty +
    `</svg>`
  );
}
