import { describe, expect, it } from "vitest";

import {
  fpTableRows,
  iterationChartGeometry,
  renderIterationChartSvg,
} from "../src/charts.js";
import type { FpDashboard, IterationRow } from "../src/types.js";

function iteration(no: number, f1: number): IterationRow {
  return {
    iteration_no: no,
    active_pattern_count: 400 - no,
    total_saad_detected: 45000 - no * 1000,
    sample_size: 385,
    precision: f1,
    recall: 1.0,
    f1,
    excluded_patterns: [],
    stopped: false,
  };
}

describe("fpTableRows", () => {
  const dashboard: FpDashboard = {
    fp_threshold: 0.25,
    patterns: [
      {
        pattern: "quiet one",
        type: "non_maintenance",
        status: "active",
        annotated_matches: 0,
        fp_rate: null,
        flagged: false,
      },
      {
        pattern: "noisy one",
        type: "current_obsolescence",
        status: "active",
        annotated_matches: 10,
        fp_rate: 0.3,
        flagged: true,
      },
      {
        pattern: "fine one",
        type: "legacy_backwards_compat",
        status: "active",
        annotated_matches: 8,
        fp_rate: 0.125,
        flagged: false,
      },
    ],
  };

  it("puts flagged rows first and formats rates from server values", () => {
    const rows = fpTableRows(dashboard);
    expect(rows[0].pattern).toBe("noisy one");
    expect(rows[0].flagged).toBe(true);
    expect(rows[0].rateText).toBe("30.0%");
    const quiet = rows.find((r) => r.pattern === "quiet one");
    expect(quiet?.rateText).toBe("–");
    const fine = rows.find((r) => r.pattern === "fine one");
    expect(fine?.rateText).toBe("12.5%");
    expect(fine?.flagged).toBe(false);
  });
});

describe("iterationChartGeometry", () => {
  it("plots the published-style F1 trend against the 0.95 target line", () => {
    const rows = [0.886, 0.891, 0.886, 0.966, 0.962].map((f1, i) =>
      iteration(i + 1, f1),
    );
    const geom = iterationChartGeometry(rows);
    expect(geom.points).toHaveLength(5);
    const xs = geom.points.map((p) => p.x);
    expect([...xs].sort((a, b) => a - b)).toEqual(xs); // evenly advancing
    // in SVG space larger F1 means smaller y
    expect(geom.points[3].y).toBeLessThan(geom.points[0].y);
    // the target line sits between the low and high F1 bands
    expect(geom.targetY).toBeGreaterThan(geom.points[3].y);
    expect(geom.targetY).toBeLessThan(geom.points[0].y);
    expect(geom.target).toBe(0.95);
  });

  it("centers a single point and handles the empty state", () => {
    const single = iterationChartGeometry([iteration(1, 0.9)]);
    expect(single.points[0].x).toBeCloseTo(single.width / 2, 0);
    const empty = iterationChartGeometry([]);
    expect(empty.points).toEqual([]);
    expect(empty.polyline).toBe("");
  });
});

describe("renderIterationChartSvg", () => {
  it("renders the polyline, points and target line", () => {
    const rows = [0.886, 0.962].map((f1, i) => iteration(i + 1, f1));
    const svg = renderIterationChartSvg(iterationChartGeometry(rows));
    expect(svg).toContain("<svg");
    expect(svg).toContain("polyline");
    expect(svg).toContain("0.95 target");
    expect((svg.match(/<circle/g) ?? []).length).toBe(2);
  });

  it("renders an explicit empty state", () => {
    const svg = renderIterationChartSvg(iterationChartGeometry([]));
    expect(svg).toContain("no iterations yet");
    expect(svg).not.toContain("polyline");
  });
});
