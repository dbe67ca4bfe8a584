// Split comment text into plain and highlighted segments from the
// matcher-reported pattern spans. Offsets are used verbatim; overlapping
// spans merge into one highlighted run carrying every contributing pattern.

import type { PatternSpan } from "./types.js";

export interface Segment {
  text: string;
  highlighted: boolean;
  patterns: string[];
}

export function segmentText(text: string, spans: PatternSpan[]): Segment[] {
  const clipped = spans
    .map(([pattern, start, end]): PatternSpan => [
      pattern,
      Math.max(0, Math.min(start, text.length)),
      Math.max(0, Math.min(end, text.length)),
    ])
    .filter(([, start, end]) => end > start);
  if (clipped.length === 0) {
    return text ? [{ text, highlighted: false, patterns: [] }] : [];
  }
  const boundaries = new Set<number>([0, text.length]);
  for (const [, start, end] of clipped) {
    boundaries.add(start);
    boundaries.add(end);
  }
  const points = [...boundaries].sort((a, b) => a - b);
  const segments: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const lo = points[i];
    const hi = points[i + 1];
    if (hi <= lo) continue;
    const active = clipped
      .filter(([, start, end]) => start <= lo && hi <= end)
      .map(([pattern]) => pattern);
    segments.push({
      text: text.slice(lo, hi),
      highlighted: active.length > 0,
      patterns: [...new Set(active)],
    });
  }
  return segments;
}

export function highlightedPortions(text: string, spans: PatternSpan[]): string[] {
  return segmentText(text, spans)
    .filter((segment) => segment.highlighted)
    .map((segment) => segment.text);
}
