/**
 * Sentiment timeline: one polyline per trainee over the cumulative
 * series, with the service's merged display points drawn as hoverable
 * circles (a merged joint point carries every merged window index).
 */

import type { SentimentDoc, SuppressionState } from '../types';

export interface SentimentRenderOptions {
  width?: number;
  height?: number;
  suppression?: SuppressionState;
  frozen?: boolean;
}

interface Scale {
  x: (i: number) => number;
  y: (v: number) => number;
}

function makeScale(doc: SentimentDoc, width: number, height: number): Scale {
  const n = Math.max(doc.grid.windows.length - 1, 1);
  let lo = 0;
  let hi = 0;
  for (const s of doc.series) {
    for (const v of s.cumulative) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  const span = hi - lo || 1;
  const pad = 20;
  return {
    x: (i) => pad + (i / n) * (width - 2 * pad),
    y: (v) => height - pad - ((v - lo) / span) * (height - 2 * pad),
  };
}

export function renderSentiment(doc: SentimentDoc, opts: SentimentRenderOptions = {}): string {
  const width = opts.width ?? 800;
  const height = opts.height ?? 400;
  const scale = makeScale(doc, width, height);
  const parts: string[] = [
    `<svg class="sentiment-view${opts.frozen ? ' frozen' : ''}" viewBox="0 0 ${width} ${height}">`,
  ];

  // Level boundaries as vertical rules.
  for (let i = 0; i < doc.grid.windows.length; i++) {
    const w = doc.grid.windows[i]!;
    if (i > 0 && w.level !== doc.grid.windows[i - 1]!.level) {
      const x = scale.x(i - 0.5);
      parts.push(`<line class="level-rule" x1="${x}" y1="0" x2="${x}" y2="${height}"/>`);
    }
  }

  for (const series of doc.series) {
    const suppressed =
      opts.suppression !== undefined &&
      !opts.suppression.visibleTrainees.has(series.trainee_id);
    const opacity = suppressed ? Math.max(0, 1 - opts.suppression!.strength) : 1;
    const path = series.cumulative
      .map((v, i) => `${scale.x(i).toFixed(1)},${scale.y(v).toFixed(1)}`)
      .join(' ');
    parts.push(
      `<g class="series" data-trainee="${series.trainee_id}" opacity="${opacity.toFixed(2)}">` +
        `<polyline points="${path}" fill="none"/>`,
    );
    for (const point of series.display_points) {
      // data-windows lets the hover handler report every merged window.
      parts.push(
        `<circle class="display-point" cx="${scale.x(point.x).toFixed(1)}" ` +
          `cy="${scale.y(point.y).toFixed(1)}" r="4" ` +
          `data-windows="${point.window_indices.join(',')}"/>`,
      );
    }
    parts.push('</g>');
  }
  parts.push('</svg>');
  return parts.join('');
}

/** Trainees whose series pass through the given window (hover targets). */
export function traineesAtWindow(doc: SentimentDoc, windowIndex: number): string[] {
  return doc.series
    .filter((s) => windowIndex >= 0 && windowIndex < s.cumulative.length)
    .map((s) => s.trainee_id);
}

/** All window indices represented by a display point (merged or not). */
export function windowsOfPoint(doc: SentimentDoc, traineeId: string, x: number): number[] {
  const series = doc.series.find((s) => s.trainee_id === traineeId);
  if (!series) return [];
  const point = series.display_points.find((p) => p.x === x);
  return point ? [...point.window_indices] : [];
}
