/**
 * SVG renderer for the process graph. Pure: payload in, markup out, so
 * it can be verified without a browser and mounted anywhere.
 */

import {
  NODE_RADIUS,
  convexHull,
  layeredLayout,
  padHull,
  zoomTo,
  type NodePosition,
  type ViewBox,
} from '../layout';
import type { GraphDoc, SuppressionState } from '../types';

const CLASS_COLORS: Record<string, string> = {
  game: '#8860b0',
  bash: '#2b7a3e',
  msf: '#b05030',
};

export interface GraphRenderOptions {
  highlightedNodeIds?: string[];
  suppression?: SuppressionState;
  width?: number;
  height?: number;
}

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

/** Edge stroke width grows with the trace count, clamped for readability. */
export function edgeWidth(frequency: number, maxFrequency: number): number {
  if (maxFrequency <= 0) return 1;
  return 1 + 7 * (frequency / maxFrequency);
}

function viewBoxAttr(box: ViewBox | null, width: number, height: number): string {
  if (!box) return `0 0 ${width} ${height}`;
  return `${box.x} ${box.y} ${box.width} ${box.height}`;
}

export function renderGraph(doc: GraphDoc, opts: GraphRenderOptions = {}): string {
  const { graph } = doc;
  const width = opts.width ?? 900;
  const height = opts.height ?? 600;
  if (graph.nodes.length === 0) {
    return (
      `<svg class="graph-view" viewBox="0 0 ${width} ${height}">` +
      `<text class="empty-state" x="${width / 2}" y="${height / 2}">` +
      `no events match the current filter</text></svg>`
    );
  }

  const positions = layeredLayout(graph);
  const highlighted = new Set(opts.highlightedNodeIds ?? []);
  const suppression = opts.suppression;

  // Auto-zoom: frame the hull when a highlight is active, else everything.
  const hullPoints = [...highlighted]
    .map((id) => positions.get(id))
    .filter((p): p is NodePosition => p !== undefined);
  const zoomTarget = hullPoints.length > 0 ? hullPoints : [...positions.values()];
  const box = zoomTo(zoomTarget);

  const parts: string[] = [
    `<svg class="graph-view" viewBox="${viewBoxAttr(box, width, height)}">`,
  ];

  if (hullPoints.length >= 3) {
    const hull = padHull(convexHull(hullPoints), NODE_RADIUS * 1.5);
    const pts = hull.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(' ');
    parts.push(`<polygon class="proximity-hull" points="${pts}"/>`);
  }

  const maxFreq = Math.max(...graph.edges.map((e) => e.frequency));
  for (const edge of graph.edges) {
    const a = positions.get(edge.source);
    const b = positions.get(edge.target);
    if (!a || !b) continue;
    const classes = ['edge'];
    if (edge.back_edge) classes.push('back-edge');
    if (highlighted.has(edge.source) && highlighted.has(edge.target)) {
      classes.push('highlighted');
    }
    const opacity = edgeOpacity(edge.trainee_ids, suppression);
    const label =
      graph.mode === 'performance' && edge.selected_stat
        ? `${edge.selected_stat.seconds.toFixed(1)}s`
        : String(edge.frequency);
    parts.push(
      `<g class="${classes.join(' ')}" opacity="${opacity.toFixed(2)}">` +
        `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" ` +
        `stroke-width="${edgeWidth(edge.frequency, maxFreq).toFixed(2)}"/>` +
        `<text x="${(a.x + b.x) / 2}" y="${(a.y + b.y) / 2}">${esc(label)}</text></g>`,
    );
  }

  for (const pos of positions.values()) {
    const node = pos.node;
    const classes = ['node', `node-${node.source_class}`];
    if (node.entry) classes.push('entry');
    if (node.exit) classes.push('exit');
    if (highlighted.has(node.id)) classes.push('highlighted');
    parts.push(
      `<g class="${classes.join(' ')}" data-node-id="${node.id}">` +
        `<circle cx="${pos.x}" cy="${pos.y}" r="${NODE_RADIUS}" ` +
        `fill="${CLASS_COLORS[node.source_class] ?? '#666'}"/>` +
        `<text x="${pos.x}" y="${pos.y + NODE_RADIUS + 12}">${esc(node.label)}</text></g>`,
    );
  }

  parts.push('</svg>');
  return parts.join('');
}

/**
 * Suppressed trainees' paths are rendered transparently: an edge walked
 * only by hidden trainees fades toward the configured strength.
 */
export function edgeOpacity(
  traineeIds: string[],
  suppression: SuppressionState | undefined,
): number {
  if (!suppression) return 1;
  const anyVisible = traineeIds.some((t) => suppression.visibleTrainees.has(t));
  if (anyVisible) return 1;
  return Math.max(0, 1 - suppression.strength);
}
