/**
 * Client-side geometry: layered graph layout from the service's per-level
 * rank hints, convex hulls around highlighted node groups, and the
 * auto-zoom viewport.
 */

import type { GraphNode, GraphPayload } from './types';

export interface Point {
  x: number;
  y: number;
}

export interface NodePosition extends Point {
  node: GraphNode;
}

export const NODE_RADIUS = 18;
const LEVEL_GAP = 160;
const RANK_GAP = 70;

/**
 * Levels become columns (left to right), ranks rows within a column.
 * Deterministic: identical payloads always produce identical positions.
 */
export function layeredLayout(graph: GraphPayload): Map<string, NodePosition> {
  const levelIndex = new Map<number, number>();
  graph.levels.forEach((level, i) => levelIndex.set(level, i));
  const positions = new Map<string, NodePosition>();
  for (const node of graph.nodes) {
    const col = levelIndex.get(node.level) ?? 0;
    positions.set(node.id, {
      node,
      x: 80 + col * LEVEL_GAP,
      y: 60 + node.rank * RANK_GAP,
    });
  }
  return positions;
}

function cross(o: Point, a: Point, b: Point): number {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/** Monotone-chain convex hull; degenerate inputs return their points. */
export function convexHull(points: Point[]): Point[] {
  if (points.length <= 2) return [...points];
  const sorted = [...points].sort((a, b) => a.x - b.x || a.y - b.y);
  const lower: Point[] = [];
  for (const p of sorted) {
    while (lower.length >= 2 && cross(lower[lower.length - 2]!, lower[lower.length - 1]!, p) <= 0) {
      lower.pop();
    }
    lower.push(p);
  }
  const upper: Point[] = [];
  for (let i = sorted.length - 1; i >= 0; i--) {
    const p = sorted[i]!;
    while (upper.length >= 2 && cross(upper[upper.length - 2]!, upper[upper.length - 1]!, p) <= 0) {
      upper.pop();
    }
    upper.push(p);
  }
  lower.pop();
  upper.pop();
  return lower.concat(upper);
}

/** Push each hull vertex outward from the centroid by `pad` pixels. */
export function padHull(hull: Point[], pad: number): Point[] {
  if (hull.length === 0) return [];
  const cx = hull.reduce((s, p) => s + p.x, 0) / hull.length;
  const cy = hull.reduce((s, p) => s + p.y, 0) / hull.length;
  return hull.map((p) => {
    const dx = p.x - cx;
    const dy = p.y - cy;
    const norm = Math.hypot(dx, dy) || 1;
    return { x: p.x + (dx / norm) * pad, y: p.y + (dy / norm) * pad };
  });
}

export interface ViewBox {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Viewport tightly framing the given points (the hull auto-zoom target). */
export function zoomTo(points: Point[], margin = NODE_RADIUS * 2): ViewBox | null {
  if (points.length === 0) return null;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const minX = Math.min(...xs) - margin;
  const minY = Math.min(...ys) - margin;
  return {
    x: minX,
    y: minY,
    width: Math.max(...xs) + margin - minX,
    height: Math.max(...ys) + margin - minY,
  };
}

export function pointInHull(hull: Point[], p: Point): boolean {
  if (hull.length < 3) return false;
  for (let i = 0; i < hull.length; i++) {
    const a = hull[i]!;
    const b = hull[(i + 1) % hull.length]!;
    if (cross(a, b, p) < 0) return false;
  }
  return true;
}
