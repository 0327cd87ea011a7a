import { describe, expect, it } from 'vitest';

import {
  convexHull,
  layeredLayout,
  padHull,
  pointInHull,
  zoomTo,
} from '../src/layout';
import { edgeWidth } from '../src/render/graph';
import { fixture } from './helpers';

const graphDoc = fixture('graph_frequency.json');

describe('layered layout', () => {
  it('positions every node, columns ordered by level', () => {
    const positions = layeredLayout(graphDoc.graph);
    expect(positions.size).toBe(graphDoc.graph.nodes.length);
    const byLevel = new Map<number, number[]>();
    for (const pos of positions.values()) {
      byLevel.set(pos.node.level, [...(byLevel.get(pos.node.level) ?? []), pos.x]);
    }
    const levels = [...byLevel.keys()].sort((a, b) => a - b);
    for (let i = 1; i < levels.length; i++) {
      expect(Math.min(...byLevel.get(levels[i]!)!)).toBeGreaterThan(
        Math.max(...byLevel.get(levels[i - 1]!)!),
      );
    }
  });

  it('is deterministic', () => {
    const a = [...layeredLayout(graphDoc.graph).entries()];
    const b = [...layeredLayout(graphDoc.graph).entries()];
    expect(a).toEqual(b);
  });
});

describe('convex hull', () => {
  const points = [
    { x: 0, y: 0 },
    { x: 10, y: 0 },
    { x: 10, y: 10 },
    { x: 0, y: 10 },
    { x: 5, y: 5 }, // interior
  ];

  it('drops interior points', () => {
    const hull = convexHull(points);
    expect(hull).toHaveLength(4);
    expect(hull).not.toContainEqual({ x: 5, y: 5 });
  });

  it('contains all input points', () => {
    const hull = convexHull(points);
    for (const p of points) {
      // boundary counts as inside after a tiny outward pad
      expect(pointInHull(padHull(hull, 0.01), p)).toBe(true);
    }
  });

  it('padding grows the hull outward', () => {
    const hull = convexHull(points);
    const padded = padHull(hull, 5);
    for (const p of hull) {
      expect(pointInHull(padded, p)).toBe(true);
    }
    expect(pointInHull(hull, { x: -2, y: 5 })).toBe(false);
    expect(pointInHull(padded, { x: -2, y: 5 })).toBe(true);
  });

  it('handles degenerate inputs', () => {
    expect(convexHull([])).toEqual([]);
    expect(convexHull([{ x: 1, y: 1 }])).toEqual([{ x: 1, y: 1 }]);
  });
});

describe('auto zoom', () => {
  it('frames all points with a margin', () => {
    const box = zoomTo([{ x: 0, y: 0 }, { x: 100, y: 50 }], 10)!;
    expect(box.x).toBe(-10);
    expect(box.y).toBe(-10);
    expect(box.width).toBe(120);
    expect(box.height).toBe(70);
  });

  it('returns null for an empty selection', () => {
    expect(zoomTo([])).toBeNull();
  });
});

describe('edge width', () => {
  it('grows with frequency', () => {
    expect(edgeWidth(1, 10)).toBeLessThan(edgeWidth(5, 10));
    expect(edgeWidth(5, 10)).toBeLessThan(edgeWidth(10, 10));
  });

  it('is bounded', () => {
    expect(edgeWidth(10, 10)).toBeLessThanOrEqual(8);
    expect(edgeWidth(0, 0)).toBe(1);
  });
});
