/**
 * Cluster views. The line view shows every member's series with a size
 * bar and a visibility switch per cluster; the spider view draws the
 * per-level centroid polygons. They share one viewport: exactly one is
 * rendered at a time.
 */

import type { ClustersDoc, ClusterViewMode, SuppressionState } from '../types';

export function renderClusters(
  doc: ClustersDoc,
  mode: ClusterViewMode,
  suppression?: SuppressionState,
): string {
  return mode === 'line' ? renderLineView(doc, suppression) : renderSpiderView(doc);
}

function renderLineView(doc: ClustersDoc, suppression?: SuppressionState): string {
  const { bars, members } = doc.views.line_view;
  const maxBar = Math.max(...bars, 1);
  const parts: string[] = ['<div class="cluster-view cluster-line-view">'];
  bars.forEach((size, i) => {
    const ids = members[String(i)] ?? [];
    const allVisible =
      !suppression || ids.every((t) => suppression.visibleTrainees.has(t));
    parts.push(
      `<div class="cluster-row" data-cluster="${i}">` +
        `<div class="cluster-bar" style="width:${((size / maxBar) * 100).toFixed(0)}%">` +
        `${size}</div>` +
        `<input type="checkbox" class="cluster-switch" data-cluster="${i}"` +
        `${allVisible ? ' checked' : ''}/>` +
        `<span class="cluster-members">${ids.join(', ')}</span></div>`,
    );
  });
  parts.push('</div>');
  return parts.join('');
}

function renderSpiderView(doc: ClustersDoc): string {
  const centroids = doc.views.spider_view.centroids;
  const size = 300;
  const center = size / 2;
  const radius = size / 2 - 30;
  const axes = centroids[0]?.length ?? 0;
  const parts: string[] = [
    `<svg class="cluster-view cluster-spider-view" viewBox="0 0 ${size} ${size}">`,
  ];
  // Normalization for display only; the values themselves come verbatim
  // from the service payload.
  const extent = Math.max(...centroids.flat().map(Math.abs), 1e-9);
  for (let a = 0; a < axes; a++) {
    const angle = (2 * Math.PI * a) / axes - Math.PI / 2;
    parts.push(
      `<line class="spider-axis" x1="${center}" y1="${center}" ` +
        `x2="${(center + radius * Math.cos(angle)).toFixed(1)}" ` +
        `y2="${(center + radius * Math.sin(angle)).toFixed(1)}"/>`,
    );
  }
  centroids.forEach((centroid, i) => {
    if (centroid.length === 0) return;
    const pts = centroid
      .map((v, a) => {
        const angle = (2 * Math.PI * a) / axes - Math.PI / 2;
        const r = (radius * (v / extent + 1)) / 2;
        return `${(center + r * Math.cos(angle)).toFixed(1)},${(
          center + r * Math.sin(angle)
        ).toFixed(1)}`;
      })
      .join(' ');
    parts.push(`<polygon class="spider-polygon" data-cluster="${i}" points="${pts}"/>`);
  });
  parts.push('</svg>');
  return parts.join('');
}

export function renderElbow(doc: ClustersDoc): string {
  if (!doc.elbow) return '';
  const items = doc.elbow.points
    .map(
      (p) =>
        `<li data-k="${p.k}"${p.k === doc.elbow!.suggested_k ? ' class="suggested"' : ''}>` +
        `k=${p.k}: ${p.wcss.toFixed(3)}</li>`,
    )
    .join('');
  return `<ol class="elbow-series">${items}</ol>`;
}
