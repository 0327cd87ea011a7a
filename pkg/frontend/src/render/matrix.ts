/**
 * Activity matrix: trainees as rows, distinct activities as columns in
 * first-occurrence order, cell tooltips carrying the full command text
 * of every underlying event.
 */

import type { MatrixDoc } from '../types';

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function cellTooltip(doc: MatrixDoc, traineeId: string, columnId: string): string {
  const cell = doc.cells[traineeId]?.[columnId];
  if (!cell) return '';
  return cell.events.map((e) => `${e.timestamp}  ${e.content}`.trimEnd()).join('\n');
}

export function renderMatrix(doc: MatrixDoc): string {
  const header = doc.columns
    .map(
      (c) =>
        `<th class="col-${c.source_class}" data-column-id="${c.id}" ` +
        `data-level="${c.level}">${esc(c.label)}</th>`,
    )
    .join('');
  const rows = doc.rows
    .map((tid) => {
      const cells = doc.columns
        .map((c) => {
          const cell = doc.cells[tid]?.[c.id];
          if (!cell) return '<td class="empty"></td>';
          return (
            `<td class="filled" title="${esc(cellTooltip(doc, tid, c.id))}">` +
            `${cell.count}</td>`
          );
        })
        .join('');
      return `<tr data-trainee="${tid}"><th>${esc(tid)}</th>${cells}</tr>`;
    })
    .join('');
  return (
    `<table class="matrix-view"><thead><tr><th></th>${header}</tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}
