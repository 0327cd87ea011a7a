/**
 * Browser bootstrap: mounts the dashboard into #app and wires DOM events
 * to the controller. All logic lives in the controller and the pure
 * renderers; this file only moves strings and events around.
 */

import { ApiClient } from './api';
import { Dashboard } from './state';
import { suppressionList, toggleCluster } from './panels';
import { renderClusters } from './render/clusters';
import { renderGraph } from './render/graph';
import { renderMatrix } from './render/matrix';
import { renderSentiment } from './render/sentiment';

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing container #${id}`);
  return node;
}

export async function mount(baseUrl?: string): Promise<Dashboard> {
  // Service base URL configurable at load time; same-origin by default.
  const url =
    baseUrl ?? new URLSearchParams(location.search).get('service') ?? '';
  const client = new ApiClient(url);
  const dash = new Dashboard(client);

  dash.onChange((state, views) => {
    if (dash.lastError) {
      el('banner').textContent = dash.lastError.message;
      el('banner').classList.add('visible');
    } else {
      el('banner').classList.remove('visible');
    }
    if (views.graph) {
      el('graph').innerHTML = renderGraph(views.graph, {
        highlightedNodeIds: dash.highlightedNodeIds,
        suppression: state.suppression,
      });
    }
    if (views.sentiment) {
      el('sentiment').innerHTML = renderSentiment(views.sentiment, {
        suppression: state.suppression,
        frozen: state.frozen,
      });
    }
    if (views.clusters) {
      el('clusters').innerHTML = renderClusters(
        views.clusters,
        state.clusterViewMode,
        state.suppression,
      );
    }
    if (views.matrix) {
      el('matrix').innerHTML = renderMatrix(views.matrix);
    }
    if (views.sentiment) {
      const entries = suppressionList(
        [...views.sentiment.grid.trainees],
        state.suppression,
        'id',
        views.clusters ?? undefined,
      );
      el('suppression').innerHTML = entries
        .map(
          (e) =>
            `<label><input type="checkbox" data-trainee="${e.traineeId}"` +
            `${e.visible ? ' checked' : ''}/>${e.traineeId}</label>`,
        )
        .join('');
    }
  });

  el('sentiment').addEventListener('mouseover', (event) => {
    const target = event.target as HTMLElement;
    const windows = target.getAttribute('data-windows');
    const trainee = target.closest('[data-trainee]')?.getAttribute('data-trainee');
    if (windows && trainee) {
      const first = Number(windows.split(',')[0]);
      void dash.hoverWindow(first, [trainee]);
    }
  });
  el('sentiment').addEventListener('mouseleave', () => dash.clearHover());
  el('freeze').addEventListener('change', (event) => {
    dash.setFrozen((event.target as HTMLInputElement).checked);
  });
  el('graph-mode').addEventListener('click', () => void dash.toggleGraphMode());
  el('cluster-mode').addEventListener('click', () => dash.toggleClusterView());
  el('clusters').addEventListener('change', (event) => {
    const idx = (event.target as HTMLElement).getAttribute('data-cluster');
    if (idx !== null && dash.views.clusters) {
      dash.setSuppression(
        toggleCluster(dash.state.suppression, dash.views.clusters, Number(idx))
          .visibleTrainees,
      );
    }
  });
  el('suppression').addEventListener('change', (event) => {
    const tid = (event.target as HTMLElement).getAttribute('data-trainee');
    if (tid) {
      const visible = new Set(dash.state.suppression.visibleTrainees);
      if (visible.has(tid)) visible.delete(tid);
      else visible.add(tid);
      dash.setSuppression(visible);
    }
  });

  const datasets = await client.listDatasets();
  const first = datasets.datasets[0];
  if (first) await dash.selectDataset(first.dataset_id);
  return dash;
}
