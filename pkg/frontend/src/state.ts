/**
 * Dashboard controller: owns the ViewState, talks to the analysis
 * service, and enforces the linked-view contract:
 *
 *  - raw-filter changes re-query every analytic view;
 *  - suppression and freeze are presentation-only and never query;
 *  - hovering a sentiment point fetches the temporal-proximity node set
 *    and refreshes the matrix in the same interaction cycle;
 *  - the frequency/performance graphs share one viewport - exactly one
 *    is ever active.
 */

import { ApiClient } from './api';
import { validateDraft, type DraftProblem } from './panels';
import type {
  ClustersDoc,
  FilterDraft,
  GraphDoc,
  MatrixDoc,
  OverviewDoc,
  ProximityDoc,
  SentimentDoc,
  SentimentDraft,
  ViewState,
} from './types';
import { initialViewState } from './types';

export interface ViewDocs {
  graph: GraphDoc | null;
  sentiment: SentimentDoc | null;
  clusters: ClustersDoc | null;
  matrix: MatrixDoc | null;
  overview: OverviewDoc | null;
  proximity: ProximityDoc | null;
}

export type DashboardListener = (state: ViewState, views: ViewDocs) => void;

export class Dashboard {
  state: ViewState = initialViewState();
  views: ViewDocs = {
    graph: null,
    sentiment: null,
    clusters: null,
    matrix: null,
    overview: null,
    proximity: null,
  };
  /** Node ids currently highlighted in the graph (hull members). */
  highlightedNodeIds: string[] = [];
  /** Last error surfaced as a banner; the previous good views stay up. */
  lastError: Error | null = null;

  private listeners: DashboardListener[] = [];
  private renderCount = 0;

  constructor(
    private readonly client: ApiClient,
    private clusterK = 3,
  ) {}

  onChange(listener: DashboardListener): void {
    this.listeners.push(listener);
  }

  /** Number of view updates pushed so far (the tests' hover-storm probe). */
  get updateCount(): number {
    return this.renderCount;
  }

  private emit(): void {
    this.renderCount++;
    for (const listener of this.listeners) listener(this.state, this.views);
  }

  private analyticBody(): { filter: FilterDraft; sentiment: SentimentDraft } {
    return { filter: this.state.filterDraft, sentiment: this.state.sentimentDraft };
  }

  async selectDataset(datasetId: string): Promise<void> {
    this.state.datasetId = datasetId;
    this.state.hover = null;
    await this.refetchAll();
  }

  /** Re-query every analytic view from the current raw-filter draft. */
  async refetchAll(): Promise<void> {
    const id = this.state.datasetId;
    if (!id) return;
    try {
      const body = this.analyticBody();
      const [graph, sentiment, clusters, matrix, overview] = await Promise.all([
        this.client.graph(id, { filter: body.filter, mode: this.state.graphMode }),
        this.client.sentiment(id, body),
        this.client.clusters(id, { ...body, clustering: { k: this.clusterK } }),
        this.client.matrix(id, { filter: body.filter }),
        this.client.overview(id, { filter: body.filter }),
      ]);
      this.views = { graph, sentiment, clusters, matrix, overview, proximity: null };
      this.lastError = null;
      // Default: everyone visible until the analyst hides someone.
      if (this.state.suppression.visibleTrainees.size === 0) {
        this.state.suppression.visibleTrainees = new Set(sentiment.grid.trainees);
      }
    } catch (err) {
      this.lastError = err as Error;
    }
    this.emit();
  }

  /**
   * Apply a new raw-filter draft. Invalid drafts are refused inline:
   * the problems are returned, no request is sent, and the views keep
   * their previous contents.
   */
  async applyFilter(draft: FilterDraft): Promise<DraftProblem[]> {
    const problems = validateDraft(draft);
    if (problems.length > 0) {
      return problems;
    }
    this.state.filterDraft = draft;
    await this.refetchAll();
    return [];
  }

  async applySentimentConfig(draft: SentimentDraft): Promise<void> {
    this.state.sentimentDraft = draft;
    await this.refetchAll();
  }

  /**
   * Presentation-only: flips visibility annotations and re-renders.
   * Never touches the network; the analytics are unchanged by design.
   */
  setSuppression(visibleTrainees: Set<string>, strength?: number): void {
    this.state.suppression = {
      visibleTrainees: new Set(visibleTrainees),
      strength: strength ?? this.state.suppression.strength,
    };
    this.emit();
  }

  /** One shared viewport: activating one graph variant deactivates the other. */
  async toggleGraphMode(): Promise<void> {
    this.state.graphMode = this.state.graphMode === 'frequency' ? 'performance' : 'frequency';
    const id = this.state.datasetId;
    if (!id) return;
    try {
      this.views.graph = await this.client.graph(id, {
        filter: this.state.filterDraft,
        mode: this.state.graphMode,
        stat: 'median',
      });
      this.lastError = null;
    } catch (err) {
      this.lastError = err as Error;
    }
    this.emit();
  }

  /** Line and spider cluster views share a viewport too; no request needed. */
  toggleClusterView(): void {
    this.state.clusterViewMode = this.state.clusterViewMode === 'line' ? 'spider' : 'line';
    this.emit();
  }

  setFrozen(frozen: boolean): void {
    this.state.frozen = frozen;
    this.emit();
  }

  /**
   * Hovering a sentiment display point. One interaction cycle fetches
   * the proximity node set (graph hull + highlight) and the matrix for
   * the hovered trainees. Frozen mode drops the interaction entirely.
   */
  async hoverWindow(windowIndex: number, traineeIds: string[]): Promise<void> {
    if (this.state.frozen) return;
    const id = this.state.datasetId;
    if (!id) return;
    this.state.hover = { windowIndex, traineeIds };
    try {
      const [proximity, matrix] = await Promise.all([
        this.client.proximity(id, {
          filter: this.state.filterDraft,
          sentiment: this.state.sentimentDraft,
          window_index: windowIndex,
          trainees: traineeIds,
        }),
        this.client.matrix(id, {
          filter: { ...this.state.filterDraft, included_trainees: traineeIds },
        }),
      ]);
      this.views.proximity = proximity;
      this.views.matrix = matrix;
      this.highlightedNodeIds = proximity.activities.map((a) => a.id);
      this.lastError = null;
    } catch (err) {
      this.lastError = err as Error;
    }
    this.emit();
  }

  clearHover(): void {
    if (this.state.frozen) return;
    this.state.hover = null;
    this.highlightedNodeIds = [];
    this.views.proximity = null;
    this.emit();
  }
}
