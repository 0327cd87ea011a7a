/**
 * Payload types mirroring the analysis-service JSON API.
 *
 * The dashboard never computes analytics locally; every number it renders
 * comes from one of these documents.
 */

export interface GraphNode {
  id: string;
  label: string;
  source_class: 'game' | 'bash' | 'msf';
  level: number;
  rank: number;
  entry: boolean;
  exit: boolean;
}

export interface DurationStats {
  mean: number;
  median: number;
  min: number;
  max: number;
}

export interface GraphEdge {
  source: string;
  target: string;
  frequency: number;
  trainee_ids: string[];
  duration_stats: DurationStats;
  back_edge: boolean;
  selected_stat?: { name: string; seconds: number };
}

export interface GraphPayload {
  nodes: GraphNode[];
  edges: GraphEdge[];
  levels: number[];
  trainees: string[];
  mode: 'frequency' | 'performance';
}

export interface GraphDoc {
  config: Record<string, unknown>;
  graph: GraphPayload;
  highlight?: { nodes: string[]; edges: [string, string][] };
  dot?: string;
}

export interface WindowSpan {
  index: number;
  level: number;
  rel_start: number;
  rel_end: number;
}

export interface DisplayPoint {
  x: number;
  y: number;
  window_indices: number[];
}

export interface SentimentSeries {
  trainee_id: string;
  cumulative: number[];
  display_points: DisplayPoint[];
}

export interface SentimentDoc {
  config: Record<string, unknown>;
  grid: {
    windows: WindowSpan[];
    levels: number[];
    windows_per_level: number;
    trainees: string[];
    missing: { trainee_id: string; level: number }[];
  };
  raw_scores: Record<string, Record<string, number>>;
  normalized_scores: Record<string, Record<string, number>>;
  series: SentimentSeries[];
}

export interface ClustersDoc {
  config: Record<string, unknown>;
  clusters: {
    k: number;
    seed: number;
    wcss: number;
    assignments: Record<string, number>;
    centroids: number[][];
  };
  views: {
    line_view: { bars: number[]; members: Record<string, string[]> };
    spider_view: { centroids: number[][] };
  };
  features: { trainee_id: string; values: number[]; level_aggregates: number[] }[];
  elbow?: ElbowPayload;
}

export interface ElbowPayload {
  points: { k: number; wcss: number }[];
  suggested_k: number;
}

export interface MatrixCell {
  count: number;
  events: { timestamp: string; content: string }[];
}

export interface MatrixDoc {
  config: Record<string, unknown>;
  columns: (GraphNodeRef & { id: string })[];
  rows: string[];
  cells: Record<string, Record<string, MatrixCell>>;
}

export interface GraphNodeRef {
  label: string;
  source_class: string;
  level: number;
}

export interface ProximityDoc {
  config: Record<string, unknown>;
  activities: (GraphNodeRef & { id: string })[];
}

export interface OverviewDoc {
  config: Record<string, unknown>;
  levels: {
    level: number;
    avg_command_count: number;
    avg_relative_time: number;
    avg_sentiment: number | null;
    histograms: Record<string, { bucket_edges: number[]; counts: number[] }>;
    empty: boolean;
  }[];
}

export interface DatasetRecord {
  dataset_id: string;
  name: string;
  ingested_at: string;
  stats: {
    raw_event_counts: Record<string, number>;
    event_counts: Record<string, number>;
    trainees: number;
    levels: number[];
    events: number;
  };
}

export interface ApiErrorDoc {
  code: string;
  message: string;
  details: unknown;
}

// ---------------------------------------------------------------------------
// Request documents

export interface CommandRuleDraft {
  pattern: string;
  mode: 'INCLUDE' | 'EXCLUDE';
  target_classes?: string[];
  is_regex?: boolean;
}

export interface GameEventRuleDraft {
  game_type: string;
  level: number;
  mode: 'REQUIRE_TRAINEE' | 'EXCLUDE_TRAINEE';
}

export interface FilterDraft {
  included_trainees?: string[] | null;
  included_levels?: number[] | null;
  command_rules?: CommandRuleDraft[];
  game_event_rules?: GameEventRuleDraft[];
}

export interface SentimentDraft {
  window_pct?: number;
  step_pct?: number;
  weights?: Record<string, number>;
}

// ---------------------------------------------------------------------------
// Client-side view state

export type GraphMode = 'frequency' | 'performance';
export type ClusterViewMode = 'line' | 'spider';

export interface SuppressionState {
  /** Trainees still drawn at full strength; everyone else is faded. */
  visibleTrainees: Set<string>;
  /** 0 = no fading, 1 = suppressed paths fully invisible. */
  strength: number;
}

export interface HoverSelection {
  windowIndex: number;
  traineeIds: string[];
}

export interface ViewState {
  datasetId: string | null;
  filterDraft: FilterDraft;
  sentimentDraft: SentimentDraft;
  graphMode: GraphMode;
  clusterViewMode: ClusterViewMode;
  suppression: SuppressionState;
  hover: HoverSelection | null;
  /** While frozen, hover changes must not update the linked views. */
  frozen: boolean;
}

export function initialViewState(): ViewState {
  return {
    datasetId: null,
    filterDraft: {},
    sentimentDraft: {},
    graphMode: 'frequency',
    clusterViewMode: 'line',
    suppression: { visibleTrainees: new Set(), strength: 0.5 },
    hover: null,
    frozen: false,
  };
}
