/**
 * Thin typed client for the analysis service.
 *
 * Every call is recorded in `requestLog`, which the tests (and the
 * debugging overlay) use to prove that presentation-only interactions
 * such as suppression never hit the network.
 */

import type {
  ApiErrorDoc,
  ClustersDoc,
  DatasetRecord,
  FilterDraft,
  GraphDoc,
  GraphMode,
  MatrixDoc,
  OverviewDoc,
  ProximityDoc,
  SentimentDoc,
  SentimentDraft,
} from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly doc: ApiErrorDoc,
  ) {
    super(`${doc.code}: ${doc.message}`);
  }
}

export interface LoggedRequest {
  method: string;
  url: string;
  body?: unknown;
}

export interface GraphRequest {
  filter?: FilterDraft;
  mode?: GraphMode;
  stat?: 'mean' | 'median' | 'min' | 'max';
  dependency_threshold?: number;
  highlight_trainees?: string[];
}

export interface AnalyticRequest {
  filter?: FilterDraft;
  sentiment?: SentimentDraft;
  clustering?: Record<string, number>;
  [key: string]: unknown;
}

export class ApiClient {
  readonly requestLog: LoggedRequest[] = [];

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const url = this.baseUrl + path;
    this.requestLog.push({ method, url, body });
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { 'content-type': 'application/json' };
    }
    const resp = await this.fetchImpl(url, init);
    if (!resp.ok) {
      let doc: ApiErrorDoc;
      try {
        doc = (await resp.json()) as ApiErrorDoc;
      } catch {
        doc = { code: 'HttpError', message: `status ${resp.status}`, details: null };
      }
      throw new ApiError(resp.status, doc);
    }
    return (await resp.json()) as T;
  }

  listDatasets(): Promise<{ datasets: DatasetRecord[] }> {
    return this.request('GET', '/datasets');
  }

  graph(datasetId: string, req: GraphRequest): Promise<GraphDoc> {
    return this.request('POST', `/datasets/${datasetId}/graph`, req);
  }

  sentiment(datasetId: string, req: AnalyticRequest): Promise<SentimentDoc> {
    return this.request('POST', `/datasets/${datasetId}/sentiment`, req);
  }

  clusters(datasetId: string, req: AnalyticRequest): Promise<ClustersDoc> {
    return this.request('POST', `/datasets/${datasetId}/clusters`, req);
  }

  matrix(datasetId: string, req: AnalyticRequest): Promise<MatrixDoc> {
    return this.request('POST', `/datasets/${datasetId}/matrix`, req);
  }

  proximity(
    datasetId: string,
    req: AnalyticRequest & { window_index?: number; trainees?: string[] },
  ): Promise<ProximityDoc> {
    return this.request('POST', `/datasets/${datasetId}/proximity`, req);
  }

  overview(datasetId: string, req: AnalyticRequest): Promise<OverviewDoc> {
    return this.request('POST', `/datasets/${datasetId}/overview`, req);
  }

  /** Number of analytic (non-listing) requests issued so far. */
  analyticRequestCount(): number {
    return this.requestLog.filter((r) => r.method === 'POST').length;
  }
}
