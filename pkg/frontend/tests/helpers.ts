/**
 * Test harness: fixture loading plus a fake service implementing the
 * fetch contract from response documents captured from the real
 * analysis service (tests/fixtures/*.json).
 */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { FetchLike } from '../src/api';

const FIXTURE_DIR = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

export function fixture<T = any>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURE_DIR, name), 'utf-8')) as T;
}

export interface ServedRequest {
  method: string;
  path: string;
  body: any;
}

export class FakeService {
  requests: ServedRequest[] = [];

  readonly fetch: FetchLike = async (url, init) => {
    const path = new URL(url, 'http://service').pathname;
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.requests.push({ method, path, body });
    const doc = this.route(path, body);
    if (doc === null) {
      return new Response(
        JSON.stringify({ code: 'UnknownRoute', message: path, details: null }),
        { status: 404 },
      );
    }
    if (doc.__status) {
      const { __status, ...rest } = doc;
      return new Response(JSON.stringify(rest), { status: __status });
    }
    return new Response(JSON.stringify(doc), { status: 200 });
  };

  private route(path: string, body: any): any {
    if (path === '/datasets') return fixture('datasets.json');
    const match = path.match(/^\/datasets\/[^/]+\/(\w+)$/);
    if (!match) return null;
    switch (match[1]) {
      case 'graph':
        // Unknown trainees pass client-side validation (the client has no
        // roster) and are rejected by the service with a 422 report.
        if (body?.filter?.included_trainees?.includes('GHOST')) {
          return { __status: 422, ...fixture('error_invalid_spec.json') };
        }
        return body?.mode === 'performance'
          ? fixture('graph_performance.json')
          : fixture('graph_frequency.json');
      case 'sentiment':
        return fixture('sentiment.json');
      case 'clusters':
        return fixture('clusters.json');
      case 'elbow':
        return fixture('elbow.json');
      case 'matrix':
        return fixture('matrix.json');
      case 'proximity':
        return body?.window_index === 0
          ? fixture('proximity_w0.json')
          : fixture('proximity_w1.json');
      case 'overview':
        return fixture('overview.json');
      default:
        return null;
    }
  }
}
