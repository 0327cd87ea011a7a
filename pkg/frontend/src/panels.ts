/**
 * Filter- and suppression-panel view models. All validation that can be
 * decided client-side happens here so obviously broken drafts never
 * reach the service.
 */

import type { ClustersDoc, FilterDraft, SuppressionState } from './types';

export interface DraftProblem {
  field: string;
  message: string;
}

/** Optional game event kinds a rule row may target. */
export const RULE_GAME_TYPES = ['HintTaken', 'SolutionDisplayed', 'WrongAnswerSubmitted'];

export function levelsAreContiguous(levels: number[]): boolean {
  const sorted = [...levels].sort((a, b) => a - b);
  for (let i = 1; i < sorted.length; i++) {
    if (sorted[i]! - sorted[i - 1]! !== 1) return false;
  }
  return true;
}

/**
 * Client-side draft validation; mirrors the service's own checks so the
 * panel can refuse to submit (inline error, no request) instead of
 * round-tripping a 422.
 */
export function validateDraft(draft: FilterDraft): DraftProblem[] {
  const problems: DraftProblem[] = [];
  const levels = draft.included_levels;
  if (levels != null) {
    if (levels.length === 0) {
      problems.push({ field: 'included_levels', message: 'select at least one level' });
    } else if (!levelsAreContiguous(levels)) {
      problems.push({
        field: 'included_levels',
        message: 'levels must be subsequent (e.g. 2 & 3 & 4, but not 2 & 4)',
      });
    }
  }
  for (const rule of draft.command_rules ?? []) {
    if (!rule.pattern) {
      problems.push({ field: 'command_rules', message: 'rule pattern must not be empty' });
    }
    if (rule.is_regex) {
      try {
        new RegExp(rule.pattern);
      } catch {
        problems.push({
          field: 'command_rules',
          message: `pattern does not compile: ${rule.pattern}`,
        });
      }
    }
  }
  for (const rule of draft.game_event_rules ?? []) {
    if (!RULE_GAME_TYPES.includes(rule.game_type)) {
      problems.push({
        field: 'game_event_rules',
        message: `rules may only target ${RULE_GAME_TYPES.join(', ')}`,
      });
    }
  }
  return problems;
}

export interface SuppressionEntry {
  traineeId: string;
  visible: boolean;
  cluster: number | null;
}

/**
 * The suppression panel's list: every trainee, annotated rather than
 * removed, sorted by id or grouped by behavioral cluster.
 */
export function suppressionList(
  allTrainees: string[],
  suppression: SuppressionState,
  sortBy: 'id' | 'cluster',
  clusters?: ClustersDoc,
): SuppressionEntry[] {
  const assignment = (tid: string): number | null =>
    clusters ? (clusters.clusters.assignments[tid] ?? null) : null;
  const entries = [...allTrainees].sort().map((tid) => ({
    traineeId: tid,
    visible: suppression.visibleTrainees.has(tid),
    cluster: assignment(tid),
  }));
  if (sortBy === 'cluster') {
    if (!clusters) {
      throw new Error('cluster sort requires a clustering result');
    }
    const big = clusters.clusters.k;
    entries.sort((a, b) => {
      const ca = a.cluster ?? big;
      const cb = b.cluster ?? big;
      return ca !== cb ? ca - cb : a.traineeId < b.traineeId ? -1 : 1;
    });
  }
  return entries;
}

/** Toggle one cluster's members in or out of the visible set (the switches under the bars). */
export function toggleCluster(
  suppression: SuppressionState,
  clusters: ClustersDoc,
  clusterIndex: number,
): SuppressionState {
  const members = clusters.views.line_view.members[String(clusterIndex)] ?? [];
  const visible = new Set(suppression.visibleTrainees);
  const allVisible = members.every((t) => visible.has(t));
  for (const t of members) {
    if (allVisible) visible.delete(t);
    else visible.add(t);
  }
  return { ...suppression, visibleTrainees: visible };
}
