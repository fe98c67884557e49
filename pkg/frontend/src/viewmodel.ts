// The instance view model: a pure projection of the API views.  The server
// decides which worker actions are available; the console never invents or
// filters actions on its own.

import type {
  CaseFileView,
  CaseSummary,
  ItemView,
  MilestoneView,
  PlannableEntry,
  StandardEvent,
} from './types.js';

export interface ItemCard {
  id: string;
  name: string;
  kind: string;
  state: string;
  parent: string;
  discretionary: boolean;
  claimedBy: string | null;
  actions: string[]; // exactly the server's advertised actions
}

export interface InstanceViewModel {
  header: {
    instanceId: string;
    name: string;
    caseState: string;
    clock: number;
    completable: boolean;
    readOnly: boolean;
    actions: string[];
  };
  cards: ItemCard[];
  milestoneBoard: { name: string; definitionId: string; occurred: boolean; occurrences: number }[];
  caseFileTree: CaseFileView[];
  plannable: PlannableEntry[];
  feed: StandardEvent[];
}

const KIND_ICONS: Record<string, string> = {
  stage: '▣',
  human_task_blocking: '✋',
  human_task_nonblocking: '🤝',
  process_task: '⚙',
  case_task: '📁',
  milestone: '◇',
  timer_listener: '⏱',
  user_listener: '👤',
};

export function kindIcon(kind: string): string {
  return KIND_ICONS[kind] ?? '•';
}

export function buildInstanceView(
  summary: CaseSummary,
  items: ItemView[],
  milestones: MilestoneView[],
  caseFile: CaseFileView[],
  plannable: PlannableEntry[],
  history: StandardEvent[],
): InstanceViewModel {
  const readOnly = summary.caseState === 'closed';
  return {
    header: {
      instanceId: summary.instanceId,
      name: summary.name,
      caseState: summary.caseState,
      clock: summary.clock,
      completable: summary.completable,
      readOnly,
      actions: readOnly ? [] : summary.caseActions ?? [],
    },
    cards: items.map((item) => ({
      id: item.id,
      name: item.name,
      kind: item.kind,
      state: item.state,
      parent: item.parent,
      discretionary: item.discretionary,
      claimedBy: item.claimedBy,
      actions: readOnly ? [] : item.actions ?? [],
    })),
    milestoneBoard: milestones.map((m) => ({
      name: m.name,
      definitionId: m.definitionId,
      occurred: m.occurred,
      occurrences: m.occurrences,
    })),
    caseFileTree: caseFile,
    plannable: readOnly ? [] : plannable,
    feed: [...history].sort((a, b) => a.seq - b.seq),
  };
}
