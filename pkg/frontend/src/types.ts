// Payload shapes of the casewright HTTP API.

export interface StandardEvent {
  seq: number;
  source: string;
  name: string;
  actor: string;
  tick: number;
  payload?: unknown;
}

export interface CaseSummary {
  instanceId: string;
  modelId: string;
  name: string;
  caseState: string;
  clock: number;
  eventSeq: number;
  autoComplete: boolean;
  completable: boolean;
  caseActions?: string[];
}

export interface ItemView {
  id: string;
  definitionId: string;
  name: string;
  kind: string;
  state: string;
  index: number;
  parent: string;
  discretionary: boolean;
  claimedBy: string | null;
  required: boolean;
  manualActivation: boolean;
  repetition: boolean;
  actions?: string[];
}

export interface MilestoneView {
  definitionId: string;
  name: string;
  instances: { id: string; state: string }[];
  occurred: boolean;
  occurrences: number;
}

export interface CaseFileView {
  path: string;
  exists: boolean;
  container: boolean;
  declared: boolean;
  children: string[];
  references: string[];
  revision: number;
  value: unknown;
}

export interface PlannableEntry {
  scope: string;
  scopeName: string;
  entry: string;
  name: string;
  kind: string;
  members: string[];
}

export interface ConsoleConfig {
  baseUrl: string;
  token: string;
}
