// Wire types mirrored from the session service.

export type EventKind =
  | 'prompt'
  | 'info'
  | 'question'
  | 'estimate'
  | 'confirm'
  | 'result'
  | 'error';

export interface SessionEvent {
  seq: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface EventBatch {
  events: SessionEvent[];
  busy: boolean;
  waiting: boolean;
}

export interface SimilarRequest {
  request_id: string;
  dataset_name: string;
  algorithm: string;
}

export interface EstimatePayload {
  available: boolean;
  duration_s: number | null;
  emissions_kg: number | null;
  trained_on: number | null;
  similar: SimilarRequest[];
  text_lines: string[];
}

export interface ResultPayload {
  request_id: string | null;
  problem: string;
  dataset?: string;
  algorithm?: string;
  duration_s?: number;
  emissions_kg?: number;
  summary: Record<string, unknown>;
  bundle_dir?: string;
  plots?: string[];
  tables?: string[];
  notes?: string[];
}

export interface BundlePlot {
  name: string;
  kind: string;
  title: string;
  file: string;
  data: Record<string, unknown>;
}

export interface BundleTable {
  name: string;
  file: string;
  headers: string[];
  rows: (string | number)[][];
}

export interface BundleIndex {
  request_id: string;
  plots: BundlePlot[];
  tables: BundleTable[];
  latex: { name: string; file: string }[];
  notes: string[];
}

// One rendered entry of the conversation.
export interface ChatTurn {
  author: 'user' | 'framework';
  kind: EventKind | 'user-text';
  element: HTMLElement;
}
