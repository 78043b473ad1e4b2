// Typed client for the faultline session service. The UI computes nothing:
// every number and status it shows comes from these response payloads.

export type SessionStatus = 'active' | 'succeeded' | 'exhausted';
export type FeedbackKind = 'non_existing_class' | 'non_buggy_class';

export interface QueryView {
  entities: string[];
  category: string;
  cycle: number;
  provenance: string;
  fallback: boolean;
}

export interface RankedRow {
  rank: number;
  file_id: string;
  score: number;
}

export interface FeedbackItem {
  kind: FeedbackKind;
  class_name: string;
}

export interface HistoryEntry {
  query: QueryView;
  top10: RankedRow[];
  feedback: FeedbackItem[];
}

export interface SessionView {
  session_id: string;
  project: string;
  version: string;
  report_id: string;
  status: SessionStatus;
  cycle: number;
  max_cycles: number;
  category: string;
  query: QueryView;
  top10: RankedRow[];
  excluded: string[];
  confirmed_file: string | null;
  history: HistoryEntry[];
}

export interface ReportPayload {
  report_id?: string;
  title: string;
  description: string;
  created_at?: string;
  max_cycles?: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  retriable: boolean;
}

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.body = body;
  }
}

async function request<T>(method: string, path: string, body?: unknown): Promise<T> {
  const resp = await fetch(path, {
    method,
    headers: { 'Content-Type': 'application/json' },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  const payload = await resp.json();
  if (!resp.ok) {
    const err = payload as Partial<ApiErrorBody>;
    throw new ApiError(resp.status, {
      code: err.code ?? 'unknown',
      message: err.message ?? `request failed with ${resp.status}`,
      retriable: err.retriable ?? false,
    });
  }
  return payload as T;
}

export function createSession(
  project: string,
  version: string,
  report: ReportPayload,
): Promise<SessionView> {
  const p = encodeURIComponent(project);
  const v = encodeURIComponent(version);
  return request<SessionView>('POST', `/api/projects/${p}/versions/${v}/sessions`, report);
}

export function getSession(sessionId: string): Promise<SessionView> {
  return request<SessionView>('GET', `/api/sessions/${encodeURIComponent(sessionId)}`);
}

export function submitFeedback(
  sessionId: string,
  items: FeedbackItem[],
): Promise<SessionView> {
  return request<SessionView>(
    'POST',
    `/api/sessions/${encodeURIComponent(sessionId)}/feedback`,
    items,
  );
}

export function confirmFile(sessionId: string, fileId: string): Promise<SessionView> {
  return request<SessionView>(
    'POST',
    `/api/sessions/${encodeURIComponent(sessionId)}/confirm`,
    { file_id: fileId },
  );
}

// "PaymentGateway.java" -> "PaymentGateway"; feedback talks about classes.
export function classNameOf(fileId: string): string {
  const base = fileId.split('/').pop() ?? fileId;
  return base.replace(/\.java$/, '');
}
