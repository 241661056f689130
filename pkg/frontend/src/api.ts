/** Typed client for the annotation service HTTP API. */

export interface EventSummary {
  event_id: string;
  source_id: string;
  start_utc: string;
  t_start_s: number;
  t_end_s: number;
  duration_s: number;
  n_pulses: number;
  snr_db: number | null;
  snr_p25_db: number | null;
  labeled: boolean;
  score: number | null;
}

export interface EventListing {
  events: EventSummary[];
  page: number;
  page_size: number;
  matched: number;
  progress: { labeled: number; total: number };
}

export interface Progress {
  labeled: number;
  total: number;
  by_score: Record<string, number>;
}

export interface StoredLabel {
  event_id: string;
  score: number;
  annotator: string;
  labeled_at: string;
}

export interface ExportResult {
  path: string;
  rows: number;
  skipped: string[];
}

export type Rubric = Record<string, string>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let code = "error";
    let detail = `HTTP ${resp.status}`;
    try {
      const body = (await resp.json()) as { error?: string; detail?: string };
      code = body.error ?? code;
      detail = body.detail ?? detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, code, detail);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  listEvents(filter: string, page = 0, pageSize = 200): Promise<EventListing> {
    const q = new URLSearchParams({
      filter,
      page: String(page),
      page_size: String(pageSize),
    });
    return this.fetchFn(`${this.base}/api/events?${q}`).then((r) => asJson<EventListing>(r));
  }

  submitScore(eventId: string, score: number, annotator: string): Promise<StoredLabel> {
    return this.fetchFn(`${this.base}/api/events/${encodeURIComponent(eventId)}/score`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ score, annotator }),
    }).then((r) => asJson<StoredLabel>(r));
  }

  rubric(): Promise<Rubric> {
    return this.fetchFn(`${this.base}/api/rubric`).then((r) => asJson<Rubric>(r));
  }

  progress(): Promise<Progress> {
    return this.fetchFn(`${this.base}/api/progress`).then((r) => asJson<Progress>(r));
  }

  exportTraining(): Promise<ExportResult> {
    return this.fetchFn(`${this.base}/api/export`, { method: "POST" }).then((r) =>
      asJson<ExportResult>(r),
    );
  }

  spectrogramUrl(eventId: string, padS = 2.0): string {
    return `${this.base}/api/events/${encodeURIComponent(eventId)}/spectrogram?pad_s=${padS}`;
  }

  audioUrl(eventId: string, padS = 2.0): string {
    return `${this.base}/api/events/${encodeURIComponent(eventId)}/audio?pad_s=${padS}`;
  }
}
