/**
 * Typed client for the gateway HTTP API. Every call the app makes goes
 * through here; there is no hidden endpoint.
 */

export type TrackStatus = "pending" | "running" | "ready" | "failed";

export interface TrackSummary {
  id: string;
  title: string;
  status: TrackStatus;
  error?: string;
}

export interface Question {
  id: string;
  track_id: string;
  snippet_start_s: number;
  snippet_end_s: number;
  options: string[];
  difficulty: string;
  snippet_url: string;
  option_preview_urls: string[];
}

export interface GradeResponse {
  question_id: string;
  correct: boolean;
  true_label: string;
  correct_index: number;
  difficulty: string;
}

export interface QualityStat {
  answered: number;
  correct: number;
  accuracy: number | null;
}

export interface SessionStats {
  session_id: string;
  answered: number;
  accuracy: number | null;
  per_quality: Record<string, QualityStat>;
  difficulty: string;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  url(path: string): string {
    return this.baseUrl + path;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) {
      let code = "error";
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  listTracks(): Promise<TrackSummary[]> {
    return this.request<TrackSummary[]>("/api/tracks");
  }

  getTrack(id: string): Promise<TrackSummary & { analysis?: unknown }> {
    return this.request(`/api/tracks/${encodeURIComponent(id)}`);
  }

  uploadTrack(file: Blob, title: string): Promise<{ id: string; status: TrackStatus }> {
    const form = new FormData();
    form.append("file", file, "upload.wav");
    form.append("title", title);
    return this.request("/api/tracks", { method: "POST", body: form });
  }

  createSession(
    trackIds: string[],
    difficulty: string,
  ): Promise<{ session_id: string; difficulty: string }> {
    return this.request("/api/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ track_ids: trackIds, difficulty }),
    });
  }

  nextQuestion(sessionId: string): Promise<Question> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}/next`);
  }

  answer(sessionId: string, questionId: string, choice: number): Promise<GradeResponse> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}/answers`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ question_id: questionId, choice }),
    });
  }

  stats(sessionId: string): Promise<SessionStats> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}/stats`);
  }
}
