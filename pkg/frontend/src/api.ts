/** Typed client for the experiment service HTTP API.
 *
 * The fetch implementation is injected so controllers can run headlessly
 * against a scripted backend in tests; no other network access exists.
 */

export interface TrialPayload {
  trial_id: string;
  emotion: string;
  chain_id: number;
  iteration: number;
  free_dimension: number;
  initial_slider_index: number;
  expires_at: number;
  stimulus_urls: string[];
}

export interface RatingPayload {
  rating_id: string;
  stimulus_url: string;
  probed_emotion: string;
  scale: number;
}

export interface ChainRow {
  chain_id: number;
  emotion: string;
  sentence_id: string;
  iteration: number;
  n_iterations: number;
  responses: number;
  responses_target: number;
  free_dimension: number | null;
  status: string;
  last_update: number | null;
}

export interface TerminateResult {
  reason: string;
  validation_items: number;
}

export interface FetchResponse {
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponse>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

async function expectJson<T>(resp: FetchResponse): Promise<T> {
  if (resp.status < 200 || resp.status >= 300) {
    throw new ApiError(resp.status, await resp.text());
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base = "",
  ) {}

  private async post(path: string, body: unknown): Promise<FetchResponse> {
    return this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async openSession(): Promise<string> {
    const resp = await this.fetchFn(this.base + "/api/session");
    const body = await expectJson<{ participant_token: string }>(resp);
    return body.participant_token;
  }

  /** Next slider trial for this participant, or null when none are open. */
  async nextTrial(token: string): Promise<TrialPayload | null> {
    const resp = await this.fetchFn(
      this.base + `/api/trial?participant=${encodeURIComponent(token)}`,
    );
    if (resp.status === 204) return null;
    return expectJson<TrialPayload>(resp);
  }

  async submitResponse(trialId: string, sliderIndex: number): Promise<void> {
    const resp = await this.post("/api/response", {
      trial_id: trialId,
      slider_index: sliderIndex,
    });
    await expectJson(resp);
  }

  /** Next rating trial, or null when every pair has reached its target. */
  async nextRating(token: string): Promise<RatingPayload | null> {
    const resp = await this.fetchFn(
      this.base + `/api/rating-trial?participant=${encodeURIComponent(token)}`,
    );
    if (resp.status === 204) return null;
    return expectJson<RatingPayload>(resp);
  }

  async submitRating(ratingId: string, rating: number): Promise<void> {
    const resp = await this.post("/api/rating", {
      rating_id: ratingId,
      rating,
    });
    await expectJson(resp);
  }

  async chains(): Promise<ChainRow[]> {
    const resp = await this.fetchFn(this.base + "/api/admin/chains");
    return expectJson<ChainRow[]>(resp);
  }

  async terminate(): Promise<TerminateResult> {
    const resp = await this.post("/api/admin/terminate", {});
    return expectJson<TerminateResult>(resp);
  }
}
