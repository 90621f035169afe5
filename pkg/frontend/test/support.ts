/** Scripted backend and fake audio devices for headless controller tests.
 *
 * The backend speaks the same wire protocol as the experiment service
 * (status codes, payload shapes) but is driven entirely from test code.
 */
import {
  ChainRow,
  FetchLike,
  FetchResponse,
  RatingPayload,
  TrialPayload,
} from "../src/api.js";
import { AudioPlayer, Prefetcher } from "../src/audio.js";

function jsonResponse(status: number, body: unknown): FetchResponse {
  return {
    status,
    json: () => Promise.resolve(body),
    text: () => Promise.resolve(JSON.stringify(body)),
  };
}

export function makeTrial(
  overrides: Partial<TrialPayload> = {},
): TrialPayload {
  const n = 32;
  return {
    trial_id: "t-1",
    emotion: "anger",
    chain_id: 0,
    iteration: 0,
    free_dimension: 0,
    initial_slider_index: 15,
    expires_at: 600,
    stimulus_urls: Array.from(
      { length: n },
      (_, k) => `/api/stimulus/stim-${k}.wav`,
    ),
    ...overrides,
  };
}

export function makeRating(
  overrides: Partial<RatingPayload> = {},
): RatingPayload {
  return {
    rating_id: "r-1",
    stimulus_url: "/api/stimulus/val-0.wav",
    probed_emotion: "sadness",
    scale: 4,
    ...overrides,
  };
}

export class ScriptedBackend {
  trialQueue: TrialPayload[] = [];
  ratingQueue: RatingPayload[] = [];
  chains: ChainRow[] = [];
  responses: { trial_id: string; slider_index: number }[] = [];
  ratings: { rating_id: string; rating: number }[] = [];
  expiredTrials = new Set<string>();
  failChains = false;
  terminateCalls = 0;
  requestLog: string[] = [];

  private tokenCount = 0;
  private tokens = new Set<string>();

  readonly fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    this.requestLog.push(`${method} ${url}`);
    const [path, query] = url.split("?");
    const params = new URLSearchParams(query ?? "");
    const body = init?.body ? JSON.parse(init.body) : {};

    if (path === "/api/session") {
      const token = `p-${this.tokenCount++}`;
      this.tokens.add(token);
      return jsonResponse(200, { participant_token: token });
    }
    if (path === "/api/trial") {
      if (!this.tokens.has(params.get("participant") ?? "")) {
        return jsonResponse(403, { error: "AuthError" });
      }
      const next = this.trialQueue.shift();
      if (!next) return jsonResponse(204, null);
      return jsonResponse(200, next);
    }
    if (path === "/api/response") {
      if (this.expiredTrials.has(body.trial_id)) {
        return jsonResponse(410, { error: "ExpiredTrialError" });
      }
      if (this.responses.some((r) => r.trial_id === body.trial_id)) {
        return jsonResponse(409, { error: "DuplicateError" });
      }
      this.responses.push(body);
      return jsonResponse(200, { ok: true });
    }
    if (path === "/api/rating-trial") {
      if (!this.tokens.has(params.get("participant") ?? "")) {
        return jsonResponse(403, { error: "AuthError" });
      }
      const next = this.ratingQueue.shift();
      if (!next) return jsonResponse(204, null);
      return jsonResponse(200, next);
    }
    if (path === "/api/rating") {
      if (this.ratings.some((r) => r.rating_id === body.rating_id)) {
        return jsonResponse(409, { error: "DuplicateError" });
      }
      this.ratings.push(body);
      return jsonResponse(200, { ok: true });
    }
    if (path === "/api/admin/chains") {
      if (this.failChains) return jsonResponse(503, { error: "down" });
      return jsonResponse(200, this.chains);
    }
    if (path === "/api/admin/terminate") {
      this.terminateCalls++;
      return jsonResponse(200, { reason: "manual", validation_items: 29 });
    }
    return jsonResponse(404, { error: "unknown path" });
  };
}

export class FakeAudio implements AudioPlayer {
  played: string[] = [];
  /** When true, play() resolves only after finish() is called. */
  manual = false;
  private pending: (() => void)[] = [];

  play(url: string): Promise<void> {
    this.played.push(url);
    if (!this.manual) return Promise.resolve();
    return new Promise((resolve) => this.pending.push(resolve));
  }

  finish(): void {
    this.pending.shift()?.();
  }
}

export class FakePrefetcher implements Prefetcher {
  fetched: string[] = [];
  failUrls = new Set<string>();

  async prefetch(url: string): Promise<void> {
    if (this.failUrls.has(url)) throw new Error(`network failure: ${url}`);
    this.fetched.push(url);
  }
}
