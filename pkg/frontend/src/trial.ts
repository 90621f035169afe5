/** Slider trial page controller.
 *
 * Lifecycle: load the next assignment, prefetch all 32 stimuli so slider
 * feedback is instantaneous, then let the participant scrub the slider
 * (each step plays the matching stimulus) and submit exactly once. The
 * first few trials of a session are flagged as practice but behave
 * identically.
 */
import { ApiClient, ApiError, TrialPayload } from "./api.js";
import { AudioPlayer, Prefetcher } from "./audio.js";

export type TrialState =
  | "loading"
  | "prefetching"
  | "ready"
  | "submitting"
  | "submitted"
  | "empty"
  | "error";

export type PrefetchState = "pending" | "loaded" | "failed";

export interface TrialOptions {
  /** Number of leading trials flagged as practice (visually identical). */
  practiceTrials?: number;
}

export class TrialController {
  state: TrialState = "loading";
  trial: TrialPayload | null = null;
  sliderIndex = 0;
  prefetchStates: PrefetchState[] = [];
  /** True after the participant has heard at least one stimulus. */
  heardAny = false;
  /** Set when the previous assignment expired and a fresh one was loaded. */
  expiryNotice = false;
  /** Completed (submitted) trials this session. */
  trialsCompleted = 0;
  lastError: string | null = null;

  private readonly practiceTrials: number;
  private token = "";
  private submittedTrialIds = new Set<string>();

  constructor(
    private readonly api: ApiClient,
    private readonly audio: AudioPlayer,
    private readonly prefetcher: Prefetcher,
    options: TrialOptions = {},
  ) {
    this.practiceTrials = options.practiceTrials ?? 3;
  }

  /** The current trial counts as practice (same task, different label). */
  get isPractice(): boolean {
    return this.trial !== null && this.trialsCompleted < this.practiceTrials;
  }

  /** Submit is allowed once every stimulus is loaded and one was heard. */
  get canSubmit(): boolean {
    return this.state === "ready" && this.heardAny;
  }

  get prefetchProgress(): { loaded: number; total: number } {
    const loaded = this.prefetchStates.filter((s) => s === "loaded").length;
    return { loaded, total: this.prefetchStates.length };
  }

  async start(token: string): Promise<void> {
    this.token = token;
    await this.loadNext();
  }

  async loadNext(): Promise<void> {
    this.state = "loading";
    this.trial = null;
    this.heardAny = false;
    this.lastError = null;
    let trial: TrialPayload | null;
    try {
      trial = await this.api.nextTrial(this.token);
    } catch (err) {
      this.state = "error";
      this.lastError = String(err);
      return;
    }
    if (trial === null) {
      this.state = "empty"; // terminal "no trials available" screen
      return;
    }
    this.trial = trial;
    this.sliderIndex = trial.initial_slider_index;
    this.prefetchStates = trial.stimulus_urls.map(() => "pending");
    this.state = "prefetching";
    await Promise.all(
      trial.stimulus_urls.map((_, k) => this.prefetchOne(k)),
    );
    if (this.prefetchStates.every((s) => s === "loaded")) {
      this.state = "ready";
    }
  }

  /** (Re)try downloading stimulus k; flips the page to ready when the
   * last failure is resolved. */
  async prefetchOne(k: number): Promise<void> {
    if (!this.trial) return;
    try {
      await this.prefetcher.prefetch(this.trial.stimulus_urls[k]);
      this.prefetchStates[k] = "loaded";
    } catch {
      this.prefetchStates[k] = "failed";
      return;
    }
    if (
      this.state === "prefetching" &&
      this.prefetchStates.every((s) => s === "loaded")
    ) {
      this.state = "ready";
    }
  }

  /** Move the slider to grid index k and play the matching stimulus.
   * Returns the URL played, or null when the stimulus is not yet loaded
   * (only fully prefetched audio may play). */
  async moveSlider(k: number): Promise<string | null> {
    if (!this.trial || (this.state !== "ready" && this.state !== "prefetching")) {
      return null;
    }
    if (k < 0 || k >= this.trial.stimulus_urls.length) {
      throw new RangeError(`slider index ${k} out of range`);
    }
    this.sliderIndex = k;
    if (this.prefetchStates[k] !== "loaded") return null;
    const url = this.trial.stimulus_urls[k];
    this.heardAny = true;
    await this.audio.play(url);
    return url;
  }

  /** Post the current slider index. Exactly one submission can succeed
   * per trial; an expired assignment silently loads a fresh one and sets
   * `expiryNotice`. Returns true when the response was accepted. */
  async submit(): Promise<boolean> {
    if (!this.canSubmit || !this.trial) return false;
    if (this.submittedTrialIds.has(this.trial.trial_id)) return false;
    const trialId = this.trial.trial_id;
    this.state = "submitting";
    this.submittedTrialIds.add(trialId);
    try {
      await this.api.submitResponse(trialId, this.sliderIndex);
    } catch (err) {
      if (err instanceof ApiError && err.status === 410) {
        this.expiryNotice = true;
        await this.loadNext();
        return false;
      }
      this.state = "error";
      this.lastError = String(err);
      return false;
    }
    this.trialsCompleted += 1;
    this.expiryNotice = false;
    this.state = "submitted";
    return true;
  }
}
