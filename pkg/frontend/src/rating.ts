/** Validation rating page controller.
 *
 * The stimulus autoplays exactly once when the page loads; the four
 * labeled response buttons are enabled only after playback ends, and a
 * rating can be submitted exactly once.
 */
import { ApiClient, RatingPayload } from "./api.js";
import { AudioPlayer } from "./audio.js";

export type RatingState =
  | "loading"
  | "playing"
  | "ready"
  | "submitting"
  | "submitted"
  | "empty"
  | "error";

export const RATING_LABELS = [
  "Not at all",
  "Slightly",
  "Moderately",
  "Very much",
] as const;

export class RatingController {
  state: RatingState = "loading";
  rating: RatingPayload | null = null;
  lastError: string | null = null;
  ratingsCompleted = 0;

  private token = "";
  private submittedRatingIds = new Set<string>();

  constructor(
    private readonly api: ApiClient,
    private readonly audio: AudioPlayer,
  ) {}

  /** Button labels for the 1..scale responses, lowest first. */
  get buttonLabels(): readonly string[] {
    const n = this.rating?.scale ?? RATING_LABELS.length;
    return RATING_LABELS.slice(0, n);
  }

  get canRespond(): boolean {
    return this.state === "ready";
  }

  async start(token: string): Promise<void> {
    this.token = token;
    await this.loadNext();
  }

  async loadNext(): Promise<void> {
    this.state = "loading";
    this.rating = null;
    this.lastError = null;
    let rating: RatingPayload | null;
    try {
      rating = await this.api.nextRating(this.token);
    } catch (err) {
      this.state = "error";
      this.lastError = String(err);
      return;
    }
    if (rating === null) {
      this.state = "empty";
      return;
    }
    this.rating = rating;
    this.state = "playing";
    try {
      await this.audio.play(rating.stimulus_url); // autoplay, once
    } catch (err) {
      this.state = "error";
      this.lastError = String(err);
      return;
    }
    this.state = "ready"; // buttons enabled only after playback ends
  }

  /** Submit one rating (1..scale). Returns true when accepted. */
  async choose(rating: number): Promise<boolean> {
    if (!this.canRespond || !this.rating) return false;
    const scale = this.rating.scale;
    if (!Number.isInteger(rating) || rating < 1 || rating > scale) {
      throw new RangeError(`rating ${rating} outside 1..${scale}`);
    }
    if (this.submittedRatingIds.has(this.rating.rating_id)) return false;
    this.state = "submitting";
    this.submittedRatingIds.add(this.rating.rating_id);
    try {
      await this.api.submitRating(this.rating.rating_id, rating);
    } catch (err) {
      this.state = "error";
      this.lastError = String(err);
      return false;
    }
    this.ratingsCompleted += 1;
    this.state = "submitted";
    return true;
  }
}
