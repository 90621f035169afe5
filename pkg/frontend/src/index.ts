export {
  ApiClient,
  ApiError,
  type ChainRow,
  type FetchLike,
  type FetchResponse,
  type RatingPayload,
  type TerminateResult,
  type TrialPayload,
} from "./api.js";
export { BrowserAudio, type AudioPlayer, type Prefetcher } from "./audio.js";
export {
  TrialController,
  type PrefetchState,
  type TrialOptions,
  type TrialState,
} from "./trial.js";
export {
  RATING_LABELS,
  RatingController,
  type RatingState,
} from "./rating.js";
export {
  DashboardController,
  type ChainViewRow,
  type Scheduler,
} from "./dashboard.js";
