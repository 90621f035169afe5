/** Admin dashboard controller: a chain-progress table polled on a fixed
 * interval, with a confirmation-gated terminate action.
 *
 * Poll failures flip a stale badge but keep the last good rows; the
 * terminate request is issued at most once.
 */
import { ApiClient, ChainRow, TerminateResult } from "./api.js";

export interface ChainViewRow {
  chainId: number;
  emotion: string;
  sentenceId: string;
  /** e.g. "7/20" */
  iterationLabel: string;
  freeDimension: number | null;
  /** e.g. "3/5" — responses collected this iteration. */
  progressLabel: string;
  /** "active" | "complete" */
  statusBadge: string;
}

export type Scheduler = (fn: () => void, intervalMs: number) => () => void;

const defaultScheduler: Scheduler = (fn, ms) => {
  const id = setInterval(fn, ms);
  return () => clearInterval(id);
};

export class DashboardController {
  rows: ChainRow[] = [];
  /** True while the latest poll has failed; existing rows are kept. */
  stale = false;
  terminateResult: TerminateResult | null = null;

  private cancelPoll: (() => void) | null = null;
  private terminateIssued = false;

  constructor(
    private readonly api: ApiClient,
    private readonly intervalMs = 5000,
    private readonly scheduler: Scheduler = defaultScheduler,
  ) {}

  async poll(): Promise<void> {
    try {
      this.rows = await this.api.chains();
      this.stale = false;
    } catch {
      this.stale = true; // keep the previous rows visible
    }
  }

  /** Begin polling (immediate fetch, then every intervalMs). */
  async start(): Promise<void> {
    await this.poll();
    this.cancelPoll = this.scheduler(() => void this.poll(), this.intervalMs);
  }

  stop(): void {
    this.cancelPoll?.();
    this.cancelPoll = null;
  }

  get view(): ChainViewRow[] {
    return this.rows.map((r) => ({
      chainId: r.chain_id,
      emotion: r.emotion,
      sentenceId: r.sentence_id,
      iterationLabel: `${r.iteration}/${r.n_iterations}`,
      freeDimension: r.free_dimension,
      progressLabel: `${r.responses}/${r.responses_target}`,
      statusBadge: r.status,
    }));
  }

  /** Terminate the experiment; `confirmed` is the result of the UI's
   * confirmation dialog and the request is never issued twice. */
  async terminate(confirmed: boolean): Promise<TerminateResult | null> {
    if (!confirmed || this.terminateIssued) return null;
    this.terminateIssued = true;
    this.terminateResult = await this.api.terminate();
    await this.poll();
    return this.terminateResult;
  }
}
